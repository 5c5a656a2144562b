//! Runtime scaling of the schemes against K.

use cfslice_core::{Scheme, Setup};
use serde::{Deserialize, Serialize};

use crate::harness::{loglog_slope, run_sweep_with_workers, Metric, SweepSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    #[serde(rename = "K")]
    pub k: usize,
    pub scheme: Scheme,
    pub mean_wall_time_s: f64,
    pub stderr_s: f64,
    pub n_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSlope {
    pub scheme: Scheme,
    /// Least-squares slope of log runtime against log K.
    pub loglog_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
    pub slopes: Vec<BenchSlope>,
    /// Per K, `t_hybrid / t_proposed` when both were measured.
    pub hybrid_over_proposed: Vec<(usize, f64)>,
}

/// Times every scheme at each K. Trials run one at a time by default so the
/// measurements do not compete for cores.
pub fn run_bench(
    base: &Setup,
    k_values: &[usize],
    n_trials: usize,
    schemes: &[Scheme],
    workers: usize,
) -> anyhow::Result<BenchTable> {
    let spec = SweepSpec {
        k_values: k_values.to_vec(),
        n_trials,
        schemes: schemes.to_vec(),
        base: base.clone(),
    };
    let result = run_sweep_with_workers(&spec, workers)?.result;
    let mut rows = Vec::new();
    for &k in k_values {
        for &scheme in schemes {
            if let Some(p) = result.point(k, scheme, Metric::WallTimeS) {
                rows.push(BenchRow {
                    k,
                    scheme,
                    mean_wall_time_s: p.mean,
                    stderr_s: p.stderr,
                    n_trials: p.n_trials,
                });
            }
        }
    }
    let slopes = schemes
        .iter()
        .map(|&scheme| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.scheme == scheme)
                .map(|r| (r.k as f64, r.mean_wall_time_s))
                .unzip();
            BenchSlope {
                scheme,
                loglog_slope: loglog_slope(&xs, &ys),
            }
        })
        .collect();
    let time = |k: usize, s: Scheme| rows.iter().find(|r| r.k == k && r.scheme == s).map(|r| r.mean_wall_time_s);
    let hybrid_over_proposed = k_values
        .iter()
        .filter_map(|&k| Some((k, time(k, Scheme::Hybrid)? / time(k, Scheme::Proposed)?)))
        .collect();
    Ok(BenchTable {
        rows,
        slopes,
        hybrid_over_proposed,
    })
}

pub fn write_bench_csv<W: std::io::Write>(table: &BenchTable, out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["K", "scheme", "mean_wall_time_s", "stderr_s", "n_trials"])?;
    for r in &table.rows {
        w.write_record([
            r.k.to_string(),
            r.scheme.to_string(),
            r.mean_wall_time_s.to_string(),
            r.stderr_s.to_string(),
            r.n_trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
