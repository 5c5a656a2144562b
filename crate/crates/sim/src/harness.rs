//! Monte-Carlo sweeps over the number of UEs.
//!
//! Every (K, trial) pair draws one scenario and channel from a seed derived
//! from the master seed, and all requested schemes run on that same
//! instance. Trials run on a rayon pool; aggregation happens afterwards in a
//! fixed order so results do not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context};
use cfslice_core::channel::build_channel;
use cfslice_core::optimizer::{run_scheme, StopReason};
use cfslice_core::rng::derive_seed;
use cfslice_core::{Scheme, Setup};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Worker-pool width override.
pub const WORKERS_ENV: &str = "CFSLICE_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub k_values: Vec<usize>,
    pub n_trials: usize,
    pub schemes: Vec<Scheme>,
    /// `config.num_ues` is replaced by each K; `config.seed` is the master seed.
    pub base: Setup,
}

impl SweepSpec {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.k_values.is_empty() {
            bail!("sweep needs at least one K");
        }
        if self.k_values.contains(&0) {
            bail!("K must be positive");
        }
        if self.n_trials == 0 {
            bail!("sweep needs at least one trial");
        }
        if self.schemes.is_empty() {
            bail!("sweep needs at least one scheme");
        }
        self.base.validate()?;
        Ok(())
    }

    pub fn master_seed(&self) -> u64 {
        self.base.config.seed
    }

    /// Setup of trial `trial` at `k` UEs.
    pub fn trial_setup(&self, k: usize, trial: usize) -> Setup {
        let mut s = self.base.clone();
        s.config.num_ues = k;
        s.config.seed = derive_seed(self.master_seed(), &[k as u64, trial as u64]);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "weighted_sum_rate")]
    WeightedSumRate,
    #[serde(rename = "success_rate_eMBB")]
    SuccessRateEmbb,
    #[serde(rename = "success_rate_URLLC")]
    SuccessRateUrllc,
    #[serde(rename = "wall_time_s")]
    WallTimeS,
    #[serde(rename = "ao_iterations")]
    AoIterations,
    #[serde(rename = "fallback_fraction")]
    FallbackFraction,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::WeightedSumRate,
        Metric::SuccessRateEmbb,
        Metric::SuccessRateUrllc,
        Metric::WallTimeS,
        Metric::AoIterations,
        Metric::FallbackFraction,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            Metric::WeightedSumRate => "weighted_sum_rate",
            Metric::SuccessRateEmbb => "success_rate_eMBB",
            Metric::SuccessRateUrllc => "success_rate_URLLC",
            Metric::WallTimeS => "wall_time_s",
            Metric::AoIterations => "ao_iterations",
            Metric::FallbackFraction => "fallback_fraction",
        }
    }

    /// Metrics that vary between identical runs.
    pub const fn nondeterministic(self) -> bool {
        matches!(self, Metric::WallTimeS)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one scheme on one drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    #[serde(rename = "K")]
    pub k: usize,
    pub trial: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub weighted_sum_rate: f64,
    #[serde(rename = "success_rate_eMBB")]
    pub success_rate_embb: Option<f64>,
    #[serde(rename = "success_rate_URLLC")]
    pub success_rate_urllc: Option<f64>,
    pub wall_time_s: f64,
    pub ao_iterations: usize,
    pub fallback_used: bool,
    pub stop_reason: StopReason,
    /// Per-iteration objective sequence.
    pub objectives: Vec<f64>,
    /// Every iteration satisfied the per-slice minimum-demand test.
    pub all_feasible: bool,
}

impl TrialRecord {
    pub fn metric(&self, m: Metric) -> Option<f64> {
        match m {
            Metric::WeightedSumRate => Some(self.weighted_sum_rate),
            Metric::SuccessRateEmbb => self.success_rate_embb,
            Metric::SuccessRateUrllc => self.success_rate_urllc,
            Metric::WallTimeS => Some(self.wall_time_s),
            Metric::AoIterations => Some(self.ao_iterations as f64),
            Metric::FallbackFraction => Some(if self.fallback_used { 1.0 } else { 0.0 }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    #[serde(rename = "K")]
    pub k: usize,
    pub scheme: Scheme,
    pub metric: Metric,
    pub mean: f64,
    pub stderr: f64,
    /// Trials contributing to this point (a slice with no UEs contributes nothing).
    pub n_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema_version: u32,
    pub seed: u64,
    pub n_trials: usize,
    #[serde(rename = "K_values")]
    pub k_values: Vec<usize>,
    pub schemes: Vec<Scheme>,
    pub nondeterministic_metrics: Vec<Metric>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn point(&self, k: usize, scheme: Scheme, metric: Metric) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| p.k == k && p.scheme == scheme && p.metric == metric)
    }

    pub fn mean(&self, k: usize, scheme: Scheme, metric: Metric) -> Option<f64> {
        self.point(k, scheme, metric).map(|p| p.mean)
    }
}

#[derive(Debug, Clone)]
pub struct SweepRun {
    pub result: SweepResult,
    /// Sorted by (K, trial, scheme).
    pub trials: Vec<TrialRecord>,
}

/// Sample mean and standard error of the mean (zero for a single sample).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn run_trial(spec: &SweepSpec, k: usize, trial: usize) -> anyhow::Result<Vec<TrialRecord>> {
    let setup = spec.trial_setup(k, trial);
    let scenario = setup.generate()?;
    let channel = build_channel(&scenario)?;
    let mut out = Vec::with_capacity(spec.schemes.len());
    for &scheme in &spec.schemes {
        let start = Instant::now();
        let outcome = run_scheme(&scenario, &channel, scheme)
            .with_context(|| format!("{scheme} failed at K={k}, trial {trial}"))?;
        let wall = start.elapsed().as_secs_f64();
        let r = &outcome.report;
        out.push(TrialRecord {
            k,
            trial,
            seed: setup.config.seed,
            scheme,
            weighted_sum_rate: r.weighted_sum_rate,
            success_rate_embb: r.success_rate.embb,
            success_rate_urllc: r.success_rate.urllc,
            wall_time_s: wall,
            ao_iterations: outcome.trace.iterations_used,
            fallback_used: r.fallback_used,
            stop_reason: outcome.trace.stop_reason,
            objectives: outcome.trace.objectives(),
            all_feasible: outcome.trace.iterations.iter().all(|it| it.feasible),
        });
    }
    Ok(out)
}

/// Pool width from [`WORKERS_ENV`], rayon's default otherwise.
pub fn worker_count() -> anyhow::Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))?;
            if n == 0 {
                bail!("{WORKERS_ENV} must be positive");
            }
            Ok(n)
        }
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

/// Aggregates trial records into the sweep table.
pub fn aggregate(spec: &SweepSpec, trials: &[TrialRecord]) -> SweepResult {
    let mut groups: BTreeMap<(usize, Scheme), Vec<&TrialRecord>> = BTreeMap::new();
    for t in trials {
        groups.entry((t.k, t.scheme)).or_default().push(t);
    }
    let mut points = Vec::new();
    for &k in &spec.k_values {
        for &scheme in &spec.schemes {
            let Some(group) = groups.get(&(k, scheme)) else {
                continue;
            };
            for metric in Metric::ALL {
                let xs: Vec<f64> = group.iter().filter_map(|t| t.metric(metric)).collect();
                let (mean, stderr) = mean_stderr(&xs);
                points.push(SweepPoint {
                    k,
                    scheme,
                    metric,
                    mean,
                    stderr,
                    n_trials: xs.len(),
                });
            }
        }
    }
    SweepResult {
        schema_version: SCHEMA_VERSION,
        seed: spec.master_seed(),
        n_trials: spec.n_trials,
        k_values: spec.k_values.clone(),
        schemes: spec.schemes.clone(),
        nondeterministic_metrics: Metric::ALL.into_iter().filter(|m| m.nondeterministic()).collect(),
        points,
    }
}

pub fn run_sweep(spec: &SweepSpec) -> anyhow::Result<SweepRun> {
    run_sweep_with_workers(spec, worker_count()?)
}

/// [`run_sweep`] on a pool of exactly `workers` threads.
pub fn run_sweep_with_workers(spec: &SweepSpec, workers: usize) -> anyhow::Result<SweepRun> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = spec
        .k_values
        .iter()
        .flat_map(|&k| (0..spec.n_trials).map(move |t| (k, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("cannot start worker pool")?;
    let per_job: Vec<Vec<TrialRecord>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(k, t)| run_trial(spec, k, t))
            .collect::<anyhow::Result<_>>()
    })?;
    let mut trials: Vec<TrialRecord> = per_job.into_iter().flatten().collect();
    trials.sort_by_key(|t| (t.k, t.trial, t.scheme));
    let result = aggregate(spec, &trials);
    Ok(SweepRun { result, trials })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unknown format `{other}` (expected csv or json)"),
        }
    }
}

pub const CSV_HEADER: [&str; 7] = ["K", "scheme", "metric", "mean", "stderr", "n_trials", "seed"];

pub fn write_results<W: Write>(result: &SweepResult, format: Format, out: W) -> anyhow::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for p in &result.points {
                w.write_record([
                    p.k.to_string(),
                    p.scheme.to_string(),
                    p.metric.to_string(),
                    p.mean.to_string(),
                    p.stderr.to_string(),
                    p.n_trials.to_string(),
                    result.seed.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, result)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn read_results_json(text: &str) -> anyhow::Result<SweepResult> {
    Ok(serde_json::from_str(text)?)
}

/// One JSON object per line.
pub fn write_trials<W: Write>(trials: &[TrialRecord], mut out: W) -> anyhow::Result<()> {
    for t in trials {
        serde_json::to_writer(&mut out, t)?;
        writeln!(out)?;
    }
    Ok(())
}

/// Relative change `(new - old) / old`; `None` when `old` is zero and `new`
/// is not.
pub fn relative_gain(new: f64, old: f64) -> Option<f64> {
    if new == old {
        Some(0.0)
    } else if old == 0.0 || !old.is_finite() || !new.is_finite() {
        None
    } else {
        Some((new - old) / old)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    #[serde(rename = "K")]
    pub k: usize,
    pub sum_rate_vs_baseline: Option<f64>,
    #[serde(rename = "success_eMBB_vs_baseline")]
    pub success_embb_vs_baseline: Option<f64>,
    #[serde(rename = "success_URLLC_vs_baseline")]
    pub success_urllc_vs_baseline: Option<f64>,
    /// `(t_hybrid - t_proposed) / t_hybrid`.
    pub runtime_reduction_vs_hybrid: Option<f64>,
    #[serde(rename = "success_eMBB_vs_hybrid")]
    pub success_embb_vs_hybrid: Option<f64>,
    #[serde(rename = "success_URLLC_vs_hybrid")]
    pub success_urllc_vs_hybrid: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GainTable {
    pub rows: Vec<GainRow>,
    /// Largest value of each column over K.
    pub max: GainRow,
}

/// Relative gains of `proposed` over `baseline` and `hybrid`, per K and
/// maximized over K. Columns whose schemes are missing stay `None`.
pub fn compare_gains(result: &SweepResult) -> GainTable {
    let gain = |k: usize, other: Scheme, m: Metric| {
        let p = result.mean(k, Scheme::Proposed, m)?;
        let o = result.mean(k, other, m)?;
        relative_gain(p, o)
    };
    let rows: Vec<GainRow> = result
        .k_values
        .iter()
        .map(|&k| GainRow {
            k,
            sum_rate_vs_baseline: gain(k, Scheme::Baseline, Metric::WeightedSumRate),
            success_embb_vs_baseline: gain(k, Scheme::Baseline, Metric::SuccessRateEmbb),
            success_urllc_vs_baseline: gain(k, Scheme::Baseline, Metric::SuccessRateUrllc),
            runtime_reduction_vs_hybrid: gain(k, Scheme::Hybrid, Metric::WallTimeS).map(|g| -g),
            success_embb_vs_hybrid: gain(k, Scheme::Hybrid, Metric::SuccessRateEmbb),
            success_urllc_vs_hybrid: gain(k, Scheme::Hybrid, Metric::SuccessRateUrllc),
        })
        .collect();
    let col_max = |f: fn(&GainRow) -> Option<f64>| {
        rows.iter().filter_map(f).fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
    };
    let max = GainRow {
        k: result.k_values.iter().copied().max().unwrap_or(0),
        sum_rate_vs_baseline: col_max(|r| r.sum_rate_vs_baseline),
        success_embb_vs_baseline: col_max(|r| r.success_embb_vs_baseline),
        success_urllc_vs_baseline: col_max(|r| r.success_urllc_vs_baseline),
        runtime_reduction_vs_hybrid: col_max(|r| r.runtime_reduction_vs_hybrid),
        success_embb_vs_hybrid: col_max(|r| r.success_embb_vs_hybrid),
        success_urllc_vs_hybrid: col_max(|r| r.success_urllc_vs_hybrid),
    };
    GainTable { rows, max }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
