use cfslice_core::channel::build_channel;
use cfslice_core::{Scheme, Setup, SystemConfig};
use cfslice_sim::harness::*;

fn spec(k_values: Vec<usize>, n_trials: usize, schemes: Vec<Scheme>) -> SweepSpec {
    SweepSpec {
        k_values,
        n_trials,
        schemes,
        base: Setup::new(SystemConfig::desk(10)),
    }
}

fn csv_string(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_results(result, Format::Csv, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn single_trial_has_zero_stderr() {
    let run = run_sweep(&spec(vec![12], 1, vec![Scheme::Proposed])).unwrap();
    assert!(!run.result.points.is_empty());
    for p in &run.result.points {
        assert_eq!(p.stderr, 0.0);
        assert!(p.n_trials <= 1);
    }
}

#[test]
fn schemes_share_each_drop() {
    let s = spec(vec![15], 3, vec![Scheme::Proposed, Scheme::Baseline]);
    let run = run_sweep(&s).unwrap();
    for t in 0..3 {
        let rows: Vec<_> = run.trials.iter().filter(|r| r.trial == t).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].seed, rows[1].seed);
        let a = build_channel(&s.trial_setup(15, t).generate().unwrap()).unwrap();
        let b = build_channel(&s.trial_setup(15, t).generate().unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn csv_shape_and_header() {
    let s = spec(vec![10, 20], 2, vec![Scheme::Proposed, Scheme::Hybrid]);
    let run = run_sweep(&s).unwrap();
    let text = csv_string(&run.result);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "K,scheme,metric,mean,stderr,n_trials,seed");
    assert_eq!(lines.count(), 2 * 2 * Metric::ALL.len());
}

#[test]
fn empty_result_is_header_only() {
    let empty = SweepResult {
        schema_version: SCHEMA_VERSION,
        seed: 1,
        n_trials: 1,
        k_values: vec![],
        schemes: vec![],
        nondeterministic_metrics: vec![Metric::WallTimeS],
        points: vec![],
    };
    assert_eq!(csv_string(&empty).trim_end(), "K,scheme,metric,mean,stderr,n_trials,seed");
}

#[test]
fn json_round_trip() {
    let run = run_sweep(&spec(vec![10], 3, Scheme::ALL.to_vec())).unwrap();
    let mut buf = Vec::new();
    write_results(&run.result, Format::Json, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let back = read_results_json(&text).unwrap();
    assert_eq!(back, run.result);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema_version"], SCHEMA_VERSION);
    assert_eq!(v["nondeterministic_metrics"][0], "wall_time_s");
}

#[test]
fn trial_dump_reproduces_aggregates() {
    let run = run_sweep(&spec(vec![10, 25], 6, Scheme::ALL.to_vec())).unwrap();
    let mut buf = Vec::new();
    write_trials(&run.trials, &mut buf).unwrap();
    let trials: Vec<TrialRecord> = String::from_utf8(buf)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    for p in &run.result.points {
        let xs: Vec<f64> = trials
            .iter()
            .filter(|t| t.k == p.k && t.scheme == p.scheme)
            .filter_map(|t| t.metric(p.metric))
            .collect();
        // independent two-pass mean / standard error
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let se = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        assert_eq!(xs.len(), p.n_trials);
        assert!((mean - p.mean).abs() <= 1e-12 * mean.abs().max(1.0));
        assert!((se - p.stderr).abs() <= 1e-12 * se.abs().max(1.0));
    }
}

#[test]
fn success_rates_are_fractions() {
    let run = run_sweep(&spec(vec![10, 30], 4, Scheme::ALL.to_vec())).unwrap();
    for p in &run.result.points {
        assert!(p.stderr >= 0.0);
        if matches!(p.metric, Metric::SuccessRateEmbb | Metric::SuccessRateUrllc | Metric::FallbackFraction) {
            assert!((0.0..=1.0).contains(&p.mean));
        }
    }
}

#[test]
fn results_do_not_depend_on_pool_width() {
    let s = spec(vec![10, 30], 4, Scheme::ALL.to_vec());
    let strip = |r: &SweepResult| {
        csv_string(r)
            .lines()
            .filter(|l| !l.contains("wall_time_s"))
            .map(str::to_owned)
            .collect::<Vec<_>>()
    };
    let a = run_sweep_with_workers(&s, 1).unwrap();
    let b = run_sweep_with_workers(&s, 4).unwrap();
    assert_eq!(strip(&a.result), strip(&b.result));
}

#[test]
fn identical_schemes_have_zero_gain() {
    let run = run_sweep(&spec(vec![10, 20], 2, vec![Scheme::Proposed])).unwrap();
    let mut r = run.result.clone();
    for p in run.result.points.iter() {
        for other in [Scheme::Baseline, Scheme::Hybrid] {
            let mut q = p.clone();
            q.scheme = other;
            r.points.push(q);
        }
    }
    let g = compare_gains(&r);
    for row in g.rows.iter().chain(std::iter::once(&g.max)) {
        assert_eq!(row.sum_rate_vs_baseline, Some(0.0));
        assert_eq!(row.runtime_reduction_vs_hybrid, Some(0.0));
        assert_eq!(row.success_urllc_vs_hybrid, Some(0.0));
    }
}

#[test]
fn loglog_slope_recovers_power_laws() {
    let xs = [10.0, 20.0, 40.0, 80.0];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 3e-5 * x.powf(1.5)).collect();
    assert!((loglog_slope(&xs, &ys).unwrap() - 1.5).abs() < 1e-12);
    assert!(loglog_slope(&xs[..1], &ys[..1]).is_none());
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(run_sweep(&spec(vec![], 1, vec![Scheme::Proposed])).is_err());
    assert!(run_sweep(&spec(vec![10], 0, vec![Scheme::Proposed])).is_err());
    assert!(run_sweep(&spec(vec![10], 1, vec![])).is_err());
}
