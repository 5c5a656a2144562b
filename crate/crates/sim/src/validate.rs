//! Self-check suites behind `cfslice validate`.

use anyhow::bail;
use cfslice_core::association::{associate_bruteforce, associate_proposed, AssocInput};
use cfslice_core::bandwidth::{allocate_lp_exact, allocate_proposed, AllocInput, AllocUe};
use cfslice_core::channel::{build_channel, ChannelState, LargeScale, PilotPlan};
use cfslice_core::optimizer::initial_association;
use cfslice_core::perf::{
    delay, link_quality, min_bandwidth, qos_satisfied, sinr_all, sinr_matrix_terms, sinr_subset,
    slice_feasibility, weighted_sum_rate, SeModel,
};
use cfslice_core::scenario::Traffic;
use cfslice_core::{Association, Scenario, Setup, Slice, SystemConfig, UeProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const SUITES: [&str; 4] = ["sinr_equivalence", "lp_oracle", "assoc_oracle", "qos_roundtrip"];

/// Fault injection for negative controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hooks {
    /// Multiplies the numerator of the association-matrix SINR form.
    pub sinr_numerator_scale: f64,
}

impl Default for Hooks {
    fn default() -> Self {
        Self {
            sinr_numerator_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    pub detail: String,
}

fn report(suite: &str, cases: usize, failures: usize, detail: String) -> SuiteReport {
    SuiteReport {
        suite: suite.to_string(),
        passed: failures == 0 && cases > 0,
        cases,
        failures,
        detail,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Random channel with `K <= max_k`, `M <= max_m` and a random association
/// that serves every UE.
pub fn random_tiny(rng: &mut ChaCha8Rng, max_k: usize, max_m: usize) -> (ChannelState, Association, f64, usize) {
    let k_n = rng.random_range(1..=max_k);
    let m_n = rng.random_range(1..=max_m);
    let tau_p = rng.random_range(1..=k_n);
    let rho = 10f64.powf(rng.random_range(9.0..12.0));
    let beta: Vec<Vec<f64>> = (0..k_n)
        .map(|_| (0..m_n).map(|_| 10f64.powf(rng.random_range(-13.0..-6.0))).collect())
        .collect();
    let pilots = PilotPlan {
        tau_p,
        pilot_id: (0..k_n).map(|_| rng.random_range(0..tau_p)).collect(),
        eta_p: (0..k_n).map(|_| rng.random_range(0.05..=1.0)).collect(),
    };
    let eta_d = (0..k_n).map(|_| rng.random_range(0.05..=1.0)).collect();
    let channel = ChannelState::from_parts(LargeScale::from_beta(beta), pilots, eta_d, rho)
        .expect("consistent dimensions");
    let rows: Vec<Vec<bool>> = (0..k_n)
        .map(|_| {
            let mut r: Vec<bool> = (0..m_n).map(|_| rng.random_bool(0.5)).collect();
            r[rng.random_range(0..m_n)] = true;
            r
        })
        .collect();
    (channel, Association::from_rows(&rows), rho, rng.random_range(1..=8))
}

fn sinr_equivalence(seed: u64, hooks: &Hooks) -> anyhow::Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut cases, mut failures, mut worst) = (0, 0, 0.0f64);
    for _ in 0..1000 {
        let (ch, a, rho, n) = random_tiny(&mut rng, 10, 10);
        let batch = sinr_all(&a, &ch, rho, n)?;
        for k in 0..ch.num_ues() {
            let subset = sinr_subset(k, &a.serving(k), &ch, rho, n)?;
            let terms = sinr_matrix_terms(k, &a, &ch, rho, n)?;
            let matrix = terms.numerator * hooks.sinr_numerator_scale / terms.denominator;
            let err = rel(subset, matrix).max(rel(subset, batch[k]));
            worst = worst.max(err);
            cases += 1;
            failures += (err > 1e-12) as usize;
        }
    }
    Ok(report("sinr_equivalence", cases, failures, format!("max relative gap {worst:.3e}")))
}

/// Exhaustive split of the slack in `step` units over `(w*se, b_min)` UEs.
fn grid_best(ues: &[(f64, f64)], slack: f64, step: f64) -> (f64, Vec<f64>) {
    fn rec(i: usize, left: usize, ues: &[(f64, f64)], step: f64, cur: &mut Vec<f64>, best: &mut (f64, Vec<f64>)) {
        if i + 1 == ues.len() {
            cur.push(left as f64 * step);
            let v: f64 = ues.iter().zip(cur.iter()).map(|((c, bm), x)| c * (bm + x)).sum();
            if v > best.0 {
                *best = (v, cur.clone());
            }
            cur.pop();
            return;
        }
        for u in 0..=left {
            cur.push(u as f64 * step);
            rec(i + 1, left - u, ues, step, cur, best);
            cur.pop();
        }
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    rec(0, (slack / step).floor() as usize, ues, step, &mut Vec::new(), &mut best);
    best
}

fn lp_oracle(seed: u64) -> anyhow::Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = 0.05e6;
    let (mut failures, mut dominated) = (0, 0);
    let cases = 500;
    for _ in 0..cases {
        let n = rng.random_range(3..=6);
        let ues: Vec<AllocUe> = (0..n)
            .map(|_| AllocUe {
                weight: rng.random_range(1.0..4.0),
                se: rng.random_range(0.2..6.0),
                b_min: rng.random_range(0.1e6..3e6),
                slice: if rng.random_bool(0.5) { Slice::Embb } else { Slice::Urllc },
            })
            .collect();
        let mut budgets = [0.0; 2];
        for u in &ues {
            budgets[u.slice.index()] += u.b_min;
        }
        for b in &mut budgets {
            *b += rng.random_range(0.0..1.0e6);
        }
        let input = AllocInput { ues: ues.clone(), budgets };
        let lp = allocate_lp_exact(&input)?;
        let mut ok = true;
        let mut grid_total = 0.0;
        for s in Slice::ALL {
            let idx: Vec<usize> = (0..n).filter(|&k| ues[k].slice == s).collect();
            if idx.is_empty() {
                continue;
            }
            let members: Vec<(f64, f64)> = idx.iter().map(|&k| (ues[k].weight * ues[k].se, ues[k].b_min)).collect();
            let slack = budgets[s.index()] - members.iter().map(|m| m.1).sum::<f64>();
            let (v, extra) = grid_best(&members, slack, step);
            grid_total += v;
            for (j, &k) in idx.iter().enumerate() {
                ok &= (lp.b[k] - (ues[k].b_min + extra[j])).abs() <= step + 1e-6;
            }
        }
        let lp_obj = input.objective(&lp.b);
        ok &= lp_obj >= grid_total * (1.0 - 1e-12);
        let proposed_ok = input.objective(&allocate_proposed(&input).b) <= lp_obj * (1.0 + 1e-12);
        dominated += proposed_ok as usize;
        failures += (!ok || !proposed_ok) as usize;
    }
    Ok(report(
        "lp_oracle",
        cases,
        failures,
        format!("proposed <= exact on {dominated}/{cases}"),
    ))
}

/// Small scenario with `K * M <= 12` drawn from the standard generator.
fn tiny_scenario(rng: &mut ChaCha8Rng) -> anyhow::Result<(Scenario, ChannelState)> {
    loop {
        let m_n = rng.random_range(1..=6);
        let k_n = rng.random_range(1..=12 / m_n);
        let tau_p = rng.random_range(1..=2);
        if k_n > m_n * tau_p {
            continue;
        }
        let mut cfg = SystemConfig::full_scale(k_n);
        cfg.num_aps = m_n;
        cfg.tau_p = tau_p;
        cfg.area_side_m = 200.0;
        cfg.slice_bandwidth_hz = [2e6, 2e6];
        cfg.total_bandwidth_hz = 4e6;
        cfg.seed = rng.random();
        let scenario = Setup::new(cfg).generate()?;
        let channel = build_channel(&scenario)?;
        return Ok((scenario, channel));
    }
}

/// Proposed association against the exhaustive optimum of the association
/// subproblem at fixed bandwidth. The oracle may use as much per-AP capacity
/// as the proposed output did, so the comparison stays meaningful when the
/// emergency branch overflows an AP.
pub fn assoc_case(scenario: &Scenario, channel: &ChannelState) -> anyhow::Result<AssocCase> {
    let cfg = &scenario.config;
    let model = SeModel::new(cfg)?;
    let weights = scenario.weights();
    let a0 = initial_association(scenario, channel);
    let lq0 = link_quality(scenario, channel, &a0, &model)?;
    let input = AllocInput {
        ues: (0..scenario.num_ues())
            .map(|k| AllocUe {
                weight: weights[k],
                se: lq0.se[k],
                b_min: lq0.b_min[k],
                slice: scenario.profiles[k].slice(),
            })
            .collect(),
        budgets: cfg.slice_bandwidth_hz,
    };
    let b = allocate_proposed(&input).b;
    let proposed = associate_proposed(
        &AssocInput {
            beta: channel.beta(),
            weights: &weights,
            bandwidth: &b,
            tau_p: cfg.tau_p,
        },
        cfg.assoc_per_ue_cap,
    );
    let objective = |a: &Association| -> f64 {
        link_quality(scenario, channel, a, &model)
            .map(|lq| weighted_sum_rate(&weights, &b, &lq.se))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let p_obj = objective(&proposed);
    let capacity = cfg.tau_p.max(proposed.max_load());
    let (_, best) = associate_bruteforce(scenario.num_ues(), scenario.num_aps(), capacity, objective)?
        .expect("the proposed output is itself admissible");
    let overflow_ok = (0..scenario.num_aps()).all(|m| {
        proposed.load()[m] <= cfg.tau_p || proposed.emergency_ues().iter().any(|&k| proposed.get(k, m))
    });
    Ok(AssocCase {
        proposed: p_obj,
        oracle: best,
        constraints_ok: proposed.covers_all() && overflow_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssocCase {
    pub proposed: f64,
    pub oracle: f64,
    pub constraints_ok: bool,
}

impl AssocCase {
    /// `proposed / oracle`, 1 when both are zero.
    pub fn ratio(&self) -> f64 {
        if self.oracle == 0.0 && self.proposed == 0.0 {
            1.0
        } else {
            self.proposed / self.oracle
        }
    }
}

fn assoc_oracle(seed: u64) -> anyhow::Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = 200;
    let mut failures = 0;
    let mut ratios = Vec::with_capacity(cases);
    for _ in 0..cases {
        let (s, ch) = tiny_scenario(&mut rng)?;
        let c = assoc_case(&s, &ch)?;
        let r = c.ratio();
        ratios.push(r);
        failures += (!c.constraints_ok || r > 1.0 + 1e-12 || !(r > 0.0) && c.oracle > 0.0) as usize;
    }
    let mean = ratios.iter().sum::<f64>() / cases as f64;
    if mean < 0.5 {
        failures += 1;
    }
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(report(
        "assoc_oracle",
        cases,
        failures,
        format!("mean ratio {mean:.4}, min ratio {min:.4}"),
    ))
}

fn qos_roundtrip(seed: u64) -> anyhow::Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = SeModel::new(&SystemConfig::full_scale(1))?;
    let (mut cases, mut failures) = (0, 0);
    for _ in 0..2000 {
        let sinr = 10f64.powf(rng.random_range(0.0..4.0));
        let profile = if rng.random_bool(0.5) {
            UeProfile {
                weight: 3.0,
                traffic: Traffic::Urllc {
                    packet_bytes: rng.random_range(20..=120) as f64,
                    arrival_rate: rng.random_range(5.0..25.0),
                    max_delay_s: rng.random_range(0.5e-3..2.5e-3),
                },
            }
        } else {
            UeProfile {
                weight: 1.0,
                traffic: Traffic::Embb {
                    min_rate_bps: rng.random_range(1e6..10e6),
                    tier: cfslice_core::scenario::Tier::Standard,
                },
            }
        };
        let se = model.se(sinr, &profile);
        if se == 0.0 {
            continue;
        }
        let b = min_bandwidth(se, &profile);
        let rate = b * se;
        let tight = match profile.traffic {
            Traffic::Urllc { max_delay_s, .. } => rel(delay(0, rate, &profile)?, max_delay_s) <= 1e-9,
            Traffic::Embb { min_rate_bps, .. } => rel(rate, min_rate_bps) <= 1e-9,
        };
        cases += 1;
        failures += (!tight || !qos_satisfied(rate, &profile)) as usize;
    }
    // budget boundary of the per-slice demand test
    for _ in 0..500 {
        let n = rng.random_range(1..8);
        let profiles: Vec<UeProfile> = (0..n)
            .map(|_| UeProfile {
                weight: 1.0,
                traffic: Traffic::Embb {
                    min_rate_bps: 1e6,
                    tier: cfslice_core::scenario::Tier::Standard,
                },
            })
            .collect();
        let b_min: Vec<f64> = (0..n).map(|_| rng.random_range(1e5..5e6)).collect();
        let demand: f64 = b_min.iter().sum();
        let above = slice_feasibility(&b_min, &profiles, [demand * (1.0 + 1e-6), 0.0]).feasible.embb;
        let below = slice_feasibility(&b_min, &profiles, [demand * (1.0 - 1e-6), 0.0]).feasible.embb;
        cases += 1;
        failures += (!above || below) as usize;
    }
    Ok(report("qos_roundtrip", cases, failures, String::new()))
}

pub fn run_suite(name: &str, seed: u64, hooks: &Hooks) -> anyhow::Result<SuiteReport> {
    match name {
        "sinr_equivalence" => sinr_equivalence(seed, hooks),
        "lp_oracle" => lp_oracle(seed),
        "assoc_oracle" => assoc_oracle(seed),
        "qos_roundtrip" => qos_roundtrip(seed),
        other => bail!("unknown suite `{other}`"),
    }
}

/// Runs the named suites (all when `only` is empty), in the order given.
pub fn run_validation(only: &[String], seed: u64, hooks: &Hooks) -> anyhow::Result<Vec<SuiteReport>> {
    let names: Vec<&str> = if only.is_empty() {
        SUITES.to_vec()
    } else {
        only.iter().map(String::as_str).collect()
    };
    names.into_iter().map(|n| run_suite(n, seed, hooks)).collect()
}
