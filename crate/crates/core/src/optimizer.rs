//! Alternating optimization of bandwidth and association, and the three
//! evaluated schemes built on it.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::association::{
    associate_bruteforce, associate_proposed, associate_strongest, AssocInput, Association,
    AssociatorKind,
};
use crate::bandwidth::{
    allocate_lp_or_fallback, allocate_round_robin, AllocInput, AllocOutcome, AllocUe,
    AllocatorKind,
};
use crate::channel::ChannelState;
use crate::config::AoStopRule;
use crate::error::{Error, Result};
use crate::perf::{evaluate, link_quality, slice_feasibility, EvalReport, LinkQuality, SeModel};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Epsilon,
    IMax,
    /// Schemes evaluated without the alternating loop.
    SinglePass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AoIteration {
    /// Weighted sum rate (bits/s) of `b` under `association`.
    pub objective: f64,
    pub b: Vec<f64>,
    /// Association the allocation was computed for.
    pub association: Association,
    pub se: Vec<f64>,
    pub feasible: bool,
    pub fallback_used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AoTrace {
    pub iterations: Vec<AoIteration>,
    pub iterations_used: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Index of the best iterate in `iterations`.
    pub best: usize,
}

impl AoTrace {
    pub fn best_iteration(&self) -> &AoIteration {
        &self.iterations[self.best]
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.iterations.iter().map(|it| it.objective).collect()
    }
}

fn alloc_input(scenario: &Scenario, lq: &LinkQuality) -> AllocInput {
    AllocInput {
        ues: scenario
            .profiles
            .iter()
            .enumerate()
            .map(|(k, p)| AllocUe {
                weight: p.weight,
                se: lq.se[k],
                b_min: lq.b_min[k],
                slice: p.slice(),
            })
            .collect(),
        budgets: scenario.config.slice_bandwidth_hz,
    }
}

fn run_allocator(kind: AllocatorKind, input: &AllocInput) -> Result<AllocOutcome> {
    match kind {
        AllocatorKind::LpExact => Ok(allocate_lp_or_fallback(input)),
        other => other.allocate(input),
    }
}

/// Initial association: every UE on its strongest AP with spare pilot capacity.
pub fn initial_association(scenario: &Scenario, channel: &ChannelState) -> Association {
    associate_strongest(channel.beta(), scenario.config.tau_p, 1, scenario.config.seed)
}

fn run_associator(
    kind: AssociatorKind,
    scenario: &Scenario,
    channel: &ChannelState,
    model: &SeModel,
    b: &[f64],
    current: &Association,
) -> Result<Association> {
    let cfg = &scenario.config;
    let weights = scenario.weights();
    match kind {
        AssociatorKind::Proposed => Ok(associate_proposed(
            &AssocInput {
                beta: channel.beta(),
                weights: &weights,
                bandwidth: b,
                tau_p: cfg.tau_p,
            },
            cfg.assoc_per_ue_cap,
        )),
        AssociatorKind::Strongest => Ok(associate_strongest(
            channel.beta(),
            cfg.tau_p,
            cfg.strongest_n_serving,
            cfg.seed,
        )),
        AssociatorKind::Bruteforce => {
            let found = associate_bruteforce(scenario.num_ues(), scenario.num_aps(), cfg.tau_p, |a| {
                link_quality(scenario, channel, a, model)
                    .map(|lq| crate::perf::weighted_sum_rate(&weights, b, &lq.se))
                    .unwrap_or(f64::NEG_INFINITY)
            })?;
            Ok(found.map_or_else(|| current.clone(), |(a, _)| a))
        }
    }
}

/// Alternating optimization.
///
/// Starting from [`initial_association`], each iteration allocates bandwidth
/// for the current association, records the weighted sum rate of that pair
/// and then re-associates for the new bandwidth. The loop stops once the
/// relative change `|f_i - f_{i-1}| / max(f_{i-1}, 1)` drops below
/// `epsilon_ao` (with `f_0 = 0`) or after `i_max` iterations. Under
/// [`AoStopRule::Improvement`] the change is signed, so a decrease also
/// stops. The best recorded pair is reported, which need not be the last one.
///
/// `AllocatorKind::LpExact` switches to the greedy fallback on iterations
/// where some slice cannot meet its minimum demands.
pub fn run_ao(
    scenario: &Scenario,
    channel: &ChannelState,
    allocator: AllocatorKind,
    associator: AssociatorKind,
) -> Result<AoTrace> {
    let cfg = &scenario.config;
    if cfg.i_max == 0 {
        return Err(Error::InvalidConfig("i_max must be at least 1".into()));
    }
    let model = SeModel::new(cfg)?;
    let weights = scenario.weights();
    let mut a = initial_association(scenario, channel);
    let mut iterations: Vec<AoIteration> = Vec::new();
    let mut prev = 0.0f64;
    let mut stop = StopReason::IMax;

    for i in 1..=cfg.i_max {
        let lq = link_quality(scenario, channel, &a, &model)?;
        let input = alloc_input(scenario, &lq);
        let out = run_allocator(allocator, &input)?;
        let objective = crate::perf::weighted_sum_rate(&weights, &out.b, &lq.se);
        let feasible = slice_feasibility(&lq.b_min, &scenario.profiles, cfg.slice_bandwidth_hz).all();
        let next = run_associator(associator, scenario, channel, &model, &out.b, &a)?;
        iterations.push(AoIteration {
            objective,
            b: out.b,
            association: core::mem::replace(&mut a, next),
            se: lq.se,
            feasible,
            fallback_used: out.fallback_used,
        });
        let delta = match cfg.ao_stop_rule {
            AoStopRule::Absolute => (objective - prev).abs(),
            AoStopRule::Improvement => objective - prev,
        };
        let change = delta / prev.max(1.0);
        prev = objective;
        if change < cfg.epsilon_ao {
            stop = StopReason::Epsilon;
            break;
        }
        if i == cfg.i_max {
            stop = StopReason::IMax;
        }
    }

    let best = best_index(&iterations);
    Ok(AoTrace {
        iterations_used: iterations.len(),
        converged: stop == StopReason::Epsilon,
        stop_reason: stop,
        best,
        iterations,
    })
}

/// First index attaining the maximum objective.
fn best_index(iterations: &[AoIteration]) -> usize {
    let mut best = 0;
    for (i, it) in iterations.iter().enumerate() {
        if it.objective > iterations[best].objective {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Proposed,
    Hybrid,
    Baseline,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Proposed, Scheme::Hybrid, Scheme::Baseline];

    pub const fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Hybrid => "hybrid",
            Scheme::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Scheme::Proposed),
            "hybrid" => Ok(Scheme::Hybrid),
            "baseline" => Ok(Scheme::Baseline),
            other => Err(Error::UnknownName {
                kind: "scheme",
                name: String::from(other),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeOutcome {
    pub report: EvalReport,
    pub trace: AoTrace,
}

/// Single pass: strongest-link association, then round-robin bandwidth.
fn run_baseline(scenario: &Scenario, channel: &ChannelState) -> Result<AoTrace> {
    let cfg = &scenario.config;
    let model = SeModel::new(cfg)?;
    let a = associate_strongest(channel.beta(), cfg.tau_p, cfg.strongest_n_serving, cfg.seed);
    let lq = link_quality(scenario, channel, &a, &model)?;
    let out = allocate_round_robin(&alloc_input(scenario, &lq));
    let objective = crate::perf::weighted_sum_rate(&scenario.weights(), &out.b, &lq.se);
    let feasible = slice_feasibility(&lq.b_min, &scenario.profiles, cfg.slice_bandwidth_hz).all();
    Ok(AoTrace {
        iterations: alloc::vec![AoIteration {
            objective,
            b: out.b,
            association: a,
            se: lq.se,
            feasible,
            fallback_used: false,
        }],
        iterations_used: 1,
        converged: true,
        stop_reason: StopReason::SinglePass,
        best: 0,
    })
}

/// Runs one scheme and evaluates its best iterate.
///
/// * proposed: AO over the three-stage allocator and priority association;
/// * hybrid: AO over the exact allocator (greedy fallback when infeasible)
///   and strongest-link association;
/// * baseline: strongest-link association and round-robin, no AO.
pub fn run_scheme(scenario: &Scenario, channel: &ChannelState, scheme: Scheme) -> Result<SchemeOutcome> {
    let trace = match scheme {
        Scheme::Proposed => run_ao(scenario, channel, AllocatorKind::Proposed, AssociatorKind::Proposed)?,
        Scheme::Hybrid => run_ao(scenario, channel, AllocatorKind::LpExact, AssociatorKind::Strongest)?,
        Scheme::Baseline => run_baseline(scenario, channel)?,
    };
    let best = trace.best_iteration();
    let mut report = evaluate(scenario, channel, &best.association, &best.b)?;
    report.fallback_used = best.fallback_used;
    Ok(SchemeOutcome { report, trace })
}
