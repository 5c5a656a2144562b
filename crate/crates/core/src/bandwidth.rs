//! Per-UE bandwidth allocation under fixed association.
//!
//! [`allocate_proposed`] is the three-stage efficiency-ordered greedy
//! (URLLC admission, eMBB admission, proportional residual sharing). The
//! other allocators are the comparison points: the exact optimum of the
//! fixed-SINR linear program, the greedy fallback used when that program is
//! infeasible, and round-robin.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perf::BUDGET_REL_TOL;
use crate::scenario::Slice;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocUe {
    pub weight: f64,
    /// bits/s/Hz
    pub se: f64,
    /// Hz, `+inf` when the UE cannot be served.
    pub b_min: f64,
    pub slice: Slice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocInput {
    pub ues: Vec<AllocUe>,
    /// `[eMBB, URLLC]`, Hz.
    pub budgets: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocOutcome {
    pub b: Vec<f64>,
    /// UE received at least its minimum bandwidth in the admission pass.
    pub admitted: Vec<bool>,
    /// Budget left unused per slice after allocation, `[eMBB, URLLC]`.
    pub residual_hz: [f64; 2],
    #[serde(default)]
    pub fallback_used: bool,
}

impl AllocInput {
    pub fn len(&self) -> usize {
        self.ues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ues.is_empty()
    }

    fn members(&self, slice: Slice) -> Vec<usize> {
        (0..self.ues.len())
            .filter(|&k| self.ues[k].slice == slice)
            .collect()
    }

    /// Objective `sum_k w_k * se_k * b_k`.
    pub fn objective(&self, b: &[f64]) -> f64 {
        self.ues
            .iter()
            .zip(b)
            .map(|(u, b)| u.weight * u.se * b)
            .sum()
    }

    /// Per-slice sum of `b`.
    pub fn slice_usage(&self, b: &[f64]) -> [f64; 2] {
        let mut used = [0.0; 2];
        for (u, b) in self.ues.iter().zip(b) {
            used[u.slice.index()] += *b;
        }
        used
    }
}

/// `zeta = w * se / b_min`; zero when the UE is unservable.
pub fn efficiency_metric(weight: f64, se: f64, b_min: f64) -> f64 {
    if !(se > 0.0) || !b_min.is_finite() || !(b_min > 0.0) {
        return 0.0;
    }
    weight * se / b_min
}

/// Indices sorted by `key` descending, ties by ascending index.
fn sorted_desc(members: &[usize], key: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut order = members.to_vec();
    order.sort_by(|&x, &y| key(y).total_cmp(&key(x)).then(x.cmp(&y)));
    order
}

/// Three-stage efficiency-ordered allocation.
///
/// URLLC UEs, then eMBB UEs, are admitted at `b_min` in descending `zeta`
/// whenever their demand fits the remaining slice budget. Each slice's
/// leftover is then split among its admitted UEs in proportion to `zeta`.
/// A slice with no admitted UE keeps its leftover unused.
pub fn allocate_proposed(input: &AllocInput) -> AllocOutcome {
    let n = input.len();
    let zeta: Vec<f64> = input
        .ues
        .iter()
        .map(|u| efficiency_metric(u.weight, u.se, u.b_min))
        .collect();
    let mut b = vec![0.0; n];
    let mut admitted = vec![false; n];
    let mut remaining = input.budgets;

    for slice in [Slice::Urllc, Slice::Embb] {
        let s = slice.index();
        for k in sorted_desc(&input.members(slice), |k| zeta[k]) {
            let need = input.ues[k].b_min;
            if need.is_finite() && remaining[s] >= need {
                b[k] = need;
                admitted[k] = true;
                remaining[s] -= need;
            }
        }
    }

    for slice in Slice::ALL {
        let s = slice.index();
        let group: Vec<usize> = (0..n)
            .filter(|&k| admitted[k] && input.ues[k].slice == slice)
            .collect();
        let total: f64 = group.iter().map(|&k| zeta[k]).sum();
        if remaining[s] > 0.0 && !group.is_empty() && total > 0.0 {
            for &k in &group {
                b[k] += remaining[s] * zeta[k] / total;
            }
            remaining[s] = 0.0;
        }
    }

    AllocOutcome {
        b,
        admitted,
        residual_hz: remaining,
        fallback_used: false,
    }
}

/// Exact optimum of the fixed-SINR bandwidth program.
///
/// With SINR independent of `b`, the objective is linear and each slice has
/// one budget constraint, so the optimum grants every UE its `b_min` and
/// gives the whole slack to the UE with the largest `w * se` (lowest index on
/// ties). Fails with [`Error::Infeasible`] when a slice cannot cover its
/// demands.
pub fn allocate_lp_exact(input: &AllocInput) -> Result<AllocOutcome> {
    let n = input.len();
    let mut b = vec![0.0; n];
    let mut residual = input.budgets;
    for slice in Slice::ALL {
        let s = slice.index();
        let members = input.members(slice);
        let demand: f64 = members.iter().map(|&k| input.ues[k].b_min).sum();
        if !demand.is_finite() || demand > input.budgets[s] * (1.0 + BUDGET_REL_TOL) {
            return Err(Error::Infeasible(slice));
        }
        if members.is_empty() {
            continue;
        }
        for &k in &members {
            b[k] = input.ues[k].b_min;
        }
        let best = sorted_desc(&members, |k| input.ues[k].weight * input.ues[k].se)[0];
        b[best] += (input.budgets[s] - demand).max(0.0);
        residual[s] = 0.0;
    }
    Ok(AllocOutcome {
        b,
        admitted: vec![true; n],
        residual_hz: residual,
        fallback_used: false,
    })
}

/// Greedy split used when the exact program is infeasible: per slice, UEs in
/// descending `w * se` receive `min(b_min, remaining)`; whatever is left
/// afterwards goes to the first fully served UE. UEs with zero SE get nothing.
pub fn allocate_greedy_fallback(input: &AllocInput) -> AllocOutcome {
    let n = input.len();
    let mut b = vec![0.0; n];
    let mut admitted = vec![false; n];
    let mut residual = input.budgets;
    for slice in Slice::ALL {
        let s = slice.index();
        let order = sorted_desc(&input.members(slice), |k| input.ues[k].weight * input.ues[k].se);
        let mut remaining = input.budgets[s];
        for &k in &order {
            let u = &input.ues[k];
            if !(u.se > 0.0) {
                continue;
            }
            let grant = u.b_min.min(remaining);
            b[k] = grant;
            remaining -= grant;
            admitted[k] = grant > 0.0 && grant >= u.b_min;
        }
        if remaining > 0.0 {
            if let Some(&first) = order.iter().find(|&&k| admitted[k]) {
                b[first] += remaining;
                remaining = 0.0;
            }
        }
        residual[s] = remaining;
    }
    AllocOutcome {
        b,
        admitted,
        residual_hz: residual,
        fallback_used: false,
    }
}

/// Equal split of each slice budget among its members, ignoring demands.
pub fn allocate_round_robin(input: &AllocInput) -> AllocOutcome {
    let n = input.len();
    let mut b = vec![0.0; n];
    let mut residual = input.budgets;
    for slice in Slice::ALL {
        let s = slice.index();
        let members = input.members(slice);
        if members.is_empty() {
            continue;
        }
        let share = input.budgets[s] / members.len() as f64;
        for &k in &members {
            b[k] = share;
        }
        residual[s] = 0.0;
    }
    let admitted = (0..n)
        .map(|k| b[k] >= input.ues[k].b_min * (1.0 - crate::perf::QOS_REL_TOL))
        .collect();
    AllocOutcome {
        b,
        admitted,
        residual_hz: residual,
        fallback_used: false,
    }
}

/// Exact program when feasible, greedy fallback otherwise.
pub fn allocate_lp_or_fallback(input: &AllocInput) -> AllocOutcome {
    match allocate_lp_exact(input) {
        Ok(out) => out,
        Err(_) => AllocOutcome {
            fallback_used: true,
            ..allocate_greedy_fallback(input)
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocatorKind {
    Proposed,
    LpExact,
    GreedyFallback,
    RoundRobin,
}

impl AllocatorKind {
    pub const fn name(self) -> &'static str {
        match self {
            AllocatorKind::Proposed => "proposed",
            AllocatorKind::LpExact => "lp_exact",
            AllocatorKind::GreedyFallback => "greedy_fallback",
            AllocatorKind::RoundRobin => "round_robin",
        }
    }

    /// Runs the allocator. `LpExact` surfaces infeasibility as an error.
    pub fn allocate(self, input: &AllocInput) -> Result<AllocOutcome> {
        match self {
            AllocatorKind::Proposed => Ok(allocate_proposed(input)),
            AllocatorKind::LpExact => allocate_lp_exact(input),
            AllocatorKind::GreedyFallback => Ok(allocate_greedy_fallback(input)),
            AllocatorKind::RoundRobin => Ok(allocate_round_robin(input)),
        }
    }
}

impl fmt::Display for AllocatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AllocatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Self::Proposed),
            "lp_exact" => Ok(Self::LpExact),
            "greedy_fallback" => Ok(Self::GreedyFallback),
            "round_robin" => Ok(Self::RoundRobin),
            other => Err(Error::UnknownName {
                kind: "allocator",
                name: String::from(other),
            }),
        }
    }
}
