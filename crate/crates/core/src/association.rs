//! UE-AP association: the priority-based greedy scheme, the strongest-link
//! baseline (also the AO initializer) and an exhaustive oracle for tiny
//! instances.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Binary `K x M` association matrix with per-AP load counters.
///
/// Serialized as a sparse `(k, m)` pair list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "SparseAssociation", try_from = "SparseAssociation")]
pub struct Association {
    a: Vec<Vec<bool>>,
    load: Vec<usize>,
    /// UEs connected through the forced (emergency) branch.
    emergency: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SparseAssociation {
    num_ues: usize,
    num_aps: usize,
    pairs: Vec<(usize, usize)>,
    #[serde(default)]
    emergency: Vec<usize>,
}

impl From<Association> for SparseAssociation {
    fn from(a: Association) -> Self {
        Self {
            num_ues: a.num_ues(),
            num_aps: a.num_aps(),
            pairs: a.pairs().collect(),
            emergency: a.emergency,
        }
    }
}

impl TryFrom<SparseAssociation> for Association {
    type Error = Error;

    fn try_from(s: SparseAssociation) -> Result<Self> {
        let mut a = Association::new(s.num_ues, s.num_aps);
        for (k, m) in s.pairs {
            if k >= s.num_ues || m >= s.num_aps {
                return Err(Error::Dimension(alloc::format!("pair ({k}, {m}) out of range")));
            }
            a.set(k, m);
        }
        a.emergency = s.emergency;
        Ok(a)
    }
}

impl Association {
    pub fn new(num_ues: usize, num_aps: usize) -> Self {
        Self {
            a: vec![vec![false; num_aps]; num_ues],
            load: vec![0; num_aps],
            emergency: Vec::new(),
        }
    }

    /// Builds a matrix from 0/1 rows.
    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let num_aps = rows.first().map_or(0, Vec::len);
        let mut a = Self::new(rows.len(), num_aps);
        for (k, row) in rows.iter().enumerate() {
            for (m, &on) in row.iter().enumerate() {
                if on {
                    a.set(k, m);
                }
            }
        }
        a
    }

    pub fn num_ues(&self) -> usize {
        self.a.len()
    }

    pub fn num_aps(&self) -> usize {
        self.load.len()
    }

    /// Sets `a[k][m] = 1`; returns false if it was already set.
    pub fn set(&mut self, k: usize, m: usize) -> bool {
        if self.a[k][m] {
            return false;
        }
        self.a[k][m] = true;
        self.load[m] += 1;
        true
    }

    #[inline]
    pub fn get(&self, k: usize, m: usize) -> bool {
        self.a[k][m]
    }

    pub fn row(&self, k: usize) -> &[bool] {
        &self.a[k]
    }

    /// Serving set `V_k`, ascending AP index.
    pub fn serving(&self, k: usize) -> Vec<usize> {
        self.a[k]
            .iter()
            .enumerate()
            .filter_map(|(m, &on)| on.then_some(m))
            .collect()
    }

    pub fn load(&self) -> &[usize] {
        &self.load
    }

    pub fn max_load(&self) -> usize {
        self.load.iter().copied().max().unwrap_or(0)
    }

    pub fn emergency_ues(&self) -> &[usize] {
        &self.emergency
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.a.iter().enumerate().flat_map(|(k, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(m, &on)| on.then_some((k, m)))
        })
    }

    /// Every UE has at least one serving AP.
    pub fn covers_all(&self) -> bool {
        self.a.iter().all(|row| row.iter().any(|&on| on))
    }

    /// Number of APs whose load exceeds `tau_p`.
    pub fn overloaded_aps(&self, tau_p: usize) -> usize {
        self.load.iter().filter(|&&l| l > tau_p).count()
    }
}

/// Inputs of the priority-based associator.
#[derive(Debug, Clone, Copy)]
pub struct AssocInput<'a> {
    pub beta: &'a [Vec<f64>],
    pub weights: &'a [f64],
    pub bandwidth: &'a [f64],
    pub tau_p: usize,
}

/// APs of one UE ordered by potential, then gain (both descending), then index.
fn rank_aps(potential: &[f64], beta: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..beta.len()).collect();
    order.sort_by(|&x, &y| {
        potential[y]
            .total_cmp(&potential[x])
            .then_with(|| beta[y].total_cmp(&beta[x]))
            .then(x.cmp(&y))
    });
    order
}

/// Priority-based association.
///
/// UEs are visited by descending `w_k * b_k`; each one scans its APs by
/// descending potential `w_k * b_k * beta_km` and takes every AP whose load is
/// still below `tau_p` (at most `per_ue_cap` of them when a cap is given). A
/// UE left without an AP is forced onto its top-ranked AP, which may push
/// that AP beyond `tau_p`.
pub fn associate_proposed(input: &AssocInput<'_>, per_ue_cap: Option<usize>) -> Association {
    let k_n = input.beta.len();
    let m_n = input.beta.first().map_or(0, Vec::len);
    let priority: Vec<f64> = (0..k_n)
        .map(|k| input.weights[k] * input.bandwidth[k])
        .collect();
    let mut ues: Vec<usize> = (0..k_n).collect();
    ues.sort_by(|&x, &y| priority[y].total_cmp(&priority[x]).then(x.cmp(&y)));

    let cap = per_ue_cap.unwrap_or(usize::MAX);
    let mut assoc = Association::new(k_n, m_n);
    let mut potential = vec![0.0; m_n];
    for k in ues {
        let beta = &input.beta[k];
        for m in 0..m_n {
            potential[m] = priority[k] * beta[m];
        }
        let ranked = rank_aps(&potential, beta);
        let mut assigned = 0;
        for &m in &ranked {
            if assigned == cap {
                break;
            }
            if assoc.load[m] < input.tau_p {
                assoc.set(k, m);
                assigned += 1;
            }
        }
        if assigned == 0 {
            if let Some(&best) = ranked.first() {
                assoc.set(k, best);
                assoc.emergency.push(k);
            }
        }
    }
    assoc
}

/// Strongest-link association: UEs in a seeded random order each take their
/// `n_serving` strongest APs that still have capacity, falling back to the
/// single strongest AP when all are full.
pub fn associate_strongest(
    beta: &[Vec<f64>],
    tau_p: usize,
    n_serving: usize,
    order_seed: u64,
) -> Association {
    let k_n = beta.len();
    let m_n = beta.first().map_or(0, Vec::len);
    let mut ues: Vec<usize> = (0..k_n).collect();
    ues.shuffle(&mut stream_rng(order_seed, Stream::AssociationOrder));

    let mut assoc = Association::new(k_n, m_n);
    let mut aps: Vec<usize> = Vec::with_capacity(m_n);
    for k in ues {
        let row = &beta[k];
        aps.clear();
        aps.extend(0..m_n);
        aps.sort_by(|&x, &y| row[y].total_cmp(&row[x]).then(x.cmp(&y)));
        let mut assigned = 0;
        for &m in &aps {
            if assigned == n_serving {
                break;
            }
            if assoc.load[m] < tau_p {
                assoc.set(k, m);
                assigned += 1;
            }
        }
        if assigned == 0 {
            if let Some(&best) = aps.first() {
                assoc.set(k, best);
                assoc.emergency.push(k);
            }
        }
    }
    assoc
}

/// Largest `K * M` the exhaustive oracle accepts.
pub const BRUTEFORCE_LIMIT: usize = 16;

/// Exhaustive search over all `A` with full coverage and per-AP load at most
/// `capacity`. Returns the maximizer of `objective` and its value, or `None`
/// when no such matrix exists. Ties go to the lexicographically smallest
/// flattened (row-major) matrix.
pub fn associate_bruteforce<F>(
    num_ues: usize,
    num_aps: usize,
    capacity: usize,
    mut objective: F,
) -> Result<Option<(Association, f64)>>
where
    F: FnMut(&Association) -> f64,
{
    let n = num_ues * num_aps;
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::EnumerationTooLarge {
            size: n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let mut best: Option<(Association, f64)> = None;
    let mut loads = vec![0usize; num_aps];
    'masks: for mask in 0u32..(1u32 << n) {
        let bit = |k: usize, m: usize| (mask >> (n - 1 - (k * num_aps + m))) & 1 == 1;
        loads.iter_mut().for_each(|l| *l = 0);
        for k in 0..num_ues {
            let mut any = false;
            for m in 0..num_aps {
                if bit(k, m) {
                    any = true;
                    loads[m] += 1;
                }
            }
            if !any {
                continue 'masks;
            }
        }
        if loads.iter().any(|&l| l > capacity) {
            continue;
        }
        let mut a = Association::new(num_ues, num_aps);
        for k in 0..num_ues {
            for m in 0..num_aps {
                if bit(k, m) {
                    a.set(k, m);
                }
            }
        }
        let value = objective(&a);
        let better = match &best {
            None => true,
            Some((_, v)) => value.total_cmp(v) == Ordering::Greater,
        };
        if better {
            best = Some((a, value));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssociatorKind {
    Proposed,
    Strongest,
    Bruteforce,
}

impl AssociatorKind {
    pub const fn name(self) -> &'static str {
        match self {
            AssociatorKind::Proposed => "proposed",
            AssociatorKind::Strongest => "strongest",
            AssociatorKind::Bruteforce => "bruteforce",
        }
    }
}

impl fmt::Display for AssociatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AssociatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Self::Proposed),
            "strongest" => Ok(Self::Strongest),
            "bruteforce" => Ok(Self::Bruteforce),
            other => Err(Error::UnknownName {
                kind: "associator",
                name: String::from(other),
            }),
        }
    }
}

impl From<AssociatorKind> for String {
    fn from(k: AssociatorKind) -> Self {
        k.name().to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input<'a>(beta: &'a [Vec<f64>], w: &'a [f64], b: &'a [f64], tau_p: usize) -> AssocInput<'a> {
        AssocInput {
            beta,
            weights: w,
            bandwidth: b,
            tau_p,
        }
    }

    #[test]
    fn lone_ue_takes_every_ap() {
        let beta = vec![vec![1e-9, 3e-9, 2e-9]];
        let a = associate_proposed(&input(&beta, &[1.0], &[1e6], 1), None);
        assert_eq!(a.serving(0), vec![0, 1, 2]);
        assert!(a.emergency_ues().is_empty());
    }

    #[test]
    fn single_ap_overflows_by_one() {
        let tau_p = 3;
        let k = tau_p + 1;
        let beta: Vec<Vec<f64>> = (0..k).map(|i| vec![1e-9 * (i + 1) as f64]).collect();
        let w = vec![1.0; k];
        let b: Vec<f64> = (0..k).map(|i| 1e6 * (k - i) as f64).collect();
        let a = associate_proposed(&input(&beta, &w, &b, tau_p), None);
        assert_eq!(a.load(), &[tau_p + 1]);
        // lowest priority = last index
        assert_eq!(a.emergency_ues(), &[k - 1]);
        assert!(a.covers_all());
        assert_eq!(a.overloaded_aps(tau_p), 1);
    }

    #[test]
    fn zero_bandwidth_ue_goes_last_and_ranks_by_gain() {
        // UE 0 has b = 0: priority 0, processed after UE 1, APs ordered by beta.
        let beta = vec![vec![1e-10, 5e-9, 2e-9], vec![4e-9, 1e-9, 3e-9]];
        let w = [3.0, 1.0];
        let b = [0.0, 1e6];
        let a = associate_proposed(&input(&beta, &w, &b, 1), Some(1));
        // UE 1 first: best AP 0. UE 0 next: AP 1 (beta 5e-9) is free.
        assert_eq!(a.serving(1), vec![0]);
        assert_eq!(a.serving(0), vec![1]);

        let a = associate_proposed(&input(&beta, &w, &b, 1), None);
        // uncapped: UE 1 takes all three APs, UE 0 is forced onto its best AP.
        assert_eq!(a.serving(1), vec![0, 1, 2]);
        assert_eq!(a.serving(0), vec![1]);
        assert_eq!(a.emergency_ues(), &[0]);
    }

    #[test]
    fn per_ue_cap_limits_serving_set() {
        let beta = vec![vec![1e-9, 3e-9, 2e-9, 4e-9]];
        let a = associate_proposed(&input(&beta, &[1.0], &[1.0], 4), Some(2));
        assert_eq!(a.serving(0), vec![1, 3]);
    }

    #[test]
    fn strongest_without_contention_picks_argmax() {
        let beta = vec![vec![1e-9, 3e-9, 2e-9], vec![5e-9, 1e-9, 2e-9]];
        let a = associate_strongest(&beta, 10, 1, 3);
        assert_eq!(a.serving(0), vec![1]);
        assert_eq!(a.serving(1), vec![0]);
    }

    #[test]
    fn strongest_spills_to_second_best() {
        let tau_p = 2;
        let beta: Vec<Vec<f64>> = (0..5).map(|_| vec![1e-8, 1e-9, 1e-10]).collect();
        let a = associate_strongest(&beta, tau_p, 1, 11);
        assert_eq!(a.load(), &[2, 2, 1]);
        assert!(a.emergency_ues().is_empty());
    }

    #[test]
    fn strongest_single_ap_forces_everyone() {
        let beta: Vec<Vec<f64>> = (0..5).map(|i| vec![1e-9 * (i + 1) as f64]).collect();
        let a = associate_strongest(&beta, 2, 1, 0);
        assert_eq!(a.load(), &[5]);
        assert_eq!(a.emergency_ues().len(), 3);
        assert!(a.covers_all());
    }

    #[test]
    fn strongest_is_deterministic() {
        let beta: Vec<Vec<f64>> = (0..8).map(|k| (0..4).map(|m| 1e-9 * ((k * 7 + m * 3) % 5 + 1) as f64).collect()).collect();
        assert_eq!(associate_strongest(&beta, 2, 2, 4), associate_strongest(&beta, 2, 2, 4));
    }

    #[test]
    fn bruteforce_enumerates_feasible_matrices() {
        let mut seen = Vec::new();
        let best = associate_bruteforce(1, 2, 1, |a| {
            seen.push(a.serving(0));
            a.serving(0).len() as f64
        })
        .unwrap()
        .unwrap();
        assert_eq!(seen, vec![vec![1], vec![0], vec![0, 1]]);
        assert_eq!(best.0.serving(0), vec![0, 1]);

        let mut count = 0;
        associate_bruteforce(2, 2, 1, |_| {
            count += 1;
            0.0
        })
        .unwrap();
        // two perfect matchings; both-APs rows would break capacity 1
        assert_eq!(count, 2);
    }

    #[test]
    fn bruteforce_tie_goes_to_lexicographically_smallest() {
        let (a, _) = associate_bruteforce(2, 2, 1, |_| 1.0).unwrap().unwrap();
        // 0110 < 1001
        assert_eq!(a.serving(0), vec![1]);
        assert_eq!(a.serving(1), vec![0]);
    }

    #[test]
    fn bruteforce_reports_infeasible_and_too_large() {
        assert!(associate_bruteforce(3, 1, 2, |_| 0.0).unwrap().is_none());
        assert!(matches!(
            associate_bruteforce(5, 4, 1, |_| 0.0),
            Err(Error::EnumerationTooLarge { size: 20, .. })
        ));
    }

    #[test]
    fn sparse_json_round_trip() {
        let mut a = Association::new(3, 2);
        a.set(0, 1);
        a.set(2, 0);
        a.set(2, 1);
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.contains("\"pairs\":[[0,1],[2,0],[2,1]]"));
        let back: Association = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.load(), &[1, 2]);
    }

    #[test]
    fn associator_names_parse() {
        for k in [AssociatorKind::Proposed, AssociatorKind::Strongest, AssociatorKind::Bruteforce] {
            assert_eq!(k.name().parse::<AssociatorKind>().unwrap(), k);
        }
        assert!("nearest".parse::<AssociatorKind>().is_err());
    }
}
