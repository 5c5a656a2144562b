//! Link performance: closed-form uplink SINR, finite-blocklength spectral
//! efficiency, minimum bandwidth demand, M/M/1 delay, QoS checks and slice
//! feasibility.
//!
//! The SINR comes in two algebraically identical forms. [`sinr_subset`]
//! works on an explicit serving set and carries the array gain `N` in every
//! term; [`sinr_matrix`] works on an association row with one factor of `N`
//! divided out. [`sinr_all`] is the batched path used by the optimizer and
//! must agree with both.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::association::Association;
use crate::channel::ChannelState;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::math;
use crate::scenario::{Scenario, Slice, Traffic, UeProfile};

/// Relative tolerance for QoS boundary equality.
pub const QOS_REL_TOL: f64 = 1e-9;

/// Relative slack on slice budgets when summing demands.
pub const BUDGET_REL_TOL: f64 = 1e-12;

/// Value pair for `[eMBB, URLLC]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerSlice<T> {
    #[serde(rename = "eMBB")]
    pub embb: T,
    #[serde(rename = "URLLC")]
    pub urllc: T,
}

impl<T: Copy> PerSlice<T> {
    pub fn get(&self, s: Slice) -> T {
        match s {
            Slice::Embb => self.embb,
            Slice::Urllc => self.urllc,
        }
    }

    pub fn from_array(a: [T; 2]) -> Self {
        Self {
            embb: a[0],
            urllc: a[1],
        }
    }
}

/// SINR numerator and denominator, kept apart so callers can inspect them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrTerms {
    pub numerator: f64,
    pub denominator: f64,
}

impl SinrTerms {
    pub fn value(&self) -> f64 {
        self.numerator / self.denominator
    }
}

fn check_ue(channel: &ChannelState, k: usize) -> Result<()> {
    if k >= channel.num_ues() {
        return Err(Error::Dimension(alloc::format!("UE {k} out of range")));
    }
    Ok(())
}

/// SINR of UE `k` served by the AP set `serving`, array gain written out.
pub fn sinr_subset(
    k: usize,
    serving: &[usize],
    channel: &ChannelState,
    rho_d: f64,
    antennas: usize,
) -> Result<f64> {
    check_ue(channel, k)?;
    if serving.is_empty() {
        return Err(Error::EmptyServingSet(k));
    }
    if serving.iter().any(|&m| m >= channel.num_aps()) {
        return Err(Error::Dimension(alloc::format!("serving set of UE {k} out of range")));
    }
    let n = antennas as f64;
    let beta = channel.beta();
    let gamma = &channel.gamma[k];
    let eta_p = &channel.pilots.eta_p;
    let eta_d = &channel.eta_d;

    let gain: f64 = serving.iter().map(|&m| gamma[m]).sum();
    let numerator = n * n * rho_d * eta_d[k] * gain * gain;

    let mut non_coherent = 0.0;
    let mut coherent = 0.0;
    for j in 0..channel.num_ues() {
        non_coherent += eta_d[j] * serving.iter().map(|&m| gamma[m] * beta[j][m]).sum::<f64>();
        if j != k {
            let cross = channel.pilots.cross(k, j);
            if cross != 0.0 {
                let ratio = math::sqrt(eta_p[j] / eta_p[k]);
                let s: f64 = serving
                    .iter()
                    .map(|&m| gamma[m] * ratio * beta[j][m] / beta[k][m])
                    .sum();
                coherent += eta_d[j] * cross * s * s;
            }
        }
    }
    let denominator = n * rho_d * non_coherent + n * n * rho_d * coherent + n * gain;
    Ok(numerator / denominator)
}

/// SINR terms of UE `k` under association `a`, with the common factor `N`
/// divided out of numerator and denominator.
pub fn sinr_matrix_terms(
    k: usize,
    a: &Association,
    channel: &ChannelState,
    rho_d: f64,
    antennas: usize,
) -> Result<SinrTerms> {
    check_ue(channel, k)?;
    if a.num_ues() != channel.num_ues() || a.num_aps() != channel.num_aps() {
        return Err(Error::Dimension("association shape differs from channel".into()));
    }
    let row = a.row(k);
    if !row.iter().any(|&on| on) {
        return Err(Error::EmptyServingSet(k));
    }
    let n = antennas as f64;
    let beta = channel.beta();
    let gamma = &channel.gamma[k];
    let eta_p = &channel.pilots.eta_p;
    let eta_d = &channel.eta_d;
    let a_k = |m: usize| if row[m] { 1.0 } else { 0.0 };
    let m_n = channel.num_aps();

    let gain: f64 = (0..m_n).map(|m| a_k(m) * gamma[m]).sum();
    let numerator = n * rho_d * eta_d[k] * gain * gain;

    let mut non_coherent = 0.0;
    let mut coherent = 0.0;
    for j in 0..channel.num_ues() {
        let mut s = 0.0;
        for m in 0..m_n {
            s += a_k(m) * gamma[m] * beta[j][m];
        }
        non_coherent += eta_d[j] * s;
        if j != k {
            let cross = channel.pilots.cross(k, j);
            let ratio = math::sqrt(eta_p[j] / eta_p[k]);
            let mut t = 0.0;
            for m in 0..m_n {
                t += a_k(m) * gamma[m] * ratio * beta[j][m] / beta[k][m];
            }
            coherent += eta_d[j] * cross * t * t;
        }
    }
    let denominator = rho_d * non_coherent + n * rho_d * coherent + gain;
    Ok(SinrTerms {
        numerator,
        denominator,
    })
}

pub fn sinr_matrix(
    k: usize,
    a: &Association,
    channel: &ChannelState,
    rho_d: f64,
    antennas: usize,
) -> Result<f64> {
    sinr_matrix_terms(k, a, channel, rho_d, antennas).map(|t| t.value())
}

/// SINR of every UE. Interference sums are shared across UEs and pilot
/// contamination only visits co-pilot UEs, so the cost is
/// `O(K M + sum_k |V_k| * |co-pilot(k)|)`.
pub fn sinr_all(
    a: &Association,
    channel: &ChannelState,
    rho_d: f64,
    antennas: usize,
) -> Result<Vec<f64>> {
    let (k_n, m_n) = (channel.num_ues(), channel.num_aps());
    if a.num_ues() != k_n || a.num_aps() != m_n {
        return Err(Error::Dimension("association shape differs from channel".into()));
    }
    let n = antennas as f64;
    let beta = channel.beta();
    let eta_p = &channel.pilots.eta_p;
    let eta_d = &channel.eta_d;

    // Total received data power at each AP.
    let mut rx = vec![0.0; m_n];
    for j in 0..k_n {
        for m in 0..m_n {
            rx[m] += eta_d[j] * beta[j][m];
        }
    }
    let groups = channel.pilots.groups();

    let mut out = Vec::with_capacity(k_n);
    for k in 0..k_n {
        let serving = a.serving(k);
        if serving.is_empty() {
            return Err(Error::EmptyServingSet(k));
        }
        let gamma = &channel.gamma[k];
        let gain: f64 = serving.iter().map(|&m| gamma[m]).sum();
        let non_coherent: f64 = serving.iter().map(|&m| gamma[m] * rx[m]).sum();
        let mut coherent = 0.0;
        for &j in &groups[channel.pilots.pilot_id[k]] {
            if j == k {
                continue;
            }
            let ratio = math::sqrt(eta_p[j] / eta_p[k]);
            let t: f64 = serving
                .iter()
                .map(|&m| gamma[m] * beta[j][m] / beta[k][m])
                .sum();
            coherent += eta_d[j] * ratio * ratio * t * t;
        }
        let numerator = n * rho_d * eta_d[k] * gain * gain;
        let denominator = rho_d * non_coherent + n * rho_d * coherent + gain;
        out.push(numerator / denominator);
    }
    Ok(out)
}

/// Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * math::erfc(x / core::f64::consts::SQRT_2)
}

/// Inverse of [`q_function`] on `(0, 1)`.
pub fn inverse_q(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::ProbabilityOutOfRange(theta));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    // Q is decreasing: Q(lo) > theta > Q(hi).
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if q_function(mid) > theta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (ql, qh) = (q_function(lo), q_function(hi));
    Ok(if (ql - theta).abs() <= (qh - theta).abs() { lo } else { hi })
}

/// Spectral-efficiency model with `Q^{-1}(theta)` evaluated once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeModel {
    pub prelog: f64,
    pub q_inv: f64,
}

impl SeModel {
    pub fn new(config: &SystemConfig) -> Result<Self> {
        Ok(Self {
            prelog: config.prelog(),
            q_inv: inverse_q(config.theta)?,
        })
    }

    /// Bits/s/Hz. URLLC pays the finite-blocklength dispersion penalty with
    /// `L` in bits; the result is clamped at zero.
    pub fn se(&self, sinr: f64, profile: &UeProfile) -> f64 {
        let capacity = math::log2(1.0 + sinr);
        let raw = match profile.traffic {
            Traffic::Embb { .. } => capacity,
            Traffic::Urllc { packet_bytes, .. } => {
                let bits = 8.0 * packet_bytes;
                let inv = 1.0 / (1.0 + sinr);
                let dispersion = 1.0 - inv * inv;
                capacity - math::sqrt(dispersion / bits) * self.q_inv / math::LN_2
            }
        };
        (self.prelog * raw).max(0.0)
    }
}

pub fn spectral_efficiency(sinr: f64, profile: &UeProfile, config: &SystemConfig) -> Result<f64> {
    Ok(SeModel::new(config)?.se(sinr, profile))
}

/// Bandwidth that makes the QoS constraint tight; `+inf` when `se == 0`.
pub fn min_bandwidth(se: f64, profile: &UeProfile) -> f64 {
    if !(se > 0.0) {
        return f64::INFINITY;
    }
    match profile.traffic {
        Traffic::Urllc {
            packet_bytes,
            arrival_rate,
            max_delay_s,
        } => 8.0 * packet_bytes * (arrival_rate + 1.0 / max_delay_s) / se,
        Traffic::Embb { min_rate_bps, .. } => min_rate_bps / se,
    }
}

/// M/M/1 sojourn time of URLLC UE `k`; `+inf` when the queue is unstable.
pub fn delay(k: usize, rate_bps: f64, profile: &UeProfile) -> Result<f64> {
    match profile.traffic {
        Traffic::Urllc {
            packet_bytes,
            arrival_rate,
            ..
        } => {
            let service = rate_bps / (8.0 * packet_bytes);
            Ok(if service > arrival_rate {
                1.0 / (service - arrival_rate)
            } else {
                f64::INFINITY
            })
        }
        Traffic::Embb { .. } => Err(Error::NotUrllc(k)),
    }
}

/// Delay bound for URLLC, minimum rate for eMBB, both at [`QOS_REL_TOL`].
pub fn qos_satisfied(rate_bps: f64, profile: &UeProfile) -> bool {
    match profile.traffic {
        Traffic::Urllc {
            packet_bytes,
            arrival_rate,
            max_delay_s,
        } => {
            let need = arrival_rate + 1.0 / max_delay_s;
            rate_bps / (8.0 * packet_bytes) >= need * (1.0 - QOS_REL_TOL)
        }
        Traffic::Embb { min_rate_bps, .. } => rate_bps >= min_rate_bps * (1.0 - QOS_REL_TOL),
    }
}

/// Per-slice verdict of the minimum-demand test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: PerSlice<bool>,
    /// Summed minimum demand per slice (Hz, `null` when unbounded).
    #[serde(with = "inf_as_null::per_slice")]
    pub demand_hz: PerSlice<f64>,
    #[serde(with = "inf_as_null::vec")]
    pub b_min_hz: Vec<f64>,
}

impl Feasibility {
    pub fn all(&self) -> bool {
        self.feasible.embb && self.feasible.urllc
    }
}

/// A slice is feasible iff every member has a finite demand and the demands
/// fit in its budget.
pub fn slice_feasibility(b_min: &[f64], profiles: &[UeProfile], budgets: [f64; 2]) -> Feasibility {
    let mut demand = [0.0f64; 2];
    for (b, p) in b_min.iter().zip(profiles) {
        demand[p.slice().index()] += *b;
    }
    let verdict =
        |s: usize| demand[s].is_finite() && demand[s] <= budgets[s] * (1.0 + BUDGET_REL_TOL);
    Feasibility {
        feasible: PerSlice::from_array([verdict(0), verdict(1)]),
        demand_hz: PerSlice::from_array(demand),
        b_min_hz: b_min.to_vec(),
    }
}

/// SINR, SE and minimum bandwidth of every UE under one association.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkQuality {
    pub sinr: Vec<f64>,
    pub se: Vec<f64>,
    pub b_min: Vec<f64>,
}

pub fn link_quality(
    scenario: &Scenario,
    channel: &ChannelState,
    a: &Association,
    model: &SeModel,
) -> Result<LinkQuality> {
    let cfg = &scenario.config;
    let sinr = sinr_all(a, channel, cfg.rho_d, cfg.antennas)?;
    let se: Vec<f64> = sinr
        .iter()
        .zip(&scenario.profiles)
        .map(|(s, p)| model.se(*s, p))
        .collect();
    let b_min = se
        .iter()
        .zip(&scenario.profiles)
        .map(|(s, p)| min_bandwidth(*s, p))
        .collect();
    Ok(LinkQuality { sinr, se, b_min })
}

pub fn feasibility(scenario: &Scenario, channel: &ChannelState, a: &Association) -> Result<Feasibility> {
    let lq = link_quality(scenario, channel, a, &SeModel::new(&scenario.config)?)?;
    Ok(slice_feasibility(
        &lq.b_min,
        &scenario.profiles,
        scenario.config.slice_bandwidth_hz,
    ))
}

/// `sum_k w_k * b_k * se_k`.
pub fn weighted_sum_rate(weights: &[f64], b: &[f64], se: &[f64]) -> f64 {
    weights
        .iter()
        .zip(b)
        .zip(se)
        .map(|((w, b), s)| w * b * s)
        .sum()
}

/// Queueing delay in a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Delay {
    /// eMBB UE, no delay contract.
    NotApplicable,
    Finite(f64),
    /// Unstable queue.
    Unbounded,
}

impl Delay {
    pub fn seconds(&self) -> Option<f64> {
        match *self {
            Delay::Finite(s) => Some(s),
            Delay::Unbounded => Some(f64::INFINITY),
            Delay::NotApplicable => None,
        }
    }
}

/// JSON: a number, `null` for an unstable queue, `"n/a"` for eMBB.
impl Serialize for Delay {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match *self {
            Delay::NotApplicable => s.serialize_str("n/a"),
            Delay::Finite(v) => s.serialize_f64(v),
            Delay::Unbounded => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Delay {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(alloc::string::String),
            Null(()),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Delay::Finite(v)),
            Raw::Null(()) => Ok(Delay::Unbounded),
            Raw::Str(s) if s == "n/a" => Ok(Delay::NotApplicable),
            Raw::Str(other) => Err(serde::de::Error::custom(alloc::format!(
                "unexpected delay `{other}`"
            ))),
        }
    }
}

/// Per-UE evaluation of one `(A, b)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub slice: Vec<Slice>,
    pub sinr: Vec<f64>,
    /// bits/s/Hz
    pub se: Vec<f64>,
    pub rate_bps: Vec<f64>,
    pub b_hz: Vec<f64>,
    #[serde(with = "inf_as_null::vec")]
    pub b_min_hz: Vec<f64>,
    pub delay_s: Vec<Delay>,
    pub qos_ok: Vec<bool>,
    pub weighted_sum_rate: f64,
    /// Fraction of each slice meeting its QoS; `null` for an empty slice.
    pub success_rate: PerSlice<Option<f64>>,
    pub feasibility: Feasibility,
    pub serving_aps: Vec<usize>,
    pub emergency_assignments: usize,
    pub fallback_used: bool,
}

pub fn evaluate(
    scenario: &Scenario,
    channel: &ChannelState,
    a: &Association,
    b: &[f64],
) -> Result<EvalReport> {
    let k_n = scenario.num_ues();
    if b.len() != k_n {
        return Err(Error::Dimension(alloc::format!("expected {k_n} bandwidths")));
    }
    let lq = link_quality(scenario, channel, a, &SeModel::new(&scenario.config)?)?;
    let profiles = &scenario.profiles;
    let rate: Vec<f64> = b.iter().zip(&lq.se).map(|(b, s)| b * s).collect();
    let delay_s = (0..k_n)
        .map(|k| match profiles[k].slice() {
            Slice::Embb => Ok(Delay::NotApplicable),
            Slice::Urllc => delay(k, rate[k], &profiles[k]).map(|d| {
                if d.is_finite() {
                    Delay::Finite(d)
                } else {
                    Delay::Unbounded
                }
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    let qos_ok: Vec<bool> = (0..k_n).map(|k| qos_satisfied(rate[k], &profiles[k])).collect();

    let mut hits = [0usize; 2];
    let mut sizes = [0usize; 2];
    for k in 0..k_n {
        let s = profiles[k].slice().index();
        sizes[s] += 1;
        hits[s] += qos_ok[k] as usize;
    }
    let frac = |s: usize| (sizes[s] > 0).then(|| hits[s] as f64 / sizes[s] as f64);

    Ok(EvalReport {
        slice: profiles.iter().map(UeProfile::slice).collect(),
        weighted_sum_rate: weighted_sum_rate(&scenario.weights(), b, &lq.se),
        feasibility: slice_feasibility(&lq.b_min, profiles, scenario.config.slice_bandwidth_hz),
        sinr: lq.sinr,
        se: lq.se,
        rate_bps: rate,
        b_hz: b.to_vec(),
        b_min_hz: lq.b_min,
        delay_s,
        qos_ok,
        success_rate: PerSlice::from_array([frac(0), frac(1)]),
        serving_aps: (0..k_n).map(|k| a.row(k).iter().filter(|&&x| x).count()).collect(),
        emergency_assignments: a.emergency_ues().len(),
        fallback_used: false,
    })
}

/// Serializes non-finite floats as `null` and reads `null` back as `+inf`.
pub mod inf_as_null {
    use alloc::vec::Vec;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    fn wrap(v: f64) -> Option<f64> {
        v.is_finite().then_some(v)
    }

    fn unwrap(v: Option<f64>) -> f64 {
        v.unwrap_or(f64::INFINITY)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(|x| wrap(*x)).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Ok(Vec::<Option<f64>>::deserialize(d)?.into_iter().map(unwrap).collect())
        }
    }

    pub mod per_slice {
        use super::*;
        use crate::perf::PerSlice;

        pub fn serialize<S: Serializer>(v: &PerSlice<f64>, s: S) -> Result<S::Ok, S::Error> {
            PerSlice {
                embb: wrap(v.embb),
                urllc: wrap(v.urllc),
            }
            .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<PerSlice<f64>, D::Error> {
            let raw = PerSlice::<Option<f64>>::deserialize(d)?;
            Ok(PerSlice {
                embb: unwrap(raw.embb),
                urllc: unwrap(raw.urllc),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{LargeScale, PilotPlan};
    use crate::scenario::Tier;

    fn urllc(bytes: f64, lambda: f64, dmax: f64) -> UeProfile {
        UeProfile {
            weight: 3.0,
            traffic: Traffic::Urllc {
                packet_bytes: bytes,
                arrival_rate: lambda,
                max_delay_s: dmax,
            },
        }
    }

    fn embb(rmin: f64) -> UeProfile {
        UeProfile {
            weight: 1.0,
            traffic: Traffic::Embb {
                min_rate_bps: rmin,
                tier: Tier::Standard,
            },
        }
    }

    fn single_link(beta: f64) -> ChannelState {
        ChannelState::from_parts(
            LargeScale::from_beta(vec![vec![beta]]),
            PilotPlan {
                tau_p: 1,
                pilot_id: vec![0],
                eta_p: vec![1.0],
            },
            vec![1.0],
            1e3,
        )
        .unwrap()
    }

    #[test]
    fn single_ue_sinr_collapses() {
        let ch = single_link(2e-9);
        let (g, b) = (ch.gamma[0][0], 2e-9);
        let (rho, n) = (1e9, 4.0);
        let expected = n * rho * g * g / (rho * g * b + g);
        let s = sinr_subset(0, &[0], &ch, rho, 4).unwrap();
        assert!((s - expected).abs() / expected < 1e-13);
        let mut a = Association::new(1, 1);
        a.set(0, 0);
        let t = sinr_matrix(0, &a, &ch, rho, 4).unwrap();
        assert!((t - expected).abs() / expected < 1e-13);
    }

    #[test]
    fn more_antennas_more_sinr() {
        let ch = single_link(2e-9);
        let s4 = sinr_subset(0, &[0], &ch, 1e9, 4).unwrap();
        let s8 = sinr_subset(0, &[0], &ch, 1e9, 8).unwrap();
        assert!(s8 > s4);
    }

    #[test]
    fn empty_serving_set_is_an_error() {
        let ch = single_link(1e-9);
        assert_eq!(sinr_subset(0, &[], &ch, 1.0, 1), Err(Error::EmptyServingSet(0)));
        let a = Association::new(1, 1);
        assert_eq!(sinr_matrix(0, &a, &ch, 1.0, 1), Err(Error::EmptyServingSet(0)));
        assert_eq!(sinr_all(&a, &ch, 1.0, 1), Err(Error::EmptyServingSet(0)));
    }

    #[test]
    fn inverse_q_values() {
        assert!(inverse_q(0.5).unwrap().abs() < 1e-15);
        for e in 1..=9 {
            let theta = 10f64.powi(-e);
            let x = inverse_q(theta).unwrap();
            assert!((q_function(x) - theta).abs() <= 1e-12 * theta, "theta={theta}");
        }
        for bad in [0.0, 1.0, -0.1, 2.0, f64::NAN] {
            assert!(inverse_q(bad).is_err());
        }
        assert!(inverse_q(0.9).unwrap() < 0.0);
    }

    #[test]
    fn se_examples() {
        let cfg = SystemConfig::full_scale(1);
        let se = spectral_efficiency(1.0, &embb(1e6), &cfg).unwrap();
        assert!((se - 0.95).abs() < 1e-15);

        let mut full = cfg.clone();
        full.tau_p = full.tau_c;
        assert_eq!(spectral_efficiency(30.0, &embb(1e6), &full).unwrap(), 0.0);
        assert_eq!(spectral_efficiency(30.0, &urllc(50.0, 10.0, 1e-3), &full).unwrap(), 0.0);
    }

    #[test]
    fn urllc_penalty_saturates() {
        let cfg = SystemConfig::full_scale(1);
        let model = SeModel::new(&cfg).unwrap();
        let p = urllc(100.0, 10.0, 1e-3);
        let sinr = 1e12f64;
        let penalty = (1.0f64 / 800.0).sqrt() * model.q_inv / core::f64::consts::LN_2;
        let expected = 0.95 * ((1.0 + sinr).log2() - penalty);
        assert!((model.se(sinr, &p) - expected).abs() < 1e-9);
        // low SINR: penalty exceeds capacity, clamped to zero
        assert_eq!(model.se(0.01, &p), 0.0);
    }

    #[test]
    fn min_bandwidth_examples() {
        assert!((min_bandwidth(2.0, &embb(1e6)) - 0.5e6).abs() < 1e-9);
        let b = min_bandwidth(4.0, &urllc(100.0, 10.0, 1e-3));
        assert!((b - 202_000.0).abs() < 1e-6, "{b}");
        assert_eq!(min_bandwidth(0.0, &embb(1e6)), f64::INFINITY);
    }

    #[test]
    fn delay_examples() {
        let p = urllc(100.0, 10.0, 1e-3);
        let d = delay(0, 800.0 * 1010.0, &p).unwrap();
        assert!((d - 1e-3).abs() < 1e-15);
        assert_eq!(delay(0, 800.0 * 10.0, &p).unwrap(), f64::INFINITY);
        assert_eq!(delay(0, 100.0, &p).unwrap(), f64::INFINITY);
        assert_eq!(delay(3, 1e6, &embb(1e6)), Err(Error::NotUrllc(3)));
    }

    #[test]
    fn minimum_bandwidth_meets_qos_with_equality() {
        let p = urllc(77.0, 13.3, 1.7e-3);
        let se = 2.345;
        let b = min_bandwidth(se, &p);
        let d = delay(0, b * se, &p).unwrap();
        assert!((d - 1.7e-3).abs() / 1.7e-3 < 1e-9);
        assert!(qos_satisfied(b * se, &p));
        assert!(!qos_satisfied(b * se * (1.0 - 1e-6), &p));

        let e = embb(2.5e6);
        let b = min_bandwidth(se, &e);
        assert!(qos_satisfied(b * se, &e));
        assert!(!qos_satisfied(b * se * (1.0 - 1e-6), &e));
    }

    #[test]
    fn feasibility_boundary_and_sentinel() {
        let profiles = [embb(1e6), embb(1e6), urllc(50.0, 10.0, 1e-3)];
        let f = slice_feasibility(&[10e6, 30e6, 1e6], &profiles, [40e6, 1e6]);
        assert!(f.all());
        let f = slice_feasibility(&[10e6, 30e6, f64::INFINITY], &profiles, [40e6, 1e12]);
        assert!(f.feasible.embb && !f.feasible.urllc);
        assert_eq!(f.demand_hz.urllc, f64::INFINITY);
        let json = serde_json::to_value(&f).unwrap();
        assert!(json["demand_hz"]["URLLC"].is_null());
        let back: Feasibility = serde_json::from_value(json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn delay_json_forms() {
        let v = serde_json::to_string(&[Delay::Finite(0.5), Delay::Unbounded, Delay::NotApplicable])
            .unwrap();
        assert_eq!(v, "[0.5,null,\"n/a\"]");
        let back: Vec<Delay> = serde_json::from_str(&v).unwrap();
        assert_eq!(back, vec![Delay::Finite(0.5), Delay::Unbounded, Delay::NotApplicable]);
    }
}
