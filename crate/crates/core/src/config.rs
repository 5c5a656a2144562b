//! System constants and scenario-generation parameters.
//!
//! The JSON layout mirrors the field names used throughout the crate: lengths
//! in meters, bandwidths in Hz, powers in mW, delays in seconds.

use alloc::format;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

/// Boltzmann constant times the reference temperature 290 K, in mW/Hz.
const KT0_MW_PER_HZ: f64 = 1.380_649e-23 * 290.0 * 1e3;

/// Three-slope path-loss parameters (COST-231 Hata fixed term).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossModel {
    pub carrier_mhz: f64,
    pub h_ap_m: f64,
    pub h_ue_m: f64,
    pub d0_m: f64,
    pub d1_m: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self {
            carrier_mhz: 1900.0,
            h_ap_m: 15.0,
            h_ue_m: 1.65,
            d0_m: 10.0,
            d1_m: 50.0,
        }
    }
}

impl PathLossModel {
    /// Distance-independent loss term, about 140.7 dB for the defaults.
    pub fn fixed_loss_db(&self) -> f64 {
        let lf = math::log10(self.carrier_mhz);
        46.3 + 33.9 * lf - 13.82 * math::log10(self.h_ap_m) - (1.1 * lf - 0.7) * self.h_ue_m
            + (1.56 * lf - 0.8)
    }
}

/// When the alternating optimization counts as converged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AoStopRule {
    /// `|f_i - f_{i-1}| / max(f_{i-1}, 1) < epsilon`.
    #[default]
    Absolute,
    /// `(f_i - f_{i-1}) / max(f_{i-1}, 1) < epsilon`, so a drop also stops.
    Improvement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum PilotPowerPolicy {
    /// Every UE transmits its pilot at maximum power.
    #[default]
    Full,
    /// Every UE uses the same coefficient `eta` in (0, 1].
    Constant { eta: f64 },
}

/// Global constants for one drop. JSON keys follow the usual symbols
/// (`M`, `N`, `K`, `tau_p`, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub area_side_m: f64,
    #[serde(rename = "M")]
    pub num_aps: usize,
    #[serde(rename = "N")]
    pub antennas: usize,
    #[serde(rename = "K")]
    pub num_ues: usize,
    pub tau_p: usize,
    pub tau_c: usize,
    /// Normalized pilot SNR (linear).
    pub rho_p: f64,
    /// Normalized data SNR (linear).
    pub rho_d: f64,
    pub sigma_sh_db: f64,
    #[serde(rename = "B_total_hz")]
    pub total_bandwidth_hz: f64,
    /// Slice budgets, `[eMBB, URLLC]`.
    #[serde(rename = "B_slice_hz")]
    pub slice_bandwidth_hz: [f64; 2],
    /// Decoding error probability.
    pub theta: f64,
    pub epsilon_ao: f64,
    pub i_max: usize,
    pub seed: u64,
    #[serde(default)]
    pub path_loss: PathLossModel,
    #[serde(default = "default_min_distance")]
    pub min_distance_m: f64,
    #[serde(default)]
    pub pilot_power: PilotPowerPolicy,
    /// Fractional data power-control exponent; 0 means full power.
    #[serde(default)]
    pub data_power_kappa: f64,
    /// Optional cap on APs per UE in the proposed associator (none = as written).
    #[serde(default)]
    pub assoc_per_ue_cap: Option<usize>,
    /// APs per UE for the strongest-link associator.
    #[serde(default = "default_n_serving")]
    pub strongest_n_serving: usize,
    #[serde(default)]
    pub ao_stop_rule: AoStopRule,
}

fn default_min_distance() -> f64 {
    10.0
}

fn default_n_serving() -> usize {
    1
}

/// Normalized SNR of a transmitter of `power_mw` over thermal noise in
/// `noise_bandwidth_hz` with the given receiver noise figure.
pub fn normalized_snr(power_mw: f64, noise_bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    let noise_mw = KT0_MW_PER_HZ * noise_bandwidth_hz * math::db_to_linear(noise_figure_db);
    power_mw / noise_mw
}

impl SystemConfig {
    /// Evaluation setup: 1 km^2, M = 100, N = 4, tau_p = 10, tau_c = 200,
    /// 100 mW pilot and data power over a 20 MHz / 9 dB receiver,
    /// B = 80 MHz split evenly, theta = 1e-5, epsilon = 1e-3, I_max = 15.
    pub fn full_scale(num_ues: usize) -> Self {
        let rho = normalized_snr(100.0, 20e6, 9.0);
        Self {
            area_side_m: 1000.0,
            num_aps: 100,
            antennas: 4,
            num_ues,
            tau_p: 10,
            tau_c: 200,
            rho_p: rho,
            rho_d: rho,
            sigma_sh_db: 8.0,
            total_bandwidth_hz: 80e6,
            slice_bandwidth_hz: [40e6, 40e6],
            theta: 1e-5,
            epsilon_ao: 1e-3,
            i_max: 15,
            seed: 1,
            path_loss: PathLossModel::default(),
            min_distance_m: default_min_distance(),
            pilot_power: PilotPowerPolicy::Full,
            data_power_kappa: 0.0,
            assoc_per_ue_cap: None,
            strongest_n_serving: 1,
            ao_stop_rule: AoStopRule::Absolute,
        }
    }

    /// Smaller deployment (M = 50) used for quick sweeps.
    pub fn desk(num_ues: usize) -> Self {
        Self {
            num_aps: 50,
            ..Self::full_scale(num_ues)
        }
    }

    /// Pre-log factor `1 - tau_p / tau_c`.
    pub fn prelog(&self) -> f64 {
        1.0 - self.tau_p as f64 / self.tau_c as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if self.num_aps == 0 || self.antennas == 0 || self.num_ues == 0 || self.tau_p == 0 {
            return bad(format!(
                "counts must be >= 1 (M={}, N={}, K={}, tau_p={})",
                self.num_aps, self.antennas, self.num_ues, self.tau_p
            ));
        }
        if self.tau_p >= self.tau_c {
            return bad(format!("tau_p ({}) must be below tau_c ({})", self.tau_p, self.tau_c));
        }
        if !(self.area_side_m > 0.0) {
            return bad(format!("area_side_m must be positive (got {})", self.area_side_m));
        }
        if !(self.rho_p > 0.0 && self.rho_d > 0.0) {
            return bad("rho_p and rho_d must be positive".into());
        }
        if !(self.sigma_sh_db >= 0.0) {
            return bad("sigma_sh_db must be non-negative".into());
        }
        if self.slice_bandwidth_hz.iter().any(|b| !(*b >= 0.0)) {
            return bad("slice budgets must be non-negative".into());
        }
        let slice_sum: f64 = self.slice_bandwidth_hz.iter().sum();
        if !math::le_rel(slice_sum, self.total_bandwidth_hz, 1e-12) {
            return bad(format!(
                "slice budgets sum to {slice_sum} Hz, above B_total_hz = {}",
                self.total_bandwidth_hz
            ));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::ProbabilityOutOfRange(self.theta));
        }
        if !(self.epsilon_ao >= 0.0) || self.i_max == 0 {
            return bad("epsilon_ao must be >= 0 and i_max >= 1".into());
        }
        if !(self.min_distance_m > 0.0) {
            return bad("min_distance_m must be positive".into());
        }
        let pl = &self.path_loss;
        if !(pl.d0_m > 0.0 && pl.d1_m >= pl.d0_m) {
            return bad("path loss breakpoints need 0 < d0 <= d1".into());
        }
        if let PilotPowerPolicy::Constant { eta } = self.pilot_power {
            if !(eta > 0.0 && eta <= 1.0) {
                return bad(format!("pilot power coefficient {eta} outside (0, 1]"));
            }
        }
        if !(self.data_power_kappa >= 0.0) {
            return bad("data_power_kappa must be non-negative".into());
        }
        if self.assoc_per_ue_cap == Some(0) || self.strongest_n_serving == 0 {
            return bad("per-UE AP counts must be >= 1".into());
        }
        Ok(())
    }
}

/// Fractions of UEs per slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceMix {
    pub embb: f64,
    pub urllc: f64,
}

impl Default for SliceMix {
    fn default() -> Self {
        Self {
            embb: 0.4,
            urllc: 0.6,
        }
    }
}

impl SliceMix {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.embb)
            && (0.0..=1.0).contains(&self.urllc)
            && (self.embb + self.urllc - 1.0).abs() <= 1e-9;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSliceMix {
                embb: self.embb,
                urllc: self.urllc,
            })
        }
    }
}

/// Closed interval `[lo, hi]`; `lo == hi` is a point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval(pub f64, pub f64);

impl Interval {
    pub fn lo(&self) -> f64 {
        self.0
    }

    pub fn hi(&self) -> f64 {
        self.1
    }

    fn check(&self, field: &'static str) -> Result<()> {
        if self.0.is_finite() && self.1.is_finite() && self.0 <= self.1 {
            Ok(())
        } else {
            Err(Error::EmptyInterval {
                field,
                lo: self.0,
                hi: self.1,
            })
        }
    }
}

/// Per-UE traffic and QoS ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficRanges {
    pub urllc_packet_bytes: Interval,
    pub urllc_arrival_rate: Interval,
    pub urllc_max_delay_s: Interval,
    pub urllc_weight: Interval,
    pub embb_premium_fraction: f64,
    pub embb_premium_rate_bps: Interval,
    pub embb_premium_weight: f64,
    pub embb_standard_rate_bps: Interval,
    pub embb_standard_weight: f64,
}

impl Default for TrafficRanges {
    fn default() -> Self {
        Self {
            urllc_packet_bytes: Interval(20.0, 120.0),
            urllc_arrival_rate: Interval(5.0, 25.0),
            urllc_max_delay_s: Interval(0.5e-3, 2.5e-3),
            urllc_weight: Interval(2.0, 4.0),
            embb_premium_fraction: 0.3,
            embb_premium_rate_bps: Interval(5e6, 10e6),
            embb_premium_weight: 1.5,
            embb_standard_rate_bps: Interval(1e6, 3e6),
            embb_standard_weight: 1.0,
        }
    }
}

impl TrafficRanges {
    pub fn validate(&self) -> Result<()> {
        self.urllc_packet_bytes.check("urllc_packet_bytes")?;
        self.urllc_arrival_rate.check("urllc_arrival_rate")?;
        self.urllc_max_delay_s.check("urllc_max_delay_s")?;
        self.urllc_weight.check("urllc_weight")?;
        self.embb_premium_rate_bps.check("embb_premium_rate_bps")?;
        self.embb_standard_rate_bps.check("embb_standard_rate_bps")?;
        if self.urllc_packet_bytes.lo() < 1.0
            || self.urllc_max_delay_s.lo() <= 0.0
            || self.urllc_arrival_rate.lo() < 0.0
            || self.embb_premium_rate_bps.lo() <= 0.0
            || self.embb_standard_rate_bps.lo() <= 0.0
        {
            return Err(Error::InvalidConfig(
                "packet sizes >= 1 byte, delays > 0, arrival rates >= 0, minimum rates > 0 required".into(),
            ));
        }
        if self.urllc_weight.lo() <= 0.0
            || self.embb_premium_weight <= 0.0
            || self.embb_standard_weight <= 0.0
        {
            return Err(Error::InvalidConfig("priority weights must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.embb_premium_fraction) {
            return Err(Error::InvalidConfig("embb_premium_fraction outside [0, 1]".into()));
        }
        Ok(())
    }
}

/// Everything needed to draw one scenario. This is the root of the JSON
/// config document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Setup {
    pub config: SystemConfig,
    #[serde(default)]
    pub slice_mix: SliceMix,
    #[serde(default)]
    pub traffic: TrafficRanges,
}

impl Setup {
    pub fn new(config: SystemConfig) -> Self {
        Self {
            config,
            slice_mix: SliceMix::default(),
            traffic: TrafficRanges::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        self.slice_mix.validate()?;
        self.traffic.validate()
    }
}
