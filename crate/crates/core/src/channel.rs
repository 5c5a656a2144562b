//! Large-scale fading, pilot assignment and MMSE estimation quality.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::{PathLossModel, PilotPowerPolicy, SystemConfig};
use crate::error::{Error, Result};
use crate::math;
use crate::rng::{stream_rng, Stream};
use crate::scenario::Scenario;

/// Three-slope path gain in dB (negative): flat below `d0`, 20 dB/decade up
/// to `d1`, 35 dB/decade beyond. Continuous at both breakpoints.
pub fn path_loss_three_slope(d_m: f64, model: &PathLossModel) -> Result<f64> {
    if !(d_m > 0.0) {
        return Err(Error::NonPositiveDistance(d_m));
    }
    let km = |d: f64| math::log10(d / 1000.0);
    let l = model.fixed_loss_db();
    let pl = if d_m > model.d1_m {
        -l - 35.0 * km(d_m)
    } else if d_m > model.d0_m {
        -l - 15.0 * km(model.d1_m) - 20.0 * km(d_m)
    } else {
        -l - 15.0 * km(model.d1_m) - 20.0 * km(model.d0_m)
    };
    Ok(pl)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeScale {
    /// Linear large-scale fading coefficients, `[k][m]`.
    pub beta: Vec<Vec<f64>>,
    pub pl_db: Vec<Vec<f64>>,
    pub shadow_db: Vec<Vec<f64>>,
}

impl LargeScale {
    /// Builds a fixture directly from linear gains.
    pub fn from_beta(beta: Vec<Vec<f64>>) -> Self {
        let pl_db = beta
            .iter()
            .map(|row| row.iter().map(|b| 10.0 * math::log10(*b)).collect())
            .collect();
        let shadow_db = beta.iter().map(|row| vec![0.0; row.len()]).collect();
        Self {
            beta,
            pl_db,
            shadow_db,
        }
    }

    pub fn num_ues(&self) -> usize {
        self.beta.len()
    }

    pub fn num_aps(&self) -> usize {
        self.beta.first().map_or(0, Vec::len)
    }
}

/// Draws path loss and log-normal shadowing for every UE-AP pair.
///
/// A normal deviate is consumed for every pair, in `(k, m)` order, even when
/// the link sits inside `d1` and shadowing is not applied.
pub fn draw_large_scale(scenario: &Scenario) -> Result<LargeScale> {
    let cfg = &scenario.config;
    let (k_n, m_n) = (scenario.num_ues(), scenario.num_aps());
    let mut rng = stream_rng(cfg.seed, Stream::Shadowing);
    let mut beta = vec![vec![0.0; m_n]; k_n];
    let mut pl_db = vec![vec![0.0; m_n]; k_n];
    let mut shadow_db = vec![vec![0.0; m_n]; k_n];
    for k in 0..k_n {
        for m in 0..m_n {
            let d = scenario.distance(k, m);
            let z: f64 = rng.sample(StandardNormal);
            let pl = path_loss_three_slope(d, &cfg.path_loss)?;
            let sh = if d > cfg.path_loss.d1_m { cfg.sigma_sh_db * z } else { 0.0 };
            pl_db[k][m] = pl;
            shadow_db[k][m] = sh;
            beta[k][m] = math::db_to_linear(pl + sh);
        }
    }
    Ok(LargeScale {
        beta,
        pl_db,
        shadow_db,
    })
}

/// Pilot indices are 0-based (`0..tau_p`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotPlan {
    pub tau_p: usize,
    pub pilot_id: Vec<usize>,
    pub eta_p: Vec<f64>,
}

impl PilotPlan {
    /// `|psi_k^H psi_j|^2` for orthonormal pilots.
    #[inline]
    pub fn cross(&self, k: usize, j: usize) -> f64 {
        if self.pilot_id[k] == self.pilot_id[j] {
            1.0
        } else {
            0.0
        }
    }

    /// UEs sharing a pilot, grouped by pilot index.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut g = vec![Vec::new(); self.tau_p];
        for (k, &p) in self.pilot_id.iter().enumerate() {
            g[p].push(k);
        }
        g
    }
}

impl PilotPowerPolicy {
    pub fn coefficients(&self, num_ues: usize) -> Vec<f64> {
        match *self {
            PilotPowerPolicy::Full => vec![1.0; num_ues],
            PilotPowerPolicy::Constant { eta } => vec![eta; num_ues],
        }
    }
}

/// Uniform i.i.d. pilot indices.
pub fn assign_pilots<R: Rng>(
    num_ues: usize,
    tau_p: usize,
    policy: PilotPowerPolicy,
    rng: &mut R,
) -> PilotPlan {
    let tau_p = tau_p.max(1);
    PilotPlan {
        tau_p,
        pilot_id: (0..num_ues).map(|_| rng.random_range(0..tau_p)).collect(),
        eta_p: policy.coefficients(num_ues),
    }
}

/// MMSE scaling coefficients `c[k][m]` and estimate mean-squares `gamma[k][m]`.
pub fn estimation_quality(
    large_scale: &LargeScale,
    pilots: &PilotPlan,
    rho_p: f64,
    tau_p: usize,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let beta = &large_scale.beta;
    let (k_n, m_n) = (large_scale.num_ues(), large_scale.num_aps());
    let tr = tau_p as f64 * rho_p;

    // Received pilot power per (pilot, AP): sum of beta * eta_p over co-pilot UEs.
    let mut received = vec![vec![0.0; m_n]; pilots.tau_p];
    for k in 0..k_n {
        let row = &mut received[pilots.pilot_id[k]];
        for m in 0..m_n {
            row[m] += beta[k][m] * pilots.eta_p[k];
        }
    }

    let mut c = vec![vec![0.0; m_n]; k_n];
    let mut gamma = vec![vec![0.0; m_n]; k_n];
    for k in 0..k_n {
        let eta = pilots.eta_p[k];
        let pilot_rx = &received[pilots.pilot_id[k]];
        for m in 0..m_n {
            let ckm = math::sqrt(tr * eta) * beta[k][m] / (tr * pilot_rx[m] + 1.0);
            c[k][m] = ckm;
            gamma[k][m] = math::sqrt(tr * eta) * beta[k][m] * ckm;
        }
    }
    (c, gamma)
}

/// Fractional data power control normalized to the weakest UE:
/// `eta_k = min(1, (beta_k^max / beta_ref)^(-kappa))`, `beta_ref = min_k beta_k^max`.
pub fn data_power(large_scale: &LargeScale, kappa: f64) -> Vec<f64> {
    let best: Vec<f64> = large_scale
        .beta
        .iter()
        .map(|row| row.iter().copied().fold(0.0, f64::max))
        .collect();
    if kappa == 0.0 {
        return vec![1.0; best.len()];
    }
    let reference = best.iter().copied().fold(f64::INFINITY, f64::min);
    best.iter()
        .map(|b| math::powf(b / reference, -kappa).min(1.0))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelState {
    pub large_scale: LargeScale,
    pub pilots: PilotPlan,
    pub c: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
    pub eta_d: Vec<f64>,
}

impl ChannelState {
    /// Assembles a channel from fixed large-scale gains and pilots.
    pub fn from_parts(
        large_scale: LargeScale,
        pilots: PilotPlan,
        eta_d: Vec<f64>,
        rho_p: f64,
    ) -> Result<Self> {
        let (k_n, m_n) = (large_scale.num_ues(), large_scale.num_aps());
        if pilots.pilot_id.len() != k_n || pilots.eta_p.len() != k_n || eta_d.len() != k_n {
            return Err(Error::Dimension(alloc::format!(
                "pilot/power vectors must have {k_n} entries"
            )));
        }
        if large_scale.beta.iter().any(|r| r.len() != m_n) {
            return Err(Error::Dimension("ragged beta matrix".into()));
        }
        if pilots.pilot_id.iter().any(|&p| p >= pilots.tau_p) {
            return Err(Error::Dimension("pilot index out of range".into()));
        }
        let (c, gamma) = estimation_quality(&large_scale, &pilots, rho_p, pilots.tau_p);
        Ok(Self {
            large_scale,
            pilots,
            c,
            gamma,
            eta_d,
        })
    }

    pub fn beta(&self) -> &[Vec<f64>] {
        &self.large_scale.beta
    }

    pub fn num_ues(&self) -> usize {
        self.large_scale.num_ues()
    }

    pub fn num_aps(&self) -> usize {
        self.large_scale.num_aps()
    }
}

/// Full channel pipeline for a scenario.
pub fn build_channel(scenario: &Scenario) -> Result<ChannelState> {
    let cfg: &SystemConfig = &scenario.config;
    let large_scale = draw_large_scale(scenario)?;
    let mut rng = stream_rng(cfg.seed, Stream::Pilots);
    let pilots = assign_pilots(scenario.num_ues(), cfg.tau_p, cfg.pilot_power, &mut rng);
    let eta_d = data_power(&large_scale, cfg.data_power_kappa);
    ChannelState::from_parts(large_scale, pilots, eta_d, cfg.rho_p)
}
