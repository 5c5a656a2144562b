//! Reproducible problem instances: AP/UE placement, slice membership and
//! per-UE traffic/QoS parameters.

use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Interval, Setup, SliceMix, SystemConfig, TrafficRanges};
use crate::error::Result;
use crate::math;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slice {
    #[serde(rename = "eMBB")]
    Embb,
    #[serde(rename = "URLLC")]
    Urllc,
}

impl Slice {
    pub const ALL: [Slice; 2] = [Slice::Embb, Slice::Urllc];

    /// Index into `[eMBB, URLLC]` arrays.
    pub const fn index(self) -> usize {
        match self {
            Slice::Embb => 0,
            Slice::Urllc => 1,
        }
    }
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slice::Embb => "eMBB",
            Slice::Urllc => "URLLC",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Premium,
    Standard,
}

/// Slice-specific QoS contract of a UE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "slice")]
pub enum Traffic {
    #[serde(rename = "eMBB")]
    Embb { min_rate_bps: f64, tier: Tier },
    #[serde(rename = "URLLC")]
    Urllc {
        packet_bytes: f64,
        /// Packets per second.
        arrival_rate: f64,
        max_delay_s: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UeProfile {
    pub weight: f64,
    #[serde(flatten)]
    pub traffic: Traffic,
}

impl UeProfile {
    pub fn slice(&self) -> Slice {
        match self.traffic {
            Traffic::Embb { .. } => Slice::Embb,
            Traffic::Urllc { .. } => Slice::Urllc,
        }
    }

    /// Packet size in bits for URLLC UEs.
    pub fn packet_bits(&self) -> Option<f64> {
        match self.traffic {
            Traffic::Urllc { packet_bytes, .. } => Some(8.0 * packet_bytes),
            Traffic::Embb { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Immutable snapshot of one Monte-Carlo drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: SystemConfig,
    pub ap_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
    pub profiles: Vec<UeProfile>,
}

impl Scenario {
    pub fn num_ues(&self) -> usize {
        self.profiles.len()
    }

    pub fn num_aps(&self) -> usize {
        self.ap_positions.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.profiles.iter().map(|p| p.weight).collect()
    }

    pub fn slice_members(&self, slice: Slice) -> impl Iterator<Item = usize> + '_ {
        self.profiles
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.slice() == slice)
            .map(|(k, _)| k)
    }

    /// UE-AP distance with wrap-around and the configured floor.
    pub fn distance(&self, k: usize, m: usize) -> f64 {
        let d = wrap_distance(self.ue_positions[k], self.ap_positions[m], self.config.area_side_m);
        d.max(self.config.min_distance_m)
    }
}

/// Distance on the torus `[0, side)^2`.
pub fn wrap_distance(p1: Point, p2: Point, area_side: f64) -> f64 {
    let axis = |a: f64, b: f64| {
        let d = (a - b).abs();
        d.min(area_side - d)
    };
    math::hypot(axis(p1.x, p2.x), axis(p1.y, p2.y))
}

fn uniform<R: Rng>(rng: &mut R, iv: Interval) -> f64 {
    if iv.lo() == iv.hi() {
        iv.lo()
    } else {
        rng.random_range(iv.lo()..=iv.hi())
    }
}

/// Draws a scenario. Slice membership uses an exact count
/// `round(embb * K)` of eMBB UEs placed by a random permutation, so every UE
/// is eMBB with marginal probability `embb` and the realized mix matches the
/// configuration up to rounding.
pub fn generate_scenario(
    config: &SystemConfig,
    slice_mix: &SliceMix,
    traffic: &TrafficRanges,
) -> Result<Scenario> {
    config.validate()?;
    slice_mix.validate()?;
    traffic.validate()?;

    let side = config.area_side_m;
    let mut place = stream_rng(config.seed, Stream::Placement);
    let mut point = || Point {
        x: place.random_range(0.0..side),
        y: place.random_range(0.0..side),
    };
    let ap_positions: Vec<Point> = (0..config.num_aps).map(|_| point()).collect();
    let ue_positions: Vec<Point> = (0..config.num_ues).map(|_| point()).collect();

    let mut rng = stream_rng(config.seed, Stream::Traffic);
    let k = config.num_ues;
    let n_embb = (math::round(slice_mix.embb * k as f64) as usize).min(k);
    let mut slices: Vec<Slice> = (0..k)
        .map(|i| if i < n_embb { Slice::Embb } else { Slice::Urllc })
        .collect();
    slices.shuffle(&mut rng);

    let profiles = slices
        .into_iter()
        .map(|slice| match slice {
            Slice::Urllc => UeProfile {
                weight: uniform(&mut rng, traffic.urllc_weight),
                traffic: Traffic::Urllc {
                    packet_bytes: math::round(uniform(&mut rng, traffic.urllc_packet_bytes)),
                    arrival_rate: uniform(&mut rng, traffic.urllc_arrival_rate),
                    max_delay_s: uniform(&mut rng, traffic.urllc_max_delay_s),
                },
            },
            Slice::Embb => {
                let premium = rng.random_bool(traffic.embb_premium_fraction);
                let (tier, weight, range) = if premium {
                    (Tier::Premium, traffic.embb_premium_weight, traffic.embb_premium_rate_bps)
                } else {
                    (Tier::Standard, traffic.embb_standard_weight, traffic.embb_standard_rate_bps)
                };
                UeProfile {
                    weight,
                    traffic: Traffic::Embb {
                        min_rate_bps: uniform(&mut rng, range),
                        tier,
                    },
                }
            }
        })
        .collect();

    Ok(Scenario {
        config: config.clone(),
        ap_positions,
        ue_positions,
        profiles,
    })
}

impl Setup {
    pub fn generate(&self) -> Result<Scenario> {
        generate_scenario(&self.config, &self.slice_mix, &self.traffic)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn setup(k: usize) -> Setup {
        Setup::new(SystemConfig::full_scale(k))
    }

    #[test]
    fn wrap_distance_examples() {
        let p = |x, y| Point { x, y };
        assert_eq!(wrap_distance(p(0.0, 0.0), p(990.0, 0.0), 1000.0), 10.0);
        assert_eq!(wrap_distance(p(3.0, 4.0), p(3.0, 4.0), 1000.0), 0.0);
        let d = wrap_distance(p(0.0, 0.0), p(500.0, 500.0), 1000.0);
        assert!((d - 500.0 * core::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn default_mix_gives_expected_counts() {
        let s = setup(40).generate().unwrap();
        assert_eq!(s.slice_members(Slice::Embb).count(), 16);
        assert_eq!(s.slice_members(Slice::Urllc).count(), 24);
        assert_eq!(s.num_aps(), 100);
        for p in s.ap_positions.iter().chain(&s.ue_positions) {
            assert!((0.0..1000.0).contains(&p.x) && (0.0..1000.0).contains(&p.y));
        }
    }

    #[test]
    fn degenerate_mix_is_all_embb() {
        let mut st = setup(25);
        st.slice_mix = SliceMix { embb: 1.0, urllc: 0.0 };
        let s = st.generate().unwrap();
        assert!(s.profiles.iter().all(|p| p.slice() == Slice::Embb));
    }

    #[test]
    fn same_seed_same_scenario() {
        let a = setup(30).generate().unwrap();
        let b = setup(30).generate().unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let mut other = setup(30);
        other.config.seed = 2;
        assert_ne!(other.generate().unwrap(), a);
    }

    #[test]
    fn traffic_draws_respect_ranges() {
        let s = setup(200).generate().unwrap();
        let t = TrafficRanges::default();
        for p in &s.profiles {
            match p.traffic {
                Traffic::Urllc { packet_bytes, arrival_rate, max_delay_s } => {
                    assert!((20.0..=120.0).contains(&packet_bytes));
                    assert_eq!(packet_bytes, packet_bytes.trunc());
                    assert!((5.0..=25.0).contains(&arrival_rate));
                    assert!((0.5e-3..=2.5e-3).contains(&max_delay_s));
                    assert!((2.0..=4.0).contains(&p.weight));
                }
                Traffic::Embb { min_rate_bps, tier } => match tier {
                    Tier::Premium => {
                        assert_eq!(p.weight, t.embb_premium_weight);
                        assert!((5e6..=10e6).contains(&min_rate_bps));
                    }
                    Tier::Standard => {
                        assert_eq!(p.weight, t.embb_standard_weight);
                        assert!((1e6..=3e6).contains(&min_rate_bps));
                    }
                },
            }
        }
    }

    #[test]
    fn slice_fraction_over_many_ues() {
        let mut embb = 0usize;
        let mut premium = 0usize;
        let mut total = 0usize;
        for seed in 0..400 {
            let mut st = setup(33);
            st.config.seed = seed;
            let s = st.generate().unwrap();
            for p in &s.profiles {
                total += 1;
                if let Traffic::Embb { tier, .. } = p.traffic {
                    embb += 1;
                    premium += (tier == Tier::Premium) as usize;
                }
            }
        }
        assert!(total >= 10_000);
        let frac = embb as f64 / total as f64;
        assert!((frac - 0.4).abs() <= 0.02, "{frac}");
        let prem = premium as f64 / embb as f64;
        assert!((prem - 0.3).abs() <= 0.02, "{prem}");
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let mut st = setup(10);
        st.slice_mix = SliceMix { embb: 0.3, urllc: 0.3 };
        assert!(st.generate().is_err());
        let mut st = setup(10);
        st.traffic.urllc_packet_bytes = Interval(120.0, 20.0);
        assert!(st.generate().is_err());
    }

    fn pt() -> impl Strategy<Value = Point> {
        (0.0..1000.0f64, 0.0..1000.0f64).prop_map(|(x, y)| Point { x, y })
    }

    proptest! {
        #[test]
        fn wrap_distance_is_a_metric(a in pt(), b in pt(), c in pt()) {
            let d = |p, q| wrap_distance(p, q, 1000.0);
            prop_assert!((d(a, b) - d(b, a)).abs() < 1e-9);
            prop_assert_eq!(d(a, a), 0.0);
            prop_assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-9);
            prop_assert!(d(a, b) <= 1000.0 / core::f64::consts::SQRT_2 + 1e-9);
        }
    }
}
