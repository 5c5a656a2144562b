//! Named starting points for the command line.

use cfslice_core::{Setup, SystemConfig};

pub const NAMES: [&str; 3] = ["full", "desk", "overloaded"];

/// `full`: M = 100, K = 40. `desk`: M = 50, K = 40.
/// `overloaded`: desk with K = 60 and 2 MHz per slice, so neither slice can
/// meet its minimum demands.
pub fn preset(name: &str) -> Option<Setup> {
    match name {
        "full" => Some(Setup::new(SystemConfig::full_scale(40))),
        "desk" => Some(Setup::new(SystemConfig::desk(40))),
        "overloaded" => {
            let mut cfg = SystemConfig::desk(60);
            cfg.total_bandwidth_hz = 4e6;
            cfg.slice_bandwidth_hz = [2e6, 2e6];
            Some(Setup::new(cfg))
        }
        _ => None,
    }
}
