use alloc::string::String;

use crate::scenario::Slice;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("slice mix fractions must be in [0, 1] and sum to 1 (got eMBB {embb}, URLLC {urllc})")]
    InvalidSliceMix { embb: f64, urllc: f64 },
    #[error("empty interval for `{field}`: [{lo}, {hi}]")]
    EmptyInterval { field: &'static str, lo: f64, hi: f64 },
    #[error("distance must be positive (got {0} m)")]
    NonPositiveDistance(f64),
    #[error("probability must lie in (0, 1) (got {0})")]
    ProbabilityOutOfRange(f64),
    #[error("UE {0} has an empty serving set")]
    EmptyServingSet(usize),
    #[error("UE {0} is not a URLLC UE")]
    NotUrllc(usize),
    #[error("bandwidth allocation infeasible in the {0} slice")]
    Infeasible(Slice),
    #[error("brute-force association limited to K*M <= {limit} (got {size})")]
    EnumerationTooLarge { size: usize, limit: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
