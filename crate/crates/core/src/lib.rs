//! Resource management for uplink network-sliced cell-free massive MIMO.
//!
//! The crate is `no_std` + `alloc`. It covers the whole numerical pipeline:
//! scenario drops, large-scale fading and MMSE estimation quality, the
//! closed-form uplink SINR, finite-blocklength rates and M/M/1 delay, the
//! per-UE bandwidth allocators, the UE-AP associators and the alternating
//! optimization driver that ties them together.
//!
//! IO, timing, the Monte-Carlo harness and the command line live in the
//! `cfslice-sim` companion crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod association;
pub mod bandwidth;
pub mod channel;
pub mod config;
mod error;
pub mod math;
pub mod optimizer;
pub mod perf;
pub mod rng;
pub mod scenario;

pub use association::{Association, AssociatorKind};
pub use bandwidth::{AllocInput, AllocOutcome, AllocatorKind};
pub use channel::{ChannelState, LargeScale, PilotPlan};
pub use config::{Setup, SystemConfig};
pub use error::{Error, Result};
pub use optimizer::{AoTrace, Scheme, SchemeOutcome};
pub use perf::EvalReport;
pub use scenario::{Scenario, Slice, UeProfile};
