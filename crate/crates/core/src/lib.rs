//! Power control for downlink multi-cell NOMA networks.
//!
//! Two problems share one system model ([`model`]):
//!
//! - **Sum-power minimization** ([`power_min`]): closed-form per-user powers
//!   for each (cell, subchannel) group, and a fixed-point iteration on the
//!   cell powers that reaches the global optimum.
//! - **Sum-rate maximization** ([`single_cell`], [`rate_max`]): a closed-form
//!   optimum for one group at fixed total power, and a distributed
//!   difference-of-convex loop across cells.
//!
//! [`oracle`] holds brute-force and numerical validators that do not depend on
//! the solvers, and [`scenario`] generates channels, pairs users, and runs
//! batch experiments.

// `!(a <= b)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod oracle;
pub mod power_min;
pub mod rate_max;
pub mod scenario;
pub mod single_cell;

pub use error::{Error, Result};
pub use model::{
    AuxiliaryVector, CellPowerVector, NetworkTopology, RateDemands, UserLink, UserPowerAllocation,
};
