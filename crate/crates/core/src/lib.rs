//! Joint user association, D2D mode selection and resource partitioning for
//! D2D-enabled heterogeneous cellular networks.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! - [`topology`] drops macro/pico base stations, cellular users and D2D pairs.
//! - [`channel`] turns a drop into large-scale link gains.
//! - [`phy`] applies the three-subband partition and equal power split and
//!   produces the SINR / rate / log-rate tables every association scheme reads.
//! - [`assoc`] holds the dual-decomposition Max-Utility solver together with
//!   the primal and dual evaluators and an exhaustive oracle.
//! - [`baselines`] re-scores the same selection skeleton for Max-Rate,
//!   Max-SINR, Rate Bias and SINR Bias.
//! - [`metrics`] computes tier loads, the Jain load-balancing index,
//!   effective rates, coverage and rate CDFs.

#![no_std]
// `!(x >= 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod assoc;
pub mod baselines;
pub mod channel;
mod error;
pub mod metrics;
pub mod phy;
pub mod roster;
pub mod topology;

pub use assoc::{
    brute_force_oracle, bs_load_update, bs_price_update, dual_evaluation, dual_value,
    primal_utility, solve_max_utility, user_choice, Assignment, DualEvaluation, IterationRecord,
    Prices, SolveResult, SolverConfig,
};
pub use baselines::{assoc_max_rate, assoc_max_sinr, assoc_rate_bias, assoc_sinr_bias, SchemeId};
pub use channel::{compute_gains, ChannelConfig, ChannelGains};
pub use error::{Error, Result};
pub use metrics::MetricsReport;
pub use phy::{
    allocate_power, build_rate_table, compute_rates, compute_sinr, PartitionConfig,
    PowerAllocation, RadioConfig, RateTable, Subband,
};
pub use roster::{Link, Roster, RxNode, RxRole, TxNode, TxRole};
pub use topology::{generate_layout, NetworkLayout, Point, ScenarioConfig};
