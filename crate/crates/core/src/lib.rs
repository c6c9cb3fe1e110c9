//! Analytical core for Panda, a pan-network asynchronous neighbor-discovery
//! protocol for energy-constrained radios.
//!
//! Nodes cycle through sleep, listen, and transmit states. Sleep durations are
//! exponential with rate `lambda` (1/ms), the listen window `l` is fixed, and a
//! discovery message lasts `M` ms. A node that hears nothing for `l` ms
//! broadcasts; everyone who woke during that window receives. The crate models
//! one renewal of this process (all asleep until the first waker finishes
//! transmitting) and builds on it:
//!
//! - [`model`]: closed-form renewal quantities (duration, rate, role energies,
//!   power split, duty cycle).
//! - [`optimizer`]: the configuration search maximizing discovery rate under a
//!   power budget, an upper bound for it, and a Monte-Carlo oracle.
//! - [`dynamic`]: the voltage-adaptive variant that retunes its sleep rate from
//!   the storage-capacitor voltage.
//! - [`baselines`]: slotted-protocol parameterizations used for comparisons.
//! - [`preamble`]: the preamble-based variant for radios with cheap transmit.
//!
//! Conventions: time in ms, power in mW, energy in uJ (so uJ/ms == mW and the
//! formulas stay coefficient-free). Public rates are per second.

pub mod baselines;
pub mod dynamic;
pub mod model;
pub mod numeric;
pub mod optimizer;
pub mod preamble;
pub mod profile;

pub use model::{NetworkParams, PandaConfig, RadioProfile, RenewalMetrics};
pub use optimizer::{OptimizerReport, PcaSettings};

/// Unified error type for the analytical layer.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("profile: {0}")]
    Profile(String),
    /// No configuration satisfies the power constraint (or the constraint
    /// cannot bind inside the search region).
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
