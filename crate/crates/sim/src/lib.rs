//! Discrete-event simulation of the discovery protocols: asynchronous
//! wake/listen/transmit cycles, slotted baselines, harvested-energy buffers,
//! and the metrics used to validate the analytical model.

pub mod energy;
pub mod engine;
pub mod metrics;
pub mod scenario;
pub mod slots;
pub mod topology;

pub use engine::{run_renewal_sim, EnergyConfig, Protocol, RenewalSimConfig};
pub use metrics::{Discovery, SimReport};
pub use scenario::{ProtocolChoice, Scenario};
pub use slots::simulate_slot_protocol;
pub use topology::Topology;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Core(#[from] panda_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
