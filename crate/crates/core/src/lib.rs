//! Reconfiguration strategies for all-to-all collectives on circuit-switched
//! photonic scale-up networks.
//!
//! A [`Strategy`] is a sequence of degree-`k` topologies, each paired with a
//! schedule of contention-free rounds. The crate builds strategies from
//! structured topology families, costs them under an alpha-beta model with a
//! per-reconfiguration delay, verifies them against the demand matrix, and
//! replays them in a store-and-forward event simulator.

pub mod baselines;
pub mod cost;
pub mod error;
pub mod params;
pub mod schedule;
pub mod sim;
pub mod strategize;
pub mod topology;
pub mod traffic;
pub mod workload;

pub use error::{Error, Result};
pub use params::{CostModel, NetworkParams};
pub use schedule::{Hop, Path, Round, RoundEntry, Schedule, Stage, Strategy};
pub use topology::{Family, Topology, TopologySequence};
pub use traffic::TrafficMatrix;

/// Index of a GPU in `[0, n)`.
pub type NodeId = usize;
