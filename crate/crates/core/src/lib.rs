//! Temporal-smoothed clustered cell-free networking.
//!
//! Users move over a unit square populated by static BSs. At every instant
//! the network is modelled as a graph whose vertices are BSs (each carrying
//! the users it serves best), and evolutionary spectral clustering splits it
//! into subnetworks while trading per-instant sum rate against stability of
//! the partition over time.
//!
//! - [`topology`]: layouts and random-waypoint mobility
//! - [`channel`]: path-loss gains, approximate SINR and sum rate
//! - [`graph`]: affinity weights, Laplacian and cuts
//! - [`clustering`]: blended-Laplacian spectral clustering
//! - [`metrics`]: temporal smoothness, handovers and zero-forcing rates
//! - [`oracle`]: exhaustive references for small instances
//! - [`harness`]: trials, Monte Carlo sweeps and CSV outputs

pub mod channel;
pub mod clustering;
pub mod error;
pub mod format;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod rng;
pub mod topology;

pub use error::{Error, Result};
