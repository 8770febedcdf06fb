//! Two-stage security budget allocation under imperfect detection.
//!
//! A defender splits a fixed budget between *preventive* hardening, which
//! lowers each node's compromise probability through a contest between
//! defensive spending and attacker effort, and *reactive* recovery, which is
//! allocated after noisy binary sensors report on each node. The crate
//! solves the reactive stage in closed form (water-filling over posterior
//! beliefs), optimizes the preventive stage numerically over the induced
//! expected cost, and quantifies what sensor quality is worth.
//!
//! Module map:
//!
//! * [`model`] — domain types and closed-form primitives (compromise prior,
//!   signal distribution, Bayes posterior, expected recovery time).
//! * [`reactive`] — the closed-form reactive allocation for one signal.
//! * [`cost`] — per-signal and signal-averaged expected cost, exact or
//!   sampled.
//! * [`optimizer`] — multi-start projected descent for the preventive stage.
//! * [`metrics`] — value-of-sensing: improvement over uninformative sensors
//!   and the prior-only versus perfect-information cost bracket.
//! * [`mc`] — Monte Carlo cross-check of the analytic expectation.
//! * [`exec`] — parallel/sequential execution helpers (feature `parallel`,
//!   on by default) with bitwise-deterministic reductions.
//!
//! Everything is deterministic given inputs and seeds, in both execution
//! modes and for any thread count.

pub mod cost;
pub mod error;
pub mod exec;
pub mod mc;
pub mod metrics;
pub mod model;
pub mod optimizer;
pub mod reactive;
mod rng;

pub use error::{Error, Result};
pub use model::{Belief, NodeParams, Scenario, SensorModel, SignalVector};
