//! Experiment harness: configuration, sweeps and CSV emission for the
//! two-stage security budget allocation model.
//!
//! The binary (`secalloc`) wires these pieces to subcommands; the library
//! surface exists so integration tests can drive the same code paths
//! directly.

pub mod config;
pub mod csv;
pub mod sweeps;
