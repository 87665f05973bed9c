//! Pulse-level simulation of mid-circuit measurements and feedforward on a
//! four-dot silicon spin-qubit array, together with quantum-instrument
//! tomography and error-generator analysis.
//!
//! Module map:
//! - [`sim`]: density matrices, channels, Pauli transfer maps.
//! - [`device`]: device physics (Stark shifts, dephasing, sensor, exchange).
//! - [`mcm`]: measurement sequences, phase bookkeeping and feedforward.
//! - [`tomo`]: instruments, reconstruction, fidelity, error generators.
//! - [`experiments`]: sweeps and fits behind the `mcm-lab` subcommands.

pub mod device;
pub mod error;
pub mod experiments;
pub mod mcm;
pub mod sim;
pub mod tomo;

pub use error::{Error, Result};
