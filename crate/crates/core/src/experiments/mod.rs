//! Experiment drivers that turn protocol simulations into figure-ready tables.

pub mod common;
pub mod exchange;
pub mod fig2;
pub mod ramsey;
pub mod rng;
pub mod stark;
pub mod stats;
pub mod table;
pub mod tomography;
pub mod tradeoff;

pub use common::RunOptions;
pub use table::{Cell, Report, Table};
