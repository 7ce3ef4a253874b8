#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact_prob;
pub mod experiments;
pub mod graph;
pub mod partitions;
pub mod scalar;
pub mod solver;
pub mod theory;

pub use error::{Error, Result};

/// Log-domain probability in `f64`.
pub type LogF64 = scalar::LogValue<f64>;
