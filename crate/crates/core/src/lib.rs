//! Solver for the double confluent Heun equation
//! `z² w'' + (A₋₂z⁻² + A₋₁z⁻¹ + A₀ + A₁z + A₂z²) w = 0`.

#![allow(clippy::excessive_precision, clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod asymptotics;
pub mod connection;
pub mod floquet;
pub mod global;
pub mod model;
pub mod numerics;
pub mod validation;

pub use error::{Error, Result};
pub use model::DcheParams;
pub use numerics::Tolerances;
