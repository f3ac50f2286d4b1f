//! Reference values and table reproduction.

pub mod fixtures;
pub mod oracles;
pub mod reproduce;

pub use fixtures::{load_fixture, parse_fixture, Fixture, TableId};
pub use oracles::{jaffe_lay_series_oracle, qes_exact_coefficient, qes_exact_connection, qes_exact_value};
pub use reproduce::{reproduce_tables, Report, ReproduceLimits};
