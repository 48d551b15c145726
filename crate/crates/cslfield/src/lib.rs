//! Density-matrix solutions of a one-dimensional scalar-field collapse model
//! (continuous spontaneous localization driven by the field operator), plus a
//! brute-force truncated-Fock Lindblad integrator used to check them.
//!
//! Units are natural throughout (ħ = c = 1).

pub mod clump_states;
pub mod error;
pub mod field_density;
pub mod fock_oracle;
pub mod kernel_solution;
pub mod numerics;
pub mod observables;
pub mod units_modes;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
