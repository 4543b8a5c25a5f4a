//! Open-system simulator for two detuned, dipole-dipole coupled two-level
//! emitters inside a driven lossy cavity.
//!
//! Energies and rates are in µeV throughout, times in ns and drive powers
//! in W. The composite space orders its factors as (cavity, dot 1, dot 2).

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod effective;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod qspace;

pub use error::{Error, Result};
