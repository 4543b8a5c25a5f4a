//! Numerical kernels that the dense `nalgebra` types do not cover: a
//! compressed sparse row matrix, a banded LU factorization and an
//! eigen-solver for small complex matrices.

mod band;
mod eig3;
mod sparse;

pub use band::BandLu;
pub use eig3::{eigen3, Eigen3};
pub use sparse::CsrMatrix;
