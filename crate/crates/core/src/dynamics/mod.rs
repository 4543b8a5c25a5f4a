//! Master-equation dynamics on the vectorized density matrix.
//!
//! Vectorization stacks columns, so ρ_ij sits at index `i + j·d` and
//! vec(AρB) = (Bᵀ ⊗ A) vec(ρ). The generator is stored sparse in ns⁻¹.

mod correlation;
mod propagate;
mod spectrum;
mod steady;
mod truncation;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::model::{self, Channel, Params};
use crate::qspace::{DensityMatrix, Op, SpaceLayout, C64, I, ZERO};

pub use correlation::{g2_reflected, intensity_correlation, normalized_g2, two_time_correlation};
pub use propagate::{propagate, propagate_with, PropagateOptions};
pub use spectrum::emission_spectrum;
pub use steady::{steady_state, steady_state_with_diagnostics, SteadyState};
pub use truncation::{converge_in_fock, Converged, FockPolicy, REL_TOL as FOCK_REL_TOL};

pub(crate) use propagate::propagate_vec;

/// Linear generator L with d vec(ρ)/dt = L vec(ρ), in ns⁻¹.
#[derive(Debug, Clone)]
pub struct Superoperator {
    layout: SpaceLayout,
    matrix: CsrMatrix,
}

impl Superoperator {
    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// D = total_dim².
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.matrix.to_dense()
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let d = self.layout.total_dim();
        let v = self.matrix.mul_vec(&vectorize(rho));
        unvectorize(&v, d)
    }

    /// ‖vec(1)† L‖∞ relative to ‖L‖∞; zero for an exactly trace-preserving
    /// generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.layout.total_dim();
        let id = vectorize(&DMatrix::identity(d, d));
        let row = self.matrix.left_mul(&id);
        row.camax() / self.matrix.norm_inf().max(f64::MIN_POSITIVE)
    }

    /// Largest entry-wise difference to another generator on the same layout.
    pub fn max_abs_diff(&self, other: &Superoperator) -> Result<f64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch {
                left: self.layout.fock_dim(),
                right: other.layout.fock_dim(),
            });
        }
        Ok(crate::qspace::max_abs_diff(
            &self.to_dense(),
            &other.to_dense(),
        ))
    }
}

pub fn vectorize(m: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &DVector<C64>, d: usize) -> DMatrix<C64> {
    DMatrix::from_column_slice(d, d, v.as_slice())
}

fn nonzeros(m: &DMatrix<C64>) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)] != ZERO {
                out.push((i, j, m[(i, j)]));
            }
        }
    }
    out
}

/// Builds L for ρ̇ = i[ρ, H] + Σ rate·(cρc† − ½c†cρ − ½ρc†c), dividing every
/// energy by ħ.
///
/// Written as Lρ = Kρ + ρK† + Σ (rate/ħ) cρc† with
/// K = −iH/ħ − ½ Σ (rate/ħ) c†c.
pub fn liouvillian(h: &Op, channels: &[Channel]) -> Result<Superoperator> {
    let layout = h.layout();
    let d = layout.total_dim();
    let hbar = model::units::HBAR_UEV_NS;
    let mut k = h.matrix() * (-I / hbar);
    for ch in channels {
        if ch.op.layout() != layout {
            return Err(Error::LayoutMismatch {
                left: layout.fock_dim(),
                right: ch.op.layout().fock_dim(),
            });
        }
        if !(ch.rate >= 0.0) || !ch.rate.is_finite() {
            return Err(Error::NegativeRate {
                channel: ch.label.clone(),
                rate: ch.rate,
            });
        }
        if ch.rate > 0.0 {
            let c = ch.op.matrix();
            k -= c.adjoint() * c * C64::new(0.5 * ch.rate / hbar, 0.0);
        }
    }

    let mut triplets = Vec::new();
    for (i, kk, v) in nonzeros(&k) {
        // I ⊗ K
        for j in 0..d {
            triplets.push((i + j * d, kk + j * d, v));
        }
        // (K†)ᵀ ⊗ I = conj(K) ⊗ I: row (r + a·d), col (r + b·d) carries conj(K_ab)
        for r in 0..d {
            triplets.push((r + i * d, r + kk * d, v.conj()));
        }
    }
    for ch in channels.iter().filter(|c| c.rate > 0.0) {
        let w = ch.rate / hbar;
        let nz = nonzeros(ch.op.matrix());
        for &(j, l, cjl) in &nz {
            for &(i, kk, cik) in &nz {
                triplets.push((i + j * d, kk + l * d, cik * cjl.conj() * w));
            }
        }
    }
    Ok(Superoperator {
        layout,
        matrix: CsrMatrix::from_triplets(d * d, triplets),
    })
}

/// Generator of the full model for `params`.
pub fn build_liouvillian(params: &Params) -> Result<Superoperator> {
    let layout = params.layout()?;
    let h = model::hamiltonian(params, layout)?;
    let channels = model::collapse_ops(params, layout)?;
    liouvillian(&h, &channels)
}

/// Steady state of the full model for `params`.
pub fn solve_params(params: &Params) -> Result<DensityMatrix> {
    steady_state(&build_liouvillian(params)?)
}
