use nalgebra::DMatrix;

use super::Superoperator;
use crate::error::{Error, Result};
use crate::linalg::BandLu;
use crate::qspace::{DensityMatrix, C64, ONE, ZERO};

/// Pivot ratio below which the null space is treated as degenerate.
const SINGULAR_PIVOT_RATIO: f64 = 1e-14;
/// Largest accepted ‖L vec(ρ)‖∞ in ns⁻¹.
const MAX_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// ‖L vec(ρ)‖∞ in ns⁻¹.
    pub residual: f64,
    /// Smallest over largest pivot of the banded factorization.
    pub pivot_ratio: f64,
}

/// Orders unknowns by photon numbers first, then exciton labels, so the
/// generator becomes banded with half-width about 16·(N+1).
struct Ordering {
    n: usize,
    d: usize,
    to_perm: Vec<usize>,
}

impl Ordering {
    fn new(fock_dim: usize) -> Self {
        let d = 4 * fock_dim;
        let mut to_perm = vec![0; d * d];
        for j in 0..d {
            for i in 0..d {
                let (ni, si) = (i / 4, i % 4);
                let (nj, sj) = (j / 4, j % 4);
                to_perm[i + j * d] = ((ni * fock_dim + nj) * 4 + si) * 4 + sj;
            }
        }
        Self {
            n: fock_dim,
            d,
            to_perm,
        }
    }
}

pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    steady_state_with_diagnostics(l).map(|s| s.rho)
}

/// Solves L x = 0 with the equation for the vacuum-ground population
/// replaced by x₀ = 1, then rescales to unit trace. Keeping that single pin
/// instead of a dense trace row preserves the band structure.
pub fn steady_state_with_diagnostics(l: &Superoperator) -> Result<SteadyState> {
    let layout = l.layout();
    let ord = Ordering::new(layout.fock_dim());
    let dim = l.dim();
    let csr = l.matrix();

    let (mut kl, mut ku) = (0usize, 0usize);
    for r in 0..dim {
        let pr = ord.to_perm[r];
        for (c, _) in csr.row(r) {
            let pc = ord.to_perm[c];
            kl = kl.max(pr.saturating_sub(pc));
            ku = ku.max(pc.saturating_sub(pr));
        }
    }

    // vacuum-ground population is unknown 0 in both orderings
    let pin = 0;
    debug_assert_eq!(ord.to_perm[pin], 0);
    let mut band = BandLu::zeros(dim, kl, ku);
    for r in 0..dim {
        if r == pin {
            continue;
        }
        let pr = ord.to_perm[r];
        for (c, v) in csr.row(r) {
            band.add(pr, ord.to_perm[c], v);
        }
    }
    band.add(0, 0, ONE);
    let pivot_ratio = band.factor();
    if !(pivot_ratio > SINGULAR_PIVOT_RATIO) {
        return Err(Error::SingularSteadyState { pivot_ratio });
    }

    let mut x = vec![ZERO; dim];
    x[0] = ONE;
    band.solve_in_place(&mut x);

    // one round of iterative refinement against the pinned system
    let mut natural = vec![ZERO; dim];
    for (k, &p) in ord.to_perm.iter().enumerate() {
        natural[k] = x[p];
    }
    let mut lx = vec![ZERO; dim];
    csr.mul_vec_into(&natural, &mut lx);
    let mut r = vec![ZERO; dim];
    for (k, &p) in ord.to_perm.iter().enumerate() {
        r[p] = -lx[k];
    }
    r[0] = ONE - x[0];
    band.solve_in_place(&mut r);
    for (xi, ri) in x.iter_mut().zip(&r) {
        *xi += ri;
    }

    let d = ord.d;
    let mut m = DMatrix::<C64>::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            m[(i, j)] = x[ord.to_perm[i + j * d]];
        }
    }
    let tr = m.trace();
    if tr.norm() == 0.0 || !tr.is_finite() {
        return Err(Error::SingularSteadyState { pivot_ratio });
    }
    m /= tr;
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);

    let v = super::vectorize(&m);
    let residual = csr.mul_vec(&v).camax();
    if !(residual < MAX_RESIDUAL) {
        return Err(Error::SteadyStateResidual { residual });
    }
    debug_assert_eq!(ord.n, layout.fock_dim());
    let rho = DensityMatrix::new(layout, m)?;
    Ok(SteadyState {
        rho,
        residual,
        pivot_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_liouvillian, liouvillian};
    use crate::model::{Channel, Params};
    use crate::qspace::{annihilator, expectation, number, Op, SpaceLayout};

    #[test]
    fn empty_cavity_coherent_state() {
        let mut p = Params::baseline().with_power(1e-9).with_fock_dim(8);
        p.g = 0.0;
        let ss = steady_state_with_diagnostics(&build_liouvillian(&p).unwrap()).unwrap();
        let l = p.layout().unwrap();
        let alpha = 2.0 * p.pump_amplitude().unwrap() / p.kappa();
        let a = expectation(&annihilator(l), &ss.rho).unwrap();
        // with the −iE_p(a† − a) drive the amplitude is −2E_p/κ
        assert!((a.norm() - alpha).abs() < 1e-6 * alpha);
        assert!((a.re + alpha).abs() < 1e-6 * alpha);
        let n = expectation(&number(l), &ss.rho).unwrap().re;
        assert!((n - alpha * alpha).abs() < 1e-5 * alpha * alpha);
        assert!(ss.residual < 1e-9);
    }

    #[test]
    fn undriven_relaxes_to_ground() {
        let p = Params::baseline()
            .with_power(0.0)
            .with_detuning(5.0)
            .with_fock_dim(3);
        let rho = steady_state(&build_liouvillian(&p).unwrap()).unwrap();
        let l = p.layout().unwrap();
        assert!(rho.trace_distance(&DensityMatrix::ground(l)).unwrap() < 1e-12);
    }

    #[test]
    fn degenerate_generator_is_reported() {
        // no dissipation: every diagonal state is stationary
        let l = SpaceLayout::new(2).unwrap();
        let s = liouvillian(&Op::zero(l), &[Channel::new("none", 0.0, annihilator(l))]).unwrap();
        assert!(matches!(
            steady_state(&s),
            Err(Error::SingularSteadyState { .. })
        ));
    }

    #[test]
    fn band_is_narrow() {
        let p = Params::baseline().with_fock_dim(5);
        let s = build_liouvillian(&p).unwrap();
        let ord = Ordering::new(5);
        let mut width = 0;
        for r in 0..s.dim() {
            for (c, _) in s.matrix().row(r) {
                width = width.max(ord.to_perm[r].abs_diff(ord.to_perm[c]));
            }
        }
        assert!(width <= 16 * 6, "{width}");
    }
}
