use nalgebra::{DMatrix, DVector, Schur};

use super::{build_liouvillian, steady_state};
use crate::error::{Error, Result};
use crate::model::{units::HBAR_UEV_NS, Params};
use crate::qspace::{annihilator, C64, I, ZERO};

/// Cavity emission spectrum S(ω) = Re ∫₀^∞ dτ e^{−i(ω−ω_L)τ} ⟨a†(τ) a(0)⟩
/// at the absolute frequencies in `omega_grid` (µeV), in ns.
///
/// The one-sided transform is evaluated as the resolvent
/// Tr[a† (i(ω−ω_L)/ħ − L)⁻¹ (aρ)]. Without a coherent drive the generator
/// conserves the excitation difference between the two sides of ρ, so the
/// resolvent only needs the sector where that difference is −1. This also
/// keeps the stationary zero mode out of the inverse.
pub fn emission_spectrum(params: &Params, omega_grid: &[f64]) -> Result<Vec<f64>> {
    if params.p_laser != 0.0 {
        return Err(Error::SpectrumExcitation(
            "the coherent drive must be off (p_laser = 0)".into(),
        ));
    }
    if params.pump_dot1 <= 0.0 && params.pump_dot2 <= 0.0 && params.pump_cavity <= 0.0 {
        return Err(Error::SpectrumExcitation(
            "at least one incoherent pump rate must be > 0".into(),
        ));
    }
    if omega_grid.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidGrid("frequencies must be finite".into()));
    }
    let l = build_liouvillian(params)?;
    let rho = steady_state(&l)?;
    let layout = l.layout();
    let d = layout.total_dim();
    let exc: Vec<i64> = layout.states().map(|s| s.excitations() as i64).collect();
    let diff = |k: usize| exc[k % d] - exc[k / d];

    let sector: Vec<usize> = (0..d * d).filter(|&k| diff(k) == -1).collect();
    let mut local = vec![usize::MAX; d * d];
    for (m, &k) in sector.iter().enumerate() {
        local[k] = m;
    }
    let n = sector.len();
    let mut ls = DMatrix::<C64>::zeros(n, n);
    for r in 0..d * d {
        for (c, v) in l.matrix().row(r) {
            if diff(r) != diff(c) {
                return Err(Error::SpectrumExcitation(
                    "the generator mixes excitation sectors, so a coherent drive is present".into(),
                ));
            }
            if local[r] != usize::MAX {
                ls[(local[r], local[c])] = v;
            }
        }
    }

    let a = annihilator(layout);
    let seed = a.matrix() * rho.matrix();
    let x = DVector::from_iterator(n, sector.iter().map(|&k| seed[(k % d, k / d)]));
    let ad = a.matrix().adjoint();
    // Tr(a† Y) = Σ_ij (a†)_ji Y_ij
    let left = DVector::from_iterator(n, sector.iter().map(|&k| ad[(k / d, k % d)]));

    let schur = Schur::try_new(ls, f64::EPSILON, 0)
        .ok_or_else(|| Error::SpectrumExcitation("Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let qx = q.adjoint() * &x;
    let lq = q.transpose() * &left;

    let mut out = Vec::with_capacity(omega_grid.len());
    let mut z = DVector::<C64>::zeros(n);
    for &w in omega_grid {
        let shift = I * ((w - params.omega_l) / HBAR_UEV_NS);
        // back substitution on (shift − T) z = Qᴴ x
        for i in (0..n).rev() {
            let mut acc = qx[i];
            for j in i + 1..n {
                acc += t[(i, j)] * z[j];
            }
            let diag = shift - t[(i, i)];
            z[i] = if diag == ZERO { ZERO } else { acc / diag };
        }
        out.push(lq.dot(&z).re);
    }
    Ok(out)
}
