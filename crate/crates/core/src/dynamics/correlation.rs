use nalgebra::DMatrix;

use super::{build_liouvillian, propagate_vec, steady_state, PropagateOptions, Superoperator};
use crate::error::{Error, Result};
use crate::model::{self, Params};
use crate::qspace::{expectation, DensityMatrix, Op, C64, ZERO};

fn check_layouts(l: &Superoperator, rho: &DensityMatrix, ops: &[&Op]) -> Result<()> {
    let layout = l.layout();
    if rho.layout() != layout {
        return Err(Error::LayoutMismatch {
            left: layout.fock_dim(),
            right: rho.layout().fock_dim(),
        });
    }
    for op in ops {
        if op.layout() != layout {
            return Err(Error::LayoutMismatch {
                left: layout.fock_dim(),
                right: op.layout().fock_dim(),
            });
        }
    }
    Ok(())
}

/// Tr(A · X) for a column-stacked X.
fn trace_with(a: &DMatrix<C64>, x: &[C64]) -> C64 {
    let d = a.nrows();
    let mut acc = ZERO;
    for j in 0..d {
        for i in 0..d {
            acc += a[(j, i)] * x[i + j * d];
        }
    }
    acc
}

/// Propagates `seed` under L and records Tr(left · seed(τ)). The seed is
/// rescaled to unit max-norm first so the absolute tolerance stays
/// meaningful for weak fields.
fn regression(
    l: &Superoperator,
    seed: DMatrix<C64>,
    left: &DMatrix<C64>,
    tau_grid: &[f64],
) -> Result<Vec<C64>> {
    let scale = seed.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        if tau_grid.is_empty()
            || tau_grid.windows(2).any(|w| !(w[1] > w[0]))
            || !(tau_grid[0] >= 0.0)
        {
            return Err(Error::InvalidTimeGrid);
        }
        return Ok(vec![ZERO; tau_grid.len()]);
    }
    let x0: Vec<C64> = seed.iter().map(|z| z / scale).collect();
    let mut out = vec![ZERO; tau_grid.len()];
    propagate_vec(
        l.matrix(),
        x0,
        tau_grid,
        PropagateOptions::default(),
        |k, x| {
            out[k] = trace_with(left, x) * scale;
        },
    )?;
    Ok(out)
}

/// ⟨A(τ) B(0)⟩ = Tr[A e^{Lτ}(B ρ)] for a stationary ρ.
pub fn two_time_correlation(
    l: &Superoperator,
    rho_ss: &DensityMatrix,
    a: &Op,
    b: &Op,
    tau_grid: &[f64],
) -> Result<Vec<C64>> {
    check_layouts(l, rho_ss, &[a, b])?;
    regression(l, b.matrix() * rho_ss.matrix(), a.matrix(), tau_grid)
}

/// ⟨c†(0) c†(τ) c(τ) c(0)⟩ = Tr[c†c e^{Lτ}(c ρ c†)].
pub fn intensity_correlation(
    l: &Superoperator,
    rho_ss: &DensityMatrix,
    c: &Op,
    tau_grid: &[f64],
) -> Result<Vec<C64>> {
    check_layouts(l, rho_ss, &[c])?;
    let cm = c.matrix();
    let seed = cm * rho_ss.matrix() * cm.adjoint();
    regression(l, seed, &(cm.adjoint() * cm), tau_grid)
}

/// Normalized intensity correlation of `c` in the state ρ.
pub fn normalized_g2(
    l: &Superoperator,
    rho: &DensityMatrix,
    c: &Op,
    tau_grid: &[f64],
) -> Result<Vec<f64>> {
    let intensity = expectation(&(&c.dagger() * c), rho)?.re;
    let scale = c.matrix().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if !(intensity > 1e-14 * scale) {
        return Err(Error::ZeroIntensity);
    }
    let g = intensity_correlation(l, rho, c, tau_grid)?;
    Ok(g.into_iter()
        .map(|z| z.re / (intensity * intensity))
        .collect())
}

/// g₂(τ) of the field reflected by the driven mirror, a_out = √κ_L a + α_in.
pub fn g2_reflected(params: &Params, tau_grid: &[f64]) -> Result<Vec<f64>> {
    let l = build_liouvillian(params)?;
    let rho = steady_state(&l)?;
    let (out, _) = model::reflected_field(params, l.layout())?;
    normalized_g2(&l, &rho, &out, tau_grid)
}
