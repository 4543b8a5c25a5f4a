use nalgebra::DMatrix;

use super::Superoperator;
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::qspace::{DensityMatrix, C64, ZERO};

/// Adaptive Dormand–Prince 5(4) settings. Times in ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagateOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step; `None` leaves it to the controller.
    pub max_step: Option<f64>,
    pub max_steps: usize,
    /// Consecutive rejections that trigger halving the maximum step.
    pub rejections_before_halving: usize,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            max_step: None,
            max_steps: 10_000_000,
            rejections_before_halving: 8,
        }
    }
}

/// ρ(t_k) for every time in `t_grid`, starting from `rho0` at t = 0.
pub fn propagate(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_grid: &[f64],
) -> Result<Vec<DensityMatrix>> {
    propagate_with(l, rho0, t_grid, PropagateOptions::default())
}

pub fn propagate_with(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    opts: PropagateOptions,
) -> Result<Vec<DensityMatrix>> {
    if rho0.layout() != l.layout() {
        return Err(Error::LayoutMismatch {
            left: l.layout().fock_dim(),
            right: rho0.layout().fock_dim(),
        });
    }
    let d = l.layout().total_dim();
    let mut out = Vec::with_capacity(t_grid.len());
    let mut fail = None;
    propagate_vec(
        l.matrix(),
        rho0.matrix().as_slice().to_vec(),
        t_grid,
        opts,
        |_, x| match DensityMatrix::new_unchecked(l.layout(), DMatrix::from_column_slice(d, d, x)) {
            Ok(r) => out.push(r),
            Err(e) => fail = Some(e),
        },
    )?;
    match fail {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

// The generator is time independent, so the node times c_i never appear.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = ZERO;
        for &(w, k) in terms {
            acc += k[i] * w;
        }
        *o = y[i] + acc * h;
    }
}

/// Integrates dx/dt = L x from t = 0, landing exactly on each grid time and
/// handing the state to `observe(k, x)`. The controller never steps past a
/// grid point, and repeated rejections halve the maximum step.
pub(crate) fn propagate_vec(
    l: &CsrMatrix,
    mut y: Vec<C64>,
    t_grid: &[f64],
    opts: PropagateOptions,
    mut observe: impl FnMut(usize, &[C64]),
) -> Result<()> {
    if t_grid.is_empty()
        || !(t_grid[0] >= 0.0)
        || t_grid.iter().any(|t| !t.is_finite())
        || t_grid.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(Error::InvalidTimeGrid);
    }
    let n = y.len();
    assert_eq!(n, l.dim());
    let norm_l = l.norm_inf();
    let mut max_step = opts.max_step.unwrap_or(f64::INFINITY);
    let mut h = if norm_l > 0.0 {
        0.5 / norm_l
    } else {
        t_grid[t_grid.len() - 1].max(1.0)
    };
    h = h.min(max_step);

    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![ZERO; n]).collect();
    let mut tmp = vec![ZERO; n];
    let mut y_new = vec![ZERO; n];
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut rejections = 0usize;
    l.mul_vec_into(&y, &mut k[0]);

    for (idx, &target) in t_grid.iter().enumerate() {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::StepFailure { t, h, steps });
            }
            let remaining = target - t;
            let last = h >= remaining;
            let hs = if last { remaining } else { h };
            if hs <= 1e-14 * target.max(1e-3) {
                return Err(Error::StepFailure { t, h: hs, steps });
            }
            let (k0, rest) = k.split_at_mut(1);
            let k0 = &k0[0];
            let (k1, rest) = rest.split_at_mut(1);
            let (k2, rest) = rest.split_at_mut(1);
            let (k3, rest) = rest.split_at_mut(1);
            let (k4, rest) = rest.split_at_mut(1);
            let (k5, k6) = rest.split_at_mut(1);
            let (k1, k2, k3, k4, k5, k6) = (
                &mut k1[0], &mut k2[0], &mut k3[0], &mut k4[0], &mut k5[0], &mut k6[0],
            );

            combo(&mut tmp, &y, hs, &[(A21, k0)]);
            l.mul_vec_into(&tmp, k1);
            combo(&mut tmp, &y, hs, &[(A31, k0), (A32, k1)]);
            l.mul_vec_into(&tmp, k2);
            combo(&mut tmp, &y, hs, &[(A41, k0), (A42, k1), (A43, k2)]);
            l.mul_vec_into(&tmp, k3);
            combo(
                &mut tmp,
                &y,
                hs,
                &[(A51, k0), (A52, k1), (A53, k2), (A54, k3)],
            );
            l.mul_vec_into(&tmp, k4);
            combo(
                &mut tmp,
                &y,
                hs,
                &[(A61, k0), (A62, k1), (A63, k2), (A64, k3), (A65, k4)],
            );
            l.mul_vec_into(&tmp, k5);
            combo(
                &mut y_new,
                &y,
                hs,
                &[(B1, k0), (B3, k2), (B4, k3), (B5, k4), (B6, k5)],
            );
            l.mul_vec_into(&y_new, k6);

            // max norm: most entries of ρ are zero, which would dilute an RMS norm
            let mut err = 0.0f64;
            for i in 0..n {
                let e =
                    (k0[i] * E1 + k2[i] * E3 + k3[i] * E4 + k4[i] * E5 + k5[i] * E6 + k6[i] * E7)
                        * hs;
                let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                err = err.max(e.norm() / sc);
            }
            steps += 1;

            if err <= 1.0 {
                t = if last { target } else { t + hs };
                std::mem::swap(&mut y, &mut y_new);
                // first-same-as-last: k6 is L·y at the new point
                k.swap(0, 6);
                rejections = 0;
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last || factor < 1.0 {
                    h = (hs * factor).min(max_step);
                }
            } else {
                rejections += 1;
                if rejections >= opts.rejections_before_halving {
                    max_step = if max_step.is_finite() {
                        max_step * 0.5
                    } else {
                        hs * 0.5
                    };
                    rejections = 0;
                }
                let factor = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 1.0)
                } else {
                    0.1
                };
                h = (hs * factor).min(max_step);
            }
        }
        observe(idx, &y);
    }
    Ok(())
}
