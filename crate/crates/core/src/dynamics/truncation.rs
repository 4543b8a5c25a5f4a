use crate::error::Result;
use crate::model::MAX_FOCK_DIM;

/// Relative change allowed between truncations N and N+2.
pub const REL_TOL: f64 = 5e-3;

/// How the cavity Fock space is truncated for an observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FockPolicy {
    /// Evaluate at this N; N+2 is still computed to set the convergence flag.
    Fixed(usize),
    /// Start from the drive-based suggestion and grow by 2 until the check
    /// passes or the cap is reached.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Converged {
    pub value: f64,
    pub fock_dim: usize,
    pub converged: bool,
}

/// Evaluates `f(N)` under `policy`. `start` is the automatic starting
/// truncation and `abs_floor` the absolute change that always counts as
/// converged (for observables that sit at zero).
pub fn converge_in_fock(
    policy: FockPolicy,
    start: usize,
    abs_floor: f64,
    mut f: impl FnMut(usize) -> Result<f64>,
) -> Result<Converged> {
    let close = |a: f64, b: f64| (a - b).abs() <= (REL_TOL * b.abs()).max(abs_floor);
    match policy {
        FockPolicy::Fixed(n) => {
            let v = f(n)?;
            let converged = if n + 2 <= MAX_FOCK_DIM {
                close(v, f(n + 2)?)
            } else {
                false
            };
            Ok(Converged {
                value: v,
                fock_dim: n,
                converged,
            })
        }
        FockPolicy::Auto => {
            let mut n = start.clamp(2, MAX_FOCK_DIM);
            let mut v = f(n)?;
            while n + 2 <= MAX_FOCK_DIM {
                let next = f(n + 2)?;
                if close(v, next) {
                    return Ok(Converged {
                        value: v,
                        fock_dim: n,
                        converged: true,
                    });
                }
                n += 2;
                v = next;
            }
            Ok(Converged {
                value: v,
                fock_dim: n,
                converged: false,
            })
        }
    }
}
