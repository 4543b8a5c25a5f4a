use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::qspace::{C64, ONE, ZERO};

/// Eigenvalues and unit eigenvectors of a 3×3 complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen3 {
    pub values: [C64; 3],
    pub vectors: [Vector3<C64>; 3],
}

/// Roots of the characteristic cubic by simultaneous (Aberth) iteration,
/// then null vectors of M − λI from an SVD. Repeated eigenvalues must come
/// with a full eigenspace, otherwise the matrix is reported as defective.
pub fn eigen3(m: &Matrix3<C64>) -> Result<Eigen3> {
    let scale = m
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    // λ³ + c2 λ² + c1 λ + c0
    let tr = m.trace();
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)]
        - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let coeffs = [-m.determinant(), minors, -tr];
    let mut roots = cubic_roots(coeffs, scale);

    // cluster near-equal roots and replace them by their mean
    let tol = 1e-6 * scale;
    let mut cluster = [0usize, 1, 2];
    for i in 0..3 {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() < tol {
                cluster[i] = cluster[j];
            }
        }
    }
    for c in 0..3 {
        let members: Vec<usize> = (0..3).filter(|&i| cluster[i] == c).collect();
        if members.len() > 1 {
            let mean = members.iter().map(|&i| roots[i]).sum::<C64>() / members.len() as f64;
            for &i in &members {
                roots[i] = mean;
            }
        }
    }

    let mut vectors = [Vector3::zeros(); 3];
    let mut done = [false; 3];
    for i in 0..3 {
        if done[i] {
            continue;
        }
        let members: Vec<usize> = (0..3).filter(|&k| cluster[k] == cluster[i]).collect();
        let shifted = m - Matrix3::identity() * roots[i];
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        let null_tol = 1e-7 * scale.max(1.0);
        for (slot, &k) in members.iter().zip(order.iter()) {
            if members.len() > 1 && svd.singular_values[k] > null_tol {
                return Err(Error::Defective {
                    eigenvalue: roots[i],
                });
            }
            let v: Vector3<C64> = v_t.row(k).transpose().map(|z| z.conj());
            vectors[*slot] = v / C64::new(v.norm(), 0.0);
            done[*slot] = true;
        }
    }
    Ok(Eigen3 {
        values: roots,
        vectors,
    })
}

fn eval(c: [C64; 3], z: C64) -> (C64, C64) {
    let p = ((z + c[2]) * z + c[1]) * z + c[0];
    let dp = (C64::new(3.0, 0.0) * z + c[2] * 2.0) * z + c[1];
    (p, dp)
}

fn cubic_roots(c: [C64; 3], scale: f64) -> [C64; 3] {
    let radius = 1.0 + c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut z = [
        C64::from_polar(radius * 0.5, 0.4),
        C64::from_polar(radius * 0.5, 0.4 + 2.1),
        C64::from_polar(radius * 0.5, 0.4 + 4.2),
    ];
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..3 {
            let (p, dp) = eval(c, z[i]);
            if p == ZERO {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..3)
                .filter(|&j| j != i)
                .map(|j| ONE / (z[i] - z[j]))
                .sum();
            let step = ratio / (ONE - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm());
            }
        }
        if moved <= 1e-15 * scale.max(1.0) {
            break;
        }
    }
    // a couple of Newton steps tighten simple roots
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = eval(c, *zi);
            if dp.norm() > 1e-12 * scale * scale {
                let step = p / dp;
                if step.is_finite() && step.norm() < 1e-6 * scale.max(1.0) {
                    *zi -= step;
                }
            }
        }
    }
    z
}
