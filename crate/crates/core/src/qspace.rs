//! Truncated Hilbert space of one cavity mode and two two-level emitters.
//!
//! Basis states are ordered row-major over (cavity, dot1, dot2):
//!
//! ```text
//! index = 4 * n + 2 * s1 + s2      with s = 0 (ground) or 1 (excited)
//! ```
//!
//! so `|n, g, g>` sits at `4n`, `|n, g, e>` at `4n + 1`, `|n, e, g>` at
//! `4n + 2` and `|n, e, e>` at `4n + 3`. CSV state dumps rely on this order.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Ground,
    Excited,
}

impl Level {
    fn bit(self) -> usize {
        match self {
            Level::Ground => 0,
            Level::Excited => 1,
        }
    }

    fn from_bit(bit: usize) -> Self {
        if bit == 0 {
            Level::Ground
        } else {
            Level::Excited
        }
    }
}

/// A product basis state `|n, s1, s2>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub photons: usize,
    pub dot1: Level,
    pub dot2: Level,
}

impl BasisState {
    pub fn new(photons: usize, dot1: Level, dot2: Level) -> Self {
        Self {
            photons,
            dot1,
            dot2,
        }
    }

    /// Photons plus excited emitters.
    pub fn excitations(&self) -> usize {
        self.photons + self.dot1.bit() + self.dot2.bit()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceLayout {
    fock_dim: usize,
}

impl SpaceLayout {
    pub const EXCITON_STATES: usize = 4;

    pub fn new(fock_dim: usize) -> Result<Self> {
        if fock_dim < 2 {
            return Err(Error::InvalidFockDim(fock_dim));
        }
        Ok(Self { fock_dim })
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn total_dim(&self) -> usize {
        self.fock_dim * Self::EXCITON_STATES
    }

    pub fn index(&self, state: BasisState) -> Option<usize> {
        (state.photons < self.fock_dim)
            .then(|| 4 * state.photons + 2 * state.dot1.bit() + state.dot2.bit())
    }

    pub fn state(&self, index: usize) -> Option<BasisState> {
        (index < self.total_dim()).then(|| BasisState {
            photons: index / 4,
            dot1: Level::from_bit((index / 2) % 2),
            dot2: Level::from_bit(index % 2),
        })
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.total_dim()).map(|i| self.state(i).expect("index in range"))
    }

    /// Column vector for a basis state.
    pub fn ket(&self, state: BasisState) -> Result<DVector<C64>> {
        let idx = self.index(state).ok_or(Error::InvalidParameter {
            name: "photons",
            reason: format!("{} exceeds truncation {}", state.photons, self.fock_dim),
        })?;
        let mut v = DVector::zeros(self.total_dim());
        v[idx] = ONE;
        Ok(v)
    }

    fn ensure_same(&self, other: &SpaceLayout) -> Result<()> {
        if self != other {
            return Err(Error::LayoutMismatch {
                left: self.fock_dim,
                right: other.fock_dim,
            });
        }
        Ok(())
    }
}

/// Dense operator on a [`SpaceLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct Op {
    layout: SpaceLayout,
    matrix: DMatrix<C64>,
}

impl Op {
    pub fn from_matrix(layout: SpaceLayout, matrix: DMatrix<C64>) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: format!(
                    "expected {d}x{d}, got {}x{}",
                    matrix.nrows(),
                    matrix.ncols()
                ),
            });
        }
        Ok(Self { layout, matrix })
    }

    pub fn zero(layout: SpaceLayout) -> Self {
        let d = layout.total_dim();
        Self {
            layout,
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let d = layout.total_dim();
        Self {
            layout,
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dagger(&self) -> Op {
        Op {
            layout: self.layout,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, c: C64) -> Op {
        Op {
            layout: self.layout,
            matrix: &self.matrix * c,
        }
    }

    pub fn scale_re(&self, c: f64) -> Op {
        self.scale(C64::new(c, 0.0))
    }

    pub fn checked_add(&self, other: &Op) -> Result<Op> {
        self.layout.ensure_same(&other.layout)?;
        Ok(Op {
            layout: self.layout,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn checked_sub(&self, other: &Op) -> Result<Op> {
        self.layout.ensure_same(&other.layout)?;
        Ok(Op {
            layout: self.layout,
            matrix: &self.matrix - &other.matrix,
        })
    }

    /// Operator product `self * other`.
    pub fn checked_mul(&self, other: &Op) -> Result<Op> {
        self.layout.ensure_same(&other.layout)?;
        Ok(Op {
            layout: self.layout,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn apply(&self, ket: &DVector<C64>) -> DVector<C64> {
        &self.matrix * ket
    }

    pub fn commutator(&self, other: &Op) -> Result<Op> {
        self.checked_mul(other)?
            .checked_sub(&other.checked_mul(self)?)
    }

    /// Largest elementwise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Op) -> Result<f64> {
        self.layout.ensure_same(&other.layout)?;
        Ok(max_abs_diff(&self.matrix, &other.matrix))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs_diff(&self.matrix, &self.matrix.adjoint()) <= tol
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

impl Add for &Op {
    type Output = Op;

    /// Panics when the layouts differ; use [`Op::checked_add`] to get an error instead.
    fn add(self, rhs: &Op) -> Op {
        self.checked_add(rhs).expect("operator layouts differ")
    }
}

impl Sub for &Op {
    type Output = Op;

    fn sub(self, rhs: &Op) -> Op {
        self.checked_sub(rhs).expect("operator layouts differ")
    }
}

impl Mul for &Op {
    type Output = Op;

    fn mul(self, rhs: &Op) -> Op {
        self.checked_mul(rhs).expect("operator layouts differ")
    }
}

/// Density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: SpaceLayout,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-9;
    pub const HERMITIAN_TOL: f64 = 1e-9;
    pub const EIGEN_TOL: f64 = 1e-8;

    /// Validates trace, hermiticity and positivity.
    pub fn new(layout: SpaceLayout, matrix: DMatrix<C64>) -> Result<Self> {
        let rho = Self::new_unchecked(layout, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape-checked but otherwise trusted. Used for solver output that is
    /// validated by the caller.
    pub(crate) fn new_unchecked(layout: SpaceLayout, matrix: DMatrix<C64>) -> Result<Self> {
        let op = Op::from_matrix(layout, matrix)?;
        Ok(Self {
            layout,
            matrix: op.matrix,
        })
    }

    pub fn pure(layout: SpaceLayout, ket: &DVector<C64>) -> Result<Self> {
        if ket.len() != layout.total_dim() {
            return Err(Error::NotADensityMatrix(format!(
                "state vector has length {}, expected {}",
                ket.len(),
                layout.total_dim()
            )));
        }
        let norm = ket.norm();
        if norm == 0.0 {
            return Err(Error::NotADensityMatrix("zero state vector".into()));
        }
        let psi = ket / C64::new(norm, 0.0);
        Self::new(layout, &psi * psi.adjoint())
    }

    pub fn basis(layout: SpaceLayout, state: BasisState) -> Result<Self> {
        Self::pure(layout, &layout.ket(state)?)
    }

    /// `|0, g, g><0, g, g|`.
    pub fn ground(layout: SpaceLayout) -> Self {
        let d = layout.total_dim();
        let mut m = DMatrix::zeros(d, d);
        m[(0, 0)] = ONE;
        Self { layout, matrix: m }
    }

    /// Convex combination of states on one layout; weights are normalized.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::NotADensityMatrix("empty mixture".into()))?;
        let layout = first.layout;
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if total <= 0.0 || parts.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::NotADensityMatrix(
                "mixture weights must be non-negative".into(),
            ));
        }
        let d = layout.total_dim();
        let mut m = DMatrix::zeros(d, d);
        for (w, rho) in parts {
            layout.ensure_same(&rho.layout)?;
            m += &rho.matrix * C64::new(w / total, 0.0);
        }
        Self::new(layout, m)
    }

    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::NotADensityMatrix(format!("trace is {tr}")));
        }
        let herm = self.hermiticity_error();
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::NotADensityMatrix(format!(
                "hermiticity error {herm:.3e}"
            )));
        }
        let min = self.min_eigenvalue();
        if min < -Self::EIGEN_TOL {
            return Err(Error::NotADensityMatrix(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// `0.5 * || rho - sigma ||_1`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.layout.ensure_same(&other.layout)?;
        let diff = &self.matrix - &other.matrix;
        Ok(0.5
            * hermitian_eigenvalues(&diff)
                .iter()
                .map(|x| x.abs())
                .sum::<f64>())
    }
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `Tr(op * rho)`.
pub fn expectation(op: &Op, rho: &DensityMatrix) -> Result<C64> {
    op.layout.ensure_same(&rho.layout)?;
    let (a, r) = (&op.matrix, &rho.matrix);
    let d = a.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for k in 0..d {
            acc += a[(i, k)] * r[(k, i)];
        }
    }
    Ok(acc)
}

/// Cavity annihilation operator `a ⊗ 1 ⊗ 1`, truncated at `fock_dim - 1` photons.
pub fn annihilator(layout: SpaceLayout) -> Op {
    let mut op = Op::zero(layout);
    for state in layout.states().filter(|s| s.photons > 0) {
        let from = layout.index(state).unwrap();
        let to = layout
            .index(BasisState {
                photons: state.photons - 1,
                ..state
            })
            .unwrap();
        op.matrix[(to, from)] = C64::new((state.photons as f64).sqrt(), 0.0);
    }
    op
}

pub fn creator(layout: SpaceLayout) -> Op {
    annihilator(layout).dagger()
}

pub fn number(layout: SpaceLayout) -> Op {
    let a = annihilator(layout);
    &a.dagger() * &a
}

/// Lowering operator `|g><e|` of dot 1 or dot 2.
pub fn lowering(layout: SpaceLayout, which: usize) -> Result<Op> {
    if which != 1 && which != 2 {
        return Err(Error::InvalidDotIndex(which));
    }
    let mut op = Op::zero(layout);
    for state in layout.states() {
        let excited = if which == 1 { state.dot1 } else { state.dot2 };
        if excited != Level::Excited {
            continue;
        }
        let lowered = if which == 1 {
            BasisState {
                dot1: Level::Ground,
                ..state
            }
        } else {
            BasisState {
                dot2: Level::Ground,
                ..state
            }
        };
        let (from, to) = (layout.index(state).unwrap(), layout.index(lowered).unwrap());
        op.matrix[(to, from)] = ONE;
    }
    Ok(op)
}

/// `(σ1 + σ2) / √2`.
pub fn symmetric_lowering(layout: SpaceLayout) -> Op {
    collective(layout, 1.0)
}

/// `(σ1 − σ2) / √2`.
pub fn antisymmetric_lowering(layout: SpaceLayout) -> Op {
    collective(layout, -1.0)
}

fn collective(layout: SpaceLayout, sign: f64) -> Op {
    let s1 = lowering(layout, 1).expect("dot 1 exists");
    let s2 = lowering(layout, 2).expect("dot 2 exists");
    (&s1 + &s2.scale_re(sign)).scale_re(std::f64::consts::FRAC_1_SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Level::{Excited as E, Ground as G};

    fn layout(n: usize) -> SpaceLayout {
        SpaceLayout::new(n).unwrap()
    }

    fn ket(l: SpaceLayout, n: usize, s1: Level, s2: Level) -> DVector<C64> {
        l.ket(BasisState::new(n, s1, s2)).unwrap()
    }

    fn close(a: &DVector<C64>, b: &DVector<C64>) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn rejects_tiny_truncation() {
        assert_eq!(SpaceLayout::new(1), Err(Error::InvalidFockDim(1)));
    }

    #[test]
    fn index_mapping_is_bijective() {
        let l = layout(5);
        assert_eq!(l.total_dim(), 20);
        for i in 0..l.total_dim() {
            assert_eq!(l.index(l.state(i).unwrap()), Some(i));
        }
        assert_eq!(l.index(BasisState::new(1, E, G)), Some(6));
        assert_eq!(l.state(20), None);
    }

    #[test]
    fn annihilator_matrix_elements() {
        let l = layout(3);
        let a = annihilator(l);
        assert!(close(&a.apply(&ket(l, 1, G, G)), &ket(l, 0, G, G)));
        assert!(a.apply(&ket(l, 0, G, G)).norm() < 1e-15);
        let two = a.apply(&ket(l, 2, E, G));
        assert!(close(&two, &(ket(l, 1, E, G) * C64::new(2f64.sqrt(), 0.0))));
    }

    #[test]
    fn commutator_is_identity_below_truncation_edge() {
        let l = layout(3);
        let a = annihilator(l);
        let comm = a.commutator(&a.dagger()).unwrap();
        for i in 0..l.total_dim() {
            for j in 0..l.total_dim() {
                let n = l.state(i).unwrap().photons;
                let expected = if i == j {
                    if n == 2 {
                        -2.0
                    } else {
                        1.0
                    }
                } else {
                    0.0
                };
                assert!((comm.matrix()[(i, j)] - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn lowering_properties() {
        let l = layout(3);
        let s1 = lowering(l, 1).unwrap();
        let s2 = lowering(l, 2).unwrap();
        assert!(close(&s1.apply(&ket(l, 0, E, G)), &ket(l, 0, G, G)));
        assert!((&s1 * &s1).matrix().iter().all(|x| x.norm() == 0.0));
        assert!(s1
            .commutator(&s2)
            .unwrap()
            .matrix()
            .iter()
            .all(|x| x.norm() < 1e-15));
        assert_eq!(lowering(l, 3), Err(Error::InvalidDotIndex(3)));
        assert_eq!(lowering(l, 0), Err(Error::InvalidDotIndex(0)));
    }

    #[test]
    fn collective_lowering() {
        let l = layout(2);
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let plus = (ket(l, 0, E, G) + ket(l, 0, G, E)) * h;
        let sym = symmetric_lowering(l);
        let anti = antisymmetric_lowering(l);
        assert!(close(&sym.apply(&plus), &ket(l, 0, G, G)));
        assert!(anti.apply(&plus).norm() < 1e-15);
        assert!(close(&sym.apply(&ket(l, 0, E, E)), &plus));
    }

    #[test]
    fn expectation_examples() {
        let l = layout(3);
        let vac = DensityMatrix::ground(l);
        let id = Op::identity(l);
        assert!((expectation(&id, &vac).unwrap() - ONE).norm() < 1e-15);
        assert!(expectation(&number(l), &vac).unwrap().norm() < 1e-15);

        let eg = DensityMatrix::basis(l, BasisState::new(0, E, G)).unwrap();
        let mix = DensityMatrix::mixture(&[(0.5, &eg), (0.5, &vac)]).unwrap();
        let s1 = lowering(l, 1).unwrap();
        let pop = expectation(&(&s1.dagger() * &s1), &mix).unwrap();
        assert!((pop.re - 0.5).abs() < 1e-15 && pop.im.abs() < 1e-15);
    }

    #[test]
    fn mismatched_layouts_are_rejected() {
        let a = annihilator(layout(3));
        let b = annihilator(layout(4));
        assert_eq!(
            a.checked_mul(&b),
            Err(Error::LayoutMismatch { left: 3, right: 4 })
        );
        assert!(expectation(&a, &DensityMatrix::ground(layout(4))).is_err());
    }

    #[test]
    fn number_operator_spectrum() {
        let l = layout(4);
        let n = number(l);
        for i in 0..l.total_dim() {
            for j in 0..l.total_dim() {
                let want = if i == j { (i / 4) as f64 } else { 0.0 };
                assert!((n.matrix()[(i, j)] - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
        for which in [1, 2] {
            let s = lowering(l, which).unwrap();
            let proj = &s.dagger() * &s;
            for ev in hermitian_eigenvalues(proj.matrix()) {
                assert!(ev.abs() < 1e-12 || (ev - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn density_matrix_validation() {
        let l = layout(2);
        let d = l.total_dim();
        assert!(DensityMatrix::new(l, DMatrix::zeros(d, d)).is_err());
        let mut m = DMatrix::zeros(d, d);
        m[(0, 0)] = C64::new(1.5, 0.0);
        m[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(matches!(
            DensityMatrix::new(l, m),
            Err(Error::NotADensityMatrix(_))
        ));
    }
}
