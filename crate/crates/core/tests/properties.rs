//! Randomized structural properties of operators, generators and observables.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use subradiance::dynamics::{build_liouvillian, propagate, steady_state, unvectorize, vectorize};
use subradiance::effective::munu_analytic;
use subradiance::experiments::reflectivity;
use subradiance::model::{hamiltonian, Params};
use subradiance::qspace::{annihilator, lowering, DensityMatrix, Op, SpaceLayout};

fn params_strategy() -> impl Strategy<Value = Params> {
    (
        0.0..40.0f64,
        -30.0..30.0f64,
        -40.0..40.0f64,
        -60.0..60.0f64,
        -60.0..60.0f64,
        -13.0..-8.0f64,
        0.0..1.0f64,
        2usize..5,
    )
        .prop_map(|(g, delta, omega12, wc, wl, log_p, x, n)| {
            let mut p = Params::baseline()
                .with_detuning(delta)
                .with_power(10f64.powf(log_p))
                .with_fock_dim(n);
            p.g = g;
            p.omega12 = omega12;
            p.gamma12 = x * p.gamma;
            p.omega_c = wc;
            p.omega_l = wl;
            p
        })
}

fn complex_matrix(d: usize) -> impl Strategy<Value = DMatrix<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * d)
        .prop_map(move |v| DMatrix::from_iterator(d, d, v.into_iter().map(|(a, b)| C64::new(a, b))))
}

fn ket(d: usize) -> impl Strategy<Value = DVector<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d)
        .prop_filter("nonzero", |v| v.iter().any(|&(a, b)| a * a + b * b > 1e-3))
        .prop_map(move |v| DVector::from_iterator(d, v.into_iter().map(|(a, b)| C64::new(a, b))))
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adjoint_reverses_products(a in complex_matrix(8), b in complex_matrix(8)) {
        let layout = SpaceLayout::new(2).unwrap();
        let a = Op::from_matrix(layout, a).unwrap();
        let b = Op::from_matrix(layout, b).unwrap();
        let lhs = (&a * &b).dagger();
        let rhs = &b.dagger() * &a.dagger();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        prop_assert!(a.dagger().dagger().max_abs_diff(&a).unwrap() == 0.0);
    }

    #[test]
    fn hamiltonian_is_hermitian(p in params_strategy()) {
        let h = hamiltonian(&p, p.layout().unwrap()).unwrap();
        prop_assert!(h.is_hermitian(1e-12));
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity(p in params_strategy(), m in complex_matrix(8)) {
        let p = p.with_fock_dim(2);
        let l = build_liouvillian(&p).unwrap();
        let scale = l.matrix().norm_inf();
        prop_assert!(l.trace_defect() <= 1e-13 * scale);
        let herm = &m + m.adjoint();
        let out = l.apply(&herm);
        prop_assert!(out.trace().norm() <= 1e-12 * scale * max_abs(&herm));
        prop_assert!(max_abs(&(&out - out.adjoint())) <= 1e-12 * scale * max_abs(&herm));
        let v = vectorize(&herm);
        prop_assert_eq!(unvectorize(&v, 8), herm);
    }

    #[test]
    fn steady_state_is_physical(p in params_strategy()) {
        let l = build_liouvillian(&p).unwrap();
        let rho = steady_state(&l).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(rho.hermiticity_error() < 1e-9);
        prop_assert!(rho.min_eigenvalue() > -1e-8);
    }

    #[test]
    fn reflectivity_is_bounded(p in params_strategy()) {
        let r = reflectivity(&p).unwrap();
        prop_assert!((0.0..=1.0 + 1e-6).contains(&r), "R = {}", r);
    }

    #[test]
    fn mode_coefficients_are_normalized_and_monotone(
        d in 0.0..80.0f64, step in 0.01..10.0f64, omega in 1.0..60.0f64,
    ) {
        let (mu, nu) = munu_analytic(d, omega).unwrap();
        prop_assert!((mu * mu + nu * nu - 1.0).abs() < 1e-12);
        let (mu2, nu2) = munu_analytic(d + step, omega).unwrap();
        prop_assert!(mu2 > mu && nu2 < nu);
        let (mu_neg, nu_neg) = munu_analytic(-d, omega).unwrap();
        prop_assert!((mu_neg - mu).abs() < 1e-15 && (nu_neg - nu).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn evolution_contracts_trace_distance(p in params_strategy(), a in ket(8), b in ket(8)) {
        let p = p.with_fock_dim(2);
        let l = build_liouvillian(&p).unwrap();
        let layout = l.layout();
        let ra = DensityMatrix::pure(layout, &a).unwrap();
        let rb = DensityMatrix::pure(layout, &b).unwrap();
        let grid = [0.0, 0.01, 0.1, 1.0];
        let ta = propagate(&l, &ra, &grid).unwrap();
        let tb = propagate(&l, &rb, &grid).unwrap();
        let dist: Vec<f64> = ta.iter().zip(&tb).map(|(x, y)| x.trace_distance(y).unwrap()).collect();
        for w in dist.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-7, "{:?}", dist);
        }
        for rho in &ta {
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn ladder_operators_commute_across_subsystems(n in 2usize..6) {
        let layout = SpaceLayout::new(n).unwrap();
        let a = annihilator(layout);
        let s1 = lowering(layout, 1).unwrap();
        let s2 = lowering(layout, 2).unwrap();
        prop_assert!(a.commutator(&s1).unwrap().max_abs_diff(&Op::zero(layout)).unwrap() == 0.0);
        prop_assert!(s1.commutator(&s2.dagger()).unwrap().max_abs_diff(&Op::zero(layout)).unwrap() == 0.0);
    }
}
