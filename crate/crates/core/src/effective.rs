//! Linear-response eigenmodes of the coupled (σ₁, σ₂, a) amplitudes and the
//! collective quantities derived from them.
//!
//! Valid while both emitters stay close to their ground state.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::linalg::eigen3;
use crate::model::{Emitters, Params};
use crate::qspace::{C64, I};

/// i d/dt (⟨σ₁⟩, ⟨σ₂⟩, ⟨a⟩) = M (⟨σ₁⟩, ⟨σ₂⟩, ⟨a⟩) in µeV.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveMatrix {
    matrix: Matrix3<C64>,
}

impl EffectiveMatrix {
    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.matrix
    }
}

/// Builds M with complex frequencies ω̃ᵢ = ωᵢ − iγ/2 − iPᵢ and
/// ω̃_c = ω_c − iκ/2 + iP_c, emitter exchange Ω₁₂ − iγ₁₂/2 and couplings
/// −ig (emitter rows) and +ig (cavity row).
///
/// With a single emitter, dot 2 keeps its diagonal entry but is decoupled.
pub fn build_effective(params: &Params) -> EffectiveMatrix {
    let g = C64::new(params.g, 0.0);
    let w1 = C64::new(params.omega1, -0.5 * params.gamma - params.pump_dot1);
    let w2 = C64::new(params.omega2, -0.5 * params.gamma - params.pump_dot2);
    let wc = C64::new(params.omega_c, -0.5 * params.kappa() + params.pump_cavity);
    let (x, g2) = match params.emitters {
        Emitters::Two => (C64::new(params.omega12, -0.5 * params.gamma12), g),
        Emitters::One => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
    };
    #[rustfmt::skip]
    let matrix = Matrix3::new(
        w1,      x,       -I * g,
        x,       w2,      -I * g2,
        I * g,   I * g2,  wc,
    );
    EffectiveMatrix { matrix }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeKind {
    PlusLike,
    MinusLike,
    CavityLike,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub kind: ModeKind,
    /// Complex frequency in µeV: real part is the position, −2·Im the width.
    pub frequency: C64,
    /// Unit eigenvector over (σ₁, σ₂, a), phased so that its projection on
    /// the symmetric exciton is real and non-negative.
    pub vector: Vector3<C64>,
}

impl Mode {
    pub fn position(&self) -> f64 {
        self.frequency.re
    }

    pub fn linewidth(&self) -> f64 {
        -2.0 * self.frequency.im
    }

    /// Unnormalized overlaps with (σ₁+σ₂)/√2 and (σ₁−σ₂)/√2.
    fn projections(&self) -> (C64, C64) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        (
            (self.vector[0] + self.vector[1]) * s,
            (self.vector[0] - self.vector[1]) * s,
        )
    }

    fn symmetric_fraction(&self) -> f64 {
        let (s, a) = self.projections();
        let total = s.norm_sqr() + a.norm_sqr();
        if total == 0.0 {
            0.0
        } else {
            s.norm_sqr() / total
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveModes {
    modes: [Mode; 3],
}

impl EffectiveModes {
    pub fn modes(&self) -> &[Mode; 3] {
        &self.modes
    }

    pub fn get(&self, kind: ModeKind) -> &Mode {
        self.modes
            .iter()
            .find(|m| m.kind == kind)
            .expect("every kind is assigned once")
    }

    pub fn plus(&self) -> &Mode {
        self.get(ModeKind::PlusLike)
    }

    pub fn minus(&self) -> &Mode {
        self.get(ModeKind::MinusLike)
    }

    pub fn cavity(&self) -> &Mode {
        self.get(ModeKind::CavityLike)
    }
}

/// Symmetric fractions closer than this count as a tie.
const TIE_TOL: f64 = 1e-6;

/// Diagonalizes M and labels the modes: the largest cavity component marks
/// the cavity-like mode, the larger symmetric content the plus-like one, and
/// ties go to the lower real part as minus-like.
pub fn eigenmodes(m: &EffectiveMatrix) -> Result<EffectiveModes> {
    let eig = eigen3(&m.matrix)?;
    let mut modes: Vec<Mode> = (0..3)
        .map(|k| {
            let mut v = eig.vectors[k];
            let s = v[0] + v[1];
            if s.norm() > 1e-12 {
                v *= s.conj() / s.norm();
            } else {
                // no symmetric content: fix the phase on the antisymmetric part
                let a = v[0] - v[1];
                if a.norm() > 1e-12 {
                    v *= a.conj() / a.norm();
                }
            }
            Mode {
                kind: ModeKind::CavityLike,
                frequency: eig.values[k],
                vector: v,
            }
        })
        .collect();

    let cav = (0..3)
        .max_by(|&a, &b| {
            modes[a].vector[2]
                .norm()
                .total_cmp(&modes[b].vector[2].norm())
        })
        .unwrap();
    let others: Vec<usize> = (0..3).filter(|&k| k != cav).collect();
    let (i, j) = (others[0], others[1]);
    let (fi, fj) = (modes[i].symmetric_fraction(), modes[j].symmetric_fraction());
    let i_is_plus = if (fi - fj).abs() > TIE_TOL {
        fi > fj
    } else {
        modes[i].position() > modes[j].position()
    };
    let (plus, minus) = if i_is_plus { (i, j) } else { (j, i) };
    modes[plus].kind = ModeKind::PlusLike;
    modes[minus].kind = ModeKind::MinusLike;
    let mut it = modes.into_iter();
    let modes = [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
    Ok(EffectiveModes { modes })
}

/// Moduli of the symmetric and antisymmetric content of an excitonic mode,
/// normalized so their squares add to one.
///
/// For the minus-like mode these are (A, B) without dipole coupling and
/// (μ, ν) with it.
pub fn coeffs_from_modes(modes: &EffectiveModes, kind: ModeKind) -> Result<(f64, f64)> {
    if kind == ModeKind::CavityLike {
        return Err(Error::CavityMode);
    }
    let (s, a) = modes.get(kind).projections();
    let norm = (s.norm_sqr() + a.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(Error::CavityMode);
    }
    Ok((s.norm() / norm, a.norm() / norm))
}

/// μ = |δ|/√(δ² + (1+√(1+δ²))²) and ν = (1+√(1+δ²))/√(δ² + (1+√(1+δ²))²)
/// with δ = Δ₁₂/Ω₁₂.
pub fn munu_analytic(delta12: f64, omega12: f64) -> Result<(f64, f64)> {
    if omega12 == 0.0 || !omega12.is_finite() || !delta12.is_finite() {
        return Err(Error::ZeroCoupling);
    }
    let d = (delta12 / omega12).abs();
    let root = 1.0 + (1.0 + d * d).sqrt();
    let norm = (d * d + root * root).sqrt();
    Ok((d / norm, root / norm))
}

/// Collective couplings, rates and critical photon numbers, in µeV where
/// dimensional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveRates {
    pub mu: f64,
    pub nu: f64,
    pub g_minus: f64,
    pub g_plus: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub big_gamma_minus: f64,
    pub big_gamma_plus: f64,
    /// 4g²/κ, the Purcell rate of one emitter.
    pub big_gamma0: f64,
    /// 8g²/κ, the Purcell rate of the resonant symmetric state.
    pub big_gamma_plus_resonant: f64,
    /// γ²/8g².
    pub nc0: f64,
    pub nc_plus: f64,
    pub nc_minus: f64,
    pub nc_plus_dd: f64,
    /// Critical photon numbers with (γ+γ₁₂)/2 in place of γ.
    pub nc_plus_exact: f64,
    pub nc_minus_exact: f64,
    pub nc_plus_dd_exact: f64,
}

/// Uses the analytic μ, ν when Ω₁₂ ≠ 0 and the minus-like eigenmode
/// otherwise. The n_c variants assume γ₁₂ ≃ γ; the `_exact` ones keep the
/// actual γ₁₂.
pub fn collective_rates(params: &Params) -> Result<CollectiveRates> {
    params.validate()?;
    let (mu, nu) = if params.omega12 != 0.0 {
        munu_analytic(params.delta12(), params.omega12)?
    } else {
        coeffs_from_modes(&eigenmodes(&build_effective(params))?, ModeKind::MinusLike)?
    };
    let (g, kappa, gamma) = (params.g, params.kappa(), params.gamma);
    let purcell2 = 8.0 * g * g / kappa;
    let bright = gamma + params.gamma12;
    let nc0 = gamma * gamma / (8.0 * g * g);
    let nc_exact = bright * bright / (16.0 * g * g);
    let (mu2, nu2) = (mu * mu, nu * nu);
    Ok(CollectiveRates {
        mu,
        nu,
        g_minus: mu * std::f64::consts::SQRT_2 * g,
        g_plus: nu * std::f64::consts::SQRT_2 * g,
        gamma_minus: mu2 * bright,
        gamma_plus: nu2 * bright,
        big_gamma_minus: mu2 * purcell2,
        big_gamma_plus: nu2 * purcell2,
        big_gamma0: 4.0 * g * g / kappa,
        big_gamma_plus_resonant: purcell2,
        nc0,
        nc_plus: 2.0 * nc0,
        nc_minus: 2.0 * mu2 * nc0,
        nc_plus_dd: 2.0 * nu2 * nc0,
        nc_plus_exact: nc_exact,
        nc_minus_exact: mu2 * nc_exact,
        nc_plus_dd_exact: nu2 * nc_exact,
    })
}

/// Free-space decay of the dressed excitons split into the symmetric
/// branch, the antisymmetric branch and their cross term, in µeV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionChannels {
    pub symmetric: f64,
    pub antisymmetric: f64,
    pub cross: f64,
}

impl EmissionChannels {
    pub fn entries(&self) -> [(&'static str, f64); 3] {
        [
            ("symmetric", self.symmetric),
            ("antisymmetric", self.antisymmetric),
            ("cross", self.cross),
        ]
    }
}

pub fn emission_decomposition(
    mu: f64,
    nu: f64,
    gamma: f64,
    gamma12: f64,
) -> Result<EmissionChannels> {
    if ((mu * mu + nu * nu) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter {
            name: "mu",
            reason: format!("mu^2 + nu^2 must be 1, got {}", mu * mu + nu * nu),
        });
    }
    let bright = gamma + gamma12;
    Ok(EmissionChannels {
        symmetric: nu * nu * bright,
        antisymmetric: mu * mu * bright,
        cross: mu * nu * bright,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dipole_coupling;

    fn coupled(delta: f64) -> Params {
        let mut p = Params::baseline().with_detuning(delta);
        p.omega12 = 31.0;
        p.gamma12 = dipole_coupling(10.0, 930.0, 3.6, 0.6).unwrap().gamma12;
        p
    }

    #[test]
    fn hermitian_limit_is_diagonal_and_real() {
        let mut p = Params::baseline();
        p.gamma = 0.0;
        p.kappa_left = 0.0;
        p.kappa_right = 0.0;
        p.g = 0.0;
        p.omega1 = 3.0;
        p.omega2 = -1.0;
        p.omega_c = 7.0;
        let m = build_effective(&p);
        assert_eq!(
            *m.matrix(),
            Matrix3::from_diagonal(&Vector3::new(3.0, -1.0, 7.0).map(|x| C64::new(x, 0.0)))
        );
        for mode in eigenmodes(&m).unwrap().modes() {
            assert!(mode.frequency.im.abs() < 1e-12);
        }
    }

    #[test]
    fn exchange_entry_reads_back() {
        let p = coupled(20.0);
        let m = build_effective(&p);
        assert_eq!(m.matrix()[(0, 1)], C64::new(31.0, -0.5 * p.gamma12));
        let sym = build_effective(&Params::baseline());
        assert_eq!(sym.matrix()[(0, 0)], sym.matrix()[(1, 1)]);
        assert_eq!(sym.matrix()[(0, 2)], sym.matrix()[(1, 2)]);
    }

    #[test]
    fn resonant_uncoupled_bright_and_dark() {
        let modes = eigenmodes(&build_effective(&Params::baseline())).unwrap();
        assert!(
            (modes.plus().linewidth() - 16.6).abs() < 0.1 * 16.6,
            "{}",
            modes.plus().linewidth()
        );
        assert!((modes.minus().linewidth() - 0.6).abs() < 1e-9);
        let (b_sym, b_anti) = coeffs_from_modes(&modes, ModeKind::MinusLike).unwrap();
        assert!(b_sym < 1e-12 && (b_anti - 1.0).abs() < 1e-12);
        assert!(matches!(
            coeffs_from_modes(&modes, ModeKind::CavityLike),
            Err(Error::CavityMode)
        ));
    }

    #[test]
    fn detuned_uncoupled_widths_near_purcell_rate() {
        let modes = eigenmodes(&build_effective(&Params::baseline().with_detuning(20.0))).unwrap();
        for m in [modes.plus(), modes.minus()] {
            assert!(
                (m.linewidth() - 8.0).abs() < 0.15 * 8.0,
                "{}",
                m.linewidth()
            );
        }
    }

    #[test]
    fn analytic_coefficients() {
        assert_eq!(munu_analytic(0.0, 31.0).unwrap(), (0.0, 1.0));
        let (mu, nu) = munu_analytic(20.0, 31.0).unwrap();
        assert!((2.0 * mu * mu - 0.16).abs() < 0.05 * 0.16);
        assert!((2.0 * nu * nu - 1.8).abs() < 0.05 * 1.8);
        let (mu, nu) = munu_analytic(1e9, 31.0).unwrap();
        assert!((mu - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6 && (nu - mu).abs() < 1e-6);
        assert!(matches!(munu_analytic(1.0, 0.0), Err(Error::ZeroCoupling)));
    }

    #[test]
    fn numeric_matches_analytic_with_dipole_coupling() {
        for k in 0..=50 {
            let delta = k as f64;
            let (mu_a, nu_a) = munu_analytic(delta, 31.0).unwrap();
            let modes = eigenmodes(&build_effective(&coupled(delta))).unwrap();
            let (mu_n, nu_n) = coeffs_from_modes(&modes, ModeKind::MinusLike).unwrap();
            assert!(
                (mu_a - mu_n).abs() < 0.02 && (nu_a - nu_n).abs() < 0.02,
                "delta {delta}: {mu_n} vs {mu_a}"
            );
        }
    }

    #[test]
    fn excitonic_split() {
        for delta in [5.0, 20.0, 40.0] {
            let modes = eigenmodes(&build_effective(&coupled(delta))).unwrap();
            let split = modes.plus().position() - modes.minus().position();
            let want = 2.0 * (delta * delta + 31.0f64 * 31.0).sqrt();
            assert!((split - want).abs() < 0.05 * want, "{split} vs {want}");
        }
    }

    #[test]
    fn rates_of_default_preset() {
        let r = collective_rates(&Params::baseline()).unwrap();
        assert!((r.big_gamma0 - 8.0).abs() < 1e-12);
        assert!((r.nc0 - 1.125e-4).abs() < 1e-15);
        assert!((r.nc_plus - 2.0 * r.nc0).abs() < 1e-18);
        let r = collective_rates(&coupled(20.0)).unwrap();
        // μ² from the closed form times 8g²/κ = 16 µeV
        let (mu, _) = munu_analytic(20.0, 31.0).unwrap();
        assert!((r.big_gamma_minus - 16.0 * mu * mu).abs() < 1e-12);
        assert!((r.big_gamma_minus - 1.28).abs() < 0.03);
        assert!((r.mu * r.mu + r.nu * r.nu - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decomposition_branches() {
        let e = emission_decomposition(0.0, 1.0, 0.6, 0.59).unwrap();
        assert_eq!((e.antisymmetric, e.cross), (0.0, 0.0));
        assert!((e.symmetric - 1.19).abs() < 1e-12);
        let (mu, nu) = munu_analytic(20.0, 31.0).unwrap();
        let e = emission_decomposition(mu, nu, 0.6, 0.6).unwrap();
        assert!((e.symmetric + e.antisymmetric - 1.2).abs() < 1e-12);
        assert!((e.antisymmetric - 2.0 * mu * mu * 0.6).abs() < 1e-12);
        assert!((e.antisymmetric - 0.096).abs() < 0.005);
        assert!(emission_decomposition(0.5, 0.5, 0.6, 0.0).is_err());
    }
}
