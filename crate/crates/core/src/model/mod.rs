//! Physical parameters and the ingredients of the master equation:
//! the driven two-emitter Hamiltonian in the laser frame and its Lindblad
//! channels.

pub mod presets;
pub mod units;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qspace::{
    annihilator, antisymmetric_lowering, lowering, symmetric_lowering, Op, SpaceLayout, C64, I,
};

pub use presets::{preset, preset_names};

/// Largest cavity truncation the solvers accept (total dimension 80).
pub const MAX_FOCK_DIM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Emitters {
    /// Only dot 1 couples to the cavity; dot 2 stays in its ground state.
    One,
    Two,
}

/// Every energy and rate in µeV; frequencies are absolute, relative to an
/// arbitrary common reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub g: f64,
    pub kappa_left: f64,
    pub kappa_right: f64,
    pub kappa_other: f64,
    pub gamma: f64,
    pub gamma_star: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega_c: f64,
    pub omega_l: f64,
    pub omega12: f64,
    pub gamma12: f64,
    /// Drive power in W.
    pub p_laser: f64,
    pub lambda0_nm: f64,
    pub n_medium: f64,
    pub fock_dim: usize,
    pub emitters: Emitters,
    /// Incoherent pump rates on dot 1, dot 2 and the cavity (zero unless an
    /// emission spectrum is being computed).
    pub pump_dot1: f64,
    pub pump_dot2: f64,
    pub pump_cavity: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self::baseline()
    }
}

impl Params {
    /// {g, κ, γ} = {20, 200, 0.6} µeV, symmetric cavity, identical
    /// uncoupled dots on cavity and laser resonance, 1 pW drive.
    pub fn baseline() -> Self {
        let mut p = Self {
            g: 20.0,
            kappa_left: 100.0,
            kappa_right: 100.0,
            kappa_other: 0.0,
            gamma: 0.6,
            gamma_star: 0.0,
            omega1: 0.0,
            omega2: 0.0,
            omega_c: 0.0,
            omega_l: 0.0,
            omega12: 0.0,
            gamma12: 0.0,
            p_laser: 1e-12,
            lambda0_nm: 930.0,
            n_medium: 3.6,
            fock_dim: 2,
            emitters: Emitters::Two,
            pump_dot1: 0.0,
            pump_dot2: 0.0,
            pump_cavity: 0.0,
        };
        p.fock_dim = p.suggested_fock_dim();
        p
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_left + self.kappa_right + self.kappa_other
    }

    /// Δ₁₂ = (ω₁ − ω₂)/2.
    pub fn delta12(&self) -> f64 {
        0.5 * (self.omega1 - self.omega2)
    }

    pub fn mean_dot_frequency(&self) -> f64 {
        0.5 * (self.omega1 + self.omega2)
    }

    /// Places the dots at mean ± Δ₁₂ keeping their mean frequency.
    pub fn with_detuning(mut self, delta12: f64) -> Self {
        let mean = self.mean_dot_frequency();
        self.omega1 = mean + delta12;
        self.omega2 = mean - delta12;
        self
    }

    pub fn with_dipole(mut self, rates: DipoleRates) -> Self {
        self.omega12 = rates.omega12;
        self.gamma12 = rates.gamma12;
        self
    }

    pub fn with_power(mut self, p_laser: f64) -> Self {
        self.p_laser = p_laser;
        self
    }

    pub fn with_fock_dim(mut self, fock_dim: usize) -> Self {
        self.fock_dim = fock_dim;
        self
    }

    /// Cavity and laser both at `omega`.
    pub fn tuned_to(mut self, omega: f64) -> Self {
        self.omega_c = omega;
        self.omega_l = omega;
        self
    }

    pub fn single_emitter(mut self) -> Self {
        self.emitters = Emitters::One;
        self.omega12 = 0.0;
        self.gamma12 = 0.0;
        self
    }

    pub fn photon_energy_ev(&self) -> f64 {
        units::photon_energy_ev(self.lambda0_nm)
    }

    /// Drive amplitude E_p in µeV.
    pub fn pump_amplitude(&self) -> Result<f64> {
        pump_amplitude(self.p_laser, self.kappa(), self.photon_energy_ev())
    }

    /// Input amplitude α_in with E_p = √κ_left · α_in (units of √µeV).
    pub fn input_amplitude(&self) -> Result<f64> {
        if self.kappa_left <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "kappa_left",
                reason: "drive enters through the left mirror, which needs kappa_left > 0".into(),
            });
        }
        Ok(self.pump_amplitude()? / self.kappa_left.sqrt())
    }

    /// Truncation that holds the empty-cavity photon distribution at this
    /// drive, `⌈n̄ + 6√n̄ + 2⌉` with n̄ = (2E_p/κ)², clamped to [3, 20].
    pub fn suggested_fock_dim(&self) -> usize {
        let n0 = match self.pump_amplitude() {
            Ok(ep) if self.kappa() > 0.0 => (2.0 * ep / self.kappa()).powi(2),
            _ => 0.0,
        };
        ((n0 + 6.0 * n0.sqrt() + 2.0).ceil() as usize).clamp(3, MAX_FOCK_DIM)
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("g", self.g),
            ("kappa_left", self.kappa_left),
            ("kappa_right", self.kappa_right),
            ("kappa_other", self.kappa_other),
            ("gamma", self.gamma),
            ("gamma_star", self.gamma_star),
            ("p_laser", self.p_laser),
            ("pump_dot1", self.pump_dot1),
            ("pump_dot2", self.pump_dot2),
            ("pump_cavity", self.pump_cavity),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and >= 0, got {v}"),
                });
            }
        }
        let freqs = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("omega_c", self.omega_c),
            ("omega_l", self.omega_l),
            ("omega12", self.omega12),
            ("gamma12", self.gamma12),
        ];
        for (name, v) in freqs {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        if self.gamma12.abs() > self.gamma {
            return Err(Error::InvalidParameter {
                name: "gamma12",
                reason: format!(
                    "|gamma12| = {} exceeds gamma = {}",
                    self.gamma12.abs(),
                    self.gamma
                ),
            });
        }
        if self.kappa() <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: "total cavity loss must be > 0".into(),
            });
        }
        if !(self.lambda0_nm > 0.0) || !(self.n_medium > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda0_nm",
                reason: "wavelength and refractive index must be > 0".into(),
            });
        }
        if self.fock_dim < 2 || self.fock_dim > MAX_FOCK_DIM {
            return Err(Error::InvalidParameter {
                name: "fock_dim",
                reason: format!("must lie in [2, {MAX_FOCK_DIM}], got {}", self.fock_dim),
            });
        }
        if self.emitters == Emitters::One && (self.omega12 != 0.0 || self.gamma12 != 0.0) {
            return Err(Error::InvalidParameter {
                name: "emitters",
                reason: "a single emitter has no dipole-dipole partner".into(),
            });
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<SpaceLayout> {
        SpaceLayout::new(self.fock_dim)
    }

    /// Every field as (name, value) in a fixed order, for run metadata.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let emitters = match self.emitters {
            Emitters::One => "one",
            Emitters::Two => "two",
        };
        vec![
            ("g_ueV", fmt_f64(self.g)),
            ("kappa_left_ueV", fmt_f64(self.kappa_left)),
            ("kappa_right_ueV", fmt_f64(self.kappa_right)),
            ("kappa_other_ueV", fmt_f64(self.kappa_other)),
            ("gamma_ueV", fmt_f64(self.gamma)),
            ("gamma_star_ueV", fmt_f64(self.gamma_star)),
            ("omega1_ueV", fmt_f64(self.omega1)),
            ("omega2_ueV", fmt_f64(self.omega2)),
            ("omega_c_ueV", fmt_f64(self.omega_c)),
            ("omega_l_ueV", fmt_f64(self.omega_l)),
            ("omega12_ueV", fmt_f64(self.omega12)),
            ("gamma12_ueV", fmt_f64(self.gamma12)),
            ("p_laser_W", fmt_f64(self.p_laser)),
            ("lambda0_nm", fmt_f64(self.lambda0_nm)),
            ("n_medium", fmt_f64(self.n_medium)),
            ("fock_dim", self.fock_dim.to_string()),
            ("emitters", emitters.to_string()),
            ("pump_dot1_ueV", fmt_f64(self.pump_dot1)),
            ("pump_dot2_ueV", fmt_f64(self.pump_dot2)),
            ("pump_cavity_ueV", fmt_f64(self.pump_cavity)),
        ]
    }
}

/// Twelve significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.is_finite() {
        format!("{v:.11e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleRates {
    pub omega12: f64,
    pub gamma12: f64,
}

/// F(x) = −(3/4) e^{ix} [1/x + i/x² − 1/x³] for parallel dipoles.
pub fn dipole_kernel(x: f64) -> Complex64 {
    let bracket = Complex64::new(1.0 / x - 1.0 / x.powi(3), 1.0 / (x * x));
    Complex64::from_polar(1.0, x) * bracket * -0.75
}

/// Coherent and incoherent dipole-dipole rates of two parallel dipoles a
/// distance `d_nm` apart in a medium of index `n_medium`.
///
/// Ω₁₂ = Re{γ F(kd)} and γ₁₂ = −2 Im{γ F(kd)}, so that γ₁₂ → γ as kd → 0.
pub fn dipole_coupling(
    d_nm: f64,
    lambda0_nm: f64,
    n_medium: f64,
    gamma: f64,
) -> Result<DipoleRates> {
    if !(d_nm > 0.0) {
        return Err(Error::InvalidParameter {
            name: "distance",
            reason: format!("must be > 0, got {d_nm}"),
        });
    }
    if !(lambda0_nm > 0.0) || !(n_medium > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lambda0_nm",
            reason: "wavelength and refractive index must be > 0".into(),
        });
    }
    let k = 2.0 * std::f64::consts::PI * n_medium / lambda0_nm;
    let f = dipole_kernel(k * d_nm) * gamma;
    let rates = DipoleRates {
        omega12: f.re,
        gamma12: -2.0 * f.im,
    };
    if !rates.omega12.is_finite() || !rates.gamma12.is_finite() {
        return Err(Error::InvalidParameter {
            name: "distance",
            reason: format!("kd = {} gives non-finite rates", k * d_nm),
        });
    }
    Ok(rates)
}

/// E_p = ħ √((κ/2ħ) · P/(ħω_L)) in µeV, with `kappa` in µeV, `p_laser` in W
/// and the photon energy in eV.
pub fn pump_amplitude(p_laser: f64, kappa: f64, photon_energy_ev: f64) -> Result<f64> {
    if !(p_laser >= 0.0) || !p_laser.is_finite() {
        return Err(Error::InvalidParameter {
            name: "p_laser",
            reason: format!("must be >= 0, got {p_laser}"),
        });
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter {
            name: "kappa",
            reason: format!("must be > 0, got {kappa}"),
        });
    }
    if !(photon_energy_ev > 0.0) {
        return Err(Error::InvalidParameter {
            name: "photon_energy",
            reason: format!("must be > 0, got {photon_energy_ev}"),
        });
    }
    let kappa_rate = kappa * 1e-6 / units::HBAR_EV_S;
    let flux = units::photon_flux(p_laser, photon_energy_ev);
    Ok(units::HBAR_EV_S * (0.5 * kappa_rate * flux).sqrt() * 1e6)
}

fn check_layout(params: &Params, layout: SpaceLayout) -> Result<()> {
    if params.fock_dim != layout.fock_dim() {
        return Err(Error::LayoutMismatch {
            left: params.fock_dim,
            right: layout.fock_dim(),
        });
    }
    Ok(())
}

/// Laser-frame Hamiltonian
///
/// ```text
/// H = Σᵢ (ωᵢ − ω_L) σᵢ⁺σᵢ + (ω_c − ω_L) a†a + i g (a† Σᵢσᵢ − a Σᵢσᵢ⁺)
///     + Ω₁₂ (σ₁⁺σ₂ + σ₁σ₂⁺) − i E_p (a† − a)
/// ```
pub fn hamiltonian(params: &Params, layout: SpaceLayout) -> Result<Op> {
    params.validate()?;
    check_layout(params, layout)?;
    let a = annihilator(layout);
    let ad = a.dagger();
    let s1 = lowering(layout, 1)?;
    let s2 = lowering(layout, 2)?;
    let wl = params.omega_l;

    let mut h = (&s1.dagger() * &s1).scale_re(params.omega1 - wl);
    h = &h + &(&ad * &a).scale_re(params.omega_c - wl);

    let coupled = match params.emitters {
        Emitters::Two => {
            h = &h + &(&s2.dagger() * &s2).scale_re(params.omega2 - wl);
            let exchange = &(&s1.dagger() * &s2) + &(&s1 * &s2.dagger());
            h = &h + &exchange.scale_re(params.omega12);
            &s1 + &s2
        }
        Emitters::One => s1.clone(),
    };
    let jc = &(&ad * &coupled) - &(&a * &coupled.dagger());
    h = &h + &jc.scale(I * params.g);

    let ep = params.pump_amplitude()?;
    h = &h + &(&ad - &a).scale(-I * ep);
    Ok(h)
}

/// A Lindblad channel `rate · L(op)` with its rate in µeV.
#[derive(Debug, Clone)]
pub struct Channel {
    pub label: String,
    pub rate: f64,
    pub op: Op,
}

impl Channel {
    pub fn new(label: impl Into<String>, rate: f64, op: Op) -> Self {
        Self {
            label: label.into(),
            rate,
            op,
        }
    }
}

/// κ L(a), (γ+γ₁₂) L((σ₁+σ₂)/√2), (γ−γ₁₂) L((σ₁−σ₂)/√2), then γ* L(σᵢ⁺σᵢ)
/// when dephasing is on and incoherent pumps L(σᵢ⁺), L(a†) when set.
pub fn collapse_ops(params: &Params, layout: SpaceLayout) -> Result<Vec<Channel>> {
    params.validate()?;
    check_layout(params, layout)?;
    let plus_rate = params.gamma + params.gamma12;
    let minus_rate = params.gamma - params.gamma12;
    for (name, rate) in [("symmetric", plus_rate), ("antisymmetric", minus_rate)] {
        if rate < 0.0 {
            return Err(Error::NegativeRate {
                channel: name.into(),
                rate,
            });
        }
    }
    let a = annihilator(layout);
    let mut channels = vec![
        Channel::new("cavity", params.kappa(), a.clone()),
        Channel::new("symmetric", plus_rate, symmetric_lowering(layout)),
        Channel::new("antisymmetric", minus_rate, antisymmetric_lowering(layout)),
    ];
    if params.gamma_star > 0.0 {
        for which in [1, 2] {
            let s = lowering(layout, which)?;
            channels.push(Channel::new(
                format!("dephasing{which}"),
                params.gamma_star,
                &s.dagger() * &s,
            ));
        }
    }
    for (which, rate) in [(1, params.pump_dot1), (2, params.pump_dot2)] {
        if rate > 0.0 {
            channels.push(Channel::new(
                format!("pump_dot{which}"),
                rate,
                lowering(layout, which)?.dagger(),
            ));
        }
    }
    if params.pump_cavity > 0.0 {
        channels.push(Channel::new("pump_cavity", params.pump_cavity, a.dagger()));
    }
    Ok(channels)
}

/// Reflected field on the driven mirror, a_out = √κ_left · a + α_in, and α_in.
///
/// With the drive term −iE_p(a† − a) the empty symmetric cavity on
/// resonance has ⟨a⟩ = −2E_p/κ, so the input adds with a plus sign for the
/// reflected field to vanish there.
pub fn reflected_field(params: &Params, layout: SpaceLayout) -> Result<(Op, f64)> {
    check_layout(params, layout)?;
    let alpha = params.input_amplitude()?;
    let a = annihilator(layout);
    let out =
        &a.scale_re(params.kappa_left.sqrt()) + &Op::identity(layout).scale(C64::new(alpha, 0.0));
    Ok((out, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspace::{BasisState, Level};

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn dipole_rates_at_ten_nanometres() {
        let r = dipole_coupling(10.0, 930.0, 3.6, 0.6).unwrap();
        assert!(close(r.omega12, 31.0, 0.03), "omega12 = {}", r.omega12);
        assert!(r.gamma12 / 0.6 > 0.98 && r.gamma12 <= 0.6);
    }

    #[test]
    fn dipole_rates_vanish_far_apart() {
        let r = dipole_coupling(100.0 * 930.0, 930.0, 3.6, 0.6).unwrap();
        assert!(r.omega12.abs() < 1e-3 * 0.6);
        assert!(r.gamma12.abs() < 1e-1 * 0.6);
    }

    #[test]
    fn small_distance_limits() {
        // Series of F about x = 0: Re F ≈ 3/(4x³) + 3/(8x) + ..., Im F → −1/2 + x²/5.
        let gamma = 0.6;
        let k = 2.0 * std::f64::consts::PI * 3.6 / 930.0;
        let d = 0.01 / k;
        let r = dipole_coupling(d, 930.0, 3.6, gamma).unwrap();
        let ratio = r.gamma12 / gamma;
        assert!((0.99..=1.0).contains(&ratio), "ratio {ratio}");
        for x in [0.01, 0.05, 0.09] {
            let r = dipole_coupling(x / k, 930.0, 3.6, gamma).unwrap();
            let leading = gamma * 3.0 / (4.0 * x * x * x);
            assert!(close(r.omega12, leading, 0.01), "x = {x}");
        }
    }

    #[test]
    fn dipole_rejects_bad_distance() {
        assert!(dipole_coupling(0.0, 930.0, 3.6, 0.6).is_err());
        assert!(dipole_coupling(-1.0, 930.0, 3.6, 0.6).is_err());
    }

    #[test]
    fn pump_amplitude_values() {
        let e = pump_amplitude(1e-9, 200.0, 1.3332).unwrap();
        // ħ √(κ/2ħ · P/ħω): κ/ħ = 3.0385e11 s⁻¹, P/ħω = 4.6816e9 s⁻¹ → 17.55 µeV
        assert!((e - 17.55).abs() < 0.05, "{e}");
        assert_eq!(pump_amplitude(0.0, 200.0, 1.3332).unwrap(), 0.0);
        let big = pump_amplitude(1e-7, 200.0, 1.3332).unwrap();
        assert!(close(big, 10.0 * e, 1e-12));
        assert!(pump_amplitude(1e-9, 0.0, 1.3332).is_err());
        assert!(pump_amplitude(-1e-9, 200.0, 1.3332).is_err());
    }

    #[test]
    fn hamiltonian_collective_coupling() {
        let p = Params::baseline().with_power(0.0).with_fock_dim(3);
        let l = p.layout().unwrap();
        let h = hamiltonian(&p, l).unwrap();
        assert!(h.is_hermitian(1e-12));
        let plus = (l
            .ket(BasisState::new(0, Level::Excited, Level::Ground))
            .unwrap()
            + l.ket(BasisState::new(0, Level::Ground, Level::Excited))
                .unwrap())
            * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let one = l
            .ket(BasisState::new(1, Level::Ground, Level::Ground))
            .unwrap();
        let elem = (one.adjoint() * h.apply(&plus))[(0, 0)];
        assert!((elem.norm() - 2f64.sqrt() * 20.0).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_diagonal_without_coupling() {
        let mut p = Params::baseline().with_power(0.0).with_fock_dim(3);
        p.g = 0.0;
        p.omega1 = 5.0;
        p.omega2 = -3.0;
        p.omega_c = 2.0;
        p.omega_l = 1.0;
        let l = p.layout().unwrap();
        let h = hamiltonian(&p, l).unwrap();
        for (i, s) in l.states().enumerate() {
            let mut want = s.photons as f64 * (p.omega_c - p.omega_l);
            if s.dot1 == Level::Excited {
                want += p.omega1 - p.omega_l;
            }
            if s.dot2 == Level::Excited {
                want += p.omega2 - p.omega_l;
            }
            for j in 0..l.total_dim() {
                let expect = if i == j { want } else { 0.0 };
                assert!((h.matrix()[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hamiltonian_exchange_element() {
        let mut p = Params::baseline().with_fock_dim(2);
        p.omega12 = 31.0;
        let l = p.layout().unwrap();
        let h = hamiltonian(&p, l).unwrap();
        let eg = l
            .index(BasisState::new(0, Level::Excited, Level::Ground))
            .unwrap();
        let ge = l
            .index(BasisState::new(0, Level::Ground, Level::Excited))
            .unwrap();
        assert!((h.matrix()[(eg, ge)] - C64::new(31.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn hamiltonian_layout_mismatch() {
        let p = Params::baseline().with_fock_dim(3);
        assert!(matches!(
            hamiltonian(&p, SpaceLayout::new(4).unwrap()),
            Err(Error::LayoutMismatch { .. })
        ));
    }

    #[test]
    fn collapse_channel_rates() {
        let mut p = Params::baseline().with_fock_dim(2);
        let l = p.layout().unwrap();
        let ch = collapse_ops(&p, l).unwrap();
        assert_eq!(ch.len(), 3);
        assert_eq!(ch[1].rate, 0.6);
        assert_eq!(ch[2].rate, 0.6);

        p.gamma12 = p.gamma;
        let ch = collapse_ops(&p, l).unwrap();
        assert_eq!(ch[2].rate, 0.0);

        p.gamma12 = 0.0;
        p.gamma_star = 0.1;
        assert_eq!(collapse_ops(&p, l).unwrap().len(), 5);

        p.gamma_star = 0.0;
        p.gamma12 = 0.7;
        assert!(collapse_ops(&p, l).is_err());
    }

    #[test]
    fn params_validation() {
        let mut p = Params::baseline();
        p.gamma12 = -0.61;
        assert!(p.validate().is_err());
        let mut p = Params::baseline();
        p.kappa_left = -1.0;
        assert!(p.validate().is_err());
        let p = Params::baseline().with_detuning(20.0);
        assert_eq!(p.delta12(), 20.0);
        assert_eq!(p.mean_dot_frequency(), 0.0);
    }

    #[test]
    fn suggested_truncation_grows_with_power() {
        let p = Params::baseline();
        assert_eq!(p.clone().with_power(1e-12).suggested_fock_dim(), 3);
        let hi = p.clone().with_power(1e-8).suggested_fock_dim();
        let higher = p.with_power(1e-7).suggested_fock_dim();
        assert!(hi >= 5 && higher > hi && higher <= MAX_FOCK_DIM);
    }
}
