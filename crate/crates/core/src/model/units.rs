//! Energy units. Every rate and frequency in the crate is in µeV; times are
//! in ns. Only drive power (W) and wavelengths (nm) use other units.

/// ħ in µeV·ns.
pub const HBAR_UEV_NS: f64 = 0.658_211_956_9;
/// ħ in eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;
/// Elementary charge, J per eV.
pub const JOULE_PER_EV: f64 = 1.602_176_634e-19;
/// h·c in eV·nm.
pub const HC_EV_NM: f64 = 1_239.841_984_332;

/// Energy in µeV to an angular rate in ns⁻¹.
pub fn uev_to_per_ns(energy_uev: f64) -> f64 {
    energy_uev / HBAR_UEV_NS
}

pub fn per_ns_to_uev(rate: f64) -> f64 {
    rate * HBAR_UEV_NS
}

/// Photon energy in eV at a vacuum wavelength in nm.
pub fn photon_energy_ev(lambda_nm: f64) -> f64 {
    HC_EV_NM / lambda_nm
}

/// Photons per second carried by a beam of `power_w` at `photon_energy_ev`.
pub fn photon_flux(power_w: f64, photon_energy_ev: f64) -> f64 {
    power_w / (photon_energy_ev * JOULE_PER_EV)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for e in [1e-6, 0.6, 200.0, 3.7e4] {
            let back = per_ns_to_uev(uev_to_per_ns(e));
            assert!((back - e).abs() <= 1e-12 * e);
        }
    }

    #[test]
    fn hbar_forms_agree() {
        // µeV·ns = 1e-6 eV · 1e-9 s
        assert!((HBAR_UEV_NS * 1e-15 - HBAR_EV_S).abs() < 1e-27);
    }

    #[test]
    fn photon_energy_at_930nm() {
        assert!((photon_energy_ev(930.0) - 1.3332).abs() < 1e-4);
    }
}
