//! Named parameter sets.
//!
//! The five reflectivity cases combine resonant or detuned dots with or
//! without dipole-dipole coupling. Coupled cases fix Ω₁₂ at 31 µeV and take
//! γ₁₂ from a 10 nm separation, so the subradiant channel keeps a small
//! nonzero rate and the steady state stays unique.

use super::{dipole_coupling, Params};
use crate::error::{Error, Result};

pub const COUPLED_OMEGA12: f64 = 31.0;
pub const COUPLED_SEPARATION_NM: f64 = 10.0;

const NAMES: [&str; 7] = [
    "baseline",
    "case-a",
    "case-b",
    "case-c",
    "case-d",
    "case-e",
    "single-dot",
];

pub fn preset_names() -> &'static [&'static str] {
    &NAMES
}

/// γ₁₂ at the reference separation for the given base parameters.
pub fn coupled_gamma12(base: &Params) -> f64 {
    dipole_coupling(
        COUPLED_SEPARATION_NM,
        base.lambda0_nm,
        base.n_medium,
        base.gamma,
    )
    .map(|r| r.gamma12)
    .unwrap_or(0.0)
}

fn coupled(mut p: Params, delta12: f64) -> Params {
    p.omega12 = COUPLED_OMEGA12;
    p.gamma12 = coupled_gamma12(&p);
    p.with_detuning(delta12)
}

pub fn preset(name: &str) -> Result<Params> {
    let base = Params::baseline();
    let p = match name {
        // the second spelling is kept for older configs
        "baseline" | "paper-default" | "case-a" => base,
        "case-b" => coupled(base, 0.0),
        "case-c" => base.with_detuning(20.0),
        "case-d" => coupled(base, 20.0),
        "case-e" => coupled(base, 10.0),
        "single-dot" => base.single_emitter(),
        _ => {
            return Err(Error::InvalidParameter {
                name: "preset",
                reason: format!("unknown preset `{name}` (known: {})", NAMES.join(", ")),
            })
        }
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Emitters;

    #[test]
    fn all_presets_validate() {
        for name in preset_names() {
            let p = preset(name).unwrap();
            p.validate().unwrap();
            assert_eq!((p.g, p.kappa(), p.gamma), (20.0, 200.0, 0.6), "{name}");
        }
    }

    #[test]
    fn case_parameters() {
        assert_eq!(preset("case-c").unwrap().delta12(), 20.0);
        let d = preset("case-d").unwrap();
        assert_eq!((d.delta12(), d.omega12), (20.0, 31.0));
        assert!(d.gamma12 > 0.58 && d.gamma12 < 0.6);
        assert_eq!(preset("case-e").unwrap().delta12(), 10.0);
        assert_eq!(preset("single-dot").unwrap().emitters, Emitters::One);
        assert!(preset("case-z").is_err());
    }
}
