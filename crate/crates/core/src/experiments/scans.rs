use rayon::prelude::*;

use super::peaks::{dip_fwhm, p50};
use super::{
    reflectivity_converged, tune_to_target, Curve, Row, ScanResult, ScanSpec, TargetState,
};
use crate::dynamics::{build_liouvillian, normalized_g2, steady_state, FockPolicy, FOCK_REL_TOL};
use crate::effective::{
    build_effective, coeffs_from_modes, collective_rates, eigenmodes, munu_analytic, ModeKind,
};
use crate::error::{Error, Result};
use crate::model::{self, fmt_f64, Params, MAX_FOCK_DIM};

/// Reflectivity against laser frequency at fixed power.
///
/// Reads `params`, `grid` (ω_L − (ω₁+ω₂)/2 in µeV) and `fock`. The cavity
/// sits at the mean dot frequency.
pub fn spectrum_scan(spec: &ScanSpec) -> Result<ScanResult> {
    ScanSpec::check_grid(&spec.grid, "laser detuning")?;
    spec.params.validate()?;
    let mean = spec.params.mean_dot_frequency();
    let mut base = spec.params.clone();
    base.omega_c = mean;

    let points: Vec<_> = spec
        .grid
        .par_iter()
        .map(|&x| {
            let mut p = base.clone();
            p.omega_l = mean + x;
            reflectivity_converged(&p, spec.fock).map(|c| (x, c))
        })
        .collect::<Result<_>>()?;

    let mut out = ScanResult::new("spectrum", &["omega_rel_ueV", "reflectivity"]);
    out.meta_params("", &base);
    out.meta_fock(spec.fock);
    out.meta("axis", "omega_rel_ueV = omega_l - (omega1 + omega2)/2");
    out.meta("cavity_placement", "omega_c = (omega1 + omega2)/2");
    for (x, c) in points {
        out.rows.push(Row {
            series: String::new(),
            values: vec![x, c.value],
            converged: Some(c.converged),
            fock_dim: Some(c.fock_dim),
        });
    }
    Ok(out)
}

fn curves_or_single(spec: &ScanSpec, default_target: TargetState) -> Vec<Curve> {
    if spec.curves.is_empty() {
        vec![Curve::new(
            default_target.label(),
            spec.params.clone(),
            default_target,
        )]
    } else {
        spec.curves.clone()
    }
}

/// Reflectivity against drive power with cavity and laser tuned to each
/// curve's target state.
///
/// Reads `curves` (or `params` as a single-dot curve), `grid` (powers in W)
/// and `fock`. The summary holds `p50[label]` for every curve whose
/// reflectivity crosses one half inside the grid.
pub fn power_scan(spec: &ScanSpec) -> Result<ScanResult> {
    ScanSpec::check_grid(&spec.grid, "power")?;
    if spec.grid.iter().any(|&p| p <= 0.0) {
        return Err(Error::InvalidGrid("powers must be > 0".into()));
    }
    let curves = curves_or_single(spec, TargetState::SingleDot);
    let tuned: Vec<Params> = curves
        .iter()
        .map(|c| tune_to_target(&c.params, c.target))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, f64)> = (0..curves.len())
        .flat_map(|c| spec.grid.iter().map(move |&p| (c, p)))
        .collect();
    let points: Vec<_> = jobs
        .par_iter()
        .map(|&(c, power)| reflectivity_converged(&tuned[c].clone().with_power(power), spec.fock))
        .collect::<Result<_>>()?;

    let mut out = ScanResult::new("power", &["power_W", "reflectivity"]);
    out.meta_fock(spec.fock);
    out.meta("tuning", "omega_c = omega_l = real part of the target mode");
    for (curve, p) in curves.iter().zip(&tuned) {
        out.meta(
            format!("curve[{}].target", curve.label),
            curve.target.label(),
        );
        out.meta_params(&format!("curve[{}].", curve.label), p);
    }
    for (&(c, power), conv) in jobs.iter().zip(points) {
        out.rows.push(Row {
            series: curves[c].label.clone(),
            values: vec![power, conv.value],
            converged: Some(conv.converged),
            fock_dim: Some(conv.fock_dim),
        });
    }
    for curve in &curves {
        let r = out.column(&curve.label, "reflectivity").unwrap_or_default();
        match p50(&spec.grid, &r) {
            Some(v) => {
                out.meta(format!("p50[{}]_W", curve.label), fmt_f64(v));
                out.summary.push((format!("p50[{}]", curve.label), v));
            }
            None => out.meta(
                format!("p50[{}]_W", curve.label),
                "not spanned by the power grid",
            ),
        }
    }
    Ok(out)
}

/// Reflectivity over (Δ₁₂, power) with ω_c = ω_L = (ω₁+ω₂)/2 − √(Δ₁₂²+Ω₁₂²).
///
/// Reads `params`, `grid` (Δ₁₂ in µeV), `secondary` (powers in W) and
/// `fock`. The summary holds `p50[delta=…]` per detuning row where the
/// threshold is inside the power grid.
pub fn detuning_power_map(spec: &ScanSpec) -> Result<ScanResult> {
    ScanSpec::check_grid(&spec.grid, "detuning")?;
    ScanSpec::check_grid(&spec.secondary, "power")?;
    if spec.secondary.iter().any(|&p| p <= 0.0) {
        return Err(Error::InvalidGrid("powers must be > 0".into()));
    }
    spec.params.validate()?;
    let omega12 = spec.params.omega12;
    let jobs: Vec<(f64, f64)> = spec
        .grid
        .iter()
        .flat_map(|&d| spec.secondary.iter().map(move |&p| (d, p)))
        .collect();
    let points: Vec<_> = jobs
        .par_iter()
        .map(|&(delta, power)| {
            let p = spec.params.clone().with_detuning(delta).with_power(power);
            let w = p.mean_dot_frequency() - (delta * delta + omega12 * omega12).sqrt();
            reflectivity_converged(&p.tuned_to(w), spec.fock)
        })
        .collect::<Result<_>>()?;

    let mut out = ScanResult::new("map", &["delta12_ueV", "power_W", "reflectivity"]);
    out.meta_params("", &spec.params);
    out.meta_fock(spec.fock);
    out.meta(
        "tuning",
        "omega_c = omega_l = (omega1 + omega2)/2 - sqrt(delta12^2 + omega12^2)",
    );
    for (&(d, p), c) in jobs.iter().zip(points) {
        out.rows.push(Row {
            series: String::new(),
            values: vec![d, p, c.value],
            converged: Some(c.converged),
            fock_dim: Some(c.fock_dim),
        });
    }
    let m = spec.secondary.len();
    for (k, &delta) in spec.grid.iter().enumerate() {
        let r: Vec<f64> = out.rows[k * m..(k + 1) * m]
            .iter()
            .map(|row| row.values[2])
            .collect();
        if let Some(v) = p50(&spec.secondary, &r) {
            out.summary
                .push((format!("p50[delta={}]", fmt_f64(delta)), v));
        }
    }
    Ok(out)
}

/// Absolute tolerance on g₂ changes between truncations (g₂ is of order 1).
const G2_ABS_FLOOR: f64 = 5e-3;

fn g2_curve(p: &Params, taus: &[f64]) -> Result<Vec<f64>> {
    let l = build_liouvillian(p)?;
    let rho = steady_state(&l)?;
    let (out, _) = model::reflected_field(p, l.layout())?;
    normalized_g2(&l, &rho, &out, taus)
}

fn curves_close(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= (FOCK_REL_TOL * y.abs()).max(G2_ABS_FLOOR))
}

/// g₂ curve with the truncation chosen by `policy`; returns the curve, the
/// truncation used and whether N and N+2 agree.
fn g2_converged(p: &Params, taus: &[f64], policy: FockPolicy) -> Result<(Vec<f64>, usize, bool)> {
    match policy {
        FockPolicy::Fixed(n) => {
            let v = g2_curve(&p.clone().with_fock_dim(n), taus)?;
            let ok = n + 2 <= MAX_FOCK_DIM
                && curves_close(&v, &g2_curve(&p.clone().with_fock_dim(n + 2), taus)?);
            Ok((v, n, ok))
        }
        FockPolicy::Auto => {
            let mut n = p.suggested_fock_dim();
            let mut v = g2_curve(&p.clone().with_fock_dim(n), taus)?;
            while n + 2 <= MAX_FOCK_DIM {
                let next = g2_curve(&p.clone().with_fock_dim(n + 2), taus)?;
                if curves_close(&v, &next) {
                    return Ok((v, n, true));
                }
                n += 2;
                v = next;
            }
            Ok((v, n, false))
        }
    }
}

/// g₂(τ) of the reflected field per curve, cavity and laser tuned to the
/// curve's target.
///
/// Reads `curves` (or `params` as a single-dot curve), `grid` (τ in ns,
/// starting at 0) and `fock`. The summary holds `g2_0[label]` and
/// `fwhm[label]` (ns).
pub fn g2_scan(spec: &ScanSpec) -> Result<ScanResult> {
    ScanSpec::check_grid(&spec.grid, "delay")?;
    if spec.grid[0] != 0.0 || spec.grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("delays must increase from 0".into()));
    }
    let curves = curves_or_single(spec, TargetState::SingleDot);
    let tuned: Vec<Params> = curves
        .iter()
        .map(|c| tune_to_target(&c.params, c.target))
        .collect::<Result<_>>()?;
    let results: Vec<_> = tuned
        .par_iter()
        .map(|p| g2_converged(p, &spec.grid, spec.fock))
        .collect::<Result<_>>()?;

    let mut out = ScanResult::new("g2", &["tau_ns", "g2"]);
    out.meta_fock(spec.fock);
    out.meta("tuning", "omega_c = omega_l = real part of the target mode");
    for (curve, p) in curves.iter().zip(&tuned) {
        out.meta(
            format!("curve[{}].target", curve.label),
            curve.target.label(),
        );
        out.meta_params(&format!("curve[{}].", curve.label), p);
    }
    for (curve, (g2, n, ok)) in curves.iter().zip(results) {
        out.summary.push((format!("g2_0[{}]", curve.label), g2[0]));
        if let Some(w) = dip_fwhm(&spec.grid, &g2) {
            out.summary.push((format!("fwhm[{}]", curve.label), w));
            out.meta(format!("fwhm[{}]_ns", curve.label), fmt_f64(w));
        }
        for (&t, v) in spec.grid.iter().zip(g2) {
            out.rows.push(Row {
                series: curve.label.clone(),
                values: vec![t, v],
                converged: Some(ok),
                fock_dim: Some(n),
            });
        }
    }
    Ok(out)
}

/// Symmetric and antisymmetric content of the minus-like mode against
/// Δ₁₂, with the closed form overlaid when Ω₁₂ ≠ 0.
///
/// Reads `params` and `grid` (Δ₁₂ in µeV). Without dipole coupling the
/// coefficient columns are named A and B.
pub fn coefficients_scan(spec: &ScanSpec) -> Result<ScanResult> {
    ScanSpec::check_grid(&spec.grid, "detuning")?;
    spec.params.validate()?;
    let coupled = spec.params.omega12 != 0.0;
    let columns: &[&str] = if coupled {
        &[
            "delta12_ueV",
            "mu",
            "nu",
            "Gamma_minus_ueV",
            "nc_minus_ratio",
            "mu_analytic",
            "nu_analytic",
        ]
    } else {
        &["delta12_ueV", "A", "B", "Gamma_minus_ueV", "nc_minus_ratio"]
    };
    let rows: Vec<Vec<f64>> = spec
        .grid
        .par_iter()
        .map(|&delta| {
            let p = spec.params.clone().with_detuning(delta);
            let (sym, anti) =
                coeffs_from_modes(&eigenmodes(&build_effective(&p))?, ModeKind::MinusLike)?;
            let rates = collective_rates(&p)?;
            let mut row = vec![
                delta,
                sym,
                anti,
                rates.big_gamma_minus,
                rates.nc_minus / rates.nc0,
            ];
            if coupled {
                let (mu, nu) = munu_analytic(delta, p.omega12)?;
                row.extend([mu, nu]);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut out = ScanResult::new("coefficients", columns);
    out.meta_params("", &spec.params);
    out.meta("mode", "minus-like eigenmode of the effective matrix");
    let rates = collective_rates(&spec.params)?;
    out.meta("Gamma0_ueV", fmt_f64(rates.big_gamma0));
    out.meta(
        "crossover_text_ueV",
        fmt_f64(2.0 * spec.params.g * spec.params.g / spec.params.kappa()),
    );
    for values in rows {
        out.rows.push(Row {
            series: String::new(),
            values,
            converged: None,
            fock_dim: None,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::peaks::find_peaks;
    use crate::model::preset;

    #[test]
    fn spectrum_case_a_single_peak() {
        let grid: Vec<f64> = (-60..=60).map(|k| k as f64 * 0.5).collect();
        let r = spectrum_scan(&ScanSpec::new(preset("case-a").unwrap(), grid.clone())).unwrap();
        assert!(r.all_converged());
        let y = r.column("", "reflectivity").unwrap();
        let peaks = find_peaks(&grid, &y, 0.05, 0.02);
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].position.abs() < 0.2);
    }

    #[test]
    fn coefficient_columns() {
        let r = coefficients_scan(&ScanSpec::new(
            preset("case-d").unwrap(),
            vec![0.0, 10.0, 20.0],
        ))
        .unwrap();
        assert_eq!(r.columns[1], "mu");
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows[0].values[1] < 1e-9);
        let r =
            coefficients_scan(&ScanSpec::new(preset("case-a").unwrap(), vec![0.0, 40.0])).unwrap();
        assert_eq!(r.columns[1], "A");
        assert!((r.rows[1].values[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.02);
    }

    #[test]
    fn rejects_bad_grids() {
        let p = preset("case-a").unwrap();
        assert!(spectrum_scan(&ScanSpec::new(p.clone(), vec![])).is_err());
        assert!(spectrum_scan(&ScanSpec::new(p.clone(), vec![1.0, 0.0, 2.0])).is_err());
        assert!(power_scan(&ScanSpec::new(p.clone(), vec![0.0, 1e-12])).is_err());
        assert!(g2_scan(&ScanSpec::new(p, vec![0.5, 1.0])).is_err());
    }
}
