//! Executes experiments and figure reproductions and writes their artifacts.

use std::path::{Path, PathBuf};

use subradiance::dynamics::{build_liouvillian, steady_state_with_diagnostics};
use subradiance::effective::{collective_rates, munu_analytic};
use subradiance::experiments::{
    blockade_curves, coefficients_scan, detuning_power_map, g2_scan, power_scan, reflectivity,
    spectrum_scan, Curve, Row, ScanResult, ScanSpec,
};
use subradiance::model::{dipole_coupling, fmt_f64, preset, Params};

use crate::config::{Curves, Experiment, RunConfig};
use crate::csv::to_csv;
use crate::error::CliError;
use crate::svg::{render, Heatmap, Panel, Series};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64))
        .collect()
}

fn default_laser_grid() -> Vec<f64> {
    linspace(-75.0, 75.0, 601)
}

fn default_power_grid() -> Vec<f64> {
    logspace(1e-13, 1e-7, 37)
}

fn default_tau_grid() -> Vec<f64> {
    linspace(0.0, 40.0, 801)
}

fn require_converged(r: &ScanResult) -> Result<(), CliError> {
    let bad: Vec<&Row> = r
        .rows
        .iter()
        .filter(|row| row.converged == Some(false))
        .collect();
    match bad.first() {
        None => Ok(()),
        Some(row) => {
            let at: Vec<String> = r
                .columns
                .iter()
                .zip(&row.values)
                .map(|(c, v)| format!("{c}={}", fmt_f64(*v)))
                .collect();
            let curve = if row.series.is_empty() {
                String::new()
            } else {
                format!("{} ", row.series)
            };
            Err(CliError::Unconverged {
                count: bad.len(),
                first: format!("{curve}{}", at.join(" ")),
            })
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Writes `<name>.csv` and, when asked, `<name>.svg`; returns the paths.
fn emit(
    cfg: &RunConfig,
    name: &str,
    r: &ScanResult,
    panels: impl FnOnce() -> (Vec<Panel>, usize),
) -> Result<Vec<PathBuf>, CliError> {
    require_converged(r)?;
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", cfg.out.display())))?;
    let csv = cfg.out.join(format!("{name}.csv"));
    write_file(&csv, &to_csv(r))?;
    let mut written = vec![csv];
    if cfg.svg {
        let (p, cols) = panels();
        let svg = cfg.out.join(format!("{name}.svg"));
        write_file(&svg, &render(&p, cols))?;
        written.push(svg);
    }
    Ok(written)
}

fn curves_for(cfg: &RunConfig) -> Result<Vec<Curve>, CliError> {
    Ok(match cfg.curves {
        Curves::Single(target) => vec![Curve::new(target.label(), cfg.params.clone(), target)],
        Curves::Blockade => blockade_curves(cfg.params.p_laser)?,
    })
}

fn labels(r: &ScanResult) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for row in &r.rows {
        if !out.contains(&row.series) {
            out.push(row.series.clone());
        }
    }
    out
}

fn line_panel(
    r: &ScanResult,
    title: &str,
    x: &str,
    y: &str,
    x_label: &str,
    y_label: &str,
) -> Panel {
    let mut p = Panel::new(title, x_label, y_label);
    for (k, label) in labels(r).iter().enumerate() {
        let xs = r.column(label, x).unwrap_or_default();
        let ys = r.column(label, y).unwrap_or_default();
        p.series.push(Series::new(label.clone(), xs, ys, k));
    }
    p
}

fn spectrum(cfg: &RunConfig) -> Result<ScanResult, CliError> {
    let grid = cfg.laser_grid.clone().unwrap_or_else(default_laser_grid);
    Ok(spectrum_scan(
        &ScanSpec::new(cfg.params.clone(), grid).with_fock(cfg.fock),
    )?)
}

fn power(cfg: &RunConfig) -> Result<ScanResult, CliError> {
    let grid = cfg.power_grid.clone().unwrap_or_else(default_power_grid);
    let spec = ScanSpec::new(cfg.params.clone(), grid)
        .with_curves(curves_for(cfg)?)
        .with_fock(cfg.fock);
    Ok(power_scan(&spec)?)
}

fn map(cfg: &RunConfig) -> Result<ScanResult, CliError> {
    let deltas = cfg
        .delta_grid
        .clone()
        .unwrap_or_else(|| linspace(0.0, 50.0, 21));
    let powers = cfg
        .power_grid
        .clone()
        .unwrap_or_else(|| logspace(1e-13, 1e-7, 25));
    let spec = ScanSpec::new(cfg.params.clone(), deltas)
        .with_secondary(powers)
        .with_fock(cfg.fock);
    Ok(detuning_power_map(&spec)?)
}

fn g2(cfg: &RunConfig) -> Result<ScanResult, CliError> {
    let grid = cfg.tau_grid.clone().unwrap_or_else(default_tau_grid);
    let spec = ScanSpec::new(cfg.params.clone(), grid)
        .with_curves(curves_for(cfg)?)
        .with_fock(cfg.fock);
    Ok(g2_scan(&spec)?)
}

fn eigen(cfg: &RunConfig) -> Result<ScanResult, CliError> {
    let grid = cfg
        .delta_grid
        .clone()
        .unwrap_or_else(|| linspace(0.0, 50.0, 201));
    Ok(coefficients_scan(&ScanSpec::new(cfg.params.clone(), grid))?)
}

fn map_panel(r: &ScanResult, title: &str) -> Panel {
    let mut deltas: Vec<f64> = Vec::new();
    let mut powers: Vec<f64> = Vec::new();
    for row in &r.rows {
        if !deltas.contains(&row.values[0]) {
            deltas.push(row.values[0]);
        }
        if !powers.contains(&row.values[1]) {
            powers.push(row.values[1]);
        }
    }
    let m = powers.len();
    let z: Vec<Vec<f64>> = (0..m)
        .map(|ip| {
            (0..deltas.len())
                .map(|id| r.rows[id * m + ip].values[2])
                .collect()
        })
        .collect();
    let mut p = Panel::new(title, "delta12 (ueV)", "laser power (W)");
    p.log_y = true;
    p.heatmap = Some(Heatmap {
        x: deltas,
        y: powers,
        z,
    });
    p
}

fn coefficient_panels(r: &ScanResult, title: &str) -> Vec<Panel> {
    let names: Vec<&str> = if r.columns.iter().any(|c| c == "mu") {
        vec!["mu", "nu"]
    } else {
        vec!["A", "B"]
    };
    let d = r.column("", "delta12_ueV").unwrap_or_default();
    let mut p = Panel::new(title, "delta12 (ueV)", "coefficient of the minus-like mode");
    for (k, n) in names.iter().enumerate() {
        p.series.push(Series::new(
            *n,
            d.clone(),
            r.column("", n).unwrap_or_default(),
            k + 1,
        ));
        if let Some(a) = r.column("", &format!("{n}_analytic")) {
            p.series
                .push(Series::new(format!("{n} analytic"), d.clone(), a, k + 1).dashed());
        }
    }
    let mut g = Panel::new("", "delta12 (ueV)", "Gamma_minus (ueV)");
    g.log_y = true;
    g.series.push(Series::new(
        "",
        d,
        r.column("", "Gamma_minus_ueV").unwrap_or_default(),
        0,
    ));
    vec![p, g]
}

pub fn run_experiment(cfg: &RunConfig, exp: Experiment) -> Result<Vec<PathBuf>, CliError> {
    let name = exp.name();
    match exp {
        Experiment::Spectrum => {
            let r = spectrum(cfg)?;
            emit(cfg, name, &r, || {
                (
                    vec![line_panel(
                        &r,
                        "reflectivity",
                        "omega_rel_ueV",
                        "reflectivity",
                        "laser detuning (ueV)",
                        "R",
                    )],
                    1,
                )
            })
        }
        Experiment::Power => {
            let r = power(cfg)?;
            emit(cfg, name, &r, || {
                let mut p = line_panel(
                    &r,
                    "saturation",
                    "power_W",
                    "reflectivity",
                    "laser power (W)",
                    "R",
                );
                p.log_x = true;
                (vec![p], 1)
            })
        }
        Experiment::Map => {
            let r = map(cfg)?;
            emit(cfg, name, &r, || (vec![map_panel(&r, "reflectivity")], 1))
        }
        Experiment::G2 => {
            let r = g2(cfg)?;
            emit(cfg, name, &r, || {
                (
                    vec![line_panel(
                        &r,
                        "g2 of the reflected field",
                        "tau_ns",
                        "g2",
                        "delay (ns)",
                        "g2",
                    )],
                    1,
                )
            })
        }
        Experiment::Eigen => {
            let r = eigen(cfg)?;
            emit(cfg, name, &r, || {
                (coefficient_panels(&r, "mode coefficients"), 2)
            })
        }
    }
}

/// Merges single-curve results under series labels, keeping each part's
/// metadata with a prefix.
fn merge(name: &str, parts: Vec<(String, ScanResult)>) -> ScanResult {
    let mut out = ScanResult {
        name: name.to_string(),
        metadata: vec![
            ("scan".into(), name.into()),
            ("code_version".into(), env!("CARGO_PKG_VERSION").into()),
        ],
        columns: parts
            .first()
            .map(|(_, r)| r.columns.clone())
            .unwrap_or_default(),
        rows: Vec::new(),
        summary: Vec::new(),
    };
    for (label, r) in parts {
        for (k, v) in r
            .metadata
            .iter()
            .filter(|(k, _)| k != "scan" && k != "code_version")
        {
            out.metadata
                .push((format!("panel[{label}].{k}"), v.clone()));
        }
        for (k, v) in r.summary {
            out.summary.push((format!("panel[{label}].{k}"), v));
        }
        out.rows.extend(r.rows.into_iter().map(|row| Row {
            series: label.clone(),
            ..row
        }));
    }
    out
}

fn power_label(p: f64) -> &'static str {
    match p {
        1e-12 => "1pW",
        1e-9 => "1nW",
        1e-8 => "10nW",
        _ => "P",
    }
}

pub fn reproduce(cfg: &RunConfig, figure: u8) -> Result<Vec<PathBuf>, CliError> {
    let name = format!("fig{figure}");
    let with = |params: Params| RunConfig {
        params,
        ..cfg.clone()
    };
    match figure {
        3 => {
            let c = with(preset("case-a")?);
            let mut r = eigen(&c)?;
            let g0 = collective_rates(&c.params)?.big_gamma0;
            r.name = name.clone();
            r.meta("figure", "3");
            emit(cfg, &name, &r, || {
                let mut panels = coefficient_panels(&r, "minus-like mode without dipole coupling");
                for p in &mut panels {
                    p.vlines = vec![(g0, "Gamma0".into()), (0.5 * g0, "Gamma0/2".into())];
                }
                (panels, 2)
            })
        }
        4 => {
            let mut r = eigen(&with(preset("case-d")?))?;
            r.name = name.clone();
            r.meta("figure", "4");
            emit(cfg, &name, &r, || {
                (
                    coefficient_panels(&r, "minus-like mode, omega12 = 31 ueV"),
                    2,
                )
            })
        }
        5 => {
            let powers = [1e-12, 1e-9, 1e-8];
            let mut parts = Vec::new();
            for case in ["case-a", "case-b", "case-c", "case-d", "case-e"] {
                for p in powers {
                    let label = format!("{case}@{}", power_label(p));
                    parts.push((label, spectrum(&with(preset(case)?.with_power(p)))?));
                }
            }
            let mut r = merge(&name, parts);
            r.meta("figure", "5");
            emit(cfg, &name, &r, || {
                let panels = labels(&r)
                    .into_iter()
                    .map(|l| {
                        let mut p = Panel::new(l.clone(), "laser detuning (ueV)", "R");
                        let x = r.column(&l, "omega_rel_ueV").unwrap_or_default();
                        p.series.push(Series::new(
                            "",
                            x,
                            r.column(&l, "reflectivity").unwrap_or_default(),
                            0,
                        ));
                        p
                    })
                    .collect();
                (panels, 3)
            })
        }
        6 => {
            let c = RunConfig {
                curves: Curves::Blockade,
                ..with(Params::baseline().with_power(1e-12))
            };
            let mut r = power(&c)?;
            r.name = name.clone();
            r.meta("figure", "6");
            emit(cfg, &name, &r, || {
                let mut p = line_panel(
                    &r,
                    "saturation of the four configurations",
                    "power_W",
                    "reflectivity",
                    "laser power (W)",
                    "R",
                );
                p.log_x = true;
                (vec![p], 1)
            })
        }
        7 => {
            let mut r = map(&with(preset("case-d")?))?;
            r.name = name.clone();
            r.meta("figure", "7");
            emit(cfg, &name, &r, || {
                (
                    vec![map_panel(&r, "reflectivity at the minus-like mode")],
                    1,
                )
            })
        }
        8 => {
            let c = RunConfig {
                curves: Curves::Blockade,
                ..with(Params::baseline().with_power(1e-11))
            };
            let mut r = g2(&c)?;
            r.name = name.clone();
            r.meta("figure", "8");
            emit(cfg, &name, &r, || {
                (
                    vec![line_panel(
                        &r,
                        "g2 at 10 pW",
                        "tau_ns",
                        "g2",
                        "delay (ns)",
                        "g2",
                    )],
                    1,
                )
            })
        }
        _ => Err(CliError::Usage(format!(
            "figure must be one of 3, 4, 5, 6, 7, 8, got {figure}"
        ))),
    }
}

/// Quick numerical health checks; returns (description, passed) pairs.
pub fn selftest() -> Vec<(String, bool)> {
    let mut out = Vec::new();
    let mut check = |name: &str, r: Result<(bool, String), CliError>| match r {
        Ok((ok, detail)) => out.push((format!("{name}: {detail}"), ok)),
        Err(e) => out.push((format!("{name}: error: {e}"), false)),
    };
    check(
        "dipole coupling at 10 nm",
        dipole_coupling(10.0, 930.0, 3.6, 0.6)
            .map(|r| {
                (
                    (r.omega12 - 31.0).abs() < 0.03 * 31.0,
                    format!("omega12 = {:.3} ueV", r.omega12),
                )
            })
            .map_err(Into::into),
    );
    check(
        "mode weights normalized",
        munu_analytic(20.0, 31.0)
            .map(|(mu, nu)| {
                (
                    (mu * mu + nu * nu - 1.0).abs() < 1e-12,
                    format!("mu = {mu:.4}, nu = {nu:.4}"),
                )
            })
            .map_err(Into::into),
    );
    check("empty cavity reflectivity", {
        let mut p = Params::baseline();
        p.g = 0.0;
        reflectivity(&p)
            .map(|r| (r < 1e-6, format!("R = {r:.2e}")))
            .map_err(Into::into)
    });
    for name in ["case-a", "case-d"] {
        check(&format!("steady state {name}"), {
            preset(name)
                .and_then(|p| build_liouvillian(&p))
                .and_then(|l| steady_state_with_diagnostics(&l))
                .map(|s| {
                    let ok = s.residual < 1e-9
                        && (s.rho.trace().re - 1.0).abs() < 1e-9
                        && s.rho.min_eigenvalue() > -1e-8;
                    (
                        ok,
                        format!(
                            "residual {:.2e}, min eigenvalue {:.2e}",
                            s.residual,
                            s.rho.min_eigenvalue()
                        ),
                    )
                })
                .map_err(Into::into)
        });
    }
    check("single-dot antibunching", {
        let spec = ScanSpec::new(
            preset("single-dot")
                .map(|p| p.with_power(1e-11))
                .unwrap_or_else(|_| Params::baseline()),
            linspace(0.0, 2.0, 21),
        );
        g2_scan(&spec)
            .map(|r| {
                let g0 = r.summary_value("g2_0[single]").unwrap_or(f64::NAN);
                (g0 < 0.05 && r.all_converged(), format!("g2(0) = {g0:.4}"))
            })
            .map_err(Into::into)
    });
    out
}
