//! Observables and parameter scans: reflectivity spectra, saturation
//! curves, the detuning-power map, g₂(τ) curves and mode coefficients.
//!
//! Scan points run in parallel and are merged back in grid order, so a
//! scan's output does not depend on scheduling.

pub mod peaks;
mod scans;

use crate::dynamics::{build_liouvillian, converge_in_fock, steady_state, Converged, FockPolicy};
use crate::effective::{build_effective, eigenmodes, ModeKind};
use crate::error::{Error, Result};
use crate::model::{self, fmt_f64, Params};
use crate::qspace::expectation;

pub use scans::{coefficients_scan, detuning_power_map, g2_scan, power_scan, spectrum_scan};

/// R = ⟨a_out† a_out⟩ / α_in² in the steady state, detected on the driven
/// mirror.
pub fn reflectivity(params: &Params) -> Result<f64> {
    let l = build_liouvillian(params)?;
    let rho = steady_state(&l)?;
    let (out, alpha) = model::reflected_field(params, l.layout())?;
    if alpha == 0.0 {
        return Err(Error::ZeroInput);
    }
    let n_out = expectation(&(&out.dagger() * &out), &rho)?.re;
    Ok(n_out / (alpha * alpha))
}

/// Reflectivity level below which truncation changes are judged against
/// this scale instead of R itself, so near-zero dips are not held to a
/// relative tolerance on a vanishing number.
const R_SCALE: f64 = 0.05;

/// Reflectivity with the truncation chosen by `policy`.
pub fn reflectivity_converged(params: &Params, policy: FockPolicy) -> Result<Converged> {
    let start = params.suggested_fock_dim();
    converge_in_fock(
        policy,
        start,
        crate::dynamics::FOCK_REL_TOL * R_SCALE,
        |n| reflectivity(&params.clone().with_fock_dim(n)),
    )
}

/// The state that cavity and laser are tuned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetState {
    /// Dot 1 alone, cavity and laser on its frequency.
    SingleDot,
    /// The symmetric-dominated excitonic mode.
    Plus,
    /// The antisymmetric-dominated excitonic mode.
    Minus,
}

impl TargetState {
    pub fn label(&self) -> &'static str {
        match self {
            TargetState::SingleDot => "single",
            TargetState::Plus => "plus",
            TargetState::Minus => "minus",
        }
    }
}

/// Sets ω_c = ω_L onto the target mode. For the excitonic modes this is the
/// fixed point ω = Re λ(ω) of the effective matrix with the cavity at ω, so
/// the small cavity pull is included.
pub fn tune_to_target(params: &Params, target: TargetState) -> Result<Params> {
    match target {
        TargetState::SingleDot => {
            let p = params.clone().single_emitter();
            let w = p.omega1;
            Ok(p.tuned_to(w))
        }
        TargetState::Plus | TargetState::Minus => {
            let kind = if target == TargetState::Plus {
                ModeKind::PlusLike
            } else {
                ModeKind::MinusLike
            };
            let mut p = params.clone();
            let mut w = eigenmodes(&build_effective(&p))?.get(kind).position();
            for _ in 0..200 {
                p = p.tuned_to(w);
                let next = eigenmodes(&build_effective(&p))?.get(kind).position();
                if (next - w).abs() < 1e-10 * (1.0 + w.abs()) {
                    return Ok(p.tuned_to(next));
                }
                w = next;
            }
            Err(Error::NotConverged {
                observable: format!("{} mode frequency", target.label()),
                fock_dim: 0,
            })
        }
    }
}

/// One labeled curve of a multi-curve scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub params: Params,
    pub target: TargetState,
}

impl Curve {
    pub fn new(label: impl Into<String>, params: Params, target: TargetState) -> Self {
        Self {
            label: label.into(),
            params,
            target,
        }
    }
}

/// The four curves compared in the saturation and blockade scans: one dot,
/// the bright mode at Δ₁₂ = 20 µeV and the dark mode at Δ₁₂ = 20 and 10 µeV,
/// all with dipole coupling and the given power.
pub fn blockade_curves(power: f64) -> Result<Vec<Curve>> {
    let d20 = model::preset("case-d")?.with_power(power);
    let d10 = model::preset("case-e")?.with_power(power);
    Ok(vec![
        Curve::new(
            "single",
            model::preset("single-dot")?.with_power(power),
            TargetState::SingleDot,
        ),
        Curve::new("plus20", d20.clone(), TargetState::Plus),
        Curve::new("minus20", d20, TargetState::Minus),
        Curve::new("minus10", d10, TargetState::Minus),
    ])
}

/// Scan description. Each scan documents which fields it reads.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub params: Params,
    /// Primary axis values.
    pub grid: Vec<f64>,
    /// Secondary axis values (detuning-power map only).
    pub secondary: Vec<f64>,
    /// Curves for multi-curve scans; empty means a single curve on `params`.
    pub curves: Vec<Curve>,
    pub fock: FockPolicy,
}

impl ScanSpec {
    pub fn new(params: Params, grid: Vec<f64>) -> Self {
        Self {
            params,
            grid,
            secondary: Vec::new(),
            curves: Vec::new(),
            fock: FockPolicy::Auto,
        }
    }

    pub fn with_curves(mut self, curves: Vec<Curve>) -> Self {
        self.curves = curves;
        self
    }

    pub fn with_secondary(mut self, secondary: Vec<f64>) -> Self {
        self.secondary = secondary;
        self
    }

    pub fn with_fock(mut self, fock: FockPolicy) -> Self {
        self.fock = fock;
        self
    }

    pub(crate) fn check_grid(grid: &[f64], name: &str) -> Result<()> {
        if grid.is_empty() {
            return Err(Error::InvalidGrid(format!("{name} grid is empty")));
        }
        if grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "{name} grid has non-finite values"
            )));
        }
        let up = grid.windows(2).all(|w| w[1] > w[0]);
        let down = grid.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::InvalidGrid(format!(
                "{name} grid must be strictly monotone"
            )));
        }
        Ok(())
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// Curve label, empty for single-curve scans.
    pub series: String,
    pub values: Vec<f64>,
    /// Truncation check; `None` for observables that involve no truncation.
    pub converged: Option<bool>,
    pub fock_dim: Option<usize>,
}

/// Labeled scan output with enough metadata to rerun it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub name: String,
    /// (key, value) pairs in insertion order.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    /// Scalars extracted from the rows, for example P₅₀ per curve.
    pub summary: Vec<(String, f64)>,
}

impl ScanResult {
    pub(crate) fn new(name: &str, columns: &[&str]) -> Self {
        let mut r = Self {
            name: name.to_string(),
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
        };
        r.meta("scan", name);
        r.meta("code_version", env!("CARGO_PKG_VERSION"));
        r
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub(crate) fn meta_params(&mut self, prefix: &str, params: &Params) {
        for (k, v) in params.entries() {
            self.meta(format!("{prefix}{k}"), v);
        }
    }

    pub(crate) fn meta_fock(&mut self, fock: FockPolicy) {
        let s = match fock {
            FockPolicy::Fixed(n) => format!("fixed {n}"),
            FockPolicy::Auto => "auto".to_string(),
        };
        self.meta("fock_policy", s);
        self.meta("fock_rel_tol", fmt_f64(crate::dynamics::FOCK_REL_TOL));
    }

    pub fn has_series(&self) -> bool {
        self.rows.iter().any(|r| !r.series.is_empty())
    }

    pub fn has_convergence(&self) -> bool {
        self.rows.iter().any(|r| r.converged.is_some())
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged != Some(false))
    }

    /// Rows of one curve.
    pub fn series(&self, label: &str) -> impl Iterator<Item = &Row> + '_ {
        let label = label.to_string();
        self.rows.iter().filter(move |r| r.series == label)
    }

    /// Values of column `name` for the rows of `label`.
    pub fn column(&self, label: &str, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.series(label).map(|r| r.values[idx]).collect())
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::collective_rates;
    use crate::model::preset;

    #[test]
    fn empty_cavity_limits() {
        let mut p = Params::baseline();
        p.g = 0.0;
        assert!(reflectivity(&p).unwrap() < 1e-6);
        p.omega_l = 5000.0;
        assert!(reflectivity(&p).unwrap() > 0.99);
    }

    #[test]
    fn single_dot_matches_linear_response() {
        // weak drive: r = 1 − κ_L / (κ/2 + 2g²/γ) on resonance
        let p = tune_to_target(&Params::baseline(), TargetState::SingleDot).unwrap();
        let r = 1.0 - p.kappa_left / (0.5 * p.kappa() + 2.0 * p.g * p.g / p.gamma);
        let got = reflectivity(&p.with_power(1e-14)).unwrap();
        assert!((got - r * r).abs() < 1e-3, "{got} vs {}", r * r);
    }

    #[test]
    fn zero_input_is_an_error() {
        assert!(matches!(
            reflectivity(&Params::baseline().with_power(0.0)),
            Err(Error::ZeroInput)
        ));
    }

    #[test]
    fn tuning_lands_on_minus_mode() {
        let p = tune_to_target(&preset("case-d").unwrap(), TargetState::Minus).unwrap();
        let m = eigenmodes(&build_effective(&p)).unwrap();
        assert!((m.minus().position() - p.omega_c).abs() < 1e-8);
        assert_eq!(p.omega_c, p.omega_l);
        // red of the mean by about √(Δ²+Ω²)
        let split = (20.0f64 * 20.0 + 31.0 * 31.0).sqrt();
        assert!((p.omega_c + split).abs() < 0.1 * split);
        assert!(collective_rates(&p).unwrap().mu < 0.3);
    }

    #[test]
    fn reflectivity_flag_at_default_truncation() {
        let c = reflectivity_converged(&preset("case-a").unwrap(), FockPolicy::Auto).unwrap();
        assert!(c.converged);
        assert!(c.value > 0.5 && c.value <= 1.0 + 1e-6);
    }
}
