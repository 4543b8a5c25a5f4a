//! Flat `key = value` run configuration.
//!
//! Entries come from an optional file and then from `--set` flags, later
//! entries overriding earlier ones. Resolution order is fixed: preset,
//! explicit fields, detuning, then dipole coupling from `d`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use subradiance::dynamics::FockPolicy;
use subradiance::experiments::TargetState;
use subradiance::model::{dipole_coupling, preset, preset_names, Emitters, Params};

use crate::error::CliError;
use crate::units::{parse_grid, parse_quantity, Dimension};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Spectrum,
    Power,
    Map,
    G2,
    Eigen,
}

impl Experiment {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "spectrum" => Experiment::Spectrum,
            "power" => Experiment::Power,
            "map" => Experiment::Map,
            "g2" => Experiment::G2,
            "eigen" => Experiment::Eigen,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Power => "power",
            Experiment::Map => "map",
            Experiment::G2 => "g2",
            Experiment::Eigen => "eigen",
        }
    }
}

/// Which curves the power and g₂ scans run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curves {
    /// The configured parameters tuned to one target.
    Single(TargetState),
    /// One dot plus the bright and dark coupled-dot modes.
    Blockade,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub params: Params,
    pub experiment: Option<Experiment>,
    pub laser_grid: Option<Vec<f64>>,
    pub power_grid: Option<Vec<f64>>,
    pub delta_grid: Option<Vec<f64>>,
    pub tau_grid: Option<Vec<f64>>,
    pub curves: Curves,
    pub fock: FockPolicy,
    pub out: PathBuf,
    pub jobs: Option<usize>,
    pub svg: bool,
    /// Reserved for stochastic samplers; the solvers are deterministic.
    pub seed: u64,
}

const ENERGY_KEYS: [&str; 13] = [
    "g",
    "kappa",
    "kappa_left",
    "kappa_right",
    "kappa_other",
    "gamma",
    "gamma_star",
    "omega1",
    "omega2",
    "omega_c",
    "omega_l",
    "omega12",
    "gamma12",
];
const OTHER_KEYS: [&str; 22] = [
    "preset",
    "experiment",
    "delta12",
    "d",
    "lambda0",
    "n_medium",
    "power",
    "fock",
    "emitters",
    "pump_dot1",
    "pump_dot2",
    "pump_cavity",
    "target",
    "curves",
    "laser_grid",
    "power_grid",
    "delta_grid",
    "tau_grid",
    "out",
    "jobs",
    "svg",
    "seed",
];

fn known(key: &str) -> bool {
    ENERGY_KEYS.contains(&key) || OTHER_KEYS.contains(&key)
}

/// Raw entries with their origin, for error messages.
#[derive(Debug, Clone, Default)]
pub struct Entries {
    map: BTreeMap<String, (String, String)>,
}

impl Entries {
    pub fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<(), CliError> {
        let key = key.trim();
        if !known(key) {
            return Err(CliError::Config(format!("{origin}: unknown key `{key}`")));
        }
        let value = value
            .trim()
            .trim_matches('"')
            .trim_matches('\'')
            .to_string();
        self.map
            .insert(key.to_string(), (value, origin.to_string()));
        Ok(())
    }

    /// Parses `key=value` as given on the command line.
    pub fn set_pair(&mut self, pair: &str, origin: &str) -> Result<(), CliError> {
        let (k, v) = pair.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{origin}: expected key=value, got `{pair}`"))
        })?;
        self.set(k, v, origin)
    }

    pub fn read_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        self.read_str(&text, &path.display().to_string())
    }

    pub fn read_str(&mut self, text: &str, name: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let origin = format!("{name}:{}", n + 1);
            let (k, v) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| {
                    CliError::Config(format!("{origin}: expected `key = value`, got `{line}`"))
                })?;
            self.set(k, v, &origin)?;
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&(String, String)> {
        self.map.get(key)
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn quantity(&self, key: &str, dim: Dimension) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|(v, origin)| {
                parse_quantity(v, dim)
                    .map_err(|e| CliError::Config(format!("{origin}: key `{key}`: {e}")))
            })
            .transpose()
    }

    fn grid(&self, key: &str, dim: Dimension, log: bool) -> Result<Option<Vec<f64>>, CliError> {
        self.get(key)
            .map(|(v, origin)| {
                parse_grid(v, dim, log)
                    .map_err(|e| CliError::Config(format!("{origin}: key `{key}`: {e}")))
            })
            .transpose()
    }

    fn integer(&self, key: &str) -> Result<Option<u64>, CliError> {
        self.get(key)
            .map(|(v, origin)| {
                v.parse::<u64>().map_err(|_| {
                    CliError::Config(format!(
                        "{origin}: key `{key}`: `{v}` is not a non-negative integer"
                    ))
                })
            })
            .transpose()
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.get(key).map(|(v, _)| v.as_str())
    }

    fn origin(&self, key: &str) -> &str {
        self.get(key).map(|(_, o)| o.as_str()).unwrap_or("")
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        for other in ["omega12", "gamma12"] {
            if self.has("d") && self.has(other) {
                return Err(CliError::Config(format!(
                    "keys `d` ({}) and `{other}` ({}) are mutually exclusive",
                    self.origin("d"),
                    self.origin(other)
                )));
            }
        }
        if self.has("kappa")
            && ["kappa_left", "kappa_right", "kappa_other"]
                .iter()
                .any(|k| self.has(k))
        {
            return Err(CliError::Config(
                "key `kappa` cannot be combined with `kappa_left`/`kappa_right`/`kappa_other`"
                    .into(),
            ));
        }

        let preset_name = self.text("preset").map(str::to_string);
        let mut p = match &preset_name {
            Some(name) => preset(name).map_err(|_| {
                CliError::Config(format!(
                    "{}: unknown preset `{name}` (known: {})",
                    self.origin("preset"),
                    preset_names().join(", ")
                ))
            })?,
            None => Params::baseline(),
        };

        if let Some(e) = self.text("emitters") {
            p = match e {
                "1" => p.single_emitter(),
                "2" => {
                    p.emitters = Emitters::Two;
                    p
                }
                _ => {
                    return Err(CliError::Config(format!(
                        "{}: key `emitters` must be 1 or 2",
                        self.origin("emitters")
                    )))
                }
            };
        }
        if let Some(k) = self.quantity("kappa", Dimension::Energy)? {
            p.kappa_left = 0.5 * k;
            p.kappa_right = 0.5 * k;
            p.kappa_other = 0.0;
        }
        for key in ENERGY_KEYS {
            if key == "kappa" {
                continue;
            }
            if let Some(v) = self.quantity(key, Dimension::Energy)? {
                *energy_field(&mut p, key) = v;
            }
        }
        if let Some(v) = self.quantity("pump_dot1", Dimension::Energy)? {
            p.pump_dot1 = v;
        }
        if let Some(v) = self.quantity("pump_dot2", Dimension::Energy)? {
            p.pump_dot2 = v;
        }
        if let Some(v) = self.quantity("pump_cavity", Dimension::Energy)? {
            p.pump_cavity = v;
        }
        if let Some(v) = self.quantity("lambda0", Dimension::Length)? {
            p.lambda0_nm = v;
        }
        if let Some(v) = self.quantity("n_medium", Dimension::Plain)? {
            p.n_medium = v;
        }
        if let Some(v) = self.quantity("power", Dimension::Power)? {
            p.p_laser = v;
        }
        if let Some(v) = self.quantity("delta12", Dimension::Energy)? {
            p = p.with_detuning(v);
        }
        if let Some(d) = self.quantity("d", Dimension::Length)? {
            let rates = dipole_coupling(d, p.lambda0_nm, p.n_medium, p.gamma)
                .map_err(|e| CliError::Config(format!("{}: key `d`: {e}", self.origin("d"))))?;
            p = p.with_dipole(rates);
        }
        let fock = match self.integer("fock")? {
            Some(n) => {
                p.fock_dim = n as usize;
                FockPolicy::Fixed(n as usize)
            }
            None => {
                p.fock_dim = p.suggested_fock_dim();
                FockPolicy::Auto
            }
        };
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;

        let experiment = match self.text("experiment") {
            Some(e) => Some(Experiment::parse(e).ok_or_else(|| {
                CliError::Config(format!(
                    "{}: key `experiment`: `{e}` is not one of spectrum, power, map, g2, eigen",
                    self.origin("experiment")
                ))
            })?),
            None => None,
        };
        let default_target = if p.emitters == Emitters::One {
            TargetState::SingleDot
        } else {
            TargetState::Plus
        };
        let target = match self.text("target") {
            None => default_target,
            Some("single") => TargetState::SingleDot,
            Some("plus") => TargetState::Plus,
            Some("minus") => TargetState::Minus,
            Some(t) => {
                return Err(CliError::Config(format!(
                    "{}: key `target`: `{t}` is not one of single, plus, minus",
                    self.origin("target")
                )))
            }
        };
        let curves = match self.text("curves") {
            None | Some("params") => Curves::Single(target),
            Some("blockade") => Curves::Blockade,
            Some(c) => {
                return Err(CliError::Config(format!(
                    "{}: key `curves`: `{c}` is not one of params, blockade",
                    self.origin("curves")
                )))
            }
        };
        let svg = match self.text("svg") {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(v) => {
                return Err(CliError::Config(format!(
                    "{}: key `svg`: `{v}` is not a boolean",
                    self.origin("svg")
                )))
            }
        };
        let jobs = match self.integer("jobs")? {
            Some(0) => {
                return Err(CliError::Config(format!(
                    "{}: key `jobs` must be at least 1",
                    self.origin("jobs")
                )))
            }
            j => j.map(|j| j as usize),
        };

        Ok(RunConfig {
            preset: preset_name,
            params: p,
            experiment,
            laser_grid: self.grid("laser_grid", Dimension::Energy, false)?,
            power_grid: self.grid("power_grid", Dimension::Power, true)?,
            delta_grid: self.grid("delta_grid", Dimension::Energy, false)?,
            tau_grid: self.grid("tau_grid", Dimension::Time, false)?,
            curves,
            fock,
            out: PathBuf::from(self.text("out").unwrap_or(".")),
            jobs,
            svg,
            seed: self.integer("seed")?.unwrap_or(0),
        })
    }
}

fn energy_field<'a>(p: &'a mut Params, key: &str) -> &'a mut f64 {
    match key {
        "g" => &mut p.g,
        "kappa_left" => &mut p.kappa_left,
        "kappa_right" => &mut p.kappa_right,
        "kappa_other" => &mut p.kappa_other,
        "gamma" => &mut p.gamma,
        "gamma_star" => &mut p.gamma_star,
        "omega1" => &mut p.omega1,
        "omega2" => &mut p.omega2,
        "omega_c" => &mut p.omega_c,
        "omega_l" => &mut p.omega_l,
        "omega12" => &mut p.omega12,
        "gamma12" => &mut p.gamma12,
        _ => unreachable!("not an energy key: {key}"),
    }
}
