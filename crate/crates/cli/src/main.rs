//! `subradiance` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when a
//! solver or truncation check fails to converge.

mod config;
mod csv;
mod error;
mod run;
mod svg;
mod units;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Entries, Experiment};
use error::{CliError, EXIT_NOT_CONVERGED, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(
    name = "subradiance",
    version,
    about = "Two coupled emitters in a driven lossy cavity: scans and figures"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Fixed Fock truncation; omitted means automatic.
    #[arg(long, global = true)]
    fock: Option<usize>,

    /// Also write an SVG plot next to each CSV.
    #[arg(long, global = true)]
    svg: bool,

    /// Extra `key=value` entries, applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Grid override `name=start:stop:count` for delta12, power, omega_l or tau.
    #[arg(long, global = true, value_name = "NAME=START:STOP:COUNT")]
    sweep: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reflectivity against laser detuning.
    Spectrum,
    /// Reflectivity against laser power.
    Power,
    /// Reflectivity over detuning and power.
    Map,
    /// g2 of the reflected field against delay.
    G2,
    /// Minus-like mode coefficients against detuning.
    Eigen,
    /// Runs the experiment named by the `experiment` config key.
    Run,
    /// Regenerates one of the standard figures.
    Reproduce {
        #[arg(long)]
        figure: u8,
    },
    /// Fast numerical health checks.
    Selftest,
}

fn entries(cli: &Cli) -> Result<Entries, CliError> {
    let mut e = Entries::default();
    if let Some(path) = &cli.config {
        e.read_file(path)?;
    }
    for pair in &cli.set {
        e.set_pair(pair, "--set")?;
    }
    for sweep in &cli.sweep {
        let (name, grid) = sweep.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "--sweep expects name=start:stop:count, got `{sweep}`"
            ))
        })?;
        let key = match name.trim() {
            "delta12" => "delta_grid",
            "power" => "power_grid",
            "omega_l" => "laser_grid",
            "tau" => "tau_grid",
            other => {
                return Err(CliError::Usage(format!(
                    "--sweep: cannot sweep `{other}` (use delta12, power, omega_l or tau)"
                )))
            }
        };
        e.set(key, grid, "--sweep")?;
    }
    if let Some(out) = &cli.out {
        e.set("out", &out.to_string_lossy(), "--out")?;
    }
    if let Some(j) = cli.jobs {
        e.set("jobs", &j.to_string(), "--jobs")?;
    }
    if let Some(n) = cli.fock {
        e.set("fock", &n.to_string(), "--fock")?;
    }
    if cli.svg {
        e.set("svg", "true", "--svg")?;
    }
    Ok(e)
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let Some(command) = &cli.command else {
        return Err(CliError::Usage("no subcommand given; see --help".into()));
    };
    if let Command::Selftest = command {
        let results = run::selftest();
        let mut ok = true;
        for (line, pass) in &results {
            println!("{} {line}", if *pass { "PASS" } else { "FAIL" });
            ok &= pass;
        }
        return Ok(if ok { 0 } else { EXIT_NOT_CONVERGED });
    }

    let cfg = entries(&cli)?.resolve()?;
    if let Some(j) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {j} worker threads: {e}")))?;
    }
    let written = match command {
        Command::Spectrum => run::run_experiment(&cfg, Experiment::Spectrum)?,
        Command::Power => run::run_experiment(&cfg, Experiment::Power)?,
        Command::Map => run::run_experiment(&cfg, Experiment::Map)?,
        Command::G2 => run::run_experiment(&cfg, Experiment::G2)?,
        Command::Eigen => run::run_experiment(&cfg, Experiment::Eigen)?,
        Command::Run => {
            let exp = cfg
                .experiment
                .ok_or_else(|| CliError::Usage("`run` needs the `experiment` config key".into()))?;
            run::run_experiment(&cfg, exp)?
        }
        Command::Reproduce { figure } => run::reproduce(&cfg, *figure)?,
        Command::Selftest => unreachable!("handled above"),
    };
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
