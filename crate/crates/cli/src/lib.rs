//! Command-line driver: configuration, parallel grid evaluation, CSV/JSON
//! export and post-processing.

pub mod analyze;
pub mod conductivity;
pub mod config;
pub mod error;
pub mod records;
pub mod sweep;
pub mod validate;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use cnt_casimir::film::{FilmSpec, Sheet};
use cnt_casimir::lifshitz::{FilmPair, Mode};
use cnt_casimir::swcnt::Chirality;
use serde_json::json;

use crate::config::RunConfig;
pub use crate::error::CliError;
use crate::records::{sidecar_path, write_csv, write_json};
use crate::sweep::Quantities;

#[derive(Debug, Parser)]
#[command(name = "cnt-casimir", version, about = "Casimir energy and torque between carbon-nanotube array films")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured mode.
    #[arg(long, global = true, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    /// Parallel workers (grid points are distributed, each point is serial).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output file (CSV for tables, JSON for analyze reports).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Relative tolerance of the momentum integrals.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Extra consistency checks (slow): collective-pole scan, n = 0 limit
    /// report, torque against -dE/dphi at every point.
    #[arg(long, global = true)]
    pub debug_checks: bool,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: cnt_casimir::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conductivity tables on the real and imaginary axes.
    Conductivity,
    /// Casimir energy over the configured grid.
    Energy,
    /// Casimir torque over the configured grid.
    Torque,
    /// Energy and torque over the configured grid.
    Sweep,
    /// Post-process result files.
    Analyze {
        #[arg(long, value_enum)]
        task: analyze::Task,
        /// Result CSV files written by energy/torque/sweep.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Combine records from different configurations.
        #[arg(long)]
        force: bool,
        /// Temperatures for the crossover task.
        #[arg(long = "temperature-k", value_delimiter = ',', default_values_t = [30.0, 300.0])]
        temperature_k: Vec<f64>,
    },
    /// Run the invariant suite on the configured (or default) film.
    Validate,
}

impl Cli {
    /// Loads the configuration and applies command-line overrides.
    fn run_config(&self) -> Result<RunConfig, CliError> {
        let path = self
            .config
            .as_deref()
            .ok_or_else(|| CliError::config("--config <path> is required for this command"))?;
        let mut cfg = RunConfig::load(path)?;
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance.relative = Some(t);
        }
        if let Some(w) = self.workers {
            cfg.output.workers = Some(w);
        }
        if let Some(o) = &self.out {
            cfg.output.path = Some(o.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn workers(cfg: &RunConfig) -> usize {
    cfg.output
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn output_path(cfg: &RunConfig, default: &str) -> PathBuf {
    cfg.output.path.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn sidecar(cfg: &RunConfig, verb: &str, points: usize, failures: &serde_json::Value) -> serde_json::Value {
    let mut numbers = cfg.clone();
    numbers.output = Default::default();
    let o = cfg.lifshitz_options();
    json!({
        "program": "cnt-casimir",
        "version": env!("CARGO_PKG_VERSION"),
        "verb": verb,
        "config_hash": cfg.hash(),
        "config": numbers,
        "tolerances": {
            "relative": o.quadrature.relative_tolerance,
            "angular": o.angular_tolerance,
            "matsubara_tail": o.tail_tolerance,
            "max_terms": o.max_terms,
            "min_kappa_D": o.min_kappa_d,
        },
        "points": points,
        "failures": failures,
    })
}

/// Executes one command; the caller maps errors to exit codes.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Conductivity => {
            let cfg = cli.run_config()?;
            let rows = conductivity::table(&cfg)?;
            let out = output_path(&cfg, "conductivity.csv");
            write_csv(&out, &rows)?;
            write_json(&sidecar_path(&out), &sidecar(&cfg, "conductivity", rows.len(), &json!([])))?;
            log::info!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
        Command::Energy | Command::Torque | Command::Sweep => {
            let cfg = cli.run_config()?;
            let (what, verb) = match cli.command {
                Command::Energy => (Quantities::ENERGY, "energy"),
                Command::Torque => (Quantities::TORQUE, "torque"),
                _ => (Quantities::BOTH, "sweep"),
            };
            let out = output_path(&cfg, &format!("{verb}.csv"));
            let result = sweep::run(&cfg, what, workers(&cfg), cli.debug_checks)?;
            write_csv(&out, &result.records)?;
            let failures = serde_json::to_value(&result.failures).map_err(|e| CliError::Io(e.to_string()))?;
            write_json(&sidecar_path(&out), &sidecar(&cfg, verb, result.records.len(), &failures))?;
            log::info!("wrote {} records to {}", result.records.len(), out.display());
            match result.failures.first() {
                None => Ok(()),
                Some(f) => Err(CliError::Numeric {
                    failed: result.failures.len(),
                    total: result.records.len(),
                    first: f.error.clone(),
                }),
            }
        }
        Command::Analyze {
            task,
            inputs,
            force,
            temperature_k,
        } => {
            let mut records = Vec::new();
            for p in inputs {
                records.extend(records::read_records(p)?);
            }
            analyze::check_hashes(&records, *force)?;
            let report = analyze::analyze(&records, *task, temperature_k)?;
            print!("{}", report.to_text());
            if let Some(out) = &cli.out {
                write_json(out, &serde_json::to_value(&report).map_err(|e| CliError::Io(e.to_string()))?)?;
            }
            Ok(())
        }
        Command::Validate => {
            let films = match &cli.config {
                Some(_) => {
                    let cfg = cli.run_config()?;
                    sweep::film_pairs(&cfg, cfg.lifshitz_options())?.swap_remove(0)
                }
                None => default_films()?,
            };
            let checks = validate::run(&films);
            for c in &checks {
                println!("{}", c.line());
            }
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(failed.join("; ")))
            }
        }
    }
}

/// (12,0) tubes at Δ = 10R with the default parameters.
pub fn default_films() -> Result<FilmPair, CliError> {
    let spec = FilmSpec::new(Chirality::new(12, 0)?, 10.0);
    Ok(FilmPair::identical(Sheet::array(spec)?))
}

/// Reads a configuration file without command-line overrides.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    RunConfig::load(path)
}
