//! Post-processing of result files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use cnt_casimir::analysis::{
    crossover_by_bisection, fit_sin2phi, local_log_slope, sign_flip_by_bisection, CrossoverResult,
    ScalingResult, Sin2PhiFit,
};
use cnt_casimir::lifshitz::Mode;
use cnt_casimir::units::{thermal_energy, NM};
use clap::ValueEnum;
use serde::Serialize;

use crate::error::CliError;
use crate::records::ResultRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Local exponent p(D) of E ~ D^-p per (T, Delta, phi).
    Scaling,
    /// Separation where |E_qm| = |E_T| per (Delta, phi, T), from quantum records.
    Crossover,
    /// Separation where the torque changes sign per (T, Delta, phi).
    Flip,
    /// Least-squares A sin(2 phi) fit of the torque per (T, Delta, D).
    Sinfit,
}

/// Bit-exact key for grouping records by floating-point coordinates.
type Key = (u64, u64, u64);

fn key(a: f64, b: f64, c: f64) -> Key {
    (a.to_bits(), b.to_bits(), c.to_bits())
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingEntry {
    #[serde(rename = "T_K")]
    pub temperature_k: f64,
    #[serde(rename = "Delta_over_R")]
    pub delta_over_r: f64,
    #[serde(rename = "phi_rad")]
    pub angle_rad: f64,
    pub result: ScalingResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossoverEntry {
    #[serde(rename = "T_K")]
    pub temperature_k: f64,
    #[serde(rename = "Delta_over_R")]
    pub delta_over_r: f64,
    #[serde(rename = "phi_rad")]
    pub angle_rad: f64,
    pub result: Option<CrossoverResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlipEntry {
    #[serde(rename = "T_K")]
    pub temperature_k: f64,
    #[serde(rename = "Delta_over_R")]
    pub delta_over_r: f64,
    #[serde(rename = "phi_rad")]
    pub angle_rad: f64,
    pub flip_nm: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SinfitEntry {
    #[serde(rename = "T_K")]
    pub temperature_k: f64,
    #[serde(rename = "Delta_over_R")]
    pub delta_over_r: f64,
    #[serde(rename = "D_nm")]
    pub separation_nm: f64,
    pub fit: Sin2PhiFit,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum Report {
    Scaling { entries: Vec<ScalingEntry> },
    Crossover { entries: Vec<CrossoverEntry> },
    Flip { entries: Vec<FlipEntry> },
    Sinfit { entries: Vec<SinfitEntry> },
}

/// Refuses records from different configurations unless `force`.
pub fn check_hashes(records: &[ResultRecord], force: bool) -> Result<(), CliError> {
    let mut hashes: Vec<&str> = records.iter().map(|r| r.config_hash.as_str()).collect();
    hashes.sort_unstable();
    hashes.dedup();
    if hashes.len() > 1 && !force {
        return Err(CliError::config(format!(
            "inputs come from {} different configurations ({}); pass --force to combine them",
            hashes.len(),
            hashes.join(", ")
        )));
    }
    Ok(())
}

fn missing(task: &str, what: &str) -> CliError {
    CliError::config(format!("{task}: insufficient coverage, records lack {what}"))
}

/// Groups `(x, y)` pairs by key, sorted by `x`; drops rows without `y`.
fn group<F, G>(records: &[ResultRecord], k: F, xy: G) -> BTreeMap<Key, Vec<(f64, f64)>>
where
    F: Fn(&ResultRecord) -> Key,
    G: Fn(&ResultRecord) -> Option<(f64, f64)>,
{
    let mut out: BTreeMap<Key, Vec<(f64, f64)>> = BTreeMap::new();
    for r in records {
        if let Some(p) = xy(r) {
            out.entry(k(r)).or_default().push(p);
        }
    }
    for v in out.values_mut() {
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v.dedup_by(|a, b| a.0 == b.0);
    }
    out
}

fn unkey(k: Key) -> (f64, f64, f64) {
    (f64::from_bits(k.0), f64::from_bits(k.1), f64::from_bits(k.2))
}

/// Piecewise-linear interpolation of `y` in `ln x`.
fn interpolate(samples: &[(f64, f64)], x: f64) -> f64 {
    let i = samples.partition_point(|s| s.0 <= x).clamp(1, samples.len() - 1);
    let (x0, y0) = samples[i - 1];
    let (x1, y1) = samples[i];
    let t = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
    y0 + t * (y1 - y0)
}

pub fn analyze(records: &[ResultRecord], task: Task, temperatures_k: &[f64]) -> Result<Report, CliError> {
    if records.is_empty() {
        return Err(CliError::config("no records to analyze"));
    }
    match task {
        Task::Scaling => {
            let groups = group(
                records,
                |r| key(r.temperature_k, r.delta_over_r, r.angle_rad),
                |r| r.energy.map(|e| (r.separation_nm, e)),
            );
            if groups.is_empty() {
                return Err(missing("scaling", "the E_J_per_m2 column"));
            }
            let mut entries = Vec::new();
            for (k, s) in groups {
                let (t, delta, phi) = unkey(k);
                if s.len() < 3 {
                    return Err(missing(
                        "scaling",
                        &format!("a D_nm axis with >= 3 points at T = {t} K, Delta/R = {delta}, phi = {phi}"),
                    ));
                }
                entries.push(ScalingEntry {
                    temperature_k: t,
                    delta_over_r: delta,
                    angle_rad: phi,
                    result: local_log_slope(&s)?,
                });
            }
            Ok(Report::Scaling { entries })
        }
        Task::Crossover => {
            let quantum: Vec<ResultRecord> = records.iter().filter(|r| r.mode == Mode::Quantum).cloned().collect();
            if quantum.is_empty() {
                return Err(missing("crossover", "quantum-mode records"));
            }
            if temperatures_k.is_empty() {
                return Err(missing("crossover", "a temperature (pass --temperature-k)"));
            }
            let groups = group(
                &quantum,
                |r| key(0.0, r.delta_over_r, r.angle_rad),
                |r| r.energy.map(|e| (r.separation_nm, e)),
            );
            let mut entries = Vec::new();
            for (k, s) in groups {
                let (_, delta, phi) = unkey(k);
                if s.len() < 2 {
                    return Err(missing("crossover", "a D_nm axis with >= 2 points"));
                }
                let log_e: Vec<(f64, f64)> = s.iter().map(|&(d, e)| (d, e.abs().ln())).collect();
                for &t in temperatures_k {
                    let result = crossover_by_bisection(
                        |d| Ok((-interpolate(&log_e, d).exp(), thermal_energy(t, d * NM))),
                        (s[0].0, s[s.len() - 1].0),
                    )?;
                    entries.push(CrossoverEntry {
                        temperature_k: t,
                        delta_over_r: delta,
                        angle_rad: phi,
                        result,
                    });
                }
            }
            Ok(Report::Crossover { entries })
        }
        Task::Flip => {
            let groups = group(
                records,
                |r| key(r.temperature_k, r.delta_over_r, r.angle_rad),
                |r| r.torque.map(|t| (r.separation_nm, t)),
            );
            if groups.is_empty() {
                return Err(missing("flip", "the torque_Nm_per_m2 column"));
            }
            let mut entries = Vec::new();
            for (k, s) in groups {
                let (t, delta, phi) = unkey(k);
                let grid: Vec<f64> = s.iter().map(|p| p.0).collect();
                let flip = if s.len() < 2 {
                    None
                } else {
                    sign_flip_by_bisection(|d| Ok(interpolate(&s, d)), &grid)?
                };
                entries.push(FlipEntry {
                    temperature_k: t,
                    delta_over_r: delta,
                    angle_rad: phi,
                    flip_nm: flip,
                });
            }
            Ok(Report::Flip { entries })
        }
        Task::Sinfit => {
            let groups = group(
                records,
                |r| key(r.temperature_k, r.delta_over_r, r.separation_nm),
                |r| r.torque.map(|t| (r.angle_rad, t)),
            );
            if groups.is_empty() {
                return Err(missing("sinfit", "the torque_Nm_per_m2 column"));
            }
            let mut entries = Vec::new();
            for (k, s) in groups {
                let (t, delta, d) = unkey(k);
                if s.len() < 8 {
                    return Err(missing(
                        "sinfit",
                        &format!("a phi_rad axis with >= 8 points at T = {t} K, Delta/R = {delta}, D = {d} nm"),
                    ));
                }
                entries.push(SinfitEntry {
                    temperature_k: t,
                    delta_over_r: delta,
                    separation_nm: d,
                    fit: fit_sin2phi(&s)?,
                });
            }
            Ok(Report::Sinfit { entries })
        }
    }
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Scaling { entries } => {
                for e in entries {
                    let _ = writeln!(
                        s,
                        "T = {} K, Delta/R = {}, phi = {:.4} rad: D* = {}",
                        e.temperature_k,
                        e.delta_over_r,
                        e.angle_rad,
                        e.result
                            .transition_nm
                            .map_or("none".to_string(), |d| format!("{d:.2} nm"))
                    );
                    for (d, p) in e.result.separation_nm.iter().zip(&e.result.exponent) {
                        let _ = writeln!(s, "  D = {d:10.3} nm  p = {p:.4}");
                    }
                }
            }
            Report::Crossover { entries } => {
                for e in entries {
                    let _ = match &e.result {
                        Some(r) => writeln!(
                            s,
                            "T = {} K, Delta/R = {}, phi = {:.4} rad: D_c = {:.2} nm (bracket {:.2}..{:.2}, residual {:.1e})",
                            e.temperature_k, e.delta_over_r, e.angle_rad, r.separation_nm, r.bracket_nm.0, r.bracket_nm.1, r.residual
                        ),
                        None => writeln!(
                            s,
                            "T = {} K, Delta/R = {}, phi = {:.4} rad: no crossover on the D grid",
                            e.temperature_k, e.delta_over_r, e.angle_rad
                        ),
                    };
                }
            }
            Report::Flip { entries } => {
                for e in entries {
                    let _ = writeln!(
                        s,
                        "T = {} K, Delta/R = {}, phi = {:.4} rad: sign flip at {}",
                        e.temperature_k,
                        e.delta_over_r,
                        e.angle_rad,
                        e.flip_nm.map_or("none".to_string(), |d| format!("{d:.2} nm"))
                    );
                }
            }
            Report::Sinfit { entries } => {
                for e in entries {
                    let _ = writeln!(
                        s,
                        "T = {} K, Delta/R = {}, D = {} nm: A = {:e} N m/m^2, residual fraction {:.4}",
                        e.temperature_k, e.delta_over_r, e.separation_nm, e.fit.amplitude, e.fit.residual_fraction
                    );
                }
            }
        }
        s
    }
}
