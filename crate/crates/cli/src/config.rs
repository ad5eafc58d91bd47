//! Run configuration (TOML). Every physical quantity carries its unit in
//! the key name.

use std::path::{Path, PathBuf};

use cnt_casimir::film::FilmSpec;
use cnt_casimir::lifshitz::{FresnelFrame, LifshitzOptions, Mode, ZeroFrequencyBranch};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_mode")]
    pub mode: Mode,
    pub film: FilmSpec,
    /// Second film; the first one is used for both when absent.
    #[serde(default)]
    pub second_film: Option<FilmSpec>,
    /// Axes of the Fresnel matrix: `film_axes` or `wave_vector`.
    #[serde(default)]
    pub fresnel_frame: FresnelFrame,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub conductivity: ConductivityConfig,
    #[serde(default)]
    pub tolerance: ToleranceConfig,
    /// Not part of the config hash.
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_mode() -> Mode {
    Mode::Matsubara
}

/// A list of values or an evenly spaced range (log-spaced for `D_nm`,
/// linear otherwise; both ends included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range { min: f64, max: f64, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl Axis {
    pub fn values(&self, spacing: Spacing) -> Vec<f64> {
        match *self {
            Axis::Values(ref v) => v.clone(),
            Axis::Range { min, max, count } => {
                if count == 1 {
                    return vec![min];
                }
                (0..count)
                    .map(|i| {
                        let t = i as f64 / (count - 1) as f64;
                        match spacing {
                            Spacing::Linear => min + t * (max - min),
                            Spacing::Log => min * (max / min).powf(t),
                        }
                    })
                    .collect()
            }
        }
    }

    fn check(&self, name: &str, spacing: Spacing) -> Result<(), CliError> {
        if let Axis::Range { min, max, count } = *self {
            if count == 0 {
                return Err(CliError::config(format!("{name}: count must be >= 1")));
            }
            if !(min.is_finite() && max.is_finite()) || max < min {
                return Err(CliError::config(format!("{name}: need finite min <= max")));
            }
            if spacing == Spacing::Log && !(min > 0.0) {
                return Err(CliError::config(format!("{name}: log-spaced range needs min > 0")));
            }
        }
        let v = self.values(spacing);
        if v.is_empty() {
            return Err(CliError::config(format!("{name}: grid is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::config(format!("{name}: non-finite value")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "T_K", default = "default_temperatures")]
    pub temperature_k: Vec<f64>,
    /// Spacings to sweep; the film's own `Delta_over_R` when absent.
    #[serde(rename = "Delta_over_R", default)]
    pub delta_over_r: Option<Vec<f64>>,
    #[serde(rename = "D_nm", default = "default_separations")]
    pub separation_nm: Axis,
    #[serde(rename = "phi_rad", default = "default_angles")]
    pub angle_rad: Axis,
}

fn default_temperatures() -> Vec<f64> {
    vec![300.0]
}

fn default_separations() -> Axis {
    Axis::Values(vec![100.0])
}

fn default_angles() -> Axis {
    Axis::Values(vec![std::f64::consts::FRAC_PI_8])
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            temperature_k: default_temperatures(),
            delta_over_r: None,
            separation_nm: default_separations(),
            angle_rad: default_angles(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConductivityConfig {
    /// `k_y R`, dimensionless.
    #[serde(rename = "k_y_times_R", default = "one")]
    pub k_y_times_r: f64,
    #[serde(rename = "hbar_omega_eV", default = "default_omega")]
    pub hbar_omega_ev: Axis,
    /// Log-spaced imaginary frequencies.
    #[serde(rename = "hbar_xi_eV", default = "default_xi")]
    pub hbar_xi_ev: Axis,
    /// Temperature entering the intraband thermal factor.
    #[serde(rename = "T_K", default)]
    pub temperature_k: f64,
}

fn one() -> f64 {
    1.0
}

fn default_omega() -> Axis {
    Axis::Range {
        min: 0.01,
        max: 4.0,
        count: 400,
    }
}

fn default_xi() -> Axis {
    Axis::Range {
        min: 1e-3,
        max: 10.0,
        count: 161,
    }
}

impl Default for ConductivityConfig {
    fn default() -> Self {
        Self {
            k_y_times_r: 1.0,
            hbar_omega_ev: default_omega(),
            hbar_xi_ev: default_xi(),
            temperature_k: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Relative tolerance of the momentum (and quantum-mode frequency)
    /// integrals.
    pub relative: Option<f64>,
    pub angular: Option<f64>,
    pub matsubara_tail: Option<f64>,
    pub max_terms: Option<usize>,
    #[serde(default)]
    pub zero_frequency: ZeroFrequencyBranch,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        // toml's error display carries the line, column and offending key.
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.film
            .validate()
            .map_err(|e| CliError::config(format!("film: {e}")))?;
        if let Some(f) = &self.second_film {
            f.validate()
                .map_err(|e| CliError::config(format!("second_film: {e}")))?;
        }
        let g = &self.grid;
        if g.temperature_k.is_empty() {
            return Err(CliError::config("grid.T_K: grid is empty"));
        }
        if g.temperature_k.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(CliError::config("grid.T_K: temperatures must be finite and >= 0"));
        }
        if self.mode != Mode::Quantum && g.temperature_k.iter().any(|&t| t == 0.0) {
            return Err(CliError::config(format!(
                "grid.T_K: {} mode needs T > 0 (use mode = \"quantum\" for T = 0)",
                self.mode
            )));
        }
        if let Some(d) = &g.delta_over_r {
            if d.is_empty() {
                return Err(CliError::config("grid.Delta_over_R: grid is empty"));
            }
            for &x in d {
                let mut f = self.film.clone();
                f.delta_over_r = x;
                f.validate()
                    .map_err(|e| CliError::config(format!("grid.Delta_over_R = {x}: {e}")))?;
            }
        }
        g.separation_nm.check("grid.D_nm", Spacing::Log)?;
        if g.separation_nm.values(Spacing::Log).iter().any(|&d| !(d > 0.0)) {
            return Err(CliError::config("grid.D_nm: separations must be > 0"));
        }
        g.angle_rad.check("grid.phi_rad", Spacing::Linear)?;
        let c = &self.conductivity;
        if !(c.k_y_times_r >= 0.0) || !c.k_y_times_r.is_finite() {
            return Err(CliError::config("conductivity.k_y_times_R must be finite and >= 0"));
        }
        c.hbar_omega_ev.check("conductivity.hbar_omega_eV", Spacing::Linear)?;
        c.hbar_xi_ev.check("conductivity.hbar_xi_eV", Spacing::Log)?;
        if !(c.temperature_k >= 0.0) {
            return Err(CliError::config("conductivity.T_K must be >= 0"));
        }
        let t = &self.tolerance;
        for (name, v) in [
            ("relative", t.relative),
            ("angular", t.angular),
            ("matsubara_tail", t.matsubara_tail),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v < 1.0) {
                    return Err(CliError::config(format!("tolerance.{name} must be in (0, 1)")));
                }
            }
        }
        if t.max_terms == Some(0) {
            return Err(CliError::config("tolerance.max_terms must be >= 1"));
        }
        if self.output.workers == Some(0) {
            return Err(CliError::config("output.workers must be >= 1"));
        }
        Ok(())
    }

    pub fn temperatures(&self) -> Vec<f64> {
        if self.mode == Mode::Quantum {
            vec![0.0]
        } else {
            self.grid.temperature_k.clone()
        }
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.grid
            .delta_over_r
            .clone()
            .unwrap_or_else(|| vec![self.film.delta_over_r])
    }

    pub fn separations(&self) -> Vec<f64> {
        self.grid.separation_nm.values(Spacing::Log)
    }

    pub fn angles(&self) -> Vec<f64> {
        self.grid.angle_rad.values(Spacing::Linear)
    }

    pub fn lifshitz_options(&self) -> LifshitzOptions {
        let mut o = LifshitzOptions::default();
        if let Some(r) = self.tolerance.relative {
            o = o.with_tolerance(r);
        }
        if let Some(a) = self.tolerance.angular {
            o.angular_tolerance = a;
        }
        if let Some(t) = self.tolerance.matsubara_tail {
            o.tail_tolerance = t;
        }
        if let Some(m) = self.tolerance.max_terms {
            o.max_terms = m;
        }
        o.zero_frequency = self.tolerance.zero_frequency;
        o.frame = self.fresnel_frame;
        o
    }

    /// Short SHA-256 of everything that affects the numbers (the output
    /// section is excluded, so worker count and paths do not change it).
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = OutputConfig::default();
        let json = serde_json::to_string(&canonical).expect("config serialises");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(&digest[..8])
    }
}
