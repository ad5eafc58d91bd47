//! Interband conductivity of a single tube per unit surface: model
//! variants on the real axis and a cached transform onto the imaginary axis.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tight_binding::{kubo_transitions, KuboTransition};
use super::{Chirality, ElectronicParams, Frequency, SpectralPoint};
use crate::numerics::{kk_to_imaginary_axis, SpectralSamples, SpectralTail};
use crate::units::{ev_to_rad_per_s, rad_per_s_to_ev, SIGMA0};
use crate::{Error, Result};

/// One Lorentz oscillator; conductivity in units of `σ₀ = αc/4`,
///
/// `σ(ω)/σ₀ = s · (-iħω w)/(E_c² - (ħω)² - iħω w)`,
///
/// so that `Re σ/σ₀` peaks at `s` when `ħω = E_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillator {
    pub center_ev: f64,
    pub strength: f64,
    pub width_ev: f64,
}

/// Which interband model a film uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterbandModel {
    /// Zone-folding tight binding (zigzag tubes) with Kubo–Greenwood and
    /// Lorentzian broadening. The hopping comes from [`ElectronicParams`].
    TightBindingKubo {
        #[serde(default = "default_broadening", rename = "broadening_eV")]
        broadening_ev: f64,
        #[serde(default = "default_k_points")]
        k_points: usize,
    },
    LorentzOscillators { oscillators: Vec<Oscillator> },
    /// Delimited file with columns
    /// `omega_eV, re_sigma_over_sigma0, im_sigma_over_sigma0`.
    Tabulated { path: PathBuf },
}

fn default_broadening() -> f64 {
    0.05
}

fn default_k_points() -> usize {
    600
}

impl Default for InterbandModel {
    fn default() -> Self {
        InterbandModel::TightBindingKubo {
            broadening_ev: default_broadening(),
            k_points: default_k_points(),
        }
    }
}

impl InterbandModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            InterbandModel::TightBindingKubo {
                broadening_ev,
                k_points,
            } => {
                if !(*broadening_ev > 0.0) {
                    return Err(Error::InvalidParameter("interband broadening must be > 0".into()));
                }
                if *k_points == 0 {
                    return Err(Error::InvalidParameter("k_points must be >= 1".into()));
                }
            }
            InterbandModel::LorentzOscillators { oscillators } => {
                for (i, o) in oscillators.iter().enumerate() {
                    if !(o.strength >= 0.0) {
                        return Err(Error::InvalidParameter(format!(
                            "oscillator {i}: strength must be >= 0"
                        )));
                    }
                    if !(o.width_ev > 0.0) || !(o.center_ev > 0.0) {
                        return Err(Error::InvalidParameter(format!(
                            "oscillator {i}: center and width must be > 0"
                        )));
                    }
                }
            }
            InterbandModel::Tabulated { .. } => {}
        }
        Ok(())
    }
}

/// Tabulated `σ(ω)/σ₀` on a strictly increasing `ħω` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedConductivity {
    pub omega_ev: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Deserialize)]
struct Row {
    #[serde(rename = "omega_eV")]
    omega_ev: f64,
    re_sigma_over_sigma0: f64,
    im_sigma_over_sigma0: f64,
}

impl TabulatedConductivity {
    pub fn new(omega_ev: Vec<f64>, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if omega_ev.len() != re.len() || omega_ev.len() != im.len() || omega_ev.len() < 2 {
            return Err(Error::Spectral("table needs at least two complete rows".into()));
        }
        if let Some(i) = omega_ev.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Spectral(format!(
                "omega_eV must be strictly increasing (data row {})",
                i + 2
            )));
        }
        if omega_ev[0] < 0.0 {
            return Err(Error::Spectral("omega_eV must be >= 0".into()));
        }
        if let Some(i) = re.iter().position(|&v| !(v >= 0.0)) {
            return Err(Error::Spectral(format!(
                "re_sigma_over_sigma0 must be >= 0 (data row {})",
                i + 1
            )));
        }
        Ok(Self { omega_ev, re, im })
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let (mut w, mut re, mut im) = (Vec::new(), Vec::new(), Vec::new());
        for row in rdr.deserialize::<Row>() {
            let row = row?;
            w.push(row.omega_ev);
            re.push(row.re_sigma_over_sigma0);
            im.push(row.im_sigma_over_sigma0);
        }
        Self::new(w, re, im)
    }

    fn interpolate(&self, x_ev: f64) -> Complex64 {
        let n = self.omega_ev.len();
        if x_ev < self.omega_ev[0] || x_ev > self.omega_ev[n - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let i = (self.omega_ev.partition_point(|&w| w <= x_ev).max(1) - 1).min(n - 2);
        let t = (x_ev - self.omega_ev[i]) / (self.omega_ev[i + 1] - self.omega_ev[i]);
        Complex64::new(
            self.re[i] + t * (self.re[i + 1] - self.re[i]),
            self.im[i] + t * (self.im[i + 1] - self.im[i]),
        )
    }
}

/// Reads a tabulated conductivity file.
pub fn load_tabulated(path: &Path) -> Result<TabulatedConductivity> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    TabulatedConductivity::from_reader(file)
        .map_err(|e| Error::Spectral(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone)]
enum Source {
    Zero,
    Kubo {
        transitions: Vec<KuboTransition>,
        broadening_ev: f64,
        top_ev: f64,
    },
    Lorentz(Vec<Oscillator>),
    Tabulated(TabulatedConductivity),
}

/// Log-spaced imaginary-axis table.
const TABLE_XI_MIN: f64 = 1e10;
const TABLE_XI_MAX: f64 = 1e19;
const TABLE_PER_DECADE: usize = 48;
/// Real-axis sampling step for the transform, eV.
const REAL_AXIS_STEP_EV: f64 = 0.005;

/// Interband response of one tube, ready for repeated evaluation.
///
/// The imaginary-axis table is built on first use and then shared
/// read-only, so a response can be wrapped in an `Arc` and used from many
/// threads.
#[derive(Debug)]
pub struct InterbandResponse {
    source: Source,
    samples: OnceLock<Result<SpectralSamples>>,
    table: OnceLock<Result<Vec<f64>>>,
}

impl InterbandResponse {
    pub fn new(model: &InterbandModel, ch: Chirality, ep: &ElectronicParams) -> Result<Self> {
        model.validate()?;
        let source = match model {
            InterbandModel::TightBindingKubo {
                broadening_ev,
                k_points,
            } => {
                let transitions =
                    kubo_transitions(ch, ep.hopping_ev, ep.chemical_potential_ev, *k_points)?;
                Source::Kubo {
                    transitions,
                    broadening_ev: *broadening_ev,
                    top_ev: 6.0 * ep.hopping_ev + 40.0 * broadening_ev,
                }
            }
            InterbandModel::LorentzOscillators { oscillators } => {
                if oscillators.is_empty() {
                    log::warn!("empty oscillator list: interband conductivity is zero");
                    Source::Zero
                } else if oscillators.iter().all(|o| o.strength == 0.0) {
                    Source::Zero
                } else {
                    Source::Lorentz(oscillators.clone())
                }
            }
            InterbandModel::Tabulated { path } => Source::Tabulated(load_tabulated(path)?),
        };
        Ok(Self::from_source(source))
    }

    pub fn from_table(table: TabulatedConductivity) -> Self {
        Self::from_source(Source::Tabulated(table))
    }

    pub fn zero() -> Self {
        Self::from_source(Source::Zero)
    }

    fn from_source(source: Source) -> Self {
        Self {
            source,
            samples: OnceLock::new(),
            table: OnceLock::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.source, Source::Zero)
    }

    /// Complex `σ_inter(ω)` (Gaussian, m/s) at real `ω ≥ 0`.
    pub fn real_axis(&self, omega: f64) -> Complex64 {
        let x = rad_per_s_to_ev(omega);
        match &self.source {
            Source::Zero => Complex64::new(0.0, 0.0),
            Source::Kubo {
                transitions,
                broadening_ev,
                ..
            } => {
                let g = *broadening_ev;
                let mut acc = Complex64::new(0.0, 0.0);
                for t in transitions {
                    let a = Complex64::new(x - t.energy_ev, g).inv();
                    let b = Complex64::new(x + t.energy_ev, g).inv();
                    acc += t.weight * (a + b);
                }
                Complex64::new(0.0, 1.0 / std::f64::consts::PI) * acc
            }
            Source::Lorentz(osc) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for o in osc {
                    let num = Complex64::new(0.0, -x * o.width_ev);
                    let den = Complex64::new(o.center_ev * o.center_ev - x * x, -x * o.width_ev);
                    acc += o.strength * num / den;
                }
                SIGMA0 * acc
            }
            Source::Tabulated(t) => SIGMA0 * t.interpolate(x),
        }
    }

    /// Closed-form `σ_inter(iξ)` where the model admits one (tight binding and
    /// oscillators); `None` for tabulated data.
    pub fn analytic_imaginary_axis(&self, xi: f64) -> Option<f64> {
        let y = rad_per_s_to_ev(xi);
        match &self.source {
            Source::Zero => Some(0.0),
            Source::Kubo {
                transitions,
                broadening_ev,
                ..
            } => {
                let s = y + broadening_ev;
                let acc: f64 = transitions
                    .iter()
                    .map(|t| t.weight * 2.0 * s / (s * s + t.energy_ev * t.energy_ev))
                    .sum();
                Some(acc / std::f64::consts::PI)
            }
            Source::Lorentz(osc) => Some(
                SIGMA0
                    * osc
                        .iter()
                        .map(|o| {
                            o.strength * y * o.width_ev
                                / (o.center_ev * o.center_ev + y * y + y * o.width_ev)
                        })
                        .sum::<f64>(),
            ),
            Source::Tabulated(_) => None,
        }
    }

    /// `Re σ_inter` sampled on the real axis for the dispersion transform.
    pub fn spectral_samples(&self) -> Result<&SpectralSamples> {
        self.samples
            .get_or_init(|| self.build_samples())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn build_samples(&self) -> Result<SpectralSamples> {
        let uniform = |top_ev: f64, step_ev: f64| -> Vec<f64> {
            let n = (top_ev / step_ev).ceil() as usize;
            (0..=n).map(|i| ev_to_rad_per_s(i as f64 * step_ev)).collect()
        };
        let (omega, tail) = match &self.source {
            Source::Zero => (vec![0.0, 1.0], SpectralTail::None),
            Source::Kubo { top_ev, .. } => {
                (uniform(*top_ev, REAL_AXIS_STEP_EV), SpectralTail::InverseSquare)
            }
            Source::Lorentz(osc) => {
                let top = osc
                    .iter()
                    // The ω⁻² tail is only accurate well above the resonances.
                    .map(|o| (o.center_ev + 40.0 * o.width_ev).max(10.0 * o.center_ev))
                    .fold(0.0, f64::max);
                let step = osc
                    .iter()
                    .map(|o| o.width_ev / 10.0)
                    .fold(REAL_AXIS_STEP_EV, f64::min);
                (uniform(top, step), SpectralTail::InverseSquare)
            }
            Source::Tabulated(t) => (
                t.omega_ev.iter().map(|&w| ev_to_rad_per_s(w)).collect(),
                SpectralTail::None,
            ),
        };
        let re = match &self.source {
            Source::Tabulated(t) => t.re.iter().map(|&r| r * SIGMA0).collect(),
            _ => omega.iter().map(|&w| self.real_axis(w).re.max(0.0)).collect(),
        };
        SpectralSamples::new(omega, re, tail)
    }

    /// `σ_inter(iξ)` from the dispersion transform of the sampled real
    /// axis, without the cache.
    pub fn imaginary_axis_uncached(&self, xi: f64) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        kk_to_imaginary_axis(self.spectral_samples()?, xi)
    }

    fn table(&self) -> Result<&[f64]> {
        self.table
            .get_or_init(|| {
                (0..table_len())
                    .map(|i| self.imaginary_axis_uncached(table_xi(i)))
                    .collect()
            })
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    /// `σ_inter(iξ)` (Gaussian, m/s), `ξ ≥ 0`.
    ///
    /// Inside `[1e10, 1e19]` rad/s the value comes from a log-spaced table
    /// (48 points per decade, Catmull–Rom in `ln ξ`); outside it the
    /// transform is evaluated directly.
    pub fn imaginary_axis(&self, xi: f64) -> Result<f64> {
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(Error::Domain {
                function: "sigma_inter_imag_axis",
                value: xi,
                reason: "imaginary frequency must be finite and >= 0",
            });
        }
        if self.is_zero() {
            return Ok(0.0);
        }
        if !(TABLE_XI_MIN..TABLE_XI_MAX).contains(&xi) {
            return self.imaginary_axis_uncached(xi);
        }
        let table = self.table()?;
        let u = (xi / TABLE_XI_MIN).log10() * TABLE_PER_DECADE as f64;
        Ok(catmull_rom(table, u).max(0.0))
    }
}

fn table_len() -> usize {
    ((TABLE_XI_MAX / TABLE_XI_MIN).log10().round() as usize) * TABLE_PER_DECADE + 1
}

fn table_xi(i: usize) -> f64 {
    TABLE_XI_MIN * 10f64.powf(i as f64 / TABLE_PER_DECADE as f64)
}

/// Catmull–Rom interpolation of uniformly spaced `p` at fractional index `u`.
fn catmull_rom(p: &[f64], u: f64) -> f64 {
    let n = p.len();
    let i = (u.floor() as usize).min(n - 2);
    let t = u - i as f64;
    let at = |j: isize| -> f64 {
        if j < 0 {
            2.0 * p[0] - p[1]
        } else if j as usize >= n {
            2.0 * p[n - 1] - p[n - 2]
        } else {
            p[j as usize]
        }
    };
    let i = i as isize;
    let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    0.5 * (2.0 * p1
        + (p2 - p0) * t
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t
        + (3.0 * p1 - p0 - 3.0 * p2 + p3) * t * t * t)
}

/// Complex interband conductivity on the real axis (Gaussian, m/s). The
/// interband term is taken local in `k_y` and temperature independent.
pub fn sigma_inter_real_axis(
    pt: &SpectralPoint,
    ch: Chirality,
    ep: &ElectronicParams,
    model: &InterbandModel,
) -> Result<Complex64> {
    pt.validate()?;
    let omega = match pt.frequency {
        Frequency::Real(w) if w > 0.0 => w,
        Frequency::Real(w) => {
            return Err(Error::Domain {
                function: "sigma_inter_real_axis",
                value: w,
                reason: "real frequency must be > 0",
            })
        }
        Frequency::Imaginary(_) => {
            return Err(Error::InvalidParameter(
                "sigma_inter_real_axis takes a real-axis point".into(),
            ))
        }
    };
    Ok(InterbandResponse::new(model, ch, ep)?.real_axis(omega))
}

/// Interband conductivity on the imaginary axis through a prepared
/// response (the cache lives in `response`).
pub fn sigma_inter_imag_axis(pt: &SpectralPoint, response: &InterbandResponse) -> Result<f64> {
    pt.validate()?;
    match pt.frequency {
        Frequency::Imaginary(xi) => response.imaginary_axis(xi),
        Frequency::Real(_) => Err(Error::InvalidParameter(
            "sigma_inter_imag_axis takes an imaginary-axis point".into(),
        )),
    }
}
