//! Grid evaluation of energy and torque.

use std::sync::Arc;

use cnt_casimir::film::{ArrayFilm, FilmSpec, Sheet};
use cnt_casimir::lifshitz::{CasimirPoint, FilmPair, LifshitzOptions};
use cnt_casimir::numerics::central_derivative;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::records::{Failure, ResultRecord};

/// Which quantities to evaluate at each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quantities {
    pub energy: bool,
    pub torque: bool,
}

impl Quantities {
    pub const ENERGY: Self = Self {
        energy: true,
        torque: false,
    };
    pub const TORQUE: Self = Self {
        energy: false,
        torque: true,
    };
    pub const BOTH: Self = Self {
        energy: true,
        torque: true,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct GridPoint {
    delta_index: usize,
    delta_over_r: f64,
    point: CasimirPoint,
}

pub struct SweepOutput {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<Failure>,
}

fn with_delta(spec: &FilmSpec, delta_over_r: f64) -> FilmSpec {
    let mut s = spec.clone();
    s.delta_over_r = delta_over_r;
    s
}

/// One film pair per spacing; identical films share the interband cache.
pub fn film_pairs(cfg: &RunConfig, options: LifshitzOptions) -> Result<Vec<FilmPair>, CliError> {
    cfg.deltas()
        .into_iter()
        .map(|delta| {
            let first = Arc::new(ArrayFilm::new(with_delta(&cfg.film, delta))?);
            let second = match &cfg.second_film {
                None => Arc::clone(&first),
                Some(s) => Arc::new(ArrayFilm::new(with_delta(s, delta))?),
            };
            Ok(FilmPair::new(Sheet::Array(first), Sheet::Array(second)).with_options(options))
        })
        .collect::<Result<_, cnt_casimir::Error>>()
        .map_err(|e| CliError::config(format!("film: {e}")))
}

/// Evaluates the configured grid in `(T, Δ, D, φ)` order. The result does
/// not depend on `workers`.
pub fn run(cfg: &RunConfig, what: Quantities, workers: usize, debug_checks: bool) -> Result<SweepOutput, CliError> {
    let pairs = film_pairs(cfg, cfg.lifshitz_options())?;
    let hash = cfg.hash();
    let deltas = cfg.deltas();
    let mut grid = Vec::new();
    for t in cfg.temperatures() {
        for (i, &delta) in deltas.iter().enumerate() {
            for d in cfg.separations() {
                for phi in cfg.angles() {
                    grid.push(GridPoint {
                        delta_index: i,
                        delta_over_r: delta,
                        point: CasimirPoint::new(d, phi, t, cfg.mode),
                    });
                }
            }
        }
    }
    if debug_checks {
        for (pair, &delta) in pairs.iter().zip(&deltas) {
            pre_checks(pair, delta, cfg)?;
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::config(format!("cannot start {workers} workers: {e}")))?;
    let results: Vec<Result<ResultRecord, Failure>> = pool.install(|| {
        grid.par_iter()
            .map(|g| evaluate(&pairs[g.delta_index], g, what, &hash, debug_checks))
            .collect()
    });
    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (g, r) in grid.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(f) => {
                log::error!(
                    "T = {} K, Delta/R = {}, D = {} nm, phi = {} rad: {}",
                    f.temperature_k,
                    f.delta_over_r,
                    f.separation_nm,
                    f.angle_rad,
                    f.error
                );
                records.push(empty_record(g, &hash));
                failures.push(f);
            }
        }
    }
    Ok(SweepOutput { records, failures })
}

fn empty_record(g: &GridPoint, hash: &str) -> ResultRecord {
    ResultRecord {
        temperature_k: g.point.temperature_k,
        delta_over_r: g.delta_over_r,
        separation_nm: g.point.separation_nm,
        angle_rad: g.point.angle_rad,
        energy: None,
        energy_over_em: None,
        torque: None,
        torque_over_em: None,
        mode: g.point.mode,
        n_terms_used: 0,
        config_hash: hash.to_string(),
    }
}

fn evaluate(
    pair: &FilmPair,
    g: &GridPoint,
    what: Quantities,
    hash: &str,
    debug_checks: bool,
) -> Result<ResultRecord, Failure> {
    let pt = &g.point;
    let fail = |e: String| Failure {
        temperature_k: pt.temperature_k,
        delta_over_r: g.delta_over_r,
        separation_nm: pt.separation_nm,
        angle_rad: pt.angle_rad,
        error: e,
    };
    let mut rec = empty_record(g, hash);
    let em = pt.e_m();
    if what.energy {
        let e = pair.energy(pt).map_err(|e| fail(e.to_string()))?;
        rec.energy = Some(e.value);
        rec.energy_over_em = Some(e.value / em);
        rec.n_terms_used = e.n_terms;
    }
    if what.torque {
        let t = pair.torque(pt).map_err(|e| fail(e.to_string()))?;
        rec.torque = Some(t.value);
        rec.torque_over_em = Some(t.value / em);
        rec.n_terms_used = rec.n_terms_used.max(t.n_terms);
        if debug_checks && t.value != 0.0 {
            let de = central_derivative(
                |phi| Ok(pair.energy(&CasimirPoint { angle_rad: phi, ..*pt })?.value),
                pt.angle_rad,
                1e-2,
            )
            .map_err(|e| fail(e.to_string()))?;
            let rel = (t.value + de.value).abs() / t.value.abs();
            if rel > 1e-3 {
                log::warn!(
                    "torque {:e} differs from -dE/dphi {:e} by {rel:.2e} at D = {} nm, phi = {}",
                    t.value,
                    -de.value,
                    pt.separation_nm,
                    pt.angle_rad
                );
            }
        }
    }
    Ok(rec)
}

/// Checks that are too slow or too noisy for every run.
fn pre_checks(pair: &FilmPair, delta: f64, cfg: &RunConfig) -> Result<(), CliError> {
    for sheet in [&pair.first, &pair.second] {
        if let Some(film) = sheet.film() {
            let r = film.spec().radius_nm() * 1e-9;
            let xi: Vec<f64> = (0..40).map(|i| 1e11 * 10f64.powf(i as f64 / 6.0)).collect();
            let k: Vec<f64> = (0..20).map(|i| 1e-3 / r * 10f64.powf(i as f64 / 5.0)).collect();
            film.check_collective_convention(&xi, &k)
                .map_err(|e| CliError::config(format!("Delta/R = {delta}: {e}")))?;
        }
    }
    let t = cfg.temperatures().into_iter().fold(0.0, f64::max).max(1.0);
    for d in cfg.separations() {
        let k = 1.0 / (2.0 * d * 1e-9);
        let rep = pair.zero_frequency_report(0.0, k, 0.4, t)?;
        log::info!(
            "Delta/R = {delta}, k = {k:e} 1/m: numeric n = 0 limit {:?} vs stated {:?}",
            rep.extrapolated,
            rep.stated
        );
    }
    Ok(())
}
