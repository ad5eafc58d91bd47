//! Conductivity tables on the real and imaginary frequency axes.

use cnt_casimir::film::ArrayFilm;
use cnt_casimir::units::{ev_to_rad_per_s, NM, SIGMA0};
use serde::Serialize;

use crate::config::{RunConfig, Spacing};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConductivityRow {
    pub axis: &'static str,
    #[serde(rename = "Delta_over_R")]
    pub delta_over_r: f64,
    #[serde(rename = "hbar_eV")]
    pub hbar_ev: f64,
    pub k_y_per_m: f64,
    pub sigma_yy_re_over_sigma0: f64,
    pub sigma_yy_im_over_sigma0: f64,
    pub sigma_xx_re_over_sigma0: f64,
    pub sigma_xx_im_over_sigma0: f64,
    pub config_hash: String,
}

/// `σ_yy/σ₀` and `σ_xx/σ₀` on both axes for every configured spacing.
pub fn table(cfg: &RunConfig) -> Result<Vec<ConductivityRow>, CliError> {
    let c = &cfg.conductivity;
    let hash = cfg.hash();
    let mut rows = Vec::new();
    for delta in cfg.deltas() {
        let mut spec = cfg.film.clone();
        spec.delta_over_r = delta;
        let film = ArrayFilm::new(spec.clone())?;
        let k = c.k_y_times_r / (spec.radius_nm() * NM);
        for e in c.hbar_omega_ev.values(Spacing::Linear) {
            let w = ev_to_rad_per_s(e);
            let yy = film.sigma_yy_real_axis(w, k, c.temperature_k)?;
            let xx = film.sigma_xx_real_axis(w);
            rows.push(ConductivityRow {
                axis: "real",
                delta_over_r: delta,
                hbar_ev: e,
                k_y_per_m: k,
                sigma_yy_re_over_sigma0: yy.re / SIGMA0,
                sigma_yy_im_over_sigma0: yy.im / SIGMA0,
                sigma_xx_re_over_sigma0: xx.re / SIGMA0,
                sigma_xx_im_over_sigma0: xx.im / SIGMA0,
                config_hash: hash.clone(),
            });
        }
        for e in c.hbar_xi_ev.values(Spacing::Log) {
            let xi = ev_to_rad_per_s(e);
            rows.push(ConductivityRow {
                axis: "imaginary",
                delta_over_r: delta,
                hbar_ev: e,
                k_y_per_m: k,
                sigma_yy_re_over_sigma0: film.sigma_yy(xi, k, c.temperature_k)? / SIGMA0,
                sigma_yy_im_over_sigma0: 0.0,
                sigma_xx_re_over_sigma0: film.sigma_xx(xi)? / SIGMA0,
                sigma_xx_im_over_sigma0: 0.0,
                config_hash: hash.clone(),
            });
        }
    }
    Ok(rows)
}
