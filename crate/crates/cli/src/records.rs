//! Result records and their CSV/JSON serialisation.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use cnt_casimir::lifshitz::Mode;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One grid point. Missing quantities (not requested, or failed) are
/// written as empty cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    #[serde(rename = "T_K")]
    pub temperature_k: f64,
    #[serde(rename = "Delta_over_R")]
    pub delta_over_r: f64,
    #[serde(rename = "D_nm")]
    pub separation_nm: f64,
    #[serde(rename = "phi_rad")]
    pub angle_rad: f64,
    #[serde(rename = "E_J_per_m2")]
    pub energy: Option<f64>,
    #[serde(rename = "E_over_EM")]
    pub energy_over_em: Option<f64>,
    #[serde(rename = "torque_Nm_per_m2")]
    pub torque: Option<f64>,
    #[serde(rename = "torque_over_EM")]
    pub torque_over_em: Option<f64>,
    pub mode: Mode,
    pub n_terms_used: usize,
    pub config_hash: String,
}

/// A grid point that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    #[serde(rename = "T_K")]
    pub temperature_k: f64,
    #[serde(rename = "Delta_over_R")]
    pub delta_over_r: f64,
    #[serde(rename = "D_nm")]
    pub separation_nm: f64,
    #[serde(rename = "phi_rad")]
    pub angle_rad: f64,
    pub error: String,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<ResultRecord>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .map(|row| row.map_err(|e| CliError::config(format!("{}: {e}", path.display()))))
        .collect()
}

/// `results.csv` → `results.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| CliError::Io(e.to_string()))?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_keeps_empty_cells() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rec = ResultRecord {
            temperature_k: 10.0,
            delta_over_r: 10.0,
            separation_nm: 50.0,
            angle_rad: 0.39,
            energy: Some(-1.25e-9),
            energy_over_em: Some(3.6e-4),
            torque: None,
            torque_over_em: None,
            mode: Mode::Matsubara,
            n_terms_used: 42,
            config_hash: "abcd".into(),
        };
        write_csv(&path, &[rec.clone()]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            "T_K,Delta_over_R,D_nm,phi_rad,E_J_per_m2,E_over_EM,torque_Nm_per_m2,torque_over_EM,mode,n_terms_used,config_hash\n"
        ));
        assert!(text.contains(",,,matsubara,42,abcd"));
        assert_eq!(read_records(&path).unwrap(), vec![rec]);
    }
}
