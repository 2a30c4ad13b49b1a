//! Resilience sweep with optional placement/frame calibration.

use crate::config::RunConfig;
use crate::reference::REFERENCE;
use crate::CliError;
use mzm_cnot::noise::{ErrorUnitary, Placement};
use mzm_cnot::resilience::{calibrate, run_comparison, Calibration, ErrorFrame, StudyConfig, StudyPoint, StudyResult};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub p: f64,
    #[serde(rename = "F_enc_mean")]
    pub f_enc_mean: f64,
    #[serde(rename = "F_un_mean")]
    pub f_un_mean: f64,
    #[serde(rename = "F_enc_stderr")]
    pub f_enc_stderr: f64,
    #[serde(rename = "F_un_stderr")]
    pub f_un_stderr: f64,
    #[serde(rename = "P_avg")]
    pub p_avg: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExceedanceRow {
    pub p: f64,
    #[serde(rename = "P_avg")]
    pub p_avg: f64,
    #[serde(rename = "P_avg_bootstrap")]
    pub p_avg_bootstrap: f64,
}

impl From<&StudyPoint> for CurveRow {
    fn from(pt: &StudyPoint) -> Self {
        Self {
            p: pt.p,
            f_enc_mean: pt.f_enc_mean,
            f_un_mean: pt.f_un_mean,
            f_enc_stderr: pt.f_enc_stderr,
            f_un_stderr: pt.f_un_stderr,
            p_avg: pt.p_avg,
        }
    }
}

impl From<&StudyPoint> for ExceedanceRow {
    fn from(pt: &StudyPoint) -> Self {
        Self { p: pt.p, p_avg: pt.p_avg, p_avg_bootstrap: pt.p_avg_bootstrap }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResilienceSummary {
    pub p_th: Option<f64>,
    pub error_unitary: ErrorUnitary,
    pub placement: Placement,
    pub frame: ErrorFrame,
    pub n_samples: usize,
    pub master_seed: u64,
    pub calibration: Option<Calibration>,
    pub points: Vec<StudyPoint>,
    pub reference_p_th: f64,
    pub reference_advantage_below: f64,
}

pub struct ResilienceOutput {
    pub result: StudyResult,
    pub summary: ResilienceSummary,
    pub curve: Vec<CurveRow>,
    pub exceedance: Vec<ExceedanceRow>,
}

pub fn study_config(cfg: &RunConfig) -> StudyConfig {
    StudyConfig {
        n_samples: cfg.resilience.n_samples,
        p_grid: cfg.resilience.grid(),
        noise: cfg.noise,
        frame: cfg.resilience.frame,
        master_seed: cfg.seed,
        ..StudyConfig::default()
    }
}

pub fn run_resilience(cfg: &RunConfig) -> Result<ResilienceOutput, CliError> {
    let mut study = study_config(cfg);
    let calibration = if cfg.resilience.calibrate {
        let cal = calibrate(&study, cfg.resilience.target_threshold).map_err(CliError::run)?;
        study.noise.placement = cal.placement;
        study.frame = cal.frame;
        Some(cal)
    } else {
        None
    };
    let result = run_comparison(&study).map_err(CliError::run)?;
    let summary = ResilienceSummary {
        p_th: result.threshold,
        error_unitary: result.error_unitary,
        placement: result.placement,
        frame: result.frame,
        n_samples: result.n_samples,
        master_seed: result.master_seed,
        calibration,
        points: result.points.clone(),
        reference_p_th: REFERENCE.resilience_threshold,
        reference_advantage_below: REFERENCE.advantage_below,
    };
    let curve = result.points.iter().map(CurveRow::from).collect();
    let exceedance = result.points.iter().map(ExceedanceRow::from).collect();
    Ok(ResilienceOutput { result, summary, curve, exceedance })
}
