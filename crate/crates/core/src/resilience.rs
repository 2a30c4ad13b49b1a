//! Encoded (three-qubit braid) vs unencoded (two-qubit) CNOT under local
//! unitary errors: mean output fidelities, exceedance fraction and the
//! crossing threshold.
//!
//! Sample `k` draws its Haar unitary from stream `k` of the master seed and
//! the same inputs are reused at every error probability, so the curves
//! share their sampling noise and results do not depend on thread schedule.

use crate::braid::{cnot_word, generator_unitary};
use crate::kitaev::EVEN_SECTOR;
use crate::matrix::{cnot, haar_unitary_from_rng, stream_rng, ComplexMatrix, StateVector, C64};
use crate::noise::{ErrorUnitary, GateStep, NoiseError, NoiseSpec, NoisyCircuit, Placement};
use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResilienceError {
    #[error("n_samples must be at least 1")]
    NoSamples,
    #[error("p grid must be non-empty, sorted ascending and inside [0, 1]")]
    BadGrid,
    #[error("reference state must be a two-qubit state, got dimension {0}")]
    BadReference(usize),
    #[error("unknown error frame {0:?}")]
    UnknownFrame(String),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Frame in which the error unitary hits the encoded chain qubits.
///
/// `Spin` applies `H U_E H`: a Z error on a spin becomes an X flip of the
/// chain qubit, which changes fermion parity and is discarded by the
/// parity-projected readout. `Chain` applies `U_E` to the chain qubits
/// directly; a Z error there commutes with parity and is never detected.
/// The unencoded circuit always sees the bare `U_E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorFrame {
    Chain,
    #[default]
    Spin,
}

impl ErrorFrame {
    pub const ALL: [ErrorFrame; 2] = [ErrorFrame::Chain, ErrorFrame::Spin];

    pub fn name(self) -> &'static str {
        match self {
            ErrorFrame::Chain => "chain",
            ErrorFrame::Spin => "spin",
        }
    }

    fn encoded_unitary(self, u: ErrorUnitary) -> ErrorUnitary {
        match self {
            ErrorFrame::Chain => u,
            ErrorFrame::Spin => u.hadamard_conjugate(),
        }
    }
}

impl fmt::Display for ErrorFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorFrame {
    type Err = ResilienceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "chain" => Ok(ErrorFrame::Chain),
            "spin" => Ok(ErrorFrame::Spin),
            _ => Err(ResilienceError::UnknownFrame(s.to_string())),
        }
    }
}

/// Fidelity differences at or below this count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Bootstrap resamples behind the alternative exceedance estimate.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// `0, 0.005, ..., 0.15`
pub fn default_p_grid() -> Vec<f64> {
    (0..=30).map(|k| k as f64 / 200.0).collect()
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub n_samples: usize,
    pub p_grid: Vec<f64>,
    /// `noise.p` is ignored; the grid supplies the probabilities.
    pub noise: NoiseSpec,
    pub frame: ErrorFrame,
    pub master_seed: u64,
    pub reference_state: StateVector,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            n_samples: 2000,
            p_grid: default_p_grid(),
            noise: NoiseSpec::default(),
            frame: ErrorFrame::default(),
            master_seed: 0,
            reference_state: StateVector::basis(4, 0).expect("dimension 4"),
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<(), ResilienceError> {
        if self.n_samples == 0 {
            return Err(ResilienceError::NoSamples);
        }
        let in_range = self.p_grid.iter().all(|p| (0.0..=1.0).contains(p));
        let sorted = self.p_grid.windows(2).all(|w| w[0] < w[1]);
        if self.p_grid.is_empty() || !in_range || !sorted {
            return Err(ResilienceError::BadGrid);
        }
        if self.reference_state.dim() != 4 {
            return Err(ResilienceError::BadReference(self.reference_state.dim()));
        }
        Ok(())
    }

    /// Haar input for sample `k`.
    pub fn sample_input(&self, k: usize) -> StateVector {
        let mut rng = stream_rng(self.master_seed, k as u64);
        let u = haar_unitary_from_rng(4, &mut rng);
        self.reference_state.apply(&u).expect("unitary of matching dimension")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyPoint {
    pub p: f64,
    pub f_enc_mean: f64,
    pub f_un_mean: f64,
    pub f_enc_stderr: f64,
    pub f_un_stderr: f64,
    /// Fraction of samples with `f_enc > f_un`.
    pub p_avg: f64,
    /// Fraction of bootstrap resamples whose mean `f_enc` beats mean `f_un`.
    pub p_avg_bootstrap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub error_unitary: ErrorUnitary,
    pub placement: Placement,
    pub frame: ErrorFrame,
    pub n_samples: usize,
    pub master_seed: u64,
    pub points: Vec<StudyPoint>,
    pub threshold: Option<f64>,
}

impl StudyResult {
    pub fn point_at(&self, p: f64) -> Option<&StudyPoint> {
        self.points.iter().find(|pt| (pt.p - p).abs() < 1e-12)
    }
}

fn encoded_steps() -> Vec<GateStep> {
    cnot_word()
        .generators()
        .iter()
        .map(|&g| GateStep { unitary: generator_unitary(g), participants: g.participants().to_vec() })
        .collect()
}

/// Both noisy circuits for one error probability, built once and reused for
/// every sample.
struct Circuits {
    encoded: NoisyCircuit,
    unencoded: NoisyCircuit,
}

impl Circuits {
    fn new(noise: &NoiseSpec, frame: ErrorFrame, p: f64) -> Result<Self, ResilienceError> {
        let un_spec = noise.with_p(p)?;
        let mut enc_spec = un_spec;
        enc_spec.error_unitary = frame.encoded_unitary(noise.error_unitary);
        Ok(Self {
            encoded: NoisyCircuit::new(3, encoded_steps(), &enc_spec)?,
            unencoded: NoisyCircuit::new(2, vec![GateStep { unitary: cnot(), participants: vec![0, 1] }], &un_spec)?,
        })
    }

    fn trial(&self, psi: &StateVector) -> (f64, f64) {
        let ideal = cnot() * psi.amplitudes();
        let rho_in = outer(psi.amplitudes());
        let un = self.unencoded.run_raw(&rho_in);
        let f_un = pure_overlap(&ideal, &un).max(0.0).sqrt();

        let mut chain = DVector::<C64>::zeros(8);
        for (l, &idx) in EVEN_SECTOR.iter().enumerate() {
            chain[idx] = psi.amplitudes()[l];
        }
        let enc = self.encoded.run_raw(&outer(&chain));
        let logical = ComplexMatrix::from_fn(4, 4, |i, j| enc[(EVEN_SECTOR[i], EVEN_SECTOR[j])]);
        let kept = logical.trace().re;
        let f_enc = if kept <= TIE_TOLERANCE {
            0.0
        } else {
            (pure_overlap(&ideal, &logical) / kept).clamp(0.0, 1.0).sqrt()
        };
        (f_enc, f_un.min(1.0))
    }
}

fn outer(v: &DVector<C64>) -> ComplexMatrix {
    v * v.adjoint()
}

fn pure_overlap(psi: &DVector<C64>, rho: &ComplexMatrix) -> f64 {
    (psi.adjoint() * rho * psi)[(0, 0)].re
}

/// Fidelities `(f_enc, f_un)` of one input, each the square root of the
/// overlap with the ideal CNOT output. Encoded outputs are projected onto
/// the even-parity sector and renormalised; full leakage gives `f_enc = 0`.
pub fn run_trial(
    psi_in: &StateVector,
    noise: &NoiseSpec,
    frame: ErrorFrame,
) -> Result<(f64, f64), ResilienceError> {
    if psi_in.dim() != 4 {
        return Err(ResilienceError::BadReference(psi_in.dim()));
    }
    Ok(Circuits::new(noise, frame, noise.p)?.trial(psi_in))
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn bootstrap_exceedance(f_enc: &[f64], f_un: &[f64], seed: u64) -> f64 {
    // Streams below n_samples belong to the inputs; count down from the top.
    let mut rng = stream_rng(seed, u64::MAX);
    let n = f_enc.len();
    let mut wins = 0usize;
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut diff = 0.0;
        for _ in 0..n {
            let k = rng.random_range(0..n);
            diff += f_enc[k] - f_un[k];
        }
        if diff / n as f64 > TIE_TOLERANCE {
            wins += 1;
        }
    }
    wins as f64 / BOOTSTRAP_RESAMPLES as f64
}

pub fn run_comparison(cfg: &StudyConfig) -> Result<StudyResult, ResilienceError> {
    cfg.validate()?;
    let inputs: Vec<StateVector> = (0..cfg.n_samples).into_par_iter().map(|k| cfg.sample_input(k)).collect();
    let mut points = Vec::with_capacity(cfg.p_grid.len());
    for &p in &cfg.p_grid {
        let circuits = Circuits::new(&cfg.noise, cfg.frame, p)?;
        let (f_enc, f_un): (Vec<f64>, Vec<f64>) = inputs.par_iter().map(|psi| circuits.trial(psi)).unzip();
        let (f_enc_mean, f_enc_stderr) = mean_stderr(&f_enc);
        let (f_un_mean, f_un_stderr) = mean_stderr(&f_un);
        let wins = f_enc.iter().zip(&f_un).filter(|(e, u)| *e - *u > TIE_TOLERANCE).count();
        points.push(StudyPoint {
            p,
            f_enc_mean,
            f_un_mean,
            f_enc_stderr,
            f_un_stderr,
            p_avg: wins as f64 / cfg.n_samples as f64,
            p_avg_bootstrap: bootstrap_exceedance(&f_enc, &f_un, cfg.master_seed),
        });
    }
    let threshold = find_threshold(&points);
    Ok(StudyResult {
        error_unitary: cfg.noise.error_unitary,
        placement: cfg.noise.placement,
        frame: cfg.frame,
        n_samples: cfg.n_samples,
        master_seed: cfg.master_seed,
        points,
        threshold,
    })
}

/// Smallest `p` at which `f_enc - f_un` changes sign, by linear
/// interpolation between the bracketing grid points. Differences within
/// [`TIE_TOLERANCE`] are ties and never start a sign; a tie sitting between
/// opposite signs is itself the crossing.
pub fn find_threshold(points: &[StudyPoint]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let diff = |pt: &StudyPoint| pt.f_enc_mean - pt.f_un_mean;
    let mut last: Option<usize> = None;
    for (i, pt) in points.iter().enumerate() {
        let d = diff(pt);
        if d.abs() <= TIE_TOLERANCE {
            continue;
        }
        if let Some(j) = last {
            let dj = diff(&points[j]);
            if dj.signum() != d.signum() {
                if j + 1 < i {
                    return Some(points[j + 1].p);
                }
                let (p0, p1) = (points[j].p, pt.p);
                return Some(p0 + (p1 - p0) * dj / (dj - d));
            }
        }
        last = Some(i);
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCandidate {
    pub placement: Placement,
    pub frame: ErrorFrame,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub target: f64,
    pub candidates: Vec<CalibrationCandidate>,
    pub placement: Placement,
    pub frame: ErrorFrame,
    pub threshold: Option<f64>,
}

/// Runs every placement in every frame and picks the one whose threshold
/// lands closest to `target`. Candidates without a crossing never win
/// unless nothing crosses, in which case the base configuration is kept.
pub fn calibrate(base: &StudyConfig, target: f64) -> Result<Calibration, ResilienceError> {
    let mut candidates = Vec::new();
    for frame in ErrorFrame::ALL {
        for placement in Placement::ALL {
            let mut cfg = base.clone();
            cfg.frame = frame;
            cfg.noise.placement = placement;
            let threshold = run_comparison(&cfg)?.threshold;
            candidates.push(CalibrationCandidate { placement, frame, threshold });
        }
    }
    let best = candidates
        .iter()
        .filter_map(|c| c.threshold.map(|t| (c, (t - target).abs())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(c, _)| c.clone());
    let (placement, frame, threshold) = match best {
        Some(c) => (c.placement, c.frame, c.threshold),
        None => (base.noise.placement, base.frame, None),
    };
    Ok(Calibration { target, candidates, placement, frame, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn spec(p: f64, placement: Placement) -> NoiseSpec {
        NoiseSpec::new(ErrorUnitary::Z, p, placement).unwrap()
    }

    fn point(p: f64, e: f64, u: f64) -> StudyPoint {
        StudyPoint { p, f_enc_mean: e, f_un_mean: u, f_enc_stderr: 0.0, f_un_stderr: 0.0, p_avg: 0.0, p_avg_bootstrap: 0.0 }
    }

    #[test]
    fn noiseless_trial_is_perfect() {
        for frame in ErrorFrame::ALL {
            let psi = StateVector::normalized(DVector::from_vec(vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.7, 0.), c(0.1, -0.3)])).unwrap();
            let (e, u) = run_trial(&psi, &spec(0.0, Placement::PerGateParticipants), frame).unwrap();
            assert!((e - 1.0).abs() < 1e-12 && (u - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn z_errors_leave_ket00_unencoded_output_alone() {
        let psi = StateVector::basis(4, 0).unwrap();
        let (_, u) = run_trial(&psi, &spec(1.0, Placement::OncePerQubitEnd), ErrorFrame::Spin).unwrap();
        assert!((u - 1.0).abs() < 1e-12);
    }

    #[test]
    fn synthetic_threshold() {
        let pts: Vec<_> = (0..=40).map(|k| k as f64 / 100.0).map(|p| point(p, 1.0 - 2.0 * p, 1.0 - 10.0 * p * p)).collect();
        let t = find_threshold(&pts).unwrap();
        assert!((t - 0.2).abs() < 1e-12);
    }

    #[test]
    fn no_threshold_when_equal_or_separated() {
        let same: Vec<_> = (0..10).map(|k| point(k as f64 * 0.01, 1.0 - k as f64 * 0.01, 1.0 - k as f64 * 0.01)).collect();
        assert_eq!(find_threshold(&same), None);
        let apart: Vec<_> = (0..10).map(|k| point(k as f64 * 0.01, 1.0, 0.5)).collect();
        assert_eq!(find_threshold(&apart), None);
        assert_eq!(find_threshold(&apart[..1]), None);
    }

    #[test]
    fn tie_between_signs_is_the_crossing() {
        let pts = vec![point(0.0, 1.0, 1.0), point(0.1, 0.9, 0.8), point(0.2, 0.7, 0.7), point(0.3, 0.5, 0.6)];
        assert_eq!(find_threshold(&pts), Some(0.2));
    }

    #[test]
    fn zero_grid_ties() {
        let cfg = StudyConfig { n_samples: 50, p_grid: vec![0.0], ..StudyConfig::default() };
        let r = run_comparison(&cfg).unwrap();
        let pt = &r.points[0];
        assert!((pt.f_enc_mean - 1.0).abs() < 1e-12 && (pt.f_un_mean - 1.0).abs() < 1e-12);
        assert!(pt.p_avg <= 0.5);
    }

    #[test]
    fn comparison_is_deterministic() {
        let cfg = StudyConfig { n_samples: 64, p_grid: vec![0.0, 0.05, 0.1], master_seed: 9, ..StudyConfig::default() };
        assert_eq!(run_comparison(&cfg).unwrap(), run_comparison(&cfg).unwrap());
    }

    #[test]
    fn bad_configs() {
        let mut cfg = StudyConfig { n_samples: 0, ..StudyConfig::default() };
        assert!(matches!(run_comparison(&cfg), Err(ResilienceError::NoSamples)));
        cfg.n_samples = 1;
        cfg.p_grid = vec![0.1, 0.05];
        assert!(matches!(run_comparison(&cfg), Err(ResilienceError::BadGrid)));
    }

    #[test]
    fn default_grid_shape() {
        let g = default_p_grid();
        assert_eq!(g.len(), 31);
        assert_eq!(g[13], 0.065);
        assert_eq!(g[30], 0.15);
    }
}
