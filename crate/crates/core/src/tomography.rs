//! Synthetic projective measurements, state and process reconstruction by
//! linear inversion with positive projection, fidelity metrics, and the
//! correlated-dephasing parameter fit.

use crate::kitaev::BasisMap;
use crate::matrix::{
    c, fidelity_psd, frobenius_distance, hermitian_eigen, hermitize, kron_all, stream_rng,
    uhlmann_fidelity, ComplexMatrix, DensityMatrix, MatrixError, StateVector, C64,
};
use crate::noise::{correlated_dephasing, correlated_dephasing_in, pauli_basis, NoiseError, ProcessMatrix};
use nalgebra::{DMatrix, DVector};
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TomographyError {
    #[error("tomography supports 1 to {max} qubits, got {got}")]
    UnsupportedQubits { got: usize, max: usize },
    #[error("missing measurement setting {0}")]
    MissingSetting(String),
    #[error("setting {0} has {1} labels, expected {2}")]
    SettingLength(String, usize, usize),
    #[error("record {setting}: {successes} successes exceed {shots} shots")]
    BadRecord { setting: String, shots: u64, successes: f64 },
    #[error("shots must be at least 1")]
    NoShots,
    #[error("measurement frame is singular")]
    SingularFrame,
    #[error("input set is rank deficient (condition {0:e})")]
    RankDeficient(f64),
    #[error("expected {expected} outputs, got {got}")]
    OutputCount { expected: usize, got: usize },
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Single-qubit measurement projectors (and, for process tomography, the
/// matching input states).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProjectorLabel {
    Zero,
    One,
    Plus,
    /// `|R> = (|0> - i|1>)/sqrt 2`
    R,
}

impl ProjectorLabel {
    pub const ALL: [ProjectorLabel; 4] =
        [ProjectorLabel::Zero, ProjectorLabel::One, ProjectorLabel::Plus, ProjectorLabel::R];

    pub fn ket(self) -> StateVector {
        let h = FRAC_1_SQRT_2;
        let amps = match self {
            ProjectorLabel::Zero => [c(1., 0.), c(0., 0.)],
            ProjectorLabel::One => [c(0., 0.), c(1., 0.)],
            ProjectorLabel::Plus => [c(h, 0.), c(h, 0.)],
            ProjectorLabel::R => [c(h, 0.), c(0., -h)],
        };
        StateVector::from_slice(&amps).expect("normalised")
    }

    pub fn projector(self) -> ComplexMatrix {
        self.ket().density().into_matrix()
    }

    fn symbol(self) -> char {
        match self {
            ProjectorLabel::Zero => '0',
            ProjectorLabel::One => '1',
            ProjectorLabel::Plus => '+',
            ProjectorLabel::R => 'R',
        }
    }
}

/// One projector label per qubit, qubit 0 first. Renders as e.g. `"0+R"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MeasurementSetting(pub Vec<ProjectorLabel>);

impl MeasurementSetting {
    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn projector(&self) -> ComplexMatrix {
        let ps: Vec<ComplexMatrix> = self.0.iter().map(|l| l.projector()).collect();
        kron_all(ps.iter())
    }

    /// The product state the projector projects onto.
    pub fn state(&self) -> StateVector {
        let mut it = self.0.iter().map(|l| l.ket());
        let first = it.next().expect("non-empty setting");
        it.fold(first, |acc, k| acc.kron(&k))
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for MeasurementSetting {
    type Err = TomographyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let labels = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(ProjectorLabel::Zero),
                '1' => Ok(ProjectorLabel::One),
                '+' => Ok(ProjectorLabel::Plus),
                'R' => Ok(ProjectorLabel::R),
                _ => Err(TomographyError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if labels.is_empty() {
            return Err(TomographyError::Parse(s.to_string()));
        }
        Ok(Self(labels))
    }
}

impl Serialize for MeasurementSetting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MeasurementSetting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub const MAX_TOMOGRAPHY_QUBITS: usize = 3;

fn check_qubits(n: usize) -> Result<(), TomographyError> {
    if !(1..=MAX_TOMOGRAPHY_QUBITS).contains(&n) {
        return Err(TomographyError::UnsupportedQubits { got: n, max: MAX_TOMOGRAPHY_QUBITS });
    }
    Ok(())
}

/// All `4^n` product settings, lexicographic in `0, 1, +, R`.
pub fn enumerate_settings(n_qubits: usize) -> Result<Vec<MeasurementSetting>, TomographyError> {
    check_qubits(n_qubits)?;
    let mut out = vec![Vec::new()];
    for _ in 0..n_qubits {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<ProjectorLabel>| {
                ProjectorLabel::ALL.iter().map(move |&l| {
                    let mut v = prefix.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    Ok(out.into_iter().map(MeasurementSetting).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting: MeasurementSetting,
    pub shots: u64,
    /// Integral when sampled; the exact expectation in exact mode.
    pub successes: f64,
}

impl CountRecord {
    pub fn frequency(&self) -> f64 {
        self.successes / self.shots as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shots {
    Finite(u64),
    /// Exact probabilities, recorded with one nominal shot.
    Exact,
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Finite(n) => write!(f, "{n}"),
            Shots::Exact => write!(f, "exact"),
        }
    }
}

impl FromStr for Shots {
    type Err = TomographyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(Shots::Exact);
        }
        match s.parse::<u64>() {
            Ok(0) => Err(TomographyError::NoShots),
            Ok(n) => Ok(Shots::Finite(n)),
            Err(_) => Err(TomographyError::Parse(s.to_string())),
        }
    }
}

/// Outcome counts for each setting; setting `k` draws from its own stream
/// `(seed, k)`.
pub fn simulate_counts(
    rho: &DensityMatrix,
    settings: &[MeasurementSetting],
    shots: Shots,
    seed: u64,
) -> Result<Vec<CountRecord>, TomographyError> {
    let n = rho.n_qubits();
    settings
        .iter()
        .enumerate()
        .map(|(k, setting)| {
            if setting.n_qubits() != n {
                return Err(TomographyError::SettingLength(setting.to_string(), setting.n_qubits(), n));
            }
            let prob = rho.expectation(&setting.projector()).clamp(0.0, 1.0);
            let (shots, successes) = match shots {
                Shots::Exact => (1, prob),
                Shots::Finite(0) => return Err(TomographyError::NoShots),
                Shots::Finite(total) => {
                    let mut rng = stream_rng(seed, k as u64);
                    let dist = Binomial::new(total, prob).expect("probability clamped to [0, 1]");
                    (total, dist.sample(&mut rng) as f64)
                }
            };
            Ok(CountRecord { setting: setting.clone(), shots, successes })
        })
        .collect()
}

/// Matrix mapping Pauli coordinates `r_m = Tr(E_m rho)` to setting
/// probabilities: `p_k = sum_m Tr(Pi_k E_m) r_m / 2^n`.
fn frame_matrix(settings: &[MeasurementSetting], n: usize) -> DMatrix<f64> {
    let basis = pauli_basis(n);
    let d = (1usize << n) as f64;
    DMatrix::from_fn(settings.len(), basis.len(), |k, m| {
        let proj = settings[k].projector();
        (proj * &basis[m].1).trace().re / d
    })
}

/// Closest (Frobenius) unit-trace PSD matrix to a Hermitian matrix: the
/// eigenvalues are projected onto the probability simplex.
pub fn project_to_density(a: &ComplexMatrix) -> Result<DensityMatrix, TomographyError> {
    let (vals, vecs) = hermitian_eigen(a);
    let mut sorted = vals.clone();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    let clipped = DVector::from_iterator(vals.len(), vals.iter().map(|&v| c((v - theta).max(0.0), 0.0)));
    let m = &vecs * ComplexMatrix::from_diagonal(&clipped) * vecs.adjoint();
    Ok(DensityMatrix::new(hermitize(&m))?)
}

fn index_records(
    records: &[CountRecord],
    n: usize,
) -> Result<BTreeMap<MeasurementSetting, (f64, f64)>, TomographyError> {
    let mut by_setting: BTreeMap<MeasurementSetting, (f64, f64)> = BTreeMap::new();
    for r in records {
        if r.setting.n_qubits() != n {
            return Err(TomographyError::SettingLength(r.setting.to_string(), r.setting.n_qubits(), n));
        }
        if r.shots == 0 {
            return Err(TomographyError::NoShots);
        }
        if r.successes < 0.0 || r.successes > r.shots as f64 {
            return Err(TomographyError::BadRecord {
                setting: r.setting.to_string(),
                shots: r.shots,
                successes: r.successes,
            });
        }
        let e = by_setting.entry(r.setting.clone()).or_insert((0.0, 0.0));
        e.0 += r.successes;
        e.1 += r.shots as f64;
    }
    Ok(by_setting)
}

/// Linear-inversion estimate: Hermitian with unit trace, but not
/// necessarily positive at finite shot counts.
pub fn reconstruct_linear(records: &[CountRecord], n_qubits: usize) -> Result<ComplexMatrix, TomographyError> {
    check_qubits(n_qubits)?;
    let settings = enumerate_settings(n_qubits)?;
    let by_setting = index_records(records, n_qubits)?;
    let freqs = settings
        .iter()
        .map(|s| {
            by_setting
                .get(s)
                .map(|&(succ, shots)| succ / shots)
                .ok_or_else(|| TomographyError::MissingSetting(s.to_string()))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let frame = frame_matrix(&settings, n_qubits);
    let coords = frame
        .lu()
        .solve(&DVector::from_vec(freqs))
        .ok_or(TomographyError::SingularFrame)?;
    let d = 1usize << n_qubits;
    let basis = pauli_basis(n_qubits);
    let mut lin = ComplexMatrix::zeros(d, d);
    for (r, (_, e)) in coords.iter().zip(&basis) {
        lin += e.scale(*r / d as f64);
    }
    Ok(hermitize(&lin))
}

/// Linear inversion of measured frequencies, then projection onto the
/// closest density matrix.
pub fn reconstruct_state(records: &[CountRecord], n_qubits: usize) -> Result<DensityMatrix, TomographyError> {
    project_to_density(&reconstruct_linear(records, n_qubits)?)
}

/// Simulated counts followed by linear inversion, without the positive
/// projection.
pub fn measure_linear(rho: &DensityMatrix, shots: Shots, seed: u64) -> Result<ComplexMatrix, TomographyError> {
    let n = rho.n_qubits();
    let records = simulate_counts(rho, &enumerate_settings(n)?, shots, seed)?;
    reconstruct_linear(&records, n)
}

/// Simulated counts followed by reconstruction, over all settings.
pub fn measure_state(
    rho: &DensityMatrix,
    shots: Shots,
    seed: u64,
) -> Result<DensityMatrix, TomographyError> {
    let n = rho.n_qubits();
    let records = simulate_counts(rho, &enumerate_settings(n)?, shots, seed)?;
    reconstruct_state(&records, n)
}

/// Product input states `{|0>, |1>, |+>, |R>}^{⊗n}` for process tomography.
pub fn process_inputs(n_qubits: usize) -> Result<Vec<MeasurementSetting>, TomographyError> {
    if !(1..=2).contains(&n_qubits) {
        return Err(TomographyError::UnsupportedQubits { got: n_qubits, max: 2 });
    }
    enumerate_settings(n_qubits)
}

/// Solves `eps(rho_k) = sum chi_mn E_m rho_k E_n†` for `chi` by least
/// squares, then Hermitises and projects to a unit-trace PSD matrix.
pub fn reconstruct_process(
    input_labels: &[MeasurementSetting],
    output_states: &[DensityMatrix],
    n_qubits: usize,
) -> Result<ProcessMatrix, TomographyError> {
    if !(1..=2).contains(&n_qubits) {
        return Err(TomographyError::UnsupportedQubits { got: n_qubits, max: 2 });
    }
    if input_labels.len() != output_states.len() {
        return Err(TomographyError::OutputCount { expected: input_labels.len(), got: output_states.len() });
    }
    let d = 1usize << n_qubits;
    let basis: Vec<ComplexMatrix> = pauli_basis(n_qubits).into_iter().map(|(_, m)| m).collect();
    let nb = basis.len();
    let rows = input_labels.len() * d * d;
    let mut a = ComplexMatrix::zeros(rows, nb * nb);
    let mut b = DVector::<C64>::zeros(rows);
    for (k, (label, out)) in input_labels.iter().zip(output_states).enumerate() {
        if label.n_qubits() != n_qubits {
            return Err(TomographyError::SettingLength(label.to_string(), label.n_qubits(), n_qubits));
        }
        if out.dim() != d {
            return Err(TomographyError::Matrix(MatrixError::DimensionMismatch { left: d, right: out.dim() }));
        }
        let rho = label.state().density().into_matrix();
        for (m, em) in basis.iter().enumerate() {
            let left = em * &rho;
            for (n, en) in basis.iter().enumerate() {
                let term = &left * en.adjoint();
                for i in 0..d {
                    for j in 0..d {
                        a[(k * d * d + i * d + j, m * nb + n)] = term[(i, j)];
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                b[k * d * d + i * d + j] = out.matrix()[(i, j)];
            }
        }
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin / smax < 1e-10 {
        return Err(TomographyError::RankDeficient(if smax == 0.0 { 0.0 } else { smin / smax }));
    }
    let x = svd.solve(&b, 1e-12 * smax).map_err(|e| TomographyError::Parse(e.to_string()))?;
    let chi = ComplexMatrix::from_fn(nb, nb, |m, n| x[m * nb + n]);
    let projected = project_to_density(&hermitize(&chi))?;
    Ok(ProcessMatrix::new(n_qubits, projected.into_matrix())?)
}

/// Process tomography of a known map: prepare each product input, apply
/// `process`, reconstruct each output state (input `k` sampled with seed
/// stream `seed + k`), then solve for chi.
pub fn characterize_process<F>(
    n_qubits: usize,
    process: F,
    shots: Shots,
    seed: u64,
) -> Result<ProcessMatrix, TomographyError>
where
    F: Fn(&DensityMatrix) -> Result<DensityMatrix, TomographyError>,
{
    let inputs = process_inputs(n_qubits)?;
    let outputs = inputs
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let out = process(&label.state().density())?;
            match shots {
                Shots::Exact => Ok(out),
                Shots::Finite(_) => measure_state(&out, shots, seed.wrapping_add(k as u64)),
            }
        })
        .collect::<Result<Vec<_>, TomographyError>>()?;
    reconstruct_process(&inputs, &outputs, n_qubits)
}

pub fn state_fidelity(rho_exp: &DensityMatrix, rho_th: &DensityMatrix) -> Result<f64, TomographyError> {
    Ok(uhlmann_fidelity(rho_th, rho_exp)?)
}

pub fn process_fidelity(chi_exp: &ProcessMatrix, chi_ideal: &ProcessMatrix) -> Result<f64, TomographyError> {
    Ok(fidelity_psd(chi_exp.chi(), chi_ideal.chi())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub p_hat: f64,
    pub residual: f64,
}

pub const FIT_GRID_STEP: f64 = 1e-3;
pub const FIT_TOLERANCE: f64 = 1e-6;

/// Fits the correlated-dephasing strength mapping `rho_th` closest to
/// `rho_exp` in Frobenius norm: grid search, then golden-section
/// refinement around the best grid point.
pub fn fit_dephasing_p(
    rho_th: &DensityMatrix,
    rho_exp: &DensityMatrix,
    basis_map: Option<&BasisMap>,
) -> Result<FitResult, TomographyError> {
    fit_dephasing_p_to(rho_th, rho_exp.matrix(), basis_map)
}

/// As [`fit_dephasing_p`], against any estimate of the experimental state.
///
/// Fitting the unprojected linear-inversion estimate avoids the upward
/// bias the positive projection puts on small `p` at finite shot counts.
pub fn fit_dephasing_p_to(
    rho_th: &DensityMatrix,
    estimate: &ComplexMatrix,
    basis_map: Option<&BasisMap>,
) -> Result<FitResult, TomographyError> {
    if estimate.shape() != (rho_th.dim(), rho_th.dim()) {
        return Err(TomographyError::Matrix(MatrixError::DimensionMismatch {
            left: rho_th.dim(),
            right: estimate.nrows(),
        }));
    }
    let channel = match basis_map {
        Some(map) => correlated_dephasing_in(1.0, map)?,
        None => correlated_dephasing(1.0, rho_th.n_qubits())?,
    };
    // eps_p(rho) = (1 - p) rho + p Z rho Z; the p = 1 channel holds Z rho Z
    let flipped = channel.apply_raw(rho_th.matrix());
    let residual = |p: f64| {
        let model = rho_th.matrix().scale(1.0 - p) + flipped.scale(p);
        frobenius_distance(&model, estimate)
    };

    let steps = (1.0 / FIT_GRID_STEP).round() as usize;
    let (mut best_p, mut best_r) = (0.0, residual(0.0));
    for k in 1..=steps {
        let p = k as f64 * FIT_GRID_STEP;
        let r = residual(p);
        if r < best_r {
            best_p = p;
            best_r = r;
        }
    }

    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = ((best_p - FIT_GRID_STEP).max(0.0), (best_p + FIT_GRID_STEP).min(1.0));
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let (mut f1, mut f2) = (residual(x1), residual(x2));
    while hi - lo > FIT_TOLERANCE {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = residual(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = residual(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    let r_mid = residual(mid);
    if r_mid < best_r {
        best_p = mid;
        best_r = r_mid;
    }
    Ok(FitResult { p_hat: best_p, residual: best_r })
}

/// CSV with header `setting,shots,successes`.
pub fn counts_to_csv(records: &[CountRecord]) -> Result<String, TomographyError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| TomographyError::Csv(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| TomographyError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| TomographyError::Csv(e.to_string()))
}

pub fn counts_from_csv(text: &str) -> Result<Vec<CountRecord>, TomographyError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| TomographyError::Csv(e.to_string())))
        .collect()
}
