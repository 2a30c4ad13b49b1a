//! Kraus channels, the mixed-unitary gate error model, error placement over
//! a gate sequence, and process (chi) matrices in the Pauli product basis.

use crate::kitaev::BasisMap;
use crate::matrix::{
    embed_single, hermitian_deviation, hermitian_eigen, identity, kron_all, max_abs_diff,
    pauli_x, pauli_y, pauli_z, trace, unitarity_deviation, ComplexMatrix, DensityMatrix,
    MatrixError, C64,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

const TP_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("qubit {target} outside a {n_qubits}-qubit register")]
    QubitOutOfRange { target: usize, n_qubits: usize },
    #[error("channel is not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),
    #[error("channel has no Kraus operators")]
    Empty,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("process matrices need 1 or 2 qubits, got {0}")]
    UnsupportedQubits(usize),
    #[error("invalid process matrix: {0}")]
    InvalidProcess(String),
    #[error("unknown {kind} {value:?}")]
    Unknown { kind: &'static str, value: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn check_probability(p: f64) -> Result<(), NoiseError> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(NoiseError::Probability(p));
    }
    Ok(())
}

/// Single-qubit error unitary `U_E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorUnitary {
    X,
    Y,
    #[default]
    Z,
}

impl ErrorUnitary {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            ErrorUnitary::X => pauli_x(),
            ErrorUnitary::Y => pauli_y(),
            ErrorUnitary::Z => pauli_z(),
        }
    }

    /// The same error seen through a Hadamard frame change (`H U H`, up to
    /// a sign that drops out of any conjugation).
    pub fn hadamard_conjugate(self) -> Self {
        match self {
            ErrorUnitary::X => ErrorUnitary::Z,
            ErrorUnitary::Y => ErrorUnitary::Y,
            ErrorUnitary::Z => ErrorUnitary::X,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorUnitary::X => "x",
            ErrorUnitary::Y => "y",
            ErrorUnitary::Z => "z",
        }
    }
}

impl FromStr for ErrorUnitary {
    type Err = NoiseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(ErrorUnitary::X),
            "y" => Ok(ErrorUnitary::Y),
            "z" => Ok(ErrorUnitary::Z),
            _ => Err(NoiseError::Unknown { kind: "error unitary", value: s.to_string() }),
        }
    }
}

/// Where error channels are inserted in a gate sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// After each gate, one channel per qubit the gate touches.
    #[default]
    PerGateParticipants,
    /// One channel per qubit after the whole sequence.
    OncePerQubitEnd,
    /// One channel per qubit before the whole sequence.
    OncePerQubitStart,
    /// After each gate, one channel on every qubit, idle or not.
    PerTimeStep,
}

impl Placement {
    pub const ALL: [Placement; 4] = [
        Placement::PerGateParticipants,
        Placement::OncePerQubitEnd,
        Placement::OncePerQubitStart,
        Placement::PerTimeStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Placement::PerGateParticipants => "per_gate_participants",
            Placement::OncePerQubitEnd => "once_per_qubit_end",
            Placement::OncePerQubitStart => "once_per_qubit_start",
            Placement::PerTimeStep => "per_time_step",
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Placement {
    type Err = NoiseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Placement::ALL
            .into_iter()
            .find(|p| p.name() == s || p.name().replace('_', "-") == s)
            .ok_or_else(|| NoiseError::Unknown { kind: "placement", value: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(rename = "unitary")]
    pub error_unitary: ErrorUnitary,
    pub p: f64,
    pub placement: Placement,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { error_unitary: ErrorUnitary::Z, p: 0.0, placement: Placement::PerGateParticipants }
    }
}

impl NoiseSpec {
    pub fn new(error_unitary: ErrorUnitary, p: f64, placement: Placement) -> Result<Self, NoiseError> {
        check_probability(p)?;
        Ok(Self { error_unitary, p, placement })
    }

    pub fn with_p(self, p: f64) -> Result<Self, NoiseError> {
        Self::new(self.error_unitary, p, self.placement)
    }
}

/// Completely positive trace-preserving map `rho -> sum K rho K†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self, NoiseError> {
        let first = ops.first().ok_or(NoiseError::Empty)?;
        let dim = first.nrows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for k in &ops {
            if k.shape() != (dim, dim) {
                return Err(NoiseError::DimensionMismatch(dim, k.nrows()));
            }
            sum += k.adjoint() * k;
        }
        let dev = max_abs_diff(&sum, &identity(dim));
        if dev > TP_TOL {
            return Err(NoiseError::NotTracePreserving(dev));
        }
        Ok(Self { ops })
    }

    pub fn identity(dim: usize) -> Self {
        Self { ops: vec![identity(dim)] }
    }

    /// `(1 - p) rho + p U rho U†` for a unitary `U`.
    pub fn mixed_unitary(u: &ComplexMatrix, p: f64) -> Result<Self, NoiseError> {
        check_probability(p)?;
        let dev = unitarity_deviation(u);
        if dev > 1e-10 {
            return Err(NoiseError::NotUnitary(dev));
        }
        let dim = u.nrows();
        Self::new(vec![identity(dim).scale((1.0 - p).sqrt()), u.scale(p.sqrt())])
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    /// Maximum deviation of `sum K†K` from the identity.
    pub fn trace_preservation_error(&self) -> f64 {
        let dim = self.dim();
        let sum = self
            .ops
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
        max_abs_diff(&sum, &identity(dim))
    }

    pub(crate) fn apply_raw(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.ops
            .iter()
            .fold(ComplexMatrix::zeros(rho.nrows(), rho.ncols()), |acc, k| {
                acc + k * rho * k.adjoint()
            })
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &KrausChannel) -> Result<KrausChannel, NoiseError> {
        if self.dim() != first.dim() {
            return Err(NoiseError::DimensionMismatch(self.dim(), first.dim()));
        }
        let ops = self
            .ops
            .iter()
            .flat_map(|a| first.ops.iter().map(move |b| a * b))
            .collect();
        KrausChannel::new(ops)
    }
}

fn zzz(n_qubits: usize) -> ComplexMatrix {
    let z = pauli_z();
    kron_all(std::iter::repeat_n(&z, n_qubits))
}

/// `(1 - p) rho + p Z^{⊗n} rho Z^{⊗n}`.
pub fn correlated_dephasing(p: f64, n_qubits: usize) -> Result<KrausChannel, NoiseError> {
    KrausChannel::mixed_unitary(&zzz(n_qubits), p)
}

/// Correlated dephasing whose `Z^{⊗n}` acts in the frame of `basis`,
/// expressed as a channel on chain-frame states.
pub fn correlated_dephasing_in(p: f64, basis: &BasisMap) -> Result<KrausChannel, NoiseError> {
    let n = basis.dim().trailing_zeros() as usize;
    KrausChannel::mixed_unitary(&basis.operator_to_chain(&zzz(n)), p)
}

/// `(1 - p) rho + p U_E rho U_E†` with `U_E` on one qubit.
pub fn local_error_channel(
    spec: &NoiseSpec,
    target: usize,
    n_qubits: usize,
) -> Result<KrausChannel, NoiseError> {
    if target >= n_qubits {
        return Err(NoiseError::QubitOutOfRange { target, n_qubits });
    }
    KrausChannel::mixed_unitary(&embed_single(&spec.error_unitary.matrix(), target, n_qubits), spec.p)
}

pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix, NoiseError> {
    if ch.dim() != rho.dim() {
        return Err(NoiseError::DimensionMismatch(ch.dim(), rho.dim()));
    }
    Ok(DensityMatrix::new(ch.apply_raw(rho.matrix()))?)
}

/// One gate of a sequence, with the qubits it touches.
#[derive(Debug, Clone, PartialEq)]
pub struct GateStep {
    pub unitary: ComplexMatrix,
    pub participants: Vec<usize>,
}

/// Gate sequence with error channels inserted per `spec.placement`.
///
/// Channels are built once up front; all intermediate states stay raw
/// matrices and the result is validated once at the end.
#[derive(Debug, Clone)]
pub struct NoisyCircuit {
    n_qubits: usize,
    steps: Vec<GateStep>,
    placement: Placement,
    local: Vec<KrausChannel>,
}

impl NoisyCircuit {
    pub fn new(n_qubits: usize, steps: Vec<GateStep>, spec: &NoiseSpec) -> Result<Self, NoiseError> {
        check_probability(spec.p)?;
        let dim = 1usize << n_qubits;
        for s in &steps {
            if s.unitary.shape() != (dim, dim) {
                return Err(NoiseError::DimensionMismatch(dim, s.unitary.nrows()));
            }
            if let Some(&q) = s.participants.iter().find(|&&q| q >= n_qubits) {
                return Err(NoiseError::QubitOutOfRange { target: q, n_qubits });
            }
        }
        let local = (0..n_qubits)
            .map(|q| local_error_channel(spec, q, n_qubits))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { n_qubits, steps, placement: spec.placement, local })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of error channels the placement inserts.
    pub fn error_slots(&self) -> usize {
        match self.placement {
            Placement::PerGateParticipants => self.steps.iter().map(|s| s.participants.len()).sum(),
            Placement::OncePerQubitEnd | Placement::OncePerQubitStart => self.n_qubits,
            Placement::PerTimeStep => self.steps.len() * self.n_qubits,
        }
    }

    fn all_qubits(&self, rho: ComplexMatrix) -> ComplexMatrix {
        self.local.iter().fold(rho, |r, ch| ch.apply_raw(&r))
    }

    pub(crate) fn run_raw(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut r = rho.clone();
        if self.placement == Placement::OncePerQubitStart {
            r = self.all_qubits(r);
        }
        for step in &self.steps {
            r = &step.unitary * r * step.unitary.adjoint();
            match self.placement {
                Placement::PerGateParticipants => {
                    for &q in &step.participants {
                        r = self.local[q].apply_raw(&r);
                    }
                }
                Placement::PerTimeStep => r = self.all_qubits(r),
                Placement::OncePerQubitEnd | Placement::OncePerQubitStart => {}
            }
        }
        if self.placement == Placement::OncePerQubitEnd {
            r = self.all_qubits(r);
        }
        r
    }

    pub fn run(&self, rho: &DensityMatrix) -> Result<DensityMatrix, NoiseError> {
        if rho.dim() != 1usize << self.n_qubits {
            return Err(NoiseError::DimensionMismatch(1 << self.n_qubits, rho.dim()));
        }
        Ok(DensityMatrix::new(self.run_raw(rho.matrix()))?)
    }
}

/// A single gate followed (or preceded) by its error channels.
pub fn noisy_gate(
    gate: &ComplexMatrix,
    participants: &[usize],
    spec: &NoiseSpec,
    rho: &DensityMatrix,
) -> Result<DensityMatrix, NoiseError> {
    let n = rho.n_qubits();
    let step = GateStep { unitary: gate.clone(), participants: participants.to_vec() };
    NoisyCircuit::new(n, vec![step], spec)?.run(rho)
}

/// Pauli product basis `E_m` (unnormalised), labels and matrices, in tensor
/// lexicographic order over `I, X, Y, Z` with qubit 0 leftmost.
pub fn pauli_basis(n_qubits: usize) -> Vec<(String, ComplexMatrix)> {
    let singles = [
        ('I', identity(2)),
        ('X', pauli_x()),
        ('Y', pauli_y()),
        ('Z', pauli_z()),
    ];
    let mut out = vec![(String::new(), identity(1))];
    for _ in 0..n_qubits {
        out = out
            .into_iter()
            .flat_map(|(label, m)| {
                singles.iter().map(move |(ch, p)| (format!("{label}{ch}"), m.kronecker(p)))
            })
            .collect();
    }
    out
}

/// Process matrix `chi` with `eps(rho) = sum chi_mn E_m rho E_n†`.
///
/// Trace-preserving processes have `Tr chi = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    n_qubits: usize,
    chi: ComplexMatrix,
}

impl ProcessMatrix {
    pub fn new(n_qubits: usize, chi: ComplexMatrix) -> Result<Self, NoiseError> {
        if !(1..=2).contains(&n_qubits) {
            return Err(NoiseError::UnsupportedQubits(n_qubits));
        }
        let dim = 1usize << (2 * n_qubits);
        if chi.shape() != (dim, dim) {
            return Err(NoiseError::DimensionMismatch(dim, chi.nrows()));
        }
        let dev = hermitian_deviation(&chi);
        if dev > 1e-10 {
            return Err(NoiseError::InvalidProcess(format!("not Hermitian ({dev:e})")));
        }
        let (vals, _) = hermitian_eigen(&chi);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-8 {
            return Err(NoiseError::InvalidProcess(format!("eigenvalue {min:e}")));
        }
        Ok(Self { n_qubits, chi })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn chi(&self) -> &ComplexMatrix {
        &self.chi
    }

    pub fn labels(&self) -> Vec<String> {
        pauli_basis(self.n_qubits).into_iter().map(|(l, _)| l).collect()
    }

    /// Entry by Pauli labels, e.g. `("I", "Z")` or `("II", "XX")`.
    pub fn entry(&self, row: &str, col: &str) -> Option<C64> {
        let labels = self.labels();
        let r = labels.iter().position(|l| l == row)?;
        let c = labels.iter().position(|l| l == col)?;
        Some(self.chi[(r, c)])
    }

    pub fn trace(&self) -> f64 {
        trace(&self.chi).re
    }

    pub fn apply_raw(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let basis = pauli_basis(self.n_qubits);
        let d = rho.nrows();
        let mut out = ComplexMatrix::zeros(d, d);
        for (m, (_, em)) in basis.iter().enumerate() {
            let left = em * rho;
            for (n, (_, en)) in basis.iter().enumerate() {
                let w = self.chi[(m, n)];
                if w.norm() == 0.0 {
                    continue;
                }
                out += (&left * en.adjoint()).map(|z| z * w);
            }
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, NoiseError> {
        if rho.dim() != 1usize << self.n_qubits {
            return Err(NoiseError::DimensionMismatch(1 << self.n_qubits, rho.dim()));
        }
        Ok(DensityMatrix::new(self.apply_raw(rho.matrix()))?)
    }
}

/// Rank-1 chi of a unitary: `u = sum a_m E_m`, `a_m = Tr(E_m u)/2^n`,
/// `chi_mn = a_m conj(a_n)`.
pub fn chi_of_unitary(u: &ComplexMatrix, n_qubits: usize) -> Result<ProcessMatrix, NoiseError> {
    if !(1..=2).contains(&n_qubits) {
        return Err(NoiseError::UnsupportedQubits(n_qubits));
    }
    let d = 1usize << n_qubits;
    if u.shape() != (d, d) {
        return Err(NoiseError::DimensionMismatch(d, u.nrows()));
    }
    let dev = unitarity_deviation(u);
    if dev > 1e-10 {
        return Err(NoiseError::NotUnitary(dev));
    }
    let coeffs: Vec<C64> = pauli_basis(n_qubits)
        .iter()
        .map(|(_, e)| trace(&(e.adjoint() * u)) / d as f64)
        .collect();
    let k = coeffs.len();
    let chi = ComplexMatrix::from_fn(k, k, |m, n| coeffs[m] * coeffs[n].conj());
    ProcessMatrix::new(n_qubits, chi)
}
