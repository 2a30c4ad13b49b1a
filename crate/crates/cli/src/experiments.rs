//! Simulated tomography experiments on the braided CNOT.
//!
//! The chain register is read out in the frame given by the basis map.
//! Correlated dephasing of strength `noise.p` acts in that frame before
//! each measurement. Spin-basis fidelities compare the reconstructed
//! three-qubit state with the ideal one. Logical-basis fidelities first
//! return to the chain frame, project onto even parity and renormalise.

use crate::config::RunConfig;
use crate::reference::{ReferenceTable, REFERENCE};
use crate::report::{matrix_entries, ComplexEntry};
use crate::CliError;
use mzm_cnot::braid::{cnot_word, compose_braid};
use mzm_cnot::kitaev::{decode_logical_density, encode_logical, BasisMap, LogicalState};
use mzm_cnot::matrix::{c, cnot, derive_seed, identity, kron, pauli_x, pauli_z, ComplexMatrix, DensityMatrix, StateVector, C64};
use mzm_cnot::noise::{apply_channel, chi_of_unitary, correlated_dephasing_in, KrausChannel};
use mzm_cnot::tomography::{
    characterize_process, fit_dephasing_p_to, measure_linear, measure_state, process_fidelity, state_fidelity, FitResult,
    Shots,
};
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

/// Readout frame and the dephasing that precedes every measurement.
pub struct Readout {
    pub map: BasisMap,
    pub dephasing: KrausChannel,
    pub shots: Shots,
}

impl Readout {
    pub fn new(map: BasisMap, p: f64, shots: Shots) -> Result<Self, CliError> {
        let dephasing = correlated_dephasing_in(p, &map).map_err(CliError::run)?;
        Ok(Self { map, dephasing, shots })
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self, CliError> {
        Self::new(cfg.basis_map.resolve()?, cfg.noise.p, cfg.shots.0)
    }

    /// Reconstructed chain-frame state after dephasing and tomography.
    pub fn measure(&self, chain: &DensityMatrix, seed: u64) -> Result<DensityMatrix, CliError> {
        let noisy = apply_channel(&self.dephasing, chain).map_err(CliError::run)?;
        let in_frame = self.map.to_measurement(&noisy).map_err(CliError::run)?;
        let rec = measure_state(&in_frame, self.shots, seed).map_err(CliError::run)?;
        self.map.to_chain(&rec).map_err(CliError::run)
    }

    /// Chain-frame linear-inversion estimate, before the positive projection.
    pub fn measure_linear(&self, chain: &DensityMatrix, seed: u64) -> Result<ComplexMatrix, CliError> {
        let noisy = apply_channel(&self.dephasing, chain).map_err(CliError::run)?;
        let in_frame = self.map.to_measurement(&noisy).map_err(CliError::run)?;
        let lin = measure_linear(&in_frame, self.shots, seed).map_err(CliError::run)?;
        Ok(self.map.operator_to_chain(&lin))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Fidelities {
    pub spin: f64,
    pub logical: f64,
    pub leakage: f64,
}

/// Spin and logical fidelity of a reconstructed chain-frame state against
/// the ideal logical state.
pub fn score(readout: &Readout, reconstructed: &DensityMatrix, ideal_logical: &StateVector) -> Result<Fidelities, CliError> {
    let ideal_chain = encode_logical(&LogicalState::new(ideal_logical.clone()).map_err(CliError::run)?)
        .state()
        .density();
    let rec_frame = readout.map.to_measurement(reconstructed).map_err(CliError::run)?;
    let ideal_frame = readout.map.to_measurement(&ideal_chain).map_err(CliError::run)?;
    let spin = state_fidelity(&rec_frame, &ideal_frame).map_err(CliError::run)?;
    let (decoded, leakage) = decode_logical_density(reconstructed).map_err(CliError::run)?;
    let logical = state_fidelity(&decoded, &ideal_logical.density()).map_err(CliError::run)?;
    Ok(Fidelities { spin, logical, leakage })
}

fn braid_cnot() -> ComplexMatrix {
    compose_braid(&cnot_word())
}

fn logical(amps: [f64; 4]) -> StateVector {
    StateVector::from_slice(&amps.map(|a| c(a, 0.0))).expect("normalised input")
}

/// Ideal chain-frame output of the braid word for a logical input.
pub fn braided_output(input: &StateVector) -> Result<DensityMatrix, CliError> {
    let chain = encode_logical(&LogicalState::new(input.clone()).map_err(CliError::run)?);
    Ok(chain.state().apply(&braid_cnot()).map_err(CliError::run)?.density())
}

pub fn ideal_output(input: &StateVector) -> StateVector {
    input.apply(&cnot()).expect("two-qubit input")
}

#[derive(Debug, Clone, Serialize)]
pub struct StateRow {
    pub input: String,
    pub expected_output: String,
    pub input_fidelity: Fidelities,
    pub output_fidelity: Fidelities,
}

/// Input and output tomography of one logical input state. Streams
/// `2 tag` and `2 tag + 1` of the seed drive the two reconstructions.
pub fn state_row(readout: &Readout, label: &str, out_label: &str, input: &StateVector, seed: u64, tag: u64) -> Result<StateRow, CliError> {
    let encoded = encode_logical(&LogicalState::new(input.clone()).map_err(CliError::run)?).state().density();
    let rec_in = readout.measure(&encoded, derive_seed(seed, 2 * tag))?;
    let rec_out = readout.measure(&braided_output(input)?, derive_seed(seed, 2 * tag + 1))?;
    Ok(StateRow {
        input: label.into(),
        expected_output: out_label.into(),
        input_fidelity: score(readout, &rec_in, input)?,
        output_fidelity: score(readout, &rec_out, &ideal_output(input))?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProcessRow {
    pub gate: String,
    pub fidelity: f64,
    pub chi: Vec<Vec<ComplexEntry>>,
    pub labels: Vec<String>,
}

pub fn u_intra() -> ComplexMatrix {
    (identity(2) - pauli_z().map(|z| z * C64::I)).scale(FRAC_1_SQRT_2)
}

pub fn u_inter() -> ComplexMatrix {
    let xx = kron(&pauli_x(), &pauli_x());
    (identity(4) - xx.map(|z| z * C64::I)).scale(FRAC_1_SQRT_2)
}

pub fn process_row(name: &str, u: &ComplexMatrix, n_qubits: usize, shots: Shots, seed: u64) -> Result<ProcessRow, CliError> {
    let chi = characterize_process(n_qubits, |rho| Ok(rho.conjugate(u)?), shots, seed).map_err(CliError::run)?;
    let ideal = chi_of_unitary(u, n_qubits).map_err(CliError::run)?;
    Ok(ProcessRow {
        gate: name.into(),
        fidelity: process_fidelity(&chi, &ideal).map_err(CliError::run)?,
        chi: matrix_entries(chi.chi()),
        labels: chi.labels(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Means {
    pub input_spin: f64,
    pub input_logical: f64,
    pub output_spin: f64,
    pub output_logical: f64,
}

fn means(rows: &[StateRow]) -> Means {
    let n = rows.len() as f64;
    let avg = |f: &dyn Fn(&StateRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    Means {
        input_spin: avg(&|r| r.input_fidelity.spin),
        input_logical: avg(&|r| r.input_fidelity.logical),
        output_spin: avg(&|r| r.output_fidelity.spin),
        output_logical: avg(&|r| r.output_fidelity.logical),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TomographyReport {
    pub basis_map_parity_mixing: bool,
    pub dephasing_p: f64,
    pub states: Vec<StateRow>,
    pub means: Means,
    pub processes: Vec<ProcessRow>,
    pub reference: ReferenceTable,
}

pub const LOGICAL_LABELS: [&str; 4] = ["00", "01", "10", "11"];
const CNOT_IMAGE: [usize; 4] = [0, 1, 3, 2];

pub fn run_tomography(cfg: &RunConfig) -> Result<TomographyReport, CliError> {
    let readout = Readout::from_config(cfg)?;
    let states = (0..4)
        .map(|k| {
            let input = LogicalState::basis(k).state().clone();
            state_row(&readout, LOGICAL_LABELS[k], LOGICAL_LABELS[CNOT_IMAGE[k]], &input, cfg.seed, k as u64)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let processes = vec![
        process_row("intra", &u_intra(), 1, cfg.shots.0, derive_seed(cfg.seed, 100))?,
        process_row("inter", &u_inter(), 2, cfg.shots.0, derive_seed(cfg.seed, 101))?,
    ];
    Ok(TomographyReport {
        basis_map_parity_mixing: readout.map.is_parity_mixing(),
        dephasing_p: cfg.noise.p,
        means: means(&states),
        states,
        processes,
        reference: REFERENCE,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BellRow {
    pub target: String,
    pub row: StateRow,
    pub reference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BellDemoReport {
    pub basis_map_parity_mixing: bool,
    pub dephasing_p: f64,
    pub outputs: Vec<BellRow>,
}

/// `|+0> -> Phi+` and `|+1> -> Psi+`.
pub fn bell_inputs() -> [(&'static str, &'static str, StateVector, f64); 2] {
    let h = FRAC_1_SQRT_2;
    [
        ("+0", "phi_plus", logical([h, 0.0, h, 0.0]), REFERENCE.bell_phi_plus.value),
        ("+1", "psi_plus", logical([0.0, h, 0.0, h]), REFERENCE.bell_psi_plus.value),
    ]
}

pub fn run_bell(cfg: &RunConfig) -> Result<BellDemoReport, CliError> {
    let readout = Readout::from_config(cfg)?;
    let outputs = bell_inputs()
        .into_iter()
        .enumerate()
        .map(|(k, (label, target, input, reference))| {
            let row = state_row(&readout, label, target, &input, cfg.seed, k as u64)?;
            Ok(BellRow { target: target.into(), row, reference })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(BellDemoReport { basis_map_parity_mixing: readout.map.is_parity_mixing(), dephasing_p: cfg.noise.p, outputs })
}

#[derive(Debug, Clone, Serialize)]
pub struct FitRow {
    pub state: String,
    pub fit: FitResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub injected_p: f64,
    /// With a parity-preserving map the dephasing cannot be seen.
    pub identifiable: bool,
    pub fits: Vec<FitRow>,
    pub p_hat_mean: f64,
    pub reference_p: f64,
}

/// Injects correlated dephasing at `p` into each CNOT output, runs
/// tomography, fits `p` state by state against the linear-inversion
/// estimate, and averages the four fits.
pub fn fit_outputs(readout: &Readout, p: f64, seed: u64) -> Result<FitReport, CliError> {
    let fits = (0..4)
        .map(|k| {
            let input = LogicalState::basis(k).state().clone();
            let ideal = braided_output(&input)?;
            let estimate = readout.measure_linear(&ideal, derive_seed(seed, k as u64))?;
            let fit = fit_dephasing_p_to(&ideal, &estimate, Some(&readout.map)).map_err(CliError::run)?;
            Ok(FitRow { state: LOGICAL_LABELS[CNOT_IMAGE[k]].into(), fit })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let p_hat_mean = fits.iter().map(|f| f.fit.p_hat).sum::<f64>() / fits.len() as f64;
    Ok(FitReport {
        injected_p: p,
        identifiable: readout.map.is_parity_mixing(),
        fits,
        p_hat_mean,
        reference_p: REFERENCE.dephasing_p,
    })
}

pub fn run_fit(cfg: &RunConfig) -> Result<FitReport, CliError> {
    fit_outputs(&Readout::from_config(cfg)?, cfg.noise.p, cfg.seed)
}
