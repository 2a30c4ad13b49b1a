//! Model and gate invariants, each reported with its measured residual.

use crate::report::{Check, ComplexEntry};
use crate::CliError;
use mzm_cnot::braid::{
    cnot_word, cnot_word_phase, compose_braid, generator_unitary, logical_restriction, BraidGenerator, BraidKind,
};
use mzm_cnot::kitaev::{
    build_hamiltonian, decode_logical, encode_logical, register_ground_state, zero_mode_residuals, ChainBasisState,
    ChainLayout, LogicalState, ZERO_MODE_LABELS,
};
use mzm_cnot::matrix::{c, cnot, identity, kron_all, max_abs, max_abs_diff, pauli_z, ComplexMatrix, StateVector};
use mzm_cnot::pauli::{jw_majorana, MajoranaIndex, OperatorSum, PauliString};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

pub const EXACT: f64 = 0.0;
pub const DENSE_TOL: f64 = 1e-12;
pub const GROUND_TOL: f64 = 1e-10;

pub const EXPECTED_TRUTH_TABLE: [&str; 4] = ["00→00", "01→01", "10→11", "11→10"];

#[derive(Debug, Clone, Serialize)]
pub struct ZeroModeReport {
    pub residual_max: f64,
    /// Label (`A`..`F`) to Majorana site, e.g. `"A": "1a"`.
    pub modes: BTreeMap<String, String>,
    /// Majorana operators whose commutator with `H` is non-empty.
    pub non_commuting: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CnotReport {
    pub global_phase: ComplexEntry,
    pub global_phase_over_pi: f64,
    pub residual: f64,
    pub leakage: f64,
    pub truth_table: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BellReport {
    pub phi_plus_overlap: f64,
    pub psi_plus_overlap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub zero_modes: ZeroModeReport,
    pub cnot: CnotReport,
    pub bell: BellReport,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn zero_modes() -> Result<ZeroModeReport, CliError> {
    let layout = ChainLayout::standard();
    let h = build_hamiltonian(&layout).map_err(CliError::run)?;
    let residuals = zero_mode_residuals(&h).map_err(CliError::run)?;
    let modes = layout.zero_modes();
    let residual_max = modes.iter().map(|m| residuals[m].max_coeff()).fold(0.0, f64::max);
    let all_empty = modes.iter().all(|m| residuals[m].is_empty());
    let non_commuting = residuals.values().filter(|r| !r.is_empty()).count();
    let expected_others = residuals.len() - modes.len();
    Ok(ZeroModeReport {
        residual_max,
        modes: ZERO_MODE_LABELS.iter().zip(modes).map(|(l, m)| (l.to_string(), m.to_string())).collect(),
        non_commuting,
        pass: all_empty && non_commuting == expected_others,
    })
}

/// Largest coefficient of `{g_l, g_m} - 2 delta_lm` over all pairs.
pub fn anticommutator_residual(n_sites: usize) -> Result<f64, CliError> {
    let all = MajoranaIndex::all(n_sites);
    let ops = all
        .iter()
        .map(|&idx| jw_majorana(idx, n_sites).map(OperatorSum::from))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::run)?;
    let two = OperatorSum::from(PauliString::identity(n_sites).scaled(c(2.0, 0.0)));
    let mut worst: f64 = 0.0;
    for (l, gl) in ops.iter().enumerate() {
        for (m, gm) in ops.iter().enumerate() {
            let anti = gl.anticommutator(gm).map_err(CliError::run)?;
            let dev = if l == m { anti.sub(&two).map_err(CliError::run)? } else { anti };
            worst = worst.max(dev.max_coeff());
        }
    }
    Ok(worst)
}

fn g(kind: BraidKind) -> ComplexMatrix {
    generator_unitary(BraidGenerator::cw(kind))
}

pub fn yang_baxter_residual(a: BraidKind, b: BraidKind) -> f64 {
    let (x, y) = (g(a), g(b));
    max_abs_diff(&(&x * &y * &x), &(&y * &x * &y))
}

pub fn commutation_residual(a: BraidKind, b: BraidKind) -> f64 {
    let (x, y) = (g(a), g(b));
    max_abs_diff(&(&x * &y), &(&y * &x))
}

fn all_generators() -> Vec<BraidGenerator> {
    use BraidKind::*;
    [S1, S2, S3, S4].into_iter().flat_map(|k| [BraidGenerator::cw(k), BraidGenerator::ccw(k)]).collect()
}

pub fn eighth_power_residual() -> f64 {
    all_generators()
        .into_iter()
        .map(|gen| {
            let u = generator_unitary(gen);
            let p8 = (0..8).fold(identity(8), |acc, _| &u * acc);
            max_abs_diff(&p8, &identity(8))
        })
        .fold(0.0, f64::max)
}

pub fn parity_residual() -> f64 {
    let z = pauli_z();
    let zzz = kron_all([&z, &z, &z]);
    all_generators()
        .into_iter()
        .map(|gen| {
            let u = generator_unitary(gen);
            max_abs(&(&u * &zzz - &zzz * &u))
        })
        .fold(0.0, f64::max)
}

fn bits(k: usize) -> String {
    format!("{}{}", k >> 1, k & 1)
}

/// Decoded outputs of the braid word for the four logical basis inputs.
pub fn truth_table(u: &ComplexMatrix) -> Result<Vec<String>, CliError> {
    (0..4)
        .map(|k| {
            let chain = encode_logical(&LogicalState::basis(k));
            let out = chain.state().apply(u).map_err(CliError::run)?;
            let decoded = decode_logical(&ChainBasisState::new(out).map_err(CliError::run)?).map_err(CliError::run)?;
            let amps = decoded.logical.state().amplitudes();
            let hit = (0..4)
                .find(|&j| amps[j].norm_sqr() > 1.0 - DENSE_TOL)
                .map(bits)
                .unwrap_or_else(|| "superposition".into());
            Ok(format!("{}→{}", bits(k), hit))
        })
        .collect()
}

fn logical_output(u: &ComplexMatrix, input: &[f64; 4]) -> Result<StateVector, CliError> {
    let psi = StateVector::from_slice(&input.map(|a| c(a, 0.0))).map_err(CliError::run)?;
    let chain = encode_logical(&LogicalState::new(psi).map_err(CliError::run)?);
    let out = chain.state().apply(u).map_err(CliError::run)?;
    let decoded = decode_logical(&ChainBasisState::new(out).map_err(CliError::run)?).map_err(CliError::run)?;
    Ok(decoded.logical.state().clone())
}

/// `|+0> -> Phi+` and `|+1> -> Psi+` through the braid word.
pub fn bell_overlaps(u: &ComplexMatrix) -> Result<(f64, f64), CliError> {
    let h = FRAC_1_SQRT_2;
    let phi = StateVector::from_slice(&[c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)]).map_err(CliError::run)?;
    let psi = StateVector::from_slice(&[c(0., 0.), c(h, 0.), c(h, 0.), c(0., 0.)]).map_err(CliError::run)?;
    let out_phi = logical_output(u, &[h, 0.0, h, 0.0])?;
    let out_psi = logical_output(u, &[0.0, h, 0.0, h])?;
    Ok((out_phi.overlap_modulus(&phi), out_psi.overlap_modulus(&psi)))
}

fn ground_state_residual() -> Result<f64, CliError> {
    let layout = ChainLayout::standard();
    let h = build_hamiltonian(&layout).map_err(CliError::run)?;
    let mut worst: f64 = 0.0;
    for mask in 0..8u8 {
        let q = [mask & 4 != 0, mask & 2 != 0, mask & 1 != 0];
        let psi = register_ground_state(&layout, q);
        let hpsi = h.apply(&psi).map_err(CliError::run)?;
        let dev = hpsi
            .iter()
            .zip(psi.amplitudes().iter())
            .map(|(a, b)| (a + b * 8.0).norm())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    Ok(worst)
}

pub fn run_verify() -> Result<VerifyReport, CliError> {
    use BraidKind::*;
    let zero_modes = zero_modes()?;
    let u = compose_braid(&cnot_word());
    let (block, leakage) = logical_restriction(&u).map_err(CliError::run)?;
    let phase = cnot_word_phase();
    let residual = max_abs_diff(&block, &cnot().map(|z| z * phase));
    let table = truth_table(&u)?;
    let table_ok = table.iter().map(String::as_str).eq(EXPECTED_TRUTH_TABLE);
    let cnot_report = CnotReport {
        global_phase: phase.into(),
        global_phase_over_pi: phase.arg() / std::f64::consts::PI,
        residual,
        leakage,
        truth_table: table,
        pass: residual <= DENSE_TOL && leakage <= DENSE_TOL && table_ok,
    };
    let (phi, psi) = bell_overlaps(&u)?;
    let bell = BellReport {
        phi_plus_overlap: phi,
        psi_plus_overlap: psi,
        pass: phi >= 1.0 - DENSE_TOL && psi >= 1.0 - DENSE_TOL,
    };

    let mut checks = vec![
        Check { name: "zero_modes".into(), residual: zero_modes.residual_max, tolerance: EXACT, pass: zero_modes.pass },
        Check::within("majorana_anticommutators", anticommutator_residual(11)?, EXACT),
        Check::within("ground_state_energy", ground_state_residual()?, GROUND_TOL),
        Check::within("yang_baxter_s2_s3", yang_baxter_residual(S2, S3), DENSE_TOL),
        Check::within("yang_baxter_s3_s4", yang_baxter_residual(S3, S4), DENSE_TOL),
    ];
    for (a, b) in [(S1, S2), (S1, S3), (S1, S4), (S2, S4)] {
        checks.push(Check::within(&format!("commute_{a:?}_{b:?}").to_lowercase(), commutation_residual(a, b), DENSE_TOL));
    }
    checks.push(Check::within("generator_eighth_power", eighth_power_residual(), DENSE_TOL));
    checks.push(Check::within("parity_commutation", parity_residual(), DENSE_TOL));
    checks.push(Check { name: "cnot_composition".into(), residual, tolerance: DENSE_TOL, pass: cnot_report.pass });
    checks.push(Check {
        name: "bell_outputs".into(),
        residual: (1.0 - phi).max(1.0 - psi).max(0.0),
        tolerance: DENSE_TOL,
        pass: bell.pass,
    });
    let passed = checks.iter().all(|c| c.pass);
    Ok(VerifyReport { zero_modes, cnot: cnot_report, bell, checks, passed })
}
