//! Experimental values the simulated numbers are reported against.
//!
//! These come from photonic hardware and are shown for comparison only;
//! nothing in the runner asserts them.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measured {
    pub value: f64,
    pub uncertainty: f64,
}

const fn m(value: f64, uncertainty: f64) -> Measured {
    Measured { value, uncertainty }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceTable {
    pub input_state_fidelity_spin: Measured,
    pub input_state_fidelity_logical: Measured,
    pub process_fidelity_intra: Measured,
    pub process_fidelity_inter: Measured,
    pub output_state_fidelity_spin: Measured,
    pub output_state_fidelity_logical: Measured,
    pub bell_phi_plus: Measured,
    pub bell_psi_plus: Measured,
    pub measurement_basis_input: Measured,
    pub measurement_basis_output: Measured,
    pub logical_basis_input: Measured,
    pub logical_basis_output: Measured,
    pub dephasing_p: f64,
    pub cnot_fidelity_claim: f64,
    pub resilience_threshold: f64,
    pub advantage_below: f64,
}

pub const REFERENCE: ReferenceTable = ReferenceTable {
    input_state_fidelity_spin: m(0.9884, 0.0137),
    input_state_fidelity_logical: m(0.9976, 0.0139),
    process_fidelity_intra: m(0.991, 0.014),
    process_fidelity_inter: m(0.961, 0.014),
    output_state_fidelity_spin: m(0.8974, 0.0033),
    output_state_fidelity_logical: m(0.9901, 0.0036),
    bell_phi_plus: m(0.9938, 0.0013),
    bell_psi_plus: m(0.9953, 0.0044),
    measurement_basis_input: m(0.9894, 0.0124),
    measurement_basis_output: m(0.9006, 0.0031),
    logical_basis_input: m(0.9976, 0.0126),
    logical_basis_output: m(0.9916, 0.0034),
    dephasing_p: 0.012,
    cnot_fidelity_claim: 0.992,
    resilience_threshold: 0.065,
    advantage_below: 0.07,
};
