//! Simulation and verification toolkit for a CNOT gate built from braiding
//! Majorana zero modes hosted by three Kitaev chains.
//!
//! Module map:
//! - [`matrix`]: dense complex kernel, fidelities, Haar sampling
//! - [`pauli`]: symbolic Pauli algebra and the Jordan-Wigner map
//! - [`kitaev`]: the three-chain Hamiltonian, zero modes, logical encoding
//! - [`braid`]: braid generators and the CNOT braid word
//! - [`noise`]: Kraus channels, error placement, process matrices
//! - [`tomography`]: synthetic counts, state/process reconstruction, fitting
//! - [`resilience`]: encoded vs unencoded CNOT under local errors

pub mod braid;
pub mod kitaev;
pub mod matrix;
pub mod noise;
pub mod pauli;
pub mod resilience;
pub mod tomography;
