//! The three-chain Kitaev model: Hamiltonian, endpoint zero modes, chain
//! ground states, and the two-qubit logical encoding in the even Fermi
//! parity sector of the three chain qubits.

use crate::matrix::{
    c, hadamard, identity, kron_all, unitarity_deviation, ComplexMatrix, DensityMatrix,
    MatrixError, StateVector, C64,
};
use crate::pauli::{jw_majorana, MajoranaIndex, OperatorSum, PauliError};
use nalgebra::DVector;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KitaevError {
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error("expected a {expected}-dimensional state, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("state has no even-parity component (leakage 1)")]
    FullyOdd,
    #[error("invalid basis map: {0}")]
    BasisMap(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Chain-basis indices of the even sector, in logical order `00, 01, 10, 11`.
pub const EVEN_SECTOR: [usize; 4] = [0b000, 0b011, 0b101, 0b110];
pub const ODD_SECTOR: [usize; 4] = [0b001, 0b010, 0b100, 0b111];

const PARITY_TOL: f64 = 1e-10;

/// Site assignment of the three chains and their two connectors (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLayout {
    chains: [Vec<usize>; 3],
    connectors: Vec<usize>,
}

impl ChainLayout {
    pub fn new(chains: [Vec<usize>; 3], connectors: Vec<usize>) -> Result<Self, KitaevError> {
        let mut all: Vec<usize> = chains.iter().flatten().chain(&connectors).copied().collect();
        if chains.iter().any(|c| c.len() < 2) {
            return Err(KitaevError::Layout("each chain needs at least two sites".into()));
        }
        all.sort_unstable();
        let n = all.len();
        if all != (1..=n).collect::<Vec<_>>() {
            return Err(KitaevError::Layout(format!(
                "sites must be disjoint and cover 1..={n}, got {all:?}"
            )));
        }
        Ok(Self { chains, connectors })
    }

    /// Chains on sites 1-3, 5-7, 9-11 with connectors 4 and 8.
    pub fn standard() -> Self {
        Self::new([vec![1, 2, 3], vec![5, 6, 7], vec![9, 10, 11]], vec![4, 8])
            .expect("standard layout is valid")
    }

    pub fn n_sites(&self) -> usize {
        self.chains.iter().map(Vec::len).sum::<usize>() + self.connectors.len()
    }

    pub fn chains(&self) -> &[Vec<usize>; 3] {
        &self.chains
    }

    pub fn connectors(&self) -> &[usize] {
        &self.connectors
    }

    /// Endpoint modes, left `a` then right `b` of each chain: A..F.
    pub fn zero_modes(&self) -> [MajoranaIndex; 6] {
        let ends = |c: &Vec<usize>| (MajoranaIndex::a(c[0]), MajoranaIndex::b(c[c.len() - 1]));
        let (a, b) = ends(&self.chains[0]);
        let (cc, d) = ends(&self.chains[1]);
        let (e, f) = ends(&self.chains[2]);
        [a, b, cc, d, e, f]
    }
}

pub const ZERO_MODE_LABELS: [char; 6] = ['A', 'B', 'C', 'D', 'E', 'F'];

fn bilinear(l: MajoranaIndex, m: MajoranaIndex, n: usize) -> Result<OperatorSum, PauliError> {
    let p = jw_majorana(l, n)?.multiply(&jw_majorana(m, n)?)?;
    Ok(OperatorSum::from(p.scaled(C64::I)))
}

/// `i (sum of bond terms gamma_jb gamma_{j+1,a} + connector terms gamma_ka gamma_kb)`.
pub fn build_hamiltonian(layout: &ChainLayout) -> Result<OperatorSum, KitaevError> {
    let n = layout.n_sites();
    let mut h = OperatorSum::zero(n);
    for chain in layout.chains() {
        for pair in chain.windows(2) {
            h = h.add(&bilinear(MajoranaIndex::b(pair[0]), MajoranaIndex::a(pair[1]), n)?)?;
        }
    }
    for &k in layout.connectors() {
        h = h.add(&bilinear(MajoranaIndex::a(k), MajoranaIndex::b(k), n)?)?;
    }
    Ok(h)
}

/// `[h, gamma]` for every Majorana operator of the register.
pub fn zero_mode_residuals(
    h: &OperatorSum,
) -> Result<BTreeMap<MajoranaIndex, OperatorSum>, KitaevError> {
    let n = h.n_sites();
    MajoranaIndex::all(n)
        .into_iter()
        .map(|idx| {
            let g = OperatorSum::from(jw_majorana(idx, n)?);
            Ok((idx, h.commutator(&g)?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Chain {
    First,
    Second,
    Third,
}

impl Chain {
    pub const ALL: [Chain; 3] = [Chain::First, Chain::Second, Chain::Third];

    pub fn index(self) -> usize {
        match self {
            Chain::First => 0,
            Chain::Second => 1,
            Chain::Third => 2,
        }
    }
}

/// Bond part of one chain's Hamiltonian on its own three sites:
/// `-(X1 X2 + X2 X3)`.
pub fn chain_hamiltonian() -> Result<OperatorSum, KitaevError> {
    let layout_sites = 3;
    let mut h = OperatorSum::zero(layout_sites);
    for j in 1..layout_sites {
        h = h.add(&bilinear(MajoranaIndex::b(j), MajoranaIndex::a(j + 1), layout_sites)?)?;
    }
    Ok(h)
}

fn ghz_x(sign: f64) -> StateVector {
    // |+++> and |---> in the computational basis
    let amp = 1.0 / 8f64.sqrt();
    let v = DVector::from_fn(8, |i, _| {
        let minus_sign = if i.count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        c(amp * (1.0 + sign * minus_sign), 0.0)
    });
    StateVector::normalized(v).expect("GHZ vector is nonzero")
}

/// `(|0_c>, |1_c>)` on the chain's three spins, as x-basis GHZ states.
///
/// Chain 1 labels `(xxx + x̄x̄x̄)` as 0 and `(xxx - x̄x̄x̄)` as 1; chains 2 and
/// 3 use the opposite sign assignment.
pub fn chain_ground_states(chain: Chain) -> (StateVector, StateVector) {
    let plus = ghz_x(1.0);
    let minus = ghz_x(-1.0);
    match chain {
        Chain::First => (plus, minus),
        Chain::Second | Chain::Third => (minus, plus),
    }
}

/// Product ground state of the full register for chain labels `q`:
/// chain states with connectors in `|0>`.
pub fn register_ground_state(layout: &ChainLayout, q: [bool; 3]) -> StateVector {
    let zero = StateVector::basis(2, 0).expect("qubit basis");
    let mut parts: Vec<(usize, StateVector)> = Vec::new();
    for (ci, chain) in Chain::ALL.iter().enumerate() {
        let (g0, g1) = chain_ground_states(*chain);
        // chain states are defined on three spins
        debug_assert_eq!(layout.chains()[ci].len(), 3);
        parts.push((layout.chains()[ci][0], if q[ci] { g1 } else { g0 }));
    }
    for &k in layout.connectors() {
        parts.push((k, zero.clone()));
    }
    parts.sort_by_key(|(site, _)| *site);
    let mut iter = parts.into_iter().map(|(_, s)| s);
    let first = iter.next().expect("at least one part");
    iter.fold(first, |acc, s| acc.kron(&s))
}

fn check_dim(psi: &StateVector, expected: usize) -> Result<(), KitaevError> {
    if psi.dim() != expected {
        return Err(KitaevError::WrongDimension { expected, got: psi.dim() });
    }
    Ok(())
}

/// Two logical qubits, basis order `|00>, |01>, |10>, |11>`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalState(StateVector);

impl LogicalState {
    pub fn new(psi: StateVector) -> Result<Self, KitaevError> {
        check_dim(&psi, 4)?;
        Ok(Self(psi))
    }

    pub fn basis(index: usize) -> Self {
        Self(StateVector::basis(4, index).expect("logical basis"))
    }

    pub fn state(&self) -> &StateVector {
        &self.0
    }
}

/// Three chain qubits `|q1 q2 q3>`, index `4 q1 + 2 q2 + q3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainBasisState(StateVector);

impl ChainBasisState {
    pub fn new(psi: StateVector) -> Result<Self, KitaevError> {
        check_dim(&psi, 8)?;
        Ok(Self(psi))
    }

    pub fn basis(index: usize) -> Self {
        Self(StateVector::basis(8, index).expect("chain basis"))
    }

    pub fn state(&self) -> &StateVector {
        &self.0
    }
}

/// `|ab>_l -> |a, b, a xor b>`.
pub fn encode_logical(l: &LogicalState) -> ChainBasisState {
    let src = l.state().amplitudes();
    let mut v = DVector::zeros(8);
    for (k, &idx) in EVEN_SECTOR.iter().enumerate() {
        v[idx] = src[k];
    }
    ChainBasisState(StateVector::new(v).expect("isometry preserves norm"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub logical: LogicalState,
    /// Odd-sector weight `1 - |P_even psi|^2`.
    pub leakage: f64,
}

/// Projects onto the even sector and renormalises.
pub fn decode_logical(s: &ChainBasisState) -> Result<Decoded, KitaevError> {
    let amps = s.state().amplitudes();
    let v = DVector::from_iterator(4, EVEN_SECTOR.iter().map(|&i| amps[i]));
    let kept = v.norm_squared();
    let leakage = (1.0 - kept).clamp(0.0, 1.0);
    if kept <= PARITY_TOL * PARITY_TOL {
        return Err(KitaevError::FullyOdd);
    }
    let logical = LogicalState(StateVector::normalized(v)?);
    Ok(Decoded { logical, leakage })
}

/// Embeds a logical density matrix into the chain space.
pub fn encode_logical_density(rho: &DensityMatrix) -> Result<DensityMatrix, KitaevError> {
    if rho.dim() != 4 {
        return Err(KitaevError::WrongDimension { expected: 4, got: rho.dim() });
    }
    let mut m = ComplexMatrix::zeros(8, 8);
    for (i, &a) in EVEN_SECTOR.iter().enumerate() {
        for (j, &b) in EVEN_SECTOR.iter().enumerate() {
            m[(a, b)] = rho.matrix()[(i, j)];
        }
    }
    Ok(DensityMatrix::new(m)?)
}

/// Even-sector block of a chain density matrix, renormalised, with the
/// discarded odd-sector weight.
pub fn decode_logical_density(rho: &DensityMatrix) -> Result<(DensityMatrix, f64), KitaevError> {
    if rho.dim() != 8 {
        return Err(KitaevError::WrongDimension { expected: 8, got: rho.dim() });
    }
    let block = ComplexMatrix::from_fn(4, 4, |i, j| rho.matrix()[(EVEN_SECTOR[i], EVEN_SECTOR[j])]);
    let kept: f64 = (0..4).map(|i| block[(i, i)].re).sum();
    if kept <= PARITY_TOL {
        return Err(KitaevError::FullyOdd);
    }
    let leakage = (1.0 - kept).clamp(0.0, 1.0);
    Ok((DensityMatrix::new(block.unscale(kept))?, leakage))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn eigenvalue(self) -> Option<i8> {
        match self {
            Parity::Even => Some(1),
            Parity::Odd => Some(-1),
            Parity::Mixed => None,
        }
    }
}

/// `Z⊗Z⊗Z` eigenvalue of a chain state, or `Mixed`.
///
/// `||ZZZ psi - psi|| = 2 ||P_odd psi||`, so the eigenvector test reduces to
/// the sector weights.
pub fn parity_of(s: &ChainBasisState) -> Parity {
    let amps = s.state().amplitudes();
    let odd: f64 = ODD_SECTOR.iter().map(|&i| amps[i].norm_sqr()).sum::<f64>().sqrt();
    let even: f64 = EVEN_SECTOR.iter().map(|&i| amps[i].norm_sqr()).sum::<f64>().sqrt();
    if 2.0 * odd <= PARITY_TOL {
        Parity::Even
    } else if 2.0 * even <= PARITY_TOL {
        Parity::Odd
    } else {
        Parity::Mixed
    }
}

/// Unitary change of frame from chain labels to the basis in which states
/// are measured or errors act: `|m> = B |chain>`.
///
/// The identity map is the default. `hadamard` rotates every qubit between
/// the z and x bases, which mixes the two parity sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMap {
    unitary: ComplexMatrix,
}

impl BasisMap {
    pub fn identity(n_qubits: usize) -> Self {
        Self { unitary: identity(1 << n_qubits) }
    }

    pub fn hadamard(n_qubits: usize) -> Self {
        let h = hadamard();
        Self { unitary: kron_all(std::iter::repeat_n(&h, n_qubits)) }
    }

    pub fn from_unitary(unitary: ComplexMatrix) -> Result<Self, KitaevError> {
        let dim = unitary.nrows();
        if unitary.ncols() != dim || !dim.is_power_of_two() {
            return Err(KitaevError::BasisMap(format!("{}x{} is not a register map", dim, unitary.ncols())));
        }
        let dev = unitarity_deviation(&unitary);
        if dev > 1e-10 {
            return Err(KitaevError::BasisMap(format!("not unitary (deviation {dev:e})")));
        }
        Ok(Self { unitary })
    }

    /// Permutation with phases: chain basis state `k` maps to
    /// `phases[k] |perm[k]>`.
    pub fn from_permutation(perm: &[usize], phases: &[C64]) -> Result<Self, KitaevError> {
        let dim = perm.len();
        if phases.len() != dim {
            return Err(KitaevError::BasisMap("phase table length differs from permutation".into()));
        }
        let mut seen = vec![false; dim];
        let mut u = ComplexMatrix::zeros(dim, dim);
        for (k, (&target, &ph)) in perm.iter().zip(phases).enumerate() {
            if target >= dim || seen[target] {
                return Err(KitaevError::BasisMap(format!("{perm:?} is not a permutation")));
            }
            if (ph.norm() - 1.0).abs() > 1e-12 {
                return Err(KitaevError::BasisMap(format!("phase {ph} is not unit modulus")));
            }
            seen[target] = true;
            u[(target, k)] = ph;
        }
        Self::from_unitary(u)
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn to_measurement(&self, rho: &DensityMatrix) -> Result<DensityMatrix, KitaevError> {
        Ok(rho.conjugate(&self.unitary)?)
    }

    pub fn to_chain(&self, rho: &DensityMatrix) -> Result<DensityMatrix, KitaevError> {
        Ok(rho.conjugate(&self.unitary.adjoint())?)
    }

    /// Chain-frame form `B† O B` of an operator given in the mapped frame.
    pub fn operator_to_chain(&self, op: &ComplexMatrix) -> ComplexMatrix {
        self.unitary.adjoint() * op * &self.unitary
    }

    /// True when some even-sector chain state acquires odd-sector weight.
    pub fn is_parity_mixing(&self) -> bool {
        if self.dim() != 8 {
            return false;
        }
        EVEN_SECTOR.iter().any(|&col| {
            ODD_SECTOR.iter().any(|&row| self.unitary[(row, col)].norm() > 1e-12)
        })
    }
}

/// `|x> = (|0> + |1>)/sqrt 2` helper for tests and reports.
pub fn x_ket(bar: bool) -> StateVector {
    let s = if bar { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    StateVector::from_slice(&[c(FRAC_1_SQRT_2, 0.0), c(s, 0.0)]).expect("normalised")
}
