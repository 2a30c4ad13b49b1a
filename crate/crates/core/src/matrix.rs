//! Dense complex linear algebra shared by the rest of the crate.
//!
//! Matrices are plain `nalgebra` dense matrices of `Complex64`. Qubit
//! ordering is big-endian throughout: in an `n`-qubit register, qubit 0 is
//! the most significant bit of a basis index, so `kron(a, b)` puts `a` on
//! qubit 0.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Largest register handled by the dense kernel.
pub const MAX_QUBITS: usize = 11;

/// Eigenvalues above `-PSD_CLAMP` are treated as round-off and clipped to zero.
pub const PSD_CLAMP: f64 = 1e-10;

const HERMITIAN_REJECT: f64 = 1e-8;
const STATE_NORM_TOL: f64 = 1e-10;
const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace {0} differs from 1")]
    BadTrace(f64),
    #[error("matrix has eigenvalue {0:e} below the PSD clamp")]
    NotPositive(f64),
    #[error("state norm {0} differs from 1")]
    BadNorm(f64),
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("non-finite entry")]
    NonFinite,
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

pub fn hadamard() -> ComplexMatrix {
    let h = c(FRAC_1_SQRT_2, 0.);
    ComplexMatrix::from_row_slice(2, 2, &[h, h, h, -h])
}

/// Two-qubit CNOT, qubit 0 controls qubit 1.
pub fn cnot() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = C64::ONE;
    m[(1, 1)] = C64::ONE;
    m[(2, 3)] = C64::ONE;
    m[(3, 2)] = C64::ONE;
    m
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors
        .into_iter()
        .fold(identity(1), |acc, f| acc.kronecker(f))
}

/// Embeds a single-qubit operator on `target` of an `n`-qubit register.
pub fn embed_single(op: &ComplexMatrix, target: usize, n_qubits: usize) -> ComplexMatrix {
    assert!(target < n_qubits, "target {target} outside {n_qubits} qubits");
    let id = identity(2);
    let factors: Vec<&ComplexMatrix> = (0..n_qubits)
        .map(|q| if q == target { op } else { &id })
        .collect();
    kron_all(factors)
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().iter().sum()
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}

pub fn hermitian_deviation(a: &ComplexMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

/// `(a + a†) / 2`.
pub fn hermitize(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()).scale(0.5)
}

fn ensure_square(a: &ComplexMatrix) -> Result<usize, MatrixError> {
    if a.nrows() != a.ncols() {
        return Err(MatrixError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(a.nrows())
}

/// Eigen-decomposition of a Hermitian matrix (eigenvalues unsorted).
pub fn hermitian_eigen(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = SymmetricEigen::new(hermitize(a));
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

fn from_eigen(values: &[f64], vectors: &ComplexMatrix) -> ComplexMatrix {
    let d = DVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.)));
    let scaled = vectors * ComplexMatrix::from_diagonal(&d);
    scaled * vectors.adjoint()
}

/// Square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-PSD_CLAMP, 0)` are clamped to zero. Anything more
/// negative is still clamped, so callers that need strict positivity should
/// validate beforehand.
pub fn matrix_sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    ensure_square(a)?;
    let dev = hermitian_deviation(a);
    if dev > HERMITIAN_REJECT {
        return Err(MatrixError::NotHermitian(dev));
    }
    let (vals, vecs) = hermitian_eigen(a);
    let roots: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    Ok(hermitize(&from_eigen(&roots, &vecs)))
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(a) b sqrt(a)))^2` of two PSD matrices.
pub(crate) fn fidelity_psd(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64, MatrixError> {
    if a.shape() != b.shape() {
        return Err(MatrixError::DimensionMismatch { left: a.nrows(), right: b.nrows() });
    }
    for m in [a, b] {
        let dev = hermitian_deviation(m);
        if dev > HERMITIAN_REJECT {
            return Err(MatrixError::NotHermitian(dev));
        }
    }
    // Work in the support of the lower-rank argument. Square roots of
    // round-off eigenvalues would otherwise add ~1e-8 per dimension.
    let (ea, eb) = (hermitian_eigen(a), hermitian_eigen(b));
    let rank = |vals: &[f64]| vals.iter().filter(|&&v| v > PSD_CLAMP).count();
    let ((vals, vecs), other) = if rank(&ea.0) <= rank(&eb.0) { (ea, b) } else { (eb, a) };
    let support: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > PSD_CLAMP).collect();
    let r = support.len();
    let inner = ComplexMatrix::from_fn(r, r, |i, j| {
        let (u, v) = (vecs.column(support[i]), vecs.column(support[j]));
        let w = (vals[support[i]] * vals[support[j]]).sqrt();
        (u.adjoint() * other * v)[(0, 0)] * w
    });
    let tr: f64 = hermitian_eigen(&inner).0.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, MatrixError> {
    fidelity_psd(rho.matrix(), sigma.matrix())
}

/// Returns `Some(c)` with `|c| = 1` when `u = c v` entrywise within `tol`.
///
/// The phase is read off the largest-magnitude entry of `v`.
pub fn equal_up_to_global_phase(u: &ComplexMatrix, v: &ComplexMatrix, tol: f64) -> Option<C64> {
    if u.shape() != v.shape() {
        return None;
    }
    let (idx, pivot) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
    if pivot.norm() <= tol {
        return (max_abs(u) <= tol).then_some(C64::ONE);
    }
    let ratio = u.as_slice()[idx] / pivot;
    if ratio.norm() == 0.0 {
        return None;
    }
    let phase = ratio / ratio.norm();
    let diff = u - v.map(|z| z * phase);
    (max_abs(&diff) <= tol).then_some(phase)
}

fn log2_exact(dim: usize) -> Result<usize, MatrixError> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(MatrixError::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Normalised pure state of a qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
}

impl StateVector {
    /// Validates norm 1 (within 1e-10) and renormalises exactly.
    pub fn new(amps: DVector<C64>) -> Result<Self, MatrixError> {
        log2_exact(amps.len())?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(MatrixError::BadNorm(norm));
        }
        Ok(Self { amps: amps.unscale(norm) })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self, MatrixError> {
        Self::new(DVector::from_column_slice(amps))
    }

    /// Normalises an arbitrary nonzero vector.
    pub fn normalized(amps: DVector<C64>) -> Result<Self, MatrixError> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(MatrixError::BadNorm(norm));
        }
        Self::new(amps.unscale(norm))
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self, MatrixError> {
        log2_exact(dim)?;
        assert!(index < dim, "basis index {index} outside dimension {dim}");
        let mut v = DVector::zeros(dim);
        v[index] = C64::ONE;
        Ok(Self { amps: v })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn overlap_modulus(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    /// Applies a unitary; the result is renormalised to absorb round-off.
    pub fn apply(&self, u: &ComplexMatrix) -> Result<StateVector, MatrixError> {
        if u.ncols() != self.dim() || u.nrows() != self.dim() {
            return Err(MatrixError::DimensionMismatch { left: u.ncols(), right: self.dim() });
        }
        Self::new(u * &self.amps)
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        Self { amps: self.amps.kronecker(&other.amps) }
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants.
    ///
    /// Hermiticity and trace are checked within 1e-10, then enforced exactly
    /// by symmetrising and dividing by the trace. Eigenvalues must be at
    /// least `-PSD_CLAMP`.
    pub fn new(mat: ComplexMatrix) -> Result<Self, MatrixError> {
        let dim = ensure_square(&mat)?;
        log2_exact(dim)?;
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        let dev = hermitian_deviation(&mat);
        if dev > DENSITY_TOL {
            return Err(MatrixError::NotHermitian(dev));
        }
        let herm = hermitize(&mat);
        let tr = trace(&herm).re;
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(MatrixError::BadTrace(tr));
        }
        let herm = herm.unscale(tr);
        let (vals, _) = hermitian_eigen(&herm);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -PSD_CLAMP {
            return Err(MatrixError::NotPositive(min));
        }
        Ok(Self { mat: herm })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        Self { mat: a * a.adjoint() }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self, MatrixError> {
        log2_exact(dim)?;
        Ok(Self { mat: identity(dim).unscale(dim as f64) })
    }

    /// Uniform mixture (or any convex combination) of density matrices.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self, MatrixError> {
        let first = parts.first().ok_or(MatrixError::BadTrace(0.0))?;
        let mut acc = ComplexMatrix::zeros(first.1.dim(), first.1.dim());
        for (w, rho) in parts {
            if rho.dim() != acc.nrows() {
                return Err(MatrixError::DimensionMismatch { left: acc.nrows(), right: rho.dim() });
            }
            acc += rho.matrix().scale(*w);
        }
        Self::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// `u rho u†` for a unitary `u`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<DensityMatrix, MatrixError> {
        if u.ncols() != self.dim() || u.nrows() != self.dim() {
            return Err(MatrixError::DimensionMismatch { left: u.ncols(), right: self.dim() });
        }
        Self::new(u * &self.mat * u.adjoint())
    }

    pub fn purity(&self) -> f64 {
        trace(&(&self.mat * &self.mat)).re
    }

    /// `Tr(Π rho)` for a Hermitian observable or projector.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        trace(&(op * &self.mat)).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let (mut vals, _) = hermitian_eigen(&self.mat);
        vals.sort_by(f64::total_cmp);
        vals
    }
}

/// Seeds a ChaCha stream from `(master_seed, stream)`.
///
/// Draw `k` of stream `s` depends only on the seed, `s` and `k`, so work can
/// be split across threads without changing any sample.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// A child seed for independent sub-tasks of one seeded run.
pub fn derive_seed(master_seed: u64, stream: u64) -> u64 {
    stream_rng(master_seed, stream).random()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Haar-random pure state from i.i.d. complex Gaussians, normalised.
pub fn haar_state_from_rng<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> StateVector {
    assert!((1..=MAX_QUBITS).contains(&n_qubits), "unsupported register size {n_qubits}");
    let dim = 1usize << n_qubits;
    loop {
        let v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
        if let Ok(s) = StateVector::normalized(v) {
            return s;
        }
    }
}

pub fn haar_random_state(n_qubits: usize, seed: u64) -> StateVector {
    haar_state_from_rng(n_qubits, &mut stream_rng(seed, 0))
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the
/// diagonal phases of `R` folded back into `Q`.
pub fn haar_unitary_from_rng<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::ONE };
        for i in 0..dim {
            out[(i, j)] *= ph;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(vals: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&v| c(v, 0.)),
        ))
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&identity(2), &pauli_z()), diag(&[1., -1., 1., -1.]));
        let zzz = kron_all([&pauli_z(), &pauli_z(), &pauli_z()]);
        assert_eq!(zzz, diag(&[1., -1., -1., 1., -1., 1., 1., -1.]));
        let xx = kron(&pauli_x(), &pauli_x());
        let s00 = StateVector::basis(4, 0).unwrap();
        assert_eq!(s00.apply(&xx).unwrap(), StateVector::basis(4, 3).unwrap());
    }

    #[test]
    fn kron_is_associative_on_integer_matrices() {
        let a = pauli_x() + pauli_z().scale(2.0);
        let b = pauli_y().scale(3.0);
        let cc = identity(2) - pauli_x();
        assert_eq!(kron(&kron(&a, &b), &cc), kron(&a, &kron(&b, &cc)));
    }

    #[test]
    fn sqrt_examples() {
        assert!(max_abs_diff(&matrix_sqrt_psd(&identity(4)).unwrap(), &identity(4)) < 1e-12);
        assert!(max_abs_diff(&matrix_sqrt_psd(&diag(&[4., 9.])).unwrap(), &diag(&[2., 3.])) < 1e-12);
        let plus = StateVector::from_slice(&[c(FRAC_1_SQRT_2, 0.), c(FRAC_1_SQRT_2, 0.)]).unwrap();
        let proj = plus.density().into_matrix();
        assert!(max_abs_diff(&matrix_sqrt_psd(&proj).unwrap(), &proj) < 1e-9);
    }

    #[test]
    fn sqrt_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]);
        assert!(matches!(matrix_sqrt_psd(&m), Err(MatrixError::NotHermitian(_))));
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::basis(2, 0).unwrap().density();
        let one = StateVector::basis(2, 1).unwrap().density();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((uhlmann_fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(uhlmann_fidelity(&zero, &one).unwrap().abs() < 1e-12);
        // Pure reference: F = <psi|sigma|psi> = 1/2.
        assert!((uhlmann_fidelity(&zero, &mixed).unwrap() - 0.5).abs() < 1e-12);
        assert!((uhlmann_fidelity(&mixed, &zero).unwrap() - 0.5).abs() < 1e-12);
        let four = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(matches!(
            uhlmann_fidelity(&zero, &four),
            Err(MatrixError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn global_phase_examples() {
        let x = pauli_x();
        assert_eq!(equal_up_to_global_phase(&x, &x, 1e-12), Some(C64::ONE));
        let ix = x.map(|z| z * C64::I);
        let ph = equal_up_to_global_phase(&ix, &x, 1e-12).unwrap();
        assert!((ph - C64::I).norm() < 1e-15);
        assert_eq!(equal_up_to_global_phase(&x, &pauli_z(), 1e-12), None);
    }

    #[test]
    fn haar_state_is_normalised_and_deterministic() {
        for seed in 0..20 {
            let a = haar_random_state(3, seed);
            assert!((a.amplitudes().norm() - 1.0).abs() < 1e-12);
            assert_eq!(a, haar_random_state(3, seed));
        }
        assert_ne!(haar_random_state(2, 1), haar_random_state(2, 2));
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = stream_rng(5, 0);
        for _ in 0..10 {
            let u = haar_unitary_from_rng(4, &mut rng);
            assert!(unitarity_deviation(&u) < 1e-12);
        }
    }

    #[test]
    fn density_rejects_bad_trace_and_negativity() {
        assert!(matches!(DensityMatrix::new(diag(&[1., 1.])), Err(MatrixError::BadTrace(_))));
        assert!(matches!(
            DensityMatrix::new(diag(&[1.5, -0.5])),
            Err(MatrixError::NotPositive(_))
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::zeros(3, 3)),
            Err(MatrixError::NotPowerOfTwo(3))
        ));
    }
}
