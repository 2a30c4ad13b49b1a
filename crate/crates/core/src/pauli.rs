//! Symbolic Pauli strings, operator sums, and the Jordan-Wigner image of
//! Majorana operators.
//!
//! Sites are 1-based in rendered output ("X1 X2") and 0-based in the letter
//! vector. Letter products track their phase as an exact power of `i`; the
//! power is applied to the coefficient by swapping and negating components,
//! so integer-valued coefficients stay exact through any number of products.

use crate::matrix::{ComplexMatrix, StateVector, C64, MAX_QUBITS};
use serde::{Deserialize, Serialize};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("site count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("Majorana site {site} outside 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("{0} sites exceed the dense limit of {MAX_QUBITS}")]
    TooLarge(usize),
    #[error("zero coefficient")]
    ZeroCoefficient,
    #[error("cannot parse Majorana index {0:?}")]
    BadIndex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Single-site product `self * other = i^k * letter`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        use crate::matrix::{identity, pauli_x, pauli_y, pauli_z};
        match self {
            Pauli::I => identity(2),
            Pauli::X => pauli_x(),
            Pauli::Y => pauli_y(),
            Pauli::Z => pauli_z(),
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Multiplies `z` by `i^k` without touching the magnitudes.
pub(crate) fn times_i_pow(z: C64, k: u8) -> C64 {
    match k % 4 {
        0 => z,
        1 => C64::new(-z.im, z.re),
        2 => C64::new(-z.re, -z.im),
        _ => C64::new(z.im, -z.re),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    letters: Vec<Pauli>,
    coeff: C64,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, coeff: C64) -> Result<Self, PauliError> {
        if coeff == C64::new(0.0, 0.0) {
            return Err(PauliError::ZeroCoefficient);
        }
        Ok(Self { letters, coeff })
    }

    pub fn identity(n_sites: usize) -> Self {
        Self { letters: vec![Pauli::I; n_sites], coeff: C64::ONE }
    }

    /// A single letter at 0-based `site`, identity elsewhere.
    pub fn single(n_sites: usize, site: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n_sites);
        s.letters[site] = p;
        s
    }

    /// Parses compact letter notation such as `"ZXI"` (site 1 first).
    pub fn from_letters(letters: &str) -> Option<Self> {
        let letters = letters
            .chars()
            .map(|ch| match ch {
                'I' => Some(Pauli::I),
                'X' => Some(Pauli::X),
                'Y' => Some(Pauli::Y),
                'Z' => Some(Pauli::Z),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self { letters, coeff: C64::ONE })
    }

    pub fn n_sites(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn coeff(&self) -> C64 {
        self.coeff
    }

    pub fn scaled(mut self, factor: C64) -> Self {
        self.coeff *= factor;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        if self.n_sites() != other.n_sites() {
            return Err(PauliError::SizeMismatch(self.n_sites(), other.n_sites()));
        }
        let mut phase = 0u8;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (k, p) = a.mul(b);
                phase = (phase + k) % 4;
                p
            })
            .collect();
        Ok(PauliString { letters, coeff: times_i_pow(self.coeff * other.coeff, phase) })
    }

    /// Dense matrix, built from the bit-flip mask and per-site phases
    /// rather than a chain of Kronecker products.
    pub fn to_dense(&self) -> Result<ComplexMatrix, PauliError> {
        let n = self.n_sites();
        if n > MAX_QUBITS {
            return Err(PauliError::TooLarge(n));
        }
        let dim = 1usize << n;
        let mut m = ComplexMatrix::zeros(dim, dim);
        for col in 0..dim {
            let (row, amp) = self.act_on_basis(col);
            m[(row, col)] += amp;
        }
        Ok(m)
    }

    /// Image of basis state `col`: `P|col> = amp |row>`.
    fn act_on_basis(&self, col: usize) -> (usize, C64) {
        let n = self.n_sites();
        let mut row = col;
        let mut phase = 0u8;
        let mut sign = false;
        for (site, &p) in self.letters.iter().enumerate() {
            let bit = n - 1 - site;
            let set = (col >> bit) & 1 == 1;
            match p {
                Pauli::I => {}
                Pauli::X => {}
                // Y|0> = i|1>, Y|1> = -i|0>
                Pauli::Y => {
                    phase = (phase + 1) % 4;
                    sign ^= set;
                }
                Pauli::Z => sign ^= set,
            }
            if p.flips() {
                row ^= 1 << bit;
            }
        }
        let mut amp = times_i_pow(self.coeff, phase);
        if sign {
            amp = -amp;
        }
        (row, amp)
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        for (col, &a) in psi.iter().enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            let (row, amp) = self.act_on_basis(col);
            out[row] += amp * a;
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * ", format_coeff(self.coeff))?;
        let support: Vec<String> = self
            .letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(i, &p)| format!("{}{}", p.symbol(), i + 1))
            .collect();
        if support.is_empty() {
            write!(f, "I")
        } else {
            write!(f, "{}", support.join(" "))
        }
    }
}

fn format_real(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

pub fn format_coeff(z: C64) -> String {
    if z.im == 0.0 {
        format_real(z.re)
    } else if z.re == 0.0 {
        match z.im {
            v if v == 1.0 => "i".to_string(),
            v if v == -1.0 => "-i".to_string(),
            v => format!("{}i", format_real(v)),
        }
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("({}{}{}i)", format_real(z.re), sign, format_real(z.im.abs()))
    }
}

/// Canonical sum of Pauli strings: one entry per letter pattern, no zero
/// coefficients. The empty sum is the zero operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    n_sites: usize,
    terms: BTreeMap<Vec<Pauli>, C64>,
}

impl OperatorSum {
    pub fn zero(n_sites: usize) -> Self {
        Self { n_sites, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(n_sites: usize, terms: I) -> Result<Self, PauliError>
    where
        I: IntoIterator<Item = PauliString>,
    {
        let mut sum = Self::zero(n_sites);
        for t in terms {
            sum.add_term(t)?;
        }
        Ok(sum)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (letter-lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms
            .iter()
            .map(|(l, &c)| PauliString { letters: l.clone(), coeff: c })
    }

    /// Largest coefficient magnitude, 0 for the zero operator.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn add_term(&mut self, t: PauliString) -> Result<(), PauliError> {
        if t.n_sites() != self.n_sites {
            return Err(PauliError::SizeMismatch(self.n_sites, t.n_sites()));
        }
        match self.terms.entry(t.letters) {
            Entry::Vacant(v) => {
                if t.coeff != C64::new(0.0, 0.0) {
                    v.insert(t.coeff);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += t.coeff;
                if *o.get() == C64::new(0.0, 0.0) {
                    o.remove();
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &OperatorSum) -> Result<OperatorSum, PauliError> {
        let mut out = self.clone();
        for t in other.terms() {
            out.add_term(t)?;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: C64) -> OperatorSum {
        let mut out = Self::zero(self.n_sites);
        if factor != C64::new(0.0, 0.0) {
            for t in self.terms() {
                out.add_term(t.scaled(factor)).expect("same size");
            }
        }
        out
    }

    pub fn sub(&self, other: &OperatorSum) -> Result<OperatorSum, PauliError> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn multiply(&self, other: &OperatorSum) -> Result<OperatorSum, PauliError> {
        if self.n_sites != other.n_sites {
            return Err(PauliError::SizeMismatch(self.n_sites, other.n_sites));
        }
        let mut out = Self::zero(self.n_sites);
        for a in self.terms() {
            for b in other.terms() {
                out.add_term(a.multiply(&b)?)?;
            }
        }
        Ok(out)
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &OperatorSum) -> Result<OperatorSum, PauliError> {
        self.multiply(other)?.sub(&other.multiply(self)?)
    }

    /// `ab + ba`.
    pub fn anticommutator(&self, other: &OperatorSum) -> Result<OperatorSum, PauliError> {
        self.multiply(other)?.add(&other.multiply(self)?)
    }

    pub fn to_dense(&self) -> Result<ComplexMatrix, PauliError> {
        if self.n_sites > MAX_QUBITS {
            return Err(PauliError::TooLarge(self.n_sites));
        }
        let dim = 1usize << self.n_sites;
        let mut m = ComplexMatrix::zeros(dim, dim);
        for t in self.terms() {
            for col in 0..dim {
                let (row, amp) = t.act_on_basis(col);
                m[(row, col)] += amp;
            }
        }
        Ok(m)
    }

    /// Matrix-free action on a state vector.
    pub fn apply(&self, psi: &StateVector) -> Result<Vec<C64>, PauliError> {
        if psi.n_qubits() != self.n_sites {
            return Err(PauliError::SizeMismatch(self.n_sites, psi.n_qubits()));
        }
        let amps = psi.amplitudes().as_slice();
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for t in self.terms() {
            for (o, v) in out.iter_mut().zip(t.apply(amps)) {
                *o += v;
            }
        }
        Ok(out)
    }

    /// Equals `scalar * I` exactly.
    pub fn is_scalar(&self, scalar: C64) -> bool {
        if scalar == C64::new(0.0, 0.0) {
            return self.is_empty();
        }
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(l, &c)| l.iter().all(|&p| p == Pauli::I) && c == scalar)
    }
}

impl From<PauliString> for OperatorSum {
    fn from(p: PauliString) -> Self {
        let n = p.n_sites();
        Self::from_terms(n, [p]).expect("single term matches its own size")
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Flavor {
    A,
    B,
}

/// Majorana operator label `gamma_{site, flavor}`, sites 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MajoranaIndex {
    pub site: usize,
    pub flavor: Flavor,
}

impl MajoranaIndex {
    pub const fn a(site: usize) -> Self {
        Self { site, flavor: Flavor::A }
    }

    pub const fn b(site: usize) -> Self {
        Self { site, flavor: Flavor::B }
    }

    /// All `2 n` Majorana operators in order `1a, 1b, 2a, ...`.
    pub fn all(n_sites: usize) -> Vec<MajoranaIndex> {
        (1..=n_sites).flat_map(|s| [Self::a(s), Self::b(s)]).collect()
    }
}

impl fmt::Display for MajoranaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fl = match self.flavor {
            Flavor::A => 'a',
            Flavor::B => 'b',
        };
        write!(f, "{}{}", self.site, fl)
    }
}

impl FromStr for MajoranaIndex {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PauliError::BadIndex(s.to_string());
        let (num, fl) = s.split_at(s.len().checked_sub(1).ok_or_else(bad)?);
        let site: usize = num.parse().map_err(|_| bad())?;
        match fl {
            "a" => Ok(Self::a(site)),
            "b" => Ok(Self::b(site)),
            _ => Err(bad()),
        }
    }
}

/// Jordan-Wigner image: `gamma_ja = Z_1..Z_{j-1} X_j`, `gamma_jb = Z_1..Z_{j-1} Y_j`.
pub fn jw_majorana(idx: MajoranaIndex, n_sites: usize) -> Result<PauliString, PauliError> {
    if idx.site == 0 || idx.site > n_sites {
        return Err(PauliError::SiteOutOfRange { site: idx.site, n_sites });
    }
    let j = idx.site - 1;
    let mut letters = vec![Pauli::I; n_sites];
    letters[..j].fill(Pauli::Z);
    letters[j] = match idx.flavor {
        Flavor::A => Pauli::X,
        Flavor::B => Pauli::Y,
    };
    Ok(PauliString { letters, coeff: C64::ONE })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::max_abs_diff;

    fn ps(s: &str) -> PauliString {
        PauliString::from_letters(s).unwrap()
    }

    #[test]
    fn single_site_products() {
        let xy = ps("X").multiply(&ps("Y")).unwrap();
        assert_eq!(xy, ps("Z").scaled(C64::I));
        let zz = ps("Z").multiply(&ps("Z")).unwrap();
        assert!(zz.is_identity());
        assert_eq!(zz.coeff(), C64::ONE);
    }

    #[test]
    fn sitewise_product() {
        // (Z1 X2)(X1 X2) = (ZX)_1 (XX)_2 = i Y1
        let out = ps("ZX").multiply(&ps("XX")).unwrap();
        assert_eq!(out, ps("YI").scaled(C64::I));
    }

    #[test]
    fn multiply_rejects_size_mismatch() {
        assert_eq!(ps("X").multiply(&ps("XX")), Err(PauliError::SizeMismatch(1, 2)));
    }

    #[test]
    fn commutator_examples() {
        let z1 = OperatorSum::from(ps("ZI"));
        let z2 = OperatorSum::from(ps("IZ"));
        assert!(z1.commutator(&z2).unwrap().is_empty());
        let x = OperatorSum::from(ps("X"));
        let z = OperatorSum::from(ps("Z"));
        let comm = x.commutator(&z).unwrap();
        assert_eq!(comm, OperatorSum::from(ps("Y").scaled(C64::new(0.0, -2.0))));
        assert_eq!(comm.to_string(), "-2i * Y1");
    }

    #[test]
    fn jw_examples() {
        assert_eq!(jw_majorana(MajoranaIndex::a(1), 3).unwrap(), ps("XII"));
        assert_eq!(jw_majorana(MajoranaIndex::b(2), 3).unwrap(), ps("ZYI"));
        let g1b = jw_majorana(MajoranaIndex::b(1), 3).unwrap();
        let g2a = jw_majorana(MajoranaIndex::a(2), 3).unwrap();
        let bond = g1b.multiply(&g2a).unwrap().scaled(C64::I);
        assert_eq!(bond, ps("XXI").scaled(C64::new(-1.0, 0.0)));
        assert_eq!(OperatorSum::from(bond).to_string(), "-1 * X1 X2");
        assert!(matches!(
            jw_majorana(MajoranaIndex::a(4), 3),
            Err(PauliError::SiteOutOfRange { site: 4, n_sites: 3 })
        ));
    }

    #[test]
    fn jw_outputs_are_hermitian_involutions() {
        for idx in MajoranaIndex::all(4) {
            let m = jw_majorana(idx, 4).unwrap().to_dense().unwrap();
            assert!(max_abs_diff(&m, &m.adjoint()) == 0.0);
            assert!(max_abs_diff(&(&m * &m), &crate::matrix::identity(16)) == 0.0);
        }
    }

    #[test]
    fn dense_examples() {
        let z = OperatorSum::from(ps("Z")).to_dense().unwrap();
        assert_eq!(z, crate::matrix::pauli_z());
        let xx = OperatorSum::from(ps("XX")).to_dense().unwrap();
        let mut anti = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            anti[(i, 3 - i)] = C64::ONE;
        }
        assert_eq!(xx, anti);
        let big = OperatorSum::from(PauliString::identity(12));
        assert_eq!(big.to_dense(), Err(PauliError::TooLarge(12)));
    }

    #[test]
    fn dense_matches_kron_for_y_strings() {
        let p = ps("YZXY");
        let kron = crate::matrix::kron_all(
            p.letters().iter().map(|l| l.matrix()).collect::<Vec<_>>().iter(),
        );
        assert!(max_abs_diff(&p.to_dense().unwrap(), &kron) == 0.0);
    }

    #[test]
    fn majorana_index_round_trip() {
        for idx in MajoranaIndex::all(11) {
            assert_eq!(idx.to_string().parse::<MajoranaIndex>().unwrap(), idx);
        }
        assert!("12c".parse::<MajoranaIndex>().is_err());
        assert!("".parse::<MajoranaIndex>().is_err());
    }

    #[test]
    fn coefficient_rendering() {
        assert_eq!(format_coeff(C64::new(2.0, 0.0)), "2");
        assert_eq!(format_coeff(C64::new(0.0, -1.0)), "-i");
        assert_eq!(format_coeff(C64::new(0.5, 0.0)), "0.5");
        assert_eq!(format_coeff(C64::new(1.0, -2.0)), "(1-2i)");
    }
}
