//! Braid generators on the three chain qubits, braid-word composition and
//! the CNOT word.
//!
//! Every generator is a normalised Pauli reflection `(1 - i P)/sqrt 2`
//! (clockwise) or its inverse `(1 + i P)/sqrt 2` (counterclockwise). The
//! intra-chain exchanges use `P = Z` on one chain qubit; the D-E exchange
//! between chains 2 and 3 uses `P = X⊗X`.

use crate::kitaev::{EVEN_SECTOR, ODD_SECTOR};
use crate::matrix::{c, cnot, identity, kron_all, pauli_x, pauli_z, ComplexMatrix, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("unknown braid generator {0:?}")]
    UnknownGenerator(String),
    #[error("expected an 8x8 chain operator, got {0}x{1}")]
    WrongShape(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BraidKind {
    /// A-B, chain 1.
    S1,
    /// C-D, chain 2.
    S2,
    /// D-E, chains 2 and 3.
    S3,
    /// E-F, chain 3.
    S4,
}

impl BraidKind {
    /// Chain qubits the generator acts on.
    pub fn participants(self) -> &'static [usize] {
        match self {
            BraidKind::S1 => &[0],
            BraidKind::S2 => &[1],
            BraidKind::S3 => &[1, 2],
            BraidKind::S4 => &[2],
        }
    }

    pub fn is_inter_chain(self) -> bool {
        self == BraidKind::S3
    }

    /// The Pauli reflection `P` on the three chain qubits.
    pub fn reflection(self) -> ComplexMatrix {
        let (i, x, z) = (identity(2), pauli_x(), pauli_z());
        match self {
            BraidKind::S1 => kron_all([&z, &i, &i]),
            BraidKind::S2 => kron_all([&i, &z, &i]),
            BraidKind::S3 => kron_all([&i, &x, &x]),
            BraidKind::S4 => kron_all([&i, &i, &z]),
        }
    }

    fn number(self) -> u8 {
        match self {
            BraidKind::S1 => 1,
            BraidKind::S2 => 2,
            BraidKind::S3 => 3,
            BraidKind::S4 => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidGenerator {
    pub kind: BraidKind,
    pub orientation: Orientation,
}

impl BraidGenerator {
    pub const fn cw(kind: BraidKind) -> Self {
        Self { kind, orientation: Orientation::Clockwise }
    }

    pub const fn ccw(kind: BraidKind) -> Self {
        Self { kind, orientation: Orientation::CounterClockwise }
    }

    pub fn inverse(self) -> Self {
        let orientation = match self.orientation {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::CounterClockwise => Orientation::Clockwise,
        };
        Self { kind: self.kind, orientation }
    }

    pub fn participants(self) -> &'static [usize] {
        self.kind.participants()
    }
}

impl fmt::Display for BraidGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.kind.number())?;
        if self.orientation == Orientation::CounterClockwise {
            write!(f, "'")?;
        }
        Ok(())
    }
}

impl FromStr for BraidGenerator {
    type Err = BraidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (body, orientation) = match s.strip_suffix('\'') {
            Some(b) => (b, Orientation::CounterClockwise),
            None => (s, Orientation::Clockwise),
        };
        let kind = match body {
            "s1" => BraidKind::S1,
            "s2" => BraidKind::S2,
            "s3" => BraidKind::S3,
            "s4" => BraidKind::S4,
            _ => return Err(BraidError::UnknownGenerator(s.to_string())),
        };
        Ok(Self { kind, orientation })
    }
}

/// Generators in application order: the first element acts first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord(pub Vec<BraidGenerator>);

impl BraidWord {
    pub fn generators(&self) -> &[BraidGenerator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord(self.0.iter().rev().map(|g| g.inverse()).collect())
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for BraidWord {
    type Err = BraidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(BraidWord)
    }
}

/// 8x8 chain-basis unitary of one generator.
pub fn generator_unitary(g: BraidGenerator) -> ComplexMatrix {
    let sign = match g.orientation {
        Orientation::Clockwise => -1.0,
        Orientation::CounterClockwise => 1.0,
    };
    let p = g.kind.reflection();
    (identity(8) + p.map(|z| z * c(0.0, sign))).scale(FRAC_1_SQRT_2)
}

/// Ordered product, last generator leftmost.
pub fn compose_braid(w: &BraidWord) -> ComplexMatrix {
    w.0.iter()
        .fold(identity(8), |acc, &g| generator_unitary(g) * acc)
}

/// The CNOT word, applied as `s1, s2', s3, s2, s4, s3, s2'`.
pub fn cnot_word() -> BraidWord {
    use BraidKind::*;
    BraidWord(vec![
        BraidGenerator::cw(S1),
        BraidGenerator::ccw(S2),
        BraidGenerator::cw(S3),
        BraidGenerator::cw(S2),
        BraidGenerator::cw(S4),
        BraidGenerator::cw(S3),
        BraidGenerator::ccw(S2),
    ])
}

/// Global phase of the composed CNOT word relative to CNOT.
pub fn cnot_word_phase() -> C64 {
    C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)
}

/// Even-sector block in logical order, and the largest even/odd coupling.
pub fn logical_restriction(u: &ComplexMatrix) -> Result<(ComplexMatrix, f64), BraidError> {
    if u.shape() != (8, 8) {
        return Err(BraidError::WrongShape(u.nrows(), u.ncols()));
    }
    let block = ComplexMatrix::from_fn(4, 4, |i, j| u[(EVEN_SECTOR[i], EVEN_SECTOR[j])]);
    let mut leak: f64 = 0.0;
    for &e in &EVEN_SECTOR {
        for &o in &ODD_SECTOR {
            leak = leak.max(u[(e, o)].norm()).max(u[(o, e)].norm());
        }
    }
    Ok((block, leak))
}

/// Odd-sector block, ordered `001, 010, 100, 111`.
pub fn odd_restriction(u: &ComplexMatrix) -> Result<ComplexMatrix, BraidError> {
    if u.shape() != (8, 8) {
        return Err(BraidError::WrongShape(u.nrows(), u.ncols()));
    }
    Ok(ComplexMatrix::from_fn(4, 4, |i, j| u[(ODD_SECTOR[i], ODD_SECTOR[j])]))
}

/// Two-qubit CNOT on the logical pair, first logical qubit controls.
pub fn logical_cnot() -> ComplexMatrix {
    cnot()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{equal_up_to_global_phase, max_abs_diff, unitarity_deviation, StateVector};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn inter_chain_first_column() {
        let u = generator_unitary(BraidGenerator::cw(BraidKind::S3));
        // |q1 q2 q3> = |000> -> (|000> - i|011>)/sqrt 2
        let out = StateVector::basis(8, 0).unwrap().apply(&u).unwrap();
        let a = out.amplitudes();
        assert!((a[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((a[3] - c(0.0, -FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn orientations_are_inverse() {
        for kind in [BraidKind::S1, BraidKind::S2, BraidKind::S3, BraidKind::S4] {
            let prod = generator_unitary(BraidGenerator::ccw(kind))
                * generator_unitary(BraidGenerator::cw(kind));
            assert!(max_abs_diff(&prod, &identity(8)) < 1e-15);
            assert!(unitarity_deviation(&generator_unitary(BraidGenerator::cw(kind))) < 1e-12);
        }
    }

    #[test]
    fn intra_generator_phases() {
        let u = generator_unitary(BraidGenerator::cw(BraidKind::S1));
        let minus = C64::from_polar(1.0, -FRAC_PI_4);
        let plus = C64::from_polar(1.0, FRAC_PI_4);
        assert!((u[(0, 0)] - minus).norm() < 1e-15);
        assert!((u[(4, 4)] - plus).norm() < 1e-15);
        // diag(1, i) up to e^{i pi/4}
        let single = ComplexMatrix::from_row_slice(2, 2, &[u[(0, 0)], u[(0, 4)], u[(4, 0)], u[(4, 4)]]);
        let published_form = ComplexMatrix::from_row_slice(2, 2, &[C64::ONE, C64::new(0., 0.), C64::new(0., 0.), C64::I]);
        let ph = equal_up_to_global_phase(&published_form, &single, 1e-12).unwrap();
        assert!((ph - plus).norm() < 1e-12);
    }

    #[test]
    fn composition_basics() {
        assert_eq!(compose_braid(&BraidWord::default()), identity(8));
        let w: BraidWord = "s2 s2'".parse().unwrap();
        assert!(max_abs_diff(&compose_braid(&w), &identity(8)) < 1e-15);
    }

    #[test]
    fn cnot_word_shape() {
        let w = cnot_word();
        assert_eq!(w.len(), 7);
        assert_eq!(w.0[0], BraidGenerator::cw(BraidKind::S1));
        assert_eq!(w.0[6], BraidGenerator::ccw(BraidKind::S2));
        assert_eq!(w.to_string(), "s1 s2' s3 s2 s4 s3 s2'");
        assert_eq!(w.to_string().parse::<BraidWord>().unwrap(), w);
        assert!("s5".parse::<BraidWord>().is_err());
    }

    #[test]
    fn restriction_examples() {
        let (block, leak) = logical_restriction(&identity(8)).unwrap();
        assert_eq!(block, identity(4));
        assert_eq!(leak, 0.0);
        let (block, leak) = logical_restriction(&generator_unitary(BraidGenerator::cw(BraidKind::S1))).unwrap();
        let m = C64::from_polar(1.0, -FRAC_PI_4);
        let p = C64::from_polar(1.0, FRAC_PI_4);
        for (k, want) in [m, m, p, p].into_iter().enumerate() {
            assert!((block[(k, k)] - want).norm() < 1e-15);
        }
        assert_eq!(leak, 0.0);
    }

    #[test]
    fn cnot_word_restricts_to_phased_cnot() {
        let u = compose_braid(&cnot_word());
        let (block, leak) = logical_restriction(&u).unwrap();
        assert!(leak < 1e-12);
        let ph = equal_up_to_global_phase(&block, &logical_cnot(), 1e-12).unwrap();
        assert!((ph - cnot_word_phase()).norm() < 1e-12);
        assert!(logical_restriction(&identity(4)).is_err());
    }
}
