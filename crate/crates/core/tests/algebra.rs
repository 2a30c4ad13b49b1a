//! Symbolic Pauli algebra against dense matrices, and the Majorana
//! operators of the eleven-site register.

use mzm_cnot::kitaev::{build_hamiltonian, zero_mode_residuals, ChainLayout};
use mzm_cnot::matrix::{c, max_abs_diff, ComplexMatrix, C64};
use mzm_cnot::pauli::{jw_majorana, MajoranaIndex, OperatorSum, Pauli, PauliString};
use proptest::prelude::*;

fn pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn coeff() -> impl Strategy<Value = C64> {
    (-3i32..=3, -3i32..=3)
        .prop_filter("non-zero", |(a, b)| *a != 0 || *b != 0)
        .prop_map(|(a, b)| c(a as f64, b as f64))
}

fn string(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(pauli(), n), coeff()).prop_map(|(l, k)| PauliString::new(l, k).unwrap())
}

fn sum(n: usize) -> impl Strategy<Value = OperatorSum> {
    prop::collection::vec(string(n), 0..5).prop_map(move |ts| OperatorSum::from_terms(n, ts).unwrap())
}

fn dense(s: &OperatorSum) -> ComplexMatrix {
    s.to_dense().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn string_product_matches_dense(a in string(4), b in string(4)) {
        let ab = a.multiply(&b).unwrap();
        let want = a.to_dense().unwrap() * b.to_dense().unwrap();
        prop_assert!(max_abs_diff(&ab.to_dense().unwrap(), &want) < 1e-12);
    }

    #[test]
    fn sum_algebra_matches_dense(a in sum(3), b in sum(3)) {
        let (da, db) = (dense(&a), dense(&b));
        prop_assert!(max_abs_diff(&dense(&a.add(&b).unwrap()), &(&da + &db)) < 1e-12);
        prop_assert!(max_abs_diff(&dense(&a.multiply(&b).unwrap()), &(&da * &db)) < 1e-12);
        prop_assert!(max_abs_diff(&dense(&a.commutator(&b).unwrap()), &(&da * &db - &db * &da)) < 1e-12);
        prop_assert!(max_abs_diff(&dense(&a.anticommutator(&b).unwrap()), &(&da * &db + &db * &da)) < 1e-12);
    }

    #[test]
    fn self_difference_is_empty(a in sum(4)) {
        prop_assert!(a.sub(&a).unwrap().is_empty());
    }

    #[test]
    fn multiplication_is_associative(a in sum(2), b in sum(2), d in sum(2)) {
        let left = a.multiply(&b).unwrap().multiply(&d).unwrap();
        let right = a.multiply(&b.multiply(&d).unwrap()).unwrap();
        prop_assert!(left.sub(&right).unwrap().max_coeff() < 1e-9);
    }
}

#[test]
fn all_majorana_anticommutators_are_exact() {
    let n = 11;
    let all = MajoranaIndex::all(n);
    assert_eq!(all.len(), 22);
    let ops: Vec<OperatorSum> = all.iter().map(|&i| jw_majorana(i, n).unwrap().into()).collect();
    for (l, gl) in ops.iter().enumerate() {
        for (m, gm) in ops.iter().enumerate() {
            let anti = gl.anticommutator(gm).unwrap();
            if l == m {
                assert!(anti.is_scalar(c(2.0, 0.0)), "{{g{l}, g{l}}} = {anti}");
            } else {
                assert!(anti.is_empty(), "{{g{l}, g{m}}} = {anti}");
            }
        }
    }
}

#[test]
fn exactly_six_zero_modes() {
    let layout = ChainLayout::standard();
    let residuals = zero_mode_residuals(&build_hamiltonian(&layout).unwrap()).unwrap();
    let empty: Vec<String> =
        residuals.iter().filter(|(_, r)| r.is_empty()).map(|(k, _)| k.to_string()).collect();
    assert_eq!(empty, ["1a", "3b", "5a", "7b", "9a", "11b"]);
}

#[test]
fn hamiltonian_is_hermitian_on_a_small_layout() {
    // two-site chains keep the dense check cheap
    let layout = ChainLayout::new([vec![1, 2], vec![4, 5], vec![7, 8]], vec![3, 6]).unwrap();
    let h = build_hamiltonian(&layout).unwrap().to_dense().unwrap();
    assert!(max_abs_diff(&h, &h.adjoint()) < 1e-12);
}
