//! Braid-group relations and parity conservation of the generators.

use mzm_cnot::braid::{compose_braid, generator_unitary, logical_restriction, BraidGenerator, BraidKind, BraidWord};
use mzm_cnot::kitaev::{decode_logical, encode_logical, parity_of, ChainBasisState, LogicalState, Parity};
use mzm_cnot::matrix::{haar_state_from_rng, identity, kron_all, max_abs_diff, pauli_z, stream_rng};
use proptest::prelude::*;

const KINDS: [BraidKind; 4] = [BraidKind::S1, BraidKind::S2, BraidKind::S3, BraidKind::S4];

fn generator() -> impl Strategy<Value = BraidGenerator> {
    (0usize..4, any::<bool>()).prop_map(|(k, cw)| {
        if cw {
            BraidGenerator::cw(KINDS[k])
        } else {
            BraidGenerator::ccw(KINDS[k])
        }
    })
}

fn word() -> impl Strategy<Value = BraidWord> {
    prop::collection::vec(generator(), 0..12).prop_map(BraidWord)
}

#[test]
fn yang_baxter_and_far_commutation() {
    let g = |k| generator_unitary(BraidGenerator::cw(k));
    use BraidKind::*;
    for (a, b) in [(S2, S3), (S3, S4)] {
        let (x, y) = (g(a), g(b));
        assert!(max_abs_diff(&(&x * &y * &x), &(&y * &x * &y)) <= 1e-12);
    }
    for (a, b) in [(S1, S2), (S1, S3), (S1, S4), (S2, S4)] {
        let (x, y) = (g(a), g(b));
        assert!(max_abs_diff(&(&x * &y), &(&y * &x)) <= 1e-12);
    }
}

#[test]
fn eighth_power_and_square_of_generators() {
    for k in KINDS {
        let u = generator_unitary(BraidGenerator::cw(k));
        let sq = &u * &u;
        let u8 = (0..8).fold(identity(8), |acc, _| &u * acc);
        assert!(max_abs_diff(&u8, &identity(8)) <= 1e-12);
        // the square is the reflection up to -i
        let refl = k.reflection().map(|z| z * mzm_cnot::matrix::c(0.0, -1.0));
        assert!(max_abs_diff(&sq, &refl) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_commute_with_total_parity(w in word()) {
        let z = pauli_z();
        let zzz = kron_all([&z, &z, &z]);
        let u = compose_braid(&w);
        prop_assert!(max_abs_diff(&(&u * &zzz), &(&zzz * &u)) <= 1e-12);
        let (_, leak) = logical_restriction(&u).unwrap();
        prop_assert!(leak <= 1e-12);
    }

    #[test]
    fn word_times_inverse_is_identity(w in word()) {
        let u = compose_braid(&w) * compose_braid(&w.inverse());
        prop_assert!(max_abs_diff(&u, &identity(8)) <= 1e-12);
    }

    #[test]
    fn encoded_states_stay_even(w in word(), seed in any::<u64>()) {
        let psi = haar_state_from_rng(2, &mut stream_rng(seed, 0));
        let chain = encode_logical(&LogicalState::new(psi).unwrap());
        let out = ChainBasisState::new(chain.state().apply(&compose_braid(&w)).unwrap()).unwrap();
        prop_assert_eq!(parity_of(&out), Parity::Even);
        prop_assert!(decode_logical(&out).unwrap().leakage <= 1e-12);
    }

    #[test]
    fn word_text_round_trips(w in word()) {
        let text = w.to_string();
        prop_assert_eq!(text.parse::<BraidWord>().unwrap(), w);
    }
}
