//! Trace preservation, dephasing in the chain frame, and chi matrices.

use mzm_cnot::kitaev::{BasisMap, EVEN_SECTOR};
use mzm_cnot::matrix::{
    c, dagger, haar_state_from_rng, haar_unitary_from_rng, hermitian_deviation, max_abs_diff, stream_rng,
    trace, uhlmann_fidelity, ComplexMatrix, DensityMatrix, StateVector,
};
use mzm_cnot::noise::{
    apply_channel, chi_of_unitary, correlated_dephasing, correlated_dephasing_in, noisy_gate, ErrorUnitary,
    KrausChannel, NoiseSpec, Placement,
};
use proptest::prelude::*;

fn random_density(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = stream_rng(seed, 0);
    let parts: Vec<DensityMatrix> = (0..4).map(|_| haar_state_from_rng(n, &mut rng).density()).collect();
    let weighted: Vec<(f64, &DensityMatrix)> = parts.iter().map(|r| (0.25, r)).collect();
    DensityMatrix::mixture(&weighted).unwrap()
}

fn even_mixture(seed: u64) -> DensityMatrix {
    let mut rng = stream_rng(seed, 1);
    let u = haar_unitary_from_rng(4, &mut rng);
    let mut amps = vec![c(0.0, 0.0); 8];
    for (k, &i) in EVEN_SECTOR.iter().enumerate() {
        amps[i] = u[(k, 0)];
    }
    let pure = StateVector::from_slice(&amps).unwrap().density();
    DensityMatrix::mixture(&[(0.7, &pure), (0.3, &StateVector::basis(8, 3).unwrap().density())]).unwrap()
}

const ERRORS: [ErrorUnitary; 3] = [ErrorUnitary::X, ErrorUnitary::Y, ErrorUnitary::Z];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn noisy_gates_preserve_trace_and_positivity(
        seed in any::<u64>(),
        p in 0.0f64..=1.0,
        e in 0usize..3,
        placement in 0usize..Placement::ALL.len(),
    ) {
        let spec = NoiseSpec::new(ERRORS[e], p, Placement::ALL[placement]).unwrap();
        let rho = random_density(3, seed);
        let u = haar_unitary_from_rng(8, &mut stream_rng(seed, 7));
        let out = noisy_gate(&u, &[0, 2], &spec, &rho).unwrap();
        prop_assert!((trace(out.matrix()).re - 1.0).abs() < 1e-10);
        prop_assert!(out.eigenvalues().iter().all(|&l| l > -1e-10));
    }

    #[test]
    fn noisy_gate_is_affine_in_p(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let rho = random_density(2, seed);
        let u = haar_unitary_from_rng(4, &mut stream_rng(seed, 3));
        let at = |q: f64| {
            let spec = NoiseSpec::new(ErrorUnitary::Z, q, Placement::PerGateParticipants).unwrap();
            noisy_gate(&u, &[1], &spec, &rho).unwrap().into_matrix()
        };
        let blend = at(0.0).scale(1.0 - p) + at(1.0).scale(p);
        prop_assert!(max_abs_diff(&at(p), &blend) < 1e-12);
    }

    #[test]
    fn dephasing_fixes_even_mixtures(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let rho = even_mixture(seed);
        let out = apply_channel(&correlated_dephasing(p, 3).unwrap(), &rho).unwrap();
        prop_assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn chi_map_reproduces_conjugation(seed in any::<u64>(), n in 1usize..=2) {
        let dim = 1 << n;
        let u = haar_unitary_from_rng(dim, &mut stream_rng(seed, 5));
        let chi = chi_of_unitary(&u, n).unwrap();
        let rho = random_density(n, seed);
        let want = &u * rho.matrix() * dagger(&u);
        prop_assert!(max_abs_diff(&chi.apply_raw(rho.matrix()), &want) < 1e-12);
        prop_assert!(hermitian_deviation(chi.chi()) < 1e-12);
        prop_assert!((chi.trace() - 1.0).abs() < 1e-12);
        let eig = DensityMatrix::new(chi.chi().clone()).unwrap().eigenvalues();
        let rank = eig.iter().filter(|&&l| l > 1e-9).count();
        prop_assert_eq!(rank, 1);
    }

    #[test]
    fn uhlmann_is_symmetric_and_bounded(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (random_density(2, s1), random_density(2, s2));
        let ab = uhlmann_fidelity(&a, &b).unwrap();
        let ba = uhlmann_fidelity(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-9);
        prop_assert!((-1e-12..=1.0 + 1e-9).contains(&ab));
        prop_assert!((uhlmann_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn dephasing_fixes_every_basis_state() {
    let ch = correlated_dephasing(0.3, 3).unwrap();
    for i in 0..8 {
        let rho = StateVector::basis(8, i).unwrap().density();
        assert!(max_abs_diff(apply_channel(&ch, &rho).unwrap().matrix(), rho.matrix()) < 1e-12);
    }
}

#[test]
fn hadamard_frame_dephasing_flips_the_even_sector() {
    // ZZZ in the spin frame is XXX on chain states: |000> goes to |111>
    let ch = correlated_dephasing_in(1.0, &BasisMap::hadamard(3)).unwrap();
    let out = apply_channel(&ch, &StateVector::basis(8, 0).unwrap().density()).unwrap();
    assert!((out.matrix()[(7, 7)].re - 1.0).abs() < 1e-12);
}

#[test]
fn kraus_sets_must_be_trace_preserving() {
    let half: ComplexMatrix = mzm_cnot::matrix::identity(2).scale(0.5);
    assert!(KrausChannel::new(vec![half]).is_err());
    assert!(KrausChannel::identity(4).trace_preservation_error() < 1e-15);
}
