//! Resilience sweep: schedule independence, monotone curves, noiseless
//! limit and the threshold search.

use mzm_cnot::noise::{ErrorUnitary, NoiseSpec, Placement};
use mzm_cnot::resilience::{find_threshold, run_comparison, run_trial, ErrorFrame, StudyConfig, StudyPoint};
use proptest::prelude::*;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn config() -> StudyConfig {
    StudyConfig { master_seed: 2024, ..StudyConfig::default() }
}

#[test]
fn sweep_is_schedule_independent_and_monotone() {
    let cfg = config();
    let one = in_pool(1, || run_comparison(&cfg).unwrap());
    let four = in_pool(4, || run_comparison(&cfg).unwrap());
    assert_eq!(one, four);

    let pts = &one.points;
    assert_eq!(pts.len(), 31);
    for w in pts.windows(2) {
        assert!(w[1].f_enc_mean <= w[0].f_enc_mean + 1e-12, "F_enc rises at p = {}", w[1].p);
        assert!(w[1].f_un_mean <= w[0].f_un_mean + 1e-12, "F_un rises at p = {}", w[1].p);
    }
    let zero = &pts[0];
    assert!((zero.f_enc_mean - 1.0).abs() < 1e-12 && (zero.f_un_mean - 1.0).abs() < 1e-12);
    // equal fidelities are ties, not wins
    assert_eq!(zero.p_avg, 0.0);
}

#[test]
fn different_seeds_change_samples() {
    let a = config();
    let b = StudyConfig { master_seed: 2025, ..config() };
    assert_ne!(a.sample_input(0), b.sample_input(0));
    assert_eq!(a.sample_input(7), config().sample_input(7));
}

fn point(p: f64, diff: f64) -> StudyPoint {
    StudyPoint {
        p,
        f_enc_mean: 0.9 + diff,
        f_un_mean: 0.9,
        f_enc_stderr: 0.0,
        f_un_stderr: 0.0,
        p_avg: 0.0,
        p_avg_bootstrap: 0.0,
    }
}

#[test]
fn threshold_interpolates_the_crossing() {
    let pts = [point(0.0, 0.0), point(0.01, 0.02), point(0.02, 0.01), point(0.03, -0.01)];
    let th = find_threshold(&pts).unwrap();
    assert!((th - 0.025).abs() < 1e-12);
}

#[test]
fn threshold_handles_ties_and_no_crossing() {
    let tie_between = [point(0.0, 0.01), point(0.01, 0.0), point(0.02, -0.01)];
    assert_eq!(find_threshold(&tie_between), Some(0.01));
    let always_ahead = [point(0.0, 0.0), point(0.01, 0.01), point(0.02, 0.03)];
    assert_eq!(find_threshold(&always_ahead), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn noiseless_trials_are_perfect(
        k in 0usize..10_000,
        frame in prop_oneof![Just(ErrorFrame::Chain), Just(ErrorFrame::Spin)],
    ) {
        let psi = config().sample_input(k);
        for placement in Placement::ALL {
            let noise = NoiseSpec { placement, ..NoiseSpec::default() };
            let (enc, un) = run_trial(&psi, &noise, frame).unwrap();
            prop_assert!((enc - 1.0).abs() < 1e-12 && (un - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trial_fidelities_are_bounded(k in 0usize..10_000, p in 0.0f64..=1.0) {
        let psi = config().sample_input(k);
        let noise = NoiseSpec::new(ErrorUnitary::Z, p, Placement::PerGateParticipants).unwrap();
        let (enc, un) = run_trial(&psi, &noise, ErrorFrame::Spin).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&enc));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&un));
    }
}
