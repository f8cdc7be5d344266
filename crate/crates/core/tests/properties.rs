mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use qgtop::evolution::{self, Cycles, Resolution, Schedule, Segment};
use qgtop::io;
use qgtop::linalg::{self, wrap_phase, ComplexMatrix};
use qgtop::pauli::{self, DEFAULT_ZERO_TOL};
use qgtop::phase::{self, PhaseOptions};
use qgtop::schmidt;

fn random_hermitian(seed: u64, dim: usize) -> ComplexMatrix {
    let mut rng = common::rng(seed);
    let a = ComplexMatrix::from_columns(&(0..dim).map(|_| common::random_state(&mut rng, dim)).collect::<Vec<_>>())
        .unwrap();
    &a + &a.adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn hermitian_eig_reconstructs(seed in any::<u64>(), log_dim in 1u32..4) {
        let h = random_hermitian(seed, 1 << log_dim);
        let eig = linalg::eig_hermitian(&h).unwrap();
        prop_assert!(eig.reconstruct().distance(&h) < 1e-10);
        prop_assert!(eig.eigenvectors.unitary_defect() < 1e-10);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn unitary_eig_reconstructs(seed in any::<u64>(), t in 0.1f64..7.0) {
        let u = linalg::expm_minus_iht(&random_hermitian(seed, 4), t).unwrap();
        let eig = linalg::eig_unitary(&u).unwrap();
        prop_assert!(eig.reconstruct().distance(&u) < 1e-9);
        prop_assert!(eig.eigenphases.iter().all(|&p| p > -PI && p <= PI));
    }

    #[test]
    fn exponential_composes(seed in any::<u64>(), s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let h = random_hermitian(seed, 4);
        let joint = linalg::expm_minus_iht(&h, s + t).unwrap();
        let split = &linalg::expm_minus_iht(&h, s).unwrap() * &linalg::expm_minus_iht(&h, t).unwrap();
        prop_assert!(joint.distance(&split) < 1e-10);
        prop_assert!(joint.unitary_defect() < 1e-10);
    }

    #[test]
    fn wrap_phase_is_principal(x in -1e3f64..1e3) {
        let w = wrap_phase(x);
        prop_assert!(w > -PI && w <= PI);
        let k = (x - w) / (2.0 * PI);
        prop_assert!((k - k.round()).abs() < 1e-9);
    }

    #[test]
    fn nu_h_survives_flattening_and_scaling(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let mut rng = common::rng(seed);
        let spec = common::random_entangling(&mut rng);
        let nu = pauli::nu_h(&spec, DEFAULT_ZERO_TOL).unwrap().value;
        let flat = pauli::flatten(&spec.traceless(), DEFAULT_ZERO_TOL).unwrap();
        prop_assert_eq!(pauli::nu_h_matrix(&flat, DEFAULT_ZERO_TOL).unwrap().value, nu);
        prop_assert_eq!(pauli::nu_h(&spec.scaled(scale), DEFAULT_ZERO_TOL).unwrap().value, nu);
        prop_assert_eq!(pauli::nu_h(&spec.gauge_shift(3.7), DEFAULT_ZERO_TOL).unwrap().value, nu);
    }

    #[test]
    fn schmidt_round_trip(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let psi = common::random_state(&mut rng, 4);
        let form = schmidt::schmidt_decompose(&psi).unwrap();
        let back = form.reconstruct();
        let err = psi.iter().zip(&back).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(err < 1e-10, "{}", err);
        prop_assert!((0.0..=PI / 2.0).contains(&form.alpha));
        prop_assert!((form.concurrence() - schmidt::concurrence(&psi).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn parser_never_panics(text in "\\PC{0,200}") {
        if let Err(e) = io::parse(&text) {
            prop_assert!(e.line >= 1 && e.column >= 1);
        }
    }

    #[test]
    fn serialization_is_a_fixed_point(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let text = common::random_circuit_text(&mut rng);
        let once = io::serialize(&io::parse(&text).unwrap());
        let twice = io::serialize(&io::parse(&once).unwrap());
        prop_assert_eq!(&once, &twice);
        let a = io::parse(&text).unwrap().final_unitary().unwrap();
        let b = io::parse(&once).unwrap().final_unitary().unwrap();
        prop_assert!(a.distance(&b) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn local_schedules_do_not_wind(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let s = common::random_local_schedule(&mut rng);
        let r = phase::sum_rule(&s, &Resolution::default(), PhaseOptions::default()).unwrap();
        prop_assert_eq!(r.nu_u, 0);
        prop_assert!(r.gamma_sum_over_2pi.abs() < 1e-6);
    }

    #[test]
    fn sum_rule_holds(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let s = common::random_schedule(&mut rng);
        let r = phase::sum_rule(&s, &Resolution::default(), PhaseOptions::default()).unwrap();
        prop_assert!((r.gamma_sum_over_2pi - r.nu_u as f64).abs() < 1e-5);
    }

    #[test]
    fn cycles_multiply_flattened_winding(seed in any::<u64>(), m in 1u32..4) {
        let mut rng = common::rng(seed);
        let spec = common::random_entangling(&mut rng);
        let flat = pauli::flatten(&spec.traceless(), DEFAULT_ZERO_TOL).unwrap();
        let nu = pauli::nu_h_matrix(&flat, DEFAULT_ZERO_TOL).unwrap().value;
        let h = pauli::HamiltonianSpec::from_matrix(&flat, 1e-14).unwrap();
        let s = Schedule::new(2, vec![Segment::new(h, 2.0 * PI)], Cycles::whole(m)).unwrap();
        let traj = evolution::propagate(&s, &Resolution::default()).unwrap();
        prop_assert_eq!(phase::winding_number(&traj).unwrap().nu_u, m as i64 * nu.twice() as i64);
    }
}
