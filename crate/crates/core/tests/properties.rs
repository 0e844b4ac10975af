mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use steerkit::expsim::{
    effective_state, expected_counts, project_to_physical, tomo_from_weights, DetectorConfig,
};
use steerkit::qmat::{fidelity, hermitian_eigenvalues, ComplexMatrix, DensityMatrix};
use steerkit::states::{family_state, is_separable_ppt, retrieve_params, FamilyParams};
use steerkit::steering::{
    classify, fibonacci_mesh, probe, probe_assemblage, Direction, DirectionVerdict, LpSettings,
    Probe,
};

const MODEL_TOL: f64 = 1e-8;

fn mesh_size() -> impl Strategy<Value = usize> {
    prop_oneof![Just(3usize), Just(6usize), Just(12usize)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certificates_and_models_verify(seed in any::<u64>(), rank in 1usize..=4, n in mesh_size()) {
        let rho = common::random_state(&mut ChaCha8Rng::seed_from_u64(seed), rank);
        let mesh = fibonacci_mesh(n).unwrap();
        let eta = mesh.eta().unwrap();
        let lp = LpSettings::default();
        for d in [Direction::AtoB, Direction::BtoA] {
            let steer = probe(rho.matrix(), d, &mesh, 1.0, &lp).unwrap();
            let lhs = probe(rho.matrix(), d, &mesh, 1.0 / eta, &lp).unwrap();
            prop_assert!(!matches!((&steer, &lhs), (Probe::Steerable(_), Probe::Unsteerable(_))));
            if let Probe::Steerable(c) = &steer {
                prop_assert!(c.verify(&probe_assemblage(rho.matrix(), d, &mesh, 1.0).unwrap()));
            }
            if let Probe::Unsteerable(m) = &lhs {
                let asm = probe_assemblage(rho.matrix(), d, &mesh, 1.0 / eta).unwrap();
                prop_assert!(m.is_well_formed());
                prop_assert!(m.deviation_from(&asm) <= MODEL_TOL);
            }
        }
    }

    #[test]
    fn separable_never_certified(seed in any::<u64>(), n in mesh_size()) {
        let rho = common::random_separable(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(is_separable_ppt(&rho).unwrap().separable);
        let mesh = fibonacci_mesh(n).unwrap();
        let lp = LpSettings::default();
        for d in [Direction::AtoB, Direction::BtoA] {
            prop_assert!(!matches!(probe(rho.matrix(), d, &mesh, 1.0, &lp).unwrap(), Probe::Steerable(_)));
        }
    }

    #[test]
    fn verdicts_verify(p in 0.0f64..=1.0, r in 0.0f64..=1.0) {
        let rho = family_state(FamilyParams::new(p, r).unwrap());
        let mesh = fibonacci_mesh(6).unwrap();
        let v = classify(&rho, &mesh).unwrap();
        prop_assert!(v.verify(rho.matrix(), &mesh, MODEL_TOL).unwrap());
        if v.ppt.separable {
            prop_assert_eq!(v.steerable_ab, DirectionVerdict::CertifiedUnsteerable);
            prop_assert_eq!(v.steerable_ba, DirectionVerdict::CertifiedUnsteerable);
        }
    }

    #[test]
    fn noiseless_tomography_round_trip(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = common::random_state(&mut ChaCha8Rng::seed_from_u64(seed), rank);
        let w = expected_counts(&rho, &DetectorConfig::default(), 20.0).unwrap();
        let hat = project_to_physical(&tomo_from_weights(&w).unwrap()).unwrap();
        prop_assert!(hat.matrix().max_abs_diff(rho.matrix()) <= 1e-10);
        prop_assert!(fidelity(&hat, &rho).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn family_retrieval_round_trip(p in 0.0f64..0.999, r in 0.0f64..=1.0) {
        let got = retrieve_params(&family_state(FamilyParams::new(p, r).unwrap())).unwrap();
        prop_assert!((got.p - p).abs() < 1e-9);
        prop_assert!((got.r - r).abs() < 1e-6);
    }

    #[test]
    fn effective_state_matches_family(p in 0.0f64..=1.0, r in 0.0f64..=1.0) {
        let e = effective_state(p, r).unwrap();
        let f = family_state(FamilyParams::new(p, r).unwrap());
        prop_assert!(e.matrix().max_abs_diff(f.matrix()) <= 1e-12);
    }

    /// The projection is no farther from the input than a handful of
    /// random physical states, and is itself physical.
    #[test]
    fn projection_is_closest(seed in any::<u64>(), spread in 0.0f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = common::random_state(&mut rng, 4);
        let noise = common::random_state(&mut rng, 2);
        let h = &base.matrix().scale(1.0 + spread) - &noise.matrix().scale(spread);
        let proj = project_to_physical(&h).unwrap();
        let vals = hermitian_eigenvalues(proj.matrix()).unwrap();
        prop_assert!(vals.iter().all(|&v| v >= -1e-12));
        prop_assert!((proj.matrix().trace().re - 1.0).abs() < 1e-12);
        let d = |m: &ComplexMatrix| (&h - m).frobenius_norm();
        let best = d(proj.matrix());
        for k in 0..8 {
            let other: DensityMatrix = common::random_state(&mut rng, 1 + k % 4);
            prop_assert!(best <= d(other.matrix()) + 1e-12);
            // convex combinations with the projection never get closer
            for eps in [1e-1, 1e-6] {
                let mix = &proj.matrix().scale(1.0 - eps) + &other.matrix().scale(eps);
                prop_assert!(best <= d(&mix) + 1e-13);
            }
        }
    }
}
