use afcoam::afc::{ModeEfficiency, StorageChannel};
use afcoam::numerics::random::random_density;
use afcoam::numerics::{hermitian_eig, Subsystem};
use afcoam::DensityMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn channel(etas: [f64; 3], sigma: f64) -> StorageChannel {
    let table = [(-1, etas[0]), (0, etas[1]), (1, etas[2])].into_iter().collect();
    StorageChannel::new(ModeEfficiency::PerMode(table), sigma, 25e6).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outputs_are_states(
        seed in any::<u64>(),
        e0 in 0.01f64..=1.0, e1 in 0.01f64..=1.0, e2 in 0.01f64..=1.0,
        sigma in 0.0f64..2.0,
        store_a in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = DensityMatrix::new(random_density(9, 1 + (seed % 9) as usize, &mut rng), (3, 3)).unwrap();
        let which = if store_a { Subsystem::A } else { Subsystem::B };
        let out = channel([e0, e1, e2], sigma).apply_pair(&rho, which).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&out.herald));
        let m = out.state.matrix();
        prop_assert!((m.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(hermitian_eig(m).unwrap().eigenvalues[0] >= -1e-12);
        DensityMatrix::new(m.clone(), (3, 3)).unwrap();
    }

    #[test]
    fn visibility_falls_with_jitter(l in 1i32..=40, s1 in 0.0f64..0.05, ds in 0.0f64..0.05) {
        let v = |s: f64| StorageChannel::new(ModeEfficiency::Uniform(0.2), s, 25e6).unwrap().superposition_visibility(l).unwrap();
        prop_assert!(v(s1 + ds) <= v(s1) + 1e-15);
    }

    #[test]
    fn visibility_falls_with_l(l in 1i32..40, sigma in 1e-4f64..0.05) {
        let ch = StorageChannel::new(ModeEfficiency::Uniform(0.2), sigma, 25e6).unwrap();
        prop_assert!(ch.superposition_visibility(l + 1).unwrap() <= ch.superposition_visibility(l).unwrap() + 1e-15);
    }
}
