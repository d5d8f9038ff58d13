use num_complex::Complex64;
use propsign::channels::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_channel(rng: &mut ChaCha8Rng) -> KrausSet {
    let d = rng.random_range(2..=4);
    if rng.random_bool(0.5) {
        let u = random_unitary(d, rng);
        split_unitary(&u, rng.random_range(1..=4), rng).unwrap()
    } else {
        random_nonproportional_pair(d, rng).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn output_is_a_state(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_channel(&mut rng);
        let rho = random_density(k.dim(), &mut rng);
        let out = apply_channel(&k, &rho).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(out.min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn split_unitaries_are_invertible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(1..=4);
        let u = random_unitary(d, &mut rng);
        let k = split_unitary(&u, rng.random_range(1..=4), &mut rng).unwrap();
        let report = analyze_channel(&k, 2 * d * d, &mut rng).unwrap();
        prop_assert_eq!(report.verdict, Verdict::InvertibleUnitary);
        let inv = invert_channel(&k, 2 * d * d, &mut rng).unwrap();
        for _ in 0..20 {
            let rho = random_density(d, &mut rng);
            let out = apply_channel(&k, &rho).unwrap();
            prop_assert!((purity(&out) - purity(&rho)).abs() <= 1e-9);
            let back = apply_channel(&inv, &out).unwrap();
            prop_assert!(back.max_distance(&rho) <= 1e-9);
        }
    }
}

#[test]
fn consistency_on_fifty_plus_fifty() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for _ in 0..50 {
        let d = rng.random_range(2..=5);
        let u = random_unitary(d, &mut rng);
        let k = split_unitary(&u, rng.random_range(2..=4), &mut rng).unwrap();
        assert!(proportionality_test(&k, 2 * d * d, &mut rng).unwrap().proportional);
    }
    for _ in 0..50 {
        let d = rng.random_range(2..=5);
        let k = random_nonproportional_pair(d, &mut rng).unwrap();
        assert!(!proportionality_test(&k, 2 * d * d, &mut rng).unwrap().proportional);
        let r = analyze_channel(&k, 2 * d * d, &mut rng).unwrap();
        assert_eq!(r.verdict, Verdict::NotInvertible);
        assert!(!r.purity_preserving);
    }
}

#[test]
fn kraus_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = random_unitary(3, &mut rng);
    let k = split_unitary(&u, 3, &mut rng).unwrap();
    let text = serde_json::to_string(&k).unwrap();
    let back: KrausSet = serde_json::from_str(&text).unwrap();
    assert_eq!(back.ops().len(), 3);
    for (a, b) in k.ops().iter().zip(back.ops()) {
        assert!((a - b).iter().all(|z| z.norm() <= 1e-15));
    }
    let wrong_dim = text.replacen("\"dim\":3", "\"dim\":2", 1);
    assert_ne!(wrong_dim, text);
    assert!(serde_json::from_str::<KrausSet>(&wrong_dim).is_err());
    let scaled = KrausSet::new(k.ops().iter().map(|v| v * Complex64::new(1.1, 0.0)).collect());
    assert!(matches!(scaled, Err(ChannelError::InvalidKraus(_))));
}

#[test]
fn mixtures_of_distinct_states_cannot_become_pure_under_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = random_unitary(2, &mut rng);
    let k = KrausSet::unitary(u).unwrap();
    let a = DensityMatrix::pure(&random_pure_state(2, &mut rng)).unwrap();
    let b = DensityMatrix::pure(&random_pure_state(2, &mut rng)).unwrap();
    let probe = mixture_to_pure_probe(&k, &a, &b, 0.3).unwrap();
    assert!(!probe.image_pure);
    let reset = mixture_to_pure_probe(&KrausSet::reset_qubit(), &a, &b, 0.3).unwrap();
    assert!(reset.image_pure && reset.images_coincide && reset.not_one_to_one);
}
