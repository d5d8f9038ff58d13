use propsign::fields::FieldConfig;
use propsign::fields::{Temporal, TestFunction};
use propsign::rwa::fixtures::*;
use propsign::rwa::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn closed_form_matches_oracle_on_fixture() {
    for (q, model) in oracle_fixture() {
        let c = two_time_average(&q, &model).unwrap();
        let o = lindblad_oracle(&q, &model, 12).unwrap();
        assert!(o.leakage <= 1e-8);
        assert!((c - o.value).norm() <= 1e-4 * c.norm(), "{q:?}: {c} vs {}", o.value);
    }
}

#[test]
fn laplace_quadrature_matches_closed_form() {
    let model = lattice_model();
    assert!(model.is_pumped(2.0));
    for (wb, k) in laplace_lattice() {
        for i in [1, 2] {
            let quad = laplace_sign_combination(i, wb, k, &model).unwrap();
            let closed = rwa_sign_closed_form(i, wb, k, &model).unwrap();
            assert!((quad - closed).abs() <= 1e-5 * closed, "i={i} wb={wb} k={k}: {quad} vs {closed}");
        }
    }
}

#[test]
fn positivity_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for _ in 0..10_000 {
        let s = sample_sign_point(&mut rng).unwrap();
        assert!(s.value >= 0.0, "{s:?}");
    }
}

#[test]
fn interacting_functional_is_non_negative() {
    for (model, g, wb) in functional_fixtures(62) {
        let cfg = FieldConfig::for_function(1.0, &TestFunction::new(Temporal::Exponential { omega_bar: wb }, g));
        let v = interacting_functional(&g, wb, &model, &cfg).unwrap();
        assert!(v >= -1e-9 * v.abs(), "{v}");
        assert!(v > 0.0);
    }
}

#[test]
fn pumped_model_with_small_omega_bar_diverges() {
    let model = model_with_rates(1.0, 0.0, [2.0, 0.0, 0.0, 0.0]);
    assert!(matches!(laplace_sign_combination(1, 0.5, 0.0, &model), Err(RwaError::Range(_))));
    assert!(!transforms_converge(1, 0.5, 0.0, &model));
    // the closed form itself stays non-negative
    assert!(rwa_sign_closed_form(1, 0.5, 0.0, &model).unwrap() >= 0.0);
}

#[test]
fn generators_commute_with_coupling() {
    let model = lattice_model();
    let (free, cross) = generator_commutators(&model, 1.0, 3).unwrap();
    assert!(free <= 1e-10 && cross <= 1e-10);
}
