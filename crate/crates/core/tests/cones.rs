mod common;

use common::*;
use dotrank::exact::{dot, int, ratio, sub, RVec, Rational};
use dotrank::popcone::*;
use num_traits::{One, Signed};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn accepted_points_dominate_the_tail() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for t in 0..60 {
        let d = rng.random_range(2..=3);
        let prob = random_cone_problem(&mut rng, d, 3, 3);
        let s = random_multi_member(&mut rng, &prob);
        let cert = in_multi_cone(&prob, &s).unwrap();
        assert!(cert.member);
        assert_eq!(reconstruct(&prob, None, &cert).unwrap(), s);
        for q in sample_feasible_queries(&prob, 4, t).unwrap() {
            assert!(prob.popular().iter().all(|p| prob.long_tail().iter().all(|l| dot(&q, &sub(p, l)) >= Rational::one())));
            assert!(dominates(&prob, &q, &s));
        }
    }
}

#[test]
fn singleton_rejections_have_counter_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut rejected = 0;
    while rejected < 30 {
        let prob = random_cone_problem(&mut rng, 2, 2, 1);
        let l = &prob.long_tail()[0];
        let s = random_rvec(&mut rng, 2, 8);
        let cert = in_singleton_cone(prob.popular(), l, &s).unwrap();
        let q = singleton_counter_witness(prob.popular(), l, &s).unwrap();
        assert_eq!(cert.member, q.is_none());
        if let Some(q) = q {
            rejected += 1;
            assert!(prob.popular().iter().all(|p| !dot(&q, &sub(p, l)).is_negative()));
            assert!(dot(&q, &s) < dot(&q, l));
        } else {
            assert_eq!(reconstruct(&prob, Some(0), &cert).unwrap(), s);
        }
    }
}

#[test]
fn per_tail_singletons_imply_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for t in 0..400u64 {
        let prob = random_cone_problem(&mut rng, 2, 3, 2);
        let s = random_rvec(&mut rng, 2, 12);
        let all = prob
            .long_tail()
            .iter()
            .all(|l| in_singleton_cone(prob.popular(), l, &s).unwrap().member);
        if all {
            checked += 1;
            assert!(dominance_check(&prob, &s, 6, t).unwrap());
        }
    }
    assert!(checked > 0);
}

#[test]
fn far_points_fail_sampled_dominance() {
    let prob = ConeProblem::from_ints(&[vec![4, 1]], &[vec![0, 0]]).unwrap();
    // l - 100 (p - l) is beaten by l for every feasible query.
    let s = vec![int(-400), int(-100)];
    assert!(!dominance_check(&prob, &s, 3, 0).unwrap());
    assert!(!in_multi_cone(&prob, &s).unwrap().member);
}

#[test]
fn dimension_bound() {
    let prob = ConeProblem::from_ints(&[vec![1, 0], vec![0, 1], vec![1, 1]], &[vec![-1, -1], vec![-2, 0]]).unwrap();
    assert_eq!(cone_dimension_bound(&prob), 8);
}

#[test]
fn cone_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"d": 2, "P": [["3/2", "1"], [2, "0"]], "L": [["0", "0"]]}"#).unwrap();
    let prob = ConeProblem::load(&path).unwrap();
    assert_eq!(prob.popular()[0], vec![ratio(3, 2), int(1)]);
    let back: ConeProblem = serde_json::from_str(&serde_json::to_string(&prob).unwrap()).unwrap();
    assert_eq!(back, prob);
    std::fs::write(&path, r#"{"d": 2, "P": [], "L": [["0", "0"]]}"#).unwrap();
    assert!(ConeProblem::load(&path).is_err());
}

#[test]
fn incomplete_beta_matches_reference_library() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..2000 {
        let a = rng.random_range(0.05..40.0);
        let b = rng.random_range(0.05..40.0);
        let x = rng.random_range(0.0..1.0);
        let ours = regularized_incomplete_beta(x, a, b).unwrap();
        let reference = statrs::function::beta::beta_reg(a, b, x);
        assert!((ours - reference).abs() < 1e-10, "I_{x}({a}, {b}): {ours} vs {reference}");
    }
    for z in [0.1, 0.5, 1.0, 2.5, 7.0, 30.0, 170.0] {
        let r = statrs::function::gamma::ln_gamma(z);
        assert!((ln_gamma(z) - r).abs() <= 1e-12 * r.abs().max(1.0));
    }
}

#[test]
fn cap_ratio_monotone_in_angle_and_dimension() {
    for d in 2..40 {
        let mut prev = 0.0;
        for k in 1..50 {
            let theta = std::f64::consts::FRAC_PI_2 * k as f64 / 50.0;
            let r = spherical_cap_ratio(theta, d).unwrap();
            assert!(r > prev);
            if d > 2 {
                assert!(r < spherical_cap_ratio(theta, d - 1).unwrap());
            }
            prev = r;
        }
    }
    let rows = cap_decay_profile(std::f64::consts::FRAC_PI_2, &[2, 10, 100]).unwrap();
    assert!(rows.iter().all(|r| (r.ratio - 0.5).abs() < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn membership_is_convex(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prob = random_cone_problem(&mut rng, 2, 3, 2);
        let a = random_multi_member(&mut rng, &prob);
        let b = random_multi_member(&mut rng, &prob);
        let t = ratio(rng.random_range(0..=10), 10);
        let mix: RVec = a.iter().zip(&b).map(|(x, y)| &t * x + (Rational::one() - &t) * y).collect();
        prop_assert!(in_multi_cone(&prob, &mix).unwrap().member);
    }

    #[test]
    fn membership_survives_growth(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prob = random_cone_problem(&mut rng, 3, 2, 2);
        let s = random_multi_member(&mut rng, &prob);
        let extra = random_rvec(&mut rng, 3, 6);
        prop_assert!(in_multi_cone(&prob.with_popular(extra.clone()).unwrap(), &s).unwrap().member);
        prop_assert!(in_multi_cone(&prob.with_long_tail(extra).unwrap(), &s).unwrap().member);
    }
}
