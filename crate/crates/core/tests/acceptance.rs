//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or overruns its time budget.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use dotrank::dataset::{split_strong, Interactions, StrongSplit, StrongSplitSpec};
use dotrank::exact::{dot, int, ratio, sub, RVec, Rational};
use dotrank::feedback::{run_feedback_loop, LoopConfig};
use dotrank::ials::{fold_in, objective, popularity_baseline, topk_for_vector, train, FactorModel, Hyperparams};
use dotrank::metrics::*;
use dotrank::popcone::*;
use dotrank::rankgeom::*;
use dotrank::synthetic::{generate, SyntheticSpec};
use num_bigint::BigUint;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn guard() -> EnumerationGuard {
    EnumerationGuard::default()
}

fn nrank(v: &ItemVectorSet, k: usize) -> u64 {
    enumerate_representable(v, k, guard()).expect("enumeration").count
}

fn one_dimensional_instances() -> Vec<ItemVectorSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    [3usize, 5]
        .iter()
        .map(|&n| loop {
            let rows = random_int_vectors(&mut rng, n, 1, 50);
            if let Ok(v) = ItemVectorSet::from_ints(&rows) {
                break v;
            }
        })
        .collect()
}

fn four_plane_vectors() -> ItemVectorSet {
    ItemVectorSet::from_ints(&[vec![-8, 18], vec![28, 8], vec![28, -20], vec![-33, -20]]).unwrap()
}

fn planar_instances() -> Vec<ItemVectorSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    (0..20).map(|i| random_generic(&mut rng, 3 + i % 4, 2, 12)).collect()
}

fn golden_counts() -> Outcome {
    let mut notes = Vec::new();
    for v in one_dimensional_instances() {
        let c = nrank(&v, v.n());
        ensure!(c == 2, "d=1, n={}: nrank = {c}, expected 2", v.n());
        notes.push(format!("d=1 n={}: 2", v.n()));
    }
    let v = four_plane_vectors();
    ensure!(v.is_general_position(), "planar fixture is degenerate");
    let c = nrank(&v, 4);
    ensure!(c == 12, "d=2, n=4: nrank = {c}, expected 12");
    notes.push("d=2 n=4: 12".into());
    Ok(notes.join(", "))
}

fn planar_law() -> Outcome {
    for (i, v) in planar_instances().iter().enumerate() {
        let n = v.n() as u64;
        let c = nrank(v, v.n());
        let bound = region_bound(n, 2).map_err(|e| e.to_string())?;
        ensure!(c == n * (n - 1), "instance {i} (n={n}): nrank = {c}, expected {}", n * (n - 1));
        ensure!(BigUint::from(c) == bound, "instance {i}: region bound {bound} differs from {c}");
    }
    Ok("20 instances, n in 3..=6, nrank_n = n(n-1) = region bound".into())
}

fn upper_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    let mut instances = one_dimensional_instances();
    instances.push(four_plane_vectors());
    instances.extend(planar_instances());
    instances.extend((0..10).map(|_| {
        let n = rng.random_range(4..=6);
        random_generic(&mut rng, n, 3, 9)
    }));
    let mut checks = 0;
    for (i, v) in instances.iter().enumerate() {
        let (n, d) = (v.n() as u64, v.d() as u64);
        for k in 1..=v.n() {
            let c = nrank(v, k);
            let b = BoundChecks::evaluate(c, n, k as u64, d).map_err(|e| e.to_string())?;
            ensure!(b.within_falling_factorial && b.within_power_bound, "instance {i}, K={k}: {b:?}");
            if k == v.n() {
                ensure!(b.within_region_bound, "instance {i}: nrank_n = {c} > {}", b.region_bound);
            }
            checks += 1;
        }
    }
    Ok(format!("{} instances, {checks} (instance, K) counts within all bounds", instances.len()))
}

fn check_facets(v: &ItemVectorSet, label: &str) -> Result<usize, String> {
    let fs = facets(v).map_err(|e| format!("{label}: {e}"))?;
    for f in &fs {
        let (pi, w) = facet_permutation(v, f).map_err(|e| format!("{label}: {e}"))?;
        let q = w.q.as_ref().ok_or_else(|| format!("{label}: facet without witness"))?;
        ensure!(represents(v, &pi, q), "{label}: facet witness does not represent its list");
        let lp = is_representable(v, &pi).map_err(|e| e.to_string())?;
        ensure!(lp.feasible, "{label}: facet list {:?} not representable", pi.entries());
    }
    let count = nrank(v, v.d());
    ensure!(count >= fs.len() as u64, "{label}: nrank_d = {count} < {} facets", fs.len());
    Ok(fs.len())
}

fn facet_lower_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(400);
    let mut total = 0;
    for i in 0..10 {
        let n = rng.random_range(5..=8);
        let v = random_generic(&mut rng, n, 3, 9);
        total += check_facets(&v, &format!("instance {i}"))?;
    }
    let t: Vec<Rational> = (1..=8).map(int).collect();
    let cyclic = cyclic_polytope(8, 4, &t).map_err(|e| e.to_string())?;
    let mut found: Vec<Vec<usize>> = facets(&cyclic).map_err(|e| e.to_string())?.into_iter().map(|f| f.vertex_indices).collect();
    found.sort();
    let oracle = gale_oracle(8, 4);
    ensure!(found == oracle, "cyclic facets differ from Gale evenness");
    ensure!(found.len() == 20, "cyclic polytope has {} facets, expected 20", found.len());
    check_facets(&cyclic, "cyclic")?;
    Ok(format!("10 random d=3 hulls ({total} facets) and cyclic(8,4) with 20 facets"))
}

fn worked_example() -> Outcome {
    let v = ItemVectorSet::new(vec![
        vec![int(1), int(0)],
        vec![int(-1), int(0)],
        vec![int(0), int(1)],
        vec![int(0), ratio(1, 2)],
    ])
    .map_err(|e| e.to_string())?;
    let fs: Vec<Vec<usize>> = facets(&v).map_err(|e| e.to_string())?.into_iter().map(|f| f.vertex_indices).collect();
    ensure!(fs == vec![vec![0, 1], vec![0, 2], vec![1, 2]], "facets {fs:?}");
    ensure!(fs.iter().all(|f| !f.contains(&3)), "fourth item lies on a facet");
    let pi = PartialPermutation::new(vec![2, 3], 4).map_err(|e| e.to_string())?;
    ensure!(represents(&v, &pi, &[int(0), int(1)]), "q = (0, 1) does not represent (v3, v4)");
    let w = is_representable(&v, &pi).map_err(|e| e.to_string())?;
    ensure!(w.feasible && represents(&v, &pi, w.q.as_ref().unwrap()), "LP witness fails");
    Ok("facets {12, 13, 23}; (v3, v4) represented by q = (0, 1); v4 on no facet".into())
}

fn cone_soundness() -> Outcome {
    let trials: Vec<Result<(), String>> = (0..1000u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(600 + t);
            let d = 2 + (t % 2) as usize;
            let prob = random_cone_problem(&mut rng, d, 3, 3);
            let s = if t % 3 == 0 { random_rvec(&mut rng, d, 15) } else { random_multi_member(&mut rng, &prob) };
            let cert = in_multi_cone(&prob, &s).map_err(|e| e.to_string())?;
            if t % 3 != 0 {
                ensure!(cert.member, "trial {t}: constructed member rejected");
            }
            if cert.member {
                ensure!(reconstruct(&prob, None, &cert).as_deref() == Some(&s[..]), "trial {t}: certificate mismatch");
                for q in sample_feasible_queries(&prob, 3, t).map_err(|e| e.to_string())? {
                    ensure!(dominates(&prob, &q, &s), "trial {t}: general-tail dominance violated");
                }
            }
            let j = rng.random_range(0..prob.long_tail().len());
            let l = prob.long_tail()[j].clone();
            let single = ConeProblem::new(prob.popular().to_vec(), vec![l.clone()]).map_err(|e| e.to_string())?;
            let s1 = random_singleton_member(&mut rng, prob.popular(), &l);
            let c1 = in_singleton_cone(prob.popular(), &l, &s1).map_err(|e| e.to_string())?;
            ensure!(c1.member, "trial {t}: constructed singleton member rejected");
            for q in sample_feasible_queries(&single, 3, t).map_err(|e| e.to_string())? {
                ensure!(dot(&q, &s1) >= dot(&q, &l), "trial {t}: singleton dominance violated");
            }
            Ok(())
        })
        .collect();
    trials.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(650);
    let mut witnesses = 0;
    while witnesses < 100 {
        let prob = random_cone_problem(&mut rng, 2 + witnesses % 2, 3, 1);
        let l = &prob.long_tail()[0];
        let s = random_rvec(&mut rng, prob.d(), 15);
        if in_singleton_cone(prob.popular(), l, &s).map_err(|e| e.to_string())?.member {
            continue;
        }
        let q = singleton_counter_witness(prob.popular(), l, &s)
            .map_err(|e| e.to_string())?
            .ok_or("rejected point without a counter-witness")?;
        ensure!(prob.popular().iter().all(|p| !dot(&q, &sub(p, l)).is_negative()), "counter-witness outside the closed query cone");
        ensure!(dot(&q, &s) < dot(&q, l), "counter-witness does not rank s below l");
        witnesses += 1;
    }
    Ok("1000 trials, 0 violations; 100 counter-witnesses verified".into())
}

fn cone_growth_and_convexity() -> Outcome {
    let results: Vec<Result<(), String>> = (0..500u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(700 + t);
            let d = 2 + (t % 2) as usize;
            let prob = random_cone_problem(&mut rng, d, 3, 2);
            let s = random_multi_member(&mut rng, &prob);
            let extra = random_rvec(&mut rng, d, 8);
            let grown_p = prob.with_popular(extra.clone()).map_err(|e| e.to_string())?;
            let grown_l = prob.with_long_tail(extra).map_err(|e| e.to_string())?;
            ensure!(in_multi_cone(&grown_p, &s).map_err(|e| e.to_string())?.member, "trial {t}: lost after growing P");
            ensure!(in_multi_cone(&grown_l, &s).map_err(|e| e.to_string())?.member, "trial {t}: lost after growing L");

            let a = random_multi_member(&mut rng, &prob);
            let b = random_multi_member(&mut rng, &prob);
            let w = ratio(rng.random_range(0..=20), 20);
            let mix: RVec = a.iter().zip(&b).map(|(x, y)| &w * x + (Rational::one() - &w) * y).collect();
            ensure!(in_multi_cone(&prob, &mix).map_err(|e| e.to_string())?.member, "trial {t}: convex mix rejected");
            Ok(())
        })
        .collect();
    results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok("500 growth trials and 500 convexity trials, 0 failures".into())
}

fn cap_fraction_monte_carlo(theta: f64, d: usize, samples: usize, seed: u64) -> f64 {
    let cos = theta.cos();
    let chunks = 64;
    let per = samples / chunks;
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed * 1000 + c as u64);
            let mut hits = 0;
            let mut x = vec![0.0f64; d];
            for _ in 0..per {
                x.iter_mut().for_each(|v| *v = StandardNormal.sample(&mut rng));
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if x[0] >= cos * norm {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    hits as f64 / (per * chunks) as f64
}

fn cap_formula() -> Outcome {
    use std::f64::consts::PI;
    for k in 1..100 {
        let theta = PI / 2.0 * k as f64 / 100.0;
        let r2 = spherical_cap_ratio(theta, 2).map_err(|e| e.to_string())?;
        let r3 = spherical_cap_ratio(theta, 3).map_err(|e| e.to_string())?;
        ensure!((r2 - theta / PI).abs() < 1e-9, "d=2, theta={theta}: {r2}");
        ensure!((r3 - (1.0 - theta.cos()) / 2.0).abs() < 1e-9, "d=3, theta={theta}: {r3}");
        let mut prev = r2;
        for d in 3..=64 {
            let r = spherical_cap_ratio(theta, d).map_err(|e| e.to_string())?;
            ensure!(r < prev, "not decreasing at d={d}, theta={theta}");
            prev = r;
        }
    }
    let samples = 1_000_000;
    let mut worst: f64 = 0.0;
    for (i, theta) in [PI / 6.0, PI / 4.0].into_iter().enumerate() {
        for (j, d) in [3usize, 5, 9].into_iter().enumerate() {
            let p = spherical_cap_ratio(theta, d).map_err(|e| e.to_string())?;
            let est = cap_fraction_monte_carlo(theta, d, samples, (i * 3 + j) as u64 + 1);
            let sigma = (p * (1.0 - p) / samples as f64).sqrt();
            let z = (est - p).abs() / sigma;
            worst = worst.max(z);
            ensure!(z <= 4.0, "theta={theta:.4}, d={d}: Monte Carlo {est} vs {p} ({z:.2} sigma)");
        }
    }
    Ok(format!("closed forms to 1e-9, monotone in d up to 64, Monte Carlo worst {worst:.2} sigma"))
}

fn random_dense(rng: &mut ChaCha8Rng, n_users: usize, n_items: usize) -> Interactions {
    let density = rng.random_range(0.1..0.5);
    let pairs: Vec<(u32, u32)> = (0..n_users as u32)
        .flat_map(|u| (0..n_items as u32).map(move |v| (u, v)))
        .filter(|_| rng.random_bool(density))
        .collect();
    Interactions::from_pairs(n_users, n_items, pairs).unwrap()
}

fn dense_objective(m: &FactorModel, x: &Interactions) -> f64 {
    let hp = &m.hyperparams;
    let mut loss = 0.0;
    for u in 0..m.n_users() {
        for v in 0..m.n_items() {
            let s: f64 = m.user_factors.row(u).iter().zip(m.item_factors.row(v)).map(|(a, b)| a * b).sum();
            loss += if x.contains(u as u32, v as u32) { (s - 1.0).powi(2) } else { hp.alpha0 * s * s };
        }
    }
    let sq = |r: &[f64]| r.iter().map(|a| a * a).sum::<f64>();
    for u in 0..m.n_users() {
        let nu = (x.user_items(u).len() as f64 + hp.alpha0 * m.n_items() as f64).powf(hp.reg_exponent);
        loss += hp.lambda * nu * sq(m.user_factors.row(u));
    }
    for v in 0..m.n_items() {
        let nu = (x.item_users(v).len() as f64 + hp.alpha0 * m.n_users() as f64).powf(hp.reg_exponent);
        loss += hp.lambda * nu * sq(m.item_factors.row(v));
    }
    loss
}

struct EvalSummary {
    recall: f64,
    coverage: f64,
    negative_gini: f64,
    arp: f64,
}

fn evaluate_lists(split: &StrongSplit, n_items: usize, lists: Vec<Vec<u32>>, k: usize) -> Result<EvalSummary, String> {
    let mut recall = 0.0;
    for (e, l) in split.eval_users.iter().zip(&lists) {
        recall += recall_at_k(l, &e.holdout, k, RecallNormalization::MinKHoldout).map_err(|e| e.to_string())?;
    }
    let table = TopKTable::new(k, lists).map_err(|e| e.to_string())?;
    let freq = FrequencyVector::from_table(&table, n_items).map_err(|e| e.to_string())?;
    Ok(EvalSummary {
        recall: recall / split.eval_users.len() as f64,
        coverage: coverage_at_k(&table, n_items).map_err(|e| e.to_string())?,
        negative_gini: negative_gini_at_k(&freq, n_items).map_err(|e| e.to_string())?,
        arp: arp_at_k(&table, &split.train.item_counts(), PopularityScale::Relative).map_err(|e| e.to_string())?,
    })
}

fn evaluate_model(split: &StrongSplit, n_items: usize, hp: &Hyperparams, k: usize) -> Result<EvalSummary, String> {
    let (m, _) = train(&split.train, hp).map_err(|e| e.to_string())?;
    let lists = split
        .eval_users
        .iter()
        .map(|e| {
            let phi = fold_in(&m, &e.fold_in)?;
            topk_for_vector(&m.item_factors, &phi, k, &e.fold_in)
        })
        .collect::<dotrank::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    evaluate_lists(split, n_items, lists, k)
}

fn evaluate_popularity(split: &StrongSplit, n_items: usize, k: usize) -> Result<EvalSummary, String> {
    let order = popularity_baseline(&split.train).map_err(|e| e.to_string())?;
    let lists = split
        .eval_users
        .iter()
        .map(|e| order.iter().copied().filter(|v| !e.fold_in.contains(v)).take(k).collect())
        .collect();
    evaluate_lists(split, n_items, lists, k)
}

fn ials_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    let mut worst_gap: f64 = 0.0;
    for i in 0..10 {
        let (nu, ni) = (rng.random_range(5..=20), rng.random_range(5..=30));
        let x = random_dense(&mut rng, nu, ni);
        let hp = Hyperparams {
            d: rng.random_range(1..=8),
            alpha0: rng.random_range(0.0..0.5),
            lambda: rng.random_range(0.01..1.0),
            reg_exponent: rng.random_range(0.0..=1.0),
            sweeps: 8,
            seed: i,
            init_scale: 1.0,
        };
        let init = dotrank::ials::init_model(nu, ni, &hp).map_err(|e| e.to_string())?;
        let (m, trace) = train(&x, &hp).map_err(|e| e.to_string())?;
        ensure!(trace.len() == 9, "instance {i}: trace has {} entries", trace.len());
        for w in trace.windows(2) {
            ensure!(w[1] <= w[0] + 1e-9 * w[0].abs(), "instance {i}: objective rose from {} to {}", w[0], w[1]);
        }
        for model in [&init, &m] {
            let fast = objective(model, &x).map_err(|e| e.to_string())?;
            let slow = dense_objective(model, &x);
            let rel = (fast - slow).abs() / slow.abs();
            worst_gap = worst_gap.max(rel);
            ensure!(rel <= 1e-8, "instance {i}: trace form {fast} vs dense {slow}");
        }
    }

    let x = generate(&SyntheticSpec::low_rank(200, 300, 2, 1)).map_err(|e| e.to_string())?;
    let split = split_strong(
        &x,
        &StrongSplitSpec {
            held_out_user_fraction: 0.2,
            fold_in_fraction: 0.5,
            seed: 1,
        },
    )
    .map_err(|e| e.to_string())?;
    let hp = Hyperparams {
        d: 16,
        alpha0: 0.05,
        lambda: 0.1,
        ..Hyperparams::default()
    };
    let model = evaluate_model(&split, x.n_items(), &hp, 20)?.recall;
    let pop = evaluate_popularity(&split, x.n_items(), 20)?.recall;
    ensure!(model >= pop + 0.05, "Recall@20 {model:.4} vs popularity {pop:.4}");
    Ok(format!(
        "10 monotone traces, trace-vs-dense rel. gap {worst_gap:.1e}; Recall@20 {model:.3} vs popularity {pop:.3}"
    ))
}

fn inversions(xs: &[f64], increasing: bool) -> usize {
    xs.windows(2).filter(|w| if increasing { w[1] < w[0] } else { w[1] > w[0] }).count()
}

fn popularity_bias_trend() -> Outcome {
    let x = generate(&SyntheticSpec::popularity_skewed(300, 500, 1.0, 1)).map_err(|e| e.to_string())?;
    let split = split_strong(
        &x,
        &StrongSplitSpec {
            held_out_user_fraction: 0.2,
            fold_in_fraction: 0.5,
            seed: 1,
        },
    )
    .map_err(|e| e.to_string())?;
    let k = 10;
    let mut rows = Vec::new();
    for d in [1usize, 4, 16, 64] {
        let grid: Vec<(f64, f64)> = [0.01, 0.05, 0.2, 0.5, 1.0]
            .iter()
            .flat_map(|&a| [0.003, 0.01, 0.03, 0.1, 0.3].into_iter().map(move |l| (a, l)))
            .collect();
        let scored = grid
            .par_iter()
            .map(|&(alpha0, lambda)| {
                let hp = Hyperparams {
                    d,
                    alpha0,
                    lambda,
                    sweeps: 8,
                    ..Hyperparams::default()
                };
                evaluate_model(&split, x.n_items(), &hp, k)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let best = scored
            .into_iter()
            .reduce(|a, b| if b.recall > a.recall { b } else { a })
            .expect("non-empty grid");
        rows.push((d, best));
    }
    let cov: Vec<f64> = rows.iter().map(|r| r.1.coverage).collect();
    let gini: Vec<f64> = rows.iter().map(|r| r.1.negative_gini).collect();
    let arp: Vec<f64> = rows.iter().map(|r| r.1.arp).collect();
    let table: Vec<String> = rows
        .iter()
        .map(|(d, s)| format!("d={d}: R={:.3} Cov={:.3} NG={:.6} ARP={:.5}", s.recall, s.coverage, s.negative_gini, s.arp))
        .collect();
    ensure!(inversions(&cov, true) <= 1, "Coverage@10 not increasing: {}", table.join("; "));
    ensure!(inversions(&gini, true) <= 1, "NegativeGini@10 not increasing: {}", table.join("; "));
    ensure!(inversions(&arp, false) <= 1, "ARP@10 not decreasing: {}", table.join("; "));
    Ok(table.join("; "))
}

fn feedback_loop() -> Outcome {
    let x = generate(&SyntheticSpec::popularity_skewed(300, 500, 1.0, 1)).map_err(|e| e.to_string())?;
    let cfg = |d: usize| LoopConfig {
        epochs: 5,
        k: 50,
        hp: Hyperparams {
            d,
            alpha0: 0.2,
            lambda: 0.03,
            sweeps: 8,
            ..Hyperparams::default()
        },
        initial_observed_fraction: 0.5,
        seed: 2,
        warm_start: false,
    };
    let mut finals = Vec::new();
    for d in [4usize, 64] {
        let t = run_feedback_loop(&x, &cfg(d)).map_err(|e| e.to_string())?;
        ensure!(t.records.len() == 6, "d={d}: {} records", t.records.len());
        for w in t.records.windows(2) {
            ensure!(
                w[1].user_recall_mean >= w[0].user_recall_mean && w[1].item_recall_mean >= w[0].item_recall_mean,
                "d={d}: recall fell at epoch {}",
                w[1].epoch
            );
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        t.write_csv(&mut a).map_err(|e| e.to_string())?;
        run_feedback_loop(&x, &cfg(d)).map_err(|e| e.to_string())?.write_csv(&mut b).map_err(|e| e.to_string())?;
        ensure!(a == b, "d={d}: replay CSV differs");
        finals.push(t.records.last().unwrap().item_recall_mean);
    }
    ensure!(finals[1] >= finals[0], "final item recall d=64 {} < d=4 {}", finals[1], finals[0]);
    Ok(format!("final mean item recall d=4 {:.4}, d=64 {:.4}; monotone; replay identical", finals[0], finals[1]))
}

fn autoencoder_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1200);
    let acts = [Activation::Identity, Activation::Sigmoid, Activation::Softmax];
    let (mut done, mut skipped) = (0, 0);
    while done < 1000 {
        let n = rng.random_range(2..=20);
        let m = rng.random_range(1..=8);
        let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
        let w: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| g()).collect()).collect();
        let b: Vec<f64> = (0..n).map(|_| g()).collect();
        let q: Vec<f64> = (0..m).map(|_| g()).collect();
        let f = acts[done % 3];
        match ae_rank_equivalence(&w, &b, &q, f).map_err(|e| e.to_string())? {
            RankAgreement::Equal => done += 1,
            RankAgreement::Tie => skipped += 1,
            RankAgreement::Differ => return Err(format!("rankings differ under {f:?} at trial {done}")),
        }
    }
    Ok(format!("1000 tie-free trials identical ({skipped} tied draws skipped)"))
}

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "golden counts", budget: Duration::from_secs(10), run: golden_counts },
        Criterion { id: 2, name: "planar exact law", budget: Duration::from_secs(120), run: planar_law },
        Criterion { id: 3, name: "upper bounds", budget: Duration::from_secs(300), run: upper_bounds },
        Criterion { id: 4, name: "facet lower bound", budget: Duration::from_secs(300), run: facet_lower_bound },
        Criterion { id: 5, name: "worked example", budget: Duration::from_secs(10), run: worked_example },
        Criterion { id: 6, name: "cone soundness", budget: Duration::from_secs(300), run: cone_soundness },
        Criterion { id: 7, name: "cone monotonicity and convexity", budget: Duration::from_secs(300), run: cone_growth_and_convexity },
        Criterion { id: 8, name: "cap formula", budget: Duration::from_secs(120), run: cap_formula },
        Criterion { id: 9, name: "iALS correctness", budget: Duration::from_secs(180), run: ials_correctness },
        Criterion { id: 10, name: "popularity-bias trend in d", budget: Duration::from_secs(600), run: popularity_bias_trend },
        Criterion { id: 11, name: "feedback loop", budget: Duration::from_secs(600), run: feedback_loop },
        Criterion { id: 12, name: "autoencoder equivalence", budget: Duration::from_secs(60), run: autoencoder_equivalence },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d} (over the {:?} budget)", c.budget)),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "[{}] {:>2}. {}: {} ({:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
