use std::path::{Path, PathBuf};

use dotrank::dataset::{split_strong, SplitManifest};
use dotrank::exact::{rational_to_string, RVec};
use dotrank::feedback::run_feedback_loop;
use dotrank::ials::{fold_in, load_model, popularity_baseline, save_model, topk_for_vector, train as fit, FactorModel};
use dotrank::metrics::{
    arp_at_k, coverage_at_k, negative_gini_at_k, recall_at_k, FrequencyVector, MetricRecord, PopularityScale,
    RecallNormalization, TopKTable,
};
use dotrank::popcone::{
    cap_decay_profile, cone_dimension_bound, dominance_check, in_multi_cone, in_singleton_cone, query_set_witness,
    reconstruct, singleton_counter_witness, CapRow, ConeMembershipResult,
};
use dotrank::rankgeom::{
    enumerate_representable, facet_permutation, facets, gale_facets, BoundChecks, EnumerationGuard,
    RepresentabilityWitness,
};
use dotrank::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    read_config, resolve, ConesConfig, EvalConfig, LoopRunConfig, NrankConfig, TrainConfig,
};
use crate::{CliError, Globals};

fn config_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("config.json")
}

fn strings(v: &[dotrank::exact::Rational]) -> Vec<String> {
    v.iter().map(rational_to_string).collect()
}

#[derive(Serialize)]
struct TrainSidecar<'a> {
    config: &'a TrainConfig,
    n_users: usize,
    n_items: usize,
    n_pairs: usize,
    train_pairs: usize,
}

pub fn train(g: &Globals) -> Result<(), CliError> {
    let mut cfg: TrainConfig = read_config(&g.config)?;
    cfg.dataset.resolve(&config_dir(&g.config));
    if let Some(seed) = g.seed {
        cfg.hyperparams.seed = seed;
    }
    let full = cfg.dataset.load()?;
    let (train_x, manifest) = match &cfg.split {
        Some(spec) => {
            let split = split_strong(&full, spec)?;
            let manifest = SplitManifest::from_split(spec, &split);
            (split.train, Some(manifest))
        }
        None => (full.clone(), None),
    };
    let (model, trace) = fit(&train_x, &cfg.hyperparams)?;

    let dir = &g.output;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    save_model(&model, &dir.join("model.json"))?;
    let trace_path = dir.join("trace.csv");
    let mut csv = String::from("sweep,objective\n");
    for (i, obj) in trace.iter().enumerate() {
        csv.push_str(&format!("{i},{obj:?}\n"));
    }
    std::fs::write(&trace_path, csv).map_err(|e| CliError::io(&trace_path, e))?;
    write_json(
        &sidecar(&trace_path),
        &TrainSidecar {
            config: &cfg,
            n_users: full.n_users(),
            n_items: full.n_items(),
            n_pairs: full.n_pairs(),
            train_pairs: train_x.n_pairs(),
        },
    )?;
    if let Some(m) = manifest {
        m.save(&dir.join("split.json"))?;
    }
    println!(
        "trained d = {} on {} pairs; objective {:.6} -> {:.6}",
        cfg.hyperparams.d,
        train_x.n_pairs(),
        trace[0],
        trace[trace.len() - 1]
    );
    Ok(())
}

#[derive(Serialize)]
struct EvalResults {
    ials: Vec<MetricRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    popularity: Option<Vec<MetricRecord>>,
}

#[derive(Serialize)]
struct EvalReport<'a> {
    config: &'a EvalConfig,
    n_eval_users: usize,
    results: EvalResults,
}

fn score_lists(
    lists: &[Vec<u32>],
    holdouts: &[&[u32]],
    ks: &[usize],
    item_counts: &[usize],
    norm: RecallNormalization,
    scale: PopularityScale,
) -> Result<Vec<MetricRecord>, Error> {
    let n_items = item_counts.len();
    let mut out = Vec::new();
    for &k in ks {
        let table = TopKTable::truncated(lists, k)?;
        let mut recall = 0.0;
        for (list, holdout) in table.lists().iter().zip(holdouts) {
            recall += recall_at_k(list, holdout, k, norm)?;
        }
        recall /= lists.len() as f64;
        let freq = FrequencyVector::from_table(&table, n_items)?;
        out.push(MetricRecord::new("recall", k, recall));
        out.push(MetricRecord::new("arp", k, arp_at_k(&table, item_counts, scale)?));
        out.push(MetricRecord::new("coverage", k, coverage_at_k(&table, n_items)?));
        out.push(MetricRecord::new("negative_gini", k, negative_gini_at_k(&freq, n_items)?));
    }
    Ok(out)
}

fn check_model(model: &FactorModel, n_users: usize, n_items: usize) -> Result<(), Error> {
    if model.n_users() != n_users || model.n_items() != n_items {
        return Err(Error::Argument(format!(
            "model is for {} x {}, dataset is {n_users} x {n_items}",
            model.n_users(),
            model.n_items()
        )));
    }
    Ok(())
}

pub fn eval(g: &Globals) -> Result<(), CliError> {
    let mut cfg: EvalConfig = read_config(&g.config)?;
    let base = config_dir(&g.config);
    cfg.dataset.resolve(&base);
    resolve(&base, &mut cfg.model);
    resolve(&base, &mut cfg.split);

    let full = cfg.dataset.load()?;
    let manifest = SplitManifest::load(&cfg.split)?;
    let train_x = manifest.train_interactions(&full)?;
    let model = load_model(&cfg.model)?;
    check_model(&model, full.n_users(), full.n_items())?;
    if manifest.eval_users.is_empty() {
        return Err(Error::EmptyDataset("the split has no evaluation users".into()).into());
    }
    let n_items = full.n_items();
    if cfg.ks.is_empty() {
        return Err(Error::Argument("ks must list at least one K".into()).into());
    }
    if let Some(&k) = cfg.ks.iter().find(|&&k| k == 0 || k > n_items) {
        return Err(Error::Argument(format!("K = {k} must be in 1..={n_items}")).into());
    }
    let k_max = *cfg.ks.iter().max().expect("ks is non-empty");

    let eval_users = &manifest.eval_users;
    let holdouts: Vec<&[u32]> = eval_users.iter().map(|e| e.holdout.as_slice()).collect();
    // Users whose fold-in leaves fewer than K candidates get shorter lists.
    let ials_lists: Vec<Vec<u32>> = eval_users
        .par_iter()
        .map(|e| {
            let phi = fold_in(&model, &e.fold_in)?;
            topk_for_vector(&model.item_factors, &phi, k_max.min(n_items - e.fold_in.len()), &e.fold_in)
        })
        .collect::<Result<_, Error>>()?;
    let counts = train_x.item_counts();
    let ials = score_lists(&ials_lists, &holdouts, &cfg.ks, &counts, cfg.recall_normalization, cfg.popularity_scale)?;

    let popularity = if cfg.baseline {
        let order = popularity_baseline(&train_x)?;
        let lists: Vec<Vec<u32>> = eval_users
            .iter()
            .map(|e| order.iter().copied().filter(|v| !e.fold_in.contains(v)).take(k_max).collect())
            .collect();
        Some(score_lists(&lists, &holdouts, &cfg.ks, &counts, cfg.recall_normalization, cfg.popularity_scale)?)
    } else {
        None
    };

    let report = EvalReport {
        config: &cfg,
        n_eval_users: eval_users.len(),
        results: EvalResults { ials, popularity },
    };
    write_json(&g.output, &report)?;
    for r in &report.results.ials {
        println!("ials {}@{} = {:.4}", r.metric, r.k, r.value);
    }
    Ok(())
}

#[derive(Serialize)]
struct LoopSidecar<'a> {
    config: &'a LoopRunConfig,
    n_users: usize,
    n_items: usize,
    n_pairs: usize,
}

pub fn feedback_loop(g: &Globals) -> Result<(), CliError> {
    let mut cfg: LoopRunConfig = read_config(&g.config)?;
    cfg.dataset.resolve(&config_dir(&g.config));
    if let Some(seed) = g.seed {
        cfg.loop_config.seed = seed;
        cfg.loop_config.hp.seed = seed;
    }
    let full = cfg.dataset.load()?;
    let trajectory = run_feedback_loop(&full, &cfg.loop_config)?;
    let mut buf = Vec::new();
    trajectory.write_csv(&mut buf).map_err(|e| CliError::io(&g.output, e))?;
    std::fs::write(&g.output, buf).map_err(|e| CliError::io(&g.output, e))?;
    write_json(
        &sidecar(&g.output),
        &LoopSidecar {
            config: &cfg,
            n_users: full.n_users(),
            n_items: full.n_items(),
            n_pairs: full.n_pairs(),
        },
    )?;
    let last = trajectory.records.last().expect("epoch 0 is always recorded");
    println!(
        "epoch {}: user recall {:.4}, item recall {:.4}",
        last.epoch, last.user_recall_mean, last.item_recall_mean
    );
    Ok(())
}

#[derive(Serialize)]
struct CountEntry {
    k: usize,
    count: u64,
    bounds: BoundChecks,
    #[serde(skip_serializing_if = "Option::is_none")]
    permutations: Option<Vec<Vec<usize>>>,
}

#[derive(Serialize)]
struct FacetEntry {
    vertices: Vec<usize>,
    outward_normal: Vec<String>,
    offset: String,
    permutation: Vec<usize>,
    witness: RepresentabilityWitness,
}

#[derive(Serialize)]
struct FacetSummary {
    count: usize,
    hull_vertices: Vec<usize>,
    facets: Vec<FacetEntry>,
}

#[derive(Serialize)]
struct GaleCheck {
    expected: Vec<Vec<usize>>,
    matches: bool,
}

#[derive(Serialize)]
struct NrankInvariants {
    bounds_hold: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    facet_permutations_representable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hull_vertices_match_k1: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gale_evenness: Option<bool>,
    all_hold: bool,
}

#[derive(Serialize)]
struct NrankReport<'a> {
    config: &'a NrankConfig,
    n: usize,
    d: usize,
    general_position: bool,
    hyperplanes_distinct: bool,
    counts: Vec<CountEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    facets: Option<FacetSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    facets_skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gale: Option<GaleCheck>,
    invariants: NrankInvariants,
}

pub fn nrank(g: &Globals) -> Result<(), CliError> {
    let mut cfg: NrankConfig = read_config(&g.config)?;
    cfg.vectors.resolve(&config_dir(&g.config));
    let (v, params) = cfg.vectors.load()?;
    let (n, d) = (v.n(), v.d());
    let ks = if cfg.ks.is_empty() { vec![n] } else { cfg.ks.clone() };
    let guard = EnumerationGuard {
        max_candidates: cfg.max_candidates,
    };

    let mut counts = Vec::with_capacity(ks.len());
    for &k in &ks {
        let r = enumerate_representable(&v, k, guard)?;
        let bounds = BoundChecks::evaluate(r.count, n as u64, k as u64, d as u64)?;
        let permutations = cfg
            .list_permutations
            .then(|| r.permutations.iter().map(|p| p.entries().to_vec()).collect());
        counts.push(CountEntry {
            k,
            count: r.count,
            bounds,
            permutations,
        });
    }

    let (mut facet_summary, mut facets_skipped) = (None, None);
    if !cfg.facets {
        facets_skipped = Some("disabled in config".to_string());
    } else {
        match facets(&v) {
            Ok(fs) => {
                let mut entries = Vec::with_capacity(fs.len());
                let mut hull: Vec<usize> = Vec::new();
                for f in &fs {
                    let (pi, witness) = facet_permutation(&v, f)?;
                    hull.extend(&f.vertex_indices);
                    entries.push(FacetEntry {
                        vertices: f.vertex_indices.clone(),
                        outward_normal: strings(&f.outward_normal),
                        offset: rational_to_string(&f.offset),
                        permutation: pi.entries().to_vec(),
                        witness,
                    });
                }
                hull.sort_unstable();
                hull.dedup();
                facet_summary = Some(FacetSummary {
                    count: entries.len(),
                    hull_vertices: hull,
                    facets: entries,
                });
            }
            Err(e @ (Error::GeneralPosition(_) | Error::Argument(_))) => facets_skipped = Some(e.to_string()),
            Err(e) => return Err(e.into()),
        }
    }

    let gale = match (&params, &facet_summary) {
        (Some(t), Some(fs)) => {
            let expected = gale_facets(t, d);
            let mut found: Vec<Vec<usize>> = fs.facets.iter().map(|f| f.vertices.clone()).collect();
            found.sort();
            Some(GaleCheck {
                matches: found == expected,
                expected,
            })
        }
        _ => None,
    };

    let bounds_hold = counts.iter().all(|c| c.bounds.all_hold());
    let facet_ok = facet_summary.as_ref().map(|fs| fs.facets.iter().all(|f| f.witness.feasible));
    let k1 = counts.iter().find(|c| c.k == 1).map(|c| c.count);
    let hull_ok = match (&facet_summary, k1) {
        (Some(fs), Some(c)) if d >= 2 => Some(fs.hull_vertices.len() as u64 == c),
        _ => None,
    };
    let gale_ok = gale.as_ref().map(|g| g.matches);
    let all_hold = bounds_hold && [facet_ok, hull_ok, gale_ok].iter().all(|x| x.unwrap_or(true));

    let report = NrankReport {
        config: &cfg,
        n,
        d,
        general_position: v.is_general_position(),
        hyperplanes_distinct: v.arrangement_hyperplanes_distinct(),
        counts,
        facets: facet_summary,
        facets_skipped,
        gale,
        invariants: NrankInvariants {
            bounds_hold,
            facet_permutations_representable: facet_ok,
            hull_vertices_match_k1: hull_ok,
            gale_evenness: gale_ok,
            all_hold,
        },
    };
    write_json(&g.output, &report)?;
    for c in &report.counts {
        println!("nrank_{} = {} (n = {n}, d = {d})", c.k, c.count);
    }
    println!("invariants {}", if all_hold { "hold" } else { "FAIL" });
    Ok(())
}

#[derive(Serialize)]
struct SingletonEntry {
    long_tail_index: usize,
    membership: ConeMembershipResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    counter_witness: Option<Vec<String>>,
}

#[derive(Serialize)]
struct PointEntry {
    point: Vec<String>,
    general: ConeMembershipResult,
    certificate_rebuilds_point: Option<bool>,
    singletons: Vec<SingletonEntry>,
    /// Whether `s` beat the long tail under every sampled query.
    dominates_samples: Option<bool>,
    sound: bool,
}

#[derive(Serialize)]
struct ConesReport<'a> {
    config: &'a ConesConfig,
    d: usize,
    n_popular: usize,
    n_long_tail: usize,
    query_set_witness: RepresentabilityWitness,
    points: Vec<PointEntry>,
    all_sound: bool,
    dimension_bound: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cap_profile: Option<Vec<CapRow>>,
}

pub fn cones(g: &Globals) -> Result<(), CliError> {
    let mut cfg: ConesConfig = read_config(&g.config)?;
    cfg.resolve(&config_dir(&g.config));
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    let prob = cfg.problem.load()?;
    let witness = query_set_witness(&prob)?;

    let mut points = Vec::with_capacity(cfg.points.len());
    for s in &cfg.points {
        let general = in_multi_cone(&prob, s)?;
        let rebuilt = general
            .member
            .then(|| reconstruct(&prob, None, &general).as_deref() == Some(s.as_slice()));
        let mut singletons = Vec::with_capacity(prob.long_tail().len());
        for (j, l) in prob.long_tail().iter().enumerate() {
            let membership = in_singleton_cone(prob.popular(), l, s)?;
            let counter_witness = if membership.member {
                None
            } else {
                singleton_counter_witness(prob.popular(), l, s)?.map(|q: RVec| strings(&q))
            };
            singletons.push(SingletonEntry {
                long_tail_index: j,
                membership,
                counter_witness,
            });
        }
        let dominates_samples = if witness.feasible {
            Some(dominance_check(&prob, s, cfg.trials, cfg.seed)?)
        } else {
            None
        };
        let certified = general.member || singletons.iter().all(|e| e.membership.member);
        let sound = (!certified || dominates_samples != Some(false)) && rebuilt != Some(false);
        points.push(PointEntry {
            point: strings(s),
            general,
            certificate_rebuilds_point: rebuilt,
            singletons,
            dominates_samples,
            sound,
        });
    }
    let cap_profile = cfg.cap.as_ref().map(|c| cap_decay_profile(c.theta, &c.dims)).transpose()?;

    let report = ConesReport {
        config: &cfg,
        d: prob.d(),
        n_popular: prob.popular().len(),
        n_long_tail: prob.long_tail().len(),
        query_set_witness: witness,
        all_sound: points.iter().all(|p| p.sound),
        points,
        dimension_bound: cone_dimension_bound(&prob),
        cap_profile,
    };
    write_json(&g.output, &report)?;
    let members = report.points.iter().filter(|p| p.general.member).count();
    println!(
        "{} of {} points certified above the long tail; soundness {}",
        members,
        report.points.len(),
        if report.all_sound { "holds" } else { "FAILS" }
    );
    Ok(())
}
