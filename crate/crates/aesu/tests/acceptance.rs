//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or exceeds its wall-clock budget.
//!
//!     cargo test -p aesu --test acceptance

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use aesu::synth::draw_votes;
use aesu_core::beta_model::{b2r, fit_beta, opinion_from_shape, BetaShape, Opinion};
use aesu_core::decision::{classify, simulate_recommendation, Candidate, RecommendationRule, TernaryCenter, TernaryClass};
use aesu_core::distributions::{emd, mean_score, normalize_counts, RatingDistribution, NUM_BINS};
use aesu_core::losses::{fd_gradient, l2_rmsle, l3_consistency, LossWeights};
use aesu_core::modality::{dip_test_with_null, null_dips, DEFAULT_BOOTSTRAP, DEFAULT_SIGNIFICANCE};
use aesu_core::subjectivity::{dud, med};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn shape_in(r: &mut impl Rng, lo: f64, hi: f64) -> BetaShape {
    BetaShape::new(r.random_range(lo..=hi), r.random_range(lo..=hi)).unwrap()
}

fn random_dist(r: &mut impl Rng) -> RatingDistribution {
    RatingDistribution::from_weights(std::array::from_fn(|_| r.random::<f64>())).unwrap()
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn opinion_conformance() -> Outcome {
    let mut r = rng(2024, 0);
    let mut worst_sum = 0.0f64;
    for _ in 0..1000 {
        let a = 10f64.powf(r.random_range(0.0..=500f64.log10()));
        let b = 10f64.powf(r.random_range(0.0..=500f64.log10()));
        let o = opinion_from_shape(&BetaShape::new(a, b).unwrap()).unwrap();
        let [bb, dd, uu] = o.as_array();
        worst_sum = worst_sum.max((bb + dd + uu - 1.0).abs());
        check(bb >= 0.0 && dd >= 0.0 && uu >= 0.0, || format!("negative component at ({a}, {b})"))?;
    }
    check(worst_sum <= 1e-12, || format!("max |b+d+u-1| = {worst_sum:e}"))?;
    let flat = opinion_from_shape(&BetaShape::new(1.0, 1.0).unwrap()).unwrap().as_array();
    check(flat == [0.0, 0.0, 1.0], || format!("(1,1) -> {flat:?}"))?;
    let skew = opinion_from_shape(&BetaShape::new(9.0, 1.0).unwrap()).unwrap().as_array();
    check(skew == [0.8, 0.0, 0.2], || format!("(9,1) -> {skew:?}"))?;
    Ok(format!("1000 shapes, max |b+d+u-1| = {worst_sum:.1e}"))
}

fn fit_round_trip() -> Outcome {
    let rows: Vec<_> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let truth = shape_in(&mut rng(7, i), 1.2, 30.0);
            let fit = fit_beta(&b2r(&truth), 2.0, 42).unwrap();
            let want = opinion_from_shape(&truth).unwrap().as_array();
            let got = fit.opinion().as_array();
            let err = want.iter().zip(got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            (truth, err, fit.fit_emd)
        })
        .collect();
    let worst_err = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let worst_emd = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    for (truth, err, fit_emd) in &rows {
        check(*err <= 0.01 && *fit_emd <= 1e-4, || {
            format!("({:.3}, {:.3}): opinion error {err:.2e}, fit_emd {fit_emd:.2e}", truth.alpha(), truth.beta())
        })?;
    }
    Ok(format!("200 shapes, max opinion error {worst_err:.1e}, max fit_emd {worst_emd:.1e}"))
}

fn grid_oracle() -> Outcome {
    let grid: Vec<f64> = (0..=196).map(|k| 1.0 + 0.25 * k as f64).collect();
    let mut worst_gap = f64::NEG_INFINITY;
    for i in 0..50u64 {
        let mut r = rng(11, i);
        let truth = shape_in(&mut r, 1.2, 30.0);
        let counts = draw_votes(&mut r, truth.alpha(), truth.beta(), 200, 0.05);
        let target = normalize_counts(&counts).unwrap();
        let fitted = fit_beta(&target, 2.0, 42).unwrap().fit_emd;
        let best = grid
            .par_iter()
            .map(|&a| {
                grid.iter()
                    .map(|&b| emd(&target, &b2r(&BetaShape::new(a, b).unwrap()), 2.0).unwrap())
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min);
        worst_gap = worst_gap.max(fitted - best);
        check(fitted <= best + 1e-4, || format!("histogram {i}: fitted {fitted:.6e} vs grid {best:.6e}"))?;
    }
    Ok(format!("50 histograms, max(fitted - grid) = {worst_gap:.2e}"))
}

fn loss_identities() -> Outcome {
    let mut r = rng(5, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let shape = shape_in(&mut r, 1.0, 60.0);
        worst = worst.max(l3_consistency(&b2r(&shape), &shape));
    }
    check(worst <= 1e-12, || format!("L3 on consistent pair = {worst:e}"))?;
    let total = LossWeights::default().combine(1.0, 1.0, 1.0).total;
    check(total == 0.6, || format!("unit losses give {total:.17}"))?;
    let rmsle = l2_rmsle(&BetaShape::new(3.0, 1.0).unwrap(), &BetaShape::new(1.0, 3.0).unwrap());
    let gap = (rmsle - std::f64::consts::LN_2).abs();
    check(gap <= 1e-12, || format!("RMSLE((3,1),(1,3)) off ln 2 by {gap:e}"))?;
    Ok(format!("max L3 {worst:.1e}, total {total}, |RMSLE - ln 2| {gap:.1e}"))
}

fn richardson() -> Outcome {
    type Case = (&'static str, fn(&[f64]) -> f64, fn(&[f64]) -> Vec<f64>, [f64; 2]);
    let cases: [Case; 3] = [
        ("sin*exp", |x| x[0].sin() * x[1].exp(), |x| vec![x[0].cos() * x[1].exp(), x[0].sin() * x[1].exp()], [0.7, -0.3]),
        ("ln(1+x^2+y^4)", |x| (1.0 + x[0] * x[0] + x[1].powi(4)).ln(), |x| {
            let s = 1.0 + x[0] * x[0] + x[1].powi(4);
            vec![2.0 * x[0] / s, 4.0 * x[1].powi(3) / s]
        }, [0.9, 1.1]),
        ("rational", |x| 1.0 / (1.0 + x[0] * x[0] + 2.0 * x[1] * x[1]), |x| {
            let s = 1.0 + x[0] * x[0] + 2.0 * x[1] * x[1];
            vec![-2.0 * x[0] / (s * s), -4.0 * x[1] / (s * s)]
        }, [0.4, 0.8]),
    ];
    let h = 1e-2;
    let mut ratios = Vec::new();
    for (name, f, grad, x) in cases {
        let exact = grad(&x);
        let err = |h: f64| -> f64 {
            let g = fd_gradient(f, &x, h).unwrap();
            g.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        };
        let ratio = err(h) / err(h / 2.0);
        check((3.5..=4.5).contains(&ratio), || format!("{name}: error ratio {ratio:.3}"))?;
        ratios.push(format!("{name} {ratio:.3}"));
    }
    Ok(format!("error ratios at h = {h}: {}", ratios.join(", ")))
}

fn dip_pipeline() -> Outcome {
    let raters = 200u64;
    let null = null_dips(raters as usize, DEFAULT_BOOTSTRAP, 42);
    let unimodal = (0..500u64)
        .into_par_iter()
        .filter(|&i| {
            let mut r = rng(21, i);
            let shape = shape_in(&mut r, 2.0, 20.0);
            let counts = draw_votes(&mut r, shape.alpha(), shape.beta(), raters, 0.05);
            dip_test_with_null(&normalize_counts(&counts).unwrap(), &null, DEFAULT_SIGNIFICANCE).unwrap().unimodal
        })
        .count();
    let bimodal = (0..200u64)
        .into_par_iter()
        .filter(|&i| {
            let mut r = rng(22, i);
            let low = draw_votes(&mut r, 8.0, 32.0, raters / 2, 0.0);
            let high = draw_votes(&mut r, 32.0, 8.0, raters / 2, 0.0);
            let counts: [u64; NUM_BINS] = std::array::from_fn(|k| low[k] + high[k]);
            !dip_test_with_null(&normalize_counts(&counts).unwrap(), &null, DEFAULT_SIGNIFICANCE).unwrap().unimodal
        })
        .count();
    let detail = format!("unimodal kept {unimodal}/500, two-cluster rejected {bimodal}/200, B = {DEFAULT_BOOTSTRAP}");
    check(unimodal * 10 >= 500 * 9 && bimodal * 10 >= 200 * 9, || detail.clone())?;
    Ok(detail)
}

fn ternary() -> Outcome {
    let ava = TernaryCenter::AVA_MEDIAN;
    let first = classify(&Opinion::new(0.50, 0.35, 0.15).unwrap(), &ava);
    check(first == TernaryClass::Pleasing, || format!("(0.50, 0.35, 0.15) -> {first}"))?;
    let second = classify(&Opinion::new(0.35, 0.40, 0.25).unwrap(), &ava);
    check(second == TernaryClass::Uncertain, || format!("(0.35, 0.40, 0.25) -> {second}"))?;
    let mut r = rng(33, 0);
    for _ in 0..10_000 {
        let w: [f64; 3] = std::array::from_fn(|_| -r.random::<f64>().ln());
        let s: f64 = w.iter().sum();
        let o = Opinion::new(w[0] / s, w[1] / s, w[2] / s).unwrap();
        let arr = o.as_array();
        let top = (0..3).max_by(|&i, &j| arr[i].total_cmp(&arr[j])).unwrap();
        let want = [TernaryClass::Pleasing, TernaryClass::Unpleasing, TernaryClass::Uncertain][top];
        let got = classify(&o, &TernaryCenter::CENTROID);
        check(got == want, || format!("{arr:?}: centroid rule {got}, argmax {want}"))?;
    }
    Ok("worked examples Pleasing/Uncertain; centroid rule = argmax on 10000 opinions".into())
}

fn recommendation() -> Outcome {
    let corpus: Vec<Candidate> = (0..2000u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(44, i);
            let (a, b) = if i % 2 == 0 {
                (r.random_range(30.0..=40.0), r.random_range(15.0..=20.0))
            } else {
                (r.random_range(1.4..=1.6), r.random_range(1.2..=1.4))
            };
            let dist = normalize_counts(&draw_votes(&mut r, a, b, 200, 0.0)).unwrap();
            let fit = fit_beta(&dist, 2.0, 42).unwrap();
            Candidate { distribution: dist, predicted_mean: mean_score(&dist), predicted_opinion: fit.opinion() }
        })
        .collect();
    let rules = [RecommendationRule::BinaryMean, RecommendationRule::TernaryPleasing];
    let out = simulate_recommendation(&corpus, &TernaryCenter::AVA_MEDIAN, &rules, 5);
    let (binary, ternary) = (out[0].ratio().map_err(|e| e.to_string())?, out[1].ratio().map_err(|e| e.to_string())?);
    let detail = format!(
        "binary {:.2}% ({} images), ternary {:.2}% ({} images)",
        100.0 * binary,
        out[0].recommended,
        100.0 * ternary,
        out[1].recommended
    );
    check(ternary - binary >= 0.01, || detail.clone())?;
    Ok(detail)
}

fn metric_axioms() -> Outcome {
    let mut r = rng(55, 0);
    for _ in 0..1000 {
        let (p, q) = (random_dist(&mut r), random_dist(&mut r));
        for order in [1.0, 2.0] {
            check(emd(&p, &p, order).unwrap() == 0.0, || "EMD(p, p) != 0".into())?;
            check(emd(&p, &q, order).unwrap() == emd(&q, &p, order).unwrap(), || "EMD not symmetric".into())?;
        }
    }
    for _ in 0..1000 {
        let (p, q, s) = (random_dist(&mut r), random_dist(&mut r), random_dist(&mut r));
        let (pq, qs, ps) = (emd(&p, &q, 1.0).unwrap(), emd(&q, &s, 1.0).unwrap(), emd(&p, &s, 1.0).unwrap());
        check(ps <= pq + qs + 1e-15, || format!("triangle violated: {ps} > {pq} + {qs}"))?;
    }
    let uniform = RatingDistribution::uniform();
    check(dud(&uniform) == 0.0 && med(&uniform) == 0.0, || {
        format!("DUD(uniform) = {}, MED(uniform) = {}", dud(&uniform), med(&uniform))
    })?;
    let d1 = dud(&RatingDistribution::delta(1).unwrap());
    check(d1 == 0.45, || format!("DUD(delta_1) = {d1:.17}"))?;
    Ok("1000 pairs, 1000 triples; DUD/MED(uniform) = 0, DUD(delta_1) = 0.45".into())
}

fn cli(args: &[&str]) -> Result<(), String> {
    match aesu::cli::run(std::iter::once("aesu").chain(args.iter().copied())) {
        0 => Ok(()),
        code => Err(format!("`aesu {}` exited with {code}", args.join(" "))),
    }
}

fn pipeline_run(dir: &Path, jobs: &str) -> Result<Vec<Vec<u8>>, String> {
    let path = |name: &str| dir.join(name).to_str().unwrap().to_owned();
    let (syn, metrics, classes, sim) = (path("syn.jsonl"), path("metrics.csv"), path("classes.jsonl"), path("sim.json"));
    cli(&["gen", "--n", "300", "--raters", "150", "--noise", "0.05", "--seed", "9", "--out", &syn])?;
    cli(&["metrics", "--input", &syn, "--jobs", jobs, "--seed", "9", "--out", &metrics])?;
    cli(&["classify", "--input", &metrics, "--jobs", jobs, "--center", "auto", "--out", &classes])?;
    cli(&["simulate", "--input", &classes, "--jobs", jobs, "--center", "ava", "--out", &sim])?;
    [syn, metrics, classes, sim].iter().map(|p| fs::read(p).map_err(|e| format!("{p}: {e}"))).collect()
}

fn pipeline_determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let one = pipeline_run(a.path(), "1")?;
    let four = pipeline_run(b.path(), "4")?;
    let names = ["gen", "metrics", "classify", "simulate"];
    for ((x, y), name) in one.iter().zip(&four).zip(names) {
        check(x == y, || format!("{name} output differs between --jobs 1 and --jobs 4"))?;
    }
    Ok(format!("{} bytes across 4 stages identical for --jobs 1 and 4", one.iter().map(Vec::len).sum::<usize>()))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("opinion conformance", Duration::from_secs(1), opinion_conformance),
        ("fit round-trip", Duration::from_secs(60), fit_round_trip),
        ("grid-oracle optimality", Duration::from_secs(300), grid_oracle),
        ("loss identities", Duration::from_secs(60), loss_identities),
        ("finite-difference consistency", Duration::from_secs(60), richardson),
        ("dip-test pipeline", Duration::from_secs(600), dip_pipeline),
        ("ternary classification", Duration::from_secs(60), ternary),
        ("recommendation simulation", Duration::from_secs(60), recommendation),
        ("metric axioms", Duration::from_secs(60), metric_axioms),
        ("pipeline determinism", Duration::from_secs(600), pipeline_determinism),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over budget {budget:?}")),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("{status} {name}: {detail} [{:.2}s]", elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
