use std::fs;
use std::path::Path;

use aesu::cli::run;
use aesu::formats::{read_corpus, InputFormat};

fn aesu(args: &[&str]) -> i32 {
    run(std::iter::once("aesu").chain(args.iter().copied()))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_metrics_writes_one_row_per_image() {
    let dir = tempfile::tempdir().unwrap();
    let (syn, out) = (dir.path().join("syn.jsonl"), dir.path().join("m.csv"));
    assert_eq!(aesu(&["gen", "--n", "100", "--raters", "200", "--seed", "7", "--out", p(&syn)]), 0);
    assert_eq!(aesu(&["metrics", "--input", p(&syn), "--boot", "200", "--jobs", "2", "--out", p(&out)]), 0);

    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 101);
    let corpus = read_corpus(&out, InputFormat::Csv, false).unwrap();
    assert_eq!(corpus.records.len(), 100);
    for rec in &corpus.records {
        assert!(rec.fit.is_some() && rec.report.is_some() && rec.modality.is_some());
    }
}

#[test]
fn simulate_without_pleasing_images_fails() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("low.csv");
    fs::write(&input, "image_id,c1,c2,c3,c4,c5,c6,c7,c8,c9,c10\nx,40,30,10,5,0,0,0,0,0,0\ny,20,50,20,5,5,0,0,0,0,0\n")
        .unwrap();
    let out = dir.path().join("sim.json");
    let code = aesu(&["simulate", "--input", p(&input), "--center", "ava", "--out", p(&out)]);
    assert_eq!(code, 1);
    assert!(!out.exists());
}

#[test]
fn eval_against_itself_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let (syn, fitted, report) = (dir.path().join("s.jsonl"), dir.path().join("f.jsonl"), dir.path().join("e.json"));
    assert_eq!(aesu(&["gen", "--n", "40", "--raters", "150", "--out", p(&syn)]), 0);
    assert_eq!(aesu(&["metrics", "--input", p(&syn), "--boot", "50", "--out", p(&fitted)]), 0);
    assert_eq!(aesu(&["eval", "--pred", p(&fitted), "--truth", p(&fitted), "--out", p(&report)]), 0);

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["n_images"], 40);
    assert_eq!(json["binary_accuracy"], 1.0);
    assert!(json["emd"].as_f64().unwrap() < 1e-12);
    let mean = json["columns"].as_array().unwrap().iter().find(|c| c["column"] == "mean").unwrap();
    assert!((mean["plcc"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(mean["mae"].as_f64().unwrap() < 1e-12);
}

#[test]
fn fit_recovers_generating_opinions() {
    use aesu_core::beta_model::{opinion_from_shape, BetaShape};

    let dir = tempfile::tempdir().unwrap();
    let (syn, fitted) = (dir.path().join("s.jsonl"), dir.path().join("f.jsonl"));
    assert_eq!(aesu(&["gen", "--n", "100", "--raters", "10000", "--noise", "0", "--out", p(&syn)]), 0);
    assert_eq!(aesu(&["fit", "--input", p(&syn), "--out", p(&fitted)]), 0);

    let recs = read_corpus(&fitted, InputFormat::Jsonl, false).unwrap().records;
    let good = recs
        .iter()
        .filter(|r| {
            let (a, b) = r.meta.true_shape.unwrap();
            let truth = opinion_from_shape(&BetaShape::new(a, b).unwrap()).unwrap().as_array();
            let got = r.opinion.unwrap().as_array();
            truth.iter().zip(got).all(|(t, g)| (t - g).abs() <= 0.02)
        })
        .count();
    assert!(good >= 95, "only {good}/100 recovered");
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(aesu(&["fit"]), 1);
    assert_eq!(aesu(&["frobnicate"]), 1);
    assert_eq!(aesu(&["--help"]), 0);
    assert_eq!(aesu(&["gen", "--n", "3", "--raters", "5", "--alpha-range", "nope", "--out", "/tmp/x.jsonl"]), 1);
    assert_eq!(aesu(&["fit", "--input", "/nonexistent.jsonl", "--out", "/tmp/aesu-never.jsonl"]), 1);
}

#[test]
fn classify_labels_every_record() {
    let dir = tempfile::tempdir().unwrap();
    let (syn, out) = (dir.path().join("s.jsonl"), dir.path().join("c.jsonl"));
    assert_eq!(aesu(&["gen", "--n", "30", "--raters", "100", "--out", p(&syn)]), 0);
    assert_eq!(aesu(&["classify", "--input", p(&syn), "--center", "0.419,0.444,0.137", "--out", p(&out)]), 0);
    let recs = read_corpus(&out, InputFormat::Jsonl, false).unwrap().records;
    assert!(recs.iter().all(|r| r.ternary_class.is_some()));
    assert_eq!(aesu(&["classify", "--input", p(&syn), "--center", "1,2", "--out", p(&out)]), 1);
}
