use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn segproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_segproj"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = segproj(args);
    assert!(
        out.status.success(),
        "segproj {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn jsonl(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// A noisy benchmark at 5% built from the toy corpus.
fn benchmark(dir: &Path) -> PathBuf {
    let out = dir.join("noise");
    ok(&[
        "gen-noise",
        "--corpus",
        p(&data("toy_segmented.txt")),
        "--ratio",
        "5%",
        "--seed",
        "3",
        "--out",
        p(&out),
    ]);
    out.join("ratio_0.05").join("pairs.jsonl")
}

const SMALL: &str = r#"{"id":"a","source":"我们去北京旅行困","target":"我们去北京旅行团","source_tokens":["我们","去","北京","旅行","困"],"target_tokens":["我们","去","北京","旅行团"],"gold_source_tokens":["我们","去","北京","旅行困"]}
{"id":"b","source":"今天天汽很好","target":"今天天气很好","source_tokens":["今天","天","汽","很","好"],"target_tokens":["今天","天气","很","好"],"gold_source_tokens":["今天","天汽","很","好"]}
"#;

fn small_corpus(dir: &Path) -> PathBuf {
    let path = dir.join("small.jsonl");
    fs::write(&path, SMALL).unwrap();
    path
}

#[test]
fn gen_noise_writes_one_directory_per_ratio_and_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        ok(&[
            "gen-noise",
            "--corpus",
            p(&data("toy_segmented.txt")),
            "--seed",
            "11",
            "--out",
            p(out),
        ]);
    }
    let mut dirs: Vec<String> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    dirs.sort();
    assert_eq!(dirs.len(), 10);
    for d in &dirs {
        for file in ["pairs.jsonl", "perturbations.jsonl", "manifest.json"] {
            assert_eq!(
                fs::read(a.join(d).join(file)).unwrap(),
                fs::read(b.join(d).join(file)).unwrap(),
                "{d}/{file}"
            );
        }
        let manifest: Value =
            serde_json::from_slice(&fs::read(a.join(d).join("manifest.json")).unwrap()).unwrap();
        let ratio = manifest["ratio"].as_f64().unwrap();
        let total = manifest["total_chars"].as_u64().unwrap() as f64;
        assert_eq!(
            manifest["operations"].as_u64().unwrap(),
            (ratio * total).round() as u64
        );
        assert_eq!(
            jsonl(&a.join(d).join("perturbations.jsonl")).len() as u64,
            manifest["operations"].as_u64().unwrap()
        );
    }
}

#[test]
fn gen_noise_rejects_bad_ratios() {
    let tmp = TempDir::new().unwrap();
    for ratio in ["0", "1.5", "abc"] {
        let out = segproj(&[
            "gen-noise",
            "--corpus",
            p(&data("toy_segmented.txt")),
            "--ratio",
            ratio,
            "--out",
            p(tmp.path()),
        ]);
        assert_eq!(out.status.code(), Some(1), "ratio {ratio}");
    }
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn align_project_evaluate_export() {
    let tmp = TempDir::new().unwrap();
    let pairs = benchmark(tmp.path());
    let dict = data("toy_dictionary.txt");
    let t = |name: &str| tmp.path().join(name);

    ok(&[
        "segment",
        "--corpus",
        p(&pairs),
        "--dictionary",
        p(&dict),
        "--out",
        p(&t("d.jsonl")),
    ]);
    for mode in ["p1", "p2", "ibm"] {
        let align = t(&format!("{mode}.align.jsonl"));
        ok(&[
            "align",
            "--corpus",
            p(&pairs),
            "--mode",
            mode,
            "--iterations",
            "3",
            "--out",
            p(&align),
        ]);
        let records = jsonl(&align);
        assert_eq!(records.len(), 200);
        assert!(records[0]["links"].is_array());
        ok(&[
            "project",
            "--corpus",
            p(&pairs),
            "--alignments",
            p(&align),
            "--dictionary",
            p(&dict),
            "--out",
            p(&t(&format!("{mode}.jsonl"))),
        ]);
    }

    let report = t("report.json");
    let out = ok(&[
        "evaluate",
        "--corpus",
        p(&pairs),
        "--predictions",
        &format!("D={}", p(&t("d.jsonl"))),
        "--predictions",
        &format!("P1={}", p(&t("p1.jsonl"))),
        "--predictions",
        &format!("P2={}", p(&t("p2.jsonl"))),
        "--alignments",
        &format!("P2={}", p(&t("p2.align.jsonl"))),
        "--compare",
        "--resamples",
        "500",
        "--out",
        p(&report),
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("P1 vs P2"));
    let r: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(r["systems"].as_array().unwrap().len(), 3);
    assert_eq!(r["comparisons"].as_array().unwrap().len(), 3);
    for c in r["comparisons"].as_array().unwrap() {
        let pv = c["p_value"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&pv));
    }
    assert!(
        r["systems"][2]["alignment"]["source_coverage"]
            .as_f64()
            .unwrap()
            > 0.9
    );
    assert_eq!(r["sentences"].as_array().unwrap().len(), 200);

    let bundle = t("bundle.json");
    ok(&["export-report", "--report", p(&report), "--out", p(&bundle)]);
    let b: Value = serde_json::from_slice(&fs::read(&bundle).unwrap()).unwrap();
    assert_eq!(b["schema_version"], 1);
    assert_eq!(b["record_count"], 200);
    assert_eq!(b["report"], r);
}

#[test]
fn gold_predictions_score_one() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path());
    let gold = tmp.path().join("gold.jsonl");
    fs::write(
        &gold,
        "{\"id\":\"a\",\"recovered_tokens\":[\"我们\",\"去\",\"北京\",\"旅行困\"]}\n{\"id\":\"b\",\"recovered_tokens\":[\"今天\",\"天汽\",\"很\",\"好\"]}\n",
    )
    .unwrap();
    let report = tmp.path().join("r.json");
    ok(&[
        "evaluate",
        "--corpus",
        p(&corpus),
        "--predictions",
        &format!("gold={}", p(&gold)),
        "--out",
        p(&report),
    ]);
    let r: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(r["systems"][0]["f1"], 1.0);
    assert_eq!(r["systems"][0]["error_counts"]["none"], 2);
}

#[test]
fn small_corpus_projection_recovers_the_merged_words() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path());
    let glyphs = tmp.path().join("glyph.tsv");
    fs::write(&glyphs, "困\t团\t1.0\n汽\t气\t0.95\n").unwrap();
    let align = tmp.path().join("a.jsonl");
    let preds = tmp.path().join("p.jsonl");
    ok(&[
        "align",
        "--corpus",
        p(&corpus),
        "--mode",
        "p2",
        "--glyph-table",
        p(&glyphs),
        "--out",
        p(&align),
    ]);
    ok(&[
        "project",
        "--corpus",
        p(&corpus),
        "--alignments",
        p(&align),
        "--out",
        p(&preds),
    ]);
    let got: Vec<Value> = jsonl(&preds)
        .into_iter()
        .map(|r| r["recovered_tokens"].clone())
        .collect();
    assert_eq!(got[0], serde_json::json!(["我们", "去", "北京", "旅行困"]));
    assert_eq!(got[1], serde_json::json!(["今天", "天汽", "很", "好"]));

    // without the residual links the substituted characters stay split
    ok(&[
        "align",
        "--corpus",
        p(&corpus),
        "--mode",
        "p1",
        "--out",
        p(&align),
    ]);
    ok(&[
        "project",
        "--corpus",
        p(&corpus),
        "--alignments",
        p(&align),
        "--out",
        p(&preds),
    ]);
    assert_eq!(
        jsonl(&preds)[0]["recovered_tokens"],
        serde_json::json!(["我们", "去", "北京", "旅行", "困"])
    );
}

#[test]
fn evaluate_reports_missing_prediction_ids() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path());
    let preds = tmp.path().join("p.jsonl");
    fs::write(
        &preds,
        "{\"id\":\"a\",\"recovered_tokens\":[\"我们去北京旅行困\"]}\n",
    )
    .unwrap();
    let out = segproj(&[
        "evaluate",
        "--corpus",
        p(&corpus),
        "--predictions",
        &format!("x={}", p(&preds)),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("ids b"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn inconsistent_predictions_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path());
    let preds = tmp.path().join("p.jsonl");
    fs::write(
        &preds,
        "{\"id\":\"a\",\"recovered_tokens\":[\"我们\"]}\n{\"id\":\"b\",\"recovered_tokens\":[\"今天天汽很好\"]}\n",
    )
    .unwrap();
    let out = segproj(&[
        "evaluate",
        "--corpus",
        p(&corpus),
        "--predictions",
        &format!("x={}", p(&preds)),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn select_reference_splits_selected_and_undecided() {
    let tmp = TempDir::new().unwrap();
    let corpus = tmp.path().join("multi.jsonl");
    fs::write(
        &corpus,
        concat!(
            "{\"id\":\"one\",\"source\":\"天汽\",\"targets\":[\"天气\"]}\n",
            "{\"id\":\"agree\",\"source\":\"天汽\",\"targets\":[\"天气\",\"空气很好\"]}\n",
            "{\"id\":\"split\",\"source\":\"天汽\",\"targets\":[\"天气\",\"汽车很多\"]}\n",
            "{\"id\":\"bare\",\"source\":\"天汽\",\"targets\":[\"天气\",\"天\"]}\n",
        ),
    )
    .unwrap();
    let vectors = tmp.path().join("vec.jsonl");
    fs::write(
        &vectors,
        concat!(
            "{\"id\":\"agree\",\"source_vectors\":[[1,0],[1,0]],\"candidate_vectors\":[[[1,0],[1,0]],[[0,1],[0,1],[0,1],[0,1]]]}\n",
            "{\"id\":\"split\",\"source_vectors\":[[1,0],[1,0]],\"candidate_vectors\":[[[0,1],[0,1]],[[1,0],[1,0],[1,0],[1,0]]]}\n",
        ),
    )
    .unwrap();
    let out = tmp.path().join("sel");
    ok(&[
        "select-reference",
        "--corpus",
        p(&corpus),
        "--embeddings",
        p(&vectors),
        "--out",
        p(&out),
    ]);
    let selected = jsonl(&out.join("selected.jsonl"));
    let undecided = jsonl(&out.join("undecided.jsonl"));
    let ids: Vec<&str> = selected.iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["one", "agree"]);
    assert_eq!(selected[1]["target"], "天气");
    let reasons: Vec<(&str, &str)> = undecided
        .iter()
        .map(|r| (r["id"].as_str().unwrap(), r["reason"].as_str().unwrap()))
        .collect();
    assert_eq!(
        reasons,
        [("split", "disagreement"), ("bare", "no_embeddings")]
    );
}

#[test]
fn export_of_an_empty_report() {
    let tmp = TempDir::new().unwrap();
    let report = tmp.path().join("r.json");
    fs::write(&report, r#"{"systems":[],"comparisons":[],"sentences":[]}"#).unwrap();
    let bundle = tmp.path().join("b.json");
    ok(&["export-report", "--report", p(&report), "--out", p(&bundle)]);
    let b: Value = serde_json::from_slice(&fs::read(&bundle).unwrap()).unwrap();
    assert_eq!(b["record_count"], 0);
}

#[test]
fn tune_with_the_submitted_grid() {
    let tmp = TempDir::new().unwrap();
    let pairs = benchmark(tmp.path());
    let csv = tmp.path().join("tune.csv");
    ok(&[
        "tune",
        "--corpus",
        p(&pairs),
        "--dictionary",
        p(&data("toy_dictionary.txt")),
        "--grid",
        "submitted",
        "--folds",
        "4",
        "--out",
        p(&csv),
    ]);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("rank,"));
    assert!(header.contains("fold_4_f1"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("1,"));
    assert!(row.contains("0.85"));
    assert_eq!(lines.next(), None);
}

#[test]
fn tune_needs_enough_sentences_for_the_folds() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path());
    let out = segproj(&[
        "tune",
        "--corpus",
        p(&corpus),
        "--grid",
        "submitted",
        "--out",
        p(&tmp.path().join("t.csv")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn train_ibm_then_align_with_the_saved_model() {
    let tmp = TempDir::new().unwrap();
    let pairs = benchmark(tmp.path());
    let model = tmp.path().join("model.json");
    ok(&[
        "train-ibm",
        "--corpus",
        p(&pairs),
        "--iterations",
        "0",
        "--out",
        p(&model),
    ]);
    let m: Value = serde_json::from_slice(&fs::read(&model).unwrap()).unwrap();
    assert_eq!(m["iterations"], 0);
    assert_eq!(m["log_likelihood_trace"].as_array().unwrap().len(), 1);

    ok(&[
        "train-ibm",
        "--corpus",
        p(&pairs),
        "--iterations",
        "4",
        "--out",
        p(&model),
    ]);
    let trace: Vec<f64> = serde_json::from_slice::<Value>(&fs::read(&model).unwrap()).unwrap()
        ["log_likelihood_trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(trace.len(), 5);
    assert!(trace.windows(2).all(|w| w[1] >= w[0] - 1e-9));

    let (fresh, saved) = (
        tmp.path().join("fresh.jsonl"),
        tmp.path().join("saved.jsonl"),
    );
    ok(&[
        "align",
        "--corpus",
        p(&pairs),
        "--mode",
        "ibm",
        "--iterations",
        "4",
        "--out",
        p(&fresh),
    ]);
    ok(&[
        "align",
        "--corpus",
        p(&pairs),
        "--mode",
        "ibm",
        "--ibm-model",
        p(&model),
        "--out",
        p(&saved),
    ]);
    assert_eq!(fs::read(&fresh).unwrap(), fs::read(&saved).unwrap());
}

#[test]
fn estimate_distribution_prints_rates() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path());
    let out = ok(&["estimate-distribution", "--corpus", p(&corpus)]);
    let d: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d["substitution"], 1.0);
}

#[test]
fn exit_codes() {
    assert_eq!(segproj(&["--help"]).status.code(), Some(0));
    assert_eq!(segproj(&["--version"]).status.code(), Some(0));
    assert_eq!(segproj(&[]).status.code(), Some(1));
    assert_eq!(segproj(&["align", "--bogus"]).status.code(), Some(1));
    let missing = segproj(&[
        "segment",
        "--corpus",
        "/nonexistent/x.jsonl",
        "--out",
        "/tmp/never.jsonl",
    ]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(!missing.stderr.is_empty());

    // a corpus without initial tokens and no dictionary to fill them
    let tmp = TempDir::new().unwrap();
    let corpus = tmp.path().join("c.jsonl");
    fs::write(
        &corpus,
        "{\"id\":\"x\",\"source\":\"ab\",\"target\":\"ab\",\"target_tokens\":[\"ab\"]}\n",
    )
    .unwrap();
    let out = segproj(&[
        "segment",
        "--corpus",
        p(&corpus),
        "--out",
        p(&tmp.path().join("o.jsonl")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("source_tokens"));
}
