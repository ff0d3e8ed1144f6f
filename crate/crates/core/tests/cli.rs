use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_empathy-gate"));
    c.env_remove("EMPATHY_GATE_SEED");
    c
}

fn run(c: &mut Command) -> Output {
    c.output().expect("spawn")
}

fn synth(dir: &Path, n: &str, images: bool) -> std::path::PathBuf {
    let out = run(bin()
        .args([
            "corpus", "synth", "--n-pos", n, "--n-neg", n, "--seed", "1", "--images",
        ])
        .arg(images.to_string())
        .arg("--out")
        .arg(dir));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    dir.join("corpus.jsonl")
}

#[test]
fn synth_writes_corpus_and_config() {
    let d = tempfile::tempdir().unwrap();
    let corpus = synth(d.path(), "100", true);
    let text = fs::read_to_string(&corpus).unwrap();
    // Header line plus one line per post.
    assert_eq!(text.lines().count(), 201);
    let cfg: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("resolved_config.json")).unwrap())
            .unwrap();
    assert_eq!(cfg["command"]["corpus"]["action"]["synth"]["seed"], 1);
}

#[test]
fn seed_comes_from_env_when_flag_absent() {
    let d = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args([
            "corpus", "synth", "--n-pos", "5", "--n-neg", "5", "--images", "false", "--out",
        ])
        .arg(d.path())
        .env("EMPATHY_GATE_SEED", "1234"));
    assert!(out.status.success());
    let cfg = fs::read_to_string(d.path().join("resolved_config.json")).unwrap();
    assert!(cfg.contains("\"seed\": 1234"), "{cfg}");

    let d2 = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["corpus", "synth", "--n-pos", "5", "--n-neg", "5", "--out"])
        .arg(d2.path()));
    assert!(out.status.success());
    let cfg = fs::read_to_string(d2.path().join("resolved_config.json")).unwrap();
    assert!(cfg.contains("\"seed\": 42"), "{cfg}");
}

#[test]
fn validate_flags_violations_with_exit_1() {
    let d = tempfile::tempdir().unwrap();
    let corpus = synth(d.path(), "10", false);
    let out = run(bin()
        .args(["corpus", "validate", "--corpus"])
        .arg(&corpus)
        .arg("--out")
        .arg(d.path()));
    assert_eq!(out.status.code(), Some(0));

    let bad = d.path().join("bad.jsonl");
    let text =
        fs::read_to_string(&corpus)
            .unwrap()
            .replacen("\"label\":\"ES\"", "\"label\":\"NES\"", 1);
    fs::write(&bad, text).unwrap();
    let before = fs::read(&bad).unwrap();
    let out = run(bin()
        .args(["corpus", "validate", "--corpus"])
        .arg(&bad)
        .arg("--out")
        .arg(d.path()));
    assert_eq!(out.status.code(), Some(1));
    assert!(
        fs::read_to_string(d.path().join("violations.csv"))
            .unwrap()
            .lines()
            .count()
            >= 2
    );
    assert_eq!(
        fs::read(&bad).unwrap(),
        before,
        "input must not be modified"
    );
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["frobnicate"],
        vec!["train", "--corpus", "x", "--mask", "BF,NOPE"],
        vec!["train", "--corpus", "x", "--task", "ER", "--mask", "GFS"],
        vec!["crossval", "--corpus", "x", "--k", "1"],
        vec![
            "report", "--corpus", "x", "--task", "ER", "--masks", "BF;HSV",
        ],
    ] {
        let d = tempfile::tempdir().unwrap();
        let out = run(bin().args(&args).arg("--out").arg(d.path()));
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = run(bin().args([
        "train", "--task", "ER", "--mask", "FP,BF", "--corpus", "c.jsonl",
    ]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("visual features invalid for ER"));
}

#[test]
fn missing_corpus_exits_1() {
    let d = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["crossval", "--corpus", "/nonexistent/c.jsonl", "--out"])
        .arg(d.path()));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn train_eval_predict_round() {
    let d = tempfile::tempdir().unwrap();
    let corpus = synth(&d.path().join("data"), "30", true);
    let t = d.path().join("t");
    let out = run(bin()
        .args(["train", "--corpus"])
        .arg(&corpus)
        .args(["--trees", "20", "--out"])
        .arg(&t));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(t.join("bundle.json").exists());

    let e = d.path().join("e");
    let out = run(bin()
        .args(["eval", "--bundle"])
        .arg(t.join("bundle.json"))
        .arg("--corpus")
        .arg(&corpus)
        .args(["--group-by", "category", "--out"])
        .arg(&e));
    assert!(out.status.success());
    let report = fs::read_to_string(e.join("report.csv")).unwrap();
    let rows: Vec<&str> = report
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(rows, ["MH", "TS", "VA", "MH+TS+VA"]);

    let p = d.path().join("p");
    let out = run(bin()
        .args(["predict", "--bundle"])
        .arg(t.join("bundle.json"))
        .args(["--text", "nobody listens, i feel so alone :(", "--out"])
        .arg(&p));
    assert!(out.status.success());
    let preds = fs::read_to_string(p.join("predictions.csv")).unwrap();
    assert!(preds.starts_with("key,p_lr,p_rf,probability,label"));
    assert_eq!(preds.lines().count(), 2);
}

#[test]
fn crossval_fold_rows_and_text_format() {
    let d = tempfile::tempdir().unwrap();
    let corpus = synth(&d.path().join("data"), "20", false);
    let out_dir = d.path().join("cv");
    let out = run(bin()
        .args(["crossval", "--corpus"])
        .arg(&corpus)
        .args([
            "--mask", "BF,LF,SA", "--k", "4", "--trees", "10", "--format", "text", "--out",
        ])
        .arg(&out_dir));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(out_dir.join("report.txt")).unwrap();
    let names: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(names, ["fold1", "fold2", "fold3", "fold4", "mean"]);
}

#[test]
fn agreement_reports_both_dimensions() {
    let d = tempfile::tempdir().unwrap();
    let corpus = synth(d.path(), "20", false);
    let out = run(bin()
        .args(["corpus", "agreement", "--corpus"])
        .arg(&corpus)
        .arg("--out")
        .arg(d.path()));
    assert!(out.status.success());
    let csv = fs::read_to_string(d.path().join("agreement.csv")).unwrap();
    assert!(csv.contains("ES/NES,40,4,"));
    assert!(csv.contains("ER/NER,80,4,"));
}
