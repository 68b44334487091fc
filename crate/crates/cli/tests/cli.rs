use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ncd_core::Matrix;
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn ncd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncd"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = ncd(args);
    assert!(
        out.status.success(),
        "ncd {} failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    ncd(args).status.code().unwrap()
}

/// First `n` fixture lines as a dataset of its own.
fn small_tsv(dir: &Path, n: usize) -> PathBuf {
    let text = fs::read_to_string(root().join("data/sms_fixture.tsv")).unwrap();
    let lines: Vec<&str> = text.lines().take(n).collect();
    let path = dir.join("small.tsv");
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_bin(path: &Path) -> Matrix {
    Matrix::read_binary(fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn matrix_has_zero_diagonal_and_cache_does_not_change_it() {
    let tmp = tempfile::tempdir().unwrap();
    let data = small_tsv(tmp.path(), 25);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["matrix", "--data", s(&data), "--out", s(&a)]);
    ok(&["matrix", "--data", s(&data), "--out", s(&b), "--no-cache"]);
    let m = read_bin(&a.join("distance.bin"));
    assert_eq!(m.shape(), (25, 25));
    for i in 0..25 {
        assert_eq!(m.get(i, i), 0.0);
    }
    assert!(m.is_symmetric());
    assert_eq!(
        fs::read(a.join("distance.bin")).unwrap(),
        fs::read(b.join("distance.bin")).unwrap()
    );
    let csv = fs::read_to_string(a.join("distance.csv")).unwrap();
    assert!(csv.starts_with("# ncd "));
    assert!(csv.contains("config-sha256="));
}

#[test]
fn vanilla_matrix_is_asymmetric_and_kernels_are_emitted() {
    let tmp = tempfile::tempdir().unwrap();
    let data = small_tsv(tmp.path(), 20);
    let out = tmp.path().join("m");
    ok(&[
        "matrix",
        "--data",
        s(&data),
        "--out",
        s(&out),
        "--symmetrisation",
        "vanilla",
        "--lambda",
        "0.1,1",
    ]);
    assert!(!read_bin(&out.join("distance.bin")).is_symmetric());
    let names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names
            .iter()
            .filter(|n| n.starts_with("kernel-rbf-"))
            .count(),
        2,
        "{names:?}"
    );
}

#[test]
fn usage_and_data_errors_have_distinct_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let data = small_tsv(tmp.path(), 20);
    let out = tmp.path().join("x");
    let other = tmp.path().join("other.tsv");
    fs::write(
        &other,
        "ham\tsee you at eight\nspam\tclaim your prize now\n",
    )
    .unwrap();
    assert_eq!(
        code(&[
            "matrix",
            "--data",
            s(&data),
            "--out",
            s(&out),
            "--symmetrisation",
            "assumed",
            "--against",
            s(&other)
        ]),
        1
    );
    ok(&[
        "matrix",
        "--data",
        s(&data),
        "--out",
        s(&out),
        "--symmetrisation",
        "enforced",
        "--against",
        s(&other),
    ]);
    assert_eq!(read_bin(&out.join("distance.bin")).shape(), (20, 2));
    assert_eq!(
        code(&[
            "train",
            "--data",
            s(&data),
            "--out",
            s(&out),
            "--model",
            "knn",
            "--k",
            "2"
        ]),
        1
    );
    assert_eq!(code(&["train", "--bogus"]), 1);
    assert_eq!(
        code(&[
            "matrix",
            "--data",
            s(&tmp.path().join("missing.tsv")),
            "--out",
            s(&out)
        ]),
        2
    );
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn levenshtein_audit_finds_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("audit");
    let text = ok(&[
        "audit",
        "--metric",
        "levenshtein",
        "--samples",
        "60",
        "--out",
        s(&out),
    ]);
    assert!(text.contains("no_violations"), "{text}");
    let v: Value =
        serde_json::from_str(&fs::read_to_string(out.join("audit.json")).unwrap()).unwrap();
    assert_eq!(v["status"], "no_violations");
    for r in v["report"]["reports"].as_array().unwrap() {
        assert_eq!(r["violations"], 0);
    }
}

#[test]
fn evaluate_reproduces_training_dump() {
    let tmp = tempfile::tempdir().unwrap();
    let data = small_tsv(tmp.path(), 120);
    let out = tmp.path().join("run");
    let common = [
        "--data",
        s(&data),
        "--out",
        s(&out),
        "--model",
        "kernel_svc",
        "--test-size",
        "30",
        "--folds",
        "3",
        "--lambda",
        "0.1,1",
        "--C",
        "1,10",
    ];
    ok(&[&["train"], &common[..]].concat());
    for f in [
        "grid.csv",
        "grid.json",
        "model.json",
        "predictions.csv",
        "splits.csv",
        "config.toml",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    ok(&[&["evaluate"], &common[..]].concat());
    let v: Value =
        serde_json::from_str(&fs::read_to_string(out.join("evaluation.json")).unwrap()).unwrap();
    assert_eq!(v["matches_train_dump"], true);
    let (acc, (lo, hi), n) =
        ncd_cli::commands::score_dump(&out.join("evaluation_predictions.csv")).unwrap();
    assert_eq!(n, 30);
    assert!(lo <= acc && acc <= hi);

    let mismatch = [&["evaluate", "--symmetrisation", "average"], &common[..]].concat();
    assert_eq!(code(&mismatch), 2);
}

#[test]
fn tabular_config_trains_distance_knn() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("conn");
    ok(&[
        "train",
        "--config",
        s(&root().join("configs/conn.toml")),
        "--out",
        s(&out),
    ]);
    let v: Value =
        serde_json::from_str(&fs::read_to_string(out.join("grid.json")).unwrap()).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
    assert!(v["test_accuracy"].as_f64().unwrap() > 0.5);
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cfg");
    ok(&[
        "train",
        "--config",
        s(&root().join("configs/conn.toml")),
        "--out",
        s(&out),
        "--k",
        "1",
        "--seed",
        "3",
    ]);
    let cfg = ncd_cli::RunConfig::load(&out.join("config.toml")).unwrap();
    assert_eq!(cfg.model.k, vec![1]);
    assert_eq!(cfg.split.seed, 3);
    assert_eq!(cfg.split.folds, 3);
}
