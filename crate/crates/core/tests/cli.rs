use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sample_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_corpus")
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cta-cluster"))
        .args(args)
        .output()
        .expect("spawn cta-cluster")
}

fn corpus_arg() -> String {
    sample_corpus().display().to_string()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cli(&["run"]).status.code(), Some(1));
    assert_eq!(
        cli(&["run", &corpus_arg(), "--metric", "cosine"]).status.code(),
        Some(1)
    );
}

#[test]
fn config_errors_exit_1_before_writing() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    let r = cli(&[
        "run",
        &corpus_arg(),
        "--algo",
        "efficient",
        "--linkage",
        "centroid",
        "--out",
        o,
    ]);
    assert_eq!(r.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&r.stderr);
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(stderr.contains("centroid"));
    assert_eq!(std::fs::read_dir(out.path()).unwrap().count(), 0);

    let r = cli(&[
        "run",
        &corpus_arg(),
        "--algo",
        "kmeans",
        "--linkage",
        "ward",
        "--out",
        o,
    ]);
    assert_eq!(r.status.code(), Some(1));
    let r = cli(&["run", &corpus_arg(), "--max-df", "1.5", "--out", o]);
    assert_eq!(r.status.code(), Some(1));
    let r = cli(&[
        "run",
        &corpus_arg(),
        "--metric",
        "minkowski",
        "--minkowski-p",
        "0.5",
        "--out",
        o,
    ]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn ingest_errors_exit_2() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    assert_eq!(cli(&["run", "/definitely/not/here", "--out", o]).status.code(), Some(2));

    let bad = tempfile::tempdir().unwrap();
    std::fs::write(bad.path().join("a.txt"), b"ransomware \xff\xfe").unwrap();
    std::fs::write(bad.path().join("b.txt"), b"banking trojan").unwrap();
    let r = cli(&["run", bad.path().to_str().unwrap(), "--out", o]);
    assert_eq!(r.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(out.path()).unwrap().count(), 0);
}

#[test]
fn degenerate_clustering_exits_3_and_leaves_nothing() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    let r = cli(&["run", &corpus_arg(), "--algo", "kmeans", "--k", "12", "--out", o]);
    assert_eq!(r.status.code(), Some(3));
    assert_eq!(std::fs::read_dir(out.path()).unwrap().count(), 0);
}

#[test]
fn run_is_deterministic_and_groups_partition_the_corpus() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let r = cli(&["run", &corpus_arg(), "--seed", "3", "--out", d.path().to_str().unwrap()]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    for f in [
        "assignments.csv",
        "scores.csv",
        "elbow.csv",
        "dendrogram.json",
        "groups.csv",
        "top_terms.csv",
    ] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let scores = std::fs::read_to_string(a.path().join("scores.csv")).unwrap();
    assert!(scores.contains(",elbow,"), "{scores}");

    let groups = std::fs::read_to_string(a.path().join("groups.csv")).unwrap();
    let mut ids: Vec<&str> = groups.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    ids.sort();
    let before = ids.len();
    ids.dedup();
    assert_eq!(before, 12);
    assert_eq!(ids.len(), 12);

    let top = std::fs::read_to_string(a.path().join("top_terms.csv")).unwrap();
    assert!(top.starts_with("group_id,rank,term,weight\n"));
}

#[test]
fn manual_k_skips_the_elbow() {
    let out = tempfile::tempdir().unwrap();
    let r = cli(&[
        "run",
        &corpus_arg(),
        "--algo",
        "agnes",
        "--k",
        "3",
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert!(r.status.success());
    assert!(!out.path().join("elbow.csv").exists());
    assert!(out.path().join("dendrogram.json").exists());
    let scores = std::fs::read_to_string(out.path().join("scores.csv")).unwrap();
    assert!(scores.contains(",manual,"));
}

#[test]
fn json_format() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    let r = cli(&["run", &corpus_arg(), "--format", "json", "--cut", "3", "--out", o]);
    assert!(r.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("assignments.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 12);
    assert!(v[0]["doc_id"].is_string() && v[0]["cluster"].is_u64());
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("scores.json")).unwrap()).unwrap();
    assert_eq!(s[0]["n_clusters"], 3);
    assert!(!out.path().join("assignments.csv").exists());
}

#[test]
fn elbow_and_report_subcommands() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    let r = cli(&["elbow", &corpus_arg(), "--k-max", "8", "--out", o]);
    assert!(r.status.success());
    let elbow = std::fs::read_to_string(out.path().join("elbow.csv")).unwrap();
    assert!(elbow.starts_with("k,wcss\n"));
    assert_eq!(elbow.lines().count(), 9);

    let assignments = out.path().join("assignments.csv");
    let rows: String = (1..=4)
        .flat_map(|i| {
            [
                format!("heron-0{i},0\n"),
                format!("jackal-0{i},1\n"),
                format!("viper-0{i},2\n"),
            ]
        })
        .collect();
    std::fs::write(&assignments, format!("doc_id,cluster\n{rows}")).unwrap();
    let r = cli(&[
        "report",
        &corpus_arg(),
        "--assignments",
        assignments.to_str().unwrap(),
        "--out",
        o,
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let md = std::fs::read_to_string(out.path().join("groups.md")).unwrap();
    assert!(md.contains("Glass Heron") && md.contains("Silt Viper"));
    let groups = std::fs::read_to_string(out.path().join("groups.csv")).unwrap();
    assert!(groups.starts_with("group_id,doc_id,actor\n"));
    assert!(groups.contains("0,heron-01,Glass Heron"));
}

#[test]
fn grid_writes_csv_and_markdown() {
    let out = tempfile::tempdir().unwrap();
    let r = cli(&[
        "grid",
        &corpus_arg(),
        "--k",
        "3",
        "--jobs",
        "2",
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let csv = std::fs::read_to_string(out.path().join("grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 89);
    let md = std::fs::read_to_string(out.path().join("grid.md")).unwrap();
    assert_eq!(md.matches("| Combination |").count(), 4);
}
