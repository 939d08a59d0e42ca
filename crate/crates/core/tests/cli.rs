//! Exit-code contract of the `projektor` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_projektor");

fn spec(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("PROJEKTOR_LOG", "quiet").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn generate(dir: &Path, domain: &str, spec_name: &str, count: usize) -> PathBuf {
    let out = dir.join(format!("{domain}.jsonl"));
    let o = out.to_string_lossy();
    let r = run(&["generate", "--domain", domain, "--spec", &spec(spec_name), "--count", &count.to_string(), "--seed", "3", "--out", &o]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    out
}

#[test]
fn generate_writes_one_line_per_scene() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "glyph", "letters.json", 10);
    assert_eq!(std::fs::read_to_string(data).unwrap().lines().count(), 10);
}

#[test]
fn interpret_bench_and_render_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "glyph", "ak_overlap.json", 3);
    let d = data.to_string_lossy();
    let report = path(dir.path(), "report.jsonl");
    assert_eq!(code(&run(&["interpret", "--dataset", &d, "--out", &report])), 0);
    assert_eq!(std::fs::read_to_string(&report).unwrap().lines().count(), 3);
    let bench = path(dir.path(), "bench.json");
    assert_eq!(code(&run(&["bench", "--dataset", &d, "--mode", "bottomup", "--seed", "0", "--out", &bench])), 0);
    let parsed: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&bench).unwrap()).unwrap();
    assert!(parsed["metrics"]["exact_match"].is_number());
    let svg = path(dir.path(), "svg");
    assert_eq!(code(&run(&["render", "--dataset", &d, "--report", &report, "--out", &svg])), 0);
    assert_eq!(std::fs::read_dir(&svg).unwrap().count(), 3);
}

#[test]
fn oracle_check_reports_counts() {
    let out = run(&["oracle-check", "--instances", "0"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 checked"));
    let out = run(&["oracle-check", "--instances", "10", "--seed", "4"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("10 checked, 0 mismatches"));
}

#[test]
fn corrupted_search_is_an_invariant_violation() {
    let out = run(&["oracle-check", "--instances", "30", "--corrupt-beam"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "out.jsonl");
    assert_eq!(code(&run(&["interpret", "--dataset", &path(dir.path(), "absent.jsonl"), "--out", &out])), 2);
    assert_eq!(code(&run(&["interpret", "--bogus"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);

    let malformed = dir.path().join("bad.jsonl");
    std::fs::write(&malformed, "{\"index\": 0}\n").unwrap();
    let r = run(&["interpret", "--dataset", &malformed.to_string_lossy(), "--out", &out]);
    assert_eq!(code(&r), 2);
    assert!(stderr(&r).contains("bad.jsonl:1"), "{}", stderr(&r));

    let q = dir.path().join("q.json");
    std::fs::write(&q, r#"{"letters":[{"letter":"Q","x":1,"y":1}],"extent":[5,5]}"#).unwrap();
    let r = run(&["generate", "--domain", "glyph", "--spec", &q.to_string_lossy(), "--count", "1", "--seed", "0", "--out", &out]);
    assert_eq!(code(&r), 2);

    let bad_noise = dir.path().join("noise.json");
    std::fs::write(&bad_noise, r#"{"dropout": 1.5}"#).unwrap();
    let r = run(&[
        "generate", "--domain", "glyph", "--spec", &spec("letters.json"), "--noise", &bad_noise.to_string_lossy(),
        "--count", "1", "--seed", "0", "--out", &out,
    ]);
    assert_eq!(code(&r), 2);

    let r = Command::new(BIN).args(["oracle-check", "--instances", "1"]).env("PROJEKTOR_LOG", "loud").output().unwrap();
    assert_eq!(code(&r), 2);
}

#[test]
fn bench_requires_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "glyph", "letters.json", 2);
    let stripped: String = std::fs::read_to_string(&data)
        .unwrap()
        .lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
            v.as_object_mut().unwrap().remove("truth");
            format!("{v}\n")
        })
        .collect();
    let bare = dir.path().join("bare.jsonl");
    std::fs::write(&bare, stripped).unwrap();
    let r = run(&["bench", "--dataset", &bare.to_string_lossy(), "--seed", "0", "--out", &path(dir.path(), "b.json")]);
    assert_eq!(code(&r), 2, "{}", stderr(&r));
}

#[test]
fn domain_mismatches_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let streams = generate(dir.path(), "temporal", "streams.json", 2);
    let glyph_models = path(dir.path(), "glyph-models");
    assert_eq!(code(&run(&["library", "--domain", "glyph", "--out", &glyph_models])), 0);
    assert!(std::fs::read_dir(&glyph_models).unwrap().count() >= 11);
    let r = run(&[
        "interpret", "--dataset", &streams.to_string_lossy(), "--registry", &glyph_models, "--out", &path(dir.path(), "r.jsonl"),
    ]);
    assert_eq!(code(&r), 3, "{}", stderr(&r));
}

#[test]
fn rendering_streams_is_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let streams = generate(dir.path(), "temporal", "streams.json", 1);
    let s = streams.to_string_lossy();
    let report = path(dir.path(), "r.jsonl");
    assert_eq!(code(&run(&["interpret", "--dataset", &s, "--out", &report])), 0);
    let r = run(&["render", "--dataset", &s, "--report", &report, "--out", &path(dir.path(), "svg")]);
    assert_eq!(code(&r), 2);
    assert!(stderr(&r).contains("render unsupported for domain temporal"), "{}", stderr(&r));
}
