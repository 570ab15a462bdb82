use std::fs;
use std::path::{Path, PathBuf};

use ugv::classify::ClassificationReport;
use ugv::cli::{run, to_canonical_json, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};

fn ugv(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["ugv".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn class_groups() {
    let (code, out, _) = ugv(&["--disc", "-15", "class-group"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("h = 2"));
    let (_, out, _) = ugv(&["--disc", "-21", "class-group"]);
    assert!(out.contains("h = 4") && out.contains("exponent = 2"));
    let (_, out, _) = ugv(&["--disc", "-1", "class-group"]);
    assert!(out.contains("h = 1"));
    // D or d
    let (_, a, _) = ugv(&["--disc", "-20", "class-group", "--out", "json"]);
    let (_, b, _) = ugv(&["--disc", "-5", "class-group", "--out", "json"]);
    assert_eq!(a, b);
}

#[test]
fn usage_errors() {
    assert_eq!(ugv(&["--disc", "5", "class-group"]).0, EXIT_USAGE);
    assert_eq!(ugv(&["--disc", "-15", "frobnicate"]).0, EXIT_USAGE);
    assert_eq!(ugv(&["class-group"]).0, EXIT_USAGE);
    assert_eq!(ugv(&["--disc", "-15", "--steinitz", "7,1", "perfect"]).0, EXIT_USAGE);
    assert_eq!(ugv(&["--help"]).0, EXIT_OK);
}

#[test]
fn perfect_forms_of_l1() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let (code, out, _) = ugv(&["--disc", "-15", "--steinitz", "2,1", "perfect", "--dot", dot.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("perfect forms: 1"));
    assert!(out.contains("C3:C4"));
    assert!(fs::read_to_string(dot).unwrap().starts_with("graph"));
}

#[test]
fn golden_files() {
    for (args, file) in [
        (vec!["--disc", "-15", "class-group"], "class_group_-15.json"),
        (vec!["--disc", "-21", "class-group"], "class_group_-21.json"),
        (vec!["--disc", "-15", "classes"], "classes_-15_principal.json"),
        (vec!["--disc", "-15", "max-finite"], "max_finite_-15_principal.json"),
        (vec!["--disc", "-15", "--steinitz", "p2,1", "max-finite"], "max_finite_-15_p2,1.json"),
        (vec!["--disc", "-15", "compare"], "compare_-15.json"),
    ] {
        let g = golden(file);
        let mut a = args.clone();
        a.extend(["--expect", g.to_str().unwrap()]);
        let (code, _, err) = ugv(&a);
        assert_eq!(code, EXIT_OK, "{file}: {err}");
    }
}

#[test]
fn mismatch_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"class_number\": 3}").unwrap();
    let (code, _, err) = ugv(&["--disc", "-15", "class-group", "--expect", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_MISMATCH);
    assert!(err.contains("mismatch"));
}

#[test]
fn report_round_trips() {
    let (_, out, _) = ugv(&["--disc", "-15", "--steinitz", "p2,1", "max-finite", "--out", "json"]);
    let r: ClassificationReport = serde_json::from_str(&out).unwrap();
    assert_eq!(to_canonical_json(&r).unwrap(), out);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(to_canonical_json(&v).unwrap(), out);
}

#[test]
fn jobs_do_not_change_output() {
    let one = ugv(&["--disc", "-15", "max-finite", "--out", "json", "--jobs", "1"]);
    let four = ugv(&["--disc", "-15", "max-finite", "--out", "json", "--jobs", "4"]);
    assert_eq!(one.0, EXIT_OK);
    assert_eq!(one.1, four.1);
    let seeded = ugv(&["--disc", "-15", "max-finite", "--out", "json", "--seed", "5"]);
    assert_eq!(one.1, seeded.1);
}

#[test]
fn cache_is_used_and_versioned() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().to_str().unwrap();
    let first = ugv(&["--disc", "-15", "max-finite", "--out", "json", "--cache", c, "-v"]);
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1, "exactly one entry and no temporary files");
    let second = ugv(&["--disc", "-15", "max-finite", "--out", "json", "--cache", c, "-v"]);
    assert!(second.2.contains("cache hit"));
    assert_eq!(first.1, second.1);
    // a foreign version is recomputed, not trusted
    let text = fs::read_to_string(&files[0]).unwrap().replacen("\"cache_version\": 1", "\"cache_version\": 999", 1);
    fs::write(&files[0], text).unwrap();
    let third = ugv(&["--disc", "-15", "max-finite", "--out", "json", "--cache", c]);
    assert!(third.2.contains("recomputing"));
    assert_eq!(first.1, third.1);
}
