use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run_with(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tensorank"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary runs");
    // commands that ignore standard input may exit before it is written
    if let Err(e) = child.stdin.take().unwrap().write_all(stdin.as_bytes()) {
        assert_eq!(e.kind(), std::io::ErrorKind::BrokenPipe, "{e}");
    }
    child.wait_with_output().unwrap()
}

fn run(args: &[&str], stdin: &str) -> Output {
    run_with(args, stdin, &[])
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn make(state: &str) -> String {
    stdout(&run(&["make", "--state", state], ""))
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares with the checked-in file; `TENSORANK_BLESS=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("TENSORANK_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

#[test]
fn made_states_match_golden_files() {
    check_golden("make_w3.json", &make("w:3"));
    check_golden("make_ghz_2_3.json", &make("ghz:2,3"));
    check_golden("make_wkron2.json", &make("wkron2"));
}

#[test]
fn rank_of_w3_through_a_pipe_is_exactly_three() {
    let out = run(&["rank"], &make("w:3"));
    let v = json(&out);
    assert_eq!(v["exact"], 3);
    check_golden("rank_w3.json", &stdout(&out));
}

#[test]
fn rank_report_of_wkron2_is_seven_and_reverifies() {
    let t = make("wkron2");
    let out = run(&["rank", "--exact"], &t);
    let v = json(&out);
    assert_eq!((v["lower"].clone(), v["upper"].clone(), v["exact"].clone()), (7.into(), 7.into(), 7.into()));
    let report = tensorank::io::report_from_value(&v).unwrap();
    let tensor = tensorank::io::parse_tensor(&t).unwrap().to_exact(1);
    report.verify(&tensor).unwrap();
    check_golden("rank_wkron2.json", &stdout(&out));
}

#[test]
fn genrank_of_333_is_five() {
    let out = run(&["genrank", "--shape", "3,3,3", "--seed", "7"], "");
    assert_eq!(json(&out)["r_gen"], 5);
    check_golden("genrank_333_seed7.json", &stdout(&out));
}

#[test]
fn pencil_reports_structure() {
    let out = run(&["pencil"], &make("w:3"));
    let v = json(&out);
    assert_eq!((v["rank"].clone(), v["certificate"].clone(), v["class"].clone()), (3.into(), "regular".into(), "w-class".into()));
    check_golden("pencil_w3.json", &stdout(&out));
    let ghz = json(&run(&["pencil"], &make("ghz:2,3")));
    assert_eq!(ghz["rank"], 2);
    assert_eq!(ghz["structure"]["multiple_root_count"], 0);
}

#[test]
fn domset_and_tables_match_golden_files() {
    let out = run(&["domset", "--shape", "3,3,3"], "");
    let v = json(&out);
    assert_eq!(v["dominating"]["verified"], true);
    assert_eq!(v["separated"]["verified"], true);
    assert_eq!(v["chain"]["holds"], true);
    check_golden("domset_333.json", &stdout(&out));
    check_golden("tables.tsv", &stdout(&run(&["tables", "--format", "tsv"], "")));
}

#[test]
fn norms_normalize_with_a_warning() {
    let out = run(&["norms", "--spectral", "--nuclear", "--eta"], &make("w:3"));
    let stderr = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(stderr.contains("warning"), "{stderr}");
    let v = json(&out);
    assert!((v["spectral"]["value"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-8);
    assert!((v["nuclear"]["value"].as_f64().unwrap() - 1.5).abs() < 1e-4);
    assert!(v["nuclear"]["gap"].as_f64().unwrap() < 1e-4);
    assert!((v["eta"]["value"].as_f64().unwrap() - (9f64 / 4.0).log2()).abs() < 1e-6);
    let dual = tensorank::io::tensor_from_value(&v["nuclear"]["dual_witness"]).unwrap();
    assert_eq!(dual.shape().dims(), [2, 2, 2]);
}

#[test]
fn equal_seeds_give_identical_bytes() {
    let t = make("ghz:2,3");
    for args in [vec!["norms"], vec!["rank"], vec!["genrank", "--shape", "2,3,4"]] {
        let a = run(&args, &t);
        let b = run_with(&args, &t, &[("TENSORANK_THREADS", "2")]);
        assert_eq!(stdout(&a), stdout(&b), "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"], "").status.code(), Some(2));
    assert_eq!(run(&["make", "--state", "nosuch"], "").status.code(), Some(2));
    let bad = run(&["rank"], "{\"shape\":[2],\"entries\":[[1,0]]}");
    assert_eq!(bad.status.code(), Some(3));
    let diag: Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_eq!(diag["error"], "malformed-input");
    assert_eq!(run(&["pencil", "--in", "/nonexistent/t.json"], "").status.code(), Some(3));
    assert_eq!(run(&["genrank", "--shape", "40,40,40,40,40"], "").status.code(), Some(4));
    assert_eq!(run(&["pencil"], &make("ghz:3,3")).status.code(), Some(1));
}

#[test]
fn formats() {
    let tsv = stdout(&run(&["make", "--state", "w:3", "--format", "tsv"], ""));
    assert_eq!(tsv.lines().next(), Some("index\tre\tim"));
    assert!(tsv.contains("1,1,2\t1\t0"));
    let pretty = stdout(&run(&["genrank", "--shape", "2,2,2", "--format", "pretty"], ""));
    let compact = stdout(&run(&["genrank", "--shape", "2,2,2"], ""));
    assert_eq!(serde_json::from_str::<Value>(&pretty).unwrap(), serde_json::from_str::<Value>(&compact).unwrap());
    let rows = stdout(&run(&["rank", "--format", "tsv"], &make("w:3")));
    assert!(rows.lines().any(|l| l == "exact\t3"), "{rows}");
}

#[test]
fn polynomial_files_and_normalized_states() {
    let dir = std::env::temp_dir().join(format!("tensorank-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("w3.json");
    std::fs::write(&file, r#"{"d":3,"n":2,"coeffs":{"2,1":[1,0]}}"#).unwrap();
    let from_poly = make(&format!("poly:{}", file.display()));
    assert_eq!(from_poly, make("w:3"));
    std::fs::remove_dir_all(&dir).unwrap();
    let unit = json(&run(&["make", "--state", "w:3", "--normalize"], ""));
    let t = tensorank::io::tensor_from_value(&unit).unwrap().to_c64();
    assert!((t.frobenius_norm() - 1.0).abs() < 1e-15);
}

#[test]
fn floating_input_is_rationalized_for_exact_commands() {
    let out = run(&["pencil"], r#"{"shape":[2,2,2],"entries":[[0,0],[0.5,0],[0.5,0],[0,0],[0.5,0],[0,0],[0,0],[0,0]]}"#);
    assert_eq!(json(&out)["rank"], 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("rationals"));
}
