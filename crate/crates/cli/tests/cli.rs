use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use opmod::report::{read_csv, Report};

fn opmod(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opmod"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn strip_header(json: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    v.as_object_mut().unwrap().remove("header");
    v
}

#[test]
fn doi_check_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = opmod(dir.path(), &["doi-check", "--n", "8", "--trials", "20", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = Report::load(&dir.path().join("doi-check.json")).unwrap();
    assert_eq!(r.records.len(), 20);
    assert!(r.records.iter().all(|x| x.lhs <= x.rhs));
    assert!(r.inconsistent_records().is_empty());
}

#[test]
fn toral_lambda_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = opmod(dir.path(), &["multnorm", "--builtin", "toral-lambda", "--n", "4", "--tol", "1e-5"]);
    assert_eq!(code(&o), 0);
    let r = Report::load(&dir.path().join("multnorm.json")).unwrap();
    assert!((r.records[0].lhs - 1.0).abs() < 1e-4);
}

#[test]
fn entropy_example_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = opmod(dir.path(), &["entropy", "--intervals", "0,1", "--eps", "0.1"]);
    assert_eq!(code(&o), 0);
    let r = Report::load(&dir.path().join("entropy.json")).unwrap();
    assert_eq!(r.records[0].param_f64("cardinality"), Some(5.0));
    let csv = read_csv(&fs::read_to_string(dir.path().join("entropy.csv")).unwrap()).unwrap();
    assert_eq!(csv, r.records);
    let tsv = fs::read_to_string(dir.path().join("entropy.tsv")).unwrap();
    assert!(tsv.starts_with("x\ty\n"));
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["entropy", "--intervals", "1,0", "--eps", "0.1"][..],
        &["entropy", "--intervals", "0,1", "--eps", "-1"],
        &["hatnorm", "--function", "nope"],
        &["kato", "--kmin", "5", "--kmax", "2"],
        &["multnorm", "--builtin", "unknown"],
        &["omega-lower", "--deltas", "2"],
    ] {
        let o = opmod(dir.path(), args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert!(!dir.path().join("entropy.json").exists());
}

#[test]
fn reruns_are_byte_identical_modulo_header() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["qcom", "--function", "linear:2", "--n", "5", "--trials", "3", "--seed", "9"];
    assert_eq!(code(&opmod(a.path(), &args)), 0);
    assert_eq!(code(&opmod(b.path(), &args)), 0);
    let ja = fs::read_to_string(a.path().join("qcom.json")).unwrap();
    let jb = fs::read_to_string(b.path().join("qcom.json")).unwrap();
    assert_eq!(strip_header(&ja), strip_header(&jb));
    let body = |s: &str| s.split_once("\"tool_version\"").unwrap().1.to_string();
    assert_eq!(body(&ja), body(&jb));
    assert_eq!(fs::read(a.path().join("qcom.csv")).unwrap(), fs::read(b.path().join("qcom.csv")).unwrap());
}

#[test]
fn jobs_do_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["lacunary-search", "--max-level", "2", "--trials", "3"];
    assert_eq!(code(&opmod(a.path(), &[&args[..], &["--jobs", "1"]].concat())), 0);
    assert_eq!(code(&opmod(b.path(), &[&args[..], &["--jobs", "2"]].concat())), 0);
    assert_eq!(
        fs::read(a.path().join("lacunary-search.csv")).unwrap(),
        fs::read(b.path().join("lacunary-search.csv")).unwrap()
    );
}

#[test]
fn report_aggregates_and_flags_bad_ratios() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&opmod(dir.path(), &["logn", "--sizes", "4,8"])), 0);
    assert_eq!(code(&opmod(dir.path(), &["sampling", "--kind", "circle", "--degree", "3"])), 0);
    let agg = dir.path().join("agg");
    let inputs = [dir.path().join("logn.json"), dir.path().join("sampling.json")];
    let o = Command::new(env!("CARGO_BIN_EXE_opmod"))
        .arg("report")
        .args(&inputs)
        .arg("--out")
        .arg(&agg)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let r = Report::load(&agg.join("report.json")).unwrap();
    assert_eq!(r.records.len(), 2 + 20);
    assert!(r.inconsistent_records().is_empty());

    let mut bad = Report::load(&inputs[0]).unwrap();
    bad.records[0].ratio = Some(123.0);
    let bad_path = dir.path().join("bad.json");
    fs::write(&bad_path, bad.to_json().unwrap()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_opmod"))
        .args(["report", bad_path.to_str().unwrap(), "--out"])
        .arg(&agg)
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["hatnorm", "--function", "fa:1"][..],
        &["omega-lower"],
        &["omega-upper"],
        &["kato", "--kmin", "3", "--kmax", "6"],
        &["concave-bounds"],
        &["sampling"],
        &["multnorm", "--builtin", "hilbert", "--n", "8"],
        &["multnorm", "--builtin", "diffquot", "--function", "abs", "--points", "-1,-0.5,0.5,1"],
        &["multnorm", "--builtin", "geometric", "--n", "4"],
    ] {
        let o = opmod(dir.path(), args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    for entry in fs::read_dir(dir.path()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "json") {
            assert!(Report::load(&p).unwrap().inconsistent_records().is_empty(), "{}", p.display());
        }
    }
}
