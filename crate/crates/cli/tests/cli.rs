use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ringrep(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringrep"))
        .args(args)
        .env("RINGREP_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn table_json_and_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = ringrep(dir.path(), &["table", "--q", "2", "--r", "2", "--format", "json"]);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let table = stdout_json(&first);
    let degrees: Vec<u64> =
        table["irreducibles"].as_array().unwrap().iter().map(|i| i["degree"].as_u64().unwrap()).collect();
    assert_eq!(degrees.len(), 10);
    assert_eq!(degrees.iter().map(|d| d * d).sum::<u64>(), 48);
    assert_eq!(table["group"]["order"], 48);

    let cached = dir.path().join("sl2-q2-r2-v1.json");
    assert_eq!(serde_json::from_slice::<Value>(&fs::read(&cached).unwrap()).unwrap(), table);

    let second = ringrep(dir.path(), &["table", "--q", "2", "--r", "2", "--format", "json"]);
    assert_eq!(first.stdout, second.stdout);
    let fresh = ringrep(dir.path(), &["table", "--q", "2", "--r", "2", "--format", "json", "--no-cache"]);
    assert_eq!(code(&fresh), 0);
    assert_eq!(first.stdout, fresh.stdout);
    assert!(String::from_utf8_lossy(&fresh.stderr).contains("matches"));
}

#[test]
fn no_cache_reports_a_tampered_table() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ringrep(dir.path(), &["table", "--q", "2"])), 0);
    let cached = dir.path().join("sl2-q2-r2-v1.json");
    let tampered = fs::read_to_string(&cached).unwrap().replacen("\"size\": 1", "\"size\": 2", 1);
    fs::write(&cached, &tampered).unwrap();

    let o = ringrep(dir.path(), &["table", "--q", "2", "--no-cache"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    let diff: Value = serde_json::from_str(&err[err.find('{').unwrap()..]).unwrap();
    assert_eq!(diff["mismatches"][0]["differences"][0]["path"], "/classes/0/size");
    // The comparison mode never writes.
    assert_eq!(fs::read_to_string(&cached).unwrap(), tampered);

    // A normal run rejects the stored table, recomputes and repairs it.
    assert_eq!(code(&ringrep(dir.path(), &["table", "--q", "2"])), 0);
    assert_eq!(code(&ringrep(dir.path(), &["table", "--q", "2", "--no-cache"])), 0);
}

#[test]
fn verify_dims_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let even = ringrep(dir.path(), &["verify-dims", "--q", "2"]);
    assert_eq!(code(&even), 0);
    assert!(!String::from_utf8_lossy(&even.stdout).contains("MISMATCH"));

    let odd = ringrep(dir.path(), &["verify-dims", "--q", "3", "--format", "json"]);
    assert_eq!(code(&odd), 1);
    let rep = stdout_json(&odd);
    assert_eq!(rep["sum_of_squares"], 648);
    let bad: Vec<&Value> = rep["rows"].as_array().unwrap().iter().filter(|r| r["status"] != "pass").collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(
        (&bad[0]["label"], &bad[0]["expected"], &bad[0]["computed"]),
        (&"(q^2-1)/2".into(), &6.into(), &12.into())
    );
    assert!(String::from_utf8_lossy(&odd.stderr).contains("\"mismatches\""));

    let waived = ringrep(dir.path(), &["verify-dims", "--q", "3", "--expect-table-erratum", "--format", "csv"]);
    assert_eq!(code(&waived), 0);
    assert!(String::from_utf8_lossy(&waived.stderr).starts_with("warning:"));
    let csv = String::from_utf8(waived.stdout).unwrap();
    assert!(csv.starts_with("label,degree,expected,computed,status\n"));
    assert!(csv.contains("(q^2-1)/2,4,6,12,mismatch"));
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["table", "--q", "4"][..],
        &["table", "--q", "2", "--r", "4"],
        &["table", "--q", "2", "--n", "4"],
        &["frobnicate"],
        &["table", "--q", "2", "--n", "3", "--r", "3"],
        &["dl", "--q", "3", "--variety", "xtil", "--omega", "99"],
        &["span", "--q", "2", "--format", "csv"],
        &["dl", "--q", "3", "--variety", "nope"],
    ] {
        let o = ringrep(dir.path(), args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn lemmas_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["lemmas", "--n", "3", "--q", "2", "--r", "3", "--trials", "200", "--format", "json"];
    let a = ringrep(dir.path(), &args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, ringrep(dir.path(), &args).stdout);
    let rep = stdout_json(&a);
    assert_eq!(rep["suite"]["seed"], 42);
    assert_eq!(rep["uniqueness"]["pass"], true);
    let other = ringrep(dir.path(), &["lemmas", "--trials", "200", "--seed", "7", "--format", "json"]);
    assert_eq!(stdout_json(&other)["suite"]["seed"], 7);
}

#[test]
fn dl_reports_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let xtil = ringrep(dir.path(), &["dl", "--q", "3", "--variety", "xtil", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&xtil), 0);
    let rep: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    let pieces = rep["varieties"][0]["pieces"].as_array().unwrap();
    assert_eq!(pieces.len(), 6);
    assert!(pieces.iter().all(|p| p["virtual_degree"] == 12));

    let prime = ringrep(dir.path(), &["dl", "--q", "3", "--variety", "xtil-prime"]);
    assert_eq!(code(&prime), 1);
    assert!(String::from_utf8_lossy(&prime.stdout).contains("FAIL"));
}

#[test]
fn gram_span_flags_at_two() {
    let dir = tempfile::tempdir().unwrap();
    let gram = ringrep(dir.path(), &["gram", "--q", "2", "--format", "json"]);
    assert_eq!(code(&gram), 0);
    let rep = stdout_json(&gram);
    assert_eq!(rep["nonequivalent_pairs"], 32);
    assert_eq!(rep["nonorthogonal"].as_array().unwrap().len(), 0);

    let span = ringrep(dir.path(), &["span", "--q", "2", "--format", "json"]);
    assert_eq!(code(&span), 0);
    assert_eq!(stdout_json(&span)["family_size"], 10);

    let flags = ringrep(dir.path(), &["flags", "--q", "2", "--m", "2", "--format", "json"]);
    assert_eq!(code(&flags), 0);
    let f = stdout_json(&flags);
    let total = f["same"].as_u64().unwrap() + f["close"].as_u64().unwrap() + f["transverse"].as_u64().unwrap();
    assert_eq!(f["lines"].as_u64().unwrap(), total);
}

#[test]
fn default_cache_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ringrep"))
        .args(["table", "--q", "2", "--r", "1"])
        .env_remove("RINGREP_CACHE_DIR")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join(".ringrep-cache").join("sl2-q2-r1-v1.json").is_file());
}
