use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcfl")).args(args).env_remove("HCFL_CACHE_DIR").output().unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn example() -> String {
    corpus("f3_example/f3-example-00.json").to_string_lossy().into_owned()
}

#[test]
fn zeta_of_the_worked_example() {
    let out = run(&["zeta", "--curve", &example(), "--n", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &records(&out)[0];
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["command"], "zeta");
    assert_eq!(r["point_count"], 2);
    assert_eq!(r["jacobian_order"], 5);
    assert_eq!(r["numerator"], serde_json::json!([1, -2, 3, -6, 9]));
}

#[test]
fn recover_the_worked_example() {
    let out = run(&["recover", "--curve", &example(), "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out)[0];
    assert_eq!(r["passed"], true);
    assert_eq!(r["recovered"].as_array().unwrap().len(), 2);
    assert_eq!(r["recovered"], r["expected"]);
}

#[test]
fn bundle_file_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("bundle.json");
    let out = run(&["recover", "--curve", &example(), "--n", "2", "--bundle-out", b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let expected = records(&out)[0]["expected"].clone();

    let again = run(&["recover", "--bundle", b.to_str().unwrap(), "--degree-one-only"]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(records(&again)[0]["recovered"], expected);

    let mut bundle: Value = serde_json::from_str(&std::fs::read_to_string(&b).unwrap()).unwrap();
    let c = &mut bundle["entries"][1]["coeffs"][1]["coeffs"][0];
    *c = Value::from(c.as_i64().unwrap() + 1);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, bundle.to_string()).unwrap();
    let out = run(&["recover", "--bundle", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(run(&["zeta"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["zeta", "--curve", "/nonexistent/curve.json"]).status.code(), Some(2));
    assert_eq!(run(&["zeta", "--curve", &example(), "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["--law", "nope", "zeta", "--curve", &example()]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let singular = dir.path().join("s.json");
    std::fs::write(&singular, r#"{"p":3,"a":1,"f":[1,1,0,0,0,1]}"#).unwrap();
    assert_eq!(run(&["zeta", "--curve", singular.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

fn digest(out: &Output) -> String {
    hex::encode(Sha256::digest(&out.stdout))
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let curve = corpus("genus2/g2-f3-00.json");
    let c = curve.to_str().unwrap();
    for args in [
        vec!["census", "--curve", c, "--n", "2"],
        vec!["lfun", "--curve", c, "--n", "2", "--all-chars"],
        vec!["recover", "--curve", c, "--n", "2"],
    ] {
        let one = run(&[&["--workers", "1"], &args[..]].concat());
        let many = run(&[&["--workers", "4"], &args[..]].concat());
        assert_eq!(one.status.code(), Some(0), "{args:?}");
        assert_eq!(digest(&one), digest(&many), "{args:?}");
    }
}

#[test]
fn cached_census_equals_fresh_census() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let curve = corpus("genus2/g2-f3-01.json");
    let c = curve.to_str().unwrap();
    let fresh = run(&["--no-cache", "census", "--curve", c, "--n", "2"]);
    let cold = run(&["--cache-dir", cache.to_str().unwrap(), "census", "--curve", c, "--n", "2"]);
    let warm = run(&["--cache-dir", cache.to_str().unwrap(), "census", "--curve", c, "--n", "2"]);
    assert!(std::fs::read_dir(&cache).unwrap().count() > 0);
    assert_eq!(fresh.stdout, cold.stdout);
    assert_eq!(fresh.stdout, warm.stdout);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.jsonl");
    let printed = run(&["zeta", "--curve", &example(), "--n", "2"]);
    let written = run(&["-o", path.to_str().unwrap(), "zeta", "--curve", &example(), "--n", "2"]);
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), printed.stdout);
}

#[test]
fn laws_and_methods_are_selectable() {
    let curve = corpus("genus2/g2-f3-00.json");
    let c = curve.to_str().unwrap();
    let base = run(&["lfun", "--curve", c, "--n", "1", "--all-chars"]);
    let euler = run(&["--method", "euler-product", "lfun", "--curve", c, "--n", "1", "--all-chars"]);
    assert_eq!(euler.status.code(), Some(0));
    let without_method = |o: &Output| {
        let mut v = records(o);
        for r in v.iter_mut() {
            r.as_object_mut().unwrap().remove("method");
        }
        v
    };
    assert_eq!(without_method(&base), without_method(&euler));
    // generators may differ between laws, so compare the multiset of L-polynomials
    let cantor = run(&["--law", "cantor", "lfun", "--curve", c, "--n", "1", "--all-chars"]);
    assert_eq!(cantor.status.code(), Some(0), "{}", String::from_utf8_lossy(&cantor.stderr));
    let polys = |o: &Output| {
        let mut v: Vec<String> = records(o).iter().map(|r| r["coeffs"].to_string()).collect();
        v.sort();
        v
    };
    assert_eq!(polys(&base), polys(&cantor));
}
