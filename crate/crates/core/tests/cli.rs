use std::path::PathBuf;

use upbell::cli::{parse_angle, run, CommandResult};

fn upbell(args: &[&str]) -> CommandResult {
    run(std::iter::once("upbell").chain(args.iter().copied()))
}

fn machine(args: &[&str]) -> Vec<(String, String)> {
    let mut full = vec!["--format", "machine"];
    full.extend_from_slice(args);
    let r = upbell(&full);
    assert_eq!(r.status, 0, "{}", r.stderr);
    r.stdout
        .lines()
        .filter_map(|l| l.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

fn value(kv: &[(String, String)], key: &str) -> String {
    kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone()).unwrap_or_default()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("upbell-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_catalog_sets() {
    assert_eq!(upbell(&["classify", "catalog:shifts"]).stdout, "UPB\n");
    assert_eq!(upbell(&["classify", "catalog:nwe3"]).stdout, "FullBasis\n");
    let kv = machine(&["classify", "catalog:shifts_minus"]);
    assert_eq!(value(&kv, "kind"), "CompletableToFullBasis");
    assert_eq!(value(&kv, "completion").split(',').count(), 5);
}

#[test]
fn build_writes_a_readable_file() {
    let out = scratch("shifts.bell");
    let r = upbell(&["build", "catalog:shifts", "-o", out.to_str().unwrap()]);
    assert_eq!(r.status, 0);
    assert_eq!(r.stdout, "p(000|000) + p(110|011) + p(011|101) + p(101|110) ≤ 1\n");
    let path = out.to_str().unwrap();
    assert_eq!(value(&machine(&["cbound", path]), "bound"), "1/1");
    assert_eq!(value(&machine(&["nsmax", path]), "value"), "4/3");
}

#[test]
fn weighted_build() {
    let r = upbell(&["--format", "machine", "build", "catalog:shifts", "--weights", "1,1/2,1/3,1/4"]);
    assert!(r.stdout.starts_with("bell n=3 m=2,2,2 bound=1/1\n1/1 000|000\n1/2 110|011\n"));
}

#[test]
fn expectations_set_the_exit_status() {
    assert_eq!(upbell(&["nsmax", "catalog:shifts", "--expect", "4/3"]).status, 0);
    let r = upbell(&["nsmax", "catalog:shifts", "--expect", "3/2"]);
    assert_eq!(r.status, 2);
    assert!(r.stderr.contains("expected 3/2"));
    assert_eq!(upbell(&["tight", "catalog:u10", "--expect", "NotTight"]).status, 0);
    assert_eq!(upbell(&["tight", "catalog:u10", "--expect", "Tight"]).status, 2);
    assert_eq!(upbell(&["classify", "catalog:shifts", "--expect", "upb"]).status, 0);
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(upbell(&["classify", "/nonexistent/file.pvs"]).status, 1);
    assert_eq!(upbell(&["classify", "catalog:nope"]).status, 1);
    assert_eq!(upbell(&["frobnicate"]).status, 1);
    assert_eq!(upbell(&["extend", "catalog:shifts", "--method", "m2"]).status, 1);
    let help = upbell(&["--help"]);
    assert_eq!(help.status, 0);
    assert!(help.stdout.contains("Usage"));
}

#[test]
fn bound_mismatch_in_a_file_is_a_verification_failure() {
    let path = scratch("bad.bell");
    std::fs::write(&path, "bell n=2 m=2,2 bound=2/1\n1/1 00|00\n").unwrap();
    assert_eq!(upbell(&["cbound", path.to_str().unwrap()]).status, 2);
}

#[test]
fn extend_and_round_trip() {
    let out = scratch("u4.pvs");
    let r = upbell(&["extend", "catalog:shifts", "--method", "lift", "-o", out.to_str().unwrap()]);
    assert_eq!(r.status, 0, "{}", r.stderr);
    let kv = machine(&["classify", out.to_str().unwrap()]);
    assert_eq!(value(&kv, "kind"), "UPB");
    assert_eq!(value(&kv, "vectors"), "12");
    let r = upbell(&["extend", "catalog:u1", "--method", "m2", "--party", "2"]);
    assert_eq!(r.status, 0);
    assert_eq!(r.stdout.split_whitespace().count(), 18);
}

#[test]
fn witness_and_state() {
    let kv = machine(&["witness", "catalog:shifts"]);
    assert_eq!(value(&kv, "valid"), "true");
    assert_eq!(value(&kv, "entangled"), "true");
    let v: f64 = value(&kv, "value").parse().unwrap();
    assert!((v - 7.0 / 6.0).abs() < 1e-9);
    let kv = machine(&["state", "catalog:shifts"]);
    assert_eq!(value(&kv, "ppt"), "true");
    assert_eq!(value(&kv, "rank"), "4");
}

#[test]
fn quantum_bound_equals_classical_bound() {
    let kv = machine(&["qbound", "catalog:u5", "--angles", "0,pi/4,3pi/8"]);
    let top: f64 = value(&kv, "max_eigenvalue").parse().unwrap();
    assert!((top - 1.0).abs() < 1e-9);
    let kv = machine(&["--seed", "7", "qbound", "catalog:gyni4", "--random"]);
    let top: f64 = value(&kv, "max_eigenvalue").parse().unwrap();
    assert!((top - 1.0).abs() < 1e-9);
}

#[test]
fn gyni_commands() {
    assert_eq!(upbell(&["gyni", "3", "--vectors"]).stdout, "000 1ēe e1ē ēe1\n");
    let kv = machine(&["gyni", "5", "--certify"]);
    assert_eq!(value(&kv, "verdict"), "Tight");
    assert_eq!(value(&kv, "certified"), "512");
    let r = upbell(&["gyni", "3", "--certify", "--strategy", "[100]"]);
    assert_eq!(r.status, 0);
    assert!(r.stdout.lines().last().unwrap().ends_with("[111]"));
    assert_eq!(upbell(&["gyni", "3", "--certify", "--strategy", "[i0i]"]).status, 1);
}

#[test]
fn catalog_and_search() {
    let list = upbell(&["catalog", "list"]);
    assert!(list.stdout.lines().any(|l| l.starts_with("t3_3")));
    let pvs = upbell(&["catalog", "get", "shifts", "--pvs"]);
    assert!(pvs.stdout.starts_with("pvs n=3 m=2,2,2\n"));
    let kv = machine(&["search", "--n", "3", "--size", "4"]);
    assert_eq!(value(&kv, "count"), "1");
}

#[test]
fn angles() {
    let pi = std::f64::consts::PI;
    assert_eq!(parse_angle("0").unwrap(), 0.0);
    assert!((parse_angle("pi/4").unwrap() - pi / 4.0).abs() < 1e-15);
    assert!((parse_angle("3pi/8").unwrap() - 3.0 * pi / 8.0).abs() < 1e-15);
    assert!((parse_angle("-pi").unwrap() + pi).abs() < 1e-15);
    assert!(parse_angle("pie").is_err());
}
