use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use fdeform_cli::DISPATCH;

fn fdeform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdeform")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("invalid JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fdeform-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn qboson_passes() {
    let out = fdeform(&["algebra", "--which", "qboson", "--lambda", "0.5", "--dim", "32"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["tool"], "fdeform");
    assert_eq!(r["command"], "algebra");
    assert_eq!(r["passed"], true);
    assert_eq!(r["parameters"]["command"]["dim"], 32);
}

#[test]
fn parse_error_is_usage() {
    let out = fdeform(&["algebra", "--which", "qboson", "--lambda", "abc"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--lambda"));
    assert_eq!(fdeform(&["algebra", "--bogus"]).status.code(), Some(2));
    assert_eq!(fdeform(&["nonsense"]).status.code(), Some(2));
    assert_eq!(fdeform(&[]).status.code(), Some(2));
}

#[test]
fn negative_control_fails() {
    let out = fdeform(&["algebra", "--which", "qboson", "--lambda", "1", "--dim", "32", "--force-f-identity"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["passed"], false);
}

#[test]
fn lepton_defaults_and_table() {
    let r = report(&fdeform(&["leptons"]));
    let fit = &r["results"]["lepton_fit"];
    assert!((fit["k"].as_f64().unwrap() - 105.147).abs() < 1e-9);
    assert!((fit["lambda"].as_f64().unwrap() - 2.82).abs() < 0.01);
    assert!((fit["masses"][3].as_f64().unwrap() - 3.0e4).abs() < 0.05 * 3.0e4);

    let r = report(&fdeform(&["leptons", "--n-max", "5"]));
    let masses: Vec<f64> = r["results"]["lepton_fit"]["masses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(masses.len(), 6);
    assert!(masses.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn degenerate_masses_are_a_domain_error() {
    let out = fdeform(&["leptons", "--m-e", "1", "--m-mu", "1", "--m-tau", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["error"]["kind"], "DomainError");
    assert_eq!(r["passed"], false);
}

#[test]
fn classical_example() {
    let r = report(&fdeform(&["classical", "--lambda", "0.5", "--q0", "2", "--p0", "0"]));
    let measured = r["results"]["measure_frequency"]["omega"].as_f64().unwrap();
    let predicted = r["results"]["predicted_frequency"]["omega"].as_f64().unwrap();
    assert!((measured - 1.2423).abs() < 1e-3 && (predicted - 1.2423).abs() < 1e-3);
    assert_eq!(r["passed"], true);
}

#[test]
fn hubbard_example() {
    let r = report(&fdeform(&["hubbard", "--sites", "2", "--q", "1", "--t", "1", "--U", "4", "--sector", "1,1"]));
    let e = r["results"]["diagonalize"]["ground_energy"].as_f64().unwrap();
    assert!((e + 8f64.sqrt()).abs() < 1e-10);
    assert_eq!(fdeform(&["hubbard", "--q", "0"]).status.code(), Some(2));
}

#[test]
fn noise_example_and_seed_requirement() {
    let out = fdeform(&["noise", "--lambda", "0.3", "--samples", "10000", "--seed", "7", "--xi", "gaussian"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let exact = r["results"]["spectral_quadratic_form"]["value"].as_f64().unwrap();
    assert!((exact - 3.840).abs() < 1e-3);
    assert!(r["results"]["mc_quadratic_form"]["z_score"].as_f64().unwrap() < 3.0);
    assert_eq!(fdeform(&["noise", "--lambda", "0.3"]).status.code(), Some(2));
}

#[test]
fn small_cutoff_reports_warning() {
    let out = fdeform(&["noise", "--seed", "1", "--lambda", "0", "--cutoff", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["error"]["kind"], "CutoffWarning");
}

#[test]
fn field_example() {
    let r = report(&fdeform(&["field", "--modes", "0", "--m0", "1", "--m2", "1,0,1", "--cutoff", "5"]));
    assert_eq!(r["passed"], true);
    let table = r["results"]["hamiltonian"]["eigenvalues"].as_array().unwrap();
    let one_plus = table
        .iter()
        .find(|row| row["occupations"] == serde_json::json!([1, 0]))
        .unwrap();
    assert!((one_plus["energy"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let bad = fdeform(&["field", "--m2", "1,1", "--cutoff", "3"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(report(&bad)["error"]["kind"], "NegativeMassSquared");
}

fn strip_wall_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_s");
    v
}

#[test]
fn reports_are_deterministic() {
    let args = ["noise", "--lambda", "0.15", "--samples", "500", "--seed", "11", "--paths", "3", "--xi", "raised-cosine"];
    let a = fdeform(&args);
    let b = fdeform(&args);
    assert_eq!(strip_wall_time(report(&a)), strip_wall_time(report(&b)));
    let c = fdeform(&["noise", "--lambda", "0.15", "--samples", "500", "--seed", "12", "--paths", "3", "--xi", "raised-cosine"]);
    assert_ne!(
        report(&a)["results"]["mc_quadratic_form"],
        report(&c)["results"]["mc_quadratic_form"]
    );
}

#[test]
fn config_file_and_precedence() {
    let cfg = scratch("algebra.json");
    std::fs::write(&cfg, r#"{"which": "general", "dim": 20, "g_slope": 0.05}"#).unwrap();
    let path = cfg.to_str().unwrap();
    let r = report(&fdeform(&["--config", path, "algebra", "--dim", "24"]));
    assert_eq!(r["parameters"]["command"]["which"], "general");
    assert_eq!(r["parameters"]["command"]["dim"], 24);
    assert_eq!(r["parameters"]["command"]["g_slope"], 0.05);

    let unknown = scratch("unknown.json");
    std::fs::write(&unknown, r#"{"not_a_flag": 1}"#).unwrap();
    assert_eq!(fdeform(&["--config", unknown.to_str().unwrap(), "algebra"]).status.code(), Some(2));
    let broken = scratch("broken.json");
    std::fs::write(&broken, "{").unwrap();
    assert_eq!(fdeform(&["--config", broken.to_str().unwrap(), "algebra"]).status.code(), Some(2));
    assert_eq!(fdeform(&["--config", "/nonexistent/x.json", "algebra"]).status.code(), Some(2));
}

#[test]
fn output_file_and_columns() {
    let path = scratch("spectrum.txt");
    let out = fdeform(&["--format", "columns", "--output", path.to_str().unwrap(), "hubbard", "--sites", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with('#'));
    assert!(text.lines().count() > 10);

    let out = fdeform(&["classical", "--format", "columns", "--stride", "100"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().nth(1).unwrap();
    assert_eq!(first.split_whitespace().count(), 5);
}

#[test]
fn every_operation_is_reachable() {
    let all: BTreeSet<&str> = [
        "f_squared_boson",
        "solve_f_from_gh_boson",
        "solve_f_from_gh_fermion",
        "f_bar_fermion",
        "lepton_fit",
        "build_boson_rep",
        "build_fermion_modes",
        "deform",
        "check_qboson_relation",
        "check_general_relation",
        "deformed_spectrum",
        "check_jordan_schwinger",
        "integrate",
        "measure_frequency",
        "predicted_frequency",
        "build_deformed_hubbard",
        "diagonalize",
        "hopping_amplitude_table",
        "deformed_frequency",
        "sample_paths",
        "spectral_quadratic_form",
        "mc_quadratic_form",
        "small_lambda_structure",
        "build_field",
        "hamiltonian",
        "verify_deformed_relations",
    ]
    .into_iter()
    .collect();
    let mut covered = BTreeSet::new();
    for entry in DISPATCH {
        let out = fdeform(entry.example);
        assert_eq!(out.status.code(), Some(0), "{:?}: {}", entry.example, String::from_utf8_lossy(&out.stderr));
        let r = report(&out);
        for op in entry.operations {
            assert!(r["results"].get(*op).is_some(), "{:?} did not report {op}", entry.example);
            covered.insert(*op);
        }
    }
    let missing: Vec<_> = all.difference(&covered).collect();
    assert!(missing.is_empty(), "unreachable operations: {missing:?}");
}

#[test]
fn verify_all_reports_every_criterion() {
    let out = fdeform(&["verify-all"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["criteria"].as_array().unwrap().len(), 8);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS end_to_end"));
}
