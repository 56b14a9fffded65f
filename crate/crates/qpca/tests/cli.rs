//! End-to-end tests of the `qpca` binary: exit codes, output formats, the
//! trace file, and config handling.

use std::io::Write;
use std::process::Command;

use serde_json::Value;

fn qpca(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_qpca"))
        .args(args)
        .output()
        .expect("spawn qpca");
    (
        output.status.code().expect("exit code"),
        String::from_utf8(output.stdout).expect("utf-8 stdout"),
        String::from_utf8(output.stderr).expect("utf-8 stderr"),
    )
}

fn run_ok(args: &[&str]) -> String {
    let (code, stdout, stderr) = qpca(args);
    assert_eq!(code, 0, "args {args:?} failed: {stderr}");
    stdout
}

const BBS: &[&str] = &["--gen", "bbs", "--modulus", "21", "--j", "5"];
const KALISKI: &[&str] = &["--gen", "kaliski", "--prime", "5", "--c", "1"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn generate_bbs_json() {
    let mut args = vec!["generate"];
    args.extend_from_slice(BBS);
    args.extend_from_slice(&["--seed-state", "9", "--steps", "2", "--format", "json"]);
    let stdout = run_ok(&args);
    assert_eq!(stdout.trim(), r#"{"states":[18,9],"bits":"01"}"#);
}

#[test]
fn generate_kaliski_text() {
    let mut args = vec!["generate"];
    args.extend_from_slice(KALISKI);
    args.extend_from_slice(&["--seed-state", "2", "--steps", "2"]);
    let stdout = run_ok(&args);
    assert!(stdout.contains("step=1 state=4 bit=0"), "{stdout}");
    assert!(stdout.contains("step=2 state=3 bit=1"), "{stdout}");
    assert!(stdout.contains("states: 4 3"), "{stdout}");
    assert!(stdout.contains("bits: 01"), "{stdout}");

    let csv = run_ok(&with(
        &["generate"],
        &with(
            KALISKI,
            &["--seed-state", "2", "--steps", "2", "--format", "csv"],
        ),
    ));
    assert_eq!(csv, "step,state,bit\n1,4,0\n2,3,1\n");
}

#[test]
fn generate_zero_steps_is_empty_success() {
    let mut args = vec!["generate"];
    args.extend_from_slice(BBS);
    args.extend_from_slice(&["--seed-state", "9", "--steps", "0", "--format", "json"]);
    let stdout = run_ok(&args);
    assert_eq!(stdout.trim(), r#"{"states":[],"bits":""}"#);
}

#[test]
fn generate_invalid_seed_exits_2() {
    let mut args = vec!["generate"];
    args.extend_from_slice(BBS);
    args.extend_from_slice(&["--seed-state", "5", "--steps", "2"]);
    let (code, _, stderr) = qpca(&args);
    assert_eq!(code, 2);
    assert!(stderr.contains("seed"), "{stderr}");
}

#[test]
fn attack_bbs_json_report() {
    let mut args = vec!["attack"];
    args.extend_from_slice(BBS);
    args.extend_from_slice(&["--bits", "10", "--format", "json"]);
    let stdout = run_ok(&args);
    let report: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(report["generator"], "bbs");
    assert_eq!(report["params"]["modulus"], 21);
    assert_eq!(report["n_qubits"], 5);
    assert_eq!(report["m"], 2);
    assert_eq!(report["k"], 4);
    assert_eq!(report["top_outcome"], 9);
    assert_eq!(report["classical_seeds"], serde_json::json!([9]));
    assert_eq!(report["agreement"], true);
    let distribution = report["distribution"].as_object().unwrap();
    assert!(distribution.len() <= 10);
    assert!((report["top_probability"].as_f64().unwrap() - 0.999182315543).abs() < 1e-9);
}

#[test]
fn attack_kaliski_exit_0() {
    let mut args = vec!["attack"];
    args.extend_from_slice(KALISKI);
    args.extend_from_slice(&["--bits", "00", "--format", "json"]);
    let stdout = run_ok(&args);
    let report: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(report["top_outcome"], 3);
    assert_eq!(report["k"], 2);
    assert_eq!(report["params"]["qx"], 2);
}

#[test]
fn attack_with_one_bit_observation() {
    // m = 1 observation with four consistent seeds {1,7,9,15}. The plan
    // still assumes a single solution, so its k = 4 overshoots the actual
    // rotation angle and the good subspace ends up nearly empty; the
    // report has to stay coherent (and honest) about that.
    let mut args = vec!["attack"];
    args.extend_from_slice(BBS);
    args.extend_from_slice(&["--bits", "1", "--format", "json"]);
    let (code, stdout, _) = qpca(&args);
    let report: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(report["m"], 1);
    assert_eq!(report["k"], 4);
    assert_eq!(report["classical_seeds"], serde_json::json!([1, 7, 9, 15]));
    // With the actual rotation angle asin(√(4/32)), nine quarter-turns land
    // almost back on the bad subspace: its 28 states split cos²(9θ) evenly
    // and outrank every solution image, so the attack reports disagreement.
    let theta = (4.0f64 / 32.0).sqrt().asin();
    let per_bad_state = (9.0 * theta).cos().powi(2) / 28.0;
    let top_probability = report["top_probability"].as_f64().unwrap();
    assert!(
        (top_probability - per_bad_state).abs() < 1e-9,
        "top probability {top_probability} vs {per_bad_state}"
    );
    let distribution = report["distribution"].as_object().unwrap();
    for square in ["1", "7", "15", "18"] {
        assert!(!distribution.contains_key(square), "{square} in top 10");
    }
    assert_eq!(code, 3);
}

#[test]
fn attack_impossible_observation_exits_3() {
    let mut args = vec!["attack"];
    args.extend_from_slice(BBS);
    args.extend_from_slice(&["--bits", "110", "--format", "json"]);
    let (code, stdout, _) = qpca(&args);
    assert_eq!(code, 3);
    let report: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(report["agreement"], false);
    assert_eq!(report["classical_seeds"], serde_json::json!([]));
}

#[test]
fn attack_oversized_domain_exits_4() {
    let (code, _, stderr) = qpca(&[
        "attack",
        "--gen",
        "bbs",
        "--modulus",
        "33554433",
        "--j",
        "5",
        "--bits",
        "10",
    ]);
    assert_eq!(code, 4);
    assert!(stderr.contains("resource"), "{stderr}");
}

#[test]
fn attack_json_round_trips_through_canonical_writer() {
    let mut args = vec!["attack"];
    args.extend_from_slice(BBS);
    args.extend_from_slice(&["--bits", "10", "--format", "json"]);
    let stdout = run_ok(&args);
    let parsed: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(qpca::cli::report::to_canonical_json(&parsed), stdout.trim());
}

#[test]
fn attack_formats_agree_on_numbers() {
    let mut base = vec!["attack"];
    base.extend_from_slice(KALISKI);
    base.extend_from_slice(&["--bits", "00"]);

    let text = run_ok(&with(&base, &["--format", "text"]));
    let json = run_ok(&with(&base, &["--format", "json"]));
    let csv = run_ok(&with(&base, &["--format", "csv"]));

    let theta_line = text
        .lines()
        .find(|l| l.starts_with("theta: "))
        .unwrap()
        .trim_start_matches("theta: ")
        .to_owned();
    assert!(json.contains(&format!("\"theta\":{theta_line}")), "{json}");
    assert!(csv.contains(&format!("theta,{theta_line}")), "{csv}");

    let p_line = text
        .lines()
        .find(|l| l.starts_with("top_probability: "))
        .unwrap()
        .trim_start_matches("top_probability: ")
        .to_owned();
    assert!(json.contains(&format!("\"top_probability\":{p_line}")));
    assert!(csv.contains(&format!("top_probability,{p_line}")));
}

#[test]
fn trace_file_matches_reference_listings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kaliski-trace.txt");
    let path_str = path.to_str().unwrap();
    let mut args = vec!["trace"];
    args.extend_from_slice(KALISKI);
    args.extend_from_slice(&["--bits", "00", "--trace-out", path_str]);
    run_ok(&args);

    let trace = std::fs::read_to_string(&path).unwrap();
    assert!(
        trace.contains("domain=4 bits=11 ancilla=- amp=0.353553390593,0"),
        "{trace}"
    );
    // psi0 is a single-entry block.
    let psi0: Vec<&str> = trace
        .split("\n\n")
        .find(|block| block.starts_with("psi0"))
        .unwrap()
        .lines()
        .collect();
    assert_eq!(psi0.len(), 2, "{psi0:?}");
    assert_eq!(psi0[1], "domain=0 bits=00 ancilla=1 amp=1,0");
    assert!(trace.contains("X_1 = {1,2,4}"));
    assert!(trace.ends_with('\n'));
}

#[test]
fn trace_bbs_psi2_lists_lsb1_residues() {
    let mut args = vec!["trace"];
    args.extend_from_slice(BBS);
    args.extend_from_slice(&["--bits", "10"]);
    let stdout = run_ok(&args);
    let psi2 = stdout
        .split("\n\n")
        .find(|block| block.starts_with("psi2"))
        .unwrap();
    for domain in [1, 7, 9, 15] {
        assert!(
            psi2.contains(&format!("domain={domain} bits=10")),
            "psi2 block missing {domain}: {psi2}"
        );
    }
    assert!(stdout.contains("X_1 = {1,7,9,15}"));
    assert!(stdout.contains("X_2 = {9}"));
}

#[test]
fn trace_unwritable_path_exits_5() {
    let mut args = vec!["trace"];
    args.extend_from_slice(KALISKI);
    args.extend_from_slice(&["--bits", "00", "--trace-out", "/nonexistent-dir/t.txt"]);
    let (code, _, stderr) = qpca(&args);
    assert_eq!(code, 5);
    assert!(stderr.contains("writing trace"), "{stderr}");
}

#[test]
fn bruteforce_reference_seed_sets() {
    let mut args = vec!["bruteforce"];
    args.extend_from_slice(BBS);
    args.extend_from_slice(&["--bits", "10", "--format", "json"]);
    let stdout = run_ok(&args);
    let value: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(value["seeds"], serde_json::json!([9]));

    let mut args = vec!["bruteforce"];
    args.extend_from_slice(KALISKI);
    args.extend_from_slice(&["--bits", "00", "--format", "json"]);
    let value: Value = serde_json::from_str(run_ok(&args).trim()).unwrap();
    assert_eq!(value["seeds"], serde_json::json!([2]));

    let mut args = vec!["bruteforce"];
    args.extend_from_slice(KALISKI);
    args.extend_from_slice(&["--bits", "11"]);
    let stdout = run_ok(&args);
    assert!(stdout.contains("seeds: {6}"), "{stdout}");

    let mut args = vec!["bruteforce"];
    args.extend_from_slice(KALISKI);
    args.extend_from_slice(&["--bits", "11", "--format", "csv"]);
    let stdout = run_ok(&args);
    assert!(stdout.starts_with("key,value\nseeds.0,6\n"), "{stdout}");
}

#[test]
fn verify_gates_reference_instances() {
    let mut args = vec!["verify-gates"];
    args.extend_from_slice(KALISKI);
    let stdout = run_ok(&args);
    assert!(
        stdout.contains("gate=rho dim=8 max_deviation=0 unitary=true"),
        "{stdout}"
    );
    assert!(stdout.contains("gate=lambda0 dim=16"), "{stdout}");
    assert!(stdout.contains("gate=lambda1 dim=16"), "{stdout}");
    assert!(stdout.contains("all_unitary: true"), "{stdout}");

    let mut args = vec!["verify-gates"];
    args.extend_from_slice(BBS);
    args.push("--format");
    args.push("json");
    let value: Value = serde_json::from_str(run_ok(&args).trim()).unwrap();
    assert_eq!(value["all_unitary"], true);
    assert_eq!(value["gates"][0]["name"], "rho");
    assert_eq!(value["gates"][0]["dim"], 32);
    assert_eq!(value["gates"][1]["name"], "delta0");
}

#[test]
fn verify_gates_non_blum_modulus_exits_2() {
    let (code, _, stderr) = qpca(&[
        "verify-gates",
        "--gen",
        "bbs",
        "--modulus",
        "15",
        "--j",
        "4",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("not injective"), "{stderr}");
}

#[test]
fn config_file_drives_a_full_attack() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "gen=kaliski").unwrap();
    writeln!(file, "prime=5").unwrap();
    writeln!(file, "c=1").unwrap();
    writeln!(file, "qx=2").unwrap();
    writeln!(file, "qy=2").unwrap();
    writeln!(file, "bits=00").unwrap();
    writeln!(file, "format=json").unwrap();
    let path = file.path().to_str().unwrap();

    let stdout = run_ok(&["attack", "--config", path]);
    let report: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(report["top_outcome"], 3);

    // A flag overrides the file: different observed bits change the seeds.
    let stdout = run_ok(&["bruteforce", "--config", path, "--bits", "11"]);
    let value: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(value["seeds"], serde_json::json!([6]));
}

#[test]
fn missing_parameters_exit_2() {
    let (code, _, _) = qpca(&["attack", "--gen", "bbs", "--modulus", "21", "--j", "5"]);
    assert_eq!(code, 2); // no --bits
    let (code, _, _) = qpca(&["attack", "--bits", "10"]);
    assert_eq!(code, 2); // no generator
    let (code, _, _) = qpca(&["attack", "--gen", "bbs", "--modulus", "21", "--bits", "10"]);
    assert_eq!(code, 2); // no --j
}
