//! End-to-end tests of the command-line interface and its exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gl2trace"))
}

#[test]
fn verify_constants_passes_and_reports_json() {
    let out = bin().args(["verify-constants", "--primes", "2,3,5,7"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("PASS limit_form_check(7) = 0"));
    assert!(!stdout.contains("FAIL"));
    // json tail of the output parses and carries the schema marker
    let json_start = stdout.find("\n{").unwrap() + 1;
    let v: serde_json::Value = serde_json::from_str(&stdout[json_start..]).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["a_series"][0]["matches"], "2x");
}

#[test]
fn injected_corruption_is_detected() {
    let out = bin().args(["verify-constants", "--inject-error"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("FAIL eps_integral(2, -1)"));
}

#[test]
fn parse_errors_exit_two() {
    let out = bin().args(["verify-constants", "--primes", "2,9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["orbital", "--p", "5", "--m", "0", "--a", "3", "--b", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-regular"));
}

#[test]
fn orbital_prints_exact_values() {
    let out = bin()
        .args(["orbital", "--p", "5", "--m", "0", "--a", "1", "--b", "6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("orb      = 5"), "{stdout}");
    assert!(stdout.contains("worb_hat = 2*log(5)"), "{stdout}");
    // k = 0 gives a zero modified weight
    let out = bin()
        .args(["orbital", "--p", "5", "--m", "0", "--a", "1", "--b", "2"])
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("worb_hat = 0"), "{stdout}");
    // scaled ball with an odd exponent keeps the half power symbolic
    let out = bin()
        .args(["orbital", "--p", "5", "--m", "1", "--a", "5", "--b", "1", "--scaled"])
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("1/5*sqrt(5)"), "{stdout}");
}

#[test]
fn limit_form_command() {
    let out = bin().args(["limit-form", "--p", "3"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("PASS limit_form_check(3) = 0"));
    let json_start = stdout.find("\n{").unwrap() + 1;
    let v: serde_json::Value = serde_json::from_str(&stdout[json_start..]).unwrap();
    assert_eq!(v["residual"]["const"], "0");
}

#[test]
fn sweep_emits_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.conf");
    std::fs::write(
        &cfg_path,
        format!(
            "s_primes=2\nprofile=plateau\nx_grid=200,400\nprecision=10\nout_dir={}\n",
            dir.path().join("out").display()
        ),
    )
    .unwrap();
    let out = bin().args(["sweep", "--config"]).arg(&cfg_path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out_dir = dir.path().join("out");
    let ledger: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("ledger.json")).unwrap())
            .unwrap();
    assert_eq!(ledger["schema"], 1);
    assert_eq!(ledger["f_coeff"], 0.0);
    let hyp = std::fs::read_to_string(out_dir.join("hyperbolic_sweep.csv")).unwrap();
    assert!(hyp.starts_with("x,i_hyp_deg1,j_hyp_hat_s,j_tilde_hyp_s"));
    assert_eq!(hyp.lines().count(), 3); // header + two grid rows
    let fam = std::fs::read_to_string(out_dir.join("residuals_divisor_sum.csv")).unwrap();
    assert!(fam.starts_with("x,partial_sum,main_term,residual"));
    let audit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("shell_audit_p2.json")).unwrap())
            .unwrap();
    assert_eq!(audit["schema"], 1);
    assert!(audit["audits"].as_array().unwrap().len() >= 4);
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.conf");
    std::fs::write(&cfg_path, "s_primes=3\n").unwrap();
    let out = bin().args(["sweep", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
