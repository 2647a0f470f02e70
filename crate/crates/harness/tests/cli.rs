//! End-to-end checks of the `subdiff` binary: artifact shapes, exit codes,
//! and byte-level determinism.

use std::process::Command;

fn subdiff() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subdiff"))
}

fn write_config(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn example1_csv_is_deterministic_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "mini.json",
        r#"{"study":"example1","alphas":[0.4],"sigmas":[0.4],"ns":[10,20],"ms":[24],"t_finals":[1.0]}"#,
    );
    let run = |threads: &str| {
        let out = subdiff()
            .args(["--config", cfg.to_str().unwrap(), "--threads", threads])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let a = run("1");
    let b = run("1");
    let c = run("4");
    assert_eq!(a, b, "same-thread reruns must be byte-identical");
    assert_eq!(a, c, "thread count must not change output bytes");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("alpha,sigma,N,M,tN,variant,max_error,rate,expected_rate\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn missing_study_is_a_config_error() {
    let out = subdiff().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "bad.json", r#"{"study":"example1","alphas":[2.5]}"#);
    let out = subdiff()
        .args(["--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let unknown = write_config(&dir, "unknown.json", r#"{"study":"example1","bogus":1}"#);
    let out = subdiff()
        .args(["--config", unknown.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kernel_suite_writes_json_and_weight_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "kernel.json",
        r#"{"study":"kernel","alphas":[0.5],"ns":[64]}"#,
    );
    let json_path = dir.path().join("kernel.json.out");
    let out = subdiff()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            json_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = std::fs::read_to_string(&json_path).unwrap();
    assert!(json.contains("\"pass\": true"));
    let csv = std::fs::read_to_string(json_path.with_extension("csv")).unwrap();
    assert!(csv.starts_with("alpha,i,a_i,p_i\n"));
    assert_eq!(csv.lines().count(), 66); // header + 65 weight rows
}

#[test]
fn gronwall_suite_passes_on_reduced_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "gron.json",
        r#"{"study":"gronwall","alphas":[0.5],"ns":[64]}"#,
    );
    let out = subdiff()
        .args(["--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = String::from_utf8(out.stdout).unwrap();
    assert!(json.contains("empirical_min_c_overall"));
}

#[test]
fn truncation_suite_emits_summary_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "trunc.json",
        r#"{"study":"truncation","alphas":[0.5],"sigmas":[0.5],"ns":[32,64]}"#,
    );
    let json_path = dir.path().join("trunc_report.json");
    let out = subdiff()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            json_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(json_path.with_extension("csv")).unwrap();
    assert!(csv.starts_with("alpha,sigma,N,n,r_n,bound_ratio\n"));
    assert_eq!(csv.lines().count(), 1 + 32 + 64);
}

#[test]
fn spatial_study_runs_on_reduced_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "spatial.json",
        r#"{"study":"spatial","alphas":[0.4],"sigmas":[1.2],"ns":[64],"ms":[8,16],"m_ref":96}"#,
    );
    let out = subdiff()
        .args(["--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    let last = text.lines().last().unwrap();
    let rate: f64 = last.split(',').nth(7).unwrap().parse().unwrap();
    assert!((rate - 2.0).abs() < 0.2, "spatial rate {rate}");
}

#[test]
fn non_doubling_n_list_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "nd.json",
        r#"{"study":"example1","alphas":[0.4],"sigmas":[0.4],"ns":[10,30],"ms":[16]}"#,
    );
    let out = subdiff()
        .args(["--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
