//! Acceptance gate: runs `selftest`, prints one line per criterion and
//! requires every criterion, including the aggregate, to pass.

use std::process::Command;

use serde_json::Value;

#[test]
fn acceptance_criteria() {
    let out = Command::new(env!("CARGO_BIN_EXE_poisson-trace"))
        .args(["selftest", "--format", "json"])
        .output()
        .expect("binary runs");
    let report: Value = serde_json::from_slice(&out.stdout).expect("selftest prints json");
    let rows = report["criteria"].as_array().expect("criteria table");
    assert_eq!(rows.len(), 13);

    let mut failed = Vec::new();
    for row in rows {
        let id = row["id"].as_u64().unwrap();
        let passed = row["passed"].as_bool().unwrap();
        println!(
            "{} criterion {:>2} {:<34} {:>7.3}s  {}",
            if passed { "PASS" } else { "FAIL" },
            id,
            row["name"].as_str().unwrap(),
            row["seconds"].as_f64().unwrap(),
            row["detail"].as_str().unwrap(),
        );
        if !passed {
            failed.push(id);
        }
    }

    let code = out.status.code().expect("exit code");
    assert_eq!(code == 0, failed.is_empty(), "exit code {code} disagrees with the table");
    if !failed.is_empty() {
        let stderr = String::from_utf8_lossy(&out.stderr);
        let first = stderr.lines().next().unwrap_or_default();
        assert!(first.contains("criterion"), "failure message names no criterion: {first}");
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
