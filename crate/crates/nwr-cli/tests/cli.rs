use std::path::PathBuf;

use assert_cmd::Command;
use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../nwr/tests/data").join(name).display().to_string()
}

fn nwr() -> Command {
    Command::cargo_bin("nwr").unwrap()
}

fn stdout_json(cmd: &mut Command) -> Value {
    let out = cmd.output().unwrap();
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn generated_ladder_collapses_through_a_pipe() {
    let model = nwr().args(["gen-bench", "--variant", "A", "--n", "2"]).output().unwrap();
    assert!(model.status.success());
    let out = nwr().arg("collapse").write_stdin(model.stdout).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("15 -> 7 states"));
    let small: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(small["states"], 7);
}

#[test]
fn collapse_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("c.json");
    nwr().args(["gen-bench", "--variant", "C", "--n", "3", "-o"]).arg(&model).assert().success();
    let mut reports = Vec::new();
    for k in 0..2 {
        let r = dir.path().join(format!("r{k}.json"));
        nwr().arg("collapse").arg(&model).args(["-o", "-", "--report"]).arg(&r).assert().success();
        reports.push(std::fs::read(&r).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let doc: Value = serde_json::from_slice(&reports[0]).unwrap();
    assert_eq!((doc["size_before"].as_u64(), doc["size_after"].as_u64()), (Some(33), Some(9)));
    assert_eq!(doc["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn csv_row_has_the_table_columns() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let model = nwr().args(["gen-bench", "--variant", "B", "--n", "10"]).output().unwrap();
    nwr().args(["collapse", "-o", "-", "--csv"]).arg(&csv).write_stdin(model.stdout).assert().success();
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("benchmark,size_before,size_after,classes,elapsed_ms"));
    assert!(lines.next().unwrap().starts_with("stdin,383,23,"));
}

#[test]
fn never_worse_verdicts() {
    let yes = stdout_json(nwr().args(["check-nwr", &data("chain_model.json"), "--i", "v", "--j", "u", "--budget", "200"]));
    assert_eq!(yes["verdict"]["status"], "CertifiedYes");
    nwr()
        .args(["check-nwr", &data("chain_model.json"), "--i", "u", "--j", "v", "--budget", "200", "--strict"])
        .assert()
        .code(1);
    nwr().args(["check-nwr", &data("chain_model.json"), "--i", "u", "--j", "v", "--budget", "200"]).assert().success();
}

#[test]
fn gadget_is_written_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    nwr().args(["check-nwr", &data("chain_model.json"), "--i", "v", "--j", "u", "--budget", "10", "--gadget-out"]).arg(&g).assert().success();
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(doc["states"], 6);
    assert_eq!(doc["parameters"].as_array().unwrap().len(), 3);
}

#[test]
fn monotonicity_verdicts() {
    let cert = stdout_json(nwr().args([
        "check-mono", &data("diamond.json"), "--state", "s", "--param", "r", "--method", "certificate",
    ]));
    assert_eq!(cert["verdict"]["status"], "CertifiedYes");
    let refuted = stdout_json(nwr().args(["check-mono", &data("diamond.json"), "--state", "s", "--param", "1", "--budget", "500"]));
    assert_eq!(refuted["verdict"]["status"], "RefutedNo");
    assert!(refuted["verdict"]["witness"]["lower"]["p"].is_string());
    let a = nwr().args(["check-mono", &data("diamond.json"), "--state", "s", "--param", "p", "--seed", "4"]).output().unwrap();
    let b = nwr().args(["check-mono", &data("diamond.json"), "--state", "s", "--param", "p", "--seed", "4"]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn values_are_printed() {
    let out = nwr().args(["values", &data("chain_model.json"), "--state", "v"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "g[v] = (-p^2 + p) / (1)\n");
}

#[test]
fn derivative_model_carries_the_relation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.json");
    nwr().args(["derivative", &data("chain_model.json"), "--state", "s", "--param", "r", "-o"]).arg(&d).assert().success();
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&d).unwrap()).unwrap();
    for key in ["beta", "N", "probe_state", "scale_poly"] {
        assert!(!doc["relation"][key].is_null(), "{key}");
    }
}

#[test]
fn convert_round_trips_our_own_json() {
    let dir = tempfile::tempdir().unwrap();
    let once = dir.path().join("once.json");
    nwr().args(["convert", &data("diamond.json"), "-o"]).arg(&once).assert().success();
    let twice = nwr().arg("convert").arg(&once).output().unwrap();
    assert_eq!(twice.stdout, std::fs::read(&once).unwrap());
    let prism = nwr().args(["convert", &data("diamond.json"), "--format", "prism"]).output().unwrap();
    let text = String::from_utf8(prism.stdout).unwrap();
    assert!(text.starts_with("dtmc\n") && text.contains("endmodule"));
}

#[test]
fn input_errors_exit_2_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.json");
    nwr().args(["derivative", &data("chain_model.json"), "--state", "s", "--param", "zz", "-o"]).arg(&out).assert().code(2);
    assert!(!out.exists());
    nwr().args(["convert", "/definitely/not/here.json"]).assert().code(2);
    nwr().args(["gen-bench", "--variant", "E", "--n", "3"]).assert().code(2);
    nwr().arg("collapse").write_stdin("{ not json").assert().code(2);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}
