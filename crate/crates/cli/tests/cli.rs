use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../networks").join(name);
    path.to_string_lossy().into_owned()
}

fn qpn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpn")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn propagated_chain_answers_plus() {
    let o = qpn(&["query-influence", &fixture("fig2-det.qpn"), "--from", "z", "--to", "y", "--given", "x"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "+\n");
    let o = qpn(&["query-influence", &fixture("fig2-prob.qpn"), "--from", "z", "--to", "y", "--given", "x"]);
    assert_eq!(stdout(&o), "?\n");
}

#[test]
fn explain_lists_steps_and_answer() {
    let o =
        qpn(&["query-influence", &fixture("fig2-det.qpn"), "--from", "z", "--to", "y", "--given", "x", "--explain"]);
    let text = stdout(&o);
    assert!(text.starts_with("step 1: DNP(w)"), "{text}");
    assert!(text.ends_with("answer: δ(z,y) given {x} = +\n"), "{text}");
}

#[test]
fn dsep_reports_both_criteria() {
    let o = qpn(&["dsep", &fixture("fig1-det.qpn"), "--x", "x", "--y", "y", "--given", "z"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "D-separated: true, d-separated: false\n");
}

#[test]
fn cyclic_network_is_a_domain_error() {
    let o = qpn(&["validate", &fixture("broken-cycle.qpn")]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("directed cycle a -> b -> c -> a"), "{err}");
    assert!(err.contains("hint"), "{err}");
}

#[test]
fn engine_rejections_exit_one_with_hint() {
    let o = qpn(&["transform", &fixture("fig2-prob.qpn"), "--op", "dnp:w"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("hint: "));
    let o = qpn(&["query-influence", &fixture("fig2-prob.qpn"), "--from", "z", "--to", "ghost"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qpn(&["validate", "/nonexistent/net.qpn"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("check the network path"));
}

#[test]
fn usage_errors_exit_two() {
    let net = fixture("fig2-prob.qpn");
    for args in [
        vec!["query-influence", net.as_str(), "--from", "z"],
        vec!["transform", net.as_str(), "--op", "flip:w"],
        vec!["transform", net.as_str(), "--op", "reverse:w"],
        vec!["oracle", net.as_str(), "--from", "z", "--to", "y", "--card", "z3"],
        vec!["oracle", net.as_str(), "--trials", "3"],
        vec!["frobnicate", net.as_str()],
    ] {
        let o = qpn(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn transform_prints_a_loadable_network() {
    let o = qpn(&["transform", &fixture("fig2-det.qpn"), "--op", "dnp:w"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let (step, net) = text.split_once("\n\n").unwrap();
    assert!(step.starts_with("DNP(w)"));
    let net = qpn_core::load_network(net).unwrap();
    assert!(net.is_barren("w"));
}

#[test]
fn oracle_report_has_one_record_per_trial() {
    let o = qpn(&[
        "oracle",
        &fixture("fig2-det.qpn"),
        "--from",
        "z",
        "--to",
        "y",
        "--given",
        "x",
        "--trials",
        "7",
        "--seed",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 7);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r["trial"], i);
        assert_eq!(r["seed"], 3);
        assert_eq!(r["consistent"], true);
        assert!(r["worst_margin"].is_number());
    }
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn undeclared_wide_cardinality_is_rejected() {
    let o = qpn(&["oracle", &fixture("fig2-prob.qpn"), "--from", "z", "--to", "y", "--card", "z=3", "--trials", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("multi"), "{}", stderr(&o));
}

fn json_invocations() -> Vec<Vec<String>> {
    let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let mut out = Vec::new();
    for name in ["fig1-det.qpn", "fig1-prob.qpn", "fig2-det.qpn", "fig2-prob.qpn"] {
        let f = fixture(name);
        out.push(own(&["query-influence", &f, "--from", "z", "--to", "y", "--given", "x", "--explain"]));
        out.push(own(&["dsep", &f, "--x", "x", "--y", "y", "--given", "z"]));
        out.push(own(&["transform", &f, "--op", "reverse:z,w"]));
        out.push(own(&["oracle", &f, "--from", "z", "--to", "x", "--trials", "4", "--seed", "9"]));
        out.push(own(&["export-dot", &f]));
        out.push(own(&["validate", &f]));
    }
    for name in ["fig8-tax.qpn", "fig8-progressive.qpn", "fig8-regressive.qpn"] {
        let f = fixture(name);
        out.push(own(&["query-synergy", &f, "--a", "salary", "--b", "interest", "--child", "taxes", "--explain"]));
        out.push(own(&["query-influence", &f, "--from", "salary", "--to", "taxes"]));
        out.push(own(&["oracle", &f, "--a", "salary", "--b", "interest", "--child", "taxes", "--trials", "4"]));
        out.push(own(&["export-dot", &f]));
        out.push(own(&["validate", &f]));
    }
    out.push(own(&["validate", &fixture("broken-cycle.qpn")]));
    out
}

#[test]
fn json_output_round_trips_and_is_reproducible() {
    for mut args in json_invocations() {
        args.extend(["--format".to_string(), "json".to_string()]);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = qpn(&args);
        let second = qpn(&args);
        assert_eq!(first.stdout, second.stdout, "{args:?} is not reproducible");
        let text = stdout(&first);
        let v: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}\n{text}"));
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text, "{args:?}");
        let ok = first.status.code() == Some(0);
        assert_eq!(v.get("error").is_none(), ok, "{args:?}");
    }
}

#[test]
fn json_fields_are_named() {
    let o = qpn(&["dsep", &fixture("fig1-prob.qpn"), "--x", "x", "--y", "y", "--given", "z", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["D_separated"], false);
    assert_eq!(v["d_separated"], false);
    let o = qpn(&[
        "query-influence",
        &fixture("fig2-det.qpn"),
        "--from",
        "z",
        "--to",
        "y",
        "--given",
        "x",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["sign"], "+");
    assert_eq!(v["trace"][0]["op"]["op"], "dnp");
    assert!(qpn_core::load_network(v["final_network"].as_str().unwrap()).is_ok());
}
