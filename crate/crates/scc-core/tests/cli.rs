//! End-to-end tests of the command-line interface against the bundled
//! fixtures: golden values, determinism, exit codes and file round trips.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scc"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    scc().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn table1_args(extra: &[&str]) -> Vec<String> {
    let mut args = vec![
        "test".to_string(),
        fixture("table1_bladder.csv").to_string_lossy().into_owned(),
        "--design".into(),
        "case-control".into(),
        "--exposures".into(),
        "Smoking,NAT2,NAT1x10".into(),
        "--b".into(),
        "X1,X2,X3".into(),
        "--format".into(),
        "json".into(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    args
}

fn contrasts_of(report: &Value) -> Vec<(String, f64)> {
    report["strata"][0]["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["condition_id"].as_str().unwrap().to_string(),
                r["estimate"].as_f64().unwrap(),
            )
        })
        .collect()
}

#[test]
fn table1_all_monotone_tree_contrasts() {
    let args = table1_args(&["--assume-monotone", "X1,X2,X3"]);
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    let report = stdout_json(&out);
    let rows = contrasts_of(&report);
    let expect = [
        ("tree=[X1-X2,X1-X3]", 1.21),
        ("tree=[X1-X2,X2-X3]", 2.93),
        ("tree=[X1-X3,X2-X3]", 2.97),
    ];
    for (tree, value) in expect {
        let (_, est) = rows
            .iter()
            .find(|(id, _)| id.starts_with("irreducible|") && id.contains(tree))
            .unwrap_or_else(|| panic!("missing row for {tree}"));
        assert!((est - value).abs() <= 0.02, "{tree}: {est} vs {value}");
    }
    // Full-width singularity rows use the same estimates.
    assert!(rows.iter().any(|(id, _)| id.starts_with("singular|")));
    assert_eq!(report["conditions_tried"].as_u64().unwrap(), 6);
}

#[test]
fn table1_pair_and_empty_monotone_contrasts() {
    let cases = [
        ("X1,X2", 0.09),
        ("X1,X3", 0.13),
        ("X2,X3", 1.86),
    ];
    for (bplus, value) in cases {
        let args = table1_args(&["--assume-monotone", bplus, "--bplus", bplus]);
        let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
        let rows = contrasts_of(&stdout_json(&out));
        let (_, est) = rows
            .iter()
            .find(|(id, _)| id.starts_with("irreducible|"))
            .expect("an irreducibility row");
        assert!((est - value).abs() <= 0.02, "bplus={bplus}: {est} vs {value}");
    }

    let args = table1_args(&["--bplus", ""]);
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    let rows = contrasts_of(&stdout_json(&out));
    let (_, est) = rows
        .iter()
        .find(|(id, _)| id.starts_with("irreducible|"))
        .expect("an irreducibility row");
    assert!((est - (-0.99)).abs() <= 0.02, "no-monotonicity contrast: {est}");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = table1_args(&["--assume-monotone", "X1,X2,X3"]);
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let a = run(&argv);
    let b = run(&argv);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let t2 = fixture("table2_outcomes.csv");
    let argv = [
        "analyze",
        t2.to_str().unwrap(),
        "--b",
        "X2,!X3",
        "--format",
        "json",
    ];
    let a = run(&argv);
    let b = run(&argv);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analyze_table2_golden() {
    let t2 = fixture("table2_outcomes.csv");
    let out = run(&[
        "analyze",
        t2.to_str().unwrap(),
        "--b",
        "X2,!X3",
        "--b",
        "X1,X2",
        "--b",
        "X1",
        "--format",
        "json",
    ]);
    let report = stdout_json(&out);
    let ind2 = &report["individuals"][1];
    let pis: Vec<String> = ind2["prime_implicants"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            s.as_array()
                .unwrap()
                .iter()
                .map(|l| l.as_str().unwrap())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    assert_eq!(pis, vec!["X1,X2", "X1,X3", "X2,!X3", "!X2,X3"]);
    let epis = ind2["essential_prime_implicants"].as_array().unwrap();
    assert_eq!(epis.len(), 2);

    let queries = report["queries"].as_array().unwrap();
    assert_eq!(queries[0]["irreducible"]["holds"], Value::Bool(true));
    assert_eq!(queries[0]["irreducible"]["witness"]["id"], "1");
    assert_eq!(queries[1]["irreducible"]["holds"], Value::Bool(false));
    assert_eq!(queries[2]["irreducible"]["holds"], Value::Bool(true));
    assert_eq!(queries[2]["irreducible"]["witness"]["id"], "2");
}

#[test]
fn analyze_prob_mode_reports_pns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("and.csv");
    std::fs::write(&path, "id,weight,D00,D01,D10,D11\nonly,1.0,0,0,0,1\n").unwrap();
    let out = run(&[
        "analyze",
        path.to_str().unwrap(),
        "--prob-mode",
        "--b",
        "X1,X2",
        "--format",
        "json",
    ]);
    let report = stdout_json(&out);
    let q = &report["queries"][0];
    assert_eq!(q["singular"]["holds"], Value::Bool(true));
    assert_eq!(q["pns"].as_f64().unwrap(), 1.0);
}

#[test]
fn analyze_msc_witness_and_violation_note() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("or3.csv");
    // (x1 and x2) or x3
    std::fs::write(
        &path,
        "id,weight,D000,D001,D010,D011,D100,D101,D110,D111\na,1,0,1,0,1,0,1,1,1\n",
    )
    .unwrap();
    let out = run(&[
        "analyze",
        path.to_str().unwrap(),
        "--b",
        "X1,X2",
        "--msc",
        "--format",
        "json",
    ]);
    let report = stdout_json(&out);
    let msc = &report["queries"][0]["msc_under_monotonicity"];
    assert_eq!(msc["holds"], Value::Bool(true));
    assert_eq!(msc["witness"]["context"], serde_json::json!({"X3": 0}));

    // Context variable X2 is not monotone on the bundled two-individual
    // table, so the search is skipped with a note instead of failing.
    let t2 = fixture("table2_outcomes.csv");
    let out = run(&[
        "analyze",
        t2.to_str().unwrap(),
        "--b",
        "X1,X3",
        "--msc",
        "--format",
        "json",
    ]);
    let report = stdout_json(&out);
    let q = &report["queries"][0];
    assert!(q.get("msc_under_monotonicity").is_none());
    assert!(q["msc_note"].as_str().unwrap().contains("monotonicity violation"));
}

#[test]
fn repr_round_trip_through_files() {
    let t2 = fixture("table2_outcomes.csv");
    let out = run(&["repr", t2.to_str().unwrap(), "--format", "json"]);
    let report = stdout_json(&out);
    assert_eq!(report["verified"], Value::Bool(true));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rep.json");
    std::fs::write(&path, serde_json::to_string(&report["export"]).unwrap()).unwrap();
    let out = run(&[
        "repr",
        t2.to_str().unwrap(),
        "--check",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let report = stdout_json(&out);
    assert_eq!(report["kind"], "check");
    assert_eq!(report["verified"], Value::Bool(true));
}

#[test]
fn repr_avoidance_reports_irreducible_sets() {
    let t2 = fixture("table2_outcomes.csv");
    let out = run(&["repr", t2.to_str().unwrap(), "--avoid", "X1,X2", "--format", "json"]);
    let report = stdout_json(&out);
    assert_eq!(report["constructible"], Value::Bool(true));
    let conjuncts = report["export"]["conjuncts"].as_array().unwrap();
    for c in conjuncts {
        let lits: Vec<&str> = c.as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
        assert!(
            !(lits.contains(&"X1") && lits.contains(&"X2")),
            "conjunct {lits:?} contains the avoided set"
        );
    }

    let out = run(&["repr", t2.to_str().unwrap(), "--avoid", "X2,!X3", "--format", "json"]);
    let report = stdout_json(&out);
    assert_eq!(report["constructible"], Value::Bool(false));
}

#[test]
fn exit_codes() {
    // 0: successful run regardless of significance.
    let args = table1_args(&["--bplus", ""]);
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0));

    // 1: usage error (missing required flag).
    let out = run(&["test", "nofile.csv", "--design", "cohort"]);
    assert_eq!(out.status.code(), Some(1));

    // 1: usage error detected by the orchestration (bplus not declared).
    let args = table1_args(&["--bplus", "X1,X2"]);
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage error"));

    // 2: data error (missing file).
    let out = run(&["analyze", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_cell_names_the_cell() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cohort.csv");
    std::fs::write(
        &path,
        "A,B,events,total\n0,0,1,10\n0,1,2,10\n1,0,3,10\n",
    )
    .unwrap();
    let out = run(&[
        "test",
        path.to_str().unwrap(),
        "--design",
        "cohort",
        "--exposures",
        "A,B",
        "--b",
        "A,B",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing cell"), "stderr: {err}");
    assert!(err.contains("11"), "stderr should name the assignment: {err}");
}

#[test]
fn zero_cell_and_continuity_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cc.csv");
    std::fs::write(
        &path,
        "A,B,cases,controls\n0,0,5,10\n0,1,0,10\n1,0,4,10\n1,1,6,10\n",
    )
    .unwrap();
    let base = [
        "test",
        path.to_str().unwrap(),
        "--design",
        "case-control",
        "--exposures",
        "A,B",
        "--b",
        "A,B",
    ];
    let out = run(&base);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero cell"));

    let mut with_flag: Vec<&str> = base.to_vec();
    with_flag.extend_from_slice(&["--continuity", "0.5"]);
    let out = run(&with_flag);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn strata_are_tested_separately() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strat.csv");
    std::fs::write(
        &path,
        "A,B,site,events,total\n\
         0,0,x,1,10\n0,1,x,1,10\n1,0,x,1,10\n1,1,x,9,10\n\
         0,0,y,2,10\n0,1,y,2,10\n1,0,y,2,10\n1,1,y,2,10\n",
    )
    .unwrap();
    let out = run(&[
        "test",
        path.to_str().unwrap(),
        "--design",
        "cohort",
        "--exposures",
        "A,B",
        "--strata",
        "site",
        "--b",
        "A,B",
        "--format",
        "json",
    ]);
    let report = stdout_json(&out);
    let strata = report["strata"].as_array().unwrap();
    assert_eq!(strata.len(), 2);
    assert_eq!(strata[0]["stratum"], "site=x");
    assert!(strata[0]["any_positive"].as_bool().unwrap());
    assert!(!strata[1]["any_positive"].as_bool().unwrap());
}

#[test]
fn explicit_context_and_case_control_context_guard() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = dir.path().join("cohort3.csv");
    let mut rows = String::from("A,B,C,events,total\n");
    for idx in 0..8 {
        let (a, b, c) = (idx >> 2 & 1, idx >> 1 & 1, idx & 1);
        let events = if idx == 0b111 { 9 } else { 1 };
        rows.push_str(&format!("{a},{b},{c},{events},10\n"));
    }
    std::fs::write(&cohort, rows).unwrap();

    // Explicit context pins a single condition.
    let out = run(&[
        "test",
        cohort.to_str().unwrap(),
        "--design",
        "cohort",
        "--exposures",
        "A,B,C",
        "--b",
        "A,B",
        "--c2",
        "C=1",
        "--format",
        "json",
    ]);
    let report = stdout_json(&out);
    assert_eq!(report["contexts"], serde_json::json!(["X3=1"]));
    let rows = contrasts_of(&report);
    assert_eq!(rows.len(), 1);
    // E[D|111] - E[D|011] - E[D|101] = 0.9 - 0.1 - 0.1
    assert!((rows[0].1 - 0.7).abs() < 1e-9);

    // Without a context, the cohort run tries both.
    let out = run(&[
        "test",
        cohort.to_str().unwrap(),
        "--design",
        "cohort",
        "--exposures",
        "A,B,C",
        "--b",
        "A,B",
        "--format",
        "json",
    ]);
    let report = stdout_json(&out);
    assert_eq!(report["contexts"], serde_json::json!(["X3=0", "X3=1"]));

    // Case-control contrasts accept only the all-zero context.
    let t1 = fixture("table1_bladder.csv");
    let out = run(&[
        "test",
        t1.to_str().unwrap(),
        "--design",
        "case-control",
        "--exposures",
        "Smoking,NAT2,NAT1x10",
        "--b",
        "Smoking,NAT2",
        "--c2",
        "NAT1x10=1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported"));
}

#[test]
fn uninfluenced_extension_is_recorded() {
    let t2 = fixture("table2_outcomes.csv");
    let out = run(&[
        "analyze",
        t2.to_str().unwrap(),
        "--b",
        "X2,!X3",
        "--assume-uninfluenced",
        "X4",
        "--format",
        "json",
    ]);
    let report = stdout_json(&out);
    let irr = &report["queries"][0]["irreducible"];
    let relative: Vec<&str> = irr["relative_to"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(relative, vec!["X1", "X2", "X3", "X4"]);
    let assumptions = irr["assumptions"].as_array().unwrap();
    assert!(assumptions[0].as_str().unwrap().contains("not causally influenced"));
}

#[test]
fn trees_and_coef_listings() {
    let out = run(&["trees", "--n", "3"]);
    assert!(out.status.success());
    let lines: Vec<&str> = std::str::from_utf8(&out.stdout).unwrap().trim().lines().collect();
    assert_eq!(lines.len(), 3);
    let first: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["inequality_irred"], "b123 > b1");

    let out = run(&["coef", "--b", "X1,X2,X3"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("b123 > 2*b0 + b1 + b2 + b3"));
    assert!(text.contains("b123 > 6*b0 + 2*b1 + 2*b2 + 2*b3"));

    let out = run(&["coef", "--b", "X1,X2", "--bplus", "X1,X2"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("b12 > 0"));

    // Size guard refuses n=9 without the override.
    let out = run(&["trees", "--n", "9"]);
    assert_eq!(out.status.code(), Some(2));
}
