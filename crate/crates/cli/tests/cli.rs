use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oamcapture"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cg_prints_exact_and_decimal() {
    let out = run(&["cg", "1", "+1", "1/2", "-1/2", "3/2", "+1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("+sqrt(1/3)"), "{text}");
    assert!(text.contains("0.577350269189626"), "{text}");
}

#[test]
fn cg_csv_and_json() {
    let out = run(&["cg", "1/2", "1/2", "1/2", "-1/2", "0", "0", "--csv"]);
    assert_eq!(
        stdout(&out),
        "exact,decimal\n+sqrt(1/2),0.707106781186548\n"
    );

    let out = run(&["--json", "cg", "1", "0", "1", "0", "1", "0"]);
    let v = json(&out);
    assert_eq!(v["result"]["cg"][0]["exact"], "0");
    assert_eq!(v["metadata"]["command"], "oamcapture --json cg 1 0 1 0 1 0");
    assert!(v["metadata"]["version"].is_string());
}

#[test]
fn cg_invalid_projection_is_a_domain_error() {
    let out = run(&["cg", "1", "2", "1", "0", "1", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr(&out).lines().count(), 1);
}

#[test]
fn xsec_fully_aligned_corner() {
    let out = run(&[
        "xsec", "--mode", "oam", "--p", "1", "--pl", "1", "--pn", "1", "--csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "channel,exact,decimal,fraction\n0-,0,0,0\n1-,0,0,0\n2-,1,1,1\ntotal,1,1,1\n"
    );
}

#[test]
fn xsec_methods_agree() {
    let args = [
        "xsec", "--p", "1/2", "--pl", "-0.25", "--pn", "3/4", "--k", "1,2,1/2", "--json",
    ];
    let closed = json(&run(&args));
    let mut with_oracle = args.to_vec();
    with_oracle.extend(["--method", "oracle"]);
    let oracle = json(&run(&with_oracle));
    assert_eq!(closed["result"], oracle["result"]);
    assert_eq!(
        closed["result"]["cross-sections"][1]["exact"],
        "57/64 + (3/16)√2"
    );
}

#[test]
fn xsec_ordinary_mode() {
    let out = run(&[
        "xsec", "--mode", "ordinary", "--p", "1", "--pn", "1", "--csv",
    ]);
    assert_eq!(
        stdout(&out),
        "channel,exact,decimal,fraction\n0+,0,0,0\n1+,1,1,1\ntotal,1,1,1\n"
    );
}

#[test]
fn usage_errors_are_single_line_and_name_the_argument() {
    for (args, needle) in [
        (vec!["xsec", "--p", "2"], "--p"),
        (vec!["xsec", "--pl", "1/0"], "--pl"),
        (vec!["xsec", "--pn", "abc"], "--pn"),
        (vec!["xsec", "--bogus"], "--bogus"),
        (vec!["xsec", "--method", "nope"], "--method"),
        (vec!["xsec", "--k", "1,2"], "--k"),
        (vec!["xsec", "--k", "1,-2,1"], "--k"),
        (vec!["cg", "1", "x", "1", "0", "1", "0"], "x"),
        (vec!["fit", "--resolved"], "--settings"),
        (vec!["frobnicate"], "frobnicate"),
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = stderr(&out);
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.contains(needle), "{args:?}: {err}");
    }
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let out = run(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("oamcapture "));
}

#[test]
fn oracle_check_agrees_on_grid5() {
    let out = run(&["oracle-check", "--grid", "5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["verdict"], "agree");
    assert_eq!(v["result"]["discrepancies"].as_array().unwrap().len(), 0);
    let claims = v["result"]["claims"].as_array().unwrap();
    let refuted: Vec<&str> = claims
        .iter()
        .filter(|c| c["supported"] == false)
        .map(|c| c["kind"].as_str().unwrap())
        .collect();
    assert_eq!(refuted, ["minimum_at", "maximum_at"]);
}

#[test]
fn oracle_check_is_stable() {
    let a = run(&["oracle-check", "--grid", "3", "--csv"]);
    let b = run(&["oracle-check", "--grid", "3", "--csv"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_sorted_by_condition_number() {
    let out = run(&["sweep", "--grid", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["result"]["sweep"].as_array().unwrap();
    assert_eq!(rows.len(), 27);
    let conds: Vec<f64> = rows
        .iter()
        .map(|r| r["condition_number"].as_str().unwrap().parse().unwrap())
        .collect();
    assert!(conds.windows(2).all(|w| w[0] <= w[1]));
    let origin = rows
        .iter()
        .find(|r| r["p"] == "0" && r["P_L"] == "0" && r["P_N"] == "0")
        .unwrap();
    assert_eq!(origin["fraction_0-_exact"], "1/12");
    assert_eq!(origin["fraction_1-_exact"], "1/2");
    assert_eq!(origin["fraction_2-_exact"], "5/12");
}

#[test]
fn sweep_rejects_small_grid() {
    assert_eq!(run(&["sweep", "--grid", "1"]).status.code(), Some(2));
}

#[test]
fn simulate_then_fit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let settings = dir.path().join("settings.csv");
    let counts = dir.path().join("counts.csv");
    let out = run(&[
        "simulate",
        "--grid",
        "3",
        "--exposure",
        "1e6",
        "--k",
        "1,2,1/2",
        "--seed",
        "11",
        "--resolved",
        "--settings-out",
        path(&settings),
        "--csv",
        "--out",
        path(&counts),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());

    let header = std::fs::read_to_string(&counts).unwrap();
    assert!(header.starts_with("setting_id,capture,transmitted,capture_0-,capture_1-,capture_2-\n"));

    for extra in [
        &[][..],
        &["--resolved"][..],
        &["--resolved", "--weights", "model"][..],
    ] {
        let mut args = vec![
            "fit",
            "--settings",
            path(&settings),
            "--counts",
            path(&counts),
            "--json",
        ];
        args.extend(extra);
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let v = json(&out);
        for (channel, truth) in [("0-", 1.0), ("1-", 2.0), ("2-", 0.5)] {
            let est = v["result"]["K_hat"][channel].as_f64().unwrap();
            assert!(
                (est - truth).abs() < 0.1 * truth,
                "{extra:?} {channel}: {est}"
            );
        }
    }
}

#[test]
fn simulate_is_deterministic_and_records_seed() {
    let a = run(&["simulate", "--grid", "2", "--seed", "5", "--json"]);
    let b = run(&["simulate", "--grid", "2", "--seed", "5", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["metadata"]["seed"], 5);
    let c = run(&["simulate", "--grid", "2", "--seed", "6", "--json"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn simulate_thread_count_does_not_change_output() {
    let run_with = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_oamcapture"))
            .args([
                "simulate",
                "--grid",
                "3",
                "--seed",
                "9",
                "--resolved",
                "--csv",
            ])
            .env("OAMCAPTURE_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run_with("1");
    let four = run_with("4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run_with("zero").status.code(), Some(2));
}

#[test]
fn fit_missing_file_is_a_domain_error() {
    let out = run(&[
        "fit",
        "--settings",
        "/nonexistent/s.csv",
        "--counts",
        "/nonexistent/c.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent/s.csv"));
}

#[test]
fn fit_degenerate_design_names_the_combination() {
    let dir = tempfile::tempdir().unwrap();
    let settings = dir.path().join("settings.csv");
    let counts = dir.path().join("counts.csv");
    std::fs::write(
        &settings,
        "p,P_L,P_N,exposure,depth\n0,0,0,1000,0.1\n1,1,1,1000,0.1\n",
    )
    .unwrap();
    std::fs::write(
        &counts,
        "setting_id,capture,transmitted\n0,90,900\n1,95,905\n",
    )
    .unwrap();
    let out = run(&[
        "fit",
        "--settings",
        path(&settings),
        "--counts",
        path(&counts),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("degenerate design"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn levels_lists_table_and_detunings() {
    let out = run(&["levels", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["levels"].as_array().unwrap().len(), 6);
    let detunings = v["result"]["detunings"].as_array().unwrap();
    let find =
        |c: &str| detunings.iter().find(|d| d["channel"] == c).unwrap()["detuning_mev"].clone();
    assert_eq!(find("0+"), "0.368");
    assert_eq!(find("0-"), "-0.432");
    assert_eq!(find("1-"), "-3.672");

    let csv = stdout(&run(&["levels", "--csv"]));
    assert!(
        csv.starts_with("# levels\nrole,energy_kev,J_pi,T,width\n"),
        "{csv}"
    );
}

#[test]
fn kinematics_pass_and_fail() {
    let out = run(&["kinematics", "--q", "764", "--ep", "573", "--et", "191"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["kinematics", "--ep", "382", "--et", "382", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["result"]["passed"], false);
    assert!(stderr(&out).contains("momentum_balance"));

    let out = run(&["kinematics", "--q", "800"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("energy_sum"));
}

#[test]
fn out_writes_file_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cg.json");
    let out = run(&[
        "cg",
        "1/2",
        "1/2",
        "1/2",
        "1/2",
        "1",
        "1",
        "--json",
        "--out",
        path(&file),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(v["result"]["cg"][0]["exact"], "+1");
}

#[test]
fn csv_and_json_conflict() {
    assert_eq!(run(&["levels", "--csv", "--json"]).status.code(), Some(2));
}
