//! End-to-end tests of the `ratrec` binary: exit codes, output formats,
//! and round-trips through the library's own parsers.

use std::path::Path;
use std::process::{Command, Output};

use ratrec::analysis::{AsymptoticClass, Verdict};
use ratrec::scenario_io::{parse_csv, paper_example, render_scenario};

fn ratrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratrec"))
        .args(args)
        .env_remove("RATREC_BITLIMIT")
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn write_example(dir: &Path, id: u32) -> std::path::PathBuf {
    let path = dir.join(format!("example{id}.json"));
    std::fs::write(&path, render_scenario(&paper_example(id).unwrap())).unwrap();
    path
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ratrec(&["classify"]).status.code(), Some(2)); // missing --scenario
    assert_eq!(ratrec(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        ratrec(&["verify", "--trials", "1", "--seed", "0", "--horizon", "5", "--regime", "xyz"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn domain_errors_exit_1() {
    let out = ratrec(&["example", "--id", "9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown example id 9"));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = ratrec(&["classify", "--scenario", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn closed_form_prints_value_and_form() {
    let dir = tempfile::tempdir().unwrap();
    let ex2 = write_example(dir.path(), 2);
    let out = ratrec(&["closed-form", "--scenario", ex2.to_str().unwrap(), "--n", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out), "-2/1 (corollary1)\n");

    // Explicit form selection agrees.
    let out = ratrec(&[
        "closed-form",
        "--scenario",
        ex2.to_str().unwrap(),
        "--n",
        "7",
        "--form",
        "theorem1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out), "-2/1 (theorem1)\n");

    // The unit-parameter shortcut does not apply to example 2.
    let out = ratrec(&[
        "closed-form",
        "--scenario",
        ex2.to_str().unwrap(),
        "--n",
        "7",
        "--form",
        "elsayed",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_stdout_round_trips_through_the_csv_parser() {
    let dir = tempfile::tempdir().unwrap();
    let ex1 = write_example(dir.path(), 1);
    let out = ratrec(&[
        "simulate",
        "--scenario",
        ex1.to_str().unwrap(),
        "--horizon",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let traj = parse_csv(&stdout_of(&out)).expect("stdout parses as trajectory csv");
    assert_eq!(traj.len(), 24);

    // --csv writes the identical bytes to a file.
    let csv_path = dir.path().join("out.csv");
    let filed = ratrec(&[
        "simulate",
        "--scenario",
        ex1.to_str().unwrap(),
        "--horizon",
        "20",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(filed.status.code(), Some(0));
    assert_eq!(stdout_of(&filed), "");
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), stdout_of(&out));
}

#[test]
fn simulate_mode_override_switches_arithmetic() {
    let dir = tempfile::tempdir().unwrap();
    let ex1 = write_example(dir.path(), 1);
    let out = ratrec(&[
        "simulate",
        "--scenario",
        ex1.to_str().unwrap(),
        "--horizon",
        "5",
        "--mode",
        "float",
    ]);
    let traj = parse_csv(&stdout_of(&out)).unwrap();
    assert_eq!(traj.mode(), ratrec::numerics::Mode::Float);
}

#[test]
fn simulate_writes_svg_plots() {
    let dir = tempfile::tempdir().unwrap();
    let ex3 = write_example(dir.path(), 3);
    let svg_path = dir.path().join("plot.svg");
    let out = ratrec(&[
        "simulate",
        "--scenario",
        ex3.to_str().unwrap(),
        "--horizon",
        "80",
        "--mode",
        "float",
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert!(svg.contains("example 3"));
}

#[test]
fn classify_json_parses_back_into_a_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let ex3 = write_example(dir.path(), 3);
    let out = ratrec(&["classify", "--scenario", ex3.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let verdict: Verdict = serde_json::from_str(&stdout_of(&out)).expect("verdict json");
    assert_eq!(verdict.class, AsymptoticClass::Unbounded);
}

#[test]
fn classify_reports_forbidden_seeds_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("forbidden.json");
    std::fs::write(
        &path,
        r#"{"alpha":"1","A":"1","B":"1","a":"1","b":"1","c":"1","d":"-1","horizon":50}"#,
    )
    .unwrap();
    let out = ratrec(&["classify", "--scenario", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let verdict: Verdict = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(verdict.class, AsymptoticClass::Forbidden);

    let text = ratrec(&["classify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(text.status.code(), Some(1));
    assert!(stdout_of(&text).contains("class: forbidden"));
}

#[test]
fn forbidden_reports_index_and_good_set_cross_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pole.json");
    std::fs::write(
        &path,
        r#"{"alpha":"1","A":"1","B":"1","a":"1","b":"1","c":"1/3","d":"-1/3","horizon":50}"#,
    )
    .unwrap();
    let out = ratrec(&["forbidden", "--scenario", path.to_str().unwrap(), "--horizon", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.starts_with("5\n"), "{text}");
    assert!(text.contains("pole map predicts first forbidden index 5"));
    assert!(text.contains("DISAGREE"), "{text}");

    let ex1 = write_example(dir.path(), 1);
    let out = ratrec(&["forbidden", "--scenario", ex1.to_str().unwrap(), "--horizon", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.starts_with("none\n"));
    // Cross-check only applies when A = alpha.
    assert!(!text.contains("good-set"));
}

#[test]
fn verify_subcommand_passes_and_reports_counts() {
    let out = ratrec(&[
        "verify", "--trials", "25", "--seed", "9", "--horizon", "30", "--regime", "eq-",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("regimes: gt=0 eq+=0 eq-=25 lt=0"));
    assert!(text.ends_with("25/25 exact matches\n"));
}

#[test]
fn example_end_to_end_with_files_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("e4.csv");
    let svg_path = dir.path().join("e4.svg");
    let out = ratrec(&[
        "example",
        "--id",
        "4",
        "--csv",
        csv_path.to_str().unwrap(),
        "--svg",
        svg_path.to_str().unwrap(),
        "--classify",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("class: converges-to-period-4"));
    assert!(text.contains("l3=9/10 l2=-3/10 l1=2/5 l0=-6/5"));
    let traj = parse_csv(&std::fs::read_to_string(&csv_path).unwrap()).unwrap();
    assert_eq!(traj.len(), 404);
    assert!(std::fs::read_to_string(&svg_path).unwrap().contains("example 4"));
}

#[test]
fn bit_limit_env_var_caps_exact_growth() {
    let dir = tempfile::tempdir().unwrap();
    let ex3 = write_example(dir.path(), 3); // exact magnitudes grow without bound
    let out = Command::new(env!("CARGO_BIN_EXE_ratrec"))
        .args(["simulate", "--scenario", ex3.to_str().unwrap(), "--horizon", "400"])
        .env("RATREC_BITLIMIT", "64")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(
        text.lines().last().unwrap().starts_with("# status=ExactBlowupAt"),
        "{text}"
    );

    let bad = Command::new(env!("CARGO_BIN_EXE_ratrec"))
        .args(["simulate", "--scenario", ex3.to_str().unwrap()])
        .env("RATREC_BITLIMIT", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
