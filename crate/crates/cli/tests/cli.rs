//! The `fttc` binary end to end on the shipped corpus.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    format!("{}/corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fttc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fttc")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_file(path: &PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_reproduces_the_illustration() {
    let out = fttc(&["solve", "--mechanism", "fttc", "--input", &corpus("illustration.json")]);
    assert_eq!(code(&out), 0);
    let got: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let want: Value = serde_json::from_str(&std::fs::read_to_string(corpus("illustration_fttc.json")).unwrap()).unwrap();
    assert_eq!(got, want);
    assert_eq!(got["assignment"]["1"]["a"], "99/100");
}

#[test]
fn solve_writes_output_and_trace() {
    let output = scratch("illustration_out.json");
    let trace = scratch("illustration_trace.json");
    let out = fttc(&[
        "solve",
        "--input",
        &corpus("illustration.json"),
        "--output",
        output.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "fttc: n=3 m=3 trades=1\n");
    assert_eq!(json_file(&output), json_file(&PathBuf::from(corpus("illustration_fttc.json"))));
    let trace = json_file(&trace);
    assert_eq!(trace["trades"], 1);
    let events = trace["events"].as_array().unwrap();
    assert!(events[0].get("trade").is_some());
}

#[test]
fn solve_reports_preconditions_and_bad_input() {
    let out = fttc(&["solve", "--mechanism", "ttc", "--input", &corpus("illustration.json")]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not classic"));
    let bad = scratch("bad.json");
    std::fs::write(&bad, r#"{"agents": ["1"], "houses": ["h"], "preferences": {"1": []}}"#).unwrap();
    assert_eq!(code(&fttc(&["solve", "--input", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&fttc(&["solve", "--input", &corpus("missing.json")])), 1);
    let out = fttc(&["solve", "--input", &corpus("illustration.json"), "--ln", "1,2"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn agent_priority_changes_the_pointer_choice() {
    let default = fttc(&["solve", "--input", &corpus("two_owner_tie.json")]);
    let reversed = fttc(&["solve", "--input", &corpus("two_owner_tie.json"), "--ln", "3,2,1"]);
    assert_eq!((code(&default), code(&reversed)), (0, 0));
    let a: Value = serde_json::from_str(&stdout(&default)).unwrap();
    let b: Value = serde_json::from_str(&stdout(&reversed)).unwrap();
    assert_eq!(a["assignment"]["1"]["b"], "1/2");
    assert_eq!(b["assignment"]["2"]["b"], "1/2");
    assert_ne!(a, b);
}

#[test]
fn cc_output_is_blocked_by_agents_one_and_two() {
    let report = scratch("cc_report.json");
    let out = fttc(&[
        "verify",
        "--input",
        &corpus("illustration.json"),
        "--assignment",
        &corpus("cc_output.json"),
        "--checks",
        "core",
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("sd-core: FAIL blocking coalition {1,2}"));
    let report = json_file(&report);
    assert_eq!(report["conserved"], false);
    let witness = &report["checks"][0]["witness"];
    assert_eq!(witness["coalition"], serde_json::json!(["1", "2"]));
    assert_eq!(witness["mode"], "all-strict");
}

#[test]
fn fttc_output_passes_every_check_but_envy() {
    let out = fttc(&[
        "verify",
        "--input",
        &corpus("illustration.json"),
        "--assignment",
        &corpus("illustration_fttc.json"),
        "--checks",
        "ir,efficiency,core,strict-core",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn core_envy_fixtures() {
    let out = fttc(&[
        "verify",
        "--input",
        &corpus("core_envy.json"),
        "--assignment",
        &corpus("core_envy_endowment.json"),
        "--checks",
        "core",
    ]);
    assert_eq!(code(&out), 3);
    let report = scratch("core_envy.json");
    let out = fttc(&[
        "verify",
        "--input",
        &corpus("core_envy.json"),
        "--assignment",
        &corpus("core_envy_core.json"),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let report = json_file(&report);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks[..4].iter().all(|c| c["verdict"] == "pass"));
    assert_eq!(checks[4]["witness"]["envious"], "3");
    assert_eq!(checks[4]["witness"]["envied"], "2");
}

#[test]
fn verify_rejects_assignments_that_do_not_fit() {
    let short = scratch("short.json");
    std::fs::write(&short, r#"{"assignment": {"1": {"a": "1", "b": "0", "c": "0"}}}"#).unwrap();
    let out = fttc(&["verify", "--input", &corpus("illustration.json"), "--assignment", short.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    let out = fttc(&["verify", "--input", &corpus("illustration.json")]);
    assert_eq!(code(&out), 1);
}

#[test]
fn fttc_pair_block_through_the_cli() {
    let x = scratch("blocked_pair_x.json");
    assert_eq!(code(&fttc(&["solve", "--input", &corpus("blocked_pair.json"), "--output", x.to_str().unwrap()])), 0);
    let out = fttc(&[
        "verify",
        "--input",
        &corpus("blocked_pair.json"),
        "--assignment",
        x.to_str().unwrap(),
        "--checks",
        "ir,efficiency,core",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("sd-core: FAIL blocking coalition {3,4}"));
}

#[test]
fn manipulation_search() {
    let report = scratch("imposs_report.json");
    let out = fttc(&["manipulate", "--input", &corpus("imposs.json"), "--output", report.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let found = json_file(&report)["misreports"].as_array().unwrap().clone();
    assert_eq!(found.len(), 1);
    assert_eq!(found[0]["agent"], "1");

    let out = fttc(&["manipulate", "--input", &corpus("imposs.json"), "--agent", "2"]);
    assert_eq!((code(&out), stdout(&out)), (0, "agent 2: none\nnone\n".to_string()));
    assert_eq!(code(&fttc(&["manipulate", "--input", &corpus("ttc_example.json")])), 0);
    assert_eq!(code(&fttc(&["manipulate", "--input", &corpus("seven_houses.json")])), 5);
}

#[test]
fn dichotomous_market_has_no_discrete_strict_core_assignment() {
    let report = scratch("dichotomous.json");
    let out = fttc(&[
        "verify",
        "--input",
        &corpus("dichotomous.json"),
        "--checks",
        "discrete-strict-core",
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let report = json_file(&report);
    assert_eq!(report["checks"][0]["permutations"], 120);
    assert_eq!(report["checks"][0]["blocked"], 120);
    let out = fttc(&["verify", "--input", &corpus("ttc_example.json"), "--checks", "discrete-strict-core"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn gen_is_deterministic_and_solvable() {
    let args = ["gen", "--seed", "11", "--agents", "4", "--houses", "3", "--ties", "1/3", "--granularity", "20"];
    let a = fttc(&args);
    let b = fttc(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let path = scratch("gen.json");
    std::fs::write(&path, &a.stdout).unwrap();
    assert_eq!(code(&fttc(&["solve", "--input", path.to_str().unwrap()])), 0);
    assert_eq!(code(&fttc(&["gen", "--kind", "permutation", "--agents", "0"])), 2);
}

#[test]
fn compare_single_and_batch() {
    let out = fttc(&["compare", "--against", "ttc", "--input", &corpus("ttc_example.json")]);
    assert_eq!((code(&out), stdout(&out)), (0, "EQUAL\n".to_string()));
    let out = fttc(&["compare", "--against", "fttc", "--input", &corpus("illustration.json")]);
    assert_eq!(code(&out), 0);
    let out = fttc(&["compare", "--against", "serial", "--input", &corpus("illustration.json")]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).starts_with("DIFFER agent 1 house"));

    let out = fttc(&["compare", "--against", "ttc", "--kind", "permutation", "--agents", "3-6", "--count", "200"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).ends_with("200 instances, 0 mismatches\n"));
    let out = fttc(&["compare", "--against", "ttc", "--kind", "fractional", "--agents", "3", "--count", "5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let verify = |name: &str| {
        let path = scratch(name);
        fttc(&[
            "verify",
            "--input",
            &corpus("illustration.json"),
            "--assignment",
            &corpus("cc_output.json"),
            "--output",
            path.to_str().unwrap(),
        ]);
        std::fs::read(path).unwrap()
    };
    assert_eq!(verify("v1.json"), verify("v2.json"));

    let solve = |name: &str| {
        let path = scratch(name);
        let trace = scratch(&format!("trace_{name}"));
        fttc(&["solve", "--input", &corpus("imposs.json"), "--output", path.to_str().unwrap(), "--trace", trace.to_str().unwrap()]);
        (std::fs::read(path).unwrap(), std::fs::read(trace).unwrap())
    };
    assert_eq!(solve("s1.json"), solve("s2.json"));
}
