use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

use secgame::cli::{run, BUDGET_ENV};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/fixtures").join(name).display().to_string()
}

fn secgame(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["secgame"];
    argv.extend_from_slice(args);
    let out = run(argv);
    let doc = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out.code, doc)
}

#[test]
fn solve_prints_the_equilibrium() {
    let (code, doc) = secgame(&["solve", &fixture("example1.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["type"], "I.A.i");
    assert_eq!(doc["v_d"], "-11232/1375");
    assert_eq!(doc["beta"][2], "2/5");
}

#[test]
fn protective_flag_reports_cells() {
    let (code, doc) = secgame(&["solve", "--protective", &fixture("example2_lb.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["v_d"], "-789/229");
    assert!(doc["cells_explored"].as_u64().unwrap() > 0);
}

#[test]
fn verify_distinguishes_equilibria() {
    let game = fixture("example1.json");
    let (code, doc) = secgame(&["verify", &game, &fixture("example1_profile.json")]);
    assert_eq!((code, doc["is_equilibrium"].as_bool()), (0, Some(true)));
    let (code, doc) = secgame(&["verify", &game, &fixture("example1_bad_profile.json")]);
    assert_eq!((code, doc["is_equilibrium"].as_bool()), (1, Some(false)));
}

#[test]
fn optimize_modes() {
    let (game, intervals) = (fixture("example2_lb.json"), fixture("example2_intervals.json"));
    let (code, doc) = secgame(&["optimize", "--mode", "exhaustive", &game, &intervals]);
    assert_eq!((code, doc["v_d"].as_str()), (0, Some("-453/173")));
    // Overlapping intervals are outside the structured optimizer's domain.
    let out = run(["secgame", "optimize", "--mode", "pseudo", &game, &intervals]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("overlap"), "{}", out.stderr);

    let (game, intervals) = (fixture("example3_game.json"), fixture("example3_intervals.json"));
    for mode in ["pseudo", "exhaustive"] {
        let (code, doc) = secgame(&["optimize", "--mode", mode, &game, &intervals]);
        assert_eq!((code, doc["v_d"].as_str()), (0, Some("-18")), "{mode}");
    }
    let (code, doc) = secgame(&["optimize", "--no-prune", &game, &intervals]);
    assert_eq!((code, doc["v_d"].as_str()), (0, Some("-18")));
}

#[test]
fn project_table_and_game() {
    let (code, doc) = secgame(&["project", &fixture("projection_m3_k2.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["x"], serde_json::json!(["7/5", "12/5", "17/5"]));
    let (code, doc) = secgame(&["approx-report", &fixture("subadditive_zero_sum.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["original"]["v_a"], "19/3");
}

#[test]
fn generate_is_deterministic_and_solvable() {
    let args = ["generate", "--type", "I.B.ii", "--r", "1", "--s", "1", "--ka", "3", "--kd", "2", "--seed", "7"];
    let (code, first) = secgame(&args);
    assert_eq!(code, 0);
    assert_eq!(secgame(&args).1, first);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("game.json");
    std::fs::write(&path, first.to_string()).unwrap();
    let (code, doc) = secgame(&["solve", path.to_str().unwrap()]);
    assert_eq!((code, doc["type"].as_str()), (0, Some("I.B.ii")));
}

#[test]
fn unrealizable_generate_request_is_infeasible() {
    let out = run(["secgame", "generate", "--type", "I.B.ii", "--r", "1", "--s", "2", "--ka", "3", "--kd", "3", "--seed", "7"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("unrealizable"), "{}", out.stderr);
}

#[test]
fn invalid_documents_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tied.json");
    let tied = r#"{"k_a": 1, "k_d": 1, "targets": [
        {"uac": "1", "uau": "3", "udc": "-1", "udu": "-4"},
        {"uac": "1", "uau": "5", "udc": "-2", "udu": "-6"}]}"#;
    std::fs::write(&path, tied).unwrap();
    let p = path.to_str().unwrap();
    let (code, doc) = secgame(&["validate", p]);
    assert_eq!(code, 2);
    assert!(doc["violations"][0].as_str().unwrap().contains("distinctness"));
    assert_eq!(secgame(&["validate", "--no-distinct", p]).0, 0);
    assert_eq!(secgame(&["solve", p]).0, 2);
    assert_eq!(secgame(&["solve", "/nonexistent/game.json"]).0, 2);
    assert_eq!(secgame(&["no-such-command"]).0, 2);
    assert_eq!(secgame(&["--help"]).0, 0);
}

#[test]
fn table_format_flattens_keys() {
    let out = run(["secgame", "--format", "table", "solve", &fixture("example1.json")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.lines().any(|l| l.starts_with("c2") && l.ends_with("756/1375")));
}

// The environment cap is read by the process, so exercise it through the
// binary rather than mutating this test process's environment.
#[test]
fn budget_environment_caps_the_exhaustive_search() {
    let bin = env!("CARGO_BIN_EXE_secgame");
    let args = ["optimize", "--mode", "exhaustive", &fixture("example2_lb.json"), &fixture("example2_intervals.json")];
    let capped = Command::new(bin).args(args).env(BUDGET_ENV, "10").output().unwrap();
    assert_eq!(capped.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("budget"));

    let roomy = Command::new(bin).args(args).env(BUDGET_ENV, "64").output().unwrap();
    assert_eq!(roomy.status.code(), Some(0));

    let flag = Command::new(bin).args(args).args(["--budget", "8"]).env(BUDGET_ENV, "64").output().unwrap();
    assert_eq!(flag.status.code(), Some(2));

    let garbage = Command::new(bin).args(args).env(BUDGET_ENV, "lots").output().unwrap();
    assert_eq!(garbage.status.code(), Some(2));
}

#[test]
fn reactance_fixture_is_well_formed() {
    let text = std::fs::read_to_string(fixture("reactance_14_bus.json")).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    let lines = doc["lines"].as_array().unwrap();
    assert_eq!((doc["buses"].as_u64(), lines.len()), (Some(14), 26));
    for l in lines {
        let (from, to) = (l["from"].as_u64().unwrap(), l["to"].as_u64().unwrap());
        assert!(1 <= from && from < to && to <= 14);
        assert!(l["reactance"].as_str().unwrap().parse::<f64>().unwrap() > 0.0);
    }
}
