use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use secgame_ffi::*;

const EXAMPLE1: &str = include_str!("../../../docs/fixtures/example1.json");
const EXAMPLE2_LB: &str = include_str!("../../../docs/fixtures/example2_lb.json");
const EXAMPLE3_GAME: &str = include_str!("../../../docs/fixtures/example3_game.json");
const EXAMPLE3_INTERVALS: &str = include_str!("../../../docs/fixtures/example3_intervals.json");

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Takes ownership of a library string.
unsafe fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    secgame_string_free(p);
    s
}

fn last_error() -> String {
    let p = secgame_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

unsafe fn load(doc: &str) -> *mut SecgameGame {
    let mut g = ptr::null_mut();
    assert_eq!(secgame_game_from_json(c(doc).as_ptr(), 1, &mut g), SecgameStatus::Ok);
    g
}

#[test]
fn solve_round_trip() {
    unsafe {
        let g = load(EXAMPLE1);
        assert_eq!(secgame_game_target_count(g), 4);
        let mut eq = ptr::null_mut();
        assert_eq!(secgame_solve(g, 0, &mut eq), SecgameStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(secgame_equilibrium_to_json(eq, &mut out), SecgameStatus::Ok);
        let doc = json(&take(out));
        assert_eq!(doc["type"], "I.A.i");
        assert_eq!(doc["c2"], "756/1375");
        assert_eq!(doc["v_d"], "-11232/1375");
        let (mut va, mut vd) = (0.0, 0.0);
        assert_eq!(secgame_equilibrium_values(eq, &mut va, &mut vd), SecgameStatus::Ok);
        assert_eq!(va, 3.0);
        assert!((vd + 11232.0 / 1375.0).abs() < 1e-12);
        secgame_equilibrium_free(eq);
        secgame_game_free(g);
    }
}

#[test]
fn protective_solve_and_rejection() {
    unsafe {
        let g = load(EXAMPLE2_LB);
        let mut eq = ptr::null_mut();
        assert_eq!(secgame_solve(g, 1, &mut eq), SecgameStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(secgame_equilibrium_to_json(eq, &mut out), SecgameStatus::Ok);
        assert_eq!(json(&take(out))["v_d"], "-789/229");
        secgame_equilibrium_free(eq);
        secgame_game_free(g);

        let g = load(EXAMPLE1);
        let mut eq = ptr::null_mut();
        assert_eq!(secgame_solve(g, 1, &mut eq), SecgameStatus::InvalidInput);
        assert!(eq.is_null());
        secgame_game_free(g);
    }
}

#[test]
fn verify_reports_witness() {
    unsafe {
        let g = load(EXAMPLE1);
        let bad = c(r#"{"alpha": ["252/275", "216/275", "168/275", "189/275"], "beta": ["3/10", "1/2", "1/2", "7/10"]}"#);
        let mut is_eq = -1;
        let mut out = ptr::null_mut();
        assert_eq!(secgame_verify_json(g, bad.as_ptr(), &mut is_eq, &mut out), SecgameStatus::Ok);
        assert_eq!(is_eq, 0);
        let doc = json(&take(out));
        assert_eq!(doc["witness"]["player"], "attacker");
        let good = c(r#"{"alpha": ["252/275", "216/275", "168/275", "189/275"], "beta": ["3/10", "1/2", "2/5", "4/5"]}"#);
        assert_eq!(secgame_verify_json(g, good.as_ptr(), &mut is_eq, ptr::null_mut()), SecgameStatus::Ok);
        assert_eq!(is_eq, 1);
        secgame_game_free(g);
    }
}

#[test]
fn optimize_and_project() {
    unsafe {
        let mut out = ptr::null_mut();
        let st = secgame_optimize_json(
            c(EXAMPLE3_GAME).as_ptr(),
            c(EXAMPLE3_INTERVALS).as_ptr(),
            SecgameOptimizeMode::Pseudo,
            0,
            &mut out,
        );
        assert_eq!(st, SecgameStatus::Ok, "{}", last_error());
        assert_eq!(json(&take(out))["v_d"], "-18");

        let st = secgame_optimize_json(
            c(EXAMPLE3_GAME).as_ptr(),
            c(EXAMPLE3_INTERVALS).as_ptr(),
            SecgameOptimizeMode::Exhaustive,
            4,
            &mut out,
        );
        assert_eq!(st, SecgameStatus::BudgetExceeded);

        let table = c(r#"{"m": 3, "k": 2, "values": [
            {"set": [1], "value": 1}, {"set": [2], "value": 2}, {"set": [3], "value": 3},
            {"set": [1, 2], "value": 4}, {"set": [1, 3], "value": 5}, {"set": [2, 3], "value": 6}]}"#);
        assert_eq!(secgame_project_json(table.as_ptr(), &mut out), SecgameStatus::Ok);
        assert_eq!(json(&take(out))["x"], serde_json::json!(["7/5", "12/5", "17/5"]));
    }
}

#[test]
fn errors_are_reported_not_raised() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(secgame_game_from_json(ptr::null(), 0, &mut g), SecgameStatus::NullArgument);
        assert!(last_error().contains("json is null"));
        assert_eq!(secgame_game_from_json(c("{").as_ptr(), 0, &mut g), SecgameStatus::InvalidInput);
        let flat = c(r#"{"k_a": 1, "k_d": 1, "targets": [
            {"uac": "2", "uau": "2", "udc": "-1", "udu": "-2"},
            {"uac": "1", "uau": "3", "udc": "-1", "udu": "-3"}]}"#);
        assert_eq!(secgame_game_from_json(flat.as_ptr(), 0, &mut g), SecgameStatus::InvalidInput);
        assert!(last_error().contains("delta_a(1)"));
        assert!(g.is_null());

        let bytes = [0xffu8, 0xfe, 0];
        assert_eq!(secgame_game_from_json(bytes.as_ptr().cast(), 0, &mut g), SecgameStatus::InvalidUtf8);

        let mut eq = ptr::null_mut();
        assert_eq!(secgame_solve(ptr::null(), 0, &mut eq), SecgameStatus::NullArgument);
        assert_eq!(secgame_game_target_count(ptr::null()), 0);
        secgame_game_free(ptr::null_mut());
        secgame_equilibrium_free(ptr::null_mut());
        secgame_string_free(ptr::null_mut());
        let v = CStr::from_ptr(secgame_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(manifest_dir().join("include/secgame.h")).unwrap();
    for name in [
        "secgame_game_from_json",
        "secgame_solve",
        "secgame_equilibrium_to_json",
        "secgame_verify_json",
        "secgame_optimize_json",
        "secgame_project_json",
        "secgame_last_error",
        "secgame_string_free",
        "typedef struct SecgameGame SecgameGame;",
        "SECGAME_STATUS_INVALID_INPUT = 2",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles and runs a C program against the static library when a C
/// compiler is available.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libsecgame_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("I.A.i"));
}
