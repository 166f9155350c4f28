//! C interface to the secgame solver.
//!
//! Games and equilibria live behind opaque handles. Every fallible call
//! returns a [`SecgameStatus`]; on failure a message is available from
//! [`secgame_last_error`] on the same thread. Strings returned through
//! `char **out` parameters are owned by the caller and released with
//! [`secgame_string_free`]. Numbers inside JSON documents are exact
//! `"p/q"` strings.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use secgame::candidates::SolvedEquilibrium;
use secgame::document;
use secgame::error::Error;
use secgame::model::SecurityGame;
use secgame::optimizer::{optimize_exhaustive, optimize_pseudopoly, PseudoOptions};
use secgame::oracle::verify_equilibrium;
use secgame::projection::nearest_additive;
use secgame::protective::solve_protective;
use secgame::rational::approx;
use secgame::solver::solve_nash;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecgameStatus {
    Ok = 0,
    /// The question has a negative answer (no feasible equilibrium,
    /// unrealizable request).
    Infeasible = 1,
    /// Malformed document or a game that violates a model invariant.
    InvalidInput = 2,
    BudgetExceeded = 3,
    Internal = 4,
    NullArgument = 5,
    InvalidUtf8 = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Search mode for [`secgame_optimize_json`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecgameOptimizeMode {
    Pseudo = 0,
    Exhaustive = 1,
}

/// A validated game.
pub struct SecgameGame(SecurityGame);

/// A computed equilibrium.
pub struct SecgameEquilibrium(SolvedEquilibrium);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SecgameStatus {
    match e {
        Error::Infeasible(_) => SecgameStatus::Infeasible,
        Error::Budget(_) => SecgameStatus::BudgetExceeded,
        Error::Internal(_) => SecgameStatus::Internal,
        Error::Document(_) | Error::Numeral(_) | Error::Invalid(_) | Error::Precondition(_) => {
            SecgameStatus::InvalidInput
        }
    }
}

struct Failure(SecgameStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SecgameStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SecgameStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside secgame".into());
            SecgameStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SecgameStatus::NullArgument, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SecgameStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `out` must be null or valid for a pointer write.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| Failure(SecgameStatus::Internal, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// # Safety
/// `out` must be null or valid for a pointer write.
unsafe fn put_box<T>(out: *mut *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

/// # Safety
/// `p` must be null or a handle returned by this library and not freed.
unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn secgame_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn secgame_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned through an `out` parameter of
/// this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn secgame_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a game document. `require_distinct` nonzero also
/// checks that parameters are pairwise distinct.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn secgame_game_from_json(
    json: *const c_char,
    require_distinct: c_int,
    out: *mut *mut SecgameGame,
) -> SecgameStatus {
    guard(|| {
        let game = document::parse_game(text(json, "json")?, require_distinct != 0)?;
        put_box(out, SecgameGame(game))
    })
}

/// # Safety
/// `game` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn secgame_game_free(game: *mut SecgameGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of targets, or 0 for a null handle.
///
/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn secgame_game_target_count(game: *const SecgameGame) -> usize {
    game.as_ref().map_or(0, |g| g.0.m())
}

/// The game as a JSON document.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn secgame_game_to_json(game: *const SecgameGame, out: *mut *mut c_char) -> SecgameStatus {
    guard(|| {
        let g = borrow(game, "game")?;
        put_string(out, document::game_to_json(&g.0).to_string())
    })
}

/// Computes an equilibrium. `protective` nonzero uses the sweep for fully
/// protective games, which rejects other games.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn secgame_solve(
    game: *const SecgameGame,
    protective: c_int,
    out: *mut *mut SecgameEquilibrium,
) -> SecgameStatus {
    guard(|| {
        let g = borrow(game, "game")?;
        let eq = if protective != 0 { solve_protective(&g.0)? } else { solve_nash(&g.0)? };
        put_box(out, SecgameEquilibrium(eq))
    })
}

/// # Safety
/// `eq` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn secgame_equilibrium_free(eq: *mut SecgameEquilibrium) {
    if !eq.is_null() {
        drop(Box::from_raw(eq));
    }
}

/// The equilibrium as a JSON document (type, counts, constants, marginals,
/// values, multiplicity).
///
/// # Safety
/// `eq` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn secgame_equilibrium_to_json(
    eq: *const SecgameEquilibrium,
    out: *mut *mut c_char,
) -> SecgameStatus {
    guard(|| {
        let e = borrow(eq, "equilibrium")?;
        put_string(out, document::equilibrium_to_json(&e.0).to_string())
    })
}

/// Floating-point approximations of the attacker and defender values.
/// Exact values are in the JSON document.
///
/// # Safety
/// `eq` must be a live handle; `v_a` and `v_d` must be writable.
#[no_mangle]
pub unsafe extern "C" fn secgame_equilibrium_values(
    eq: *const SecgameEquilibrium,
    v_a: *mut f64,
    v_d: *mut f64,
) -> SecgameStatus {
    guard(|| {
        let e = borrow(eq, "equilibrium")?;
        if v_a.is_null() || v_d.is_null() {
            return Err(null("value pointer"));
        }
        *v_a = approx(&e.0.v_a);
        *v_d = approx(&e.0.v_d);
        Ok(())
    })
}

/// Checks a profile document against a game. Writes 1 to `is_equilibrium`
/// if it is an equilibrium, else 0; `out` (optional) receives the verdict
/// document with any deviation witness.
///
/// # Safety
/// `game` must be a live handle, `profile_json` a NUL-terminated string,
/// `is_equilibrium` writable, and `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn secgame_verify_json(
    game: *const SecgameGame,
    profile_json: *const c_char,
    is_equilibrium: *mut c_int,
    out: *mut *mut c_char,
) -> SecgameStatus {
    guard(|| {
        let g = borrow(game, "game")?;
        let profile = document::parse_profile(text(profile_json, "profile_json")?)?;
        if is_equilibrium.is_null() {
            return Err(null("is_equilibrium"));
        }
        let verdict = verify_equilibrium(&g.0, &profile)?;
        *is_equilibrium = c_int::from(verdict.is_equilibrium);
        if !out.is_null() {
            put_string(out, document::verdict_to_json(&verdict).to_string())?;
        }
        Ok(())
    })
}

/// Optimizes attacker payoffs within intervals. `game_json` supplies the
/// defender payoffs and resources; `budget` caps the exhaustive mode.
///
/// # Safety
/// Both inputs must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn secgame_optimize_json(
    game_json: *const c_char,
    intervals_json: *const c_char,
    mode: SecgameOptimizeMode,
    budget: u64,
    out: *mut *mut c_char,
) -> SecgameStatus {
    guard(|| {
        let (defender, k_a, k_d) = document::parse_defender(text(game_json, "game_json")?)?;
        let spec = document::parse_intervals(text(intervals_json, "intervals_json")?)?;
        let result = match mode {
            SecgameOptimizeMode::Pseudo => optimize_pseudopoly(&defender, k_a, k_d, &spec, &PseudoOptions::default())?,
            SecgameOptimizeMode::Exhaustive => optimize_exhaustive(&defender, k_a, k_d, &spec, budget)?,
        };
        put_string(out, document::optimization_to_json(&result).to_string())
    })
}

/// Nearest additive function of a set-function document.
///
/// # Safety
/// `table_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn secgame_project_json(table_json: *const c_char, out: *mut *mut c_char) -> SecgameStatus {
    guard(|| {
        let table = document::parse_set_function(text(table_json, "table_json")?)?;
        put_string(out, document::projection_to_json(&nearest_additive(&table)?).to_string())
    })
}
