//! JSON documents: games, profiles, interval specs, set-function tables and
//! the result documents written by the command-line tool.
//!
//! Numerals are read from strings (`"0.7"`, `"-8/5"`) or JSON integers and
//! always written as `"p/q"` strings. Targets in sets are 1-indexed.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::candidates::{Multiplicity, SolvedEquilibrium};
use crate::error::{Error, Result};
use crate::model::{validate_with, MarginalProfile, SecurityGame, SignMode, Target};
use crate::optimizer::{OptimizationResult, PayoffInterval, IntervalSpec};
use crate::oracle::Verdict;
use crate::projection::{AdditiveProjection, ApproximationReport, SetFunctionGame, SetFunctionTable};
use crate::rational::serde_str::NumeralInput;
use crate::rational::{approx, format, Rational};
use crate::realize::MixedStrategy;

fn numeral(n: NumeralInput, what: &str) -> Result<Rational> {
    n.into_rational().map_err(|e| Error::Document(format!("{what}: {e}")))
}

fn required(n: Option<NumeralInput>, what: &str) -> Result<Rational> {
    numeral(n.ok_or_else(|| Error::Document(format!("missing {what}")))?, what)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetDoc {
    uac: Option<NumeralInput>,
    uau: Option<NumeralInput>,
    udc: NumeralInput,
    udu: NumeralInput,
}

#[derive(Deserialize)]
struct GameDoc {
    m: Option<usize>,
    k_a: usize,
    k_d: usize,
    #[serde(default)]
    sign_mode: Option<String>,
    targets: Vec<TargetDoc>,
}

fn read_game_doc(text: &str) -> Result<GameDoc> {
    let doc: GameDoc = serde_json::from_str(text)?;
    if let Some(m) = doc.m {
        if m != doc.targets.len() {
            return Err(Error::Document(format!("m = {m} but {} targets listed", doc.targets.len())));
        }
    }
    Ok(doc)
}

fn sign_mode(text: Option<&str>, targets: &[Target]) -> Result<SignMode> {
    match text {
        Some("strict") => Ok(SignMode::Strict),
        Some("permissive") => Ok(SignMode::Permissive),
        Some(other) => Err(Error::Document(format!("sign_mode must be \"strict\" or \"permissive\", got {other:?}"))),
        None => Ok(SecurityGame::new_unchecked(1, 1, targets.to_vec()).sign_mode()),
    }
}

/// Reads and validates a game. With `require_distinct` the distinctness
/// assumption is checked as well. Sign strictness is taken from the
/// optional `sign_mode` field, else inferred (protective games are
/// permissive).
pub fn parse_game(text: &str, require_distinct: bool) -> Result<SecurityGame> {
    let doc = read_game_doc(text)?;
    let mut targets = Vec::with_capacity(doc.targets.len());
    for (i, t) in doc.targets.into_iter().enumerate() {
        let n = i + 1;
        targets.push(Target::new(
            required(t.uac, &format!("uac of target {n}"))?,
            required(t.uau, &format!("uau of target {n}"))?,
            numeral(t.udc, &format!("udc of target {n}"))?,
            numeral(t.udu, &format!("udu of target {n}"))?,
        ));
    }
    let mode = sign_mode(doc.sign_mode.as_deref(), &targets)?;
    let game = SecurityGame::new_unchecked(doc.k_a, doc.k_d, targets);
    let report = validate_with(&game, mode, require_distinct);
    if report.is_admissible() {
        Ok(game)
    } else {
        Err(Error::Invalid(report))
    }
}

/// Per-target `(udc, udu)` pairs with the two budgets `k_a`, `k_d`.
pub type DefenderDocument = (Vec<(Rational, Rational)>, usize, usize);

/// Defender payoffs `(udc, udu)` and resources from a game document whose
/// attacker payoffs may be omitted.
pub fn parse_defender(text: &str) -> Result<DefenderDocument> {
    let doc = read_game_doc(text)?;
    let mut out = Vec::with_capacity(doc.targets.len());
    for (i, t) in doc.targets.into_iter().enumerate() {
        let n = i + 1;
        out.push((numeral(t.udc, &format!("udc of target {n}"))?, numeral(t.udu, &format!("udu of target {n}"))?));
    }
    Ok((out, doc.k_a, doc.k_d))
}

pub fn game_to_json(game: &SecurityGame) -> Value {
    let targets: Vec<Value> = game
        .targets()
        .iter()
        .map(|t| json!({"uac": format(&t.uac), "uau": format(&t.uau), "udc": format(&t.udc), "udu": format(&t.udu)}))
        .collect();
    json!({"m": game.m(), "k_a": game.k_a(), "k_d": game.k_d(), "targets": targets})
}

#[derive(Deserialize)]
struct ProfileDoc {
    alpha: Vec<NumeralInput>,
    beta: Vec<NumeralInput>,
}

fn numerals(v: Vec<NumeralInput>, what: &str) -> Result<Vec<Rational>> {
    v.into_iter().enumerate().map(|(i, n)| numeral(n, &format!("{what}({})", i + 1))).collect()
}

/// Reads `{"alpha": [...], "beta": [...]}`; other fields are ignored so a
/// solve result can be fed back in.
pub fn parse_profile(text: &str) -> Result<MarginalProfile> {
    let doc: ProfileDoc = serde_json::from_str(text)?;
    Ok(MarginalProfile::new(numerals(doc.alpha, "alpha")?, numerals(doc.beta, "beta")?))
}

pub fn profile_to_json(p: &MarginalProfile) -> Value {
    json!({"alpha": strings(&p.alpha), "beta": strings(&p.beta)})
}

#[derive(Deserialize)]
struct IntervalTargetDoc {
    uac: (NumeralInput, NumeralInput),
    uau: (NumeralInput, NumeralInput),
}

#[derive(Deserialize)]
struct IntervalDoc {
    targets: Vec<IntervalTargetDoc>,
}

/// Reads `{"targets": [{"uac": [lb, ub], "uau": [lb, ub]}, ...]}`.
pub fn parse_intervals(text: &str) -> Result<IntervalSpec> {
    let doc: IntervalDoc = serde_json::from_str(text)?;
    let mut targets = Vec::with_capacity(doc.targets.len());
    for (i, t) in doc.targets.into_iter().enumerate() {
        let n = i + 1;
        targets.push(PayoffInterval {
            uac: (numeral(t.uac.0, &format!("uac lb of target {n}"))?, numeral(t.uac.1, &format!("uac ub of target {n}"))?),
            uau: (numeral(t.uau.0, &format!("uau lb of target {n}"))?, numeral(t.uau.1, &format!("uau ub of target {n}"))?),
        });
    }
    let spec = IntervalSpec::new(targets);
    spec.check()?;
    Ok(spec)
}

pub fn intervals_to_json(spec: &IntervalSpec) -> Value {
    let targets: Vec<Value> = spec
        .targets()
        .iter()
        .map(|t| json!({"uac": [format(&t.uac.0), format(&t.uac.1)], "uau": [format(&t.uau.0), format(&t.uau.1)]}))
        .collect();
    json!({"targets": targets})
}

#[derive(Deserialize)]
struct EntryDoc {
    set: Vec<usize>,
    value: NumeralInput,
}

#[derive(Deserialize)]
struct SetFunctionDoc {
    m: usize,
    k: usize,
    values: Vec<EntryDoc>,
}

fn table_from_doc(doc: SetFunctionDoc) -> Result<SetFunctionTable> {
    let mut entries = Vec::with_capacity(doc.values.len());
    for e in doc.values {
        if e.set.contains(&0) {
            return Err(Error::Document(format!("set {:?}: targets are numbered from 1", e.set)));
        }
        let what = format!("value of {:?}", e.set);
        entries.push((e.set.iter().map(|i| i - 1).collect(), numeral(e.value, &what)?));
    }
    SetFunctionTable::new(doc.m, doc.k, entries)
}

/// Reads `{"m": .., "k": .., "values": [{"set": [1, 3], "value": "5"}, ...]}`.
pub fn parse_set_function(text: &str) -> Result<SetFunctionTable> {
    table_from_doc(serde_json::from_str(text)?)
}

pub fn set_function_to_json(f: &SetFunctionTable) -> Value {
    let values: Vec<Value> = f
        .entries()
        .iter()
        .map(|(s, v)| json!({"set": s.iter().map(|i| i + 1).collect::<Vec<_>>(), "value": format(v)}))
        .collect();
    json!({"m": f.m(), "k": f.k(), "values": values})
}

#[derive(Deserialize)]
struct SetFunctionGameDoc {
    k_a: usize,
    k_d: usize,
    uac: SetFunctionDoc,
    uau: SetFunctionDoc,
    udc: SetFunctionDoc,
    udu: SetFunctionDoc,
}

/// Reads a game whose four payoffs are set-function documents of order
/// `k_a`.
pub fn parse_set_function_game(text: &str) -> Result<SetFunctionGame> {
    let doc: SetFunctionGameDoc = serde_json::from_str(text)?;
    SetFunctionGame::new(
        doc.k_a,
        doc.k_d,
        table_from_doc(doc.uac)?,
        table_from_doc(doc.uau)?,
        table_from_doc(doc.udc)?,
        table_from_doc(doc.udu)?,
    )
}

pub fn set_function_game_to_json(g: &SetFunctionGame) -> Value {
    json!({
        "k_a": g.k_a,
        "k_d": g.k_d,
        "uac": set_function_to_json(&g.uac),
        "uau": set_function_to_json(&g.uau),
        "udc": set_function_to_json(&g.udc),
        "udu": set_function_to_json(&g.udu),
    })
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format).collect()
}

fn approxes(v: &[Rational]) -> Vec<f64> {
    v.iter().map(approx).collect()
}

fn one_indexed(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn multiplicity_to_json(m: &Multiplicity) -> Value {
    match m {
        Multiplicity::Unique => json!({"kind": "unique"}),
        Multiplicity::Continuum { variable, interval, representative } => json!({
            "kind": "continuum",
            "variable": variable.to_string(),
            "interval": interval.to_string(),
            "representative": format(representative),
        }),
        Multiplicity::Family(why) => json!({"kind": "family", "description": why}),
    }
}

pub fn equilibrium_to_json(eq: &SolvedEquilibrium) -> Value {
    let sets: Map<String, Value> = eq
        .partition
        .sets_one_indexed()
        .into_iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(n, s)| (format!("I{}", n + 1), json!(s)))
        .collect();
    let special = |j: Option<usize>| j.map(|j| j + 1);
    json!({
        "type": eq.ty.label(),
        "r": eq.r,
        "s": eq.s,
        "t": eq.t,
        "c1": format(&eq.c1),
        "c2": format(&eq.c2),
        "alpha": strings(&eq.profile.alpha),
        "beta": strings(&eq.profile.beta),
        "v_a": format(&eq.v_a),
        "v_d": format(&eq.v_d),
        "partition": sets,
        "j2": special(eq.j2),
        "j6": special(eq.j6),
        "j8": special(eq.j8),
        "multiplicity": multiplicity_to_json(&eq.multiplicity),
        "approx": {
            "c1": approx(&eq.c1),
            "c2": approx(&eq.c2),
            "alpha": approxes(&eq.profile.alpha),
            "beta": approxes(&eq.profile.beta),
            "v_a": approx(&eq.v_a),
            "v_d": approx(&eq.v_d),
        },
    })
}

pub fn verdict_to_json(v: &Verdict) -> Value {
    let witness = v.witness.as_ref().map(|w| {
        json!({
            "player": w.player.to_string(),
            "from": w.from + 1,
            "to": w.to + 1,
            "amount": format(&w.amount),
            "gain": format(&w.gain),
            "description": w.to_string(),
        })
    });
    json!({
        "is_equilibrium": v.is_equilibrium,
        "v_a": format(&v.v_a),
        "v_d": format(&v.v_d),
        "best_response_attacker": format(&v.best_attacker),
        "best_response_defender": format(&v.best_defender),
        "constants_exist": v.constants_exist,
        "witness": witness,
    })
}

pub fn mixed_strategy_to_json(s: &MixedStrategy) -> Value {
    let support: Vec<Value> = s
        .support
        .iter()
        .map(|(set, p)| json!({"set": one_indexed(set), "probability": format(p), "approx": approx(p)}))
        .collect();
    json!({"k": s.k, "support": support})
}

pub fn optimization_to_json(r: &OptimizationResult) -> Value {
    let e = &r.explored;
    json!({
        "v_d": format(&r.v_d),
        "choice": {
            "uac": r.best_choice.uac.iter().map(|x| x.label()).collect::<Vec<_>>(),
            "uau": r.best_choice.uau.iter().map(|x| x.label()).collect::<Vec<_>>(),
        },
        "game": game_to_json(&r.game),
        "equilibrium": equilibrium_to_json(&r.equilibrium),
        "explored": {
            "choices": e.choices,
            "inadmissible": e.inadmissible,
            "cells": e.cells,
            "cells_pruned": e.cells_pruned,
            "windows": e.windows,
            "windows_pruned": e.windows_pruned,
            "states": e.states,
            "states_pruned": e.states_pruned,
            "evaluations": e.evaluations,
        },
        "approx": {"v_d": approx(&r.v_d)},
    })
}

pub fn projection_to_json(p: &AdditiveProjection) -> Value {
    json!({
        "x": strings(&p.x),
        "distance_sq": format(&p.distance_sq),
        "gamma": strings(&p.gamma),
        "approx": {"x": approxes(&p.x), "distance_sq": approx(&p.distance_sq)},
    })
}

pub fn report_to_json(r: &ApproximationReport) -> Value {
    let opt = |x: &Option<Rational>| x.as_ref().map(format);
    let opt_approx = |x: &Option<Rational>| x.as_ref().map(approx);
    json!({
        "zero_sum": r.zero_sum,
        "original": {"v_a": format(&r.original.0), "v_d": format(&r.original.1)},
        "projected": {"v_a": format(&r.projected.0), "v_d": format(&r.projected.1)},
        "cross_defender": format(&r.cross_defender),
        "cross_attacker": format(&r.cross_attacker),
        "rel_error_defender": opt(&r.rel_error_defender),
        "rel_error_attacker": opt(&r.rel_error_attacker),
        "rel_error_value": opt(&r.rel_error_value),
        "approx": {
            "rel_error_defender": opt_approx(&r.rel_error_defender),
            "rel_error_attacker": opt_approx(&r.rel_error_attacker),
            "rel_error_value": opt_approx(&r.rel_error_value),
        },
    })
}
