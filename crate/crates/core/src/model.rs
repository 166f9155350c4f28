//! Games, marginal profiles and expected outcomes.
//!
//! Targets are 0-indexed inside the crate. Everything that reaches a user
//! (reports, documents, error messages) is 1-indexed.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{Rational, Show};

/// Payoffs of a single target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    /// Attacker payoff when the attacked target is covered.
    pub uac: Rational,
    /// Attacker payoff when the attacked target is uncovered.
    pub uau: Rational,
    /// Defender payoff when the attacked target is covered.
    pub udc: Rational,
    /// Defender payoff when the attacked target is uncovered.
    pub udu: Rational,
}

impl Target {
    pub fn new(uac: Rational, uau: Rational, udc: Rational, udu: Rational) -> Self {
        Target { uac, uau, udc, udu }
    }

    pub fn delta_a(&self) -> Rational {
        &self.uau - &self.uac
    }

    pub fn delta_d(&self) -> Rational {
        &self.udc - &self.udu
    }

    /// Attacker payoff from this target given coverage probability `beta`.
    pub fn attacker_value(&self, beta: &Rational) -> Rational {
        &self.uau - beta * self.delta_a()
    }

    /// Defender payoff from this target given coverage probability `beta`.
    pub fn defender_value(&self, beta: &Rational) -> Rational {
        &self.udu + beta * self.delta_d()
    }
}

/// How strictly payoff signs are enforced.
///
/// `Permissive` allows zero payoffs so that fully protective games
/// (`uac = udc = 0`) can be expressed. The delta conditions are enforced in
/// both modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignMode {
    #[default]
    Strict,
    Permissive,
}

/// An additive security game with singleton schedules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecurityGame {
    k_a: usize,
    k_d: usize,
    targets: Vec<Target>,
}

impl SecurityGame {
    /// Builds a game, rejecting it if any structural invariant fails.
    /// Distinctness is not required here; see [`validate`].
    pub fn new(k_a: usize, k_d: usize, targets: Vec<Target>, mode: SignMode) -> Result<Self> {
        let game = Self::new_unchecked(k_a, k_d, targets);
        let report = validate_with(&game, mode, false);
        if report.is_admissible() {
            Ok(game)
        } else {
            Err(Error::Invalid(report))
        }
    }

    /// Builds a game without checking anything. Used for inputs that are
    /// only going to be inspected by [`validate`].
    pub fn new_unchecked(k_a: usize, k_d: usize, targets: Vec<Target>) -> Self {
        SecurityGame { k_a, k_d, targets }
    }

    pub fn m(&self) -> usize {
        self.targets.len()
    }

    pub fn k_a(&self) -> usize {
        self.k_a
    }

    pub fn k_d(&self) -> usize {
        self.k_d
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn target(&self, i: usize) -> &Target {
        &self.targets[i]
    }

    pub fn delta_a(&self) -> Vec<Rational> {
        self.targets.iter().map(Target::delta_a).collect()
    }

    pub fn delta_d(&self) -> Vec<Rational> {
        self.targets.iter().map(Target::delta_d).collect()
    }

    /// Covered attacks yield nothing to either player.
    pub fn is_fully_protective(&self) -> bool {
        self.targets
            .iter()
            .all(|t| t.uac.is_zero() && t.udc.is_zero())
    }

    /// Fully protective and `uau = -udu` on every target.
    pub fn is_zero_sum_protective(&self) -> bool {
        self.is_fully_protective() && self.targets.iter().all(|t| t.uau == -&t.udu)
    }

    pub fn sign_mode(&self) -> SignMode {
        if self.is_fully_protective() {
            SignMode::Permissive
        } else {
            SignMode::Strict
        }
    }

    pub fn orders(&self) -> CanonicalOrders {
        CanonicalOrders::new(self)
    }
}

/// Sign and delta conditions of a single target.
pub fn target_admissible(t: &Target, mode: SignMode) -> bool {
    let zero = Rational::zero();
    let (attacker_ok, defender_ok) = match mode {
        SignMode::Strict => (t.uac > zero && t.uau > zero, t.udc < zero && t.udu < zero),
        SignMode::Permissive => (t.uac >= zero && t.uau >= zero, t.udc <= zero && t.udu <= zero),
    };
    attacker_ok && defender_ok && t.delta_a() > zero && t.delta_d() > zero
}

/// Marginal attack (`alpha`) and coverage (`beta`) probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalProfile {
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
}

impl MarginalProfile {
    pub fn new(alpha: Vec<Rational>, beta: Vec<Rational>) -> Self {
        MarginalProfile { alpha, beta }
    }

    /// Checks dimensions, ranges and resource sums against `game`.
    pub fn check(&self, game: &SecurityGame) -> Result<()> {
        let mut report = ValidationReport::default();
        let m = game.m();
        if self.alpha.len() != m || self.beta.len() != m {
            report.push(Violation::Dimension {
                expected: m,
                alpha: self.alpha.len(),
                beta: self.beta.len(),
            });
            return Err(Error::Invalid(report));
        }
        let unit = |x: &Rational| *x >= Rational::zero() && *x <= Rational::one();
        for i in 0..m {
            if !unit(&self.alpha[i]) {
                report.push(Violation::MarginalRange {
                    which: "alpha",
                    target: i + 1,
                    value: self.alpha[i].clone(),
                });
            }
            if !unit(&self.beta[i]) {
                report.push(Violation::MarginalRange {
                    which: "beta",
                    target: i + 1,
                    value: self.beta[i].clone(),
                });
            }
        }
        let sa = crate::rational::sum(&self.alpha);
        if sa != crate::rational::int(game.k_a() as i64) {
            report.push(Violation::MarginalSum {
                which: "alpha",
                expected: game.k_a(),
                actual: sa,
            });
        }
        let sb = crate::rational::sum(&self.beta);
        if sb != crate::rational::int(game.k_d() as i64) {
            report.push(Violation::MarginalSum {
                which: "beta",
                expected: game.k_d(),
                actual: sb,
            });
        }
        if report.is_admissible() {
            Ok(())
        } else {
            Err(Error::Invalid(report))
        }
    }
}

/// Target permutations sorted ascending by each key, ties broken by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalOrders {
    pub perm_uau: Vec<usize>,
    pub perm_uac: Vec<usize>,
    pub perm_dd: Vec<usize>,
    pub perm_udu: Vec<usize>,
}

impl CanonicalOrders {
    pub fn new(game: &SecurityGame) -> Self {
        let by = |key: &dyn Fn(&Target) -> Rational| {
            let mut idx: Vec<usize> = (0..game.m()).collect();
            idx.sort_by(|&a, &b| key(game.target(a)).cmp(&key(game.target(b))).then(a.cmp(&b)));
            idx
        };
        CanonicalOrders {
            perm_uau: by(&|t| t.uau.clone()),
            perm_uac: by(&|t| t.uac.clone()),
            perm_dd: by(&|t| t.delta_d()),
            perm_udu: by(&|t| t.udu.clone()),
        }
    }
}

/// Expected payoffs `(v_a, v_d)` of a marginal profile.
pub fn expected_outcomes(game: &SecurityGame, profile: &MarginalProfile) -> Result<(Rational, Rational)> {
    profile.check(game)?;
    Ok(expected_outcomes_unchecked(game, &profile.alpha, &profile.beta))
}

pub(crate) fn expected_outcomes_unchecked(
    game: &SecurityGame,
    alpha: &[Rational],
    beta: &[Rational],
) -> (Rational, Rational) {
    let mut va = Rational::zero();
    let mut vd = Rational::zero();
    for (t, (a, b)) in game.targets().iter().zip(alpha.iter().zip(beta)) {
        if a.is_zero() {
            continue;
        }
        let exposed = Rational::one() - b;
        va += a * (&t.uac * b + &t.uau * &exposed);
        vd += a * (&t.udc * b + &t.udu * &exposed);
    }
    (va, vd)
}

/// Payoff quantity whose values must be pairwise distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistinctKey {
    Uac,
    Uau,
    DeltaD,
    /// An attacker covered payoff equal to an attacker uncovered payoff.
    UacUau,
}

impl fmt::Display for DistinctKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistinctKey::Uac => "uac",
            DistinctKey::Uau => "uau",
            DistinctKey::DeltaD => "delta_d",
            DistinctKey::UacUau => "uac/uau",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    AttackerResources { k_a: usize, m: usize },
    DefenderResources { k_d: usize, m: usize },
    DeltaA { target: usize },
    DeltaD { target: usize },
    Sign { target: usize, field: &'static str, value: Rational, permissive: bool },
    /// Distinctness (genericity) assumption violated by two targets.
    Distinct { key: DistinctKey, first: usize, second: usize },
    Dimension { expected: usize, alpha: usize, beta: usize },
    MarginalRange { which: &'static str, target: usize, value: Rational },
    MarginalSum { which: &'static str, expected: usize, actual: Rational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AttackerResources { k_a, m } => {
                write!(f, "1 <= k_a required and k_a < m required (k_a = {k_a}, m = {m})")
            }
            Violation::DefenderResources { k_d, m } => {
                write!(f, "1 <= k_d required and k_d < m required (k_d = {k_d}, m = {m})")
            }
            Violation::DeltaA { target } => write!(f, "delta_a({target}) must be positive"),
            Violation::DeltaD { target } => write!(f, "delta_d({target}) must be positive"),
            Violation::Sign { target, field, value, permissive } => {
                let rule = match (*field, *permissive) {
                    ("uac" | "uau", false) => "> 0",
                    ("uac" | "uau", true) => ">= 0",
                    (_, false) => "< 0",
                    (_, true) => "<= 0",
                };
                write!(f, "{field}({target}) = {} must be {rule}", Show(value))
            }
            Violation::Distinct { key, first, second } => write!(
                f,
                "distinctness assumption violated: {key} equal on targets {first}, {second}"
            ),
            Violation::Dimension { expected, alpha, beta } => write!(
                f,
                "profile dimension mismatch: expected {expected}, got alpha {alpha} / beta {beta}"
            ),
            Violation::MarginalRange { which, target, value } => {
                write!(f, "{which}({target}) = {} outside [0, 1]", Show(value))
            }
            Violation::MarginalSum { which, expected, actual } => {
                write!(f, "sum of {which} is {} but must equal {expected}", Show(actual))
            }
        }
    }
}

/// Every violated invariant of a game or profile. Empty means admissible.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn messages(&self) -> Vec<String> {
        self.violations.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.messages().join("; "))
    }
}

/// Validates a game. Sign strictness is inferred: fully protective games are
/// checked permissively.
pub fn validate(game: &SecurityGame, require_distinct: bool) -> ValidationReport {
    validate_with(game, game.sign_mode(), require_distinct)
}

pub fn validate_with(game: &SecurityGame, mode: SignMode, require_distinct: bool) -> ValidationReport {
    let mut report = ValidationReport::default();
    let m = game.m();
    if game.k_a() < 1 || game.k_a() >= m {
        report.push(Violation::AttackerResources { k_a: game.k_a(), m });
    }
    if game.k_d() < 1 || game.k_d() >= m {
        report.push(Violation::DefenderResources { k_d: game.k_d(), m });
    }
    let permissive = mode == SignMode::Permissive;
    let zero = Rational::zero();
    for (i, t) in game.targets().iter().enumerate() {
        let n = i + 1;
        let attacker_ok = |v: &Rational| if permissive { *v >= zero } else { *v > zero };
        let defender_ok = |v: &Rational| if permissive { *v <= zero } else { *v < zero };
        for (field, value, ok) in [
            ("uac", &t.uac, attacker_ok(&t.uac)),
            ("uau", &t.uau, attacker_ok(&t.uau)),
            ("udc", &t.udc, defender_ok(&t.udc)),
            ("udu", &t.udu, defender_ok(&t.udu)),
        ] {
            if !ok {
                report.push(Violation::Sign {
                    target: n,
                    field,
                    value: value.clone(),
                    permissive,
                });
            }
        }
        if t.delta_a() <= zero {
            report.push(Violation::DeltaA { target: n });
        }
        if t.delta_d() <= zero {
            report.push(Violation::DeltaD { target: n });
        }
    }
    if require_distinct {
        distinctness(game, &mut report);
    }
    report
}

fn distinctness(game: &SecurityGame, report: &mut ValidationReport) {
    let ts = game.targets();
    let protective = game.is_fully_protective();
    for i in 0..ts.len() {
        for j in (i + 1)..ts.len() {
            if !protective && ts[i].uac == ts[j].uac {
                report.push(Violation::Distinct { key: DistinctKey::Uac, first: i + 1, second: j + 1 });
            }
            if ts[i].uau == ts[j].uau {
                report.push(Violation::Distinct { key: DistinctKey::Uau, first: i + 1, second: j + 1 });
            }
            if ts[i].delta_d() == ts[j].delta_d() {
                report.push(Violation::Distinct { key: DistinctKey::DeltaD, first: i + 1, second: j + 1 });
            }
            if ts[i].uac == ts[j].uau || ts[j].uac == ts[i].uau {
                report.push(Violation::Distinct { key: DistinctKey::UacUau, first: i + 1, second: j + 1 });
            }
        }
    }
}

/// Errors unless `game` passes validation including distinctness.
pub fn require_admissible(game: &SecurityGame) -> Result<()> {
    let report = validate(game, true);
    if report.is_admissible() {
        Ok(())
    } else {
        Err(Error::Invalid(report))
    }
}
