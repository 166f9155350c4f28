//! Independent checks: best responses by greedy top-k selection, the
//! expanded bimatrix form, exact matrix-game and linear-system solvers.
//!
//! Nothing here uses the partition machinery of the structural solver.

pub mod bimatrix;
pub mod linalg;
pub mod lp;

use std::fmt;

use num_traits::{One, Signed};

use crate::error::Result;
use crate::model::{MarginalProfile, SecurityGame};
use crate::rational::{Rational, Show};

pub use bimatrix::{solve_bimatrix_support, BimatrixView};
pub use linalg::solve_linear_system;
pub use lp::{solve_zero_sum_matrix, ZeroSumSolution};

/// Sum of the `k` largest values.
fn top_k_sum(mut values: Vec<Rational>, k: usize) -> Rational {
    values.sort_by(|a, b| b.cmp(a));
    values.into_iter().take(k).sum()
}

/// Per-target attacker payoff against coverage `beta`.
pub fn attacker_coefficients(game: &SecurityGame, beta: &[Rational]) -> Vec<Rational> {
    game.targets().iter().zip(beta).map(|(t, b)| t.attacker_value(b)).collect()
}

/// Best attacker payoff against `beta`.
pub fn best_response_value_attacker(game: &SecurityGame, beta: &[Rational]) -> Rational {
    top_k_sum(attacker_coefficients(game, beta), game.k_a())
}

/// Best defender payoff against `alpha`: every attacked target loses
/// `udu`, and each unit of coverage recovers `alpha * delta_d`.
pub fn best_response_value_defender(game: &SecurityGame, alpha: &[Rational]) -> Rational {
    let base: Rational = game.targets().iter().zip(alpha).map(|(t, a)| a * &t.udu).sum();
    let gains: Vec<Rational> = game.targets().iter().zip(alpha).map(|(t, a)| a * t.delta_d()).collect();
    base + top_k_sum(gains, game.k_d())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    Attacker,
    Defender,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Attacker => "attacker",
            Player::Defender => "defender",
        })
    }
}

/// A profitable unilateral move: shift `amount` of probability from target
/// `from` to target `to` (0-indexed), raising the mover's payoff by `gain`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationWitness {
    pub player: Player,
    pub from: usize,
    pub to: usize,
    pub amount: Rational,
    pub gain: Rational,
}

impl fmt::Display for DeviationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} gains {} by moving {} from target {} to target {}",
            self.player,
            Show(&self.gain),
            Show(&self.amount),
            self.from + 1,
            self.to + 1
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub is_equilibrium: bool,
    pub v_a: Rational,
    pub v_d: Rational,
    pub best_attacker: Rational,
    pub best_defender: Rational,
    pub witness: Option<DeviationWitness>,
    /// Whether indifference constants exist (the pairwise criterion).
    pub constants_exist: bool,
}

impl Verdict {
    /// The best-response and indifference-constant criteria agree.
    pub fn criteria_agree(&self) -> bool {
        self.is_equilibrium == self.constants_exist
    }
}

/// The pair `(from, to)` with `mass[from] > 0`, `mass[to] < 1` maximizing
/// `coef[to] - coef[from]`, if that difference is positive.
fn best_shift(coef: &[Rational], mass: &[Rational]) -> Option<(usize, usize, Rational)> {
    let from = (0..coef.len())
        .filter(|&i| mass[i].is_positive())
        .min_by(|&a, &b| coef[a].cmp(&coef[b]).then(a.cmp(&b)))?;
    let to = (0..coef.len())
        .filter(|&i| mass[i] < Rational::one())
        .max_by(|&a, &b| coef[a].cmp(&coef[b]).then(b.cmp(&a)))?;
    let diff = &coef[to] - &coef[from];
    diff.is_positive().then_some((from, to, diff))
}

fn witness(player: Player, coef: &[Rational], mass: &[Rational]) -> Option<DeviationWitness> {
    let (from, to, diff) = best_shift(coef, mass)?;
    let amount = mass[from].clone().min(Rational::one() - &mass[to]);
    Some(DeviationWitness { player, from, to, gain: &amount * diff, amount })
}

/// Checks the mutual best-response property exactly.
pub fn verify_equilibrium(game: &SecurityGame, profile: &MarginalProfile) -> Result<Verdict> {
    let (v_a, v_d) = crate::model::expected_outcomes(game, profile)?;
    let best_attacker = best_response_value_attacker(game, &profile.beta);
    let best_defender = best_response_value_defender(game, &profile.alpha);
    let is_equilibrium = v_a == best_attacker && v_d == best_defender;

    let att = attacker_coefficients(game, &profile.beta);
    let def: Vec<Rational> = game
        .targets()
        .iter()
        .zip(&profile.alpha)
        .map(|(t, a)| a * t.delta_d())
        .collect();
    let witness = if v_a != best_attacker {
        witness(Player::Attacker, &att, &profile.alpha)
    } else if v_d != best_defender {
        witness(Player::Defender, &def, &profile.beta)
    } else {
        None
    };
    let constants_exist =
        best_shift(&att, &profile.alpha).is_none() && best_shift(&def, &profile.beta).is_none();
    Ok(Verdict { is_equilibrium, v_a, v_d, best_attacker, best_defender, witness, constants_exist })
}
