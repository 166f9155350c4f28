//! Games with fully protective resources: a covered attack is worth zero to
//! both players (`uac = udc = 0`).
//!
//! Constants here use the general convention `c1 = uau*(1 - beta)` and
//! `c2 = alpha*delta_d > 0`. The protective literature writes the defender
//! constant as `alpha*udu`, which is `-c2`; see [`protective_c2`].

use num_traits::{One, Signed, Zero};

use crate::candidates::{
    classify_profile, EquilibriumType, Multiplicity, SolvedEquilibrium,
};
use crate::error::{Error, Result};
use crate::model::{expected_outcomes_unchecked, require_admissible, MarginalProfile, SecurityGame};
use crate::rational::{int, Rational};
use crate::solver::{evaluate_cell, Cell};

/// How much of the search space a specialized solver touched.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Candidate cells constructed and tested.
    pub cells: usize,
    /// Whether the all-attacked-targets-covered case was consulted.
    pub covered_case: bool,
}

/// Subtypes that can occur with `I9` empty.
pub const PROTECTIVE_TYPES: [EquilibriumType; 4] = [
    EquilibriumType::IAi,
    EquilibriumType::IAii,
    EquilibriumType::IBi,
    EquilibriumType::IBii,
];

fn require_protective(game: &SecurityGame) -> Result<()> {
    if !game.is_fully_protective() {
        return Err(Error::Precondition("resources are not fully protective (uac = udc = 0 required)".into()));
    }
    require_admissible(game)
}

/// The defender constant in the protective convention, `alpha * udu`.
pub fn protective_c2(eq: &SolvedEquilibrium) -> Rational {
    -&eq.c2
}

pub fn solve_protective(game: &SecurityGame) -> Result<SolvedEquilibrium> {
    solve_protective_with_stats(game).map(|(eq, _)| eq)
}

/// Sweeps `(r, s)` with `t = 0` over the four admissible subtypes, then
/// falls back to the case where every attacked target is covered.
pub fn solve_protective_with_stats(game: &SecurityGame) -> Result<(SolvedEquilibrium, SearchStats)> {
    require_protective(game)?;
    let mut stats = SearchStats::default();
    let m = game.m();
    let r_max = (m - game.k_a()).min(m - game.k_d());
    for r in 0..=r_max {
        let s_max = (m - game.k_d() - r).min(game.k_a());
        for s in 0..=s_max {
            for ty in PROTECTIVE_TYPES {
                stats.cells += 1;
                if let Some(eq) = evaluate_cell(game, Cell { r, s, t: 0, ty })? {
                    check_table_constants(game, &eq)?;
                    return Ok((eq, stats));
                }
            }
        }
    }
    stats.covered_case = true;
    match covered_equilibrium(game) {
        Some(eq) => Ok((eq, stats)),
        None => Err(Error::Internal("no equilibrium found".into())),
    }
}

/// `(c1, alpha*udu)` from the closed-form table for subtypes with `I9`
/// empty, evaluated on the boundary marginals of `eq`.
pub fn table_constants(game: &SecurityGame, eq: &SolvedEquilibrium) -> Option<(Rational, Rational)> {
    let p = &eq.partition;
    let i5 = p.set(5);
    if i5.is_empty() || p.count(9) + p.count(8) > 0 {
        return None;
    }
    let inv_u: Rational = i5.iter().map(|&i| Rational::one() / &game.target(i).uau).sum();
    let inv_d: Rational = i5.iter().map(|&i| Rational::one() / &game.target(i).udu).sum();
    let n5 = int(i5.len() as i64);
    let k_a = int(game.k_a() as i64);
    let k_d = int(game.k_d() as i64);
    let s = int(p.count(3) as i64);
    let (alpha, beta) = (&eq.profile.alpha, &eq.profile.beta);
    let c1 = match eq.j2 {
        Some(j) => game.target(j).uau.clone(),
        None => {
            let b6 = eq.j6.map(|j| beta[j].clone()).unwrap_or_default();
            (n5 + b6 - k_d) / inv_u
        }
    };
    let c2 = match eq.j6 {
        Some(j) => game.target(j).udu.clone(),
        None => {
            let a2 = eq.j2.map(|j| alpha[j].clone()).unwrap_or_default();
            (k_a - s - a2) / inv_d
        }
    };
    Some((c1, c2))
}

fn check_table_constants(game: &SecurityGame, eq: &SolvedEquilibrium) -> Result<()> {
    if let Some((c1, c2)) = table_constants(game, eq) {
        if c1 != eq.c1 || c2 != protective_c2(eq) {
            return Err(Error::Internal(format!("{} constants disagree with the closed-form table", eq.ty)));
        }
    }
    Ok(())
}

/// The equilibrium in which the `m - k_d` targets of smallest `delta_d` are
/// attacked for sure and left uncovered while every other target is fully
/// covered and attacked with probability at least `c2 / delta_d(i)`.
///
/// `c2` is the largest `delta_d` among the exposed targets. The remaining
/// attack mass is spread proportionally to each covered target's slack.
pub fn covered_equilibrium(game: &SecurityGame) -> Option<SolvedEquilibrium> {
    let (m, k_a, k_d) = (game.m(), game.k_a(), game.k_d());
    if !game.is_fully_protective() || k_a + k_d < m {
        return None;
    }
    let order = game.orders().perm_dd;
    let exposed = &order[..m - k_d];
    let covered = &order[m - k_d..];
    let c2 = exposed.iter().map(|&i| game.target(i).delta_d()).max()?;
    let lower: Vec<Rational> = covered.iter().map(|&i| &c2 / game.target(i).delta_d()).collect();
    let lower_sum: Rational = lower.iter().sum();
    let mass = int((k_a + k_d - m) as i64);
    if lower_sum > mass || lower.iter().any(|l| *l > Rational::one()) {
        return None;
    }
    let slack = int(k_d as i64) - &lower_sum;
    let lambda = if slack.is_zero() { Rational::zero() } else { (&mass - &lower_sum) / &slack };

    let mut alpha = vec![Rational::zero(); m];
    let mut beta = vec![Rational::zero(); m];
    for &i in exposed {
        alpha[i] = Rational::one();
    }
    for (&i, lb) in covered.iter().zip(&lower) {
        alpha[i] = lb + &lambda * (Rational::one() - lb);
        beta[i] = Rational::one();
    }
    let profile = MarginalProfile::new(alpha, beta);
    let partition = classify_profile(&profile);
    let (v_a, v_d) = expected_outcomes_unchecked(game, &profile.alpha, &profile.beta);
    let multiplicity = if lower_sum == mass {
        Multiplicity::Unique
    } else {
        Multiplicity::Family(format!(
            "attack marginals on covered targets: any alpha(i) in [c2/delta_d(i), 1] summing to {}",
            k_a + k_d - m
        ))
    };
    Some(SolvedEquilibrium {
        ty: EquilibriumType::IAiii,
        r: 0,
        s: m - k_d,
        t: partition.count(9),
        j2: None,
        j6: None,
        j8: partition.set(8).first().copied(),
        partition,
        profile,
        c1: Rational::zero(),
        c2,
        v_a,
        v_d,
        multiplicity,
    })
}

/// Closed-form payoffs for protective equilibria from the constants and the
/// boundary sets.
pub fn closed_form_outcomes_protective(game: &SecurityGame, eq: &SolvedEquilibrium) -> Result<(Rational, Rational)> {
    if !game.is_fully_protective() {
        return Err(Error::Precondition("resources are not fully protective".into()));
    }
    let p = &eq.partition;
    let t = |i: usize| game.target(i);
    let over = |n: u8, f: &dyn Fn(usize) -> Rational| -> Rational { p.set(n).into_iter().map(f).sum() };
    if p.count(4) + p.count(7) > 0 {
        return Err(Error::Precondition(format!("{} equilibrium with I4 or I7 nonempty", eq.ty)));
    }
    let exposed_a = over(3, &|i| t(i).uau.clone());
    let exposed_d = over(3, &|i| t(i).udu.clone());
    if p.count(8) + p.count(9) > 0 {
        return Ok((exposed_a, exposed_d));
    }
    let (alpha, beta) = (&eq.profile.alpha, &eq.profile.beta);
    let cc = &eq.c1 * &eq.c2;
    let v_a = exposed_a
        + over(2, &|i| &alpha[i] * &t(i).uau)
        + over(6, &|i| &t(i).uau * (Rational::one() - &beta[i]))
        + &cc * over(5, &|i| Rational::one() / t(i).delta_d());
    let v_d = exposed_d
        + over(2, &|i| &alpha[i] * &t(i).udu)
        + over(6, &|i| &t(i).udu * (Rational::one() - &beta[i]))
        - &cc * over(5, &|i| Rational::one() / &t(i).uau);
    Ok((v_a, v_d))
}

/// `sigma_alpha(r, s, a, c) = m - (s + r + 1) + a - sum over the s targets
/// of largest uau of c / uau`, the total attack mass of the zero-sum
/// parameterization with `c` in the protective convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaAlphaEvaluation {
    pub r: usize,
    pub s: usize,
    pub alpha_r1: Rational,
    pub c2: Rational,
    pub value: Rational,
}

pub fn sigma_alpha(game: &SecurityGame, r: usize, s: usize, alpha_r1: Rational, c2: Rational) -> SigmaAlphaEvaluation {
    let m = game.m();
    let order = game.orders().perm_uau;
    let tail: Rational = order[m - s..].iter().map(|&i| &c2 / &game.target(i).uau).sum();
    let value = int(m as i64) - int((s + r + 1) as i64) + &alpha_r1 - tail;
    SigmaAlphaEvaluation { r, s, alpha_r1, c2, value }
}

pub fn solve_zero_sum_protective(game: &SecurityGame) -> Result<SolvedEquilibrium> {
    solve_zero_sum_with_stats(game).map(|(eq, _)| eq)
}

/// Linear scan over the size `n` of the interior block, which in a zero-sum
/// protective game is always the `n` targets of largest `uau`. Each `n`
/// pins `c1` (or `c2` for the blocks with a partially covered target) and
/// therefore the number `r` of ignored targets, leaving O(1) cells per `n`.
pub fn solve_zero_sum_with_stats(game: &SecurityGame) -> Result<(SolvedEquilibrium, SearchStats)> {
    require_protective(game)?;
    if !game.is_zero_sum_protective() {
        return Err(Error::Precondition("game is not zero-sum (uau = -udu required)".into()));
    }
    let (m, k_a, k_d) = (game.m(), game.k_a(), game.k_d());
    let order = game.orders().perm_uau;
    let u = |pos: usize| game.target(order[pos]).uau.clone();
    let mut stats = SearchStats::default();
    let mut inv = Rational::zero();
    let try_cell = |cell: Cell, stats: &mut SearchStats| -> Result<Option<SolvedEquilibrium>> {
        if cell.r > m {
            return Ok(None);
        }
        stats.cells += 1;
        match evaluate_cell(game, cell) {
            Ok(v) => Ok(v),
            Err(Error::Precondition(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };

    for n in 1..=m {
        // `inv` covers the n targets of largest uau.
        inv += Rational::one() / u(m - n);
        let below = m - n;

        // Interior block only: c1 from the coverage total.
        let c1 = (int(n as i64) - int(k_d as i64)) / &inv;
        if c1.is_positive() {
            let r = (0..below).take_while(|&p| u(p) < c1).count();
            let cell = if r < below && u(r) == c1 {
                Cell { r, s: below - r - 1, t: 0, ty: EquilibriumType::IAii }
            } else {
                Cell { r, s: below - r, t: 0, ty: EquilibriumType::IAi }
            };
            if let Some(eq) = try_cell(cell, &mut stats)? {
                return Ok((eq, stats));
            }
        }

        // A partially covered target just below the block: c2 = its uau.
        if below == 0 {
            continue;
        }
        let c2 = u(below - 1);
        let spare = &c2 * &inv + int(below as i64) - int(k_a as i64);
        // I.B.i: (below - 1 - r) + 1 + c2 * inv = k_a
        if spare.is_integer() && !spare.is_negative() {
            let r = spare.to_integer();
            if let Ok(r) = usize::try_from(r) {
                if r < below {
                    let cell = Cell { r, s: below - 1 - r, t: 0, ty: EquilibriumType::IBi };
                    if let Some(eq) = try_cell(cell, &mut stats)? {
                        return Ok((eq, stats));
                    }
                }
            }
        }
        // I.B.ii: alpha(j2) = k_a - (below - 2 - r) - 1 - c2 * inv in (0, 1)
        let x = &spare - int(1);
        if !x.is_integer() {
            let r: num_bigint::BigInt = x.floor().to_integer() + 1;
            if let Ok(r) = usize::try_from(r.max(num_bigint::BigInt::from(0))) {
                if r + 2 <= below {
                    let cell = Cell { r, s: below - 2 - r, t: 0, ty: EquilibriumType::IBii };
                    if let Some(eq) = try_cell(cell, &mut stats)? {
                        return Ok((eq, stats));
                    }
                }
            }
        }
    }
    stats.covered_case = true;
    match covered_equilibrium(game) {
        Some(eq) => Ok((eq, stats)),
        None => Err(Error::Internal("zero-sum scan found no equilibrium".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{SignMode, Target};
    use crate::rational::ratio;

    fn zero_sum(k_a: usize, k_d: usize, u: &[i64]) -> SecurityGame {
        let ts = u.iter().map(|&x| Target::new(int(0), int(x), int(0), int(-x))).collect();
        SecurityGame::new(k_a, k_d, ts, SignMode::Permissive).unwrap()
    }

    fn rats(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(p, q)| ratio(p, q)).collect()
    }

    #[test]
    fn example2_lower_bounds() {
        let g = fixtures::example2_game(&fixtures::EXAMPLE2_LB);
        let eq = solve_protective(&g).unwrap();
        assert_eq!(
            eq.profile.alpha,
            rats(&[(56, 229), (28, 229), (40, 229), (35, 229), (70, 229), (1, 1)])
        );
        assert_eq!(
            eq.profile.beta,
            rats(&[(1, 73), (37, 73), (65, 73), (55, 73), (61, 73), (0, 1)])
        );
        assert_eq!(eq.v_d, ratio(-789, 229));
        assert_eq!(eq.c1, ratio(72, 73));
        assert_eq!(protective_c2(&eq), ratio(-280, 229));
        assert_eq!(closed_form_outcomes_protective(&g, &eq).unwrap(), (eq.v_a.clone(), eq.v_d.clone()));
    }

    #[test]
    fn example2_upper_bounds() {
        let g = fixtures::example2_game(&fixtures::EXAMPLE2_UB);
        let eq = solve_protective(&g).unwrap();
        assert_eq!(
            eq.profile.beta,
            rats(&[(6469, 9589), (2309, 9589), (7909, 9589), (5221, 9589), (6859, 9589), (0, 1)])
        );
        assert_eq!(eq.v_d, ratio(-789, 229));
    }

    #[test]
    fn three_target_zero_sum() {
        let g = zero_sum(1, 1, &[1, 2, 3]);
        let eq = solve_protective(&g).unwrap();
        assert_eq!(eq.profile.alpha, rats(&[(0, 1), (3, 5), (2, 5)]));
        assert_eq!(eq.profile.beta, rats(&[(0, 1), (2, 5), (3, 5)]));
        assert_eq!(eq.v_a, ratio(6, 5));
        let zs = solve_zero_sum_protective(&g).unwrap();
        assert_eq!((zs.v_a, zs.v_d), (eq.v_a, eq.v_d));
    }

    #[test]
    fn two_target_zero_sum() {
        let g = zero_sum(1, 1, &[1, 2]);
        let zs = solve_zero_sum_protective(&g).unwrap();
        let general = crate::solver::solve_nash(&g).unwrap();
        assert_eq!(zs.v_a, general.v_a);
        assert_eq!(zs.profile, general.profile);
    }

    #[test]
    fn zero_sum_scan_matches_sweep() {
        let g = zero_sum(2, 3, &[1, 2, 9, 4, 6, 10]);
        let a = solve_protective(&g).unwrap();
        let b = solve_zero_sum_protective(&g).unwrap();
        assert_eq!((a.v_a, a.v_d), (b.v_a, b.v_d));
    }

    #[test]
    fn rejects_non_protective() {
        let err = solve_protective(&fixtures::example1()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn sigma_alpha_counts_attack_mass() {
        let g = zero_sum(1, 1, &[1, 2, 3]);
        // r = 0, block of s = 2 with c2 = -6/5: alpha = [0, 3/5, 2/5]
        let e = sigma_alpha(&g, 0, 2, Rational::zero(), ratio(-6, 5));
        assert_eq!(e.value, int(1));
    }
}
