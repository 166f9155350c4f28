//! Nash equilibria of additive security games by sweeping candidate cells.

use num_traits::{One, Zero};

use crate::candidates::{
    check_feasibility, construct_candidate, r_max, s_max, t_max, Construction, EquilibriumType,
    Feasibility, Multiplicity, SolvedEquilibrium, TargetPartition,
};
use crate::error::{Error, Result};
use crate::model::{expected_outcomes_unchecked, require_admissible, MarginalProfile, SecurityGame};
use crate::protective;
use crate::rational::{int, Rational};

/// One point of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub ty: EquilibriumType,
}

/// All Type I cells in sweep order: `r`, then `s`, then `t`, then subtype.
pub fn type_one_cells(game: &SecurityGame) -> Vec<Cell> {
    let mut out = Vec::new();
    for r in 0..=r_max(game) {
        let Some(sm) = s_max(game, r) else { continue };
        for s in 0..=sm {
            let Some(tm) = t_max(game, s) else { continue };
            for t in 0..=tm {
                for ty in EquilibriumType::TYPE_I {
                    out.push(Cell { r, s, t, ty });
                }
            }
        }
    }
    out
}

/// Evaluates one cell. `Ok(None)` covers both structural and feasibility
/// rejects.
pub fn evaluate_cell(game: &SecurityGame, cell: Cell) -> Result<Option<SolvedEquilibrium>> {
    match construct_candidate(game, cell.r, cell.s, cell.t, cell.ty)? {
        Construction::Structural(_) => Ok(None),
        Construction::Built(cand) => match check_feasibility(game, &cand) {
            Feasibility::Accepted(eq) => Ok(Some(*eq)),
            Feasibility::Rejected(_) => Ok(None),
        },
    }
}

fn first_accepted(game: &SecurityGame, cells: impl IntoIterator<Item = Cell>) -> Result<Option<SolvedEquilibrium>> {
    for cell in cells {
        if let Some(eq) = evaluate_cell(game, cell)? {
            return Ok(Some(eq));
        }
    }
    Ok(None)
}

/// Computes an equilibrium: the first feasible Type I cell in sweep order,
/// else the Type II construction.
pub fn solve_nash(game: &SecurityGame) -> Result<SolvedEquilibrium> {
    solve_in_order(game, type_one_cells(game))
}

/// Same as [`solve_nash`] with the Type I cells visited in reverse.
pub fn solve_nash_reversed(game: &SecurityGame) -> Result<SolvedEquilibrium> {
    let mut cells = type_one_cells(game);
    cells.reverse();
    solve_in_order(game, cells)
}

fn solve_in_order(game: &SecurityGame, cells: Vec<Cell>) -> Result<SolvedEquilibrium> {
    require_admissible(game)?;
    if let Some(eq) = first_accepted(game, cells)? {
        return Ok(eq);
    }
    if let Some(eq) = construct_type2(game)? {
        return Ok(eq);
    }
    if game.is_fully_protective() {
        if let Some(eq) = protective::covered_equilibrium(game) {
            return Ok(eq);
        }
    }
    Err(Error::Internal("no equilibrium found".into()))
}

/// The equilibrium in which every attacked target is fully covered.
///
/// The `k_a` targets of largest `uac` are attacked and covered, which fixes
/// `c1` at their smallest `uac`. Every other target must be covered at
/// least enough to make it unattractive; the leftover coverage goes to the
/// lowest-indexed targets. Returns `None` when `k_d <= k_a` or when the
/// required coverage exceeds `k_d - k_a`.
pub fn construct_type2(game: &SecurityGame) -> Result<Option<SolvedEquilibrium>> {
    let (m, k_a, k_d) = (game.m(), game.k_a(), game.k_d());
    if k_d <= k_a {
        return Ok(None);
    }
    let mut by_uac: Vec<usize> = (0..m).collect();
    by_uac.sort_by(|&a, &b| game.target(b).uac.cmp(&game.target(a).uac).then(a.cmp(&b)));
    let top = &by_uac[..k_a];
    let c1 = top.iter().map(|&i| game.target(i).uac.clone()).min().expect("k_a >= 1");

    let mut alpha = vec![Rational::zero(); m];
    let mut beta = vec![Rational::zero(); m];
    for &i in top {
        alpha[i] = Rational::one();
        beta[i] = Rational::one();
    }
    let mut budget = int((k_d - k_a) as i64);
    for i in 0..m {
        if !alpha[i].is_zero() {
            continue;
        }
        let t = game.target(i);
        let need = ((&t.uau - &c1) / t.delta_a()).max(Rational::zero());
        if need > Rational::one() {
            return Ok(None);
        }
        budget -= &need;
        beta[i] = need;
    }
    if budget < Rational::zero() {
        return Ok(None);
    }
    for i in 0..m {
        if budget.is_zero() {
            break;
        }
        if !alpha[i].is_zero() {
            continue;
        }
        let add = (Rational::one() - &beta[i]).min(budget.clone());
        beta[i] += &add;
        budget -= add;
    }
    let profile = MarginalProfile::new(alpha, beta);
    let partition = crate::candidates::classify_profile(&profile);
    let (v_a, v_d) = expected_outcomes_unchecked(game, &profile.alpha, &profile.beta);
    Ok(Some(SolvedEquilibrium {
        profile,
        ty: EquilibriumType::II,
        r: partition.count(1),
        s: 0,
        t: k_a,
        partition,
        j2: None,
        j6: None,
        j8: None,
        c1,
        c2: Rational::zero(),
        v_a,
        v_d,
        multiplicity: Multiplicity::Family(format!(
            "any {} units of coverage over unattacked targets that keep each at or below c1",
            k_d - k_a
        )),
    }))
}

fn sum_over<F: Fn(usize) -> Rational>(part: &TargetPartition, n: u8, f: F) -> Rational {
    part.set(n).into_iter().map(f).sum()
}

/// Payoffs from the type's closed form in terms of `c1`, `c2` and the
/// boundary sets, without summing over the interior targets' marginals.
pub fn closed_form_outcomes(game: &SecurityGame, eq: &SolvedEquilibrium) -> Result<(Rational, Rational)> {
    let p = &eq.partition;
    let t = |i: usize| game.target(i);
    let (alpha, beta) = (&eq.profile.alpha, &eq.profile.beta);
    if eq.ty == EquilibriumType::II {
        return Ok((
            sum_over(p, 9, |i| t(i).uac.clone()),
            sum_over(p, 9, |i| t(i).udc.clone()),
        ));
    }
    if p.count(4) + p.count(7) > 0 {
        return Err(Error::Precondition(format!("{} equilibrium with I4 or I7 nonempty", eq.ty)));
    }
    let (c1, c2) = (&eq.c1, &eq.c2);
    let d_sum = sum_over(p, 5, |i| Rational::one() / t(i).delta_d());
    let mixed_attack = sum_over(p, 2, |i| alpha[i].clone()) + sum_over(p, 8, |i| alpha[i].clone());
    let v_a = sum_over(p, 3, |i| t(i).uau.clone())
        + sum_over(p, 9, |i| t(i).uac.clone())
        + sum_over(p, 6, |i| t(i).attacker_value(&beta[i]))
        + c1 * (mixed_attack + c2 * &d_sum);

    let interior_cover = int(game.k_d() as i64)
        - int((p.count(8) + p.count(9)) as i64)
        - sum_over(p, 6, |i| beta[i].clone());
    let v_d = sum_over(p, 3, |i| t(i).udu.clone())
        + sum_over(p, 9, |i| t(i).udc.clone())
        + sum_over(p, 6, |i| t(i).defender_value(&beta[i]))
        + sum_over(p, 2, |i| &alpha[i] * &t(i).udu)
        + sum_over(p, 8, |i| &alpha[i] * &t(i).udc)
        + c2 * sum_over(p, 5, |i| &t(i).udu / t(i).delta_d())
        + c2 * interior_cover;
    Ok((v_a, v_d))
}

/// Re-derives how many equilibria share the structure of `eq`.
pub fn multiplicity_report(game: &SecurityGame, eq: &SolvedEquilibrium) -> Result<Multiplicity> {
    if eq.ty == EquilibriumType::II || matches!(eq.multiplicity, Multiplicity::Family(_)) {
        return Ok(eq.multiplicity.clone());
    }
    let cell = Cell { r: eq.r, s: eq.s, t: eq.t, ty: eq.ty };
    match evaluate_cell(game, cell)? {
        Some(again) => Ok(again.multiplicity),
        None => Err(Error::Internal(format!("cell {cell:?} no longer feasible"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{SignMode, Target};
    use crate::rational::ratio;

    fn game(k_a: usize, k_d: usize, rows: &[(i64, i64, i64, i64)]) -> SecurityGame {
        let ts = rows.iter().map(|&(a, b, c, d)| Target::new(int(a), int(b), int(c), int(d))).collect();
        SecurityGame::new(k_a, k_d, ts, SignMode::Strict).unwrap()
    }

    #[test]
    fn example1() {
        let g = fixtures::example1();
        let eq = solve_nash(&g).unwrap();
        assert_eq!(eq.ty, EquilibriumType::IAi);
        assert_eq!((eq.r, eq.s, eq.t), (0, 0, 0));
        assert_eq!(eq.c1, int(1));
        assert_eq!(eq.c2, ratio(756, 1375));
        assert_eq!(eq.profile, fixtures::example1_profile());
        assert_eq!(eq.multiplicity, Multiplicity::Unique);
        assert_eq!(closed_form_outcomes(&g, &eq).unwrap(), (int(3), ratio(-11232, 1375)));
    }

    #[test]
    fn type_two_three_targets() {
        let g = game(1, 2, &[(1, 2, -1, -2), (2, 5, -1, -3), (3, 7, -2, -5)]);
        let eq = construct_type2(&g).unwrap().unwrap();
        assert_eq!(eq.profile.alpha, vec![int(0), int(0), int(1)]);
        assert_eq!(eq.profile.beta[2], int(1));
        assert_eq!((eq.v_a.clone(), eq.v_d.clone()), (int(3), int(-2)));
        assert_eq!(closed_form_outcomes(&g, &eq).unwrap(), (int(3), int(-2)));
        assert_eq!(eq.multiplicity.kind(), "family");
    }

    #[test]
    fn type_two_needs_more_defenders() {
        let g = game(1, 1, &[(1, 2, -1, -2), (2, 5, -1, -3), (3, 7, -2, -5)]);
        assert!(construct_type2(&g).unwrap().is_none());
    }

    #[test]
    fn five_targets_two_attackers_four_defenders() {
        let g = game(
            2,
            4,
            &[(1, 2, -1, -3), (2, 4, -2, -5), (3, 6, -1, -4), (4, 8, -3, -9), (5, 9, -2, -8)],
        );
        let eq = construct_type2(&g).unwrap().unwrap();
        assert_eq!(eq.partition.set(9), vec![3, 4]);
        assert_eq!(eq.profile.alpha.iter().filter(|a| a.is_one()).count(), 2);
    }

    #[test]
    fn reversed_sweep_agrees_on_example1() {
        let g = fixtures::example1();
        assert_eq!(solve_nash_reversed(&g).unwrap().ty, EquilibriumType::IAi);
    }
}
