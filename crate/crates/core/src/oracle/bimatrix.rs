//! The normal form of a security game: one row per attacked set of size
//! `k_a`, one column per covered set of size `k_d`.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::SecurityGame;
use crate::rational::{int, Rational};

use super::linalg::solve_linear_system;

/// All `k`-element subsets of `0..m` in lexicographic order.
pub fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < m - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BimatrixView {
    pub rows: Vec<Vec<usize>>,
    pub cols: Vec<Vec<usize>>,
    /// Attacker payoffs.
    pub a: Vec<Vec<Rational>>,
    /// Defender payoffs.
    pub b: Vec<Vec<Rational>>,
}

fn split(attacked: &[usize], covered: &[usize]) -> (Vec<usize>, Vec<usize>) {
    attacked.iter().partition(|i| covered.contains(i))
}

impl BimatrixView {
    /// Expands an additive game.
    pub fn from_game(game: &SecurityGame) -> Self {
        let t = |i: usize| game.target(i);
        Self::from_payoffs(
            game.m(),
            game.k_a(),
            game.k_d(),
            |s| s.iter().map(|&i| t(i).uac.clone()).sum(),
            |s| s.iter().map(|&i| t(i).uau.clone()).sum(),
            |s| s.iter().map(|&i| t(i).udc.clone()).sum(),
            |s| s.iter().map(|&i| t(i).udu.clone()).sum(),
        )
    }

    /// Expands set-function payoffs: a row `S` against a column `D` pays
    /// `covered(S and D) + uncovered(S minus D)` to each player.
    pub fn from_payoffs(
        m: usize,
        k_a: usize,
        k_d: usize,
        uac: impl Fn(&[usize]) -> Rational,
        uau: impl Fn(&[usize]) -> Rational,
        udc: impl Fn(&[usize]) -> Rational,
        udu: impl Fn(&[usize]) -> Rational,
    ) -> Self {
        let rows = combinations(m, k_a);
        let cols = combinations(m, k_d);
        let mut a = Vec::with_capacity(rows.len());
        let mut b = Vec::with_capacity(rows.len());
        for s in &rows {
            let mut ar = Vec::with_capacity(cols.len());
            let mut br = Vec::with_capacity(cols.len());
            for d in &cols {
                let (hit, miss) = split(s, d);
                ar.push(uac(&hit) + uau(&miss));
                br.push(udc(&hit) + udu(&miss));
            }
            a.push(ar);
            b.push(br);
        }
        BimatrixView { rows, cols, a, b }
    }

    pub fn is_zero_sum(&self) -> bool {
        self.a.iter().flatten().zip(self.b.iter().flatten()).all(|(x, y)| (x + y).is_zero())
    }

    /// Expected payoffs `(attacker, defender)` of mixed strategies.
    pub fn payoffs(&self, p: &[Rational], q: &[Rational]) -> (Rational, Rational) {
        let mut va = Rational::zero();
        let mut vd = Rational::zero();
        for (i, pi) in p.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            for (j, qj) in q.iter().enumerate() {
                if qj.is_zero() {
                    continue;
                }
                let w = pi * qj;
                va += &w * &self.a[i][j];
                vd += &w * &self.b[i][j];
            }
        }
        (va, vd)
    }

    /// Mixed strategy over rows (or columns) as per-target marginals.
    pub fn marginals(sets: &[Vec<usize>], mix: &[Rational], m: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); m];
        for (set, w) in sets.iter().zip(mix) {
            for &i in set {
                out[i] += w;
            }
        }
        out
    }
}

/// An equilibrium of a general bimatrix game found by support enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BimatrixEquilibrium {
    pub row_mix: Vec<Rational>,
    pub col_mix: Vec<Rational>,
    pub row_value: Rational,
    pub col_value: Rational,
}

/// Solves `M z = v 1, sum z = 1` on a square support; `None` if singular
/// or if `z` has a negative entry.
fn indifferent_mix(m: &[Vec<Rational>]) -> Option<(Vec<Rational>, Rational)> {
    let s = m.len();
    let mut sys = Vec::with_capacity(s + 1);
    for row in m {
        let mut r = row.clone();
        r.push(int(-1));
        sys.push(r);
    }
    let mut last = vec![int(1); s];
    last.push(int(0));
    sys.push(last);
    let mut rhs = vec![Rational::zero(); s];
    rhs.push(int(1));
    let mut z = solve_linear_system(&sys, &rhs).ok()?;
    let v = z.pop()?;
    z.iter().all(|x| !x.is_negative()).then_some((z, v))
}

/// Equal-size support enumeration, visiting at most `budget` support pairs.
pub fn solve_bimatrix_support(view: &BimatrixView, budget: usize) -> Result<BimatrixEquilibrium> {
    let (nr, nc) = (view.rows.len(), view.cols.len());
    let mut visited = 0usize;
    for size in 1..=nr.min(nc) {
        for rs in combinations(nr, size) {
            for cs in combinations(nc, size) {
                visited += 1;
                if visited > budget {
                    return Err(Error::Budget(format!("support enumeration exceeded {budget} pairs")));
                }
                // Column mix makes the row player indifferent on `rs`.
                let sub_a: Vec<Vec<Rational>> = rs.iter().map(|&i| cs.iter().map(|&j| view.a[i][j].clone()).collect()).collect();
                let Some((q_s, v_row)) = indifferent_mix(&sub_a) else { continue };
                let sub_bt: Vec<Vec<Rational>> = cs.iter().map(|&j| rs.iter().map(|&i| view.b[i][j].clone()).collect()).collect();
                let Some((p_s, v_col)) = indifferent_mix(&sub_bt) else { continue };
                let mut p = vec![Rational::zero(); nr];
                let mut q = vec![Rational::zero(); nc];
                for (k, &i) in rs.iter().enumerate() {
                    p[i] = p_s[k].clone();
                }
                for (k, &j) in cs.iter().enumerate() {
                    q[j] = q_s[k].clone();
                }
                let row_ok = (0..nr).all(|i| (0..nc).map(|j| &view.a[i][j] * &q[j]).sum::<Rational>() <= v_row);
                let col_ok = (0..nc).all(|j| (0..nr).map(|i| &view.b[i][j] * &p[i]).sum::<Rational>() <= v_col);
                if row_ok && col_ok {
                    return Ok(BimatrixEquilibrium { row_mix: p, col_mix: q, row_value: v_row, col_value: v_col });
                }
            }
        }
    }
    Err(Error::Infeasible("no equal-support equilibrium (degenerate game)".into()))
}
