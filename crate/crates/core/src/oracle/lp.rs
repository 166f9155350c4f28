//! Exact minimax solution of zero-sum matrix games.
//!
//! The row player maximizes. After shifting every entry to be positive the
//! column player's problem becomes `max sum(y)` subject to `A y <= 1`,
//! `y >= 0`, solved by a dense rational simplex with Bland's rule. The row
//! strategy is read off the dual values of the slack rows.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Largest matrix (rows times columns) accepted.
pub const CELL_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroSumSolution {
    pub value: Rational,
    pub row_mix: Vec<Rational>,
    pub col_mix: Vec<Rational>,
}

pub fn solve_zero_sum_matrix(a: &[Vec<Rational>]) -> Result<ZeroSumSolution> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || a.iter().any(|r| r.len() != cols) {
        return Err(Error::Precondition("matrix must be nonempty and rectangular".into()));
    }
    if rows * cols > CELL_BUDGET {
        return Err(Error::Budget(format!("{rows}x{cols} matrix exceeds {CELL_BUDGET} cells")));
    }
    let min = a.iter().flatten().min().expect("nonempty").clone();
    let shift = int(1) - min.min(Rational::zero());
    let shifted: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|v| v + &shift).collect()).collect();

    let (y, duals) = simplex(&shifted)?;
    let total: Rational = y.iter().sum();
    let dual_total: Rational = duals.iter().sum();
    if !total.is_positive() || total != dual_total {
        return Err(Error::Internal("simplex returned an inconsistent optimum".into()));
    }
    let col_mix: Vec<Rational> = y.iter().map(|v| v / &total).collect();
    let row_mix: Vec<Rational> = duals.iter().map(|v| v / &dual_total).collect();
    let value = Rational::one() / &total - &shift;

    // Certificate: the row mix guarantees at least `value`, the column mix
    // concedes at most `value`.
    let guaranteed = (0..cols)
        .map(|j| (0..rows).map(|i| &row_mix[i] * &a[i][j]).sum::<Rational>())
        .min()
        .expect("cols > 0");
    let conceded = (0..rows)
        .map(|i| (0..cols).map(|j| &col_mix[j] * &a[i][j]).sum::<Rational>())
        .max()
        .expect("rows > 0");
    if guaranteed != value || conceded != value {
        return Err(Error::Internal("minimax certificate failed".into()));
    }
    Ok(ZeroSumSolution { value, row_mix, col_mix })
}

/// `max sum(y)` s.t. `A y <= 1`, `y >= 0` for a positive matrix. Returns
/// the primal optimum and the dual values of the constraints.
fn simplex(a: &[Vec<Rational>]) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let rows = a.len();
    let cols = a[0].len();
    let width = cols + rows;
    // Tableau rows: constraint coefficients | rhs. Objective row holds
    // reduced costs (negative means improving) with the objective value.
    let mut t: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..rows).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
            row.push(Rational::one());
            row
        })
        .collect();
    let mut obj: Vec<Rational> = (0..width).map(|j| if j < cols { -Rational::one() } else { Rational::zero() }).collect();
    obj.push(Rational::zero());
    let mut basis: Vec<usize> = (cols..width).collect();

    let max_iter = 50 * (rows + cols) * (rows + cols) + 100;
    for _ in 0..max_iter {
        let Some(enter) = (0..width).find(|&j| obj[j].is_negative()) else {
            let mut y = vec![Rational::zero(); cols];
            for (i, &b) in basis.iter().enumerate() {
                if b < cols {
                    y[b] = t[i][width].clone();
                }
            }
            let duals = (0..rows).map(|i| obj[cols + i].clone()).collect();
            return Ok((y, duals));
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..rows {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((p, _)) = leave else {
            return Err(Error::Internal("unbounded linear program".into()));
        };
        let pivot = t[p][enter].clone();
        for v in t[p].iter_mut() {
            *v /= &pivot;
        }
        let prow = t[p].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != p && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &f * pv;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (v, pv) in obj.iter_mut().zip(&prow) {
                *v -= &f * pv;
            }
        }
        basis[p] = enter;
    }
    Err(Error::Internal("simplex iteration limit reached".into()))
}
