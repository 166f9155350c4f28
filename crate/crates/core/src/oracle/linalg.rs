//! Exact square linear systems by fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{denominator_lcm, Rational};

/// Solves `M x = rhs` exactly. Errors with `Infeasible` on a singular `M`.
pub fn solve_linear_system(matrix: &[Vec<Rational>], rhs: &[Rational]) -> Result<Vec<Rational>> {
    let n = matrix.len();
    if rhs.len() != n || matrix.iter().any(|row| row.len() != n) {
        return Err(Error::Precondition(format!("expected a square {n}x{n} system")));
    }
    // Clear denominators row by row; the augmented matrix is then integral.
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let scale = Rational::from_integer(denominator_lcm(row.iter().chain(std::iter::once(b))));
            row.iter()
                .chain(std::iter::once(b))
                .map(|v| (v * &scale).to_integer())
                .collect()
        })
        .collect();

    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Err(Error::Infeasible(format!("singular matrix (no pivot in column {})", k + 1)));
        };
        a.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }

    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(a[i][n].clone());
        for j in i + 1..n {
            acc -= Rational::from_integer(a[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(a[i][i].clone());
    }
    Ok(x)
}
