//! Mixed strategies over fixed-size target sets with prescribed marginals.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, is_integral, sum, Rational, Show};

/// A distribution over `k`-element target sets (0-indexed members).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedStrategy {
    pub k: usize,
    pub support: Vec<(Vec<usize>, Rational)>,
}

impl MixedStrategy {
    /// Marginal probability of each of `m` targets being in the drawn set.
    pub fn marginals(&self, m: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); m];
        for (set, p) in &self.support {
            for &i in set {
                out[i] += p;
            }
        }
        out
    }

    pub fn total(&self) -> Rational {
        self.support.iter().map(|(_, p)| p).sum()
    }
}

/// Decomposes marginals summing to `k` into at most `m` weighted `k`-sets.
///
/// Repeatedly takes the `k` largest residual entries (ties by index) with
/// the largest weight that keeps every residual within `[0, remaining]`.
pub fn realize_marginals(marginals: &[Rational], k: usize) -> Result<MixedStrategy> {
    let m = marginals.len();
    for (i, x) in marginals.iter().enumerate() {
        if x.is_negative() || *x > Rational::one() {
            return Err(Error::Precondition(format!("marginal {} = {} outside [0, 1]", i + 1, Show(x))));
        }
    }
    let total = sum(marginals);
    if !is_integral(&total) {
        return Err(Error::Precondition(format!("marginals sum to {}, not an integer", Show(&total))));
    }
    if total != int(k as i64) {
        return Err(Error::Precondition(format!("marginals sum to {} but k = {k}", Show(&total))));
    }
    if k > m {
        return Err(Error::Precondition(format!("k = {k} exceeds the {m} targets")));
    }

    let mut residual = marginals.to_vec();
    let mut remaining = Rational::one();
    let mut support = Vec::new();
    while remaining.is_positive() {
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| residual[b].cmp(&residual[a]).then(a.cmp(&b)));
        let chosen = &idx[..k];
        let rest = &idx[k..];
        let mut theta = remaining.clone();
        if let Some(&i) = chosen.last() {
            theta = theta.min(residual[i].clone());
        }
        if let Some(&j) = rest.first() {
            theta = theta.min(&remaining - &residual[j]);
        }
        if !theta.is_positive() {
            return Err(Error::Internal("decomposition stalled".into()));
        }
        for &i in chosen {
            residual[i] -= &theta;
        }
        remaining -= &theta;
        let mut set = chosen.to_vec();
        set.sort_unstable();
        support.push((set, theta));
    }
    Ok(MixedStrategy { k, support })
}
