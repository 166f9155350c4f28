//! Subset sums over items with a few alternative values each, on exactly
//! scaled integers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::affine::Interval;
use crate::error::{Error, Result};
use crate::rational::{Rational, Show};

/// One way of picking a value per item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    /// Index of the picked alternative for every item.
    pub picks: Vec<usize>,
    pub sum: Rational,
}

/// `value * scale` as an integer, or an error if `scale` leaves a fraction.
pub fn scaled(value: &Rational, scale: &BigInt) -> Result<BigInt> {
    let v = value * Rational::from_integer(scale.clone());
    if !v.denom().is_one() {
        return Err(Error::Precondition(format!(
            "scale {scale} does not clear the denominator of {}",
            Show(value)
        )));
    }
    Ok(v.to_integer())
}

/// Every reachable sum with the lexicographically smallest pick vector that
/// reaches it. Items with no alternatives make nothing reachable.
pub(crate) fn reachable<K: Ord + Clone>(
    items: &[Vec<K>],
    zero: K,
    add: impl Fn(&K, &K) -> K,
) -> BTreeMap<K, Vec<usize>> {
    let mut states: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    states.insert(zero, Vec::new());
    for alts in items {
        let mut next: BTreeMap<K, Vec<usize>> = BTreeMap::new();
        for (key, picks) in &states {
            for (o, v) in alts.iter().enumerate() {
                let k = add(key, v);
                let mut w = picks.clone();
                w.push(o);
                match next.get_mut(&k) {
                    Some(old) if *old <= w => {}
                    Some(old) => *old = w,
                    None => {
                        next.insert(k, w);
                    }
                }
            }
        }
        states = next;
    }
    states
}

/// Picks one of two values per item so that the total lies in `target`.
///
/// Returns one witness per achievable total inside `target`, in increasing
/// order of the total. Pick `0` selects the first value of a pair.
pub fn subset_sum_selections(
    items: &[(Rational, Rational)],
    target: &Interval,
    scale: &BigInt,
) -> Result<Vec<Selection>> {
    if *scale <= BigInt::from(0) {
        return Err(Error::Precondition("scale must be positive".into()));
    }
    let mut scaled_items = Vec::with_capacity(items.len());
    for (a, b) in items {
        scaled_items.push(vec![scaled(a, scale)?, scaled(b, scale)?]);
    }
    let states = reachable(&scaled_items, BigInt::from(0), |x, y| x + y);
    let denom = Rational::from_integer(scale.clone());
    Ok(states
        .into_iter()
        .map(|(k, picks)| Selection { picks, sum: Rational::from_integer(k) / &denom })
        .filter(|s| target.contains(&s.sum))
        .collect())
}
