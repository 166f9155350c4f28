//! Least-squares projection of set functions onto additive functions, and
//! the nearest additive game of a game with set-function payoffs.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{SecurityGame, SignMode, Target};
use crate::oracle::bimatrix::combinations;
use crate::oracle::{solve_bimatrix_support, solve_zero_sum_matrix, BimatrixView};
use crate::rational::{abs, Rational};
use crate::realize::realize_marginals;
use crate::solver::solve_nash;

/// All subsets of `0..m` with at most `k` members, by size then
/// lexicographically. This fixes the coordinate order of a table's vector.
pub fn subsets_up_to(m: usize, k: usize) -> Vec<Vec<usize>> {
    (0..=k.min(m)).flat_map(|size| combinations(m, size)).collect()
}

/// A set function evaluated on every subset of size at most `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunctionTable {
    m: usize,
    k: usize,
    values: BTreeMap<Vec<usize>, Rational>,
}

impl SetFunctionTable {
    /// Builds a table from `(set, value)` pairs with 0-indexed members.
    ///
    /// A missing empty set defaults to 0. Any other missing, duplicate or
    /// out-of-range set is an error.
    pub fn new(m: usize, k: usize, entries: impl IntoIterator<Item = (Vec<usize>, Rational)>) -> Result<Self> {
        if m < 2 {
            return Err(Error::Precondition(format!("set function needs m >= 2, got {m}")));
        }
        if k == 0 || k > m {
            return Err(Error::Precondition(format!("order k = {k} must lie in 1..={m}")));
        }
        let mut values = BTreeMap::new();
        for (mut set, v) in entries {
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Document(format!("set {:?} repeats a member", one_indexed(&set))));
            }
            if set.iter().any(|&i| i >= m) {
                return Err(Error::Document(format!("set {:?} names a target beyond {m}", one_indexed(&set))));
            }
            if set.len() > k {
                return Err(Error::Document(format!("set {:?} is larger than k = {k}", one_indexed(&set))));
            }
            let shown = one_indexed(&set);
            if values.insert(set, v).is_some() {
                return Err(Error::Document(format!("set {shown:?} listed twice")));
            }
        }
        values.entry(Vec::new()).or_insert_with(|| {
            log::warn!("set function table omits the empty set; using 0");
            Rational::zero()
        });
        let missing: Vec<Vec<usize>> = subsets_up_to(m, k).into_iter().filter(|s| !values.contains_key(s)).collect();
        if let Some(first) = missing.first() {
            return Err(Error::Document(format!(
                "table is incomplete: {} sets missing, first {:?}",
                missing.len(),
                one_indexed(first)
            )));
        }
        Ok(SetFunctionTable { m, k, values })
    }

    /// Tabulates `f` on every subset of size at most `k`.
    pub fn from_fn(m: usize, k: usize, f: impl Fn(&[usize]) -> Rational) -> Result<Self> {
        Self::new(m, k, subsets_up_to(m, k).into_iter().map(|s| {
            let v = f(&s);
            (s, v)
        }))
    }

    /// The additive function `S -> sum of x over S`.
    pub fn additive(x: &[Rational], k: usize) -> Result<Self> {
        Self::from_fn(x.len(), k, |s| s.iter().map(|&i| x[i].clone()).sum())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `f(set)`; `None` if `set` is larger than `k`.
    pub fn value(&self, set: &[usize]) -> Option<&Rational> {
        let mut s = set.to_vec();
        s.sort_unstable();
        self.values.get(&s)
    }

    /// `(set, value)` pairs in canonical order.
    pub fn entries(&self) -> Vec<(Vec<usize>, Rational)> {
        subsets_up_to(self.m, self.k)
            .into_iter()
            .map(|s| {
                let v = self.values[&s].clone();
                (s, v)
            })
            .collect()
    }

    /// The table as a vector in canonical subset order.
    pub fn vectorize(&self) -> Vec<Rational> {
        self.entries().into_iter().map(|(_, v)| v).collect()
    }

    /// Same function restricted to sets of size at most `k`.
    pub fn restrict(&self, k: usize) -> Result<Self> {
        if k > self.k {
            return Err(Error::Precondition(format!("cannot raise order {} to {k}", self.k)));
        }
        Self::new(self.m, k, self.values.iter().filter(|(s, _)| s.len() <= k).map(|(s, v)| (s.clone(), v.clone())))
    }

    /// `f - h_x` in canonical order.
    pub fn residual(&self, x: &[Rational]) -> Vec<Rational> {
        self.entries()
            .into_iter()
            .map(|(s, v)| v - s.iter().map(|&i| &x[i]).sum::<Rational>())
            .collect()
    }

    /// Squared distance between this table and the additive function `x`.
    pub fn distance_sq(&self, x: &[Rational]) -> Rational {
        self.residual(x).iter().map(|r| r * r).sum()
    }
}

fn one_indexed(set: &[usize]) -> Vec<usize> {
    set.iter().map(|i| i + 1).collect()
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The nearest additive function of a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveProjection {
    pub x: Vec<Rational>,
    pub distance_sq: Rational,
    /// `gamma_i` = sum of `f(S)` over sets containing `i`.
    pub gamma: Vec<Rational>,
}

/// Gram matrix coefficients `(a, b)`: `a` counts sets of size at most `k`
/// through one target, `b` through two.
pub fn gram_coefficients(m: usize, k: usize) -> (Rational, Rational) {
    let a: BigInt = (0..k).map(|t| binomial(m - 1, t)).sum();
    let b: BigInt = (0..k.saturating_sub(1)).map(|t| binomial(m - 2, t)).sum();
    (Rational::from_integer(a), Rational::from_integer(b))
}

/// Solves `((a - b) I + b J) x = gamma` with the rank-one inverse.
pub fn nearest_additive(f: &SetFunctionTable) -> Result<AdditiveProjection> {
    let m = f.m;
    let mut gamma = vec![Rational::zero(); m];
    for (s, v) in &f.values {
        for &i in s {
            gamma[i] += v;
        }
    }
    let (a, b) = gram_coefficients(m, f.k);
    let d = &a - &b;
    if !d.is_positive() || b.is_negative() {
        return Err(Error::Internal(format!("singular normal equations (a = {a}, b = {b})")));
    }
    let total: Rational = gamma.iter().sum();
    let shift = &b * &total / (&d * (&d + &b * Rational::from_integer(BigInt::from(m))));
    let x: Vec<Rational> = gamma.iter().map(|g| g / &d - &shift).collect();
    let distance_sq = f.distance_sq(&x);
    Ok(AdditiveProjection { x, distance_sq, gamma })
}

/// A game whose four payoff functions are set functions of the attacked set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunctionGame {
    pub k_a: usize,
    pub k_d: usize,
    pub uac: SetFunctionTable,
    pub uau: SetFunctionTable,
    pub udc: SetFunctionTable,
    pub udu: SetFunctionTable,
}

impl SetFunctionGame {
    pub fn new(
        k_a: usize,
        k_d: usize,
        uac: SetFunctionTable,
        uau: SetFunctionTable,
        udc: SetFunctionTable,
        udu: SetFunctionTable,
    ) -> Result<Self> {
        let m = uac.m;
        for t in [&uac, &uau, &udc, &udu] {
            if t.m != m {
                return Err(Error::Precondition("payoff tables disagree on m".into()));
            }
            if t.k != k_a {
                return Err(Error::Precondition(format!("payoff table has order {} but k_a = {k_a}", t.k)));
            }
        }
        if k_d == 0 || k_d > m {
            return Err(Error::Precondition(format!("k_d = {k_d} must lie in 1..={m}")));
        }
        Ok(SetFunctionGame { k_a, k_d, uac, uau, udc, udu })
    }

    /// Tabulates an additive game.
    pub fn from_additive(game: &SecurityGame) -> Result<Self> {
        let col = |f: fn(&Target) -> &Rational| -> Vec<Rational> { game.targets().iter().map(|t| f(t).clone()).collect() };
        let k = game.k_a();
        Self::new(
            k,
            game.k_d(),
            SetFunctionTable::additive(&col(|t| &t.uac), k)?,
            SetFunctionTable::additive(&col(|t| &t.uau), k)?,
            SetFunctionTable::additive(&col(|t| &t.udc), k)?,
            SetFunctionTable::additive(&col(|t| &t.udu), k)?,
        )
    }

    pub fn m(&self) -> usize {
        self.uac.m
    }

    /// The normal form over attacked and covered sets.
    pub fn bimatrix(&self) -> BimatrixView {
        let get = |t: &SetFunctionTable, s: &[usize]| t.value(s).cloned().expect("table covers sets up to k_a");
        BimatrixView::from_payoffs(
            self.m(),
            self.k_a,
            self.k_d,
            |s| get(&self.uac, s),
            |s| get(&self.uau, s),
            |s| get(&self.udc, s),
            |s| get(&self.udu, s),
        )
    }
}

/// Projects every payoff table and re-validates the resulting game.
/// Sign conditions are checked permissively so protective games survive.
pub fn nearest_additive_game(game: &SetFunctionGame) -> Result<SecurityGame> {
    let uac = nearest_additive(&game.uac)?.x;
    let uau = nearest_additive(&game.uau)?.x;
    let udc = nearest_additive(&game.udc)?.x;
    let udu = nearest_additive(&game.udu)?.x;
    let targets = (0..game.m())
        .map(|i| Target::new(uac[i].clone(), uau[i].clone(), udc[i].clone(), udu[i].clone()))
        .collect();
    SecurityGame::new(game.k_a, game.k_d, targets, SignMode::Permissive)
}

/// Equilibrium values of a set-function game next to those of its
/// projection, plus the effect of playing the projected strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproximationReport {
    /// `(attacker, defender)` equilibrium payoffs of the original game.
    pub original: (Rational, Rational),
    /// Equilibrium payoffs of the projected additive game.
    pub projected: (Rational, Rational),
    /// Defender payoff in the original game when the defender switches to
    /// the projected game's strategy.
    pub cross_defender: Rational,
    /// Attacker payoff in the original game when the attacker switches.
    pub cross_attacker: Rational,
    /// `|p'Bq - p'Bq'| / |p'Bq|`; `None` when the original value is 0.
    pub rel_error_defender: Option<Rational>,
    pub rel_error_attacker: Option<Rational>,
    /// Relative gap between the projected and original defender values.
    pub rel_error_value: Option<Rational>,
    /// Whether the original game was solved as a zero-sum matrix game.
    pub zero_sum: bool,
}

fn relative(reference: &Rational, other: &Rational) -> Option<Rational> {
    (!reference.is_zero()).then(|| abs(&(reference - other)) / abs(reference))
}

/// Mixed strategy as weights over `sets` (lexicographic `k`-subsets).
fn spread(sets: &[Vec<usize>], marginals: &[Rational], k: usize) -> Result<Vec<Rational>> {
    let index: HashMap<&Vec<usize>, usize> = sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut out = vec![Rational::zero(); sets.len()];
    for (set, w) in realize_marginals(marginals, k)?.support {
        let i = *index.get(&set).ok_or_else(|| Error::Internal(format!("realized set {set:?} is not a pure strategy")))?;
        out[i] += w;
    }
    Ok(out)
}

/// Compares a set-function game with its additive projection.
///
/// Zero-sum originals are solved by linear programming, others by support
/// enumeration over at most `budget` support pairs.
pub fn approximation_report(original: &SetFunctionGame, projected: &SecurityGame, budget: usize) -> Result<ApproximationReport> {
    if projected.m() != original.m() || projected.k_a() != original.k_a || projected.k_d() != original.k_d {
        return Err(Error::Precondition("projected game does not match the original's dimensions".into()));
    }
    let view = original.bimatrix();
    let zero_sum = view.is_zero_sum();
    let (p, q) = if zero_sum {
        let s = solve_zero_sum_matrix(&view.a)?;
        (s.row_mix, s.col_mix)
    } else {
        let e = solve_bimatrix_support(&view, budget)?;
        (e.row_mix, e.col_mix)
    };
    let original_values = view.payoffs(&p, &q);

    let eq = solve_nash(projected)?;
    let p_bar = spread(&view.rows, &eq.profile.alpha, original.k_a)?;
    let q_bar = spread(&view.cols, &eq.profile.beta, original.k_d)?;
    let cross_defender = view.payoffs(&p, &q_bar).1;
    let cross_attacker = view.payoffs(&p_bar, &q).0;

    Ok(ApproximationReport {
        rel_error_defender: relative(&original_values.1, &cross_defender),
        rel_error_attacker: relative(&original_values.0, &cross_attacker),
        rel_error_value: relative(&original_values.1, &eq.v_d),
        projected: (eq.v_a, eq.v_d),
        original: original_values,
        cross_defender,
        cross_attacker,
        zero_sum,
    })
}
