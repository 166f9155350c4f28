//! Choosing attacker payoffs from two-point sets so as to maximize the
//! defender's equilibrium payoff.
//!
//! Every target's `uac` and `uau` is set to the lower or the upper end of a
//! given interval. [`optimize_exhaustive`] solves every choice.
//! [`optimize_pseudopoly`] needs the intervals to be disjoint: then the
//! orders of `uac` and `uau` across targets, and with them the partition of
//! every candidate cell, are the same for all choices. A cell's defender
//! half (and so its `v_d`) is fixed; only the attacker half varies, and it
//! couples the interior targets through one sum, which is searched by a
//! subset-sum table on exactly scaled integers.

pub mod subset_sum;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::affine::{self, Interval};
use crate::candidates::{construct_candidate, defender_constraints, Construction, EquilibriumCandidate, SolvedEquilibrium};
use crate::error::{Error, Result};
use crate::model::{require_admissible, target_admissible, validate, SecurityGame, SignMode, Target};
use crate::oracle::best_response_value_defender;
use crate::protective::solve_protective;
use crate::rational::{denominator_lcm, int, midpoint, Rational, Show};
use crate::solver::{construct_type2, evaluate_cell, solve_nash, type_one_cells, Cell};

use subset_sum::{reachable, scaled};

/// Default cap on the number of games the exhaustive path may solve.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Lb,
    Ub,
}

impl Endpoint {
    pub fn label(self) -> &'static str {
        match self {
            Endpoint::Lb => "lb",
            Endpoint::Ub => "ub",
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Endpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lb" => Ok(Endpoint::Lb),
            "ub" => Ok(Endpoint::Ub),
            _ => Err(Error::Document(format!("expected \"lb\" or \"ub\", got {s:?}"))),
        }
    }
}

/// Bounds `(lb, ub)` on the two attacker payoffs of one target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffInterval {
    pub uac: (Rational, Rational),
    pub uau: (Rational, Rational),
}

fn at(pair: &(Rational, Rational), e: Endpoint) -> &Rational {
    match e {
        Endpoint::Lb => &pair.0,
        Endpoint::Ub => &pair.1,
    }
}

impl PayoffInterval {
    pub fn uac_at(&self, e: Endpoint) -> &Rational {
        at(&self.uac, e)
    }

    pub fn uau_at(&self, e: Endpoint) -> &Rational {
        at(&self.uau, e)
    }

    /// Distinct `(uac, uau)` selections, upper ends first; a degenerate
    /// interval offers `lb` only.
    pub fn options(&self) -> Vec<(Endpoint, Endpoint)> {
        let ends = |p: &(Rational, Rational)| {
            if p.0 == p.1 {
                vec![Endpoint::Lb]
            } else {
                vec![Endpoint::Ub, Endpoint::Lb]
            }
        };
        let mut out = Vec::with_capacity(4);
        for c in ends(&self.uac) {
            for u in ends(&self.uau) {
                out.push((c, u));
            }
        }
        out
    }

    fn values(&self) -> [&Rational; 4] {
        [&self.uac.0, &self.uac.1, &self.uau.0, &self.uau.1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSpec {
    targets: Vec<PayoffInterval>,
}

impl IntervalSpec {
    pub fn new(targets: Vec<PayoffInterval>) -> Self {
        IntervalSpec { targets }
    }

    pub fn m(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[PayoffInterval] {
        &self.targets
    }

    /// Errors unless every interval has `lb <= ub`.
    pub fn check(&self) -> Result<()> {
        for (i, t) in self.targets.iter().enumerate() {
            for (name, (lb, ub)) in [("uac", &t.uac), ("uau", &t.uau)] {
                if lb > ub {
                    return Err(Error::Precondition(format!(
                        "target {}: {name} interval [{}, {}] is reversed",
                        i + 1,
                        Show(lb),
                        Show(ub)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of payoffs with two distinct candidate values.
    pub fn free_parameters(&self) -> usize {
        self.targets
            .iter()
            .map(|t| usize::from(t.uac.0 != t.uac.1) + usize::from(t.uau.0 != t.uau.1))
            .sum()
    }

    /// Why the disjointness assumption fails, if it does: the `uac`
    /// intervals must be pairwise disjoint, so must the `uau` intervals,
    /// and no value may be shared by two targets.
    pub fn disjointness_violation(&self) -> Option<String> {
        for (name, get) in [
            ("uac", (|t: &PayoffInterval| &t.uac) as fn(&PayoffInterval) -> &(Rational, Rational)),
            ("uau", |t: &PayoffInterval| &t.uau),
        ] {
            let mut idx: Vec<usize> = (0..self.m()).collect();
            idx.sort_by(|&a, &b| get(&self.targets[a]).0.cmp(&get(&self.targets[b]).0).then(a.cmp(&b)));
            for w in idx.windows(2) {
                if get(&self.targets[w[0]]).1 >= get(&self.targets[w[1]]).0 {
                    return Some(format!("{name} intervals of targets {} and {} overlap", w[0] + 1, w[1] + 1));
                }
            }
        }
        for i in 0..self.m() {
            for j in i + 1..self.m() {
                let vi = self.targets[i].values();
                if let Some(v) = self.targets[j].values().into_iter().find(|v| vi.contains(v)) {
                    return Some(format!("targets {} and {} share the payoff value {}", i + 1, j + 1, Show(v)));
                }
            }
        }
        None
    }

    pub fn satisfies_disjointness(&self) -> bool {
        self.disjointness_violation().is_none()
    }
}

/// Which end of each interval is used.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParameterChoice {
    pub uac: Vec<Endpoint>,
    pub uau: Vec<Endpoint>,
}

impl ParameterChoice {
    pub fn uniform(m: usize, e: Endpoint) -> Self {
        ParameterChoice { uac: vec![e; m], uau: vec![e; m] }
    }

    fn from_pairs(pairs: &[(Endpoint, Endpoint)]) -> Self {
        ParameterChoice {
            uac: pairs.iter().map(|p| p.0).collect(),
            uau: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// The choice as one vector, target by target, `uac` before `uau`.
    /// The exhaustive search breaks ties between optimal choices in favour
    /// of the largest such vector (`ub` over `lb`).
    pub fn key(&self) -> Vec<Endpoint> {
        self.uac.iter().zip(&self.uau).flat_map(|(&c, &u)| [c, u]).collect()
    }

    /// The game induced by this choice. Nothing is validated.
    pub fn game(&self, spec: &IntervalSpec, defender: &[(Rational, Rational)], k_a: usize, k_d: usize) -> SecurityGame {
        let targets = (0..spec.m())
            .map(|i| make_target(spec, defender, i, (self.uac[i], self.uau[i])))
            .collect();
        SecurityGame::new_unchecked(k_a, k_d, targets)
    }
}

impl fmt::Display for ParameterChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Endpoint]| v.iter().map(|e| e.label()).collect::<Vec<_>>().join(",");
        write!(f, "uac=[{}] uau=[{}]", join(&self.uac), join(&self.uau))
    }
}

fn make_target(spec: &IntervalSpec, defender: &[(Rational, Rational)], i: usize, o: (Endpoint, Endpoint)) -> Target {
    let p = &spec.targets[i];
    Target::new(p.uac_at(o.0).clone(), p.uau_at(o.1).clone(), defender[i].0.clone(), defender[i].1.clone())
}

/// How much work an optimization did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExploreStats {
    /// Games solved outright (exhaustive path).
    pub choices: u64,
    /// Choices skipped because the induced game is not admissible.
    pub inadmissible: u64,
    /// Candidate cells considered (structured path).
    pub cells: usize,
    /// Cells dropped because their defender half is infeasible.
    pub cells_pruned: usize,
    /// Windows for `c1` examined.
    pub windows: usize,
    /// Windows dropped because some target has no consistent choice.
    pub windows_pruned: usize,
    /// Subset-sum states turned into concrete games.
    pub states: usize,
    /// States dropped because the implied `c1` leaves the window.
    pub states_pruned: usize,
    /// Concrete games checked against a cell.
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub best_choice: ParameterChoice,
    pub game: SecurityGame,
    /// The solver's equilibrium of `game`.
    pub equilibrium: SolvedEquilibrium,
    pub v_d: Rational,
    pub explored: ExploreStats,
}

fn check_inputs(defender: &[(Rational, Rational)], spec: &IntervalSpec) -> Result<()> {
    if defender.len() != spec.m() {
        return Err(Error::Precondition(format!(
            "{} defender payoff pairs for {} targets",
            defender.len(),
            spec.m()
        )));
    }
    spec.check()
}

fn solve_any(game: &SecurityGame) -> Result<SolvedEquilibrium> {
    if game.is_fully_protective() {
        solve_protective(game)
    } else {
        solve_nash(game)
    }
}

/// Solves every admissible choice and returns the best, preferring the
/// largest [`ParameterChoice::key`] among equals.
pub fn optimize_exhaustive(
    defender: &[(Rational, Rational)],
    k_a: usize,
    k_d: usize,
    spec: &IntervalSpec,
    budget: u64,
) -> Result<OptimizationResult> {
    check_inputs(defender, spec)?;
    let m = spec.m();
    let mut free: Vec<(usize, bool)> = Vec::new();
    for (i, t) in spec.targets.iter().enumerate() {
        if t.uac.0 != t.uac.1 {
            free.push((i, false));
        }
        if t.uau.0 != t.uau.1 {
            free.push((i, true));
        }
    }
    let f = free.len();
    if f >= 63 || (1u64 << f) > budget {
        return Err(Error::Budget(format!("2^{f} parameter choices exceed the budget of {budget}")));
    }
    let mut stats = ExploreStats::default();
    let mut best: Option<OptimizationResult> = None;
    for mask in 0..(1u64 << f) {
        let mut choice = ParameterChoice::uniform(m, Endpoint::Lb);
        for (pos, &(i, is_uau)) in free.iter().enumerate() {
            if (mask >> (f - 1 - pos)) & 1 == 1 {
                if is_uau {
                    choice.uau[i] = Endpoint::Ub;
                } else {
                    choice.uac[i] = Endpoint::Ub;
                }
            }
        }
        let game = choice.game(spec, defender, k_a, k_d);
        if !validate(&game, true).is_admissible() {
            stats.inadmissible += 1;
            continue;
        }
        stats.choices += 1;
        let eq = solve_any(&game)?;
        // Choices arrive in increasing key order, so `>=` keeps the largest.
        if best.as_ref().is_none_or(|b| eq.v_d >= b.v_d) {
            best = Some(OptimizationResult {
                best_choice: choice,
                game,
                v_d: eq.v_d.clone(),
                equilibrium: eq,
                explored: ExploreStats::default(),
            });
        }
    }
    let mut best = best.ok_or_else(|| Error::Infeasible("no parameter choice gives an admissible game".into()))?;
    best.explored = stats;
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct PseudoOptions {
    /// Skip cells and windows that cannot hold an equilibrium before
    /// building any game for them. Never changes the result.
    pub prune: bool,
    /// Scale for the subset-sum table. By default the least common multiple
    /// of the denominators involved, which keeps the table exact.
    pub scale: Option<BigInt>,
}

impl Default for PseudoOptions {
    fn default() -> Self {
        PseudoOptions { prune: true, scale: None }
    }
}

/// A range of `c1` on which every target comparison has a fixed outcome.
#[derive(Debug, Clone)]
struct Window {
    sample: Rational,
    range: Interval,
}

fn windows(breaks: &[Rational]) -> Vec<Window> {
    let Some((first, last)) = breaks.first().zip(breaks.last()) else {
        return vec![Window { sample: Rational::zero(), range: Interval::everything() }];
    };
    let mut out = vec![Window {
        sample: first - int(1),
        range: Interval { lower: None, upper: Some(affine::Bound { value: first.clone(), open: true }) },
    }];
    for (i, b) in breaks.iter().enumerate() {
        out.push(Window { sample: b.clone(), range: Interval::point(b.clone()) });
        if let Some(next) = breaks.get(i + 1) {
            out.push(Window { sample: midpoint(b, next), range: Interval::open(b.clone(), next.clone()) });
        }
    }
    out.push(Window {
        sample: last + int(1),
        range: Interval { lower: Some(affine::Bound { value: last.clone(), open: true }), upper: None },
    });
    out
}

/// Whether a target in partition cell `cell` is consistent with `c1`.
fn fits(cell: u8, t: &Target, c1: &Rational) -> bool {
    match cell {
        1 => t.uau <= *c1,
        3 => t.uau >= *c1,
        9 => t.uac >= *c1,
        5 => t.uac < *c1 && *c1 < t.uau,
        _ => true,
    }
}

fn cartesian(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |k| {
                    let mut p = prefix.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out
}

/// The defender's payoff in a cell, or `None` if its defender half is
/// infeasible. Uses the same representative as the feasibility check.
fn cell_value(game: &SecurityGame, cand: &EquilibriumCandidate) -> Option<Rational> {
    let iv = affine::solve(&defender_constraints(game, cand)).ok()?;
    let x = match cand.defender.free {
        Some(_) => iv.representative()?,
        None => Rational::zero(),
    };
    let alpha: Vec<Rational> = cand.defender.marginals.iter().map(|a| a.at(&x)).collect();
    Some(best_response_value_defender(game, &alpha))
}

enum Plan {
    Cell { cell: Cell, cand: Box<EquilibriumCandidate>, v_d: Option<Rational> },
    TypeTwo { v_d: Rational },
}

impl Plan {
    fn v_d(&self) -> Option<&Rational> {
        match self {
            Plan::Cell { v_d, .. } => v_d.as_ref(),
            Plan::TypeTwo { v_d } => Some(v_d),
        }
    }
}

struct Search<'a> {
    spec: &'a IntervalSpec,
    defender: &'a [(Rational, Rational)],
    k_a: usize,
    k_d: usize,
    opts: &'a PseudoOptions,
    options: Vec<Vec<(Endpoint, Endpoint)>>,
    windows: Vec<Window>,
    stats: ExploreStats,
    best: Option<OptimizationResult>,
}

impl Search<'_> {
    fn target(&self, i: usize, o: (Endpoint, Endpoint)) -> Target {
        make_target(self.spec, self.defender, i, o)
    }

    fn reached(&self, claimed: &Rational) -> bool {
        self.best.as_ref().is_some_and(|b| b.v_d >= *claimed)
    }

    /// Builds the game of `pairs`, checks it against `cell` (or the Type II
    /// construction) and keeps it if the solver confirms its value.
    fn try_choice(&mut self, pairs: &[(Endpoint, Endpoint)], cell: Option<Cell>) -> Result<()> {
        let choice = ParameterChoice::from_pairs(pairs);
        let game = choice.game(self.spec, self.defender, self.k_a, self.k_d);
        if !validate(&game, true).is_admissible() {
            return Ok(());
        }
        self.stats.evaluations += 1;
        let hit = match cell {
            Some(c) => evaluate_cell(&game, c)?.is_some(),
            None => construct_type2(&game)?.is_some(),
        };
        if !hit {
            return Ok(());
        }
        let eq = solve_nash(&game)?;
        if self.best.as_ref().is_none_or(|b| eq.v_d > b.v_d) {
            self.best = Some(OptimizationResult {
                best_choice: choice,
                game,
                v_d: eq.v_d.clone(),
                equilibrium: eq,
                explored: ExploreStats::default(),
            });
        }
        Ok(())
    }

    /// Reachable sums over the interior targets with one witness each. With
    /// `c1` anchored the sum is the total interior coverage; otherwise it is
    /// the pair `(sum uau/delta_a, sum 1/delta_a)`.
    fn interior_states(
        &self,
        i5: &[usize],
        items: &[Vec<(Endpoint, Endpoint)>],
        anchor: Option<&Rational>,
    ) -> Result<Vec<(Rational, Rational, Vec<usize>)>> {
        let values: Vec<Vec<(Rational, Rational)>> = i5
            .iter()
            .zip(items)
            .map(|(&i, alts)| {
                alts.iter()
                    .map(|&o| {
                        let t = self.target(i, o);
                        let da = t.delta_a();
                        match anchor {
                            Some(c1) => ((&t.uau - c1) / &da, Rational::zero()),
                            None => (&t.uau / &da, int(1) / &da),
                        }
                    })
                    .collect()
            })
            .collect();
        let scale_for = |pick: fn(&(Rational, Rational)) -> &Rational| -> BigInt {
            match &self.opts.scale {
                Some(s) => s.clone(),
                None => denominator_lcm(values.iter().flatten().map(pick)),
            }
        };
        let s1 = scale_for(|v| &v.0);
        let s2 = scale_for(|v| &v.1);
        let mut keyed = Vec::with_capacity(values.len());
        for alts in &values {
            let mut row = Vec::with_capacity(alts.len());
            for (a, b) in alts {
                row.push((scaled(a, &s1)?, scaled(b, &s2)?));
            }
            keyed.push(row);
        }
        let zero = (BigInt::zero(), BigInt::zero());
        let states = reachable(&keyed, zero, |x, y| (&x.0 + &y.0, &x.1 + &y.1));
        let (d1, d2) = (Rational::from_integer(s1), Rational::from_integer(s2));
        Ok(states
            .into_iter()
            .map(|((p, q), w)| (Rational::from_integer(p) / &d1, Rational::from_integer(q) / &d2, w))
            .collect())
    }

    fn search_cell(&mut self, cell: Cell, cand: &EquilibriumCandidate, claimed: Option<&Rational>) -> Result<()> {
        let part = &cand.partition;
        let m = self.spec.m();
        let specials: Vec<usize> = [cand.j2, cand.j6, cand.j8].into_iter().flatten().collect();
        let i5 = part.set(5);
        let fixed_beta = int((part.count(7) + part.count(8) + part.count(9)) as i64);
        let sizes: Vec<usize> = specials.iter().map(|&j| self.options[j].len()).collect();
        for combo in cartesian(&sizes) {
            let fixed: Vec<(usize, (Endpoint, Endpoint))> =
                specials.iter().zip(&combo).map(|(&j, &k)| (j, self.options[j][k])).collect();
            let pick = |j: usize| fixed.iter().find(|f| f.0 == j).map(|f| f.1).expect("special target");
            let anchor = match (cand.j2, cand.j8) {
                (Some(j), _) => Some(self.target(j, pick(j)).uau),
                (None, Some(j)) => Some(self.target(j, pick(j)).uac),
                (None, None) => None,
            };
            let wins = match &anchor {
                Some(a) => vec![Window { sample: a.clone(), range: Interval::point(a.clone()) }],
                None => self.windows.clone(),
            };
            for w in wins {
                self.stats.windows += 1;
                let allowed: Vec<Vec<(Endpoint, Endpoint)>> = (0..m)
                    .map(|i| match fixed.iter().find(|f| f.0 == i) {
                        Some(f) => vec![f.1],
                        None => self.options[i]
                            .iter()
                            .copied()
                            .filter(|&o| fits(part.cell(i), &self.target(i, o), &w.sample))
                            .collect(),
                    })
                    .collect();
                if self.opts.prune && allowed.iter().any(Vec::is_empty) {
                    self.stats.windows_pruned += 1;
                    continue;
                }
                let mut pairs: Vec<(Endpoint, Endpoint)> =
                    (0..m).map(|i| allowed[i].first().copied().unwrap_or(self.options[i][0])).collect();
                let items: Vec<Vec<(Endpoint, Endpoint)>> = i5.iter().map(|&i| allowed[i].clone()).collect();
                for (p, q, picks) in self.interior_states(&i5, &items, anchor.as_ref())? {
                    // With no anchor and no extra coverage slot, the sum pins c1.
                    if self.opts.prune && anchor.is_none() && cand.j6.is_none() && !q.is_zero() {
                        let c1 = (&fixed_beta + &p - int(self.k_d as i64)) / &q;
                        if !w.range.contains(&c1) {
                            self.stats.states_pruned += 1;
                            continue;
                        }
                    }
                    self.stats.states += 1;
                    for (k, &i) in i5.iter().enumerate() {
                        pairs[i] = items[k][picks[k]];
                    }
                    self.try_choice(&pairs, Some(cell))?;
                    if claimed.is_some_and(|c| self.reached(c)) {
                        return Ok(());
                    }
                }
            }
        }
        Ok(())
    }

    /// Every attacked target fully covered: the attacked set and `c1` are
    /// fixed by the `uac` order up to the choice at the weakest attacked
    /// target; elsewhere the choice needing the least coverage is best.
    fn search_type2(&mut self, rep: &SecurityGame, claimed: &Rational) -> Result<()> {
        let (m, k_a, k_d) = (rep.m(), self.k_a, self.k_d);
        let mut by_uac = rep.orders().perm_uac;
        by_uac.reverse();
        let top = &by_uac[..k_a];
        let j = *top.last().expect("k_a >= 1");
        for oj in self.options[j].clone() {
            let c1 = self.target(j, oj).uac;
            let mut pairs = Vec::with_capacity(m);
            let mut total = Rational::zero();
            let mut ok = true;
            for i in 0..m {
                if i == j {
                    pairs.push(oj);
                    continue;
                }
                if top.contains(&i) {
                    pairs.push(self.options[i][0]);
                    continue;
                }
                let need = |o: &(Endpoint, Endpoint)| {
                    let t = self.target(i, *o);
                    ((&t.uau - &c1) / t.delta_a()).max(Rational::zero())
                };
                let best = self.options[i]
                    .iter()
                    .filter(|&&o| self.target(i, o).uac <= c1)
                    .min_by(|a, b| need(a).cmp(&need(b)));
                match best {
                    Some(o) => {
                        total += need(o);
                        pairs.push(*o);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && total <= int((k_d - k_a) as i64) {
                self.try_choice(&pairs, None)?;
                if self.reached(claimed) {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

/// Structured search over candidate cells, best defender value first.
///
/// Requires the disjointness assumption (see
/// [`IntervalSpec::disjointness_violation`]). Each cell's value is known
/// before any choice is made; a cell is settled by the first concrete game
/// whose solver equilibrium attains that value.
pub fn optimize_pseudopoly(
    defender: &[(Rational, Rational)],
    k_a: usize,
    k_d: usize,
    spec: &IntervalSpec,
    opts: &PseudoOptions,
) -> Result<OptimizationResult> {
    check_inputs(defender, spec)?;
    if let Some(why) = spec.disjointness_violation() {
        return Err(Error::Precondition(format!("interval disjointness assumption violated: {why}")));
    }
    if let Some(s) = &opts.scale {
        if *s <= BigInt::zero() {
            return Err(Error::Precondition("scale must be positive".into()));
        }
    }
    let m = spec.m();
    let mut options = Vec::with_capacity(m);
    for i in 0..m {
        let ok: Vec<(Endpoint, Endpoint)> = spec.targets[i]
            .options()
            .into_iter()
            .filter(|&o| target_admissible(&make_target(spec, defender, i, o), SignMode::Strict))
            .collect();
        if ok.is_empty() {
            return Err(Error::Infeasible(format!("target {} has no admissible payoff choice", i + 1)));
        }
        options.push(ok);
    }
    let rep_pairs: Vec<(Endpoint, Endpoint)> = options.iter().map(|o| o[0]).collect();
    let rep = ParameterChoice::from_pairs(&rep_pairs).game(spec, defender, k_a, k_d);
    require_admissible(&rep)?;

    let mut breaks: Vec<Rational> = spec.targets.iter().flat_map(|t| t.values()).cloned().collect();
    breaks.sort();
    breaks.dedup();

    let mut search = Search {
        spec,
        defender,
        k_a,
        k_d,
        opts,
        options,
        windows: windows(&breaks),
        stats: ExploreStats::default(),
        best: None,
    };

    let mut plans = Vec::new();
    for cell in type_one_cells(&rep) {
        search.stats.cells += 1;
        let Construction::Built(cand) = construct_candidate(&rep, cell.r, cell.s, cell.t, cell.ty)? else {
            search.stats.cells_pruned += 1;
            continue;
        };
        let v_d = cell_value(&rep, &cand);
        if v_d.is_none() && opts.prune {
            search.stats.cells_pruned += 1;
            continue;
        }
        plans.push(Plan::Cell { cell, cand, v_d });
    }
    if k_d > k_a {
        let mut by_uac = rep.orders().perm_uac;
        by_uac.reverse();
        let v_d = by_uac[..k_a].iter().map(|&i| rep.target(i).udc.clone()).sum();
        plans.push(Plan::TypeTwo { v_d });
    }
    // Highest value first; plans without a value go last.
    plans.sort_by(|a, b| match (a.v_d(), b.v_d()) {
        (Some(x), Some(y)) => y.cmp(x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });

    for plan in &plans {
        if let Some(v) = plan.v_d() {
            if search.reached(v) {
                break;
            }
        }
        match plan {
            Plan::Cell { cell, cand, v_d } => search.search_cell(*cell, cand, v_d.as_ref())?,
            Plan::TypeTwo { v_d } => search.search_type2(&rep, v_d)?,
        }
    }
    let stats = search.stats;
    let mut best = search
        .best
        .ok_or_else(|| Error::Infeasible("no parameter choice yields a feasible equilibrium".into()))?;
    best.explored = stats;
    Ok(best)
}
