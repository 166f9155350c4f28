//! Candidate equilibria for a fixed cell `(r, s, t, type)`.
//!
//! A candidate assigns every target to one of the nine sets `I1..I9`
//! (attack marginal 0 / interior / 1 against coverage marginal 0 / interior
//! / 1) and pins down as many marginals as the indifference equations
//! allow. The two players decouple: the attack marginals and `c2` form one
//! affine system, the coverage marginals and `c1` another. Each system has
//! at most one free variable; feasibility is the interval of values of that
//! variable on which every equilibrium condition holds.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::affine::{self, Affine, Constraint, Interval};
use crate::error::{Error, Result};
use crate::model::{expected_outcomes_unchecked, MarginalProfile, SecurityGame};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EquilibriumType {
    IAi,
    IAii,
    IAiii,
    IBi,
    IBii,
    IBiii,
    II,
}

impl EquilibriumType {
    /// Type I subtypes in the order the solver tries them.
    pub const TYPE_I: [EquilibriumType; 6] = [
        EquilibriumType::IAi,
        EquilibriumType::IAii,
        EquilibriumType::IAiii,
        EquilibriumType::IBi,
        EquilibriumType::IBii,
        EquilibriumType::IBiii,
    ];

    pub const ALL: [EquilibriumType; 7] = [
        EquilibriumType::IAi,
        EquilibriumType::IAii,
        EquilibriumType::IAiii,
        EquilibriumType::IBi,
        EquilibriumType::IBii,
        EquilibriumType::IBiii,
        EquilibriumType::II,
    ];

    /// `I6` nonempty.
    pub fn is_b(self) -> bool {
        matches!(self, EquilibriumType::IBi | EquilibriumType::IBii | EquilibriumType::IBiii)
    }

    /// `I2` nonempty.
    pub fn has_i2(self) -> bool {
        matches!(self, EquilibriumType::IAii | EquilibriumType::IBii)
    }

    /// `I8` nonempty.
    pub fn has_i8(self) -> bool {
        matches!(self, EquilibriumType::IAiii | EquilibriumType::IBiii)
    }

    pub fn label(self) -> &'static str {
        match self {
            EquilibriumType::IAi => "I.A.i",
            EquilibriumType::IAii => "I.A.ii",
            EquilibriumType::IAiii => "I.A.iii",
            EquilibriumType::IBi => "I.B.i",
            EquilibriumType::IBii => "I.B.ii",
            EquilibriumType::IBiii => "I.B.iii",
            EquilibriumType::II => "II",
        }
    }
}

impl fmt::Display for EquilibriumType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EquilibriumType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EquilibriumType::ALL
            .into_iter()
            .find(|t| t.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Document(format!("unknown equilibrium type {s:?}")))
    }
}

/// Zero, strictly between zero and one, or one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Zero,
    Interior,
    One,
}

impl Level {
    pub fn of(x: &Rational) -> Level {
        if x.is_zero() {
            Level::Zero
        } else if x.is_one() {
            Level::One
        } else {
            Level::Interior
        }
    }

    fn index(self) -> u8 {
        match self {
            Level::Zero => 0,
            Level::Interior => 1,
            Level::One => 2,
        }
    }

    fn value(self) -> Option<Rational> {
        match self {
            Level::Zero => Some(Rational::zero()),
            Level::One => Some(Rational::one()),
            Level::Interior => None,
        }
    }
}

/// Set number (1..=9) for an (attack, coverage) level pair.
pub fn cell_of(alpha: Level, beta: Level) -> u8 {
    1 + alpha.index() + 3 * beta.index()
}

/// Attack level of set `n`.
pub fn alpha_level(n: u8) -> Level {
    [Level::Zero, Level::Interior, Level::One][((n - 1) % 3) as usize]
}

/// Coverage level of set `n`.
pub fn beta_level(n: u8) -> Level {
    [Level::Zero, Level::Interior, Level::One][((n - 1) / 3) as usize]
}

/// Assignment of every target to one of `I1..I9`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetPartition {
    cells: Vec<u8>,
}

impl TargetPartition {
    pub fn from_cells(cells: Vec<u8>) -> Self {
        assert!(cells.iter().all(|c| (1..=9).contains(c)));
        TargetPartition { cells }
    }

    pub fn m(&self) -> usize {
        self.cells.len()
    }

    /// Set number of target `i` (0-indexed target).
    pub fn cell(&self, i: usize) -> u8 {
        self.cells[i]
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    /// Members of `I_n`, ascending 0-indexed.
    pub fn set(&self, n: u8) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i] == n).collect()
    }

    pub fn count(&self, n: u8) -> usize {
        self.cells.iter().filter(|&&c| c == n).count()
    }

    /// `I1..I9` as 1-indexed target lists.
    pub fn sets_one_indexed(&self) -> Vec<Vec<usize>> {
        (1..=9).map(|n| self.set(n).into_iter().map(|i| i + 1).collect()).collect()
    }
}

impl fmt::Display for TargetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, set) in self.sets_one_indexed().iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let items: Vec<String> = set.iter().map(ToString::to_string).collect();
            write!(f, "I{}={{{}}}", n + 1, items.join(","))?;
        }
        Ok(())
    }
}

/// Assigns each target to its set by exact comparison with 0 and 1.
pub fn classify_profile(profile: &MarginalProfile) -> TargetPartition {
    TargetPartition::from_cells(
        profile
            .alpha
            .iter()
            .zip(&profile.beta)
            .map(|(a, b)| cell_of(Level::of(a), Level::of(b)))
            .collect(),
    )
}

/// The quantity a one-parameter family of candidates is parameterized by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeVariable {
    Alpha(usize),
    Beta(usize),
    C1,
    C2,
}

impl FreeVariable {
    pub fn is_marginal(self) -> bool {
        matches!(self, FreeVariable::Alpha(_) | FreeVariable::Beta(_))
    }
}

impl fmt::Display for FreeVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeVariable::Alpha(i) => write!(f, "alpha({})", i + 1),
            FreeVariable::Beta(i) => write!(f, "beta({})", i + 1),
            FreeVariable::C1 => f.write_str("c1"),
            FreeVariable::C2 => f.write_str("c2"),
        }
    }
}

/// One player's half of a candidate, affine in that half's free variable.
#[derive(Debug, Clone)]
pub struct Side {
    pub marginals: Vec<Affine>,
    pub constant: Affine,
    pub free: Option<FreeVariable>,
}

/// A constructed but not yet checked candidate.
#[derive(Debug, Clone)]
pub struct EquilibriumCandidate {
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub ty: EquilibriumType,
    pub partition: TargetPartition,
    pub j2: Option<usize>,
    pub j6: Option<usize>,
    pub j8: Option<usize>,
    /// Attack marginals and `c2`.
    pub defender: Side,
    /// Coverage marginals and `c1`.
    pub attacker: Side,
}

impl EquilibriumCandidate {
    /// The single marginal left undetermined by the construction, if any.
    pub fn free_slot(&self) -> Option<FreeVariable> {
        [self.defender.free, self.attacker.free]
            .into_iter()
            .flatten()
            .find(|v| v.is_marginal())
    }
}

/// Result of building a candidate.
#[derive(Debug, Clone)]
pub enum Construction {
    Built(Box<EquilibriumCandidate>),
    /// The sets required by the type cannot be populated.
    Structural(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Multiplicity {
    Unique,
    /// A one-parameter continuum; `representative` is the reported member.
    Continuum {
        variable: FreeVariable,
        interval: Interval,
        representative: Rational,
    },
    Family(String),
}

impl Multiplicity {
    pub fn kind(&self) -> &'static str {
        match self {
            Multiplicity::Unique => "unique",
            Multiplicity::Continuum { .. } => "continuum",
            Multiplicity::Family(_) => "family",
        }
    }
}

/// A verified equilibrium together with how it was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolvedEquilibrium {
    pub profile: MarginalProfile,
    pub ty: EquilibriumType,
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub partition: TargetPartition,
    pub j2: Option<usize>,
    pub j6: Option<usize>,
    pub j8: Option<usize>,
    pub c1: Rational,
    pub c2: Rational,
    pub v_a: Rational,
    pub v_d: Rational,
    pub multiplicity: Multiplicity,
}

/// Outcome of the feasibility test.
#[derive(Debug, Clone)]
pub enum Feasibility {
    Accepted(Box<SolvedEquilibrium>),
    /// Names the first violated condition.
    Rejected(String),
}

/// Inclusive bounds of the sweep over `(r, s, t)`.
pub fn r_max(game: &SecurityGame) -> usize {
    let m = game.m();
    (m - game.k_a()).min(m - game.k_d())
}

pub fn s_max(game: &SecurityGame, r: usize) -> Option<usize> {
    let m = game.m();
    (m - game.k_d()).checked_sub(r).map(|v| v.min(game.k_a()))
}

pub fn t_max(game: &SecurityGame, s: usize) -> Option<usize> {
    game.k_a().checked_sub(s).map(|v| v.min(game.k_d()))
}

fn check_bounds(game: &SecurityGame, r: usize, s: usize, t: usize) -> Result<()> {
    let ok = r <= r_max(game)
        && s_max(game, r).is_some_and(|sm| s <= sm)
        && t_max(game, s).is_some_and(|tm| t <= tm);
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "(r, s, t) = ({r}, {s}, {t}) outside the sweep bounds for m = {}, k_a = {}, k_d = {}",
            game.m(),
            game.k_a(),
            game.k_d()
        )))
    }
}

/// Takes `n` members of `order` that are still `free`, in order.
fn take(order: &[usize], free: &mut [bool], n: usize) -> Option<Vec<usize>> {
    let picked: Vec<usize> = order.iter().copied().filter(|&i| free[i]).take(n).collect();
    if picked.len() < n {
        return None;
    }
    for &i in &picked {
        free[i] = false;
    }
    Some(picked)
}

/// Builds the candidate of a Type I cell.
pub fn construct_candidate(
    game: &SecurityGame,
    r: usize,
    s: usize,
    t: usize,
    ty: EquilibriumType,
) -> Result<Construction> {
    if ty == EquilibriumType::II {
        return Err(Error::Precondition("Type II equilibria are built by construct_type2".into()));
    }
    check_bounds(game, r, s, t)?;
    let orders = game.orders();
    let m = game.m();
    let mut free = vec![true; m];
    let mut cells = vec![5u8; m];
    let desc_uac: Vec<usize> = orders.perm_uac.iter().rev().copied().collect();

    let mut place = |order: &[usize], n: usize, cell: u8, what: &str| -> std::result::Result<Vec<usize>, String> {
        let got = take(order, &mut free, n).ok_or_else(|| format!("not enough targets left for {what}"))?;
        for &i in &got {
            cells[i] = cell;
        }
        Ok(got)
    };
    let built = (|| -> std::result::Result<_, String> {
        place(&orders.perm_uau, r, 1, "I1")?;
        let j2 = if ty.has_i2() { place(&orders.perm_uau, 1, 2, "I2")?.pop() } else { None };
        place(&orders.perm_dd, s, 3, "I3")?;
        let j6 = if ty.is_b() { place(&orders.perm_dd, 1, 6, "I6")?.pop() } else { None };
        place(&desc_uac, t, 9, "I9")?;
        let j8 = if ty.has_i8() { place(&desc_uac, 1, 8, "I8")?.pop() } else { None };
        Ok((j2, j6, j8))
    })();
    let (j2, j6, j8) = match built {
        Ok(v) => v,
        Err(why) => return Ok(Construction::Structural(why)),
    };
    let partition = TargetPartition::from_cells(cells);
    Ok(Construction::Built(Box::new(build_sides(game, r, s, t, ty, partition, j2, j6, j8))))
}

/// Solves `s0 + g*c + u = k` for the constant `c` and the optional extra
/// marginal `u`, leaving at most one of them free.
fn solve_side(
    s0: &Rational,
    g: &Rational,
    k: &Rational,
    anchor: Option<Rational>,
    has_u: bool,
) -> (Affine, Option<Affine>, Kind) {
    let rest = k - s0;
    match anchor {
        Some(a) => {
            let u = has_u.then(|| Affine::constant(&rest - g * &a));
            (Affine::constant(a), u, Kind::Fixed)
        }
        None if g.is_zero() => {
            let u = has_u.then(|| Affine::constant(rest.clone()));
            (Affine::var(), u, Kind::Constant)
        }
        None if has_u => {
            let c = Affine { constant: &rest / g, slope: -(Rational::one() / g) };
            (c, Some(Affine::var()), Kind::Marginal)
        }
        None => (Affine::constant(&rest / g), None, Kind::Fixed),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Fixed,
    Constant,
    Marginal,
}

#[allow(clippy::too_many_arguments)]
fn build_sides(
    game: &SecurityGame,
    r: usize,
    s: usize,
    t: usize,
    ty: EquilibriumType,
    partition: TargetPartition,
    j2: Option<usize>,
    j6: Option<usize>,
    j8: Option<usize>,
) -> EquilibriumCandidate {
    let m = game.m();
    let i5 = partition.set(5);
    let dd = game.delta_d();
    let da = game.delta_a();

    // Attack marginals: alpha_i = c2 / delta_d(i) on I5.
    let d_sum: Rational = i5.iter().map(|&i| Rational::one() / &dd[i]).sum();
    let fixed_alpha = int(partition.cells().iter().filter(|&&c| alpha_level(c) == Level::One).count() as i64);
    let u_alpha = j2.or(j8);
    let (c2, u, kind) = solve_side(
        &fixed_alpha,
        &d_sum,
        &int(game.k_a() as i64),
        j6.map(|j| dd[j].clone()),
        u_alpha.is_some(),
    );
    let mut alpha = vec![Affine::zero(); m];
    for (i, a) in alpha.iter_mut().enumerate() {
        let cell = partition.cell(i);
        *a = match alpha_level(cell).value() {
            Some(v) => Affine::constant(v),
            None if cell == 5 => c2.scale(&(Rational::one() / &dd[i])),
            None => u.clone().expect("special attack marginal"),
        };
    }
    let defender_free = match kind {
        Kind::Fixed => None,
        Kind::Constant => Some(FreeVariable::C2),
        Kind::Marginal => Some(FreeVariable::Alpha(u_alpha.expect("marginal slot"))),
    };

    // Coverage marginals: beta_i = (uau(i) - c1) / delta_a(i) on I5.
    let a_sum: Rational = i5.iter().map(|&i| Rational::one() / &da[i]).sum();
    let b_sum: Rational = i5.iter().map(|&i| &game.target(i).uau / &da[i]).sum();
    let fixed_beta = int(partition.cells().iter().filter(|&&c| beta_level(c) == Level::One).count() as i64);
    let anchor = j2
        .map(|j| game.target(j).uau.clone())
        .or_else(|| j8.map(|j| game.target(j).uac.clone()));
    let (c1, u, kind) = solve_side(
        &(fixed_beta + &b_sum),
        &(-&a_sum),
        &int(game.k_d() as i64),
        anchor,
        j6.is_some(),
    );
    let mut beta = vec![Affine::zero(); m];
    for (i, b) in beta.iter_mut().enumerate() {
        let cell = partition.cell(i);
        *b = match beta_level(cell).value() {
            Some(v) => Affine::constant(v),
            None if cell == 5 => c1.neg().shift(&game.target(i).uau).scale(&(Rational::one() / &da[i])),
            None => u.clone().expect("special coverage marginal"),
        };
    }
    let attacker_free = match kind {
        Kind::Fixed => None,
        Kind::Constant => Some(FreeVariable::C1),
        Kind::Marginal => Some(FreeVariable::Beta(j6.expect("marginal slot"))),
    };

    EquilibriumCandidate {
        r,
        s,
        t,
        ty,
        partition,
        j2,
        j6,
        j8,
        defender: Side { marginals: alpha, constant: c2, free: defender_free },
        attacker: Side { marginals: beta, constant: c1, free: attacker_free },
    }
}

fn interior(x: &Affine, name: &str, i: usize, out: &mut Vec<Constraint>) {
    out.push(Constraint::gt(x, &Affine::zero(), format!("{name}({}) > 0", i + 1)));
    out.push(Constraint::gt(&Affine::constant(Rational::one()), x, format!("{name}({}) < 1", i + 1)));
}

fn sum_equals(xs: &[Affine], k: usize, name: &str) -> Constraint {
    let total = xs.iter().fold(Affine::zero(), |acc, x| acc.add(x));
    Constraint::eq(&total, &Affine::constant(int(k as i64)), format!("sum of {name} = {k}"))
}

/// Constraints on the attack marginals and `c2`.
pub fn defender_constraints(game: &SecurityGame, cand: &EquilibriumCandidate) -> Vec<Constraint> {
    let mut out = Vec::new();
    let side = &cand.defender;
    for (i, a) in side.marginals.iter().enumerate() {
        if alpha_level(cand.partition.cell(i)) == Level::Interior {
            interior(a, "alpha", i, &mut out);
        }
    }
    out.push(sum_equals(&side.marginals, game.k_a(), "alpha"));
    for (i, a) in side.marginals.iter().enumerate() {
        let gain = a.scale(&game.target(i).delta_d());
        let b = beta_level(cand.partition.cell(i));
        if b != Level::Zero {
            out.push(Constraint::ge(&gain, &side.constant, format!("covered target {} needs alpha*delta_d >= c2", i + 1)));
        }
        if b != Level::One {
            out.push(Constraint::ge(&side.constant, &gain, format!("exposed target {} needs alpha*delta_d <= c2", i + 1)));
        }
    }
    out
}

/// Constraints on the coverage marginals and `c1`.
pub fn attacker_constraints(game: &SecurityGame, cand: &EquilibriumCandidate) -> Vec<Constraint> {
    let mut out = Vec::new();
    let side = &cand.attacker;
    for (i, b) in side.marginals.iter().enumerate() {
        if beta_level(cand.partition.cell(i)) == Level::Interior {
            interior(b, "beta", i, &mut out);
        }
    }
    out.push(sum_equals(&side.marginals, game.k_d(), "beta"));
    for (i, b) in side.marginals.iter().enumerate() {
        let t = game.target(i);
        let payoff = b.scale(&-t.delta_a()).shift(&t.uau);
        let a = alpha_level(cand.partition.cell(i));
        if a != Level::Zero {
            out.push(Constraint::ge(&payoff, &side.constant, format!("attacked target {} needs payoff >= c1", i + 1)));
        }
        if a != Level::One {
            out.push(Constraint::ge(&side.constant, &payoff, format!("spared target {} needs payoff <= c1", i + 1)));
        }
    }
    out
}

fn side_interval(constraints: &[Constraint], free: Option<FreeVariable>) -> std::result::Result<(Interval, Rational), String> {
    let iv = affine::solve(constraints)?;
    let x = match free {
        Some(_) => iv.representative().ok_or_else(|| "empty interval".to_string())?,
        None => Rational::zero(),
    };
    Ok((iv, x))
}

/// Tests a candidate against every equilibrium condition.
pub fn check_feasibility(game: &SecurityGame, cand: &EquilibriumCandidate) -> Feasibility {
    let (iv_d, x_d) = match side_interval(&defender_constraints(game, cand), cand.defender.free) {
        Ok(v) => v,
        Err(why) => return Feasibility::Rejected(why),
    };
    let (iv_a, x_a) = match side_interval(&attacker_constraints(game, cand), cand.attacker.free) {
        Ok(v) => v,
        Err(why) => return Feasibility::Rejected(why),
    };
    let alpha: Vec<Rational> = cand.defender.marginals.iter().map(|a| a.at(&x_d)).collect();
    let beta: Vec<Rational> = cand.attacker.marginals.iter().map(|b| b.at(&x_a)).collect();
    let c2 = cand.defender.constant.at(&x_d);
    let c1 = cand.attacker.constant.at(&x_a);

    let mut multiplicity = Multiplicity::Unique;
    for (side, iv, x) in [(&cand.defender, &iv_d, &x_d), (&cand.attacker, &iv_a, &x_a)] {
        if let Some(v) = side.free {
            if v.is_marginal() && iv.has_interior() {
                multiplicity = Multiplicity::Continuum {
                    variable: v,
                    interval: iv.clone(),
                    representative: x.clone(),
                };
            }
        }
    }
    let (v_a, v_d) = expected_outcomes_unchecked(game, &alpha, &beta);
    Feasibility::Accepted(Box::new(SolvedEquilibrium {
        profile: MarginalProfile::new(alpha, beta),
        ty: cand.ty,
        r: cand.r,
        s: cand.s,
        t: cand.t,
        partition: cand.partition.clone(),
        j2: cand.j2,
        j6: cand.j6,
        j8: cand.j8,
        c1,
        c2,
        v_a,
        v_d,
        multiplicity,
    }))
}
