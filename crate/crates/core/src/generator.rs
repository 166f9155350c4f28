//! Seeded construction of games whose equilibrium has a requested type and
//! partition sizes, plus random protective games and interval instances for
//! the property suites.
//!
//! A core of interior targets is built first: coverage `beta_i` and attack
//! marginals `alpha_i` strictly inside `(0, 1)` with the right sums, then
//! `uau_i = c1 + beta_i * delta_a(i)` and `delta_d(i) = c2 / alpha_i`. The
//! boundary targets are added with payoffs on the correct side of `c1` and
//! `c2`. Every draw is checked by solving it; draws that tie or land in a
//! different cell are rejected and redrawn.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::candidates::{EquilibriumType, SolvedEquilibrium};
use crate::error::{Error, Result};
use crate::model::{validate, SecurityGame, SignMode, Target};
use crate::optimizer::{IntervalSpec, PayoffInterval};
use crate::rational::{int, ratio, Rational, Show};
use crate::solver::solve_nash;

/// Redraws before a request is declared unrealizable.
pub const MAX_ATTEMPTS: usize = 64;

/// What the generated game's equilibrium should look like. `r`, `s` and `t`
/// are ignored for Type II.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorRequest {
    pub ty: EquilibriumType,
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub k_a: usize,
    pub k_d: usize,
    pub c1: Rational,
    pub c2: Rational,
    pub seed: u64,
}

impl GeneratorRequest {
    /// A request with `c1 = c2 = 1`.
    pub fn new(ty: EquilibriumType, r: usize, s: usize, t: usize, k_a: usize, k_d: usize, seed: u64) -> Self {
        GeneratorRequest { ty, r, s, t, k_a, k_d, c1: int(1), c2: int(1), seed }
    }

    /// Attack mass left for the interior targets and the `I2`/`I8` target.
    fn attack_mass(&self) -> Option<usize> {
        self.k_a.checked_sub(self.s + self.t + usize::from(self.ty.is_b()))
    }

    /// Coverage mass left for the interior targets and the `I6` target.
    fn coverage_mass(&self) -> Option<usize> {
        self.k_d.checked_sub(self.t + usize::from(self.ty.has_i8()))
    }

    /// Why the request cannot be met, if it cannot.
    pub fn check(&self) -> Result<()> {
        let fail = |why: String| Err(Error::Infeasible(format!("unrealizable request: {why}")));
        if self.c1 <= Rational::zero() || self.c2 <= Rational::zero() {
            return fail("c1 and c2 must be positive".into());
        }
        if self.k_a == 0 || self.k_d == 0 {
            return fail("k_a and k_d must be at least 1".into());
        }
        if self.ty == EquilibriumType::II {
            if self.k_d <= self.k_a {
                return fail(format!("Type II needs k_d > k_a (k_a = {}, k_d = {})", self.k_a, self.k_d));
            }
            return Ok(());
        }
        match self.attack_mass() {
            Some(a) if a >= 1 => {}
            _ => return fail(format!("s + t leaves no attack mass for interior targets (k_a = {})", self.k_a)),
        }
        match self.coverage_mass() {
            Some(b) if b >= 1 => {}
            _ => return fail(format!("t leaves no coverage for interior targets (k_d = {})", self.k_d)),
        }
        Ok(())
    }
}

/// Uniform rational in the open interval `(lo, hi)` on a grid of 1/97.
fn draw(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational) -> Rational {
    let k = rng.random_range(1..97i64);
    lo + (hi - lo) * ratio(k, 97)
}

fn frac(rng: &mut ChaCha8Rng, lo: (i64, i64), hi: (i64, i64)) -> Rational {
    draw(rng, &ratio(lo.0, lo.1), &ratio(hi.0, hi.1))
}

/// `n` values strictly inside `(0, 1)` summing to `total` (`0 < total < n`).
fn spread_sum(rng: &mut ChaCha8Rng, n: usize, total: &Rational) -> Vec<Rational> {
    let nn = int(n as i64);
    let mean = total / &nn;
    let margin = mean.clone().min(Rational::one() - &mean) * ratio(9, 10);
    let w: Vec<Rational> = (0..n).map(|_| frac(rng, (0, 1), (1, 1))).collect();
    let w_mean: Rational = w.iter().sum::<Rational>() / &nn;
    w.iter().map(|x| &mean + &margin * (x - &w_mean)).collect()
}

fn defender(rng: &mut ChaCha8Rng, delta_d: Rational) -> (Rational, Rational) {
    let udu = -&delta_d - frac(rng, (1, 10), (3, 1));
    (&udu + delta_d, udu)
}

/// Attacker payoffs for an interior coverage `beta` holding the target's
/// payoff at `level`: `uau - beta * delta_a = level`, `uac > 0`.
fn indifferent(rng: &mut ChaCha8Rng, level: &Rational, beta: &Rational) -> (Rational, Rational) {
    let delta_a = level / (Rational::one() - beta) * frac(rng, (1, 10), (9, 10));
    let uau = level + beta * &delta_a;
    (&uau - delta_a, uau)
}

fn target((uac, uau): (Rational, Rational), (udc, udu): (Rational, Rational)) -> Target {
    Target::new(uac, uau, udc, udu)
}

fn draw_type_one(req: &GeneratorRequest, rng: &mut ChaCha8Rng) -> Vec<Target> {
    let (c1, c2) = (&req.c1, &req.c2);
    let a_mass = int(req.attack_mass().expect("checked") as i64);
    let b_mass = int(req.coverage_mass().expect("checked") as i64);
    let has_u = req.ty.has_i2() || req.ty.has_i8();
    let alpha_u = has_u.then(|| frac(rng, (1, 10), (9, 10)));
    let beta_6 = req.ty.is_b().then(|| frac(rng, (1, 10), (9, 10)));
    let s_a = alpha_u.as_ref().map_or(a_mass.clone(), |u| &a_mass - u);
    let s_b = beta_6.as_ref().map_or(b_mass.clone(), |u| &b_mass - u);
    let n = s_a.floor().max(s_b.floor()).to_integer();
    let n = usize::try_from(n).expect("small mass") + 1 + rng.random_range(0..2usize);

    let mut out = Vec::new();
    let alphas = spread_sum(rng, n, &s_a);
    let betas = spread_sum(rng, n, &s_b);
    for (a, b) in alphas.iter().zip(&betas) {
        let att = indifferent(rng, c1, b);
        out.push(target(att, defender(rng, c2 / a)));
    }
    let below = |rng: &mut ChaCha8Rng, x: &Rational| x * frac(rng, (1, 10), (9, 10));
    let above = |rng: &mut ChaCha8Rng, x: &Rational| x * frac(rng, (11, 10), (3, 1));
    for _ in 0..req.r {
        let uau = below(rng, c1);
        let uac = below(rng, &uau);
        let dd = frac(rng, (1, 2), (5, 1));
        out.push(target((uac, uau), defender(rng, dd)));
    }
    for _ in 0..req.s {
        let uau = above(rng, c1);
        let uac = below(rng, &uau);
        let dd = below(rng, c2);
        out.push(target((uac, uau), defender(rng, dd)));
    }
    for _ in 0..req.t {
        let uac = above(rng, c1);
        let uau = &uac + frac(rng, (1, 10), (3, 1));
        let dd = above(rng, c2);
        out.push(target((uac, uau), defender(rng, dd)));
    }
    if let Some(u) = &alpha_u {
        let full = c2 / u;
        if req.ty.has_i2() {
            let uac = below(rng, c1);
            let dd = below(rng, &full);
            out.push(target((uac, c1.clone()), defender(rng, dd)));
        } else {
            let uau = c1 + frac(rng, (1, 10), (3, 1));
            let dd = above(rng, &full);
            out.push(target((c1.clone(), uau), defender(rng, dd)));
        }
    }
    if let Some(b) = &beta_6 {
        let level = c1 + c1 * frac(rng, (1, 20), (1, 2));
        let att = indifferent(rng, &level, b);
        out.push(target(att, defender(rng, c2.clone())));
    }
    out
}

fn draw_type_two(req: &GeneratorRequest, rng: &mut ChaCha8Rng) -> Vec<Target> {
    let c1 = &req.c1;
    let spare = req.k_d - req.k_a;
    let mut out = Vec::new();
    for i in 0..req.k_a {
        let uac = if i == 0 { c1.clone() } else { c1 * frac(rng, (11, 10), (3, 1)) };
        let uau = &uac + frac(rng, (1, 10), (3, 1));
        let dd = frac(rng, (1, 2), (5, 1));
        out.push(target((uac, uau), defender(rng, dd)));
    }
    let others = spare + 1 + rng.random_range(0..2usize);
    let cap = ratio(spare as i64, others as i64);
    for _ in 0..others {
        let att = if rng.random_bool(0.5) {
            let need = &cap * frac(rng, (1, 10), (9, 10));
            indifferent(rng, c1, &need)
        } else {
            let uau = c1 * frac(rng, (1, 10), (9, 10));
            (&uau * frac(rng, (1, 10), (9, 10)), uau)
        };
        let dd = frac(rng, (1, 2), (5, 1));
        out.push(target(att, defender(rng, dd)));
    }
    out
}

fn matches_request(req: &GeneratorRequest, eq: &SolvedEquilibrium) -> bool {
    eq.ty == req.ty && (req.ty == EquilibriumType::II || (eq.r, eq.s, eq.t) == (req.r, req.s, req.t))
}

/// Builds a game and its equilibrium; the equilibrium has the requested
/// type and `(r, s, t)`.
pub fn generate_with_equilibrium(req: &GeneratorRequest) -> Result<(SecurityGame, SolvedEquilibrium)> {
    req.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let mut last = String::from("no attempt made");
    for _ in 0..MAX_ATTEMPTS {
        let mut targets = if req.ty == EquilibriumType::II {
            draw_type_two(req, &mut rng)
        } else {
            draw_type_one(req, &mut rng)
        };
        targets.shuffle(&mut rng);
        let game = SecurityGame::new_unchecked(req.k_a, req.k_d, targets);
        let report = validate(&game, true);
        if !report.is_admissible() {
            last = report.to_string();
            continue;
        }
        match solve_nash(&game) {
            Ok(eq) if matches_request(req, &eq) => return Ok((game, eq)),
            Ok(eq) => last = format!("solved as {} with (r, s, t) = ({}, {}, {})", eq.ty, eq.r, eq.s, eq.t),
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::Infeasible(format!(
        "could not realize {} with (r, s, t) = ({}, {}, {}), k_a = {}, k_d = {} after {MAX_ATTEMPTS} draws; last: {last}",
        req.ty, req.r, req.s, req.t, req.k_a, req.k_d
    )))
}

pub fn generate(req: &GeneratorRequest) -> Result<SecurityGame> {
    generate_with_equilibrium(req).map(|(g, _)| g)
}

/// One interior target given directly by its equilibrium marginals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreTarget {
    pub alpha: Rational,
    pub beta: Rational,
    pub delta_a: Rational,
    pub udc: Rational,
}

/// A game made of interior targets only, with constants `c1` and `c2`.
/// The marginals must already sum to `k_a` and `k_d`.
pub fn generate_from_core(c1: &Rational, c2: &Rational, k_a: usize, k_d: usize, core: &[CoreTarget]) -> Result<SecurityGame> {
    let alpha_sum: Rational = core.iter().map(|c| &c.alpha).sum();
    let beta_sum: Rational = core.iter().map(|c| &c.beta).sum();
    if alpha_sum != int(k_a as i64) || beta_sum != int(k_d as i64) {
        return Err(Error::Precondition(format!(
            "core marginals sum to ({}, {}) instead of ({k_a}, {k_d})",
            Show(&alpha_sum),
            Show(&beta_sum)
        )));
    }
    let targets = core
        .iter()
        .map(|c| {
            let uau = c1 + &c.beta * &c.delta_a;
            let delta_d = c2 / &c.alpha;
            Target::new(&uau - &c.delta_a, uau, c.udc.clone(), &c.udc - delta_d)
        })
        .collect();
    SecurityGame::new(k_a, k_d, targets, SignMode::Strict)
}

/// A random realizable request.
pub fn sample_request(seed: u64) -> GeneratorRequest {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
    loop {
        let ty = EquilibriumType::ALL[rng.random_range(0..EquilibriumType::ALL.len())];
        let k_a = rng.random_range(1..=3usize);
        let k_d = rng.random_range(1..=3usize);
        let r = rng.random_range(0..=2usize);
        let s = rng.random_range(0..=k_a);
        let t = rng.random_range(0..=k_a.min(k_d));
        let c1 = int(rng.random_range(1..=5i64)) * frac(&mut rng, (1, 2), (3, 2));
        let c2 = int(rng.random_range(1..=5i64)) * frac(&mut rng, (1, 2), (3, 2));
        let req = GeneratorRequest { ty, r, s, t, k_a, k_d, c1, c2, seed: rng.random() };
        if req.check().is_ok() {
            return req;
        }
    }
}

/// A random game with `uac = udc = 0`; zero-sum also sets `udu = -uau`.
pub fn random_protective(seed: u64, zero_sum: bool) -> SecurityGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = rng.random_range(2..=7usize);
        let k_a = rng.random_range(1..m);
        let k_d = rng.random_range(1..m);
        let targets = (0..m)
            .map(|_| {
                let uau = frac(&mut rng, (1, 1), (20, 1));
                let udu = if zero_sum { -uau.clone() } else { -frac(&mut rng, (1, 1), (20, 1)) };
                Target::new(int(0), uau, int(0), udu)
            })
            .collect();
        let game = SecurityGame::new_unchecked(k_a, k_d, targets);
        if validate(&game, true).is_admissible() {
            return game;
        }
    }
}

/// An optimizer instance: defender payoffs, resources and intervals.
#[derive(Debug, Clone)]
pub struct IntervalInstance {
    pub defender: Vec<(Rational, Rational)>,
    pub k_a: usize,
    pub k_d: usize,
    pub spec: IntervalSpec,
}

fn distinct_ints(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> Vec<i64> {
    let mut pool: Vec<i64> = (lo..=hi).collect();
    pool.shuffle(rng);
    let mut v = pool[..n].to_vec();
    v.sort_unstable();
    v
}

/// A random instance with disjoint intervals on at most `m_max` targets and
/// at most `max_free` nondegenerate intervals.
pub fn random_interval_instance(seed: u64, m_max: usize, max_free: usize) -> IntervalInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(3..=m_max.max(3));
    let k_a = rng.random_range(1..m);
    let k_d = rng.random_range(1..m);
    let mut slots: Vec<usize> = (0..2 * m).collect();
    slots.shuffle(&mut rng);
    let n_free = rng.random_range(0..=max_free.min(2 * m));
    let free: Vec<bool> = {
        let mut f = vec![false; 2 * m];
        for &i in &slots[..n_free] {
            f[i] = true;
        }
        f
    };
    // Consecutive pairs of sorted distinct integers are disjoint intervals.
    let intervals = |rng: &mut ChaCha8Rng, lo: i64, hi: i64, free: &[bool]| -> Vec<(Rational, Rational)> {
        let vals = distinct_ints(rng, 2 * m, lo, hi);
        let mut ivs: Vec<(Rational, Rational)> = vals
            .chunks(2)
            .enumerate()
            .map(|(i, p)| (int(p[0]), if free[i] { int(p[1]) } else { int(p[0]) }))
            .collect();
        ivs.shuffle(rng);
        ivs
    };
    let uac = intervals(&mut rng, 1, 40, &free[..m]);
    let uau = intervals(&mut rng, 41, 90, &free[m..]);
    let dd = distinct_ints(&mut rng, m, 1, 20);
    let mut defender: Vec<(Rational, Rational)> = dd
        .iter()
        .map(|&d| {
            let udc = -rng.random_range(1..=10i64);
            (int(udc), int(udc - d))
        })
        .collect();
    defender.shuffle(&mut rng);
    let spec = IntervalSpec::new(uac.into_iter().zip(uau).map(|(uac, uau)| PayoffInterval { uac, uau }).collect());
    IntervalInstance { defender, k_a, k_d, spec }
}
