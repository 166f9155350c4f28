//! Affine functions of one free variable and the intervals they cut out.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{int, midpoint, Rational, Show};

/// `constant + slope * x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub constant: Rational,
    pub slope: Rational,
}

impl Affine {
    pub fn constant(c: Rational) -> Self {
        Affine { constant: c, slope: Rational::zero() }
    }

    pub fn var() -> Self {
        Affine { constant: Rational::zero(), slope: Rational::one() }
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn is_constant(&self) -> bool {
        self.slope.is_zero()
    }

    pub fn at(&self, x: &Rational) -> Rational {
        &self.constant + &self.slope * x
    }

    pub fn add(&self, o: &Affine) -> Affine {
        Affine { constant: &self.constant + &o.constant, slope: &self.slope + &o.slope }
    }

    pub fn sub(&self, o: &Affine) -> Affine {
        Affine { constant: &self.constant - &o.constant, slope: &self.slope - &o.slope }
    }

    pub fn scale(&self, k: &Rational) -> Affine {
        Affine { constant: &self.constant * k, slope: &self.slope * k }
    }

    pub fn shift(&self, k: &Rational) -> Affine {
        Affine { constant: &self.constant + k, slope: self.slope.clone() }
    }

    pub fn neg(&self) -> Affine {
        Affine { constant: -&self.constant, slope: -&self.slope }
    }
}

/// One end of an interval. `None` means unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound {
    pub value: Rational,
    pub open: bool,
}

/// A possibly unbounded, possibly open interval of the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

impl Interval {
    pub fn everything() -> Self {
        Interval { lower: None, upper: None }
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Interval {
            lower: Some(Bound { value: lo, open: true }),
            upper: Some(Bound { value: hi, open: true }),
        }
    }

    pub fn point(v: Rational) -> Self {
        Interval {
            lower: Some(Bound { value: v.clone(), open: false }),
            upper: Some(Bound { value: v, open: false }),
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let lo_ok = match &self.lower {
            None => true,
            Some(b) => {
                if b.open {
                    *x > b.value
                } else {
                    *x >= b.value
                }
            }
        };
        let hi_ok = match &self.upper {
            None => true,
            Some(b) => {
                if b.open {
                    *x < b.value
                } else {
                    *x <= b.value
                }
            }
        };
        lo_ok && hi_ok
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => l.value > u.value || (l.value == u.value && (l.open || u.open)),
            _ => false,
        }
    }

    /// Positive length (a genuine continuum of values).
    pub fn has_interior(&self) -> bool {
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => l.value < u.value,
            _ => true,
        }
    }

    /// Raises the lower end if `b` is tighter.
    pub fn tighten_lower(&mut self, b: Bound) {
        let replace = match &self.lower {
            None => true,
            Some(cur) => b.value > cur.value || (b.value == cur.value && b.open && !cur.open),
        };
        if replace {
            self.lower = Some(b);
        }
    }

    pub fn tighten_upper(&mut self, b: Bound) {
        let replace = match &self.upper {
            None => true,
            Some(cur) => b.value < cur.value || (b.value == cur.value && b.open && !cur.open),
        };
        if replace {
            self.upper = Some(b);
        }
    }

    pub fn intersect(&self, o: &Interval) -> Interval {
        let mut out = self.clone();
        if let Some(b) = &o.lower {
            out.tighten_lower(b.clone());
        }
        if let Some(b) = &o.upper {
            out.tighten_upper(b.clone());
        }
        out
    }

    /// A deterministic member: the midpoint when bounded on both sides, a
    /// closed end or one unit inside an open end otherwise.
    pub fn representative(&self) -> Option<Rational> {
        if self.is_empty() {
            return None;
        }
        Some(match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => midpoint(&l.value, &u.value),
            (Some(l), None) => {
                if l.open {
                    &l.value + int(1)
                } else {
                    l.value.clone()
                }
            }
            (None, Some(u)) => {
                if u.open {
                    &u.value - int(1)
                } else {
                    u.value.clone()
                }
            }
            (None, None) => Rational::zero(),
        })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lower {
            None => f.write_str("(-inf")?,
            Some(b) => write!(f, "{}{}", if b.open { "(" } else { "[" }, Show(&b.value))?,
        }
        f.write_str(", ")?;
        match &self.upper {
            None => f.write_str("+inf)"),
            Some(b) => write!(f, "{}{}", Show(&b.value), if b.open { ")" } else { "]" }),
        }
    }
}

/// Sign requirement on an affine expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Positive,
    NonNegative,
    Zero,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub expr: Affine,
    pub relation: Relation,
    pub label: String,
}

impl Constraint {
    pub fn new(expr: Affine, relation: Relation, label: impl Into<String>) -> Self {
        Constraint { expr, relation, label: label.into() }
    }

    /// `lhs > rhs`
    pub fn gt(lhs: &Affine, rhs: &Affine, label: impl Into<String>) -> Self {
        Self::new(lhs.sub(rhs), Relation::Positive, label)
    }

    /// `lhs >= rhs`
    pub fn ge(lhs: &Affine, rhs: &Affine, label: impl Into<String>) -> Self {
        Self::new(lhs.sub(rhs), Relation::NonNegative, label)
    }

    pub fn eq(lhs: &Affine, rhs: &Affine, label: impl Into<String>) -> Self {
        Self::new(lhs.sub(rhs), Relation::Zero, label)
    }

    pub fn holds_at(&self, x: &Rational) -> bool {
        let v = self.expr.at(x);
        match self.relation {
            Relation::Positive => v.is_positive(),
            Relation::NonNegative => !v.is_negative(),
            Relation::Zero => v.is_zero(),
        }
    }

    /// The set of `x` satisfying this constraint, or `None` when it holds
    /// for no `x` at all.
    pub fn region(&self) -> Option<Interval> {
        let Affine { constant, slope } = &self.expr;
        if slope.is_zero() {
            return if self.holds_at(&Rational::zero()) { Some(Interval::everything()) } else { None };
        }
        // constant + slope * x  (rel)  0   <=>   x (rel') root
        let root = -constant / slope;
        let mut iv = Interval::everything();
        match self.relation {
            Relation::Zero => return Some(Interval::point(root)),
            Relation::Positive | Relation::NonNegative => {
                let b = Bound { value: root, open: self.relation == Relation::Positive };
                if slope.is_positive() {
                    iv.tighten_lower(b);
                } else {
                    iv.tighten_upper(b);
                }
            }
        }
        Some(iv)
    }
}

/// Intersects all constraint regions. On failure returns the label of the
/// constraint that emptied the feasible set.
pub fn solve(constraints: &[Constraint]) -> Result<Interval, String> {
    let mut iv = Interval::everything();
    for c in constraints {
        match c.region() {
            None => return Err(c.label.clone()),
            Some(r) => {
                iv = iv.intersect(&r);
                if iv.is_empty() {
                    return Err(c.label.clone());
                }
            }
        }
    }
    Ok(iv)
}
