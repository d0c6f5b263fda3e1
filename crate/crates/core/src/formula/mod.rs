//! Formula syntax: atoms over linear constraints, propositional connectives and
//! interval-bounded temporal operators.

mod normal;
mod ops;
mod parse;
mod print;
mod rational;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use normal::{normalize, to_strict_normal_form, NormalizeOptions};
pub use ops::{horizon, pcl, temporal_closure, temporal_expansion};
pub use parse::{parse, parse_mltl, parse_requirements, parse_stl, Dialect, ParseError};
pub use print::{format, format_label};
pub use rational::{format_rational, parse_rational};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Gt,
    Ge,
    Eq,
    Neq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "==",
            Relation::Neq => "!=",
        }
    }

    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Neq => lhs != rhs,
        }
    }
}

/// `sum(coef * var) <relation> bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearConstraint {
    pub terms: BTreeMap<String, Rational>,
    pub relation: Relation,
    pub bound: Rational,
}

impl LinearConstraint {
    /// Builds a constraint, summing repeated variables and dropping zero coefficients.
    pub fn new<I, S>(terms: I, relation: Relation, bound: Rational) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let mut map: BTreeMap<String, Rational> = BTreeMap::new();
        for (var, coef) in terms {
            *map.entry(var.into()).or_insert_with(|| int(0)) += coef;
        }
        map.retain(|_, c| *c != int(0));
        LinearConstraint {
            terms: map,
            relation,
            bound,
        }
    }

    pub fn var(name: &str, relation: Relation, bound: Rational) -> Self {
        Self::new([(name, int(1))], relation, bound)
    }

    /// The encoding of a Boolean proposition `p` as `p = 1`.
    pub fn proposition(name: &str) -> Self {
        Self::var(name, Relation::Eq, int(1))
    }

    pub fn is_ground(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }

    /// Multiplies both sides by -1 without changing the relation.
    pub fn negated_sides(&self, relation: Relation) -> Self {
        LinearConstraint {
            terms: self.terms.iter().map(|(v, c)| (v.clone(), -c)).collect(),
            relation,
            bound: -&self.bound,
        }
    }

    /// Value of the left-hand side; variables absent from `values` count as 0.
    pub fn lhs_value(&self, values: &BTreeMap<String, Rational>) -> Rational {
        let mut sum = int(0);
        for (var, coef) in &self.terms {
            if let Some(v) = values.get(var) {
                sum += coef * v;
            }
        }
        sum
    }

    pub fn holds(&self, values: &BTreeMap<String, Rational>) -> bool {
        self.relation.holds(&self.lhs_value(values), &self.bound)
    }

    /// Truth of a constraint without variables.
    pub fn ground_truth(&self) -> Option<bool> {
        self.is_ground()
            .then(|| self.relation.holds(&int(0), &self.bound))
    }
}

/// Closed interval `[lo, hi]` of natural numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: u64,
    pub hi: u64,
}

impl Interval {
    pub fn new(lo: u64, hi: u64) -> Self {
        assert!(lo <= hi, "interval [{lo},{hi}] is empty");
        Interval { lo, hi }
    }

    pub fn contains(&self, t: u64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn shift(&self, k: u64) -> Self {
        Interval::new(self.lo + k, self.hi + k)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Activity interval of the operator a nested operator was extracted from.
/// `None` stands for top-level operators, written `[-1,-1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParentInterval(pub Option<Interval>);

impl ParentInterval {
    pub const NONE: ParentInterval = ParentInterval(None);

    pub fn of(interval: Interval) -> Self {
        ParentInterval(Some(interval))
    }

    pub fn contains(&self, t: u64) -> bool {
        self.0.is_some_and(|i| i.contains(t))
    }

    pub fn lo(&self) -> i64 {
        self.0.map_or(-1, |i| i.lo as i64)
    }

    pub fn hi(&self) -> i64 {
        self.0.map_or(-1, |i| i.hi as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemporalOp {
    /// Eventually.
    F,
    /// Always.
    G,
    /// Until, left argument required from the evaluation time.
    U,
    /// Release, dual of `U`.
    R,
    /// Strict until, left argument required from the interval start.
    SU,
    /// Strict release, dual of `SU`.
    SR,
}

impl TemporalOp {
    pub fn is_unary(self) -> bool {
        matches!(self, TemporalOp::F | TemporalOp::G)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            TemporalOp::F => "F",
            TemporalOp::G => "G",
            TemporalOp::U => "U",
            TemporalOp::R => "R",
            TemporalOp::SU => "sU",
            TemporalOp::SR => "sR",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Temporal {
    pub op: TemporalOp,
    pub interval: Interval,
    pub parent: ParentInterval,
    pub marked: bool,
    /// Left argument of binary operators; `None` for `F` and `G`.
    pub left: Option<Arc<Formula>>,
    /// Sole argument of `F`/`G`, right argument otherwise.
    pub right: Arc<Formula>,
}

impl Temporal {
    pub fn unary(op: TemporalOp, interval: Interval, arg: Arc<Formula>) -> Self {
        debug_assert!(op.is_unary());
        Temporal {
            op,
            interval,
            parent: ParentInterval::NONE,
            marked: false,
            left: None,
            right: arg,
        }
    }

    pub fn binary(op: TemporalOp, interval: Interval, left: Arc<Formula>, right: Arc<Formula>) -> Self {
        debug_assert!(!op.is_unary());
        Temporal {
            op,
            interval,
            parent: ParentInterval::NONE,
            marked: false,
            left: Some(left),
            right,
        }
    }

    pub fn args(&self) -> impl Iterator<Item = &Arc<Formula>> {
        self.left.iter().chain(std::iter::once(&self.right))
    }

    pub fn lo(&self) -> u64 {
        self.interval.lo
    }

    pub fn hi(&self) -> u64 {
        self.interval.hi
    }

    pub fn with_mark(&self, marked: bool) -> Self {
        Temporal {
            marked,
            ..self.clone()
        }
    }

    pub fn shifted(&self, k: u64) -> Self {
        Temporal {
            interval: self.interval.shift(k),
            ..self.clone()
        }
    }

    /// True when an argument contains a temporal operator.
    pub fn is_nested(&self) -> bool {
        self.args().any(|a| a.contains_temporal())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    Atom(LinearConstraint),
    Not(Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Temporal(Temporal),
}

impl Formula {
    pub fn falsum() -> Formula {
        Formula::Not(Arc::new(Formula::True))
    }

    pub fn atom(c: LinearConstraint) -> Formula {
        Formula::Atom(c)
    }

    pub fn negation(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn eventually(lo: u64, hi: u64, f: Formula) -> Formula {
        Formula::Temporal(Temporal::unary(TemporalOp::F, Interval::new(lo, hi), Arc::new(f)))
    }

    pub fn always(lo: u64, hi: u64, f: Formula) -> Formula {
        Formula::Temporal(Temporal::unary(TemporalOp::G, Interval::new(lo, hi), Arc::new(f)))
    }

    pub fn binary(op: TemporalOp, lo: u64, hi: u64, a: Formula, b: Formula) -> Formula {
        Formula::Temporal(Temporal::binary(op, Interval::new(lo, hi), Arc::new(a), Arc::new(b)))
    }

    /// Conjunction of all formulas, `true` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::Not(a) if **a == Formula::True)
    }

    /// Terms are `true`, `false`, atoms and negated atoms.
    pub fn is_term(&self) -> bool {
        match self {
            Formula::True | Formula::Atom(_) => true,
            Formula::Not(a) => matches!(**a, Formula::True | Formula::Atom(_)),
            _ => false,
        }
    }

    pub fn as_temporal(&self) -> Option<&Temporal> {
        match self {
            Formula::Temporal(t) => Some(t),
            _ => None,
        }
    }

    pub fn contains_temporal(&self) -> bool {
        match self {
            Formula::True | Formula::Atom(_) => false,
            Formula::Not(a) => a.contains_temporal(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.contains_temporal() || b.contains_temporal()
            }
            Formula::Temporal(_) => true,
        }
    }

    /// Every atom constraint occurring in the formula, in left-to-right order.
    pub fn atoms(&self) -> Vec<&LinearConstraint> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a LinearConstraint>) {
        match self {
            Formula::True => {}
            Formula::Atom(c) => out.push(c),
            Formula::Not(a) => a.collect_atoms(out),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Temporal(t) => t.args().for_each(|a| a.collect_atoms(out)),
        }
    }

    /// Sorted, deduplicated variable names.
    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self
            .atoms()
            .into_iter()
            .flat_map(|c| c.variables().map(str::to_owned))
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    /// Maximum number of temporal operators on a root-to-leaf path.
    pub fn temporal_depth(&self) -> usize {
        match self {
            Formula::True | Formula::Atom(_) => 0,
            Formula::Not(a) => a.temporal_depth(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.temporal_depth().max(b.temporal_depth())
            }
            Formula::Temporal(t) => 1 + t.args().map(|a| a.temporal_depth()).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(self))
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::format_constraint(self))
    }
}
