//! Consistency of conjunctions of linear constraints over the rationals.

mod delta;
mod simplex;

use std::collections::BTreeMap;

pub use delta::DeltaRational;
pub use simplex::Simplex;

use crate::formula::{Formula, LinearConstraint, Rational, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LraStatus {
    Consistent,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LraResult {
    pub status: LraStatus,
    /// Satisfying assignment, present iff consistent.
    pub model: Option<BTreeMap<String, Rational>>,
}

impl LraResult {
    pub fn is_consistent(&self) -> bool {
        self.status == LraStatus::Consistent
    }

    fn inconsistent() -> Self {
        LraResult {
            status: LraStatus::Inconsistent,
            model: None,
        }
    }

    fn consistent(model: BTreeMap<String, Rational>) -> Self {
        LraResult {
            status: LraStatus::Consistent,
            model: Some(model),
        }
    }
}

/// Pluggable decision procedure for conjunctions of constraints.
pub trait ConsistencyOracle {
    fn check(&mut self, constraints: &[LinearConstraint]) -> LraResult;
}

/// The built-in exact simplex.
#[derive(Clone, Copy, Debug, Default)]
pub struct SimplexOracle;

impl ConsistencyOracle for SimplexOracle {
    fn check(&mut self, constraints: &[LinearConstraint]) -> LraResult {
        check_consistent(constraints)
    }
}

/// Decides whether some rational assignment satisfies every constraint.
/// Disequalities are accepted and handled by case splitting.
pub fn check_consistent(constraints: &[LinearConstraint]) -> LraResult {
    check_incremental(constraints, &[])
}

/// Same answer as `check_consistent` on the union; the simplex state built for
/// `base` is reused for `delta`.
pub fn check_incremental(base: &[LinearConstraint], delta: &[LinearConstraint]) -> LraResult {
    let all = || base.iter().chain(delta.iter());
    if let Some(pos) = all().position(|c| c.relation == Relation::Neq) {
        let mut rest: Vec<LinearConstraint> = all().cloned().collect();
        let neq = rest.remove(pos);
        let above = LinearConstraint {
            relation: Relation::Gt,
            ..neq.clone()
        };
        let below = neq.negated_sides(Relation::Gt);
        for side in [above, below] {
            let mut cs = rest.clone();
            cs.push(side);
            let r = check_consistent(&cs);
            if r.is_consistent() {
                return r;
            }
        }
        return LraResult::inconsistent();
    }
    let mut simplex = Simplex::new();
    for c in base {
        simplex.assert_constraint(c);
    }
    if !simplex.check() {
        return LraResult::inconsistent();
    }
    for c in delta {
        simplex.assert_constraint(c);
    }
    if !simplex.check() {
        return LraResult::inconsistent();
    }
    let model = simplex.model();
    debug_assert!(all().all(|c| c.holds(&model)), "simplex model violates a constraint");
    LraResult::consistent(model)
}

/// The constraint asserted by a term (`atom` or `!atom`); `None` for
/// `true`, `false` and non-terms.
pub fn term_constraint(f: &Formula) -> Option<LinearConstraint> {
    match f {
        Formula::Atom(c) => Some(c.clone()),
        Formula::Not(inner) => match &**inner {
            Formula::Atom(c) => Some(negate(c)),
            _ => None,
        },
        _ => None,
    }
}

/// The complement of a constraint as a single constraint.
pub fn negate(c: &LinearConstraint) -> LinearConstraint {
    match c.relation {
        Relation::Gt => c.negated_sides(Relation::Ge),
        Relation::Ge => c.negated_sides(Relation::Gt),
        Relation::Eq => LinearConstraint {
            relation: Relation::Neq,
            ..c.clone()
        },
        Relation::Neq => LinearConstraint {
            relation: Relation::Eq,
            ..c.clone()
        },
    }
}
