use std::sync::Arc;

use super::{Formula, Interval, LinearConstraint, Relation, Temporal, TemporalOp};

/// Which derived connectives survive normalization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NormalizeOptions {
    /// Keep `G` and `F` instead of rewriting them into `sR` and `sU`.
    pub keep_gf: bool,
    /// Keep implications (with normalized operands) instead of `!a | b`.
    pub keep_implies: bool,
}

/// Negation normal form over `|`, `&`, `sU`, `sR`, `true`, `false`, atoms and
/// negated atoms. Disequalities become pairs of strict inequalities.
pub fn to_strict_normal_form(f: &Formula) -> Formula {
    normalize(f, NormalizeOptions::default())
}

pub fn normalize(f: &Formula, opts: NormalizeOptions) -> Formula {
    nnf(f, true, opts)
}

fn split_neq(c: &LinearConstraint) -> Formula {
    let above = LinearConstraint {
        relation: Relation::Gt,
        ..c.clone()
    };
    let below = c.negated_sides(Relation::Gt);
    Formula::or(Formula::Atom(above), Formula::Atom(below))
}

fn atom(c: &LinearConstraint, positive: bool) -> Formula {
    match (c.relation, positive) {
        (Relation::Neq, true) | (Relation::Eq, false) => split_neq(c),
        (Relation::Neq, false) => Formula::Atom(LinearConstraint {
            relation: Relation::Eq,
            ..c.clone()
        }),
        (_, true) => Formula::Atom(c.clone()),
        (_, false) => Formula::negation(Formula::Atom(c.clone())),
    }
}

fn unary(op: TemporalOp, interval: Interval, arg: Formula, opts: NormalizeOptions) -> Formula {
    if opts.keep_gf {
        return Formula::Temporal(Temporal::unary(op, interval, Arc::new(arg)));
    }
    let (op, left) = match op {
        TemporalOp::F => (TemporalOp::SU, Formula::True),
        TemporalOp::G => (TemporalOp::SR, Formula::falsum()),
        _ => unreachable!("not a unary operator"),
    };
    Formula::Temporal(Temporal::binary(op, interval, Arc::new(left), Arc::new(arg)))
}

fn strict(op: TemporalOp, interval: Interval, left: Formula, right: Formula) -> Formula {
    Formula::Temporal(Temporal::binary(op, interval, Arc::new(left), Arc::new(right)))
}

fn nnf(f: &Formula, positive: bool, opts: NormalizeOptions) -> Formula {
    match f {
        Formula::True if positive => Formula::True,
        Formula::True => Formula::falsum(),
        Formula::Atom(c) => atom(c, positive),
        Formula::Not(a) => nnf(a, !positive, opts),
        Formula::And(a, b) if positive => Formula::and(nnf(a, true, opts), nnf(b, true, opts)),
        Formula::And(a, b) => Formula::or(nnf(a, false, opts), nnf(b, false, opts)),
        Formula::Or(a, b) if positive => Formula::or(nnf(a, true, opts), nnf(b, true, opts)),
        Formula::Or(a, b) => Formula::and(nnf(a, false, opts), nnf(b, false, opts)),
        Formula::Implies(a, b) if !positive => Formula::and(nnf(a, true, opts), nnf(b, false, opts)),
        Formula::Implies(a, b) if opts.keep_implies => {
            Formula::implies(nnf(a, true, opts), nnf(b, true, opts))
        }
        Formula::Implies(a, b) => Formula::or(nnf(a, false, opts), nnf(b, true, opts)),
        Formula::Temporal(t) => temporal(t, positive, opts),
    }
}

fn temporal(t: &Temporal, positive: bool, opts: NormalizeOptions) -> Formula {
    let i = t.interval;
    match t.op {
        TemporalOp::F | TemporalOp::G => {
            let op = match (t.op, positive) {
                (TemporalOp::F, true) | (TemporalOp::G, false) => TemporalOp::F,
                _ => TemporalOp::G,
            };
            unary(op, i, nnf(&t.right, positive, opts), opts)
        }
        TemporalOp::SU | TemporalOp::SR => {
            let left = t.left.as_deref().expect("binary operator");
            let op = match (t.op, positive) {
                (TemporalOp::SU, true) | (TemporalOp::SR, false) => TemporalOp::SU,
                _ => TemporalOp::SR,
            };
            strict(op, i, nnf(left, positive, opts), nnf(&t.right, positive, opts))
        }
        TemporalOp::U | TemporalOp::R => {
            let left = t.left.as_deref().expect("binary operator");
            nnf(&strict_expansion(t.op, i, left, &t.right), positive, opts)
        }
    }
}

/// `a U[lo,hi] b` is `G[0,lo] a & (a sU[lo,hi] (a & b))`;
/// `a R[lo,hi] b` is `F[0,lo] a | (a sR[lo,hi] (a | b))`.
fn strict_expansion(op: TemporalOp, i: Interval, left: &Formula, right: &Formula) -> Formula {
    let head = Interval::new(0, i.lo);
    match op {
        TemporalOp::U => Formula::and(
            Formula::Temporal(Temporal::unary(TemporalOp::G, head, Arc::new(left.clone()))),
            strict(
                TemporalOp::SU,
                i,
                left.clone(),
                Formula::and(left.clone(), right.clone()),
            ),
        ),
        TemporalOp::R => Formula::or(
            Formula::Temporal(Temporal::unary(TemporalOp::F, head, Arc::new(left.clone()))),
            strict(
                TemporalOp::SR,
                i,
                left.clone(),
                Formula::or(left.clone(), right.clone()),
            ),
        ),
        _ => unreachable!("only until and release are expanded"),
    }
}
