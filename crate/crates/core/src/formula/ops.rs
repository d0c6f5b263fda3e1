use std::sync::Arc;

use super::{Formula, Interval, ParentInterval, Temporal};

/// Number of instants after the evaluation time that the formula constrains.
pub fn horizon(f: &Formula) -> u64 {
    match f {
        Formula::True | Formula::Atom(_) => 0,
        Formula::Not(a) => horizon(a),
        Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => horizon(a).max(horizon(b)),
        Formula::Temporal(t) => t.hi() + t.args().map(|a| horizon(a)).max().unwrap_or(0),
    }
}

/// Propositional closure, one level deep: the operands of a connective, or
/// the formula itself for temporal operators and terms.
pub fn pcl(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Not(a) => vec![&**a],
        Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => vec![&**a, &**b],
        _ => vec![f],
    }
}

/// Temporal operators reachable from `f` through propositional connectives only.
pub fn temporal_closure(f: &Formula) -> Vec<&Temporal> {
    let mut out = Vec::new();
    collect_temporal(f, &mut out);
    out
}

fn collect_temporal<'a>(f: &'a Formula, out: &mut Vec<&'a Temporal>) {
    match f {
        Formula::True | Formula::Atom(_) => {}
        Formula::Not(a) => collect_temporal(a, out),
        Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
            collect_temporal(a, out);
            collect_temporal(b, out);
        }
        Formula::Temporal(t) => out.push(t),
    }
}

/// Shifts by `t` the interval of every temporal operator reachable through
/// propositional connectives. With `parent` given, those operators also get
/// it as their parent interval.
pub fn temporal_expansion(f: &Arc<Formula>, t: u64, parent: Option<Interval>) -> Arc<Formula> {
    if t == 0 && parent.is_none() {
        return f.clone();
    }
    let rebuild2 = |a: &Arc<Formula>, b: &Arc<Formula>| {
        (temporal_expansion(a, t, parent), temporal_expansion(b, t, parent))
    };
    match &**f {
        Formula::True | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Arc::new(Formula::Not(temporal_expansion(a, t, parent))),
        Formula::Or(a, b) => {
            let (a, b) = rebuild2(a, b);
            Arc::new(Formula::Or(a, b))
        }
        Formula::And(a, b) => {
            let (a, b) = rebuild2(a, b);
            Arc::new(Formula::And(a, b))
        }
        Formula::Implies(a, b) => {
            let (a, b) = rebuild2(a, b);
            Arc::new(Formula::Implies(a, b))
        }
        Formula::Temporal(op) => {
            let mut shifted = op.shifted(t);
            if let Some(p) = parent {
                shifted.parent = ParentInterval::of(p);
            }
            Arc::new(Formula::Temporal(shifted))
        }
    }
}
