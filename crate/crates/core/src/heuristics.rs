//! Syntactic rewrites that shrink the tableau without changing satisfiability.

use std::sync::Arc;

use crate::formula::{to_strict_normal_form, Formula, Interval, Temporal, TemporalOp};
use crate::tableau::{Rule, TableauNode};

/// Replaces `a -> b` at `index` by `!a` in one child and `a, b` in the other.
/// The second child comes first when `a` is already in the label.
pub fn expand_implication(u: &TableauNode, index: usize) -> Vec<TableauNode> {
    let Formula::Implies(a, b) = &*u.label[index] else {
        panic!("not an implication");
    };
    let rest = || {
        u.label
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != index)
            .map(|(_, f)| f.clone())
    };
    let negated = Arc::new(to_strict_normal_form(&Formula::Not(a.clone())));
    let refute = TableauNode::new(rest().chain([negated]).collect(), u.time, Rule::Implication);
    let assert = TableauNode::new(rest().chain([a.clone(), b.clone()]).collect(), u.time, Rule::Implication);
    if u.contains(a) {
        vec![assert, refute]
    } else {
        vec![refute, assert]
    }
}

/// `G[a,b] F[c,d] p` becomes
/// `(F[a+c+1,a+d] p | (G[a+c,a+c] p & G[a+d+1,a+d+1] p)) & G[a+2,b] F[c,d] p`.
/// `None` unless `a + 2 <= b` and `c < d`.
pub fn unroll_g_f(f: &Formula) -> Option<Formula> {
    let g = f.as_temporal().filter(|t| t.op == TemporalOp::G)?;
    let inner = g.right.as_temporal().filter(|t| t.op == TemporalOp::F)?;
    let (a, b) = (g.lo(), g.hi());
    let (c, d) = (inner.lo(), inner.hi());
    if a + 2 > b || c >= d {
        return None;
    }
    let p = &inner.right;
    let unary = |op, lo, hi| Formula::Temporal(Temporal::unary(op, Interval::new(lo, hi), p.clone()));
    let head = Formula::or(
        unary(TemporalOp::F, a + c + 1, a + d),
        Formula::and(
            unary(TemporalOp::G, a + c, a + c),
            unary(TemporalOp::G, a + d + 1, a + d + 1),
        ),
    );
    let tail = Formula::Temporal(Temporal::unary(TemporalOp::G, Interval::new(a + 2, b), g.right.clone()));
    Some(Formula::and(head, tail))
}

/// Applies `unroll_g_f` once to every occurrence, leaving the residual
/// `G[a+2,b] F[c,d] p` alone.
pub fn unroll_all(f: &Formula) -> Formula {
    if let Some(unrolled) = unroll_g_f(f) {
        return unrolled;
    }
    map_children(f, unroll_all)
}

fn map_children(f: &Formula, g: fn(&Formula) -> Formula) -> Formula {
    let m = |a: &Arc<Formula>| Arc::new(g(a));
    match f {
        Formula::True | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::Not(m(a)),
        Formula::Or(a, b) => Formula::Or(m(a), m(b)),
        Formula::And(a, b) => Formula::And(m(a), m(b)),
        Formula::Implies(a, b) => Formula::Implies(m(a), m(b)),
        Formula::Temporal(t) => Formula::Temporal(Temporal {
            left: t.left.as_ref().map(m),
            right: m(&t.right),
            ..t.clone()
        }),
    }
}

fn mergeable(t: &Temporal) -> bool {
    !t.marked && matches!(t.op, TemporalOp::G | TemporalOp::F)
}

fn merge_pair(x: &Temporal, y: &Temporal) -> Option<Temporal> {
    if x.op != y.op || x.parent != y.parent || x.right != y.right {
        return None;
    }
    let (a, b, c, d) = (x.lo(), x.hi(), y.lo(), y.hi());
    match x.op {
        TemporalOp::G if a.max(c) <= b.min(d) + 1 => Some(Temporal {
            interval: Interval::new(a.min(c), b.max(d)),
            ..x.clone()
        }),
        TemporalOp::F if a <= c && d <= b => Some(y.clone()),
        TemporalOp::F if c <= a && b <= d => Some(x.clone()),
        _ => None,
    }
}

/// Merges unmarked `G` operators with overlapping or adjacent intervals and
/// drops `F` operators implied by a narrower one over the same argument.
pub fn merge_redundant(mut label: Vec<Arc<Formula>>) -> Vec<Arc<Formula>> {
    'outer: loop {
        for i in 0..label.len() {
            let Some(x) = label[i].as_temporal().filter(|t| mergeable(t)) else { continue };
            for j in i + 1..label.len() {
                let Some(y) = label[j].as_temporal().filter(|t| mergeable(t)) else { continue };
                if let Some(merged) = merge_pair(x, y) {
                    label[i] = Arc::new(Formula::Temporal(merged));
                    label.remove(j);
                    continue 'outer;
                }
            }
        }
        return label;
    }
}

/// True when every leaf of the propositional structure is a temporal operator
/// or a constant, with at least one operator.
fn only_temporal_leaves(f: &Formula) -> bool {
    fn leaves(f: &Formula, seen: &mut bool) -> bool {
        match f {
            Formula::True => true,
            Formula::Atom(_) => false,
            Formula::Not(a) => leaves(a, seen),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => leaves(a, seen) && leaves(b, seen),
            Formula::Temporal(_) => {
                *seen = true;
                true
            }
        }
    }
    let mut seen = false;
    leaves(f, &mut seen) && seen
}

fn min_lower_bound(f: &Formula) -> u64 {
    crate::formula::temporal_closure(f)
        .iter()
        .map(|t| t.lo())
        .min()
        .unwrap_or(0)
}

fn shift_down(f: &Arc<Formula>, k: u64) -> Arc<Formula> {
    Arc::new(match &**f {
        Formula::True | Formula::Atom(_) => return f.clone(),
        Formula::Not(a) => Formula::Not(shift_down(a, k)),
        Formula::Or(a, b) => Formula::Or(shift_down(a, k), shift_down(b, k)),
        Formula::And(a, b) => Formula::And(shift_down(a, k), shift_down(b, k)),
        Formula::Implies(a, b) => Formula::Implies(shift_down(a, k), shift_down(b, k)),
        Formula::Temporal(t) => Formula::Temporal(Temporal {
            interval: Interval::new(t.lo() - k, t.hi() - k),
            ..t.clone()
        }),
    })
}

/// Moves the common lower bound of nested operators onto the enclosing one,
/// innermost first: `G[3,50] F[5,20] p` becomes `G[8,55] F[0,15] p`.
pub fn shift_nested_intervals(f: &Formula) -> Formula {
    let Formula::Temporal(t) = f else {
        return map_children(f, shift_nested_intervals);
    };
    let left = t.left.as_ref().map(|a| Arc::new(shift_nested_intervals(a)));
    let right = Arc::new(shift_nested_intervals(&t.right));
    let args: Vec<&Arc<Formula>> = left.iter().chain([&right]).collect();
    let applicable = !matches!(t.op, TemporalOp::U | TemporalOp::R)
        && args.iter().any(|a| a.contains_temporal())
        && args.iter().all(|a| a.atoms().is_empty() && !a.contains_temporal() || only_temporal_leaves(a));
    let c_min = if applicable {
        args.iter()
            .filter(|a| a.contains_temporal())
            .map(|a| min_lower_bound(a))
            .min()
            .unwrap_or(0)
    } else {
        0
    };
    if c_min == 0 {
        return Formula::Temporal(Temporal { left, right, ..t.clone() });
    }
    Formula::Temporal(Temporal {
        interval: t.interval.shift(c_min),
        left: left.map(|a| shift_down(&a, c_min)),
        right: shift_down(&right, c_min),
        ..t.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_stl, ParentInterval};

    fn p(text: &str) -> Formula {
        parse_stl(text).unwrap()
    }

    fn label(texts: &[&str]) -> Vec<Arc<Formula>> {
        texts.iter().map(|t| Arc::new(p(t))).collect()
    }

    #[test]
    fn implication_children_order() {
        let u = TableauNode::new(label(&["p > 0 -> q > 0"]), 0, Rule::Root);
        let kids = expand_implication(&u, 0);
        assert_eq!(kids[0].label, label(&["!(p > 0)"]));
        assert_eq!(kids[1].label, label(&["p > 0", "q > 0"]));
        let u = TableauNode::new(label(&["p > 0", "p > 0 -> q > 0"]), 0, Rule::Root);
        let kids = expand_implication(&u, 1);
        assert_eq!(kids[0].label, label(&["p > 0", "q > 0"]));
        assert_eq!(kids[1].label, label(&["p > 0", "!(p > 0)"]));
        let u = TableauNode::new(label(&["true -> q > 0"]), 0, Rule::Root);
        let kids = expand_implication(&u, 0);
        assert_eq!(kids[0].label, label(&["false"]));
    }

    #[test]
    fn unrolling() {
        let f = p("G[0,10] F[0,1] p > 0");
        let expected = p("(F[1,1] p > 0 | (G[0,0] p > 0 & G[2,2] p > 0)) & G[2,10] F[0,1] p > 0");
        assert_eq!(unroll_g_f(&f), Some(expected));
        assert_eq!(unroll_g_f(&p("G[0,10] F[3,3] p > 0")), None);
        assert_eq!(unroll_g_f(&p("G[0,1] F[0,3] p > 0")), None);
        assert_eq!(unroll_g_f(&p("F[0,1] G[0,3] p > 0")), None);
    }

    #[test]
    fn unroll_all_leaves_residual() {
        let f = p("x > 0 & G[0,10] F[0,1] p > 0");
        let out = unroll_all(&f);
        assert_eq!(out, p("x > 0 & ((F[1,1] p > 0 | (G[0,0] p > 0 & G[2,2] p > 0)) & G[2,10] F[0,1] p > 0)"));
    }

    #[test]
    fn merging() {
        let merged = merge_redundant(label(&["G[0,5] x > 0", "G[3,9] x > 0"]));
        assert_eq!(merged, label(&["G[0,9] x > 0"]));
        let merged = merge_redundant(label(&["F[0,10] x > 0", "F[2,4] x > 0"]));
        assert_eq!(merged, label(&["F[2,4] x > 0"]));
        let apart = label(&["G[0,5] x > 0", "G[7,9] x > 0"]);
        assert_eq!(merge_redundant(apart.clone()), apart);
        let adjacent = merge_redundant(label(&["G[0,5] x > 0", "y > 0", "G[6,9] x > 0", "G[12,14] x > 0"]));
        assert_eq!(adjacent, label(&["G[0,9] x > 0", "y > 0", "G[12,14] x > 0"]));
        let different = label(&["G[0,5] x > 0", "G[3,9] y > 0"]);
        assert_eq!(merge_redundant(different.clone()), different);
    }

    #[test]
    fn merging_respects_marks_and_parents() {
        let mut l = label(&["G[0,5] x > 0", "G[3,9] x > 0"]);
        let g = l[0].as_temporal().unwrap().with_mark(true);
        l[0] = Arc::new(Formula::Temporal(g));
        assert_eq!(merge_redundant(l.clone()), l);
        let mut l = label(&["G[0,5] x > 0", "G[3,9] x > 0"]);
        let mut g = l[0].as_temporal().unwrap().clone();
        g.parent = ParentInterval::of(Interval::new(0, 3));
        l[0] = Arc::new(Formula::Temporal(g));
        assert_eq!(merge_redundant(l.clone()), l);
    }

    #[test]
    fn merging_is_idempotent() {
        let once = merge_redundant(label(&["G[0,5] x > 0", "G[3,9] x > 0", "F[1,8] y > 0", "F[2,3] y > 0"]));
        assert_eq!(merge_redundant(once.clone()), once);
    }

    #[test]
    fn interval_shifting() {
        assert_eq!(shift_nested_intervals(&p("G[3,50] F[5,20] a >= 80")), p("G[8,55] F[0,15] a >= 80"));
        let same = p("G[0,10] F[0,5] x > 0");
        assert_eq!(shift_nested_intervals(&same), same);
        assert_eq!(shift_nested_intervals(&p("F[2,4] G[3,3] x > 0")), p("F[5,7] G[0,0] x > 0"));
        let mixed = p("G[0,10] (x > 0 & F[3,5] y > 0)");
        assert_eq!(shift_nested_intervals(&mixed), mixed);
        assert_eq!(
            shift_nested_intervals(&p("G[1,2] (F[3,5] y > 0 | G[4,4] F[2,3] z > 0)")),
            p("G[4,5] (F[0,2] y > 0 | G[3,3] F[0,1] z > 0)")
        );
        assert_eq!(
            shift_nested_intervals(&p("(false) sR[0,3] ((true) sU[2,4] (x > 0))")),
            p("(false) sR[2,5] ((true) sU[0,2] (x > 0))")
        );
        assert_eq!(
            shift_nested_intervals(&p("(false) sR[0,3] (G[2,4] (x > 0))")),
            p("(false) sR[2,5] (G[0,2] (x > 0))")
        );
    }
}
