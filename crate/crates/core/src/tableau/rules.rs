use std::sync::Arc;

use super::{Options, Rule, TableauNode};
use crate::formula::{temporal_expansion, Formula, Interval, LinearConstraint, ParentInterval, Temporal, TemporalOp};
use crate::heuristics::{expand_implication, merge_redundant};
use crate::lra::term_constraint;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejectReason {
    False,
    LocallyUnsat,
    Until,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Accepted,
    Rejected(RejectReason),
    Continue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Advance {
    Step,
    /// Jump to the given time.
    Jump(u64),
}

fn waiting(t: &Temporal, time: u64) -> bool {
    t.marked || t.lo() > time
}

/// Every formula is a term, a marked operator, or an operator that is not
/// active yet.
pub fn is_poised(u: &TableauNode) -> bool {
    u.label.iter().all(|f| match &**f {
        Formula::Temporal(t) => waiting(t, u.time),
        other => other.is_term(),
    })
}

/// Constraints asserted by the terms of a label, sorted and deduplicated.
pub fn label_constraints(u: &TableauNode) -> Vec<LinearConstraint> {
    let mut cs: Vec<LinearConstraint> = u.label.iter().filter_map(|f| term_constraint(f)).collect();
    cs.sort();
    cs.dedup();
    cs
}

pub fn check_termination(u: &TableauNode, consistent: &mut dyn FnMut(&[LinearConstraint]) -> bool) -> Termination {
    if u.label.iter().any(|f| f.is_false()) {
        return Termination::Rejected(RejectReason::False);
    }
    let cs = label_constraints(u);
    if !cs.is_empty() && !consistent(&cs) {
        return Termination::Rejected(RejectReason::LocallyUnsat);
    }
    let until_expired = u.label.iter().filter_map(|f| f.as_temporal()).any(|t| {
        t.marked && matches!(t.op, TemporalOp::SU | TemporalOp::F) && t.hi() == u.time
    });
    if until_expired {
        return Termination::Rejected(RejectReason::Until);
    }
    if u.has_temporal() {
        Termination::Continue
    } else {
        Termination::Accepted
    }
}

fn expandable(u: &TableauNode) -> Option<usize> {
    let connective = u
        .label
        .iter()
        .position(|f| matches!(&**f, Formula::And(..) | Formula::Or(..) | Formula::Implies(..)) || (!f.is_term() && matches!(&**f, Formula::Not(_))));
    connective.or_else(|| {
        u.label
            .iter()
            .position(|f| f.as_temporal().is_some_and(|t| !waiting(t, u.time)))
    })
}

fn child(u: &TableauNode, index: usize, add: Vec<Arc<Formula>>, rule: Rule) -> TableauNode {
    let mut label: Vec<Arc<Formula>> = Vec::with_capacity(u.label.len() + add.len());
    label.extend(u.label.iter().enumerate().filter(|(i, _)| *i != index).map(|(_, f)| f.clone()));
    label.extend(add);
    TableauNode::new(label, u.time, rule)
}

/// Applies one expansion rule; children are returned in visiting order.
pub fn expand(u: &TableauNode, opts: &Options) -> Vec<TableauNode> {
    let index = expandable(u).expect("expand called on a poised node");
    let f = &u.label[index];
    let mut children = match &**f {
        Formula::And(a, b) => vec![child(u, index, vec![a.clone(), b.clone()], Rule::Conjunction)],
        Formula::Or(a, b) => vec![
            child(u, index, vec![a.clone()], Rule::Disjunction),
            child(u, index, vec![b.clone()], Rule::Disjunction),
        ],
        Formula::Implies(..) => expand_implication(u, index),
        Formula::Not(_) => {
            let nf = crate::formula::to_strict_normal_form(f);
            vec![child(u, index, vec![Arc::new(nf)], Rule::Conjunction)]
        }
        Formula::Temporal(t) => expand_temporal(u, index, t, opts),
        Formula::True | Formula::Atom(_) => unreachable!("terms are not expanded"),
    };
    if opts.merge_redundant {
        for c in &mut children {
            c.label = merge_redundant(std::mem::take(&mut c.label));
        }
    }
    drop_subsumed(children)
}

/// Removes every child whose label contains the label of another child.
fn drop_subsumed(mut children: Vec<TableauNode>) -> Vec<TableauNode> {
    let mut i = 0;
    while i < children.len() {
        let subsumed = (0..children.len()).any(|j| {
            j != i
                && (children[j].label.len() < children[i].label.len() || j < i)
                && children[j].label.iter().all(|f| children[i].contains(f))
        });
        if subsumed {
            children.remove(i);
        } else {
            i += 1;
        }
    }
    children
}

fn expand_temporal(u: &TableauNode, index: usize, t: &Temporal, opts: &Options) -> Vec<TableauNode> {
    let parent = opts.jump.then_some(t.interval);
    let exp = |g: &Arc<Formula>| temporal_expansion(g, u.time, parent);
    let marked = Arc::new(Formula::Temporal(t.with_mark(true)));
    let left = t.left.as_ref();
    match t.op {
        TemporalOp::F => vec![
            child(u, index, vec![exp(&t.right)], Rule::Eventually),
            child(u, index, vec![marked], Rule::Eventually),
        ],
        TemporalOp::G => vec![child(u, index, vec![exp(&t.right), marked], Rule::Always)],
        TemporalOp::SU => {
            let l = left.expect("binary operator");
            vec![
                child(u, index, vec![exp(&t.right)], Rule::StrictUntil),
                child(u, index, vec![exp(l), marked], Rule::StrictUntil),
            ]
        }
        TemporalOp::SR => {
            let l = left.expect("binary operator");
            vec![
                child(u, index, vec![exp(l), exp(&t.right)], Rule::StrictRelease),
                child(u, index, vec![exp(&t.right), marked], Rule::StrictRelease),
            ]
        }
        TemporalOp::U | TemporalOp::R => unreachable!("until and release are normalized away"),
    }
}

/// Next instant: terms and expired marked operators are dropped, the rest unmarked.
pub fn step(u: &TableauNode) -> TableauNode {
    let mut label = Vec::new();
    for f in &u.label {
        let Some(t) = f.as_temporal() else { continue };
        if t.marked && u.time >= t.hi() {
            continue;
        }
        if t.marked {
            label.push(Arc::new(Formula::Temporal(t.with_mark(false))));
        } else {
            label.push(f.clone());
        }
    }
    TableauNode::new(label, u.time + 1, Rule::Step)
}

/// Operators extracted from another operator carry a parent decoration and
/// move along with time; the others keep their intervals.
fn extracted(t: &Temporal) -> bool {
    t.parent.0.is_some()
}

fn translate(f: &Arc<Formula>, k: u64) -> Arc<Formula> {
    match f.as_temporal() {
        Some(t) if k > 0 && extracted(t) => Arc::new(Formula::Temporal(t.shifted(k))),
        _ => f.clone(),
    }
}

/// Jumps to `target`: the successor of `u` with every extracted operator
/// moved forward by the remaining distance.
pub fn jump(u: &TableauNode, target: u64) -> TableauNode {
    let next = step(u);
    let k = target - next.time;
    let label = next.label.iter().map(|f| translate(f, k)).collect();
    TableauNode::new(label, target, Rule::Jump)
}

/// Comparable form of a label: conjunctions flattened, operators unmarked and
/// reduced to whether they were extracted.
fn shape(label: &[Arc<Formula>], shift: u64) -> Vec<Formula> {
    fn push(f: &Formula, shift: u64, out: &mut Vec<Formula>) {
        match f {
            Formula::And(a, b) => {
                push(a, shift, out);
                push(b, shift, out);
            }
            Formula::Temporal(t) => {
                let mut t = t.with_mark(false);
                if extracted(&t) {
                    t = t.shifted(shift);
                    t.parent = ParentInterval::of(Interval::new(0, 0));
                }
                out.push(Formula::Temporal(t));
            }
            other => out.push(other.clone()),
        }
    }
    let mut out = Vec::new();
    for f in label {
        push(f, shift, &mut out);
    }
    out.sort();
    out.dedup();
    out
}

/// Chooses between STEP and JUMP at a poised node that has temporal operators.
///
/// `start` is the label the current instant began with. A jump is taken when
/// the next instant would begin with the same label up to moving extracted
/// operators by one; the instants in between then repeat the current one. The
/// jump stops at the next bound of an operator that is not extracted.
pub fn select_advance(u: &TableauNode, start: &[Arc<Formula>]) -> Advance {
    let now = u.time;
    let target = u
        .label
        .iter()
        .filter_map(|f| f.as_temporal())
        .filter(|t| !extracted(t))
        .flat_map(|t| [t.lo(), t.hi()])
        .filter(|&k| k > now)
        .min();
    let Some(target) = target else { return Advance::Step };
    if target == now + 1 {
        return Advance::Step;
    }
    let next = step(u);
    if shape(&next.label, 0) == shape(start, 1) {
        Advance::Jump(target)
    } else {
        Advance::Step
    }
}

/// Splits a node holding both nested and non-nested operators into the
/// non-nested part and the node itself.
pub fn split_easy(u: &TableauNode) -> Option<(TableauNode, TableauNode)> {
    let ops: Vec<&Arc<Formula>> = u.label.iter().filter(|f| f.as_temporal().is_some()).collect();
    let easy: Vec<Arc<Formula>> = ops
        .iter()
        .filter(|f| f.as_temporal().is_some_and(|t| !t.is_nested()))
        .map(|f| (*f).clone())
        .collect();
    if easy.is_empty() || easy.len() == ops.len() {
        return None;
    }
    let mut easy_node = TableauNode::new(easy, u.time, Rule::EasyPart);
    easy_node.parent = u.parent;
    Some((easy_node, u.clone()))
}
