use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::TableauNode;
use crate::formula::{Formula, TemporalOp};

/// A temporal operator with bounds relative to the node time.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct RelativeOp {
    op: TemporalOp,
    marked: bool,
    parent: Option<(i64, i64)>,
    left: Option<Arc<Formula>>,
    right: Arc<Formula>,
    lo: i64,
    hi: i64,
}

impl RelativeOp {
    fn shape_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        (self.op, self.marked, self.parent, &self.left, &self.right).hash(&mut h);
        h.finish()
    }

    fn same_shape(&self, other: &RelativeOp) -> bool {
        self.op == other.op
            && self.marked == other.marked
            && self.parent == other.parent
            && self.left == other.left
            && self.right == other.right
    }

    /// `self` entails `other` through one of the interval relations.
    fn entails(&self, other: &RelativeOp) -> bool {
        if !self.same_shape(other) {
            return false;
        }
        let (a, b, c, d) = (self.lo, self.hi, other.lo, other.hi);
        match self.op {
            TemporalOp::G => a <= c && d <= b,
            TemporalOp::F => c <= a && b <= d,
            TemporalOp::SR => a == c && d <= b,
            TemporalOp::SU => a == c && b <= d,
            TemporalOp::U | TemporalOp::R => a == c && b == d,
        }
    }
}

/// Time-independent form of a label: operators only, bounds relative to the
/// node time, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MemoKey {
    ops: Vec<RelativeOp>,
    signature: u64,
}

impl MemoKey {
    pub fn of(u: &TableauNode) -> Self {
        let now = u.time as i64;
        let mut ops: Vec<RelativeOp> = u
            .label
            .iter()
            .filter_map(|f| f.as_temporal())
            .map(|t| RelativeOp {
                op: t.op,
                marked: t.marked,
                parent: t.parent.0.map(|p| (p.lo as i64 - now, p.hi as i64 - now)),
                left: t.left.clone(),
                right: t.right.clone(),
                lo: t.lo() as i64 - now,
                hi: t.hi() as i64 - now,
            })
            .collect();
        ops.sort();
        ops.dedup();
        let signature = ops.iter().fold(0u64, |s, op| s | (1u64 << (op.shape_hash() % 64)));
        MemoKey { ops, signature }
    }

    /// Every operator of `rejected` is matched by an operator of `self` that
    /// entails it.
    pub fn implies(&self, rejected: &MemoKey) -> bool {
        if rejected.signature & !self.signature != 0 {
            return false;
        }
        rejected
            .ops
            .iter()
            .all(|r| self.ops.iter().any(|m| m.entails(r)))
    }
}

/// Labels of nodes whose subtrees were entirely rejected.
#[derive(Debug, Default)]
pub struct MemoStore {
    exact: HashSet<Vec<RelativeOp>>,
    rejected: Vec<MemoKey>,
}

impl MemoStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rejected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rejected.is_empty()
    }

    pub fn insert(&mut self, key: MemoKey) {
        if self.exact.insert(key.ops.clone()) {
            self.rejected.push(key);
        }
    }

    /// True when `key` entails a stored rejected label.
    pub fn implies(&self, key: &MemoKey) -> bool {
        self.exact.contains(&key.ops) || self.rejected.iter().any(|r| key.implies(r))
    }
}
