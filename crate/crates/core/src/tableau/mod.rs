//! The tree-shaped tableau: node rules, search and its statistics.

mod memo;
mod rules;
mod search;
mod trace;

use std::fmt;
use std::sync::Arc;
use std::time::Duration;

pub use memo::{MemoKey, MemoStore};
pub use rules::{
    check_termination, expand, is_poised, jump, label_constraints, select_advance, split_easy, step, Advance,
    RejectReason, Termination,
};
pub use search::Solver;
pub use trace::Trace;

use crate::formula::{format_label, normalize, Formula, NormalizeOptions};
use crate::heuristics::{shift_nested_intervals, unroll_all};

/// Search configuration. Every optimization is on by default.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub jump: bool,
    pub gf_rules: bool,
    pub implication_rule: bool,
    pub gf_unrolling: bool,
    pub merge_redundant: bool,
    pub interval_shift: bool,
    pub early_check: bool,
    pub memoization: bool,
    pub easy_first: bool,
    pub timeout: Option<Duration>,
    /// Record every node for a DOT dump.
    pub trace: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            jump: true,
            gf_rules: true,
            implication_rule: true,
            gf_unrolling: true,
            merge_redundant: true,
            interval_shift: true,
            early_check: true,
            memoization: true,
            easy_first: true,
            timeout: Some(Duration::from_secs(120)),
            trace: false,
        }
    }
}

/// Names of the optimization toggles, as used on the command line.
pub const TOGGLES: [&str; 9] = [
    "jump",
    "gf-rules",
    "implication-rule",
    "gf-unroll",
    "merge",
    "shift",
    "early-check",
    "memo",
    "easy-first",
];

impl Options {
    /// Basic tableau: every optimization off.
    pub fn basic() -> Self {
        let mut o = Options::default();
        for name in TOGGLES {
            *o.toggle_mut(name).expect("known toggle") = false;
        }
        o
    }

    pub fn toggle_mut(&mut self, name: &str) -> Option<&mut bool> {
        Some(match name {
            "jump" => &mut self.jump,
            "gf-rules" => &mut self.gf_rules,
            "implication-rule" => &mut self.implication_rule,
            "gf-unroll" => &mut self.gf_unrolling,
            "merge" => &mut self.merge_redundant,
            "shift" => &mut self.interval_shift,
            "early-check" => &mut self.early_check,
            "memo" => &mut self.memoization,
            "easy-first" => &mut self.easy_first,
            _ => return None,
        })
    }

    pub fn toggle(&self, name: &str) -> Option<bool> {
        self.clone().toggle_mut(name).map(|b| *b)
    }

    /// Defaults with one optimization disabled.
    pub fn without(name: &str) -> Self {
        let mut o = Options::default();
        *o.toggle_mut(name).unwrap_or_else(|| panic!("unknown toggle {name}")) = false;
        o
    }

    /// `default`, or the disabled toggles joined by `+` (e.g. `no-jump+no-memo`).
    pub fn fingerprint(&self) -> String {
        let off: Vec<String> = TOGGLES
            .iter()
            .filter(|t| self.toggle(t) == Some(false))
            .map(|t| format!("no-{t}"))
            .collect();
        if off.is_empty() {
            "default".into()
        } else {
            off.join("+")
        }
    }
}

/// Rewrites the input into the form the search expects under `opts`.
pub fn prepare(f: &Formula, opts: &Options) -> Formula {
    let nf = normalize(
        f,
        NormalizeOptions {
            keep_gf: opts.gf_rules,
            keep_implies: opts.implication_rule,
        },
    );
    let shifted = if opts.interval_shift {
        shift_nested_intervals(&nf)
    } else {
        nf
    };
    if opts.gf_rules && opts.gf_unrolling {
        unroll_all(&shifted)
    } else {
        shifted
    }
}

/// Which rule produced a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Root,
    Disjunction,
    Conjunction,
    Implication,
    Eventually,
    Always,
    StrictUntil,
    StrictRelease,
    Step,
    Jump,
    EasyPart,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Root => "ROOT",
            Rule::Disjunction => "OR",
            Rule::Conjunction => "AND",
            Rule::Implication => "IMPLIES",
            Rule::Eventually => "F",
            Rule::Always => "G",
            Rule::StrictUntil => "sU",
            Rule::StrictRelease => "sR",
            Rule::Step => "STEP",
            Rule::Jump => "JUMP",
            Rule::EasyPart => "EASY",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauNode {
    /// Formula set, without syntactic duplicates.
    pub label: Vec<Arc<Formula>>,
    pub time: u64,
    pub rule: Rule,
    pub id: usize,
    pub parent: Option<usize>,
}

impl TableauNode {
    pub fn new(label: Vec<Arc<Formula>>, time: u64, rule: Rule) -> Self {
        let mut node = TableauNode {
            label: Vec::with_capacity(label.len()),
            time,
            rule,
            id: 0,
            parent: None,
        };
        for f in label {
            node.insert(f);
        }
        node
    }

    pub fn root(f: Formula) -> Self {
        TableauNode::new(vec![Arc::new(f)], 0, Rule::Root)
    }

    pub fn insert(&mut self, f: Arc<Formula>) {
        if !self.label.iter().any(|g| Arc::ptr_eq(g, &f) || **g == *f) {
            self.label.push(f);
        }
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.label.iter().any(|g| **g == *f)
    }

    pub fn has_temporal(&self) -> bool {
        self.label.iter().any(|f| f.as_temporal().is_some())
    }
}

impl fmt::Display for TableauNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.label.iter().map(|g| format_label(g)).collect();
        write!(f, "{{{}}}@{}", items.join(", "), self.time)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    Timeout,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::Timeout => "timeout",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub nodes: u64,
    pub poised: u64,
    pub jumps: u64,
    /// Sum of the lengths of all jumps taken.
    pub jumped_time: u64,
    pub memo_hits: u64,
    pub lra_calls: u64,
    /// Nodes whose time exceeded the bound implied by the root horizon.
    pub horizon_violations: u64,
    pub max_time: u64,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: Status,
    /// Root-to-leaf accepted branch, present iff `Sat`.
    pub branch: Option<Vec<TableauNode>>,
    pub stats: Stats,
    pub horizon: u64,
    pub trace: Option<Trace>,
}

/// Decides satisfiability of `f` with the built-in simplex.
pub fn solve(f: &Formula, opts: &Options) -> Verdict {
    Solver::new(opts.clone()).solve(f)
}
