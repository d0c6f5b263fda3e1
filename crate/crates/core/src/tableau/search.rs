use std::collections::{HashMap, HashSet};
use std::time::Instant;

use super::memo::{MemoKey, MemoStore};
use super::rules::{
    check_termination, expand, is_poised, jump, label_constraints, select_advance, split_easy, step, Advance,
    Termination,
};
use super::trace::Trace;
use super::{prepare, Options, Rule, Stats, Status, TableauNode, Verdict};
use crate::formula::{horizon, Formula, LinearConstraint};
use crate::lra::{ConsistencyOracle, SimplexOracle};

fn starts_instant(rule: Rule) -> bool {
    matches!(rule, Rule::Root | Rule::Step | Rule::Jump | Rule::EasyPart)
}

enum Frame {
    /// Siblings still to visit (last one first), below a path of `depth` nodes.
    Alternatives { nodes: Vec<TableauNode>, depth: usize },
    /// Label to remember as rejected once everything above it fails.
    Rejected(MemoKey),
    /// The easy part of a split is being explored; `full` follows if it is accepted.
    EasyPart {
        full: TableauNode,
        depth: usize,
        key: MemoKey,
    },
}

/// Depth-first tableau search keeping only the current branch.
pub struct Solver {
    opts: Options,
    oracle: Box<dyn ConsistencyOracle>,
    lra_cache: HashMap<Vec<LinearConstraint>, bool>,
    memo: MemoStore,
    easy_accepted: HashSet<MemoKey>,
    stats: Stats,
    horizon: u64,
    next_id: usize,
    trace: Option<Trace>,
}

impl Solver {
    pub fn new(opts: Options) -> Self {
        Self::with_oracle(opts, Box::new(SimplexOracle))
    }

    pub fn with_oracle(opts: Options, oracle: Box<dyn ConsistencyOracle>) -> Self {
        let trace = opts.trace.then(Trace::default);
        Solver {
            opts,
            oracle,
            lra_cache: HashMap::new(),
            memo: MemoStore::new(),
            easy_accepted: HashSet::new(),
            stats: Stats::default(),
            horizon: 0,
            next_id: 0,
            trace,
        }
    }

    fn consistent(&mut self, cs: &[LinearConstraint]) -> bool {
        if let Some(&r) = self.lra_cache.get(cs) {
            return r;
        }
        self.stats.lra_calls += 1;
        let r = self.oracle.check(cs).is_consistent();
        self.lra_cache.insert(cs.to_vec(), r);
        r
    }

    fn register(&mut self, mut u: TableauNode, parent: Option<usize>) -> TableauNode {
        u.id = self.next_id;
        u.parent = parent;
        self.next_id += 1;
        self.stats.nodes += 1;
        self.stats.max_time = self.stats.max_time.max(u.time);
        let bound = if u.has_temporal() { self.horizon } else { self.horizon + 1 };
        if u.time > bound {
            self.stats.horizon_violations += 1;
        }
        if let Some(t) = &mut self.trace {
            t.record(&u);
        }
        u
    }

    fn annotate(&mut self, id: usize, outcome: &str) {
        if let Some(t) = &mut self.trace {
            t.outcome(id, outcome);
        }
    }

    fn finish(self, status: Status, branch: Option<Vec<TableauNode>>) -> Verdict {
        Verdict {
            status,
            branch,
            stats: self.stats,
            horizon: self.horizon,
            trace: self.trace,
        }
    }

    /// Normalizes `f` according to the options and searches for an accepted branch.
    pub fn solve(self, f: &Formula) -> Verdict {
        let prepared = prepare(f, &self.opts);
        let h = horizon(f);
        self.solve_prepared(prepared, h)
    }

    /// Searches from an already prepared formula; `h` bounds node times.
    pub fn solve_prepared(mut self, f: Formula, h: u64) -> Verdict {
        self.horizon = h;
        let deadline = self.opts.timeout.map(|d| Instant::now() + d);
        let mut path: Vec<TableauNode> = Vec::new();
        let mut stack: Vec<Frame> = Vec::new();
        let mut current = Some(self.register(TableauNode::root(f), None));
        loop {
            let u = match current.take() {
                Some(u) => u,
                None => match self.backtrack(&mut stack, &mut path) {
                    Some(u) => u,
                    None => return self.finish(Status::Unsat, None),
                },
            };
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return self.finish(Status::Timeout, None);
            }

            if !is_poised(&u) {
                if self.opts.early_check && !self.early_consistent(&u) {
                    self.annotate(u.id, "early check");
                    continue;
                }
                let mut children = expand(&u, &self.opts);
                let parent = Some(u.id);
                path.push(u);
                let first = children.remove(0);
                let rest: Vec<TableauNode> = children
                    .into_iter()
                    .rev()
                    .map(|c| self.register(c, parent))
                    .collect();
                current = Some(self.register(first, parent));
                if !rest.is_empty() {
                    stack.push(Frame::Alternatives {
                        nodes: rest,
                        depth: path.len(),
                    });
                }
                continue;
            }

            self.stats.poised += 1;
            let lra_cache = &mut self.lra_cache;
            let oracle = &mut self.oracle;
            let stats = &mut self.stats;
            let verdict = check_termination(&u, &mut |cs: &[LinearConstraint]| {
                if let Some(&r) = lra_cache.get(cs) {
                    return r;
                }
                stats.lra_calls += 1;
                let r = oracle.check(cs).is_consistent();
                lra_cache.insert(cs.to_vec(), r);
                r
            });
            match verdict {
                Termination::Rejected(reason) => {
                    self.annotate(u.id, &format!("rejected: {reason:?}"));
                    continue;
                }
                Termination::Accepted => {
                    self.annotate(u.id, "accepted");
                    path.push(u);
                    match stack.iter().rposition(|f| matches!(f, Frame::EasyPart { .. })) {
                        Some(pos) => {
                            stack.truncate(pos + 1);
                            let Some(Frame::EasyPart { full, depth, key }) = stack.pop() else {
                                unreachable!()
                            };
                            self.easy_accepted.insert(key);
                            path.truncate(depth);
                            current = Some(full);
                        }
                        None => return self.finish(Status::Sat, Some(path)),
                    }
                    continue;
                }
                Termination::Continue => {}
            }

            let next = if self.opts.jump {
                let start = if starts_instant(u.rule) {
                    &u.label
                } else {
                    path.iter()
                        .rev()
                        .take_while(|p| p.time == u.time)
                        .find(|p| starts_instant(p.rule))
                        .map_or(&u.label, |p| &p.label)
                };
                match select_advance(&u, start) {
                    Advance::Step => step(&u),
                    Advance::Jump(target) => {
                        self.stats.jumps += 1;
                        self.stats.jumped_time += target - u.time;
                        jump(&u, target)
                    }
                }
            } else {
                step(&u)
            };
            let parent = Some(u.id);
            path.push(u);
            let depth = path.len();
            let next = self.register(next, parent);

            let key = self.opts.memoization.then(|| MemoKey::of(&next));
            if let Some(k) = &key {
                if self.memo.implies(k) {
                    self.stats.memo_hits += 1;
                    self.annotate(next.id, "memo hit");
                    continue;
                }
            }
            if self.opts.easy_first {
                if let Some((easy, full)) = split_easy(&next) {
                    let easy_key = MemoKey::of(&easy);
                    if !self.easy_accepted.contains(&easy_key) {
                        if self.opts.memoization && self.memo.implies(&easy_key) {
                            self.stats.memo_hits += 1;
                            self.annotate(next.id, "memo hit on easy part");
                            if let Some(k) = key {
                                self.memo.insert(k);
                            }
                            continue;
                        }
                        if let Some(k) = key {
                            stack.push(Frame::Rejected(k));
                        }
                        stack.push(Frame::EasyPart {
                            full,
                            depth,
                            key: easy_key.clone(),
                        });
                        if self.opts.memoization {
                            stack.push(Frame::Rejected(easy_key));
                        }
                        current = Some(self.register(easy, parent));
                        continue;
                    }
                }
            }
            if let Some(k) = key {
                stack.push(Frame::Rejected(k));
            }
            current = Some(next);
        }
    }

    fn early_consistent(&mut self, u: &TableauNode) -> bool {
        if u.label.iter().any(|f| f.is_false()) {
            return false;
        }
        let cs = label_constraints(u);
        cs.is_empty() || self.consistent(&cs)
    }

    fn backtrack(&mut self, stack: &mut Vec<Frame>, path: &mut Vec<TableauNode>) -> Option<TableauNode> {
        while let Some(frame) = stack.pop() {
            match frame {
                Frame::Rejected(key) => self.memo.insert(key),
                Frame::EasyPart { .. } => {}
                Frame::Alternatives { mut nodes, depth } => {
                    let next = nodes.pop().expect("non-empty alternatives");
                    if !nodes.is_empty() {
                        stack.push(Frame::Alternatives { nodes, depth });
                    }
                    path.truncate(depth);
                    return Some(next);
                }
            }
        }
        None
    }
}
