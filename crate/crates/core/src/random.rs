//! Seeded random formulas for differential testing.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::formula::{int, Formula, LinearConstraint, Rational, Relation, TemporalOp};

/// Shape limits for generated formulas.
#[derive(Clone, Debug)]
pub struct RandomConfig {
    /// Number of propositions (or real variables) to draw from.
    pub variables: usize,
    /// Maximum number of temporal operators on any root-to-leaf path.
    pub max_nesting: usize,
    /// Upper bound on the horizon of the result.
    pub max_horizon: u64,
    /// Maximum number of connectives and operators.
    pub max_size: usize,
    /// Real-valued linear atoms instead of propositions.
    pub real: bool,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            variables: 3,
            max_nesting: 2,
            max_horizon: 12,
            max_size: 6,
            real: false,
        }
    }
}

const PROPS: [&str; 4] = ["p", "q", "r", "s"];
const REALS: [&str; 4] = ["x", "y", "z", "w"];

struct Generator<'a> {
    rng: StdRng,
    cfg: &'a RandomConfig,
}

impl Generator<'_> {
    fn atom(&mut self) -> Formula {
        let n = self.cfg.variables.clamp(1, 4);
        if !self.cfg.real {
            let p = Formula::Atom(LinearConstraint::proposition(PROPS[self.rng.gen_range(0..n)]));
            return if self.rng.gen_bool(0.3) { Formula::negation(p) } else { p };
        }
        let count = if n > 1 && self.rng.gen_bool(0.3) { 2 } else { 1 };
        let mut terms: Vec<(String, Rational)> = Vec::new();
        for _ in 0..count {
            let mut k = self.rng.gen_range(-2i64..=2);
            if k == 0 {
                k = 1;
            }
            terms.push((REALS[self.rng.gen_range(0..n)].to_owned(), int(k)));
        }
        let relation = match self.rng.gen_range(0..10) {
            0..=5 => Relation::Gt,
            6..=7 => Relation::Ge,
            _ => Relation::Eq,
        };
        let c = LinearConstraint::new(terms, relation, int(self.rng.gen_range(-3i64..=3)));
        if c.is_ground() {
            return if c.ground_truth().unwrap_or(false) { Formula::True } else { Formula::falsum() };
        }
        let a = Formula::Atom(c);
        if self.rng.gen_bool(0.2) {
            Formula::negation(a)
        } else {
            a
        }
    }

    fn interval(&mut self, budget: u64) -> (u64, u64) {
        let hi = self.rng.gen_range(0..=budget);
        let lo = self.rng.gen_range(0..=hi);
        (lo, hi)
    }

    fn formula(&mut self, size: usize, nesting: usize, budget: u64) -> Formula {
        if size == 0 {
            return self.atom();
        }
        let temporal = nesting > 0 && self.rng.gen_bool(0.6);
        if temporal {
            let (lo, hi) = self.interval(budget);
            let rest = budget - hi;
            let op = [
                TemporalOp::F,
                TemporalOp::G,
                TemporalOp::SU,
                TemporalOp::SR,
                TemporalOp::U,
                TemporalOp::R,
            ][self.rng.gen_range(0..6)];
            if op.is_unary() {
                let arg = self.formula(size - 1, nesting - 1, rest);
                return if op == TemporalOp::F {
                    Formula::eventually(lo, hi, arg)
                } else {
                    Formula::always(lo, hi, arg)
                };
            }
            let split = self.rng.gen_range(0..size);
            let left = self.formula(split, nesting - 1, rest);
            let right = self.formula(size - 1 - split, nesting - 1, rest);
            return Formula::binary(op, lo, hi, left, right);
        }
        match self.rng.gen_range(0..7) {
            0 => Formula::negation(self.formula(size - 1, nesting, budget)),
            k => {
                let split = self.rng.gen_range(0..size);
                let a = self.formula(split, nesting, budget);
                let b = self.formula(size - 1 - split, nesting, budget);
                match k {
                    1..=3 => Formula::and(a, b),
                    4..=5 => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                }
            }
        }
    }
}

/// One formula drawn from `seed`; identical seeds give identical formulas.
pub fn random_formula(seed: u64, cfg: &RandomConfig) -> Formula {
    let mut g = Generator {
        rng: StdRng::seed_from_u64(seed),
        cfg,
    };
    let size = g.rng.gen_range(1..=cfg.max_size.max(1));
    g.formula(size, cfg.max_nesting, cfg.max_horizon)
}

/// `count` formulas from consecutive seeds starting at `seed`.
pub fn random_corpus(seed: u64, count: usize, cfg: &RandomConfig) -> Vec<Formula> {
    (0..count as u64).map(|i| random_formula(seed.wrapping_add(i), cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::horizon;

    #[test]
    fn respects_limits() {
        let cfg = RandomConfig::default();
        for f in random_corpus(7, 300, &cfg) {
            assert!(horizon(&f) <= cfg.max_horizon);
            assert!(f.temporal_depth() <= cfg.max_nesting);
            assert!(f.variables().len() <= cfg.variables);
        }
    }

    #[test]
    fn deterministic() {
        let cfg = RandomConfig {
            real: true,
            ..RandomConfig::default()
        };
        assert_eq!(random_corpus(3, 20, &cfg), random_corpus(3, 20, &cfg));
    }
}
