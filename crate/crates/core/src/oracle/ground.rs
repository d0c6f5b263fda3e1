use std::fmt;

use super::OracleError;
use crate::formula::{format, horizon, Formula, LinearConstraint, TemporalOp};

/// Propositional combination of constraints over time-indexed variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroundFormula {
    True,
    False,
    Atom { time: u64, constraint: LinearConstraint },
    Not(Box<GroundFormula>),
    And(Vec<GroundFormula>),
    Or(Vec<GroundFormula>),
}

impl GroundFormula {
    fn and(items: Vec<GroundFormula>) -> Self {
        let mut flat = Vec::with_capacity(items.len());
        for g in items {
            match g {
                GroundFormula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => GroundFormula::True,
            1 => flat.pop().expect("one item"),
            _ => GroundFormula::And(flat),
        }
    }

    fn or(items: Vec<GroundFormula>) -> Self {
        let mut flat = Vec::with_capacity(items.len());
        for g in items {
            match g {
                GroundFormula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => GroundFormula::False,
            1 => flat.pop().expect("one item"),
            _ => GroundFormula::Or(flat),
        }
    }

    /// Largest time index of any atom.
    pub fn max_time(&self) -> Option<u64> {
        match self {
            GroundFormula::True | GroundFormula::False => None,
            GroundFormula::Atom { time, .. } => Some(*time),
            GroundFormula::Not(a) => a.max_time(),
            GroundFormula::And(items) | GroundFormula::Or(items) => items.iter().filter_map(|g| g.max_time()).max(),
        }
    }

    /// Truth under `value(var, time)`.
    pub fn eval(&self, value: &dyn Fn(&str, u64) -> crate::formula::Rational) -> bool {
        match self {
            GroundFormula::True => true,
            GroundFormula::False => false,
            GroundFormula::Atom { time, constraint } => {
                let values = constraint
                    .variables()
                    .map(|v| (v.to_owned(), value(v, *time)))
                    .collect();
                constraint.holds(&values)
            }
            GroundFormula::Not(a) => !a.eval(value),
            GroundFormula::And(items) => items.iter().all(|g| g.eval(value)),
            GroundFormula::Or(items) => items.iter().any(|g| g.eval(value)),
        }
    }
}

/// Unrolls every temporal operator into finite conjunctions and disjunctions
/// over time-indexed atoms, starting at time 0.
pub fn ground_expand(f: &Formula, h: u64) -> Result<GroundFormula, OracleError> {
    let needed = horizon(f);
    if h < needed {
        return Err(OracleError::HorizonTooSmall { given: h, needed });
    }
    Ok(ground(f, 0))
}

fn ground(f: &Formula, t: u64) -> GroundFormula {
    match f {
        Formula::True => GroundFormula::True,
        _ if f.is_false() => GroundFormula::False,
        Formula::Atom(c) => GroundFormula::Atom {
            time: t,
            constraint: c.clone(),
        },
        Formula::Not(a) => GroundFormula::Not(Box::new(ground(a, t))),
        Formula::And(a, b) => GroundFormula::and(vec![ground(a, t), ground(b, t)]),
        Formula::Or(a, b) => GroundFormula::or(vec![ground(a, t), ground(b, t)]),
        Formula::Implies(a, b) => GroundFormula::or(vec![GroundFormula::Not(Box::new(ground(a, t))), ground(b, t)]),
        Formula::Temporal(op) => {
            let window = t + op.lo()..=t + op.hi();
            let right = |s: u64| ground(&op.right, s);
            let left = |s: u64| ground(op.left.as_deref().expect("binary operator"), s);
            match op.op {
                TemporalOp::F => GroundFormula::or(window.map(right).collect()),
                TemporalOp::G => GroundFormula::and(window.map(right).collect()),
                TemporalOp::U => GroundFormula::or(
                    window
                        .map(|s| GroundFormula::and(std::iter::once(right(s)).chain((t..=s).map(left)).collect()))
                        .collect(),
                ),
                TemporalOp::R => GroundFormula::and(
                    window
                        .map(|s| GroundFormula::or(std::iter::once(right(s)).chain((t..=s).map(left)).collect()))
                        .collect(),
                ),
                TemporalOp::SU => GroundFormula::or(
                    window
                        .map(|s| {
                            GroundFormula::and(std::iter::once(right(s)).chain((t + op.lo()..s).map(left)).collect())
                        })
                        .collect(),
                ),
                TemporalOp::SR => GroundFormula::and(
                    window
                        .map(|s| {
                            GroundFormula::or(std::iter::once(right(s)).chain((t + op.lo()..s).map(left)).collect())
                        })
                        .collect(),
                ),
            }
        }
    }
}

impl fmt::Display for GroundFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, items: &[GroundFormula], op: &str| -> fmt::Result {
            for (i, g) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "({g})")?;
            }
            Ok(())
        };
        match self {
            GroundFormula::True => f.write_str("true"),
            GroundFormula::False => f.write_str("false"),
            GroundFormula::Atom { time, constraint } => {
                let renamed = LinearConstraint {
                    terms: constraint
                        .terms
                        .iter()
                        .map(|(v, c)| (format!("{v}_{time}"), c.clone()))
                        .collect(),
                    ..constraint.clone()
                };
                f.write_str(&format(&Formula::Atom(renamed)))
            }
            GroundFormula::Not(a) => write!(f, "!({a})"),
            GroundFormula::And(items) => join(f, items, "&"),
            GroundFormula::Or(items) => join(f, items, "|"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_stl;

    fn ground_text(text: &str, h: u64) -> String {
        ground_expand(&parse_stl(text).unwrap(), h).unwrap().to_string()
    }

    #[test]
    fn always_eventually_example() {
        assert_eq!(
            ground_text("G[2,3] F[0,1] (a >= 80)", 4),
            "((a_2 >= 80) | (a_3 >= 80)) & ((a_3 >= 80) | (a_4 >= 80))"
        );
    }

    #[test]
    fn single_atom() {
        assert_eq!(ground_text("x > 0", 0), "x_0 > 0");
    }

    #[test]
    fn eventually_is_a_disjunction() {
        assert_eq!(ground_text("F[0,2] x < 5", 2), "(-x_0 > -5) | (-x_1 > -5) | (-x_2 > -5)");
    }

    #[test]
    fn horizon_must_cover_formula() {
        let f = parse_stl("F[0,2] x < 5").unwrap();
        assert_eq!(ground_expand(&f, 1), Err(OracleError::HorizonTooSmall { given: 1, needed: 2 }));
    }

    #[test]
    fn strict_until_prefix() {
        assert_eq!(
            ground_text("(a > 0) sU[1,2] (b > 0)", 2),
            "(b_1 > 0) | ((b_2 > 0) & (a_1 > 0))"
        );
        assert_eq!(
            ground_text("(a > 0) U[1,2] (b > 0)", 2),
            "((b_1 > 0) & (a_0 > 0) & (a_1 > 0)) | ((b_2 > 0) & (a_0 > 0) & (a_1 > 0) & (a_2 > 0))"
        );
    }
}
