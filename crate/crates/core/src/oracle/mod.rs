//! Brute-force ground truth at small horizons.

mod eval;
mod ground;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

pub use eval::evaluate;
pub use ground::{ground_expand, GroundFormula};

use crate::formula::{horizon, int, Formula, LinearConstraint, Rational};
use crate::lra::{check_consistent, negate};
use crate::witness::Signal;

/// Largest horizon the oracle accepts unless told otherwise.
pub const DEFAULT_CAP: u64 = 14;

/// Largest number of conjuncts the real-valued search will examine.
pub const MAX_CONJUNCTS: u64 = 1 << 18;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("signal has {length} instants but {needed} are needed")]
    SignalTooShort { needed: u64, length: u64 },
    #[error("horizon {given} is below the formula horizon {needed}")]
    HorizonTooSmall { given: u64, needed: u64 },
    #[error("formula horizon {horizon} exceeds the oracle cap {cap}")]
    CapExceeded { horizon: u64, cap: u64 },
    #[error("more than {limit} conjuncts in the disjunctive normal form")]
    TooManyConjuncts { limit: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub satisfiable: bool,
    pub witness: Option<Signal>,
}

/// Decides satisfiability by exhaustive search over the grounded formula.
///
/// Formulas whose atoms each mention one variable are decided by assigning
/// every (time, variable) pair a value from a finite representative set;
/// anything else goes through a disjunctive normal form
/// search with each conjunct handed to the LRA solver.
pub fn brute_force_check(f: &Formula, cap: u64) -> Result<OracleVerdict, OracleError> {
    let h = horizon(f);
    if h > cap {
        return Err(OracleError::CapExceeded { horizon: h, cap });
    }
    let g = ground_expand(f, h)?;
    let vars = f.variables();
    let length = h as usize + 1;
    if let Some(domains) = finite_domains(f) {
        let mut search = FiniteSearch {
            domains,
            refuted: HashSet::new(),
        };
        let found = search.run(simplify(g), &mut BTreeMap::new());
        Ok(OracleVerdict {
            satisfiable: found.is_some(),
            witness: found.map(|assignment| {
                let mut w = Signal::zeros(vars, length);
                for ((t, v), val) in assignment {
                    w.set(&v, t as usize, val);
                }
                w
            }),
        })
    } else {
        let mut search = DnfSearch::default();
        let found = search.run(vec![(&g, true)], &mut Vec::new())?;
        Ok(OracleVerdict {
            satisfiable: found.is_some(),
            witness: found.map(|model| {
                let mut w = Signal::zeros(vars, length);
                for (name, val) in model {
                    let (v, t) = split_indexed(&name);
                    if (t as usize) < length {
                        w.set(v, t as usize, val);
                    }
                }
                w
            }),
        })
    }
}

/// For formulas whose atoms each mention at most one variable, a finite set
/// of values per variable that realizes every combination of atom truths.
fn finite_domains(f: &Formula) -> Option<BTreeMap<String, Vec<Rational>>> {
    let mut thresholds: BTreeMap<String, BTreeSet<Rational>> = BTreeMap::new();
    for v in f.variables() {
        thresholds.entry(v).or_default();
    }
    for c in f.atoms() {
        if c.is_ground() {
            continue;
        }
        if c.terms.len() != 1 {
            return None;
        }
        let (v, k) = c.terms.iter().next().expect("one term");
        thresholds.entry(v.clone()).or_default().insert(&c.bound / k);
    }
    Some(
        thresholds
            .into_iter()
            .map(|(v, points)| (v, representatives(&points)))
            .collect(),
    )
}

/// Each threshold, the midpoints between neighbours and one value beyond
/// either end. The threshold 1 comes first so propositions are tried true.
fn representatives(points: &BTreeSet<Rational>) -> Vec<Rational> {
    let sorted: Vec<&Rational> = points.iter().collect();
    let (Some(first), Some(last)) = (sorted.first(), sorted.last()) else {
        return vec![int(0)];
    };
    let mut out: Vec<Rational> = sorted.iter().map(|q| (*q).clone()).collect();
    out.extend(sorted.windows(2).map(|w| (w[0] + w[1]) / int(2)));
    out.push(*first - int(1));
    out.push(*last + int(1));
    out.sort_by_key(|q| (*q != int(1), *q != int(0)));
    out
}

fn atom_var(c: &LinearConstraint) -> &str {
    c.terms.keys().next().map(String::as_str).expect("atom has a variable")
}

/// Folds constants and ground atoms.
fn simplify(g: GroundFormula) -> GroundFormula {
    match g {
        GroundFormula::Atom { constraint, .. } if constraint.is_ground() => {
            if constraint.ground_truth().unwrap_or(false) {
                GroundFormula::True
            } else {
                GroundFormula::False
            }
        }
        GroundFormula::Not(a) => match simplify(*a) {
            GroundFormula::True => GroundFormula::False,
            GroundFormula::False => GroundFormula::True,
            other => GroundFormula::Not(Box::new(other)),
        },
        GroundFormula::And(items) => {
            let mut kept = Vec::new();
            for g in items {
                match simplify(g) {
                    GroundFormula::True => {}
                    GroundFormula::False => return GroundFormula::False,
                    GroundFormula::And(inner) => kept.extend(inner),
                    other => kept.push(other),
                }
            }
            match kept.len() {
                0 => GroundFormula::True,
                1 => kept.pop().expect("one item"),
                _ => GroundFormula::And(kept),
            }
        }
        GroundFormula::Or(items) => {
            let mut kept = Vec::new();
            for g in items {
                match simplify(g) {
                    GroundFormula::False => {}
                    GroundFormula::True => return GroundFormula::True,
                    GroundFormula::Or(inner) => kept.extend(inner),
                    other => kept.push(other),
                }
            }
            match kept.len() {
                0 => GroundFormula::False,
                1 => kept.pop().expect("one item"),
                _ => GroundFormula::Or(kept),
            }
        }
        other => other,
    }
}

fn substitute(g: &GroundFormula, key: &(u64, String), value: &Rational) -> GroundFormula {
    match g {
        GroundFormula::Atom { time, constraint } if *time == key.0 && atom_var(constraint) == key.1 => {
            let values = BTreeMap::from([(key.1.clone(), value.clone())]);
            if constraint.holds(&values) {
                GroundFormula::True
            } else {
                GroundFormula::False
            }
        }
        GroundFormula::Not(a) => GroundFormula::Not(Box::new(substitute(a, key, value))),
        GroundFormula::And(items) => GroundFormula::And(items.iter().map(|g| substitute(g, key, value)).collect()),
        GroundFormula::Or(items) => GroundFormula::Or(items.iter().map(|g| substitute(g, key, value)).collect()),
        other => other.clone(),
    }
}

fn first_atom(g: &GroundFormula) -> Option<(u64, String)> {
    match g {
        GroundFormula::True | GroundFormula::False => None,
        GroundFormula::Atom { time, constraint } => Some((*time, atom_var(constraint).to_owned())),
        GroundFormula::Not(a) => first_atom(a),
        GroundFormula::And(items) | GroundFormula::Or(items) => items.iter().filter_map(first_atom).min(),
    }
}

/// Assigns (time, variable) pairs in order from their finite domains, pruning
/// on the simplified residual and remembering residuals already refuted.
struct FiniteSearch {
    domains: BTreeMap<String, Vec<Rational>>,
    refuted: HashSet<GroundFormula>,
}

type Assignment = BTreeMap<(u64, String), Rational>;

impl FiniteSearch {
    fn run(&mut self, g: GroundFormula, assignment: &mut Assignment) -> Option<Assignment> {
        match g {
            GroundFormula::True => return Some(assignment.clone()),
            GroundFormula::False => return None,
            _ => {}
        }
        if self.refuted.contains(&g) {
            return None;
        }
        let key = first_atom(&g).expect("non-constant residual has an atom");
        let domain = self.domains[&key.1].clone();
        for value in domain {
            let residual = simplify(substitute(&g, &key, &value));
            assignment.insert(key.clone(), value);
            if let Some(found) = self.run(residual, assignment) {
                return Some(found);
            }
            assignment.remove(&key);
        }
        self.refuted.insert(g);
        None
    }
}

/// Name of the real constant standing for `var` at time `t`.
fn indexed(var: &str, t: u64) -> String {
    format!("{var}#{t}")
}

fn split_indexed(name: &str) -> (&str, u64) {
    let (v, t) = name.rsplit_once('#').expect("indexed variable");
    (v, t.parse().expect("time index"))
}

fn time_indexed(c: &LinearConstraint, t: u64) -> LinearConstraint {
    LinearConstraint::new(
        c.terms.iter().map(|(v, k)| (indexed(v, t), k.clone())),
        c.relation,
        c.bound.clone(),
    )
}

/// Depth-first walk of the disjunctive normal form; each complete or partial
/// conjunct is checked with the LRA solver.
#[derive(Default)]
struct DnfSearch {
    conjuncts: u64,
}

impl DnfSearch {
    fn run(
        &mut self,
        mut pending: Vec<(&GroundFormula, bool)>,
        literals: &mut Vec<LinearConstraint>,
    ) -> Result<Option<BTreeMap<String, Rational>>, OracleError> {
        while let Some((g, positive)) = pending.pop() {
            match (g, positive) {
                (GroundFormula::True, true) | (GroundFormula::False, false) => {}
                (GroundFormula::True, false) | (GroundFormula::False, true) => return self.dead_end(),
                (GroundFormula::Not(a), p) => pending.push((a, !p)),
                (GroundFormula::Atom { time, constraint }, p) => {
                    let c = time_indexed(constraint, *time);
                    let c = if p { c } else { negate(&c) };
                    if let Some(truth) = c.ground_truth() {
                        if !truth {
                            return self.dead_end();
                        }
                        continue;
                    }
                    if literals.contains(&c) {
                        continue;
                    }
                    literals.push(c);
                    if !check_consistent(literals).is_consistent() {
                        return self.dead_end();
                    }
                }
                (GroundFormula::And(items), true) | (GroundFormula::Or(items), false) => {
                    pending.extend(items.iter().rev().map(|g| (g, positive)));
                }
                (GroundFormula::Or(items), true) | (GroundFormula::And(items), false) => {
                    for g in items {
                        let mut branch = pending.clone();
                        branch.push((g, positive));
                        let mark = literals.len();
                        let found = self.run(branch, literals)?;
                        literals.truncate(mark);
                        if found.is_some() {
                            return Ok(found);
                        }
                    }
                    return Ok(None);
                }
            }
        }
        self.conjuncts += 1;
        let result = check_consistent(literals);
        Ok(result.model.map(|m| m.into_iter().collect()))
    }

    fn dead_end<T>(&mut self) -> Result<Option<T>, OracleError> {
        self.conjuncts += 1;
        if self.conjuncts > MAX_CONJUNCTS {
            return Err(OracleError::TooManyConjuncts { limit: MAX_CONJUNCTS });
        }
        Ok(None)
    }
}

/// Atoms of the grounded formula as `(time, constraint)` pairs.
pub fn ground_atoms(g: &GroundFormula) -> BTreeSet<(u64, LinearConstraint)> {
    let mut out = BTreeSet::new();
    collect_atoms(g, &mut out);
    out
}

fn collect_atoms(g: &GroundFormula, out: &mut BTreeSet<(u64, LinearConstraint)>) {
    match g {
        GroundFormula::True | GroundFormula::False => {}
        GroundFormula::Atom { time, constraint } => {
            out.insert((*time, constraint.clone()));
        }
        GroundFormula::Not(a) => collect_atoms(a, out),
        GroundFormula::And(items) | GroundFormula::Or(items) => items.iter().for_each(|g| collect_atoms(g, out)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_mltl, parse_stl};

    fn check(text: &str) -> OracleVerdict {
        brute_force_check(&parse_stl(text).unwrap(), DEFAULT_CAP).unwrap()
    }

    fn check_witness(text: &str) -> bool {
        let f = parse_stl(text).unwrap();
        let v = brute_force_check(&f, DEFAULT_CAP).unwrap();
        if let Some(w) = &v.witness {
            assert!(evaluate(&f, w, 0).unwrap(), "witness for {text} does not satisfy it");
        }
        v.satisfiable
    }

    #[test]
    fn boolean_always_versus_eventually_not() {
        let f = parse_mltl("G[0,2] p & F[0,2] !p").unwrap();
        assert!(!brute_force_check(&f, DEFAULT_CAP).unwrap().satisfiable);
    }

    #[test]
    fn eventually_below_five() {
        assert!(check_witness("F[0,2] x < 5"));
    }

    #[test]
    fn reduced_railroad_pair_is_unsat() {
        assert!(!check("G[0,4] F[1,2] (a >= 80) & G[0,6] (a >= 80 -> G[1,2] (a < 60))").satisfiable);
    }

    #[test]
    fn jump_example_is_sat_with_valid_witness() {
        assert!(check_witness("G[0,10] x > 5 & F[0,11] x < 0"));
    }

    #[test]
    fn cap_is_enforced() {
        let f = parse_stl("F[0,20] x > 0").unwrap();
        assert_eq!(
            brute_force_check(&f, DEFAULT_CAP),
            Err(OracleError::CapExceeded { horizon: 20, cap: 14 })
        );
    }

    #[test]
    fn boolean_witness_satisfies_formula() {
        let f = parse_mltl("(p U[1,3] q) & G[0,2] !q & F[2,4] (p & !q)").unwrap();
        let v = brute_force_check(&f, DEFAULT_CAP).unwrap();
        assert!(v.satisfiable);
        assert!(evaluate(&f, v.witness.as_ref().unwrap(), 0).unwrap());
    }

    #[test]
    fn equality_and_disequality() {
        assert!(check_witness("G[0,1] x == 1 & F[0,1] !(x == 1) | F[0,1] y > 0"));
        assert!(!check("G[0,1] x == 1 & F[0,1] !(x == 1)").satisfiable);
    }

    #[test]
    fn strict_inequalities_conflict() {
        assert!(!check("x > 0 & x < 0").satisfiable);
        assert!(check_witness("x >= 0 & x <= 0"));
    }

    #[test]
    fn split_disequalities_stay_in_the_finite_search() {
        let f = parse_stl("((q > 1) | (-q > -1)) U[6,7] ((p == 1) & ((p > 1) | (-p > -1)))").unwrap();
        assert!(finite_domains(&f).is_some());
        assert!(!brute_force_check(&f, DEFAULT_CAP).unwrap().satisfiable);
        assert!(check_witness("G[0,8] ((x > 1) | (x < 1)) & F[0,8] (x >= 1) & G[0,8] (x <= 1 | y > 3)"));
    }

    #[test]
    fn representatives_cover_every_region() {
        let points = BTreeSet::from([int(1), int(3)]);
        let mut reps = representatives(&points);
        reps.sort();
        assert_eq!(reps, vec![int(0), int(1), int(2), int(3), int(4)]);
        assert_eq!(representatives(&BTreeSet::new()), vec![int(0)]);
    }
}
