//! Fourier-Motzkin elimination over exact rationals.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use stl_tableau::{LinearConstraint, Rational, Relation};

/// `coeffs · x > bound` when strict, `>=` otherwise.
#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<Rational>,
    bound: Rational,
    strict: bool,
}

fn rows_of(cs: &[LinearConstraint], vars: &[String]) -> Vec<Vec<Row>> {
    let mut cases: Vec<Vec<Row>> = vec![Vec::new()];
    for c in cs {
        let coeffs: Vec<Rational> = vars
            .iter()
            .map(|v| c.terms.get(v).cloned().unwrap_or_else(Rational::zero))
            .collect();
        let neg: Vec<Rational> = coeffs.iter().map(|k| -k.clone()).collect();
        let pos = |strict| Row { coeffs: coeffs.clone(), bound: c.bound.clone(), strict };
        let flip = |strict| Row { coeffs: neg.clone(), bound: -c.bound.clone(), strict };
        let options: Vec<Vec<Row>> = match c.relation {
            Relation::Gt => vec![vec![pos(true)]],
            Relation::Ge => vec![vec![pos(false)]],
            Relation::Eq => vec![vec![pos(false), flip(false)]],
            Relation::Neq => vec![vec![pos(true)], vec![flip(true)]],
        };
        cases = cases
            .into_iter()
            .flat_map(|case| {
                options.iter().map(move |extra| {
                    let mut next = case.clone();
                    next.extend(extra.iter().cloned());
                    next
                })
            })
            .collect();
    }
    cases
}

fn feasible(mut rows: Vec<Row>, nvars: usize) -> bool {
    for j in 0..nvars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.coeffs[j].is_positive() {
                pos.push(r);
            } else if r.coeffs[j].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for p in &pos {
            for n in &neg {
                let a = p.coeffs[j].clone();
                let b = -n.coeffs[j].clone();
                let coeffs = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(x, y)| x * &b + y * &a)
                    .collect();
                rest.push(Row {
                    coeffs,
                    bound: &p.bound * &b + &n.bound * &a,
                    strict: p.strict || n.strict,
                });
            }
        }
        rows = rest;
    }
    rows.iter().all(|r| {
        let zero = Rational::zero();
        if r.strict {
            zero > r.bound
        } else {
            zero >= r.bound
        }
    })
}

/// Whether some rational assignment satisfies all constraints.
pub fn consistent(cs: &[LinearConstraint]) -> bool {
    let vars: Vec<String> = cs
        .iter()
        .flat_map(|c| c.terms.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    rows_of(cs, &vars).into_iter().any(|rows| feasible(rows, vars.len()))
}
