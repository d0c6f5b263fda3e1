//! Bounded SMT-LIB2 encoding over time-indexed real constants.

use num_traits::{One, Signed};

use crate::formula::{horizon, LinearConstraint, Rational, Relation};
use crate::oracle::{ground_expand, GroundFormula};
use crate::Formula;

/// SMT-LIB2 script asserting `f` at time 0 in `QF_LRA`.
pub fn emit_smtlib(f: &Formula) -> String {
    let h = horizon(f);
    let mut out = String::from("(set-logic QF_LRA)\n");
    for var in f.variables() {
        for t in 0..=h {
            out.push_str(&format!("(declare-const {var}_{t} Real)\n"));
        }
    }
    let g = ground_expand(f, h).expect("horizon of the formula itself");
    out.push_str("(assert ");
    write_ground(&g, &mut out);
    out.push_str(")\n(check-sat)\n");
    out
}

/// S-expression for a ground formula.
pub fn ground_sexpr(g: &GroundFormula) -> String {
    let mut out = String::new();
    write_ground(g, &mut out);
    out
}

fn write_ground(g: &GroundFormula, out: &mut String) {
    match g {
        GroundFormula::True => out.push_str("true"),
        GroundFormula::False => out.push_str("false"),
        GroundFormula::Atom { time, constraint } => write_atom(constraint, *time, out),
        GroundFormula::Not(a) => {
            out.push_str("(not ");
            write_ground(a, out);
            out.push(')');
        }
        GroundFormula::And(items) | GroundFormula::Or(items) => {
            out.push_str(if matches!(g, GroundFormula::And(_)) { "(and" } else { "(or" });
            for item in items {
                out.push(' ');
                write_ground(item, out);
            }
            out.push(')');
        }
    }
}

fn write_atom(c: &LinearConstraint, t: u64, out: &mut String) {
    let lhs = linear_term(c, t);
    let rhs = number(&c.bound);
    match c.relation {
        Relation::Gt => out.push_str(&format!("(> {lhs} {rhs})")),
        Relation::Ge => out.push_str(&format!("(>= {lhs} {rhs})")),
        Relation::Eq => out.push_str(&format!("(= {lhs} {rhs})")),
        Relation::Neq => out.push_str(&format!("(not (= {lhs} {rhs}))")),
    }
}

fn linear_term(c: &LinearConstraint, t: u64) -> String {
    let parts: Vec<String> = c
        .terms
        .iter()
        .map(|(v, k)| {
            let name = format!("{v}_{t}");
            if k.is_one() {
                name
            } else if (-k).is_one() {
                format!("(- {name})")
            } else {
                format!("(* {} {name})", number(k))
            }
        })
        .collect();
    match parts.len() {
        0 => "0".to_owned(),
        1 => parts.into_iter().next().expect("one term"),
        _ => format!("(+ {})", parts.join(" ")),
    }
}

fn number(q: &Rational) -> String {
    let magnitude = q.abs();
    let body = if magnitude.is_integer() {
        magnitude.numer().to_string()
    } else {
        format!("(/ {} {})", magnitude.numer(), magnitude.denom())
    };
    if q.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_stl;

    #[test]
    fn worked_example_assertion() {
        let script = emit_smtlib(&parse_stl("G[2,3] F[0,1] (a >= 80)").unwrap());
        assert!(script.contains("(assert (and (or (>= a_2 80) (>= a_3 80)) (or (>= a_3 80) (>= a_4 80))))"));
        for t in 0..=4 {
            assert!(script.contains(&format!("(declare-const a_{t} Real)")));
        }
        assert!(!script.contains("a_5"));
        assert!(script.starts_with("(set-logic QF_LRA)\n"));
        assert!(script.ends_with("(check-sat)\n"));
    }

    #[test]
    fn truth_constant() {
        assert_eq!(emit_smtlib(&Formula::True), "(set-logic QF_LRA)\n(assert true)\n(check-sat)\n");
    }

    #[test]
    fn coefficients_and_fractions() {
        let script = emit_smtlib(&parse_stl("2*x - y > -1/2").unwrap());
        assert!(script.contains("(assert (> (+ (* 2 x_0) (- y_0)) (- (/ 1 2))))"));
    }

    #[test]
    fn output_is_deterministic() {
        let f = parse_stl("G[0,3] (x > 0 -> F[1,2] y == 1)").unwrap();
        assert_eq!(emit_smtlib(&f), emit_smtlib(&f));
    }
}
