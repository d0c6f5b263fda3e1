use super::OracleError;
use crate::formula::{horizon, Formula, TemporalOp};
use crate::witness::Signal;

/// Truth of `f` at time `t` under the discrete-time semantics.
pub fn evaluate(f: &Formula, w: &Signal, t: u64) -> Result<bool, OracleError> {
    let needed = t + horizon(f) + 1;
    if (w.length as u64) < needed {
        return Err(OracleError::SignalTooShort {
            needed,
            length: w.length as u64,
        });
    }
    Ok(holds(f, w, t))
}

fn holds(f: &Formula, w: &Signal, t: u64) -> bool {
    match f {
        Formula::True => true,
        Formula::Atom(c) => c.holds(&w.values[t as usize]),
        Formula::Not(a) => !holds(a, w, t),
        Formula::Or(a, b) => holds(a, w, t) || holds(b, w, t),
        Formula::And(a, b) => holds(a, w, t) && holds(b, w, t),
        Formula::Implies(a, b) => !holds(a, w, t) || holds(b, w, t),
        Formula::Temporal(op) => {
            let window = t + op.lo()..=t + op.hi();
            let right = |s: u64| holds(&op.right, w, s);
            let left = |s: u64| holds(op.left.as_deref().expect("binary operator"), w, s);
            match op.op {
                TemporalOp::F => window.into_iter().any(right),
                TemporalOp::G => window.into_iter().all(right),
                TemporalOp::U => window.into_iter().any(|s| right(s) && (t..=s).all(left)),
                TemporalOp::R => window.into_iter().all(|s| right(s) || (t..=s).any(left)),
                TemporalOp::SU => window
                    .into_iter()
                    .any(|s| right(s) && (t + op.lo()..s).all(left)),
                TemporalOp::SR => window
                    .into_iter()
                    .all(|s| right(s) || (t + op.lo()..s).any(left)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{int, parse_stl};

    fn signal(var: &str, values: &[i64]) -> Signal {
        let mut s = Signal::zeros(vec![var.into()], values.len());
        for (t, v) in values.iter().enumerate() {
            s.set(var, t, int(*v));
        }
        s
    }

    #[test]
    fn jump_example_signal() {
        let mut vals = vec![6; 11];
        vals.push(-1);
        let w = signal("x", &vals);
        let f = parse_stl("G[0,10] x > 5 & F[0,11] x < 0").unwrap();
        assert_eq!(evaluate(&f, &w, 0), Ok(true));
    }

    #[test]
    fn true_everywhere() {
        let w = signal("x", &[0, 0]);
        assert_eq!(evaluate(&Formula::True, &w, 1), Ok(true));
    }

    #[test]
    fn nothing_reaches_threshold() {
        let w = signal("a", &[79; 71]);
        let f = parse_stl("G[3,50] F[5,20] a >= 80").unwrap();
        assert_eq!(evaluate(&f, &w, 0), Ok(false));
    }

    #[test]
    fn short_signal_is_an_error() {
        let w = signal("x", &[1, 2]);
        let f = parse_stl("F[0,2] x > 0").unwrap();
        assert_eq!(evaluate(&f, &w, 0), Err(OracleError::SignalTooShort { needed: 3, length: 2 }));
    }

    #[test]
    fn until_variants_differ_on_the_prefix() {
        // a holds at 0..=1 only, b holds at 2 only.
        let mut w = Signal::zeros(vec!["a".into(), "b".into()], 4);
        w.set("a", 0, int(1));
        w.set("a", 1, int(1));
        w.set("b", 2, int(1));
        let at = |s: &str| evaluate(&parse_stl(s).unwrap(), &w, 0).unwrap();
        assert!(!at("(a == 1) U[2,3] (b == 1)"));
        assert!(at("(a == 1) sU[2,3] (b == 1)"));
        assert!(at("(a == 1) sU[1,3] (b == 1)"));
        assert!(!at("(a == 1) sU[3,3] (b == 1)"));
        assert!(at("(a == 1) U[1,2] (a == 1)"));
        assert!(at("(b == 1) sR[0,1] (a == 1)"));
        assert!(!at("(b == 1) sR[0,2] (a == 1)"));
        assert!(at("(b == 1) R[0,3] (a == 1)"));
        assert!(!at("(b == 1) sR[0,3] (a == 1)"));
    }
}
