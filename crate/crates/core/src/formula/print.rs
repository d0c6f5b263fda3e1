use num_traits::{One, Signed};

use super::{format_rational, Formula, LinearConstraint, Temporal};

/// Fully parenthesized concrete syntax accepted back by `parse_stl`.
pub fn format(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, false, &mut out);
    out
}

/// Like `format`, additionally showing marks (`*`) and parent intervals (`^[a,b]`).
pub fn format_label(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, true, &mut out);
    out
}

pub(crate) fn format_constraint(c: &LinearConstraint) -> String {
    let mut out = String::new();
    if c.terms.is_empty() {
        out.push('0');
    }
    for (i, (var, coef)) in c.terms.iter().enumerate() {
        let magnitude = coef.abs();
        if i == 0 {
            if coef.is_negative() {
                out.push('-');
            }
        } else if coef.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if !magnitude.is_one() {
            out.push_str(&format_rational(&magnitude));
            out.push('*');
        }
        out.push_str(var);
    }
    out.push(' ');
    out.push_str(c.relation.symbol());
    out.push(' ');
    out.push_str(&format_rational(&c.bound));
    out
}

fn write_formula(f: &Formula, decorated: bool, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        _ if f.is_false() => out.push_str("false"),
        Formula::Atom(c) => out.push_str(&format_constraint(c)),
        Formula::Not(a) => {
            out.push_str("!(");
            write_formula(a, decorated, out);
            out.push(')');
        }
        Formula::And(a, b) => write_infix(a, "&", b, decorated, out),
        Formula::Or(a, b) => write_infix(a, "|", b, decorated, out),
        Formula::Implies(a, b) => write_infix(a, "->", b, decorated, out),
        Formula::Temporal(t) => write_temporal(t, decorated, out),
    }
}

fn write_infix(a: &Formula, op: &str, b: &Formula, decorated: bool, out: &mut String) {
    out.push('(');
    write_formula(a, decorated, out);
    out.push_str(") ");
    out.push_str(op);
    out.push_str(" (");
    write_formula(b, decorated, out);
    out.push(')');
}

fn write_operator(t: &Temporal, decorated: bool, out: &mut String) {
    out.push_str(t.op.keyword());
    if decorated && t.marked {
        out.push('*');
    }
    out.push_str(&t.interval.to_string());
    if decorated {
        if let Some(p) = t.parent.0 {
            out.push('^');
            out.push_str(&p.to_string());
        }
    }
}

fn write_temporal(t: &Temporal, decorated: bool, out: &mut String) {
    match &t.left {
        None => {
            write_operator(t, decorated, out);
            out.push_str(" (");
            write_formula(&t.right, decorated, out);
            out.push(')');
        }
        Some(left) => {
            out.push('(');
            write_formula(left, decorated, out);
            out.push_str(") ");
            write_operator(t, decorated, out);
            out.push_str(" (");
            write_formula(&t.right, decorated, out);
            out.push(')');
        }
    }
}
