//! Satisfying signals read off accepted branches.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::formula::{format_rational, Rational};
use crate::lra::check_consistent;
use crate::tableau::{is_poised, label_constraints, TableauNode};

/// Finite discrete-time signal; every variable has a value at every instant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signal {
    pub length: usize,
    pub vars: Vec<String>,
    pub values: Vec<BTreeMap<String, Rational>>,
}

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("branch is empty")]
    EmptyBranch,
    #[error("constraints of the poised node at time {0} are inconsistent")]
    Inconsistent(u64),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Signal {
    /// All-zero signal.
    pub fn zeros(vars: Vec<String>, length: usize) -> Self {
        let row: BTreeMap<String, Rational> = vars.iter().map(|v| (v.clone(), Rational::from_integer(0.into()))).collect();
        Signal {
            length,
            values: vec![row; length],
            vars,
        }
    }

    pub fn value(&self, var: &str, t: usize) -> Rational {
        self.values[t]
            .get(var)
            .cloned()
            .unwrap_or_else(|| Rational::from_integer(0.into()))
    }

    /// Copy extended with default rows up to `length` instants.
    pub fn padded(&self, length: usize) -> Self {
        let mut s = self.clone();
        if length > s.length {
            let row: BTreeMap<String, Rational> = s.vars.iter().map(|v| (v.clone(), Rational::from_integer(0.into()))).collect();
            s.values.resize(length, row);
            s.length = length;
        }
        s
    }

    /// Sets a value, registering the variable if it is new.
    pub fn set(&mut self, var: &str, t: usize, v: Rational) {
        if !self.vars.iter().any(|x| x == var) {
            self.vars.push(var.to_owned());
            self.vars.sort();
            for row in &mut self.values {
                row.insert(var.to_owned(), Rational::from_integer(0.into()));
            }
        }
        self.values[t].insert(var.to_owned(), v);
    }
}

/// Builds a signal from the models of the poised nodes' constraints; instants
/// skipped by a jump repeat the model from before the jump.
pub fn reconstruct(branch: &[TableauNode]) -> Result<Signal, WitnessError> {
    let root = branch.first().ok_or(WitnessError::EmptyBranch)?;
    let mut vars: Vec<String> = root.label.iter().flat_map(|f| f.variables()).collect();
    vars.sort();
    vars.dedup();
    let poised: Vec<&TableauNode> = branch.iter().filter(|u| is_poised(u)).collect();
    let length = poised.iter().map(|u| u.time).max().unwrap_or(0) as usize + 1;
    let mut signal = Signal::zeros(vars, length);
    for (i, u) in poised.iter().enumerate() {
        let result = check_consistent(&label_constraints(u));
        let model = result.model.ok_or(WitnessError::Inconsistent(u.time))?;
        let until = poised.get(i + 1).map_or(u.time + 1, |next| next.time);
        for t in u.time..until.max(u.time + 1) {
            for (var, v) in &model {
                signal.set(var, t as usize, v.clone());
            }
        }
    }
    Ok(signal)
}

/// CSV: header `time,<vars>`, then one row per instant.
pub fn write_trace(s: &Signal, sink: &mut dyn Write) -> io::Result<()> {
    let mut header = vec!["time".to_owned()];
    header.extend(s.vars.iter().cloned());
    writeln!(sink, "{}", header.join(","))?;
    for t in 0..s.length {
        let mut row = vec![t.to_string()];
        row.extend(s.vars.iter().map(|v| format_rational(&s.value(v, t))));
        writeln!(sink, "{}", row.join(","))?;
    }
    Ok(())
}

/// JSON: `{"length": n, "vars": [...], "rows": [[...], ...]}` with values as strings.
pub fn write_json(s: &Signal, sink: &mut dyn Write) -> io::Result<()> {
    let rows: Vec<Vec<String>> = (0..s.length)
        .map(|t| s.vars.iter().map(|v| format_rational(&s.value(v, t))).collect())
        .collect();
    let doc = serde_json::json!({
        "length": s.length,
        "vars": s.vars,
        "rows": rows,
    });
    serde_json::to_writer_pretty(&mut *sink, &doc)?;
    writeln!(sink)
}

/// Writes JSON for `.json` paths and CSV otherwise.
pub fn write_signal_file(s: &Signal, path: &Path) -> Result<(), WitnessError> {
    let mut file = io::BufWriter::new(std::fs::File::create(path)?);
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        write_json(s, &mut file)?;
    } else {
        write_trace(s, &mut file)?;
    }
    file.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::int;

    fn csv(s: &Signal) -> String {
        let mut out = Vec::new();
        write_trace(s, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn csv_rows() {
        let mut s = Signal::zeros(vec!["x".into()], 2);
        s.set("x", 0, int(6));
        s.set("x", 1, int(-1));
        assert_eq!(csv(&s), "time,x\n0,6\n1,-1\n");
    }

    #[test]
    fn csv_without_variables() {
        assert_eq!(csv(&Signal::zeros(vec![], 1)), "time\n0\n");
    }

    #[test]
    fn csv_fractions() {
        let mut s = Signal::zeros(vec!["x".into()], 1);
        s.set("x", 0, Rational::new(1.into(), 3.into()));
        assert_eq!(csv(&s), "time,x\n0,1/3\n");
    }

    #[test]
    fn json_layout() {
        let mut s = Signal::zeros(vec!["a".into(), "b".into()], 2);
        s.set("b", 1, Rational::new(1.into(), 2.into()));
        let mut out = Vec::new();
        write_json(&s, &mut out).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["length"], 2);
        assert_eq!(v["vars"], serde_json::json!(["a", "b"]));
        assert_eq!(v["rows"], serde_json::json!([["0", "0"], ["0", "0.5"]]));
    }
}
