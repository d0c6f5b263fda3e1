use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use super::delta::DeltaRational;
use crate::formula::{LinearConstraint, Rational, Relation};

struct Row {
    basic: usize,
    coeffs: BTreeMap<usize, Rational>,
}

/// Incremental general simplex over exact rationals. Strict bounds use
/// delta-rationals; pivoting follows Bland's rule.
#[derive(Default)]
pub struct Simplex {
    var_index: HashMap<String, usize>,
    names: Vec<String>,
    forms: HashMap<Vec<(usize, Rational)>, usize>,
    lower: Vec<Option<DeltaRational>>,
    upper: Vec<Option<DeltaRational>>,
    value: Vec<DeltaRational>,
    row_of: Vec<Option<usize>>,
    rows: Vec<Row>,
    conflict: bool,
}

impl Simplex {
    pub fn new() -> Self {
        Self::default()
    }

    fn new_var(&mut self) -> usize {
        self.lower.push(None);
        self.upper.push(None);
        self.value.push(DeltaRational::zero());
        self.row_of.push(None);
        self.lower.len() - 1
    }

    fn original(&mut self, name: &str) -> usize {
        if let Some(&i) = self.var_index.get(name) {
            return i;
        }
        let i = self.new_var();
        self.var_index.insert(name.to_owned(), i);
        self.names.push(name.to_owned());
        i
    }

    /// Adds a constraint. Disequalities are not supported here.
    pub fn assert_constraint(&mut self, c: &LinearConstraint) {
        assert!(c.relation != Relation::Neq, "disequalities must be split before the simplex");
        if let Some(truth) = c.ground_truth() {
            if !truth {
                self.conflict = true;
            }
            return;
        }
        let terms: Vec<(usize, Rational)> = c
            .terms
            .iter()
            .map(|(v, k)| (self.original(v), k.clone()))
            .collect();
        let lead = terms[0].1.clone();
        let var = if terms.len() == 1 {
            terms[0].0
        } else {
            let form: Vec<(usize, Rational)> = terms.iter().map(|(v, k)| (*v, k / &lead)).collect();
            self.slack_for(form)
        };
        let bound = &c.bound / &lead;
        let flipped = lead.is_negative();
        let strict = Rational::from_integer(if flipped { -1 } else { 1 }.into());
        match (c.relation, flipped) {
            (Relation::Gt, false) => self.assert_lower(var, DeltaRational::new(bound, strict)),
            (Relation::Gt, true) => self.assert_upper(var, DeltaRational::new(bound, strict)),
            (Relation::Ge, false) => self.assert_lower(var, DeltaRational::real(bound)),
            (Relation::Ge, true) => self.assert_upper(var, DeltaRational::real(bound)),
            (Relation::Eq, _) => {
                self.assert_lower(var, DeltaRational::real(bound.clone()));
                self.assert_upper(var, DeltaRational::real(bound));
            }
            (Relation::Neq, _) => unreachable!(),
        }
    }

    fn slack_for(&mut self, form: Vec<(usize, Rational)>) -> usize {
        if let Some(&s) = self.forms.get(&form) {
            return s;
        }
        let s = self.new_var();
        let mut coeffs: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, k) in &form {
            match self.row_of[*v] {
                Some(r) => {
                    for (w, a) in &self.rows[r].coeffs {
                        *coeffs.entry(*w).or_insert_with(Rational::zero) += k * a;
                    }
                }
                None => *coeffs.entry(*v).or_insert_with(Rational::zero) += k,
            }
        }
        coeffs.retain(|_, a| !a.is_zero());
        let mut value = DeltaRational::zero();
        for (w, a) in &coeffs {
            value = &value + &self.value[*w].scale(a);
        }
        self.value[s] = value;
        self.row_of[s] = Some(self.rows.len());
        self.rows.push(Row { basic: s, coeffs });
        self.forms.insert(form, s);
        s
    }

    fn assert_lower(&mut self, var: usize, bound: DeltaRational) {
        if self.lower[var].as_ref().is_some_and(|l| *l >= bound) {
            return;
        }
        if self.upper[var].as_ref().is_some_and(|u| *u < bound) {
            self.conflict = true;
        }
        if self.row_of[var].is_none() && self.value[var] < bound {
            self.update(var, bound.clone());
        }
        self.lower[var] = Some(bound);
    }

    fn assert_upper(&mut self, var: usize, bound: DeltaRational) {
        if self.upper[var].as_ref().is_some_and(|u| *u <= bound) {
            return;
        }
        if self.lower[var].as_ref().is_some_and(|l| *l > bound) {
            self.conflict = true;
        }
        if self.row_of[var].is_none() && self.value[var] > bound {
            self.update(var, bound.clone());
        }
        self.upper[var] = Some(bound);
    }

    fn update(&mut self, nonbasic: usize, v: DeltaRational) {
        let diff = &v - &self.value[nonbasic];
        for row in &self.rows {
            if let Some(a) = row.coeffs.get(&nonbasic) {
                self.value[row.basic] = &self.value[row.basic] + &diff.scale(a);
            }
        }
        self.value[nonbasic] = v;
    }

    fn below_lower(&self, var: usize) -> bool {
        self.lower[var].as_ref().is_some_and(|l| self.value[var] < *l)
    }

    fn above_upper(&self, var: usize) -> bool {
        self.upper[var].as_ref().is_some_and(|u| self.value[var] > *u)
    }

    fn can_increase(&self, var: usize) -> bool {
        self.upper[var].as_ref().is_none_or(|u| self.value[var] < *u)
    }

    fn can_decrease(&self, var: usize) -> bool {
        self.lower[var].as_ref().is_none_or(|l| self.value[var] > *l)
    }

    /// Decides feasibility of everything asserted so far.
    pub fn check(&mut self) -> bool {
        if self.conflict {
            return false;
        }
        loop {
            let violated = self
                .rows
                .iter()
                .enumerate()
                .filter(|(_, row)| self.below_lower(row.basic) || self.above_upper(row.basic))
                .min_by_key(|(_, row)| row.basic)
                .map(|(r, _)| r);
            let Some(r) = violated else {
                return true;
            };
            let basic = self.rows[r].basic;
            let increase = self.below_lower(basic);
            let entering = self.rows[r]
                .coeffs
                .iter()
                .find(|(&j, a)| {
                    let up = a.is_positive() == increase;
                    if up {
                        self.can_increase(j)
                    } else {
                        self.can_decrease(j)
                    }
                })
                .map(|(&j, _)| j);
            let Some(j) = entering else {
                self.conflict = true;
                return false;
            };
            let target = if increase {
                self.lower[basic].clone()
            } else {
                self.upper[basic].clone()
            }
            .expect("violated bound exists");
            self.pivot_and_update(r, j, target);
        }
    }

    fn pivot_and_update(&mut self, r: usize, j: usize, target: DeltaRational) {
        let basic = self.rows[r].basic;
        let a = self.rows[r].coeffs[&j].clone();
        let theta = (&target - &self.value[basic]).scale(&(Rational::one() / &a));
        self.value[basic] = target;
        self.value[j] = &self.value[j] + &theta;
        for (k, row) in self.rows.iter().enumerate() {
            if k != r {
                if let Some(c) = row.coeffs.get(&j) {
                    self.value[row.basic] = &self.value[row.basic] + &theta.scale(c);
                }
            }
        }
        self.pivot(r, j);
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let old_basic = self.rows[r].basic;
        let mut coeffs = std::mem::take(&mut self.rows[r].coeffs);
        let a = coeffs.remove(&j).expect("entering variable in row");
        let inv = Rational::one() / &a;
        let mut new_coeffs: BTreeMap<usize, Rational> = coeffs.into_iter().map(|(k, c)| (k, -c * &inv)).collect();
        new_coeffs.insert(old_basic, inv);
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            if let Some(c) = row.coeffs.remove(&j) {
                for (v, d) in &new_coeffs {
                    let entry = row.coeffs.entry(*v).or_insert_with(Rational::zero);
                    *entry += &c * d;
                    if entry.is_zero() {
                        row.coeffs.remove(v);
                    }
                }
            }
        }
        self.rows[r] = Row {
            basic: j,
            coeffs: new_coeffs,
        };
        self.row_of[old_basic] = None;
        self.row_of[j] = Some(r);
    }

    /// A concrete rational assignment to the original variables, valid after
    /// a successful `check`.
    pub fn model(&self) -> BTreeMap<String, Rational> {
        let mut eps = Rational::one();
        for var in 0..self.value.len() {
            let v = &self.value[var];
            if let Some(l) = &self.lower[var] {
                if l.real < v.real && l.delta > v.delta {
                    eps = eps.min((&v.real - &l.real) / (&l.delta - &v.delta));
                }
            }
            if let Some(u) = &self.upper[var] {
                if v.real < u.real && v.delta > u.delta {
                    eps = eps.min((&u.real - &v.real) / (&v.delta - &u.delta));
                }
            }
        }
        self.names
            .iter()
            .map(|name| {
                let i = self.var_index[name];
                (name.clone(), self.value[i].concretize(&eps))
            })
            .collect()
    }
}
