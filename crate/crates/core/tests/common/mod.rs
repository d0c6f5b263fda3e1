#![allow(dead_code)]

pub mod fm;

use stl_tableau::formula::horizon;
use stl_tableau::oracle::evaluate;
use stl_tableau::tableau::Verdict;
use stl_tableau::witness::reconstruct;
use stl_tableau::Formula;

/// True when the verdict has no branch or its reconstructed signal satisfies `f`.
pub fn witness_holds(f: &Formula, v: &Verdict) -> bool {
    let Some(branch) = &v.branch else { return true };
    let w = reconstruct(branch).expect("accepted branch has consistent poised nodes");
    let w = w.padded(horizon(f) as usize + 1);
    evaluate(f, &w, 0).expect("padded signal is long enough")
}
