//! Satisfiability checking for discrete-time Signal Temporal Logic with
//! bounded temporal operators, by a one-pass tree-shaped tableau.

pub mod formula;
pub mod heuristics;
pub mod lra;
pub mod oracle;
pub mod random;
pub mod smt_export;
pub mod tableau;
pub mod witness;

pub use formula::{
    format, parse, parse_mltl, parse_requirements, parse_stl, Dialect, Formula, Interval, LinearConstraint, ParentInterval, Rational,
    Relation, Temporal, TemporalOp,
};
pub use tableau::{solve, Options, Stats, Status, Verdict};
pub use witness::Signal;
