//! Proof-term kernel for multiplicative linear first-order predicate logic.
//!
//! Arrow terms of the categories QDS, QMDS, QPN¬, QMPN¬, QPN and QMPN are
//! type-checked, mapped to Kelly-Mac Lane graphs, and compared by graph
//! equality, which the coherence theorems make a decision procedure for
//! equality of proofs. The [`gentzen`] module runs the normalization
//! pipelines over form sets and [`translate`] carries the negation normal
//! form functor.

pub mod arrows;
pub mod decide;
pub mod gen;
pub mod gentzen;
pub mod graphs;
pub mod lang;
pub mod par;
pub mod schemas;
pub mod translate;

pub use arrows::{Arrow, ArrowError, Dir, Sequent};
pub use decide::{decide_eq, Verdict};
pub use graphs::{graph_eq, graph_of, KmGraph};
pub use lang::{parse_formula, Formula, SystemId, Var};
