//! Form sets, Gentzen terms of GQDS and GQMDS, their denotation, and the
//! normalization algorithms: Gentzenization, variable purification,
//! renaming elimination, cut elimination, eigendiversification, cluster
//! analysis and development.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::arrows::ArrowError;
use crate::lang::Var;

mod clusters;
mod cutelim;
mod develop;
pub(crate) mod formset;
mod invert;
mod pipeline;
pub(crate) mod purify;
mod random;
mod term;

pub use clusters::{
    compute_clusters, couples_of, eigendiversify, is_eigendiversified, occurrences, Arc, Binding,
    Bridge, Cluster, ClusterReport, Couple, Gate, Occ, Side,
};
pub use cutelim::{cut_measure, eliminate_cut, eliminate_cut_traced, CutMeasure, MeasureStep};
pub use develop::{
    develop, factor_kind, factor_list, is_developed, is_headed, renaming_only_on_iota, FactorKind,
};
pub use formset::{ac_iso, canon_form_set, equiv, normalize, FormSet};
pub use invert::{invert_right, invert_right_at, pure_id, reapply};
pub use pipeline::{cut_free_form, CutFree};
pub use purify::{alpha_iso, analogous, eliminate_renaming, purify, push, renaming_counterexample};
pub use random::{random_cut_free, GentzenGen, BOUND_VARS, FREE_VARS};
pub use term::{
    denote, denote_at, gentzen_id, gentzenize, parse_gentzen, GentzenTerm, QRule, Rule,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GentzenError {
    #[error("not diversified: {0}")]
    NotDiversified(String),
    #[error("negation is outside the form-set language: {0}")]
    Negation(String),
    #[error("term is not variable-pure: {0}")]
    NotVariablePure(String),
    #[error("term contains a cut")]
    HasCut,
    #[error("term contains a renaming")]
    HasRenaming,
    #[error("target shape mismatch: {0}")]
    TargetShapeMismatch(String),
    #[error("malformed Gentzen term: {0}")]
    Malformed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Arrow(#[from] ArrowError),
}

pub type Result<T> = std::result::Result<T, GentzenError>;

/// Source of fresh variables `v$k`, new for every name it was seeded with.
#[derive(Clone, Debug, Default)]
pub struct Gensym {
    used: BTreeSet<Var>,
    next: usize,
}

impl Gensym {
    pub fn new(used: impl IntoIterator<Item = Var>) -> Gensym {
        Gensym {
            used: used.into_iter().collect(),
            next: 0,
        }
    }

    /// Seeded with every variable of `t`.
    pub fn for_term(t: &GentzenTerm) -> Gensym {
        Gensym::new(t.all_vars())
    }

    pub fn reserve(&mut self, v: &Var) {
        self.used.insert(v.clone());
    }

    pub fn fresh(&mut self) -> Var {
        loop {
            let v = Var::new(format!("v${}", self.next));
            self.next += 1;
            if self.used.insert(v.clone()) {
                return v;
            }
        }
    }
}
