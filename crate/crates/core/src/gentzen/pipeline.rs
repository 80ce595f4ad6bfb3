//! The whole normalization route from an arrow term to a cut-free Gentzen
//! term, with the arrow that the result denotes at the input's type.

use super::formset::{fit, seq};
use super::{
    denote_at, eliminate_cut_traced, gentzenize, purify, GentzenTerm, MeasureStep, Result,
};
use crate::arrows::{typecheck, Arrow};
use crate::lang::SystemId;

/// Output of [`cut_free_form`].
#[derive(Clone, Debug)]
pub struct CutFree {
    /// The Gentzenized input.
    pub gentzen: GentzenTerm,
    /// Its variable-pure form.
    pub pure: GentzenTerm,
    /// The cut-free and renaming-free result.
    pub output: GentzenTerm,
    /// Measures of each reduced cut paired with those of the cuts it produced.
    pub trace: Vec<MeasureStep>,
    /// An arrow term of the input's type denoting the output up to the
    /// purification and form-set isomorphisms.
    pub denotation: Arrow,
}

/// Gentzenizes `f`, purifies, and eliminates renaming and cut.
pub fn cut_free_form(f: &Arrow, system: SystemId) -> Result<CutFree> {
    let ty = typecheck(f, system)?;
    let gentzen = gentzenize(f)?;
    let (h2, pure, h1) = purify(&gentzen)?;
    let (output, trace) = eliminate_cut_traced(&pure)?;
    let d = denote_at(&output, &pure.source, &pure.target)?;
    let denotation = seq(vec![
        fit(&ty.source, &gentzen.source),
        h1,
        d,
        h2,
        fit(&gentzen.target, &ty.target),
    ]);
    Ok(CutFree {
        gentzen,
        pure,
        output,
        trace,
        denotation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::Generator;
    use crate::graphs::{graph_eq, graph_of};

    #[test]
    fn denotation_has_input_type_and_graph() {
        for seed in 0..100 {
            let f = Generator::new(SystemId::Qds, seed)
                .diversified()
                .with_max_size(10)
                .arrow(10);
            let r = cut_free_form(&f, SystemId::Qds).unwrap();
            assert!(r.output.is_cut_free());
            assert_eq!(
                typecheck(&r.denotation, SystemId::Qds).unwrap(),
                typecheck(&f, SystemId::Qds).unwrap()
            );
            assert!(graph_eq(
                &graph_of(&r.denotation).unwrap(),
                &graph_of(&f).unwrap()
            ));
        }
    }
}
