//! Invertibility of ∀^R and ∃^L.

use crate::lang::{Conn, Formula, Quantifier, Var};

use super::cutelim::eliminate_cut;
use super::formset::{equiv, remove_operands, FormSet};
use super::term::{GentzenTerm, QRule};
use super::{Gensym, GentzenError, Result};

/// η-expanded identity whose eigenvariables are fresh, so that it is
/// variable-pure.
pub fn pure_id(a: &Formula, gs: &mut Gensym) -> Result<GentzenTerm> {
    Ok(match a {
        Formula::Atom { .. } => GentzenTerm::id(a.clone())?,
        Formula::Bin(Conn::And, l, r) => GentzenTerm::and(
            (**l).clone(),
            (**r).clone(),
            None,
            None,
            pure_id(l, gs)?,
            pure_id(r, gs)?,
        )?,
        Formula::Bin(Conn::Or, l, r) => GentzenTerm::or(
            (**l).clone(),
            (**r).clone(),
            None,
            None,
            pure_id(l, gs)?,
            pure_id(r, gs)?,
        )?,
        Formula::Quant(q, x, b) => {
            let v = gs.fresh();
            let inst = b
                .subst(x, &v)
                .ok_or_else(|| GentzenError::Malformed(format!("{v} not free for {x} in {b}")))?;
            let (inner, outer) = match q {
                Quantifier::All => (QRule::AllL, QRule::AllR),
                Quantifier::Ex => (QRule::ExR, QRule::ExL),
            };
            let p = GentzenTerm::quant(
                inner,
                x.clone(),
                (**b).clone(),
                v.clone(),
                None,
                pure_id(&inst, gs)?,
            )?;
            GentzenTerm::quant(outer, x.clone(), (**b).clone(), v, None, p)?
        }
        Formula::Neg(_) => return Err(GentzenError::Negation(a.to_string())),
    })
}

/// The side and connective where the principal formula of `kind` lives.
fn slot(kind: QRule) -> Result<(Quantifier, Conn)> {
    match kind {
        QRule::AllR => Ok((Quantifier::All, Conn::Or)),
        QRule::ExL => Ok((Quantifier::Ex, Conn::And)),
        _ => Err(GentzenError::Unsupported(format!(
            "inversion of {}",
            kind.name()
        ))),
    }
}

/// The first operand of the appropriate side that is a `kind` principal
/// formula.
fn find_principal(t: &GentzenTerm, kind: QRule) -> Result<Formula> {
    let (q, op) = slot(kind)?;
    let side = if kind.is_left() { &t.source } else { &t.target };
    FormSet::of(side)
        .operands(op)
        .into_iter()
        .find(|o| matches!(o, FormSet::Quant(k, ..) if *k == q))
        .map(|o| o.to_formula())
        .ok_or_else(|| {
            GentzenError::TargetShapeMismatch(format!(
                "no {} operand in {}",
                q.keyword(),
                t.sequent_string()
            ))
        })
}

/// A term f′ with `kind` applied to f′ denoting the same graph as `t`,
/// taking the first principal formula in canonical order.
pub fn invert_right(t: &GentzenTerm, kind: QRule) -> Result<(GentzenTerm, Var)> {
    let principal = find_principal(t, kind)?;
    invert_right_at(t, kind, &principal)
}

/// `invert_right` for a given principal formula, also returning the
/// eigenvariable to reapply the rule with. The premise of a matching
/// last rule is returned as is; otherwise f′ is a cut of `t` against
/// ∀^L_{x,X} 1 (resp. ∃^R_{x,X} 1) instantiated at a fresh variable, with
/// the cut eliminated.
pub fn invert_right_at(
    t: &GentzenTerm,
    kind: QRule,
    principal: &Formula,
) -> Result<(GentzenTerm, Var)> {
    let (q, op) = slot(kind)?;
    let (x, body) = match principal {
        Formula::Quant(k, x, b) if *k == q => (x, b),
        _ => {
            return Err(GentzenError::TargetShapeMismatch(format!(
                "{principal} is not a {} formula",
                q.keyword()
            )))
        }
    };
    if !t.is_variable_pure() {
        return Err(GentzenError::NotVariablePure(t.sequent_string()));
    }
    if let Some((k, y, b, v, _, premise)) = t.as_quant() {
        if k == kind && y == x && equiv(b, body) {
            return Ok((premise.clone(), v.clone()));
        }
    }
    let side = if kind.is_left() { &t.source } else { &t.target };
    let rest = remove_operands(side, principal, op).ok_or_else(|| {
        GentzenError::TargetShapeMismatch(format!("{principal} is not an operand of {side}"))
    })?;
    let mut gs = Gensym::for_term(t);
    let u = gs.fresh();
    let inst = body
        .subst(x, &u)
        .ok_or_else(|| GentzenError::Malformed(format!("{u} not free for {x}")))?;
    let cut = if kind.is_left() {
        let f = GentzenTerm::quant(
            QRule::ExR,
            x.clone(),
            (**body).clone(),
            u.clone(),
            None,
            pure_id(&inst, &mut gs)?,
        )?;
        GentzenTerm::cut(principal.clone(), None, rest, f, t.clone())?
    } else {
        let g = GentzenTerm::quant(
            QRule::AllL,
            x.clone(),
            (**body).clone(),
            u.clone(),
            None,
            pure_id(&inst, &mut gs)?,
        )?;
        GentzenTerm::cut(principal.clone(), rest, None, t.clone(), g)?
    };
    Ok((eliminate_cut(&cut)?, u))
}

/// `kind` applied to an inverse at the principal formula, the context
/// being the rest of the appropriate side of `t`.
pub fn reapply(
    t: &GentzenTerm,
    kind: QRule,
    principal: &Formula,
    premise: GentzenTerm,
    eigen: Var,
) -> Result<GentzenTerm> {
    let (_, op) = slot(kind)?;
    let Formula::Quant(_, x, body) = principal else {
        return Err(GentzenError::TargetShapeMismatch(principal.to_string()));
    };
    let side = if kind.is_left() { &t.source } else { &t.target };
    let rest = remove_operands(side, principal, op).ok_or_else(|| {
        GentzenError::TargetShapeMismatch(format!("{principal} is not an operand of {side}"))
    })?;
    GentzenTerm::quant(kind, x.clone(), (**body).clone(), eigen, rest, premise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::Generator;
    use crate::gentzen::{denote_at, gentzenize, purify};
    use crate::graphs::{graph_eq, graph_of};
    use crate::lang::{parse_formula, var, SystemId};

    fn p(s: &str) -> Formula {
        parse_formula(s, SystemId::Qds).unwrap()
    }

    fn same_graph(a: &GentzenTerm, b: &GentzenTerm) -> bool {
        let ga = graph_of(&denote_at(a, &a.source, &a.target).unwrap()).unwrap();
        let gb = graph_of(&denote_at(b, &a.source, &a.target).unwrap()).unwrap();
        graph_eq(&ga, &gb)
    }

    #[test]
    fn matching_last_rule_is_peeled() {
        let inner = GentzenTerm::quant(
            QRule::AllL,
            var("y"),
            p("P(y)"),
            var("u"),
            None,
            GentzenTerm::id(p("P(u)")).unwrap(),
        )
        .unwrap();
        let t = GentzenTerm::quant(
            QRule::AllR,
            var("x"),
            p("P(x)"),
            var("u"),
            None,
            inner.clone(),
        )
        .unwrap();
        assert_eq!(invert_right(&t, QRule::AllR).unwrap(), (inner, var("u")));
    }

    #[test]
    fn universal_operand_under_another_last_rule() {
        let mut gs = Gensym::new([var("x")]);
        let all = pure_id(&p("all x. P(x)"), &mut gs).unwrap();
        let t = GentzenTerm::or(
            p("all x. P(x)"),
            p("W"),
            None,
            None,
            all,
            GentzenTerm::id(p("W")).unwrap(),
        )
        .unwrap();
        let principal = p("all x. P(x)");
        let (inv, u) = invert_right(&t, QRule::AllR).unwrap();
        assert_eq!(
            inv.sequent_string(),
            format!("W | all x. P(x) |- P({u}) | W")
        );
        assert!(inv.is_cut_free());
        let back = reapply(&t, QRule::AllR, &principal, inv, u).unwrap();
        assert!(same_graph(&t, &back));
    }

    #[test]
    fn existential_operand_of_the_source() {
        let mut gs = Gensym::new([var("x")]);
        let ex = pure_id(&p("some x. P(x)"), &mut gs).unwrap();
        let t = GentzenTerm::and(
            p("some x. P(x)"),
            p("W"),
            None,
            None,
            ex,
            GentzenTerm::id(p("W")).unwrap(),
        )
        .unwrap();
        let (inv, u) = invert_right(&t, QRule::ExL).unwrap();
        assert_eq!(
            inv.sequent_string(),
            format!("P({u}) & W |- W & some x. P(x)")
        );
        let back = reapply(&t, QRule::ExL, &p("some x. P(x)"), inv, u).unwrap();
        assert!(same_graph(&t, &back));
    }

    #[test]
    fn inversion_preserves_graphs() {
        let mut done = 0;
        for sys in [SystemId::Qds, SystemId::Qmds] {
            for kind in [QRule::AllR, QRule::ExL] {
                for seed in 0..150 {
                    let mut g = Generator::new(sys, seed).diversified();
                    let f = g.arrow(8);
                    let Ok(gt) = gentzenize(&f) else { continue };
                    let (_, core, _) = purify(&gt).unwrap();
                    let Ok(principal) = find_principal(&core, kind) else {
                        continue;
                    };
                    let (inv, u) = invert_right_at(&core, kind, &principal).unwrap();
                    assert!(inv.is_variable_pure());
                    let back = reapply(&core, kind, &principal, inv, u).unwrap();
                    assert!(
                        same_graph(&core, &back),
                        "seed {seed}: {}",
                        core.sequent_string()
                    );
                    done += 1;
                }
            }
        }
        assert!(done > 50, "only {done} invertible instances");
    }

    #[test]
    fn shape_mismatch() {
        let t = GentzenTerm::id(p("P(x)")).unwrap();
        assert!(matches!(
            invert_right(&t, QRule::AllR),
            Err(GentzenError::TargetShapeMismatch(_))
        ));
        assert!(matches!(
            invert_right(&t, QRule::ExL),
            Err(GentzenError::TargetShapeMismatch(_))
        ));
    }
}
