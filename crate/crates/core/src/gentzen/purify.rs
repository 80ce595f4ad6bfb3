//! Variable purification and renaming elimination.

use std::collections::BTreeMap;

use crate::arrows::Arrow;
use crate::lang::{Formula, Var};

use super::formset::{quant_s, tensor_s};
use super::term::{change_bound, GentzenTerm, QRule, Rule};
use super::{Gensym, GentzenError, Result};

fn subst(a: &Formula, x: &Var, y: &Var) -> Result<Formula> {
    a.subst(x, y)
        .ok_or_else(|| GentzenError::Malformed(format!("({a})^{x}_{y} is not defined")))
}

fn subst_opt(a: &Option<Formula>, x: &Var, y: &Var) -> Result<Option<Formula>> {
    a.as_ref().map(|a| subst(a, x, y)).transpose()
}

/// Variables that participate both free and bound, in order of their first
/// binding occurrence.
fn conflicts(t: &GentzenTerm) -> Vec<Var> {
    let (free, _) = t.participating();
    let mut out: Vec<Var> = Vec::new();
    for s in t.subterms() {
        for a in [&s.source, &s.target] {
            a.visit(&mut |b| {
                if let Formula::Quant(_, x, _) = b {
                    if free.contains(x) && !out.contains(x) {
                        out.push(x.clone());
                    }
                }
            });
        }
    }
    out
}

/// Rename bound occurrences according to `m`, leaving free ones alone.
fn rename_bound(a: &Formula, m: &BTreeMap<Var, Var>) -> Formula {
    match a {
        Formula::Atom { .. } => a.clone(),
        Formula::Neg(b) => Formula::neg(rename_bound(b, m)),
        Formula::Bin(op, l, r) => Formula::bin(*op, rename_bound(l, m), rename_bound(r, m)),
        Formula::Quant(q, x, b) => match m.get(x) {
            Some(x2) => {
                let b2 = b.subst(x, x2).expect("fresh variables are never captured");
                Formula::quant(*q, x2.clone(), rename_bound(&b2, m))
            }
            None => Formula::quant(*q, x.clone(), rename_bound(b, m)),
        },
    }
}

fn rename_term(t: &GentzenTerm, m: &BTreeMap<Var, Var>) -> Result<GentzenTerm> {
    let r = |a: &Formula| rename_bound(a, m);
    let ro = |a: &Option<Formula>| a.as_ref().map(r);
    let ps = t
        .premises()
        .into_iter()
        .map(|p| rename_term(p, m))
        .collect::<Result<Vec<_>>>()?;
    let mut it = ps.into_iter();
    let mut next = || it.next().expect("premise");
    match &t.rule {
        Rule::Id => GentzenTerm::id(r(&t.source)),
        Rule::Cut { cut, z, y, .. } => GentzenTerm::cut(r(cut), ro(z), ro(y), next(), next()),
        Rule::And { y1, y2, z1, z2, .. } => {
            GentzenTerm::and(r(y1), r(y2), ro(z1), ro(z2), next(), next())
        }
        Rule::Or { x1, x2, z1, z2, .. } => {
            GentzenTerm::or(r(x1), r(x2), ro(z1), ro(z2), next(), next())
        }
        Rule::Ren { x, y, .. } => GentzenTerm::ren(x.clone(), y.clone(), next()),
        Rule::Mix { .. } => GentzenTerm::mix(next(), next()),
        _ => {
            let (k, x, body, v, z, _) = t.as_quant().expect("quantifier rule");
            let principal = r(&Formula::quant(k.quantifier(), x.clone(), body.clone()));
            let Formula::Quant(_, x2, body2) = principal else {
                unreachable!()
            };
            GentzenTerm::quant(k, x2, *body2, v.clone(), ro(z), next())
        }
    }
}

/// The τ-isomorphism between two formulas differing only in the names of
/// bound variables.
pub fn alpha_iso(a: &Formula, c: &Formula) -> Arrow {
    match (a, c) {
        (Formula::Bin(op, l, r), Formula::Bin(op2, l2, r2)) if op == op2 => {
            tensor_s(*op, alpha_iso(l, l2), alpha_iso(r, r2))
        }
        (Formula::Quant(q, x, b), Formula::Quant(q2, x2, d)) if q == q2 => {
            if x == x2 {
                quant_s(*q, x.clone(), alpha_iso(b, d))
            } else {
                let b2 = b.subst(x, x2).expect("fresh bound variable");
                let inner = quant_s(*q, x2.clone(), alpha_iso(&b2, d));
                super::formset::seq(vec![change_bound(*q, b, x, x, x2), inner])
            }
        }
        _ => Arrow::id(a.clone()),
    }
}

/// Variable purification: `(h2, core, h1)` with `core` variable-pure and
/// `h2∘denote(core)∘h1` equal to `denote(t)`. Only the variables that
/// participate both free and bound get fresh bound names.
pub fn purify(t: &GentzenTerm) -> Result<(Arrow, GentzenTerm, Arrow)> {
    if t.is_variable_pure() {
        return Ok((
            Arrow::id(t.target.clone()),
            t.clone(),
            Arrow::id(t.source.clone()),
        ));
    }
    let mut gs = Gensym::for_term(t);
    let m: BTreeMap<Var, Var> = conflicts(t).into_iter().map(|x| (x, gs.fresh())).collect();
    let core = rename_term(t, &m)?;
    let h1 = alpha_iso(&t.source, &core.source);
    let h2 = alpha_iso(&core.target, &t.target);
    Ok((h2, core, h1))
}

/// `[t]^x_y` with the renaming pushed to the leaves. Eigenvariables that
/// would clash are renamed to fresh ones on the way.
pub fn push(x: &Var, y: &Var, t: &GentzenTerm, gs: &mut Gensym) -> Result<GentzenTerm> {
    if x == y || !(t.source.is_free_in(x) || t.target.is_free_in(x)) {
        return Ok(t.clone());
    }
    let s = |a: &Formula| subst(a, x, y);
    let so = |a: &Option<Formula>| subst_opt(a, x, y);
    match &t.rule {
        Rule::Id => GentzenTerm::id(s(&t.source)?),
        Rule::Ren { x: a, y: b, f } => {
            let inner = push(a, b, f, gs)?;
            push(x, y, &inner, gs)
        }
        Rule::Cut {
            cut,
            z,
            y: yy,
            f,
            g,
        } => GentzenTerm::cut(
            s(cut)?,
            so(z)?,
            so(yy)?,
            push(x, y, f, gs)?,
            push(x, y, g, gs)?,
        ),
        Rule::And {
            y1,
            y2,
            z1,
            z2,
            f,
            g,
        } => GentzenTerm::and(
            s(y1)?,
            s(y2)?,
            so(z1)?,
            so(z2)?,
            push(x, y, f, gs)?,
            push(x, y, g, gs)?,
        ),
        Rule::Or {
            x1,
            x2,
            z1,
            z2,
            f,
            g,
        } => GentzenTerm::or(
            s(x1)?,
            s(x2)?,
            so(z1)?,
            so(z2)?,
            push(x, y, f, gs)?,
            push(x, y, g, gs)?,
        ),
        Rule::Mix { f, g } => GentzenTerm::mix(push(x, y, f, gs)?, push(x, y, g, gs)?),
        _ => {
            let (k, z, body, v, ctx, f) = t.as_quant().expect("quantifier rule");
            let principal = s(&Formula::quant(k.quantifier(), z.clone(), body.clone()))?;
            let Formula::Quant(_, _, body2) = principal else {
                unreachable!()
            };
            let (v2, f2) = if k.is_eigen() {
                if v == x || v == y {
                    let w = gs.fresh();
                    let f = push(v, &w, f, gs)?;
                    (w, f)
                } else {
                    (v.clone(), (*f).clone())
                }
            } else if v == x {
                (y.clone(), (*f).clone())
            } else {
                (v.clone(), (*f).clone())
            };
            GentzenTerm::quant(k, z.clone(), *body2, v2, so(ctx)?, push(x, y, &f2, gs)?)
        }
    }
}

/// A renaming-free term analogous to `t`, node for node, with the renaming
/// nodes removed.
pub fn eliminate_renaming(t: &GentzenTerm) -> Result<GentzenTerm> {
    if !t.is_variable_pure() {
        return Err(GentzenError::NotVariablePure(t.sequent_string()));
    }
    if !t.is_cut_free() {
        return Err(GentzenError::HasCut);
    }
    let mut gs = Gensym::for_term(t);
    elim(t, &mut gs)
}

fn elim(t: &GentzenTerm, gs: &mut Gensym) -> Result<GentzenTerm> {
    match &t.rule {
        Rule::Id => Ok(t.clone()),
        Rule::Ren { x, y, f } => {
            let f = elim(f, gs)?;
            push(x, y, &f, gs)
        }
        _ => {
            let ps = t
                .premises()
                .into_iter()
                .map(|p| elim(p, gs))
                .collect::<Result<Vec<_>>>()?;
            t.with_premises(ps)
        }
    }
}

/// Whether two terms differ only in indices, renaming nodes of `with_ren`
/// being skipped.
pub fn analogous(with_ren: &GentzenTerm, without: &GentzenTerm) -> bool {
    with_ren.skeleton() == without.skeleton()
}

/// [∀^L_{x,∀yR(x,y)} ∀^L_{y,R(u,y)} 1_{R(u,z)}]^u_y : ∀x∀yR(x,y) ⊢ R(y,z), a
/// cut-free term whose renaming cannot be eliminated without cut.
pub fn renaming_counterexample() -> GentzenTerm {
    let f =
        |s: &str| crate::lang::parse_formula(s, crate::lang::SystemId::Qds).expect("fixed formula");
    let v = crate::lang::var;
    let inner = GentzenTerm::id(f("R(u,z)")).expect("atomic");
    let l1 = GentzenTerm::quant(QRule::AllL, v("y"), f("R(u,y)"), v("z"), None, inner)
        .expect("well-formed");
    let l2 = GentzenTerm::quant(QRule::AllL, v("x"), f("all y. R(x,y)"), v("u"), None, l1)
        .expect("well-formed");
    GentzenTerm::ren(v("u"), v("y"), l2).expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_formula, var, SystemId};

    fn p(s: &str) -> Formula {
        parse_formula(s, SystemId::Qds).unwrap()
    }

    #[test]
    fn counterexample_is_rejected() {
        let t = renaming_counterexample();
        assert_eq!(t.sequent_string(), "all x. all y. R(x,y) |- R(y,z)");
        assert!(matches!(
            eliminate_renaming(&t),
            Err(GentzenError::NotVariablePure(_))
        ));
    }

    #[test]
    fn purification_renames_the_conflicting_binder() {
        let t = renaming_counterexample();
        let (_, core, _) = purify(&t).unwrap();
        assert!(core.is_variable_pure());
        assert_eq!(core.sequent_string(), "all x. all v$0. R(x,v$0) |- R(y,z)");
        let out = eliminate_renaming(&core).unwrap();
        assert!(out.is_renaming_free());
        assert!(analogous(&core, &out));
        assert_eq!(
            out.to_string(),
            "(allL x {all v$0. R(x,v$0)} y (allL v$0 {R(y,v$0)} z (gid {R(y,z)})))"
        );
    }

    #[test]
    fn eigenvariable_clash_gets_a_fresh_name() {
        let l = GentzenTerm::quant(
            QRule::AllL,
            var("y"),
            p("S(y)"),
            var("u"),
            None,
            GentzenTerm::id(p("S(u)")).unwrap(),
        );
        let m = GentzenTerm::mix(l.unwrap(), GentzenTerm::id(p("Q(w)")).unwrap()).unwrap();
        let r = GentzenTerm::quant(
            QRule::AllR,
            var("x"),
            p("S(x)"),
            var("u"),
            Some(p("Q(w)")),
            m,
        )
        .unwrap();
        let mut gs = Gensym::for_term(&r);
        let out = push(&var("w"), &var("u"), &r, &mut gs).unwrap();
        assert_eq!(
            out.sequent_string(),
            "Q(u) & all y. S(y) |- Q(u) | all x. S(x)"
        );
        let (_, _, _, eigen, _, _) = out.as_quant().unwrap();
        assert_eq!(eigen.name(), "v$0");
    }

    #[test]
    fn alpha_iso_types() {
        let a = p("all x. (some y. R(x,y) & S(x))");
        let c = p("all v. (some w. R(v,w) & S(v))");
        let f = alpha_iso(&a, &c);
        let ty = crate::arrows::infer(&f).unwrap();
        assert_eq!((ty.source, ty.target), (a, c));
    }
}
