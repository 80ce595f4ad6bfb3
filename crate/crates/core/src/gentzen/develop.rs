//! Development: factorizing an arrow term into headed factors after a
//! 1-term, with renaming only on ι heads.

use crate::arrows::{infer, typecheck, Arrow};
use crate::lang::{Formula, Letter, SystemId, Var};

use super::cutelim::eliminate_cut;
use super::formset::{ac_iso, seq};
use super::purify::purify;
use super::term::{denote_at, gentzenize};
use super::{GentzenError, Result};

/// What a composition-free term is, if it is a factor at all.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FactorKind {
    /// A 1-term: built from identities only.
    Unit,
    /// A β-term with exactly one primitive head.
    Headed,
}

/// Classifies a composition-free term as a 1-term or a β-term.
pub fn factor_kind(f: &Arrow) -> Option<FactorKind> {
    match f {
        Arrow::Id(_) => Some(FactorKind::Unit),
        Arrow::Comp(..) => None,
        Arrow::Tensor(_, l, r) => match (&**l, &**r) {
            (Arrow::Id(_), g) | (g, Arrow::Id(_)) => factor_kind(g),
            _ => None,
        },
        Arrow::Quant(_, _, g) | Arrow::Ren(_, _, g) => factor_kind(g),
        _ => Some(FactorKind::Headed),
    }
}

/// The factors of `f` in the order they apply, with nested compositions
/// flattened.
pub fn factor_list(f: &Arrow) -> Vec<&Arrow> {
    match f {
        Arrow::Comp(g, h) => {
            let mut out = factor_list(h);
            out.extend(factor_list(g));
            out
        }
        _ => vec![f],
    }
}

/// Every factor is headed or a 1-term.
pub fn is_headed(f: &Arrow) -> bool {
    factor_list(f).into_iter().all(|g| factor_kind(g).is_some())
}

/// The first factor is a 1-term and every later one is headed.
pub fn is_developed(f: &Arrow) -> bool {
    let fs = factor_list(f);
    factor_kind(fs[0]) == Some(FactorKind::Unit)
        && fs[1..]
            .iter()
            .all(|g| factor_kind(g) == Some(FactorKind::Headed))
}

/// Renaming occurs only as [ι^{Qx}_A]^x_y with x ≠ y free in A.
pub fn renaming_only_on_iota(f: &Arrow) -> bool {
    match f {
        Arrow::Ren(x, y, g) => {
            matches!(&**g, Arrow::Iota(_, z, a) if z == x && x != y && a.is_free_in(x))
        }
        _ => f.children().into_iter().all(renaming_only_on_iota),
    }
}

/// `[φ]^x_y` for a factor φ, with the renaming pushed to the head. `None`
/// when it cannot be pushed.
fn ren_factor(x: &Var, y: &Var, phi: Arrow) -> Option<Arrow> {
    let ty = infer(&phi).ok()?;
    if x == y || !(ty.source.is_free_in(x) || ty.target.is_free_in(x)) {
        return Some(phi);
    }
    match phi {
        Arrow::Tensor(op, l, r) => Some(Arrow::tensor(
            op,
            ren_factor(x, y, *l)?,
            ren_factor(x, y, *r)?,
        )),
        Arrow::Quant(q, z, g) if z != *x && z != *y => {
            Some(Arrow::quant(q, z, ren_factor(x, y, *g)?))
        }
        Arrow::Quant(..) | Arrow::Comp(..) => None,
        Arrow::Ren(a, b, g) => match ren_factor(&a, &b, *g)? {
            Arrow::Ren(..) => None,
            inner => ren_factor(x, y, inner),
        },
        Arrow::Iota(_, ref z, ref a) if z == x && a.is_free_in(x) => {
            Some(Arrow::ren(x.clone(), y.clone(), phi))
        }
        prim => prim.subst_primitive(x, y),
    }
}

/// Factors of `f` in application order, or `None` when a renaming cannot
/// be pushed to the heads.
fn factors(f: &Arrow) -> Option<Vec<Arrow>> {
    Some(match f {
        Arrow::Id(_) => Vec::new(),
        Arrow::Comp(g, h) => {
            let mut out = factors(h)?;
            out.extend(factors(g)?);
            out
        }
        Arrow::Tensor(op, l, r) => {
            let tl = infer(l).ok()?;
            let tr = infer(r).ok()?;
            let mut out: Vec<Arrow> = factors(l)?
                .into_iter()
                .map(|p| Arrow::tensor(*op, p, Arrow::id(tr.source.clone())))
                .collect();
            out.extend(
                factors(r)?
                    .into_iter()
                    .map(|p| Arrow::tensor(*op, Arrow::id(tl.target.clone()), p)),
            );
            out
        }
        Arrow::Quant(q, x, g) => factors(g)?
            .into_iter()
            .map(|p| Arrow::quant(*q, x.clone(), p))
            .collect(),
        Arrow::Ren(x, y, g) => factors(g)?
            .into_iter()
            .map(|p| ren_factor(x, y, p))
            .collect::<Option<_>>()?,
        prim => vec![prim.clone()],
    })
}

fn assemble(source: &Formula, fs: Vec<Arrow>) -> Arrow {
    let mut all: Vec<Arrow> = fs.into_iter().rev().collect();
    all.push(Arrow::id(source.clone()));
    Arrow::chain(all)
}

/// Replaces the letters of `a` in order by those of `labels`.
fn relabel_atoms(a: &Formula, labels: &mut impl Iterator<Item = Letter>) -> Formula {
    match a {
        Formula::Atom { args, .. } => Formula::Atom {
            letter: labels.next().expect("label per atom"),
            args: args.clone(),
        },
        Formula::Neg(b) => Formula::neg(relabel_atoms(b, labels)),
        Formula::Bin(op, l, r) => {
            let l = relabel_atoms(l, labels);
            Formula::bin(*op, l, relabel_atoms(r, labels))
        }
        Formula::Quant(q, x, b) => Formula::quant(*q, x.clone(), relabel_atoms(b, labels)),
    }
}

/// A copy of `f` whose source atoms carry the letters `src`, traced through
/// the term; also returns the target letters. For QDS and QMDS terms every
/// link crosses sides, so the source labels determine all others.
fn relabel(f: &Arrow, src: &[Letter]) -> Result<(Arrow, Vec<Letter>)> {
    use Arrow::*;
    let out = match f {
        Comp(g, h) => {
            let (h, mid) = relabel(h, src)?;
            let (g, tgt) = relabel(g, &mid)?;
            return Ok((Arrow::comp(g, h), tgt));
        }
        Tensor(op, l, r) => {
            let k = infer(l)?.source.atom_count();
            let (l, mut tl) = relabel(l, &src[..k])?;
            let (r, tr) = relabel(r, &src[k..])?;
            tl.extend(tr);
            return Ok((Arrow::tensor(*op, l, r), tl));
        }
        Quant(q, x, g) => {
            let (g, t) = relabel(g, src)?;
            return Ok((Arrow::quant(*q, x.clone(), g), t));
        }
        Ren(x, y, g) => {
            let (g, t) = relabel(g, src)?;
            return Ok((Arrow::ren(x.clone(), y.clone(), g), t));
        }
        CCheck(a, b) => {
            let nb = b.atom_count();
            let mut it = src[nb..].iter().chain(&src[..nb]).cloned();
            let a = relabel_atoms(a, &mut it);
            CCheck(a, relabel_atoms(b, &mut it))
        }
        DeltaAll(..) | SigmaEx(..) => {
            return Err(GentzenError::Unsupported(format!(
                "{f} outside QDS and QMDS"
            )))
        }
        prim => relabel_indices(prim.clone(), src),
    };
    let tgt = infer(&out)?.target.letters();
    Ok((out, tgt))
}

/// Relabels the indices of a primitive left to right, which is the order of
/// its source atoms for every primitive but č.
fn relabel_indices(prim: Arrow, src: &[Letter]) -> Arrow {
    let mut it = src.iter().cloned();
    let mut m = |a: &Formula| relabel_atoms(a, &mut it);
    use Arrow::*;
    match prim {
        Id(a) => Id(m(&a)),
        BHat(d, a, b, c) => {
            let (a, b) = (m(&a), m(&b));
            BHat(d, a, b, m(&c))
        }
        BCheck(d, a, b, c) => {
            let (a, b) = (m(&a), m(&b));
            BCheck(d, a, b, m(&c))
        }
        CHat(a, b) => {
            let a = m(&a);
            CHat(a, m(&b))
        }
        D(a, b, c) => {
            let (a, b) = (m(&a), m(&b));
            D(a, b, m(&c))
        }
        Iota(q, x, a) => Iota(q, x, m(&a)),
        Gamma(q, x, a) => Gamma(q, x, m(&a)),
        ThetaAllR(x, a, d) => {
            let a = m(&a);
            ThetaAllR(x, a, m(&d))
        }
        ThetaExL(x, a, d) => {
            let a = m(&a);
            ThetaExL(x, a, m(&d))
        }
        Mix(a, b) => {
            let a = m(&a);
            Mix(a, m(&b))
        }
        other => other,
    }
}

/// A developed arrow term equal to `f`: its first factor is a 1-term, the
/// others are headed, and renaming survives only as [ι^{Qx}_A]^x_y.
/// Renamings that cannot be pushed to the heads are removed by passing
/// through a diversified copy, Gentzen terms, purification and cut
/// elimination.
pub fn develop(f: &Arrow, system: SystemId) -> Result<Arrow> {
    if system.has_xi() {
        return Err(GentzenError::Unsupported(format!(
            "development in {}",
            system.name()
        )));
    }
    let ty = typecheck(f, system)?;
    if let Some(fs) = factors(f) {
        return Ok(assemble(&ty.source, fs));
    }
    let labels: Vec<Letter> = (0..ty.source.atom_count())
        .map(|k| Letter::new(format!("L{k}")))
        .collect();
    let original = ty.source.letters();
    let back = |l: &Letter| {
        let k: usize = l.name()[1..].parse().expect("relabeling letter");
        original[k].clone()
    };
    let (fd, _) = relabel(f, &labels)?;
    let td = infer(&fd)?;
    let gt = gentzenize(&fd)?;
    let (h2, core, h1) = purify(&gt)?;
    let out = eliminate_cut(&core)?;
    let whole = seq(vec![
        ac_iso(&td.source, &gt.source)
            .ok_or_else(|| GentzenError::Malformed("source fit".into()))?,
        h1,
        denote_at(&out, &core.source, &core.target)?,
        h2,
        ac_iso(&gt.target, &td.target)
            .ok_or_else(|| GentzenError::Malformed("target fit".into()))?,
    ]);
    let fs = factors(&whole)
        .ok_or_else(|| GentzenError::Malformed(format!("renaming left in {whole}")))?;
    let fs = fs
        .into_iter()
        .map(|g| g.map_formulas(&|a: &Formula| a.map_letters(&back)))
        .collect();
    Ok(assemble(&ty.source, fs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrows::parse_arrow;
    use crate::gen::Generator;
    use crate::graphs::{graph_eq, graph_of};
    use crate::lang::{parse_formula, var};

    fn p(s: &str) -> Formula {
        parse_formula(s, SystemId::Qds).unwrap()
    }

    fn check(f: &Arrow, sys: SystemId) -> Arrow {
        let d = develop(f, sys).unwrap_or_else(|e| panic!("{f}: {e}"));
        assert_eq!(
            typecheck(&d, sys).unwrap(),
            typecheck(f, sys).unwrap(),
            "{f}"
        );
        assert!(
            graph_eq(&graph_of(&d).unwrap(), &graph_of(f).unwrap()),
            "{f}\n{d}"
        );
        assert!(is_developed(&d), "{d}");
        assert!(renaming_only_on_iota(&d), "{d}");
        d
    }

    #[test]
    fn identity_develops_to_itself() {
        let f = Arrow::id(p("P(x) & Q"));
        assert_eq!(check(&f, SystemId::Qds), f);
    }

    #[test]
    fn tensor_splits_into_two_headed_factors() {
        let f = Arrow::and(
            Arrow::CHat(p("P"), p("Q")),
            Arrow::Iota(crate::lang::Quantifier::All, var("x"), p("S(x)")),
        );
        let d = check(&f, SystemId::Qds);
        assert_eq!(
            d.to_string(),
            "(comp (and (id {Q & P}) (iota-all x {S(x)})) (comp (and (chat {P} {Q}) (id {all x. S(x)})) (id {(P & Q) & all x. S(x)})))"
        );
    }

    #[test]
    fn developed_input_is_unchanged() {
        let f = Arrow::and(
            Arrow::CHat(p("P"), p("Q")),
            Arrow::Iota(crate::lang::Quantifier::All, var("x"), p("S(x)")),
        );
        let d = develop(&f, SystemId::Qds).unwrap();
        assert_eq!(develop(&d, SystemId::Qds).unwrap(), d);
    }

    #[test]
    fn renaming_that_cannot_be_pushed_goes_through_gentzen_terms() {
        // The middle formula ∃yR(x,y) has no renaming of x to y.
        let f = parse_arrow(
            "(ren x y (comp (iota-ex x {some y. R(x,y)}) (iota-ex y {R(x,y)})))",
            SystemId::Qds,
        )
        .unwrap();
        assert_eq!(
            typecheck(&f, SystemId::Qds).unwrap().to_string(),
            "R(y,y) |- some x. some y. R(x,y)"
        );
        assert!(factors(&f).is_none());
        let d = check(&f, SystemId::Qds);
        assert!(d.contains(&|g| matches!(g, Arrow::Ren(..))));
    }

    #[test]
    fn random_terms_develop() {
        let mut routed = 0;
        for sys in [SystemId::Qds, SystemId::Qmds] {
            for seed in 0..300 {
                let mut g = Generator::new(sys, seed).with_max_size(10);
                let f = g.arrow(10);
                check(&f, sys);
                let (x, y) = (g.var(), g.var());
                let r = Arrow::ren(x, y, f);
                if typecheck(&r, sys).is_ok() {
                    if factors(&r).is_none() {
                        routed += 1;
                    }
                    check(&r, sys);
                }
            }
        }
        assert!(routed > 0);
    }
}
