//! Cut elimination for variable-pure Gentzen terms.

use std::fmt;

use crate::lang::{Conn, Formula, Quantifier};

use super::formset::{bin_opt, equiv, has_operand, join, remove_operands};
use super::purify::push;
use super::term::{GentzenTerm, QRule, Rule};
use super::{Gensym, GentzenError, Result};

/// Complexity of a topmost cut: letters plus quantifier prefixes of the cut
/// form set, then the rank. Ordered lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct CutMeasure {
    pub m: usize,
    pub n: usize,
}

impl fmt::Display for CutMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Colour {
    Atomic,
    And,
    Or,
    Quant(Quantifier),
}

fn colour(x: &Formula) -> Colour {
    match x {
        Formula::Bin(Conn::And, ..) => Colour::And,
        Formula::Bin(Conn::Or, ..) => Colour::Or,
        Formula::Quant(q, ..) => Colour::Quant(*q),
        _ => Colour::Atomic,
    }
}

fn weight(x: &Formula) -> usize {
    let mut n = 0;
    x.visit(&mut |b| {
        if matches!(b, Formula::Atom { .. } | Formula::Quant(..)) {
            n += 1;
        }
    });
    n
}

fn principal_formula(t: &GentzenTerm) -> Option<Formula> {
    let (k, x, body, ..) = t.as_quant()?;
    Some(Formula::quant(k.quantifier(), x.clone(), body.clone()))
}

/// Whether `f: U ⊢ X∨Z` introduces `x` by its last rule.
fn f_principal(x: &Formula, f: &GentzenTerm) -> bool {
    match (colour(x), &f.rule) {
        (Colour::Atomic, Rule::Id) => true,
        (Colour::And, Rule::And { y1, y2, .. }) => equiv(&Formula::and(y1.clone(), y2.clone()), x),
        (Colour::Quant(q), _) => match f.as_quant() {
            Some((k, ..)) if !k.is_left() && k.quantifier() == q => {
                equiv(&principal_formula(f).unwrap(), x)
            }
            _ => false,
        },
        _ => false,
    }
}

/// Whether `g: X∧Y ⊢ W` introduces `x` by its last rule.
fn g_principal(x: &Formula, g: &GentzenTerm) -> bool {
    match (colour(x), &g.rule) {
        (Colour::Or, Rule::Or { x1, x2, .. }) => equiv(&Formula::or(x1.clone(), x2.clone()), x),
        (Colour::Quant(q), _) => match g.as_quant() {
            Some((k, ..)) if k.is_left() && k.quantifier() == q => {
                equiv(&principal_formula(g).unwrap(), x)
            }
            _ => false,
        },
        _ => false,
    }
}

fn in_or(whole: &Option<Formula>, x: &Formula) -> bool {
    whole.as_ref().is_some_and(|w| has_operand(w, x, Conn::Or))
}

fn in_and(whole: &Option<Formula>, x: &Formula) -> bool {
    whole.as_ref().is_some_and(|w| has_operand(w, x, Conn::And))
}

/// Index of the premise of `f` whose target carries `x`.
fn f_side(x: &Formula, f: &GentzenTerm) -> Result<usize> {
    let found = match &f.rule {
        Rule::And { z1, .. } => Some(if in_or(z1, x) { 0 } else { 1 }),
        Rule::Or { f: a, .. } | Rule::Mix { f: a, .. } => {
            Some(if has_operand(&a.target, x, Conn::Or) {
                0
            } else {
                1
            })
        }
        Rule::AllL { .. } | Rule::AllR { .. } | Rule::ExL { .. } | Rule::ExR { .. } => Some(0),
        _ => None,
    };
    found.ok_or_else(|| GentzenError::Malformed(format!("cannot trace {x} through {f}")))
}

/// Index of the premise of `g` whose source carries `x`.
fn g_side(x: &Formula, g: &GentzenTerm) -> Result<usize> {
    let found = match &g.rule {
        Rule::Or { z1, .. } => Some(if in_and(z1, x) { 0 } else { 1 }),
        Rule::And { f: a, .. } | Rule::Mix { f: a, .. } => {
            Some(if has_operand(&a.source, x, Conn::And) {
                0
            } else {
                1
            })
        }
        Rule::AllL { .. } | Rule::AllR { .. } | Rule::ExL { .. } | Rule::ExR { .. } => Some(0),
        _ => None,
    };
    found.ok_or_else(|| GentzenError::Malformed(format!("cannot trace {x} through {g}")))
}

fn depth_f(x: &Formula, f: &GentzenTerm) -> Result<usize> {
    if f_principal(x, f) {
        return Ok(0);
    }
    let i = f_side(x, f)?;
    Ok(1 + depth_f(x, f.premises()[i])?)
}

fn depth_g(x: &Formula, g: &GentzenTerm) -> Result<usize> {
    if g_principal(x, g) {
        return Ok(0);
    }
    let i = g_side(x, g)?;
    Ok(1 + depth_g(x, g.premises()[i])?)
}

/// The complexity of `cut_x(f, g)`.
pub fn cut_measure(x: &Formula, f: &GentzenTerm, g: &GentzenTerm) -> Result<CutMeasure> {
    let n = match colour(x) {
        Colour::Atomic | Colour::And => depth_f(x, f)?,
        Colour::Or => depth_g(x, g)?,
        Colour::Quant(_) => depth_f(x, f)? + depth_g(x, g)?,
    };
    Ok(CutMeasure { m: weight(x), n })
}

fn rest(whole: &Formula, part: &Formula, op: Conn) -> Result<Option<Formula>> {
    remove_operands(whole, part, op)
        .ok_or_else(|| GentzenError::Malformed(format!("{part} is not an operand of {whole}")))
}

fn rest_opt(whole: &Option<Formula>, part: &Formula, op: Conn) -> Result<Option<Formula>> {
    match whole {
        Some(w) => rest(w, part, op),
        None => Err(GentzenError::Malformed(format!(
            "{part} is not in an empty context"
        ))),
    }
}

/// One (parent, child) step of the reduction, for checking descent.
pub type MeasureStep = (CutMeasure, CutMeasure);

struct Reducer<'a> {
    gs: &'a mut Gensym,
    trace: Vec<MeasureStep>,
}

impl Reducer<'_> {
    /// A cut-free term equal to `cut_x(f, g)` with contexts `z`, `y`, for
    /// cut-free `f` and `g`.
    fn cut(
        &mut self,
        x: Formula,
        z: Option<Formula>,
        y: Option<Formula>,
        f: GentzenTerm,
        g: GentzenTerm,
        parent: Option<CutMeasure>,
    ) -> Result<GentzenTerm> {
        // validates the premises
        let node = GentzenTerm::cut(x.clone(), z.clone(), y.clone(), f.clone(), g.clone())?;
        let mu = cut_measure(&x, &f, &g)?;
        if let Some(p) = parent {
            if mu >= p {
                return Err(GentzenError::Malformed(format!(
                    "cut measure {mu} does not descend from {p} at {node}"
                )));
            }
            self.trace.push((p, mu));
        }
        let out = match colour(&x) {
            Colour::Atomic if f_principal(&x, &f) => g,
            Colour::Atomic => self.permute_f(&x, z, y, f, g, mu)?,
            Colour::And if f_principal(&x, &f) => self.split_and(z, y, f, g, mu)?,
            Colour::And => self.permute_f(&x, z, y, f, g, mu)?,
            Colour::Or if g_principal(&x, &g) => self.split_or(z, y, f, g, mu)?,
            Colour::Or => self.permute_g(&x, z, y, f, g, mu)?,
            Colour::Quant(_) => {
                if f_principal(&x, &f) && g_principal(&x, &g) {
                    self.quant_principal(f, g, mu)?
                } else if !f_principal(&x, &f) {
                    self.permute_f(&x, z, y, f, g, mu)?
                } else {
                    self.permute_g(&x, z, y, f, g, mu)?
                }
            }
        };
        debug_assert!(equiv(&out.source, &node.source) && equiv(&out.target, &node.target));
        Ok(out)
    }

    fn split_and(
        &mut self,
        _z: Option<Formula>,
        y: Option<Formula>,
        f: GentzenTerm,
        g: GentzenTerm,
        mu: CutMeasure,
    ) -> Result<GentzenTerm> {
        let Rule::And {
            y1,
            y2,
            z1,
            z2,
            f: f1,
            g: f2,
        } = f.rule
        else {
            unreachable!()
        };
        let u2 = f2.source.clone();
        let h = self.cut(
            y2,
            z2,
            join(Conn::And, Some(y1.clone()), y.clone()),
            *f2,
            g,
            Some(mu),
        )?;
        self.cut(y1, z1, join(Conn::And, Some(u2), y), *f1, h, Some(mu))
    }

    fn split_or(
        &mut self,
        z: Option<Formula>,
        _y: Option<Formula>,
        f: GentzenTerm,
        g: GentzenTerm,
        mu: CutMeasure,
    ) -> Result<GentzenTerm> {
        let Rule::Or {
            x1,
            x2,
            z1,
            z2,
            f: g1,
            g: g2,
        } = g.rule
        else {
            unreachable!()
        };
        let w1 = g1.target.clone();
        let h = self.cut(
            x1,
            join(Conn::Or, Some(x2.clone()), z.clone()),
            z1,
            f,
            *g1,
            Some(mu),
        )?;
        self.cut(x2, join(Conn::Or, Some(w1), z), z2, h, *g2, Some(mu))
    }

    fn quant_principal(
        &mut self,
        f: GentzenTerm,
        g: GentzenTerm,
        mu: CutMeasure,
    ) -> Result<GentzenTerm> {
        let (_, x, body, v_f, zf, f1) = f.as_quant().expect("right rule");
        let (_, _, _, v_g, zg, g1) = g.as_quant().expect("left rule");
        let (zf, zg) = (zf.clone(), zg.clone());
        match &f.rule {
            Rule::AllR { .. } => {
                let inst = body
                    .subst(x, v_g)
                    .ok_or_else(|| GentzenError::Malformed(format!("({body})^{x}_{v_g}")))?;
                let f1 = push(v_f, v_g, f1, self.gs)?;
                self.cut(inst, zf, zg, f1, g1.clone(), Some(mu))
            }
            _ => {
                let inst = body
                    .subst(x, v_f)
                    .ok_or_else(|| GentzenError::Malformed(format!("({body})^{x}_{v_f}")))?;
                let g1 = push(v_g, v_f, g1, self.gs)?;
                self.cut(inst, zf, zg, f1.clone(), g1, Some(mu))
            }
        }
    }

    /// Premise of an eigenvariable rule with the eigenvariable renamed to
    /// a fresh one.
    fn refresh(
        &mut self,
        t: &GentzenTerm,
    ) -> Result<(
        QRule,
        crate::lang::Var,
        Formula,
        crate::lang::Var,
        Option<Formula>,
        GentzenTerm,
    )> {
        let (k, x, body, v, z, p) = t.as_quant().expect("quantifier rule");
        if k.is_eigen() {
            let w = self.gs.fresh();
            let p = push(v, &w, p, self.gs)?;
            Ok((k, x.clone(), body.clone(), w, z.clone(), p))
        } else {
            Ok((k, x.clone(), body.clone(), v.clone(), z.clone(), p.clone()))
        }
    }

    fn permute_f(
        &mut self,
        x: &Formula,
        _z: Option<Formula>,
        y: Option<Formula>,
        f: GentzenTerm,
        g: GentzenTerm,
        mu: CutMeasure,
    ) -> Result<GentzenTerm> {
        let w = g.target.clone();
        let side = f_side(x, &f)?;
        let m = Some(mu);
        match f.rule.clone() {
            Rule::And {
                y1,
                y2,
                z1,
                z2,
                f: f1,
                g: f2,
            } => {
                if side == 0 {
                    let r = rest_opt(&z1, x, Conn::Or)?;
                    let h = self.cut(
                        x.clone(),
                        join(Conn::Or, Some(y1.clone()), r.clone()),
                        y,
                        *f1,
                        g,
                        m,
                    )?;
                    GentzenTerm::and(y1, y2, join(Conn::Or, Some(w), r), z2, h, *f2)
                } else {
                    let r = rest_opt(&z2, x, Conn::Or)?;
                    let h = self.cut(
                        x.clone(),
                        join(Conn::Or, Some(y2.clone()), r.clone()),
                        y,
                        *f2,
                        g,
                        m,
                    )?;
                    GentzenTerm::and(y1, y2, z1, join(Conn::Or, Some(w), r), *f1, h)
                }
            }
            Rule::Or {
                x1,
                x2,
                z1,
                z2,
                f: f1,
                g: f2,
            } => {
                if side == 0 {
                    let h = self.cut(
                        x.clone(),
                        rest(&f1.target, x, Conn::Or)?,
                        y.clone(),
                        *f1,
                        g,
                        m,
                    )?;
                    GentzenTerm::or(x1, x2, join(Conn::And, z1, y), z2, h, *f2)
                } else {
                    let h = self.cut(
                        x.clone(),
                        rest(&f2.target, x, Conn::Or)?,
                        y.clone(),
                        *f2,
                        g,
                        m,
                    )?;
                    GentzenTerm::or(x1, x2, z1, join(Conn::And, z2, y), *f1, h)
                }
            }
            Rule::Mix { f: f1, g: f2 } => {
                if side == 0 {
                    let h = self.cut(x.clone(), rest(&f1.target, x, Conn::Or)?, y, *f1, g, m)?;
                    GentzenTerm::mix(h, *f2)
                } else {
                    let h = self.cut(x.clone(), rest(&f2.target, x, Conn::Or)?, y, *f2, g, m)?;
                    GentzenTerm::mix(*f1, h)
                }
            }
            Rule::Id | Rule::Cut { .. } | Rule::Ren { .. } => Err(GentzenError::Malformed(
                format!("unexpected premise {f} of a topmost cut"),
            )),
            _ => {
                let (k, qx, body, v, zc, p) = self.refresh(&f)?;
                if k.is_left() {
                    let h =
                        self.cut(x.clone(), rest(&p.target, x, Conn::Or)?, y.clone(), p, g, m)?;
                    GentzenTerm::quant(k, qx, body, v, join(Conn::And, zc, y), h)
                } else {
                    let r = rest_opt(&zc, x, Conn::Or)?;
                    let inst = p.target.clone();
                    let inst = rest(&inst, &bin_opt(Conn::Or, x.clone(), r.clone()), Conn::Or)?;
                    let h = self.cut(x.clone(), join(Conn::Or, inst, r.clone()), y, p, g, m)?;
                    GentzenTerm::quant(k, qx, body, v, join(Conn::Or, Some(w), r), h)
                }
            }
        }
    }

    fn permute_g(
        &mut self,
        x: &Formula,
        z: Option<Formula>,
        _y: Option<Formula>,
        f: GentzenTerm,
        g: GentzenTerm,
        mu: CutMeasure,
    ) -> Result<GentzenTerm> {
        let u = f.source.clone();
        let side = g_side(x, &g)?;
        let m = Some(mu);
        match g.rule.clone() {
            Rule::Or {
                x1,
                x2,
                z1,
                z2,
                f: g1,
                g: g2,
            } => {
                if side == 0 {
                    let r = rest_opt(&z1, x, Conn::And)?;
                    let h = self.cut(
                        x.clone(),
                        z,
                        join(Conn::And, Some(x1.clone()), r.clone()),
                        f,
                        *g1,
                        m,
                    )?;
                    GentzenTerm::or(x1, x2, join(Conn::And, Some(u), r), z2, h, *g2)
                } else {
                    let r = rest_opt(&z2, x, Conn::And)?;
                    let h = self.cut(
                        x.clone(),
                        z,
                        join(Conn::And, Some(x2.clone()), r.clone()),
                        f,
                        *g2,
                        m,
                    )?;
                    GentzenTerm::or(x1, x2, z1, join(Conn::And, Some(u), r), *g1, h)
                }
            }
            Rule::And {
                y1,
                y2,
                z1,
                z2,
                f: g1,
                g: g2,
            } => {
                if side == 0 {
                    let h = self.cut(
                        x.clone(),
                        z.clone(),
                        rest(&g1.source, x, Conn::And)?,
                        f,
                        *g1,
                        m,
                    )?;
                    GentzenTerm::and(y1, y2, join(Conn::Or, z1, z), z2, h, *g2)
                } else {
                    let h = self.cut(
                        x.clone(),
                        z.clone(),
                        rest(&g2.source, x, Conn::And)?,
                        f,
                        *g2,
                        m,
                    )?;
                    GentzenTerm::and(y1, y2, z1, join(Conn::Or, z2, z), *g1, h)
                }
            }
            Rule::Mix { f: g1, g: g2 } => {
                if side == 0 {
                    let h = self.cut(x.clone(), z, rest(&g1.source, x, Conn::And)?, f, *g1, m)?;
                    GentzenTerm::mix(h, *g2)
                } else {
                    let h = self.cut(x.clone(), z, rest(&g2.source, x, Conn::And)?, f, *g2, m)?;
                    GentzenTerm::mix(*g1, h)
                }
            }
            Rule::Id | Rule::Cut { .. } | Rule::Ren { .. } => Err(GentzenError::Malformed(
                format!("unexpected premise {g} of a topmost cut"),
            )),
            _ => {
                let (k, qx, body, v, zc, p) = self.refresh(&g)?;
                if k.is_left() {
                    let r = rest_opt(&zc, x, Conn::And)?;
                    let inst = rest(
                        &p.source,
                        &bin_opt(Conn::And, x.clone(), r.clone()),
                        Conn::And,
                    )?;
                    let h = self.cut(x.clone(), z, join(Conn::And, inst, r.clone()), f, p, m)?;
                    GentzenTerm::quant(k, qx, body, v, join(Conn::And, Some(u), r), h)
                } else {
                    let h = self.cut(
                        x.clone(),
                        z.clone(),
                        rest(&p.source, x, Conn::And)?,
                        f,
                        p,
                        m,
                    )?;
                    GentzenTerm::quant(k, qx, body, v, join(Conn::Or, zc, z), h)
                }
            }
        }
    }

    fn elim(&mut self, t: &GentzenTerm) -> Result<GentzenTerm> {
        match &t.rule {
            Rule::Id => Ok(t.clone()),
            Rule::Cut { cut, z, y, f, g } => {
                let f = self.elim(f)?;
                let g = self.elim(g)?;
                self.cut(cut.clone(), z.clone(), y.clone(), f, g, None)
            }
            Rule::Ren { x, y, f } => {
                let f = self.elim(f)?;
                push(x, y, &f, self.gs)
            }
            _ => {
                let ps = t
                    .premises()
                    .into_iter()
                    .map(|p| self.elim(p))
                    .collect::<Result<Vec<_>>>()?;
                t.with_premises(ps)
            }
        }
    }
}

/// A cut-free and renaming-free term equal to the variable-pure term `t`,
/// with the measure of every cut produced by a reduction step paired with
/// that of the cut it came from.
pub fn eliminate_cut_traced(t: &GentzenTerm) -> Result<(GentzenTerm, Vec<MeasureStep>)> {
    if !t.is_variable_pure() {
        return Err(GentzenError::NotVariablePure(t.sequent_string()));
    }
    let mut gs = Gensym::for_term(t);
    let mut r = Reducer {
        gs: &mut gs,
        trace: Vec::new(),
    };
    let out = r.elim(t)?;
    Ok((out, r.trace))
}

pub fn eliminate_cut(t: &GentzenTerm) -> Result<GentzenTerm> {
    eliminate_cut_traced(t).map(|(t, _)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrows::typecheck;
    use crate::gen::Generator;
    use crate::gentzen::{denote, denote_at, gentzenize, purify};
    use crate::graphs::{graph_eq, graph_of};
    use crate::lang::{parse_formula, var, SystemId};

    fn p(s: &str) -> Formula {
        parse_formula(s, SystemId::Qds).unwrap()
    }

    fn pipeline(sys: SystemId, seed: u64) {
        let mut gen = Generator::new(sys, seed).diversified().with_max_size(10);
        let f = gen.arrow(10);
        let ty = typecheck(&f, sys).unwrap();
        let gt = gentzenize(&f).unwrap();
        let (h2, core, h1) = purify(&gt).unwrap();
        let (out, trace) =
            eliminate_cut_traced(&core).unwrap_or_else(|e| panic!("seed {seed}: {f}\n{core}\n{e}"));
        assert!(out.is_cut_free() && out.is_renaming_free() && out.is_variable_pure());
        assert!(trace.iter().all(|(a, b)| b < a));
        assert!(equiv(&out.source, &core.source) && equiv(&out.target, &core.target));
        let d = denote_at(&out, &core.source, &core.target).unwrap();
        let whole = crate::gentzen::formset::seq(vec![h1, d, h2]);
        let whole = crate::gentzen::formset::seq(vec![
            crate::gentzen::ac_iso(&ty.source, &gt.source).unwrap(),
            whole,
            crate::gentzen::ac_iso(&gt.target, &ty.target).unwrap(),
        ]);
        typecheck(&denote(&out), sys).unwrap();
        assert!(
            graph_eq(&graph_of(&whole).unwrap(), &graph_of(&f).unwrap()),
            "seed {seed}: {f}\n{out}"
        );
    }

    #[test]
    fn cut_elimination_preserves_graphs() {
        for seed in 0..300 {
            pipeline(SystemId::Qds, seed);
            pipeline(SystemId::Qmds, seed);
        }
    }

    #[test]
    fn atomic_identity_cut() {
        let id = GentzenTerm::id(p("P")).unwrap();
        let c = GentzenTerm::cut(p("P"), None, None, id.clone(), id.clone()).unwrap();
        assert_eq!(eliminate_cut(&c).unwrap(), id);
    }

    #[test]
    fn quantifier_principal_cut_lowers_the_measure() {
        // cut_{∀xP(x)}(∀^R_{x,P(x)} 1_{P(u)}-from-∀yP(y), ∀^L_{x,P(x)} 1_{P(v)})
        let l = GentzenTerm::quant(
            QRule::AllL,
            var("y"),
            p("P(y)"),
            var("u"),
            None,
            GentzenTerm::id(p("P(u)")).unwrap(),
        )
        .unwrap();
        let f = GentzenTerm::quant(QRule::AllR, var("x"), p("P(x)"), var("u"), None, l).unwrap();
        let g = GentzenTerm::quant(
            QRule::AllL,
            var("x"),
            p("P(x)"),
            var("v"),
            None,
            GentzenTerm::id(p("P(v)")).unwrap(),
        )
        .unwrap();
        let c = GentzenTerm::cut(p("all x. P(x)"), None, None, f, g).unwrap();
        let (out, trace) = eliminate_cut_traced(&c).unwrap();
        assert_eq!(out.to_string(), "(allL y {P(y)} v (gid {P(v)}))");
        let steps = [
            CutMeasure { m: 2, n: 0 },
            CutMeasure { m: 1, n: 1 },
            CutMeasure { m: 1, n: 0 },
        ];
        assert_eq!(trace, vec![(steps[0], steps[1]), (steps[1], steps[2])]);
    }

    #[test]
    fn impure_terms_are_rejected() {
        let t = crate::gentzen::renaming_counterexample();
        assert!(matches!(
            eliminate_cut(&t),
            Err(GentzenError::NotVariablePure(_))
        ));
    }
}
