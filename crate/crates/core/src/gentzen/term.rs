//! Gentzen terms, their denotation as arrow terms, Gentzenization of arrow
//! terms and the s-expression syntax.

use std::collections::BTreeSet;
use std::fmt;

use crate::arrows::{d_r, infer, tau, Arrow, ArrowError, SexpCursor, SexpTok};
use crate::lang::{Conn, Formula, Grammar, Quantifier, SystemId, Var};

use super::formset::{bin_opt, equiv, fit, seq, tensor_s, FormSet};
use super::{GentzenError, Result};

/// One inference of GQDS or GQMDS. Premises are boxed subterms; optional
/// formulas are context slots.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Rule {
    /// 1_X for atomic X.
    Id,
    /// f: U ⊢ X∨Z, g: X∧Y ⊢ W give U∧Y ⊢ W∨Z.
    Cut {
        cut: Formula,
        z: Option<Formula>,
        y: Option<Formula>,
        f: Box<GentzenTerm>,
        g: Box<GentzenTerm>,
    },
    /// f: U1 ⊢ Y1∨Z1, g: U2 ⊢ Y2∨Z2 give U1∧U2 ⊢ (Y1∧Y2)∨Z1∨Z2.
    And {
        y1: Formula,
        y2: Formula,
        z1: Option<Formula>,
        z2: Option<Formula>,
        f: Box<GentzenTerm>,
        g: Box<GentzenTerm>,
    },
    /// f: X1∧Z1 ⊢ U1, g: X2∧Z2 ⊢ U2 give (X1∨X2)∧Z1∧Z2 ⊢ U1∨U2.
    Or {
        x1: Formula,
        x2: Formula,
        z1: Option<Formula>,
        z2: Option<Formula>,
        f: Box<GentzenTerm>,
        g: Box<GentzenTerm>,
    },
    /// f: X^x_y∧Z ⊢ U gives ∀xX∧Z ⊢ U.
    AllL {
        x: Var,
        body: Formula,
        y: Var,
        z: Option<Formula>,
        f: Box<GentzenTerm>,
    },
    /// f: U ⊢ X^x_u∨Z gives U ⊢ ∀xX∨Z, u not free in the conclusion.
    AllR {
        x: Var,
        body: Formula,
        u: Var,
        z: Option<Formula>,
        f: Box<GentzenTerm>,
    },
    /// f: X^x_u∧Z ⊢ U gives ∃xX∧Z ⊢ U, u not free in the conclusion.
    ExL {
        x: Var,
        body: Formula,
        u: Var,
        z: Option<Formula>,
        f: Box<GentzenTerm>,
    },
    /// f: U ⊢ X^x_y∨Z gives U ⊢ ∃xX∨Z.
    ExR {
        x: Var,
        body: Formula,
        y: Var,
        z: Option<Formula>,
        f: Box<GentzenTerm>,
    },
    /// [f]^x_y.
    Ren { x: Var, y: Var, f: Box<GentzenTerm> },
    /// f: U ⊢ X, g: Y ⊢ W give U∧Y ⊢ X∨W.
    Mix {
        f: Box<GentzenTerm>,
        g: Box<GentzenTerm>,
    },
}

/// Rule, bound variable, body, instance variable, extra variable and premise
/// of a quantifier rule.
pub type QuantFields<'a> = (
    QRule,
    &'a Var,
    &'a Formula,
    &'a Var,
    &'a Option<Formula>,
    &'a GentzenTerm,
);

/// A Gentzen term with its sequent. `source` and `target` are
/// representatives of the form sets of the sequent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GentzenTerm {
    pub rule: Rule,
    pub source: Formula,
    pub target: Formula,
}

fn malformed(msg: String) -> GentzenError {
    GentzenError::Malformed(msg)
}

fn expect_equiv(what: &str, have: &Formula, want: &Formula) -> Result<()> {
    if equiv(have, want) {
        Ok(())
    } else {
        Err(malformed(format!("{what}: {have} is not {want}")))
    }
}

fn subst(a: &Formula, x: &Var, y: &Var) -> Result<Formula> {
    a.subst(x, y)
        .ok_or_else(|| malformed(format!("({a})^{x}_{y} is not defined")))
}

/// The quantifier rules, which share their shape.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum QRule {
    AllL,
    AllR,
    ExL,
    ExR,
}

impl QRule {
    pub fn quantifier(self) -> Quantifier {
        match self {
            QRule::AllL | QRule::AllR => Quantifier::All,
            QRule::ExL | QRule::ExR => Quantifier::Ex,
        }
    }

    /// Whether the principal formula is in the source.
    pub fn is_left(self) -> bool {
        matches!(self, QRule::AllL | QRule::ExL)
    }

    /// Whether the variable is an eigenvariable.
    pub fn is_eigen(self) -> bool {
        matches!(self, QRule::AllR | QRule::ExL)
    }

    pub fn name(self) -> &'static str {
        match self {
            QRule::AllL => "allL",
            QRule::AllR => "allR",
            QRule::ExL => "exL",
            QRule::ExR => "exR",
        }
    }
}

impl GentzenTerm {
    pub fn id(a: Formula) -> Result<GentzenTerm> {
        if !a.is_atom() {
            return Err(malformed(format!("identity on non-atomic {a}")));
        }
        Ok(GentzenTerm {
            rule: Rule::Id,
            source: a.clone(),
            target: a,
        })
    }

    pub fn cut(
        cut: Formula,
        z: Option<Formula>,
        y: Option<Formula>,
        f: GentzenTerm,
        g: GentzenTerm,
    ) -> Result<GentzenTerm> {
        expect_equiv(
            "cut left premise target",
            &f.target,
            &bin_opt(Conn::Or, cut.clone(), z.clone()),
        )?;
        expect_equiv(
            "cut right premise source",
            &g.source,
            &bin_opt(Conn::And, cut.clone(), y.clone()),
        )?;
        let source = bin_opt(Conn::And, f.source.clone(), y.clone());
        let target = bin_opt(Conn::Or, g.target.clone(), z.clone());
        Ok(GentzenTerm {
            rule: Rule::Cut {
                cut,
                z,
                y,
                f: Box::new(f),
                g: Box::new(g),
            },
            source,
            target,
        })
    }

    pub fn and(
        y1: Formula,
        y2: Formula,
        z1: Option<Formula>,
        z2: Option<Formula>,
        f: GentzenTerm,
        g: GentzenTerm,
    ) -> Result<GentzenTerm> {
        expect_equiv(
            "∧ left premise",
            &f.target,
            &bin_opt(Conn::Or, y1.clone(), z1.clone()),
        )?;
        expect_equiv(
            "∧ right premise",
            &g.target,
            &bin_opt(Conn::Or, y2.clone(), z2.clone()),
        )?;
        let source = Formula::and(f.source.clone(), g.source.clone());
        let core = Formula::and(y1.clone(), y2.clone());
        let target = bin_opt(Conn::Or, bin_opt(Conn::Or, core, z1.clone()), z2.clone());
        Ok(GentzenTerm {
            rule: Rule::And {
                y1,
                y2,
                z1,
                z2,
                f: Box::new(f),
                g: Box::new(g),
            },
            source,
            target,
        })
    }

    pub fn or(
        x1: Formula,
        x2: Formula,
        z1: Option<Formula>,
        z2: Option<Formula>,
        f: GentzenTerm,
        g: GentzenTerm,
    ) -> Result<GentzenTerm> {
        expect_equiv(
            "∨ left premise",
            &f.source,
            &bin_opt(Conn::And, x1.clone(), z1.clone()),
        )?;
        expect_equiv(
            "∨ right premise",
            &g.source,
            &bin_opt(Conn::And, x2.clone(), z2.clone()),
        )?;
        let core = Formula::or(x1.clone(), x2.clone());
        let source = bin_opt(Conn::And, bin_opt(Conn::And, core, z1.clone()), z2.clone());
        let target = Formula::or(f.target.clone(), g.target.clone());
        Ok(GentzenTerm {
            rule: Rule::Or {
                x1,
                x2,
                z1,
                z2,
                f: Box::new(f),
                g: Box::new(g),
            },
            source,
            target,
        })
    }

    /// A quantifier rule; `v` is the instantiating variable or eigenvariable.
    pub fn quant(
        kind: QRule,
        x: Var,
        body: Formula,
        v: Var,
        z: Option<Formula>,
        f: GentzenTerm,
    ) -> Result<GentzenTerm> {
        let inst = subst(&body, &x, &v)?;
        let principal = Formula::quant(kind.quantifier(), x.clone(), body.clone());
        let (source, target) = if kind.is_left() {
            expect_equiv(
                "left quantifier premise",
                &f.source,
                &bin_opt(Conn::And, inst, z.clone()),
            )?;
            (bin_opt(Conn::And, principal, z.clone()), f.target.clone())
        } else {
            expect_equiv(
                "right quantifier premise",
                &f.target,
                &bin_opt(Conn::Or, inst, z.clone()),
            )?;
            (f.source.clone(), bin_opt(Conn::Or, principal, z.clone()))
        };
        if kind.is_eigen() && (source.is_free_in(&v) || target.is_free_in(&v)) {
            return Err(malformed(format!(
                "eigenvariable {v} is free in {source} |- {target}"
            )));
        }
        let f = Box::new(f);
        let rule = match kind {
            QRule::AllL => Rule::AllL {
                x,
                body,
                y: v,
                z,
                f,
            },
            QRule::AllR => Rule::AllR {
                x,
                body,
                u: v,
                z,
                f,
            },
            QRule::ExL => Rule::ExL {
                x,
                body,
                u: v,
                z,
                f,
            },
            QRule::ExR => Rule::ExR {
                x,
                body,
                y: v,
                z,
                f,
            },
        };
        Ok(GentzenTerm {
            rule,
            source,
            target,
        })
    }

    pub fn ren(x: Var, y: Var, f: GentzenTerm) -> Result<GentzenTerm> {
        let source = subst(&f.source, &x, &y)?;
        let target = subst(&f.target, &x, &y)?;
        Ok(GentzenTerm {
            rule: Rule::Ren {
                x,
                y,
                f: Box::new(f),
            },
            source,
            target,
        })
    }

    pub fn mix(f: GentzenTerm, g: GentzenTerm) -> Result<GentzenTerm> {
        let source = Formula::and(f.source.clone(), g.source.clone());
        let target = Formula::or(f.target.clone(), g.target.clone());
        Ok(GentzenTerm {
            rule: Rule::Mix {
                f: Box::new(f),
                g: Box::new(g),
            },
            source,
            target,
        })
    }

    /// The fields of a quantifier rule.
    pub fn as_quant(&self) -> Option<QuantFields<'_>> {
        Some(match &self.rule {
            Rule::AllL { x, body, y, z, f } => (QRule::AllL, x, body, y, z, f),
            Rule::AllR { x, body, u, z, f } => (QRule::AllR, x, body, u, z, f),
            Rule::ExL { x, body, u, z, f } => (QRule::ExL, x, body, u, z, f),
            Rule::ExR { x, body, y, z, f } => (QRule::ExR, x, body, y, z, f),
            _ => return None,
        })
    }

    pub fn premises(&self) -> Vec<&GentzenTerm> {
        match &self.rule {
            Rule::Id => vec![],
            Rule::Cut { f, g, .. }
            | Rule::And { f, g, .. }
            | Rule::Or { f, g, .. }
            | Rule::Mix { f, g } => vec![f, g],
            Rule::AllL { f, .. }
            | Rule::AllR { f, .. }
            | Rule::ExL { f, .. }
            | Rule::ExR { f, .. }
            | Rule::Ren { f, .. } => {
                vec![f]
            }
        }
    }

    /// Rebuild this node over new premises, keeping every index.
    pub fn with_premises(&self, ps: Vec<GentzenTerm>) -> Result<GentzenTerm> {
        let mut it = ps.into_iter();
        let mut next = || it.next().ok_or_else(|| malformed("missing premise".into()));
        match &self.rule {
            Rule::Id => Ok(self.clone()),
            Rule::Cut { cut, z, y, .. } => {
                GentzenTerm::cut(cut.clone(), z.clone(), y.clone(), next()?, next()?)
            }
            Rule::And { y1, y2, z1, z2, .. } => GentzenTerm::and(
                y1.clone(),
                y2.clone(),
                z1.clone(),
                z2.clone(),
                next()?,
                next()?,
            ),
            Rule::Or { x1, x2, z1, z2, .. } => GentzenTerm::or(
                x1.clone(),
                x2.clone(),
                z1.clone(),
                z2.clone(),
                next()?,
                next()?,
            ),
            Rule::Ren { x, y, .. } => GentzenTerm::ren(x.clone(), y.clone(), next()?),
            Rule::Mix { .. } => GentzenTerm::mix(next()?, next()?),
            _ => {
                let (k, x, body, v, z, _) = self.as_quant().expect("quantifier rule");
                GentzenTerm::quant(k, x.clone(), body.clone(), v.clone(), z.clone(), next()?)
            }
        }
    }

    /// Every subterm, this one first.
    pub fn subterms(&self) -> Vec<&GentzenTerm> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let t = out[i];
            out.extend(t.premises());
            i += 1;
        }
        out
    }

    /// Subterms with their paths (premise indices from the root), in
    /// preorder.
    pub fn subterms_with_paths(&self) -> Vec<(Vec<usize>, &GentzenTerm)> {
        let mut out = Vec::new();
        fn go<'a>(
            t: &'a GentzenTerm,
            path: &mut Vec<usize>,
            out: &mut Vec<(Vec<usize>, &'a GentzenTerm)>,
        ) {
            out.push((path.clone(), t));
            for (k, p) in t.premises().into_iter().enumerate() {
                path.push(k);
                go(p, path, out);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn is_cut_free(&self) -> bool {
        self.subterms()
            .iter()
            .all(|t| !matches!(t.rule, Rule::Cut { .. }))
    }

    pub fn is_renaming_free(&self) -> bool {
        self.subterms()
            .iter()
            .all(|t| !matches!(t.rule, Rule::Ren { .. }))
    }

    pub fn uses_mix(&self) -> bool {
        self.subterms()
            .iter()
            .any(|t| matches!(t.rule, Rule::Mix { .. }))
    }

    /// Variables free, resp. bound, in the type of some subterm.
    pub fn participating(&self) -> (BTreeSet<Var>, BTreeSet<Var>) {
        let mut free = BTreeSet::new();
        let mut bound = BTreeSet::new();
        for t in self.subterms() {
            for a in [&t.source, &t.target] {
                free.extend(a.free_vars());
                bound.extend(a.bound_vars());
            }
        }
        (free, bound)
    }

    /// No variable participates both free and bound.
    pub fn is_variable_pure(&self) -> bool {
        let (free, bound) = self.participating();
        free.is_disjoint(&bound)
    }

    /// Every variable name in the term, including renaming indices.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for t in self.subterms() {
            out.extend(t.source.all_vars());
            out.extend(t.target.all_vars());
            match &t.rule {
                Rule::Ren { x, y, .. } => {
                    out.insert(x.clone());
                    out.insert(y.clone());
                }
                _ => {
                    if let Some((_, x, body, v, _, _)) = t.as_quant() {
                        out.insert(x.clone());
                        out.insert(v.clone());
                        out.extend(body.all_vars());
                    }
                }
            }
        }
        out
    }

    /// The shape of the term with indices dropped and renaming nodes
    /// skipped.
    pub fn skeleton(&self) -> String {
        let kids = |t: &GentzenTerm| {
            t.premises()
                .iter()
                .map(|p| p.skeleton())
                .collect::<Vec<_>>()
                .join(" ")
        };
        match &self.rule {
            Rule::Ren { f, .. } => f.skeleton(),
            Rule::Id => "id".into(),
            Rule::Cut { .. } => format!("(cut {})", kids(self)),
            Rule::And { .. } => format!("(gand {})", kids(self)),
            Rule::Or { .. } => format!("(gor {})", kids(self)),
            Rule::Mix { .. } => format!("(gmix {})", kids(self)),
            _ => format!(
                "({} {})",
                self.as_quant().expect("quantifier rule").0.name(),
                kids(self)
            ),
        }
    }

    /// The sequent with canonical form-set printing.
    pub fn sequent_string(&self) -> String {
        format!(
            "{} |- {}",
            FormSet::of(&self.source),
            FormSet::of(&self.target)
        )
    }
}

/// The arrow term denoted by `t`, of type exactly `t.source ⊢ t.target`.
pub fn denote(t: &GentzenTerm) -> Arrow {
    let id = |a: &Formula| Arrow::id(a.clone());
    match &t.rule {
        Rule::Id => id(&t.source),
        Rule::Cut { cut, z, y, f, g } => {
            let f1 = seq(vec![
                denote(f),
                fit(&f.target, &bin_opt(Conn::Or, cut.clone(), z.clone())),
            ]);
            let g1 = seq(vec![
                fit(&bin_opt(Conn::And, cut.clone(), y.clone()), &g.source),
                denote(g),
            ]);
            match (z, y) {
                (None, None) => seq(vec![f1, g1]),
                (Some(z), None) => seq(vec![f1, tensor_s(Conn::Or, g1, id(z))]),
                (None, Some(y)) => seq(vec![tensor_s(Conn::And, f1, id(y)), g1]),
                (Some(z), Some(y)) => {
                    let xy = Formula::and(cut.clone(), y.clone());
                    seq(vec![
                        tensor_s(Conn::And, f1, id(y)),
                        tensor_s(Conn::And, Arrow::CCheck(z.clone(), cut.clone()), id(y)),
                        d_r(z, cut, y),
                        Arrow::CCheck(xy, z.clone()),
                        tensor_s(Conn::Or, g1, id(z)),
                    ])
                }
            }
        }
        Rule::And {
            y1,
            y2,
            z1,
            z2,
            f,
            g,
        } => {
            let t1 = bin_opt(Conn::Or, y1.clone(), z1.clone());
            let t2 = bin_opt(Conn::Or, y2.clone(), z2.clone());
            let f1 = seq(vec![denote(f), fit(&f.target, &t1)]);
            let g1 = seq(vec![denote(g), fit(&g.target, &t2)]);
            let shuffle = match (z1, z2) {
                (None, None) => id(&Formula::and(t1.clone(), t2.clone())),
                (Some(z1), None) => seq(vec![
                    Arrow::CHat(t1.clone(), y2.clone()),
                    Arrow::D(y2.clone(), y1.clone(), z1.clone()),
                    tensor_s(Conn::Or, Arrow::CHat(y2.clone(), y1.clone()), id(z1)),
                ]),
                (None, Some(z2)) => Arrow::D(y1.clone(), y2.clone(), z2.clone()),
                (Some(z1), Some(z2)) => {
                    let mid = Formula::or(
                        z1.clone(),
                        Formula::or(Formula::and(y1.clone(), y2.clone()), z2.clone()),
                    );
                    seq(vec![
                        tensor_s(Conn::And, Arrow::CCheck(z1.clone(), y1.clone()), id(&t2)),
                        d_r(z1, y1, &t2),
                        tensor_s(
                            Conn::Or,
                            id(z1),
                            Arrow::D(y1.clone(), y2.clone(), z2.clone()),
                        ),
                        fit(&mid, &t.target),
                    ])
                }
            };
            seq(vec![tensor_s(Conn::And, f1, g1), shuffle])
        }
        Rule::Or {
            x1,
            x2,
            z1,
            z2,
            f,
            g,
        } => {
            let s1 = bin_opt(Conn::And, x1.clone(), z1.clone());
            let s2 = bin_opt(Conn::And, x2.clone(), z2.clone());
            let f1 = seq(vec![fit(&s1, &f.source), denote(f)]);
            let g1 = seq(vec![fit(&s2, &g.source), denote(g)]);
            let x12 = Formula::or(x1.clone(), x2.clone());
            let left = |z1: &Formula| {
                seq(vec![
                    Arrow::CHat(x12.clone(), z1.clone()),
                    Arrow::D(z1.clone(), x1.clone(), x2.clone()),
                    tensor_s(Conn::Or, Arrow::CHat(z1.clone(), x1.clone()), id(x2)),
                ])
            };
            let shuffle = match (z1, z2) {
                (None, None) => id(&x12),
                (Some(z1), None) => left(z1),
                (None, Some(z2)) => d_r(x1, x2, z2),
                (Some(z1), Some(z2)) => seq(vec![
                    tensor_s(Conn::And, left(z1), id(z2)),
                    d_r(&s1, x2, z2),
                ]),
            };
            seq(vec![shuffle, tensor_s(Conn::Or, f1, g1)])
        }
        Rule::Ren { x, y, f } => Arrow::ren(x.clone(), y.clone(), denote(f)),
        Rule::Mix { f, g } => seq(vec![
            Arrow::Mix(f.source.clone(), g.source.clone()),
            tensor_s(Conn::Or, denote(f), denote(g)),
        ]),
        _ => denote_quant(t),
    }
}

/// [ι^{Qx}_X]^x_y, or ι itself when y is x.
fn renamed_iota(q: Quantifier, x: &Var, body: &Formula, y: &Var) -> Arrow {
    let iota = Arrow::Iota(q, x.clone(), body.clone());
    if x == y {
        iota
    } else {
        Arrow::ren(x.clone(), y.clone(), iota)
    }
}

fn denote_quant(t: &GentzenTerm) -> Arrow {
    let (kind, x, body, v, z, f) = t.as_quant().expect("quantifier rule");
    let id = |a: &Formula| Arrow::id(a.clone());
    let q = kind.quantifier();
    let inst = body.subst(x, v).expect("checked at construction");
    match kind {
        QRule::AllL => {
            let prem = bin_opt(Conn::And, inst, z.clone());
            let head = renamed_iota(q, x, body, v);
            let head = match z {
                Some(z) => tensor_s(Conn::And, head, id(z)),
                None => head,
            };
            seq(vec![head, fit(&prem, &f.source), denote(f)])
        }
        QRule::ExR => {
            let prem = bin_opt(Conn::Or, inst, z.clone());
            let head = renamed_iota(q, x, body, v);
            let head = match z {
                Some(z) => tensor_s(Conn::Or, head, id(z)),
                None => head,
            };
            seq(vec![denote(f), fit(&f.target, &prem), head])
        }
        QRule::AllR => {
            // (τ ∨ 1_Z)∘θ̌^{∀u→}_{X^x_u,Z}∘∀_u f∘γ^{∀u}_U
            let prem = bin_opt(Conn::Or, inst.clone(), z.clone());
            let inner = seq(vec![denote(f), fit(&f.target, &prem)]);
            let tau = change_bound(q, body, x, v, x);
            let mut steps = vec![
                Arrow::Gamma(q, v.clone(), f.source.clone()),
                Arrow::quant(q, v.clone(), inner),
            ];
            match z {
                Some(z) => {
                    steps.push(Arrow::ThetaAllR(v.clone(), inst, z.clone()));
                    steps.push(tensor_s(Conn::Or, tau, id(z)));
                }
                None => steps.push(tau),
            }
            seq(steps)
        }
        QRule::ExL => {
            // γ^{∃u}_U∘∃_u f∘θ̂^{∃u←}_{X^x_u,Z}∘(τ ∧ 1_Z)
            let prem = bin_opt(Conn::And, inst.clone(), z.clone());
            let inner = seq(vec![fit(&prem, &f.source), denote(f)]);
            let tau = change_bound(q, body, x, x, v);
            let mut steps = Vec::new();
            match z {
                Some(z) => {
                    steps.push(tensor_s(Conn::And, tau, id(z)));
                    steps.push(Arrow::ThetaExL(v.clone(), inst, z.clone()));
                }
                None => steps.push(tau),
            }
            steps.push(Arrow::quant(q, v.clone(), inner));
            steps.push(Arrow::Gamma(q, v.clone(), f.target.clone()));
            seq(steps)
        }
    }
}

/// τ^{Q}_{X,a,b}: Q_a X^x_a ⊢ Q_b X^x_b, the identity when a is b.
pub(crate) fn change_bound(q: Quantifier, body: &Formula, x: &Var, a: &Var, b: &Var) -> Arrow {
    if a == b {
        let qa = Formula::quant(q, a.clone(), body.subst(x, a).expect("defined instance"));
        return Arrow::id(qa);
    }
    tau(q, body, x, a, b).expect("τ proviso holds for eigenvariables")
}

/// `denote(t)` composed with structural isomorphisms so that its type is
/// exactly `source ⊢ target`.
pub fn denote_at(t: &GentzenTerm, source: &Formula, target: &Formula) -> Result<Arrow> {
    let pre = super::formset::ac_iso(source, &t.source)
        .ok_or_else(|| malformed(format!("{source} is not the source {}", t.source)))?;
    let post = super::formset::ac_iso(&t.target, target)
        .ok_or_else(|| malformed(format!("{target} is not the target {}", t.target)))?;
    Ok(seq(vec![pre, denote(t), post]))
}

/// η-expanded identity on a plain formula.
pub fn gentzen_id(a: &Formula) -> Result<GentzenTerm> {
    Ok(match a {
        Formula::Atom { .. } => GentzenTerm::id(a.clone())?,
        Formula::Bin(Conn::And, l, r) => GentzenTerm::and(
            (**l).clone(),
            (**r).clone(),
            None,
            None,
            gentzen_id(l)?,
            gentzen_id(r)?,
        )?,
        Formula::Bin(Conn::Or, l, r) => GentzenTerm::or(
            (**l).clone(),
            (**r).clone(),
            None,
            None,
            gentzen_id(l)?,
            gentzen_id(r)?,
        )?,
        Formula::Quant(Quantifier::All, x, b) => {
            let inner = GentzenTerm::quant(
                QRule::AllL,
                x.clone(),
                (**b).clone(),
                x.clone(),
                None,
                gentzen_id(b)?,
            )?;
            GentzenTerm::quant(
                QRule::AllR,
                x.clone(),
                (**b).clone(),
                x.clone(),
                None,
                inner,
            )?
        }
        Formula::Quant(Quantifier::Ex, x, b) => {
            let inner = GentzenTerm::quant(
                QRule::ExR,
                x.clone(),
                (**b).clone(),
                x.clone(),
                None,
                gentzen_id(b)?,
            )?;
            GentzenTerm::quant(QRule::ExL, x.clone(), (**b).clone(), x.clone(), None, inner)?
        }
        Formula::Neg(_) => return Err(GentzenError::Negation(a.to_string())),
    })
}

/// A Gentzen term denoting the arrow of `f`, which must be a term of QDS or
/// QMDS with diversified types.
pub fn gentzenize(f: &Arrow) -> Result<GentzenTerm> {
    let ty = infer(f)?;
    for a in [&ty.source, &ty.target] {
        super::formset::canon_form_set(a)?;
    }
    go(f)
}

fn go(f: &Arrow) -> Result<GentzenTerm> {
    use Arrow::*;
    let q = |k, x: &Var, b: &Formula, v: &Var, z: Option<Formula>, p| {
        GentzenTerm::quant(k, x.clone(), b.clone(), v.clone(), z, p)
    };
    Ok(match f {
        Id(a) => gentzen_id(a)?,
        BHat(..) | BCheck(..) | CHat(..) | CCheck(..) => gentzen_id(&infer(f)?.source)?,
        D(a, b, c) => GentzenTerm::and(
            a.clone(),
            b.clone(),
            None,
            Some(c.clone()),
            gentzen_id(a)?,
            gentzen_id(&Formula::or(b.clone(), c.clone()))?,
        )?,
        Iota(Quantifier::All, x, a) => q(QRule::AllL, x, a, x, None, gentzen_id(a)?)?,
        Iota(Quantifier::Ex, x, a) => q(QRule::ExR, x, a, x, None, gentzen_id(a)?)?,
        Gamma(Quantifier::All, x, d) => q(QRule::AllR, x, d, x, None, gentzen_id(d)?)?,
        Gamma(Quantifier::Ex, x, d) => q(QRule::ExL, x, d, x, None, gentzen_id(d)?)?,
        ThetaAllR(x, a, d) => {
            let ad = Formula::or(a.clone(), d.clone());
            let inner = q(QRule::AllL, x, &ad, x, None, gentzen_id(&ad)?)?;
            q(QRule::AllR, x, a, x, Some(d.clone()), inner)?
        }
        ThetaExL(x, a, d) => {
            let ad = Formula::and(a.clone(), d.clone());
            let inner = q(QRule::ExR, x, &ad, x, None, gentzen_id(&ad)?)?;
            q(QRule::ExL, x, a, x, Some(d.clone()), inner)?
        }
        Mix(a, b) => GentzenTerm::mix(gentzen_id(a)?, gentzen_id(b)?)?,
        DeltaAll(..) | SigmaEx(..) => {
            return Err(GentzenError::Unsupported(format!(
                "{f} has no Gentzen counterpart in GQDS"
            )))
        }
        Comp(g, h) => {
            let gh = go(h)?;
            let gg = go(g)?;
            GentzenTerm::cut(gh.target.clone(), None, None, gh, gg)?
        }
        Tensor(Conn::And, a, b) => {
            let (ga, gb) = (go(a)?, go(b)?);
            GentzenTerm::and(ga.target.clone(), gb.target.clone(), None, None, ga, gb)?
        }
        Tensor(Conn::Or, a, b) => {
            let (ga, gb) = (go(a)?, go(b)?);
            GentzenTerm::or(ga.source.clone(), gb.source.clone(), None, None, ga, gb)?
        }
        Quant(Quantifier::All, x, h) => {
            let gh = go(h)?;
            let (s, t) = (gh.source.clone(), gh.target.clone());
            let inner = q(QRule::AllL, x, &s, x, None, gh)?;
            q(QRule::AllR, x, &t, x, None, inner)?
        }
        Quant(Quantifier::Ex, x, h) => {
            let gh = go(h)?;
            let (s, t) = (gh.source.clone(), gh.target.clone());
            let inner = q(QRule::ExR, x, &t, x, None, gh)?;
            q(QRule::ExL, x, &s, x, None, inner)?
        }
        Ren(x, y, h) => GentzenTerm::ren(x.clone(), y.clone(), go(h)?)?,
    })
}

fn opt(f: &mut fmt::Formatter<'_>, key: &str, a: &Option<Formula>) -> fmt::Result {
    match a {
        Some(a) => write!(f, " :{key} {{{a}}}"),
        None => Ok(()),
    }
}

impl fmt::Display for GentzenTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Rule::Id => write!(f, "(gid {{{}}})", self.source),
            Rule::Cut { cut, z, y, f: a, g } => {
                write!(f, "(cut {{{cut}}}")?;
                opt(f, "z", z)?;
                opt(f, "y", y)?;
                write!(f, " {a} {g})")
            }
            Rule::And {
                y1,
                y2,
                z1,
                z2,
                f: a,
                g,
            }
            | Rule::Or {
                x1: y1,
                x2: y2,
                z1,
                z2,
                f: a,
                g,
            } => {
                let head = if matches!(self.rule, Rule::And { .. }) {
                    "gand"
                } else {
                    "gor"
                };
                write!(f, "({head} {{{y1}}} {{{y2}}}")?;
                opt(f, "z1", z1)?;
                opt(f, "z2", z2)?;
                write!(f, " {a} {g})")
            }
            Rule::Ren { x, y, f: a } => write!(f, "(gren {x} {y} {a})"),
            Rule::Mix { f: a, g } => write!(f, "(gmix {a} {g})"),
            _ => {
                let (k, x, body, v, z, a) = self.as_quant().expect("quantifier rule");
                write!(f, "({} {x} {{{body}}} {v}", k.name())?;
                opt(f, "z", z)?;
                write!(f, " {a})")
            }
        }
    }
}

fn keyword(c: &mut SexpCursor, key: &str) -> std::result::Result<Option<Formula>, ArrowError> {
    if c.peek() == Some(&SexpTok::Word(format!(":{key}"))) {
        c.next();
        Ok(Some(c.formula()?))
    } else {
        Ok(None)
    }
}

fn parse_term(c: &mut SexpCursor) -> Result<GentzenTerm> {
    c.open()?;
    let head = c.word()?;
    let t = match head.as_str() {
        "gid" => GentzenTerm::id(c.formula()?)?,
        "cut" => {
            let x = c.formula()?;
            let z = keyword(c, "z")?;
            let y = keyword(c, "y")?;
            let f = parse_term(c)?;
            GentzenTerm::cut(x, z, y, f, parse_term(c)?)?
        }
        "gand" | "gor" => {
            let (a, b) = (c.formula()?, c.formula()?);
            let z1 = keyword(c, "z1")?;
            let z2 = keyword(c, "z2")?;
            let f = parse_term(c)?;
            let g = parse_term(c)?;
            if head == "gand" {
                GentzenTerm::and(a, b, z1, z2, f, g)?
            } else {
                GentzenTerm::or(a, b, z1, z2, f, g)?
            }
        }
        "allL" | "allR" | "exL" | "exR" => {
            let kind = match head.as_str() {
                "allL" => QRule::AllL,
                "allR" => QRule::AllR,
                "exL" => QRule::ExL,
                _ => QRule::ExR,
            };
            let x = c.var()?;
            let body = c.formula()?;
            let v = c.var()?;
            let z = keyword(c, "z")?;
            GentzenTerm::quant(kind, x, body, v, z, parse_term(c)?)?
        }
        "gren" => {
            let x = c.var()?;
            let y = c.var()?;
            GentzenTerm::ren(x, y, parse_term(c)?)?
        }
        "gmix" => {
            let f = parse_term(c)?;
            GentzenTerm::mix(f, parse_term(c)?)?
        }
        other => {
            return Err(ArrowError::Parse(format!("unknown Gentzen constructor {other}")).into())
        }
    };
    c.close()?;
    Ok(t)
}

/// Parse a Gentzen term in the s-expression syntax, checking every rule.
pub fn parse_gentzen(text: &str, system: SystemId) -> Result<GentzenTerm> {
    let mut c = SexpCursor::new(text, Grammar::Plain)?;
    let t = parse_term(&mut c)?;
    if !c.at_end() {
        return Err(ArrowError::Parse("trailing input after term".into()).into());
    }
    if t.uses_mix() && !system.has_mix() {
        return Err(
            ArrowError::SystemViolation(format!("mix is not available in {system}")).into(),
        );
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrows::typecheck;
    use crate::gen::Generator;
    use crate::graphs::{graph_eq, graph_of};
    use crate::lang::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s, SystemId::Qds).unwrap()
    }

    fn roundtrip(sys: SystemId, seed: u64) {
        let mut g = Generator::new(sys, seed).diversified().with_max_size(10);
        let f = g.arrow(8);
        let ty = typecheck(&f, sys).unwrap();
        let gt = gentzenize(&f).unwrap_or_else(|e| panic!("{f}: {e}"));
        assert!(equiv(&gt.source, &ty.source) && equiv(&gt.target, &ty.target));
        let d = denote(&gt);
        let dty = typecheck(&d, sys).unwrap_or_else(|e| panic!("{gt}: {e}"));
        assert_eq!((&dty.source, &dty.target), (&gt.source, &gt.target));
        let back = denote_at(&gt, &ty.source, &ty.target).unwrap();
        assert!(
            graph_eq(&graph_of(&back).unwrap(), &graph_of(&f).unwrap()),
            "{f}\n{gt}"
        );
    }

    #[test]
    fn gentzenization_preserves_graphs() {
        for seed in 0..300 {
            roundtrip(SystemId::Qds, seed);
            roundtrip(SystemId::Qmds, seed);
        }
    }

    #[test]
    fn iota_is_a_left_rule_on_an_identity() {
        let f = Arrow::Iota(Quantifier::All, crate::lang::var("x"), p("P(x)"));
        let gt = gentzenize(&f).unwrap();
        assert_eq!(gt.to_string(), "(allL x {P(x)} x (gid {P(x)}))");
        assert_eq!(gt.sequent_string(), "all x. P(x) |- P(x)");
    }

    #[test]
    fn s_expressions_round_trip() {
        for seed in 0..100 {
            let mut g = Generator::new(SystemId::Qmds, seed)
                .diversified()
                .with_max_size(10);
            let gt = gentzenize(&g.arrow(8)).unwrap();
            let back = parse_gentzen(&gt.to_string(), SystemId::Qmds).unwrap();
            assert_eq!(back, gt);
        }
        assert!(parse_gentzen("(gmix (gid {P}) (gid {Q}))", SystemId::Qds).is_err());
    }

    #[test]
    fn eigenvariable_proviso_is_enforced() {
        let x = crate::lang::var("x");
        let body = GentzenTerm::id(p("P(x)")).unwrap();
        assert!(GentzenTerm::quant(QRule::AllR, x.clone(), p("P(x)"), x, None, body).is_err());
    }

    #[test]
    fn contexts_of_the_binary_rules() {
        let f = GentzenTerm::id(p("P")).unwrap();
        let or = GentzenTerm::or(
            p("P"),
            p("Q"),
            None,
            None,
            f.clone(),
            GentzenTerm::id(p("Q")).unwrap(),
        )
        .unwrap();
        let and = GentzenTerm::and(
            p("P"),
            p("R"),
            None,
            Some(p("Q")),
            f,
            gentzen_id(&p("R | Q")).unwrap(),
        )
        .unwrap();
        assert!(equiv(&and.target, &p("(P & R) | Q")));
        let cut = GentzenTerm::cut(p("P | Q"), None, Some(p("R")), or, and).unwrap_err();
        assert!(matches!(cut, GentzenError::Malformed(_)));
    }
}
