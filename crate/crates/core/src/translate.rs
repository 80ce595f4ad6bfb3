//! Negation normal form: the functor F from QPN¬ to QPN, the isomorphisms
//! i_A: A ⊢ FA, the q arrows, double negation and the contravariant
//! negation functor.

use crate::arrows::{
    derive_theta, derive_xi, gamma_closure, infer, iota_closure, quant_seq, Arrow, ArrowError, Dir,
    ThetaVariant, XiKind,
};
use crate::lang::{Conn, Formula, Quantifier, Var};

type Result<T> = std::result::Result<T, ArrowError>;

fn id(a: &Formula) -> Arrow {
    Arrow::id(a.clone())
}

fn neg(a: &Formula) -> Formula {
    Formula::neg(a.clone())
}

/// Negation pushed to atoms.
pub fn nnf_formula(a: &Formula) -> Formula {
    match a {
        Formula::Atom { .. } => a.clone(),
        Formula::Bin(op, l, r) => Formula::bin(*op, nnf_formula(l), nnf_formula(r)),
        Formula::Quant(q, x, b) => Formula::quant(*q, x.clone(), nnf_formula(b)),
        Formula::Neg(b) => match &**b {
            Formula::Atom { .. } => a.clone(),
            Formula::Neg(c) => nnf_formula(c),
            Formula::Bin(op, l, r) => {
                Formula::bin(op.dual(), nnf_formula(&neg(l)), nnf_formula(&neg(r)))
            }
            Formula::Quant(q, x, c) => Formula::quant(q.dual(), x.clone(), nnf_formula(&neg(c))),
        },
    }
}

/// Q_{from} body ⊢ Q_{to} body for two orderings of the same variables,
/// every free variable of `body` being among them.
fn reorder(q: Quantifier, from: &[Var], to: &[Var], body: &Formula) -> Result<Arrow> {
    if from == to {
        return Ok(id(&Formula::quant_seq(q, from, body.clone())));
    }
    Ok(match q {
        Quantifier::All => Arrow::comp(
            quant_seq(q, to, iota_closure(q, from, body)),
            gamma_closure(q, to, &Formula::quant_seq(q, from, body.clone()))?,
        ),
        Quantifier::Ex => Arrow::comp(
            gamma_closure(q, from, &Formula::quant_seq(q, to, body.clone()))?,
            quant_seq(q, from, iota_closure(q, to, body)),
        ),
    })
}

/// (a∨c)∧(b∨d) ⊢ (a∨b)∨(c∧d).
fn spread_and(a: &Formula, c: &Formula, b: &Formula, d: &Formula) -> Arrow {
    let bd = Formula::or(b.clone(), d.clone());
    let cd = Formula::and(c.clone(), d.clone());
    Arrow::chain(vec![
        Arrow::BCheck(Dir::Right, a.clone(), b.clone(), cd.clone()),
        Arrow::or(id(a), Arrow::CCheck(b.clone(), cd)),
        Arrow::or(id(a), Arrow::D(c.clone(), d.clone(), b.clone())),
        Arrow::or(
            id(a),
            Arrow::and(id(c), Arrow::CCheck(d.clone(), b.clone())),
        ),
        crate::arrows::d_r(a, c, &bd),
    ])
}

/// (a∨c)∧(b∨d) ⊢ (a∧b)∨(c∨d).
fn spread_or(a: &Formula, c: &Formula, b: &Formula, d: &Formula) -> Arrow {
    let ab = Formula::and(a.clone(), b.clone());
    let bd = Formula::or(b.clone(), d.clone());
    Arrow::chain(vec![
        Arrow::or(id(&ab), Arrow::CCheck(c.clone(), d.clone())),
        Arrow::BCheck(Dir::Left, ab.clone(), d.clone(), c.clone()),
        Arrow::CCheck(Formula::or(ab, d.clone()), c.clone()),
        Arrow::or(id(c), Arrow::D(a.clone(), b.clone(), d.clone())),
        crate::arrows::d_r(c, a, &bd),
        Arrow::and(Arrow::CCheck(c.clone(), a.clone()), id(&bd)),
    ])
}

/// (c∧d)∧(a∨b) ⊢ (c∧a)∨(d∧b).
fn gather_and(c: &Formula, d: &Formula, a: &Formula, b: &Formula) -> Arrow {
    let ca = Formula::and(c.clone(), a.clone());
    let ab = Formula::or(a.clone(), b.clone());
    Arrow::chain(vec![
        Arrow::CCheck(ca.clone(), Formula::and(d.clone(), b.clone())),
        Arrow::D(d.clone(), b.clone(), ca.clone()),
        Arrow::and(id(d), Arrow::CCheck(b.clone(), ca)),
        Arrow::and(id(d), Arrow::D(c.clone(), a.clone(), b.clone())),
        Arrow::BHat(Dir::Left, d.clone(), c.clone(), ab.clone()),
        Arrow::and(Arrow::CHat(c.clone(), d.clone()), id(&ab)),
    ])
}

/// (c∨d)∧(a∧b) ⊢ (c∧a)∨(d∧b).
fn gather_or(c: &Formula, d: &Formula, a: &Formula, b: &Formula) -> Arrow {
    let ca = Formula::and(c.clone(), a.clone());
    let cd = Formula::or(c.clone(), d.clone());
    Arrow::chain(vec![
        crate::arrows::d_r(&ca, d, b),
        Arrow::and(Arrow::CCheck(ca.clone(), d.clone()), id(b)),
        Arrow::and(crate::arrows::d_r(d, c, a), id(b)),
        Arrow::and(
            Arrow::and(Arrow::CCheck(d.clone(), c.clone()), id(a)),
            id(b),
        ),
        Arrow::BHat(Dir::Right, cd, a.clone(), b.clone()),
    ])
}

/// FΔ^∀_{B,A'}: A' ⊢ A' ∧ ∀X̄(F¬B ∨ FB), with atomic crowns only.
fn delta_f(b: &Formula, a: &Formula) -> Result<Arrow> {
    let xs = b.free_var_sequence();
    let crown = |c: &Formula| Formula::or(nnf_formula(&neg(c)), nnf_formula(c));
    let on_crown = |first: Arrow, f: Arrow| Arrow::comp(Arrow::and(id(a), f), first);
    Ok(match b {
        Formula::Atom { .. } => Arrow::DeltaAll(b.clone(), a.clone()),
        Formula::Neg(c) => {
            let k = quant_seq(
                Quantifier::All,
                &xs,
                Arrow::CCheck(nnf_formula(c), nnf_formula(&neg(c))),
            );
            on_crown(delta_f(c, a)?, k)
        }
        Formula::Bin(op, c, d) => {
            let (kc, kd) = (crown(c), crown(d));
            let (xc, xd) = (c.free_var_sequence(), d.free_var_sequence());
            let (qc, qd) = (
                Formula::quant_seq(Quantifier::All, &xc, kc.clone()),
                Formula::quant_seq(Quantifier::All, &xd, kd.clone()),
            );
            let both = Formula::and(qc.clone(), qd.clone());
            let merge = Arrow::comp(
                quant_seq(
                    Quantifier::All,
                    &xs,
                    Arrow::and(
                        iota_closure(Quantifier::All, &xc, &kc),
                        iota_closure(Quantifier::All, &xd, &kd),
                    ),
                ),
                gamma_closure(Quantifier::All, &xs, &both)?,
            );
            let (na, fc, nb, fd) = (
                nnf_formula(&neg(c)),
                nnf_formula(c),
                nnf_formula(&neg(d)),
                nnf_formula(d),
            );
            let spread = match op {
                Conn::And => spread_and(&na, &fc, &nb, &fd),
                Conn::Or => spread_or(&na, &fc, &nb, &fd),
            };
            let first = delta_f(c, a)?;
            let a_c = Formula::and(a.clone(), qc.clone());
            Arrow::chain(vec![
                Arrow::and(
                    id(a),
                    Arrow::comp(quant_seq(Quantifier::All, &xs, spread), merge),
                ),
                Arrow::BHat(Dir::Left, a.clone(), qc, qd),
                delta_f(d, &a_c)?,
                first,
            ])
        }
        Formula::Quant(q, x, c) => {
            let (fc, fnc) = (nnf_formula(c), nnf_formula(&neg(c)));
            let first = delta_f(c, a)?;
            if !c.is_free_in(x) {
                let k = match q {
                    Quantifier::All => Arrow::or(
                        Arrow::Iota(Quantifier::Ex, x.clone(), fnc),
                        Arrow::Gamma(Quantifier::All, x.clone(), fc),
                    ),
                    Quantifier::Ex => Arrow::or(
                        Arrow::Gamma(Quantifier::All, x.clone(), fnc),
                        Arrow::Iota(Quantifier::Ex, x.clone(), fc),
                    ),
                };
                return Ok(on_crown(first, quant_seq(Quantifier::All, &xs, k)));
            }
            let inner = match q {
                Quantifier::All => {
                    let ex_n = Formula::ex(x.clone(), fnc.clone());
                    Arrow::chain(vec![
                        Arrow::CCheck(ex_n.clone(), Formula::all(x.clone(), fc.clone())),
                        Arrow::ThetaAllR(x.clone(), fc.clone(), ex_n.clone()),
                        Arrow::quant(
                            Quantifier::All,
                            x.clone(),
                            Arrow::comp(
                                Arrow::CCheck(fc.clone(), ex_n),
                                Arrow::or(
                                    Arrow::Iota(Quantifier::Ex, x.clone(), fnc.clone()),
                                    id(&fc),
                                ),
                            ),
                        ),
                    ])
                }
                Quantifier::Ex => {
                    let ex_f = Formula::ex(x.clone(), fc.clone());
                    Arrow::comp(
                        Arrow::ThetaAllR(x.clone(), fnc.clone(), ex_f),
                        Arrow::quant(
                            Quantifier::All,
                            x.clone(),
                            Arrow::or(id(&fnc), Arrow::Iota(Quantifier::Ex, x.clone(), fc)),
                        ),
                    )
                }
            };
            let mut to = xs.clone();
            to.insert(0, x.clone());
            let h = reorder(Quantifier::All, &c.free_var_sequence(), &to, &crown(c))?;
            on_crown(
                first,
                Arrow::comp(quant_seq(Quantifier::All, &xs, inner), h),
            )
        }
    })
}

/// FΣ^∃_{B,A'}: ∃X̄(FB ∧ F¬B) ∨ A' ⊢ A', with atomic crowns only.
fn sigma_f(b: &Formula, a: &Formula) -> Result<Arrow> {
    let xs = b.free_var_sequence();
    let crown = |c: &Formula| Formula::and(nnf_formula(c), nnf_formula(&neg(c)));
    let on_crown = |last: Arrow, f: Arrow| Arrow::comp(last, Arrow::or(f, id(a)));
    Ok(match b {
        Formula::Atom { .. } => Arrow::SigmaEx(b.clone(), a.clone()),
        Formula::Neg(c) => {
            let k = quant_seq(
                Quantifier::Ex,
                &xs,
                Arrow::CHat(nnf_formula(&neg(c)), nnf_formula(c)),
            );
            on_crown(sigma_f(c, a)?, k)
        }
        Formula::Bin(op, c, d) => {
            let (kc, kd) = (crown(c), crown(d));
            let (xc, xd) = (c.free_var_sequence(), d.free_var_sequence());
            let (qc, qd) = (
                Formula::quant_seq(Quantifier::Ex, &xc, kc.clone()),
                Formula::quant_seq(Quantifier::Ex, &xd, kd.clone()),
            );
            let split = Arrow::comp(
                gamma_closure(Quantifier::Ex, &xs, &Formula::or(qc.clone(), qd.clone()))?,
                quant_seq(
                    Quantifier::Ex,
                    &xs,
                    Arrow::or(
                        iota_closure(Quantifier::Ex, &xc, &kc),
                        iota_closure(Quantifier::Ex, &xd, &kd),
                    ),
                ),
            );
            let (fc, na, fd, nb) = (
                nnf_formula(c),
                nnf_formula(&neg(c)),
                nnf_formula(d),
                nnf_formula(&neg(d)),
            );
            let gather = match op {
                Conn::And => gather_and(&fc, &fd, &na, &nb),
                Conn::Or => gather_or(&fc, &fd, &na, &nb),
            };
            Arrow::chain(vec![
                sigma_f(d, a)?,
                Arrow::or(id(&qd), sigma_f(c, a)?),
                Arrow::BCheck(Dir::Left, qd.clone(), qc.clone(), a.clone()),
                Arrow::or(Arrow::CCheck(qd, qc), id(a)),
                Arrow::or(
                    Arrow::comp(split, quant_seq(Quantifier::Ex, &xs, gather)),
                    id(a),
                ),
            ])
        }
        Formula::Quant(q, x, c) => {
            let (fc, fnc) = (nnf_formula(c), nnf_formula(&neg(c)));
            let last = sigma_f(c, a)?;
            if !c.is_free_in(x) {
                let k = match q {
                    Quantifier::All => Arrow::and(
                        Arrow::Iota(Quantifier::All, x.clone(), fc),
                        Arrow::Gamma(Quantifier::Ex, x.clone(), fnc),
                    ),
                    Quantifier::Ex => Arrow::and(
                        Arrow::Gamma(Quantifier::Ex, x.clone(), fc),
                        Arrow::Iota(Quantifier::All, x.clone(), fnc),
                    ),
                };
                return Ok(on_crown(last, quant_seq(Quantifier::Ex, &xs, k)));
            }
            let inner = match q {
                Quantifier::All => {
                    let all_f = Formula::all(x.clone(), fc.clone());
                    Arrow::chain(vec![
                        Arrow::quant(
                            Quantifier::Ex,
                            x.clone(),
                            Arrow::comp(
                                Arrow::and(
                                    Arrow::Iota(Quantifier::All, x.clone(), fc.clone()),
                                    id(&fnc),
                                ),
                                Arrow::CHat(fnc.clone(), all_f.clone()),
                            ),
                        ),
                        Arrow::ThetaExL(x.clone(), fnc.clone(), all_f.clone()),
                        Arrow::CHat(all_f, Formula::ex(x.clone(), fnc)),
                    ])
                }
                Quantifier::Ex => {
                    let all_n = Formula::all(x.clone(), fnc.clone());
                    Arrow::comp(
                        Arrow::quant(
                            Quantifier::Ex,
                            x.clone(),
                            Arrow::and(id(&fc), Arrow::Iota(Quantifier::All, x.clone(), fnc)),
                        ),
                        Arrow::ThetaExL(x.clone(), fc, all_n),
                    )
                }
            };
            let mut from = xs.clone();
            from.insert(0, x.clone());
            let h = reorder(Quantifier::Ex, &from, &c.free_var_sequence(), &crown(c))?;
            on_crown(last, Arrow::comp(h, quant_seq(Quantifier::Ex, &xs, inner)))
        }
    })
}

/// The functor F on arrow terms: a QPN (or QMPN) term of type
/// FA ⊢ FB for f: A ⊢ B, with the same graph.
pub fn nnf_arrow(f: &Arrow) -> Result<Arrow> {
    use Arrow::*;
    let n = nnf_formula;
    Ok(match f {
        Comp(g, h) => Arrow::comp(nnf_arrow(g)?, nnf_arrow(h)?),
        Tensor(op, g, h) => Arrow::tensor(*op, nnf_arrow(g)?, nnf_arrow(h)?),
        Quant(q, x, g) => Arrow::quant(*q, x.clone(), nnf_arrow(g)?),
        Ren(x, y, g) => Arrow::ren(x.clone(), y.clone(), nnf_arrow(g)?),
        DeltaAll(b, a) => delta_f(b, &n(a))?,
        SigmaEx(b, a) => sigma_f(b, &n(a))?,
        prim => prim.map_formulas(&n),
    })
}

/// n^→_B = Σ̂_{B,¬¬B}∘d_{B,¬B,¬¬B}∘Δ̌′_{¬B,B}: B ⊢ ¬¬B.
pub fn double_neg_intro(b: &Formula) -> Arrow {
    let nb = neg(b);
    let nnb = neg(&nb);
    Arrow::chain(vec![
        derive_xi(XiKind::SigmaHat, b, &nnb),
        Arrow::D(b.clone(), nb.clone(), nnb),
        derive_xi(XiKind::DeltaCheckP, &nb, b),
    ])
}

/// n^←_B = Σ̂′_{¬B,B}∘d_{¬¬B,¬B,B}∘Δ̌_{B,¬¬B}: ¬¬B ⊢ B.
pub fn double_neg_elim(b: &Formula) -> Arrow {
    let nb = neg(b);
    let nnb = neg(&nb);
    Arrow::chain(vec![
        derive_xi(XiKind::SigmaHatP, &nb, b),
        Arrow::D(nnb.clone(), nb, b.clone()),
        derive_xi(XiKind::DeltaCheck, b, &nnb),
    ])
}

/// De Morgan isomorphisms ¬(A⋆B) ⊢ ¬A ⋆′ ¬B, ⋆′ the dual of ⋆.
pub fn de_morgan_out(op: Conn, a: &Formula, b: &Formula) -> Arrow {
    let whole = neg(&Formula::bin(op, a.clone(), b.clone()));
    let (na, nb) = (neg(a), neg(b));
    let outcome = Formula::bin(op.dual(), na.clone(), nb.clone());
    let ab = Formula::bin(op, a.clone(), b.clone());
    let spread = match op {
        Conn::Or => spread_and(a, &na, b, &nb),
        Conn::And => spread_or(a, &na, b, &nb),
    };
    let pa = Formula::or(a.clone(), na.clone());
    let pb = Formula::or(b.clone(), nb.clone());
    Arrow::chain(vec![
        derive_xi(XiKind::SigmaHatP, &ab, &outcome),
        Arrow::D(whole.clone(), ab, outcome),
        Arrow::and(id(&whole), spread),
        Arrow::BHat(Dir::Left, whole.clone(), pa.clone(), pb),
        derive_xi(XiKind::DeltaCheckP, b, &Formula::and(whole.clone(), pa)),
        derive_xi(XiKind::DeltaCheckP, a, &whole),
    ])
}

/// De Morgan isomorphisms ¬A ⋆′ ¬B ⊢ ¬(A⋆B).
pub fn de_morgan_in(op: Conn, a: &Formula, b: &Formula) -> Arrow {
    let ab = Formula::bin(op, a.clone(), b.clone());
    let whole = neg(&ab);
    let (na, nb) = (neg(a), neg(b));
    let source = Formula::bin(op.dual(), na.clone(), nb.clone());
    let gather = match op {
        Conn::Or => gather_and(&na, &nb, a, b),
        Conn::And => gather_or(&na, &nb, a, b),
    };
    let (ka, kb) = (Formula::and(na, a.clone()), Formula::and(nb, b.clone()));
    Arrow::chain(vec![
        derive_xi(XiKind::SigmaHatP, a, &whole),
        Arrow::or(id(&ka), derive_xi(XiKind::SigmaHatP, b, &whole)),
        Arrow::BCheck(Dir::Left, ka, kb, whole.clone()),
        Arrow::or(gather, id(&whole)),
        Arrow::D(source.clone(), ab.clone(), whole),
        derive_xi(XiKind::DeltaCheckP, &ab, &source),
    ])
}

/// The q isomorphisms: `Dir::Right` gives q^{Qx→}_A (¬∀xA ⊢ ∃x¬A, resp.
/// ¬∃xA ⊢ ∀x¬A), `Dir::Left` the converse q^{Qx←}_A.
pub fn build_q(x: &Var, a: &Formula, q: Quantifier, dir: Dir) -> Result<Arrow> {
    let xs = a.free_var_sequence();
    let na = neg(a);
    let qa = Formula::quant(q, x.clone(), a.clone());
    let nqa = neg(&qa);
    let ys = qa.free_var_sequence();
    let dual_na = Formula::quant(q.dual(), x.clone(), na.clone());
    let a_na = Formula::or(a.clone(), na.clone());
    let na_a = Formula::and(na.clone(), a.clone());
    let crown_ex_a = Formula::quant_seq(Quantifier::Ex, &xs, na_a.clone());
    let t = match (q, dir) {
        (Quantifier::All, Dir::Right) => {
            let ex_na = dual_na;
            Arrow::chain(vec![
                derive_xi(XiKind::SigmaPEx, &qa, &ex_na),
                Arrow::or(
                    iota_closure(Quantifier::Ex, &ys, &Formula::and(nqa.clone(), qa.clone())),
                    id(&ex_na),
                ),
                Arrow::D(nqa.clone(), qa.clone(), ex_na.clone()),
                Arrow::and(
                    id(&nqa),
                    Arrow::chain(vec![
                        Arrow::ThetaAllR(x.clone(), a.clone(), ex_na.clone()),
                        Arrow::quant(
                            Quantifier::All,
                            x.clone(),
                            Arrow::comp(
                                Arrow::or(
                                    id(a),
                                    Arrow::Iota(Quantifier::Ex, x.clone(), na.clone()),
                                ),
                                iota_closure(Quantifier::All, &xs, &a_na),
                            ),
                        ),
                        gamma_closure(
                            Quantifier::All,
                            std::slice::from_ref(x),
                            &Formula::quant_seq(Quantifier::All, &xs, a_na.clone()),
                        )?,
                    ]),
                ),
                derive_xi(XiKind::DeltaPAll, a, &nqa),
            ])
        }
        (Quantifier::All, Dir::Left) => {
            let ex_na = dual_na;
            Arrow::chain(vec![
                derive_xi(XiKind::SigmaPEx, a, &nqa),
                Arrow::or(
                    Arrow::chain(vec![
                        gamma_closure(Quantifier::Ex, std::slice::from_ref(x), &crown_ex_a)?,
                        Arrow::quant(
                            Quantifier::Ex,
                            x.clone(),
                            Arrow::comp(
                                iota_closure(Quantifier::Ex, &xs, &na_a),
                                Arrow::and(
                                    id(&na),
                                    Arrow::Iota(Quantifier::All, x.clone(), a.clone()),
                                ),
                            ),
                        ),
                        Arrow::ThetaExL(x.clone(), na.clone(), qa.clone()),
                    ]),
                    id(&nqa),
                ),
                Arrow::D(ex_na.clone(), qa.clone(), nqa.clone()),
                Arrow::and(
                    id(&ex_na),
                    iota_closure(Quantifier::All, &ys, &Formula::or(qa.clone(), nqa.clone())),
                ),
                derive_xi(XiKind::DeltaPAll, &qa, &ex_na),
            ])
        }
        (Quantifier::Ex, Dir::Right) => {
            let all_na = dual_na;
            Arrow::chain(vec![
                derive_xi(XiKind::SigmaPEx, &qa, &all_na),
                Arrow::or(
                    iota_closure(Quantifier::Ex, &ys, &Formula::and(nqa.clone(), qa.clone())),
                    id(&all_na),
                ),
                Arrow::D(nqa.clone(), qa.clone(), all_na.clone()),
                Arrow::and(
                    id(&nqa),
                    Arrow::chain(vec![
                        Arrow::CCheck(qa.clone(), all_na.clone()),
                        Arrow::ThetaAllR(x.clone(), na.clone(), qa.clone()),
                        Arrow::quant(
                            Quantifier::All,
                            x.clone(),
                            Arrow::chain(vec![
                                Arrow::CCheck(na.clone(), qa.clone()),
                                Arrow::or(
                                    Arrow::Iota(Quantifier::Ex, x.clone(), a.clone()),
                                    id(&na),
                                ),
                                iota_closure(Quantifier::All, &xs, &a_na),
                            ]),
                        ),
                        gamma_closure(
                            Quantifier::All,
                            std::slice::from_ref(x),
                            &Formula::quant_seq(Quantifier::All, &xs, a_na.clone()),
                        )?,
                    ]),
                ),
                derive_xi(XiKind::DeltaPAll, a, &nqa),
            ])
        }
        (Quantifier::Ex, Dir::Left) => {
            let all_na = dual_na;
            Arrow::chain(vec![
                derive_xi(XiKind::SigmaPEx, a, &nqa),
                Arrow::or(
                    Arrow::chain(vec![
                        gamma_closure(Quantifier::Ex, std::slice::from_ref(x), &crown_ex_a)?,
                        Arrow::quant(
                            Quantifier::Ex,
                            x.clone(),
                            Arrow::chain(vec![
                                iota_closure(Quantifier::Ex, &xs, &na_a),
                                Arrow::CHat(a.clone(), na.clone()),
                                Arrow::and(
                                    id(a),
                                    Arrow::Iota(Quantifier::All, x.clone(), na.clone()),
                                ),
                            ]),
                        ),
                        Arrow::ThetaExL(x.clone(), a.clone(), all_na.clone()),
                        Arrow::CHat(all_na.clone(), qa.clone()),
                    ]),
                    id(&nqa),
                ),
                Arrow::D(all_na.clone(), qa.clone(), nqa.clone()),
                Arrow::and(
                    id(&all_na),
                    iota_closure(Quantifier::All, &ys, &Formula::or(qa.clone(), nqa.clone())),
                ),
                derive_xi(XiKind::DeltaPAll, &qa, &all_na),
            ])
        }
    };
    infer(&t)?;
    Ok(t)
}

/// i_A: A ⊢ FA and its inverse i⁻¹_A: FA ⊢ A.
pub fn build_iso(a: &Formula) -> Result<(Arrow, Arrow)> {
    Ok(match a {
        Formula::Atom { .. } => (id(a), id(a)),
        Formula::Bin(op, l, r) => {
            let (il, jl) = build_iso(l)?;
            let (ir, jr) = build_iso(r)?;
            (Arrow::tensor(*op, il, ir), Arrow::tensor(*op, jl, jr))
        }
        Formula::Quant(q, x, b) => {
            let (i, j) = build_iso(b)?;
            (
                Arrow::quant(*q, x.clone(), i),
                Arrow::quant(*q, x.clone(), j),
            )
        }
        Formula::Neg(b) => match &**b {
            Formula::Atom { .. } => (id(a), id(a)),
            Formula::Neg(c) => {
                let (i, j) = build_iso(c)?;
                (
                    Arrow::comp(i, double_neg_elim(c)),
                    Arrow::comp(double_neg_intro(c), j),
                )
            }
            Formula::Bin(op, l, r) => {
                let (il, jl) = build_iso(&neg(l))?;
                let (ir, jr) = build_iso(&neg(r))?;
                let d = op.dual();
                (
                    Arrow::comp(Arrow::tensor(d, il, ir), de_morgan_out(*op, l, r)),
                    Arrow::comp(de_morgan_in(*op, l, r), Arrow::tensor(d, jl, jr)),
                )
            }
            Formula::Quant(q, x, c) => {
                let (i, j) = build_iso(&neg(c))?;
                let d = q.dual();
                (
                    Arrow::comp(
                        Arrow::quant(d, x.clone(), i),
                        build_q(x, c, *q, Dir::Right)?,
                    ),
                    Arrow::comp(build_q(x, c, *q, Dir::Left)?, Arrow::quant(d, x.clone(), j)),
                )
            }
        },
    })
}

/// ¬f = Σ̂′_{B,¬A}∘d_{¬B,B,¬A}∘(1_{¬B}∧(f∨1_{¬A}))∘Δ̌′_{A,¬B}: ¬B ⊢ ¬A.
pub fn negate_arrow(f: &Arrow) -> Result<Arrow> {
    let ty = infer(f)?;
    let (a, b) = (&ty.source, &ty.target);
    let (na, nb) = (neg(a), neg(b));
    Ok(Arrow::chain(vec![
        derive_xi(XiKind::SigmaHatP, b, &na),
        Arrow::D(nb.clone(), b.clone(), na.clone()),
        Arrow::and(id(&nb), Arrow::or(f.clone(), id(&na))),
        derive_xi(XiKind::DeltaCheckP, a, &nb),
    ]))
}

/// θ̌^{∀x→}_{A,D} rebuilt from the remaining primitives:
/// ((∀x(Δ̂_{D,A}∘d^R_{A,D,¬D})∘θ̂^{∀x←}_{A∨D,¬D})∨1_D)∘d∘Δ̌_{D,∀x(A∨D)}.
pub fn theta_all_defined(x: &Var, a: &Formula, d: &Formula) -> Result<Arrow> {
    let nd = neg(d);
    let ad = Formula::or(a.clone(), d.clone());
    let all_ad = Formula::all(x.clone(), ad.clone());
    Ok(Arrow::chain(vec![
        Arrow::or(
            Arrow::comp(
                Arrow::quant(
                    Quantifier::All,
                    x.clone(),
                    Arrow::comp(
                        derive_xi(XiKind::DeltaHat, d, a),
                        crate::arrows::d_r(a, d, &nd),
                    ),
                ),
                derive_theta(ThetaVariant::AllAndLeft, x, &ad, &nd)?,
            ),
            id(d),
        ),
        Arrow::D(all_ad.clone(), nd, d.clone()),
        derive_xi(XiKind::DeltaCheck, d, &all_ad),
    ]))
}

/// θ̂^{∃x←}_{A,D} rebuilt from the remaining primitives:
/// Δ̂′_{D,∃x(A∧D)}∘d^R∘((θ̌^{∃x→}_{A∧D,¬D}∘∃x(d_{A,D,¬D}∘Δ̌′_{D,A}))∧1_D).
pub fn theta_ex_defined(x: &Var, a: &Formula, d: &Formula) -> Result<Arrow> {
    let nd = neg(d);
    let ad = Formula::and(a.clone(), d.clone());
    let ex_ad = Formula::ex(x.clone(), ad.clone());
    Ok(Arrow::chain(vec![
        derive_xi(XiKind::DeltaHatP, d, &ex_ad),
        crate::arrows::d_r(&ex_ad, &nd, d),
        Arrow::and(
            Arrow::comp(
                derive_theta(ThetaVariant::ExOrRight, x, &ad, &nd)?,
                Arrow::quant(
                    Quantifier::Ex,
                    x.clone(),
                    Arrow::comp(
                        Arrow::D(a.clone(), d.clone(), nd),
                        derive_xi(XiKind::DeltaCheckP, d, a),
                    ),
                ),
            ),
            id(d),
        ),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrows::typecheck;
    use crate::gen::Generator;
    use crate::graphs::{graph_eq, graph_of};
    use crate::lang::{parse_formula, var, SystemId};

    fn p(s: &str) -> Formula {
        parse_formula(s, SystemId::QpnNeg).unwrap()
    }

    fn same(f: &Arrow, g: &Arrow) -> bool {
        graph_eq(&graph_of(f).unwrap(), &graph_of(g).unwrap())
    }

    #[test]
    fn nnf_formula_examples() {
        let cases = [
            ("~~P", "P"),
            ("~(P & ~Q)", "~P | Q"),
            ("~all x. (R(x,y) | ~S(x))", "some x. (~R(x,y) & S(x))"),
            ("~some x. ~P(x)", "all x. P(x)"),
        ];
        for (a, b) in cases {
            assert_eq!(nnf_formula(&p(a)), p(b), "{a}");
        }
    }

    #[test]
    fn nnf_is_idempotent_and_plain() {
        for seed in 0..200 {
            let a = Generator::new(SystemId::QpnNeg, seed).formula(8);
            let fa = nnf_formula(&a);
            assert_eq!(nnf_formula(&fa), fa);
            assert_eq!(fa.free_vars(), a.free_vars());
            assert!(fa.check_grammar(SystemId::Qpn.grammar()).is_ok(), "{fa}");
        }
    }

    #[test]
    fn q_arrows_typecheck() {
        let x = var("x");
        for a in ["R(x,y)", "P", "S(x) & ~R(y,x)", "all y. R(x,y)"] {
            let a = p(a);
            for q in [Quantifier::All, Quantifier::Ex] {
                for dir in [Dir::Left, Dir::Right] {
                    let t = build_q(&x, &a, q, dir).unwrap();
                    typecheck(&t, SystemId::QpnNeg).unwrap();
                }
            }
        }
    }

    #[test]
    fn isos_are_inverse_at_graph_level() {
        for seed in 0..300 {
            let a = Generator::new(SystemId::QpnNeg, seed).formula(7);
            let (i, j) = build_iso(&a).unwrap();
            let ty = typecheck(&i, SystemId::QpnNeg).unwrap();
            assert_eq!((&ty.source, &ty.target), (&a, &nnf_formula(&a)));
            let ty = typecheck(&j, SystemId::QpnNeg).unwrap();
            assert_eq!((&ty.source, &ty.target), (&nnf_formula(&a), &a));
            assert!(
                same(&Arrow::comp(j.clone(), i.clone()), &Arrow::id(a.clone())),
                "{a}"
            );
            let fa = nnf_formula(&a);
            assert!(same(&Arrow::comp(i, j), &Arrow::id(fa)), "{a}");
        }
    }

    #[test]
    fn translation_preserves_graphs() {
        for sys in [SystemId::QpnNeg, SystemId::QmpnNeg] {
            for seed in 0..300 {
                let f = Generator::new(sys, seed).arrow(6);
                let ty = typecheck(&f, sys).unwrap();
                let ff = nnf_arrow(&f).unwrap();
                let target = if sys.has_mix() {
                    SystemId::Qmpn
                } else {
                    SystemId::Qpn
                };
                let fty = typecheck(&ff, target).unwrap_or_else(|e| panic!("{f}: {e}"));
                assert_eq!(fty.source, nnf_formula(&ty.source));
                assert_eq!(fty.target, nnf_formula(&ty.target));
                assert!(same(&ff, &nnf_arrow(&ff).unwrap()));
                let (i, _) = build_iso(&ty.source).unwrap();
                let (_, j) = build_iso(&ty.target).unwrap();
                assert!(same(&f, &Arrow::chain(vec![j, ff, i])), "{f}");
            }
        }
    }

    #[test]
    fn negation_is_contravariant() {
        for seed in 0..200 {
            let mut g = Generator::new(SystemId::QpnNeg, seed);
            let f = g.arrow(5);
            let ty = infer(&f).unwrap();
            let h = g.arrow_from(&ty.target, 5);
            let nf = negate_arrow(&f).unwrap();
            let nh = negate_arrow(&h).unwrap();
            let ncomp = negate_arrow(&Arrow::comp(h, f.clone())).unwrap();
            assert!(same(&ncomp, &Arrow::comp(nf, nh)), "{f}");
            let nid = negate_arrow(&Arrow::id(ty.source.clone())).unwrap();
            assert!(same(&nid, &Arrow::id(neg(&ty.source))));
        }
    }

    #[test]
    fn double_negation_round_trip() {
        for a in ["P", "R(x,y) & Q", "all x. ~S(x)"] {
            let a = p(a);
            let t = Arrow::comp(double_neg_elim(&a), double_neg_intro(&a));
            typecheck(&t, SystemId::QpnNeg).unwrap();
            assert!(same(&t, &Arrow::id(a)));
        }
    }

    #[test]
    fn theta_is_definable() {
        for seed in 0..200 {
            let mut g = Generator::new(SystemId::QpnNeg, seed);
            let x = g.var();
            let a = g.formula(4);
            let d = g.formula(3);
            if d.is_free_in(&x) {
                continue;
            }
            let t = theta_all_defined(&x, &a, &d).unwrap();
            let prim = Arrow::ThetaAllR(x.clone(), a.clone(), d.clone());
            assert_eq!(
                typecheck(&t, SystemId::QpnNeg).unwrap(),
                infer(&prim).unwrap()
            );
            assert!(same(&t, &prim), "{t}");
            let t = theta_ex_defined(&x, &a, &d).unwrap();
            let prim = Arrow::ThetaExL(x.clone(), a, d);
            assert_eq!(
                typecheck(&t, SystemId::QpnNeg).unwrap(),
                infer(&prim).unwrap()
            );
            assert!(same(&t, &prim), "{t}");
        }
    }

    #[test]
    fn iso_commutes_with_renaming() {
        let (x, y) = (var("x"), var("y"));
        let mut checked = 0;
        for seed in 0..200 {
            let a = Generator::new(SystemId::QpnNeg, seed).formula(6);
            let Some(ay) = a.subst(&x, &y) else { continue };
            if !a.is_free_in(&x) {
                continue;
            }
            let (i, _) = build_iso(&a).unwrap();
            let renamed = Arrow::ren(x.clone(), y.clone(), i);
            let Ok(ty) = typecheck(&renamed, SystemId::QpnNeg) else {
                continue;
            };
            let (iy, _) = build_iso(&ay).unwrap();
            assert_eq!(ty, infer(&iy).unwrap());
            assert!(same(&renamed, &iy), "{a}");
            checked += 1;
        }
        assert!(checked > 20, "only {checked} cases");
    }
}
