//! Form sets and the associativity/commutativity isomorphisms between
//! members of one class.

use std::fmt;

use crate::arrows::{invert_structural, Arrow, Dir};
use crate::lang::{Conn, Formula, Grammar, Quantifier, Var};

use super::{GentzenError, Result};

/// Canonical representative of a class of formulas under associativity
/// and commutativity of ∧ and ∨ and congruence under quantifiers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FormSet {
    Atom(Formula),
    /// Operands are never themselves `Ac` of the same connective and are
    /// kept sorted.
    Ac(Conn, Vec<FormSet>),
    Quant(Quantifier, Var, Box<FormSet>),
}

impl FormSet {
    /// The class of `a`, without the diversification check.
    pub fn of(a: &Formula) -> FormSet {
        match a {
            Formula::Bin(op, l, r) => {
                let mut kids = FormSet::of(l).operands(*op);
                kids.extend(FormSet::of(r).operands(*op));
                kids.sort();
                FormSet::Ac(*op, kids)
            }
            Formula::Quant(q, x, b) => FormSet::Quant(*q, x.clone(), Box::new(FormSet::of(b))),
            _ => FormSet::Atom(a.clone()),
        }
    }

    /// Operands of the top connective when it is `op`, else the form set itself.
    pub fn operands(self, op: Conn) -> Vec<FormSet> {
        match self {
            FormSet::Ac(o, ks) if o == op => ks,
            other => vec![other],
        }
    }

    /// Right-nested representative with operands in canonical order.
    pub fn to_formula(&self) -> Formula {
        match self {
            FormSet::Atom(a) => a.clone(),
            FormSet::Ac(op, kids) => {
                let mut it = kids.iter().rev();
                let last = it.next().expect("nonempty operand list").to_formula();
                it.fold(last, |acc, k| Formula::bin(*op, k.to_formula(), acc))
            }
            FormSet::Quant(q, x, b) => Formula::quant(*q, x.clone(), b.to_formula()),
        }
    }
}

impl fmt::Display for FormSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// The form set of a diversified negation-free formula.
pub fn canon_form_set(a: &Formula) -> Result<FormSet> {
    if a.check_grammar(Grammar::Plain).is_err() {
        return Err(GentzenError::Negation(a.to_string()));
    }
    if !a.is_diversified() {
        return Err(GentzenError::NotDiversified(a.to_string()));
    }
    Ok(FormSet::of(a))
}

/// Whether two formulas lie in one form set.
pub fn equiv(a: &Formula, b: &Formula) -> bool {
    a == b || FormSet::of(a) == FormSet::of(b)
}

/// The operands of `whole` under `op` left after removing those of `part`,
/// as a formula, or `Some(None)` when nothing is left. `None` when `part`
/// is not a sub-multiset of operands.
pub fn remove_operands(whole: &Formula, part: &Formula, op: Conn) -> Option<Option<Formula>> {
    let mut rest = FormSet::of(whole).operands(op);
    for p in FormSet::of(part).operands(op) {
        let k = rest.iter().position(|r| *r == p)?;
        rest.remove(k);
    }
    Some(match rest.len() {
        0 => None,
        1 => Some(rest[0].to_formula()),
        _ => Some(FormSet::Ac(op, rest).to_formula()),
    })
}

/// Whether `part` is one operand of `whole` under `op`.
pub fn has_operand(whole: &Formula, part: &Formula, op: Conn) -> bool {
    let p = FormSet::of(part);
    FormSet::of(whole).operands(op).contains(&p)
}

/// a ⋆ b, or whichever side is present.
pub fn join(op: Conn, a: Option<Formula>, b: Option<Formula>) -> Option<Formula> {
    match (a, b) {
        (Some(a), Some(b)) => Some(Formula::bin(op, a, b)),
        (a, b) => a.or(b),
    }
}

/// a ⋆ b with b optional.
pub fn bin_opt(op: Conn, a: Formula, b: Option<Formula>) -> Formula {
    match b {
        Some(b) => Formula::bin(op, a, b),
        None => a,
    }
}

/// Composition of arrows listed in the order they apply, dropping
/// identities.
pub fn seq(fs: Vec<Arrow>) -> Arrow {
    let first = fs.first().cloned().expect("nonempty sequence");
    let mut kept: Vec<Arrow> = fs
        .into_iter()
        .filter(|f| !matches!(f, Arrow::Id(_)))
        .collect();
    if kept.is_empty() {
        return first;
    }
    kept.reverse();
    Arrow::chain(kept)
}

pub fn tensor_s(op: Conn, f: Arrow, g: Arrow) -> Arrow {
    match (&f, &g) {
        (Arrow::Id(a), Arrow::Id(b)) => Arrow::id(Formula::bin(op, a.clone(), b.clone())),
        _ => Arrow::tensor(op, f, g),
    }
}

pub fn quant_s(q: Quantifier, x: Var, f: Arrow) -> Arrow {
    match f {
        Arrow::Id(a) => Arrow::id(Formula::quant(q, x, a)),
        f => Arrow::quant(q, x, f),
    }
}

fn id(a: &Formula) -> Arrow {
    Arrow::id(a.clone())
}

/// (a⋆b)⋆c ⊢ a⋆(b⋆c) for `Dir::Left`, the converse for `Dir::Right`.
fn assoc(op: Conn, d: Dir, a: &Formula, b: &Formula, c: &Formula) -> Arrow {
    match op {
        Conn::And => Arrow::BHat(d, a.clone(), b.clone(), c.clone()),
        Conn::Or => Arrow::BCheck(d, a.clone(), b.clone(), c.clone()),
    }
}

/// a⋆b ⊢ b⋆a.
fn swap(op: Conn, a: &Formula, b: &Formula) -> Arrow {
    match op {
        Conn::And => Arrow::CHat(a.clone(), b.clone()),
        Conn::Or => Arrow::CCheck(b.clone(), a.clone()),
    }
}

/// A ⊢ N(A) from associativity and commutativity arrows under the functors,
/// N(A) being the representative `FormSet::of(A).to_formula()`.
pub fn normalize(a: &Formula) -> (Arrow, Formula) {
    match a {
        Formula::Bin(op, l, r) => {
            let (fl, nl) = normalize(l);
            let (fr, nr) = normalize(r);
            let (fc, list) = concat(*op, &nl, &nr);
            let (fs, sorted) = sort_list(*op, &list);
            (seq(vec![tensor_s(*op, fl, fr), fc, fs]), sorted)
        }
        Formula::Quant(q, x, b) => {
            let (f, n) = normalize(b);
            (quant_s(*q, x.clone(), f), Formula::quant(*q, x.clone(), n))
        }
        _ => (id(a), a.clone()),
    }
}

fn concat(op: Conn, l: &Formula, r: &Formula) -> (Arrow, Formula) {
    match l {
        Formula::Bin(o, a, rest) if *o == op => {
            let first = assoc(op, Dir::Left, a, rest, r);
            let (f, out) = concat(op, rest, r);
            (
                seq(vec![first, tensor_s(op, id(a), f)]),
                Formula::bin(op, (**a).clone(), out),
            )
        }
        _ => {
            let lr = Formula::bin(op, l.clone(), r.clone());
            (id(&lr), lr)
        }
    }
}

fn sort_list(op: Conn, list: &Formula) -> (Arrow, Formula) {
    match list {
        Formula::Bin(o, e, rest) if *o == op => {
            let (fr, sorted) = sort_list(op, rest);
            let (fi, out) = insert(op, e, &sorted);
            (seq(vec![tensor_s(op, id(e), fr), fi]), out)
        }
        _ => (id(list), list.clone()),
    }
}

fn insert(op: Conn, e: &Formula, s: &Formula) -> (Arrow, Formula) {
    let here = Formula::bin(op, e.clone(), s.clone());
    let key = FormSet::of(e);
    match s {
        Formula::Bin(o, h, rest) if *o == op => {
            if key <= FormSet::of(h) {
                return (id(&here), here);
            }
            let (f, out) = insert(op, e, rest);
            let t = seq(vec![
                assoc(op, Dir::Right, e, h, rest),
                tensor_s(op, swap(op, e, h), id(rest)),
                assoc(op, Dir::Left, h, e, rest),
                tensor_s(op, id(h), f),
            ]);
            (t, Formula::bin(op, (**h).clone(), out))
        }
        _ => {
            if key <= FormSet::of(s) {
                (id(&here), here)
            } else {
                (swap(op, e, s), Formula::bin(op, s.clone(), e.clone()))
            }
        }
    }
}

/// The structural isomorphism a ⊢ b between members of one form set.
pub fn ac_iso(a: &Formula, b: &Formula) -> Option<Arrow> {
    if a == b {
        return Some(id(a));
    }
    let (fa, na) = normalize(a);
    let (fb, nb) = normalize(b);
    if na != nb {
        return None;
    }
    Some(seq(vec![fa, invert_structural(&fb)?]))
}

/// `ac_iso` for callers that have already checked equivalence.
pub(crate) fn fit(a: &Formula, b: &Formula) -> Arrow {
    ac_iso(a, b).unwrap_or_else(|| panic!("{a} and {b} are not in one form set"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrows::infer;
    use crate::gen::Generator;
    use crate::graphs::graph_of;
    use crate::lang::{parse_formula, SystemId};

    fn p(s: &str) -> Formula {
        parse_formula(s, SystemId::Qds).unwrap()
    }

    #[test]
    fn commutativity_and_associativity_collapse() {
        assert_eq!(
            canon_form_set(&p("P | Q")).unwrap(),
            canon_form_set(&p("Q | P")).unwrap()
        );
        assert_eq!(
            canon_form_set(&p("(P & Q) & R(x,y)")).unwrap(),
            canon_form_set(&p("P & (Q & R(x,y))")).unwrap()
        );
        assert_eq!(
            canon_form_set(&p("all x. (P(x) | Q)")).unwrap(),
            canon_form_set(&p("all x. (Q | P(x))")).unwrap()
        );
        assert_ne!(
            canon_form_set(&p("P & Q")).unwrap(),
            canon_form_set(&p("P | Q")).unwrap()
        );
        assert!(matches!(
            canon_form_set(&p("P(x) & P(y)")),
            Err(GentzenError::NotDiversified(_))
        ));
    }

    #[test]
    fn normalize_reaches_the_representative() {
        for seed in 0..200 {
            let mut g = Generator::new(SystemId::Qds, seed).diversified();
            let a = g.formula(10);
            let (f, n) = normalize(&a);
            assert_eq!(n, FormSet::of(&a).to_formula());
            let ty = infer(&f).unwrap();
            assert_eq!((ty.source, ty.target), (a.clone(), n));
        }
    }

    #[test]
    fn ac_iso_has_identity_matching() {
        let a = p("(P(x) | Q) & (R(x,y) & S(z))");
        let b = p("S(z) & ((Q | P(x)) & R(x,y))");
        let f = ac_iso(&a, &b).unwrap();
        let g = graph_of(&f).unwrap();
        for (s, t) in g.links() {
            assert_eq!(g.site(s).letter, g.site(t).letter);
        }
        assert!(ac_iso(&a, &p("P(x) | Q")).is_none());
    }

    #[test]
    fn operand_removal() {
        let w = p("(A | B) | (C & D)");
        assert_eq!(
            remove_operands(&w, &p("C & D"), Conn::Or),
            Some(Some(p("A | B")))
        );
        assert_eq!(
            remove_operands(&w, &p("B | A"), Conn::Or),
            Some(Some(p("C & D")))
        );
        assert_eq!(remove_operands(&w, &w, Conn::Or), Some(None));
        assert_eq!(remove_operands(&w, &p("C"), Conn::Or), None);
    }
}
