//! Arrow terms, their typing judgment, the derived arrows built from
//! primitives, and the s-expression syntax.

use std::fmt;

use thiserror::Error;

use crate::lang::{ArityTable, Conn, Formula, Grammar, LangError, Quantifier, SystemId, Var};

/// Direction of an associativity arrow: `Right` is b^→, `Left` is b^←.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Dir {
    Right,
    Left,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Right => Dir::Left,
            Dir::Left => Dir::Right,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Arrow {
    Id(Formula),
    /// b̂: A∧(B∧C) ⊢ (A∧B)∧C for `Right`, converse for `Left`.
    BHat(Dir, Formula, Formula, Formula),
    BCheck(Dir, Formula, Formula, Formula),
    /// ĉ_{A,B}: A∧B ⊢ B∧A.
    CHat(Formula, Formula),
    /// č_{A,B}: B∨A ⊢ A∨B.
    CCheck(Formula, Formula),
    /// d_{A,B,C}: A∧(B∨C) ⊢ (A∧B)∨C.
    D(Formula, Formula, Formula),
    /// ι^{∀x}_A: ∀xA ⊢ A and ι^{∃x}_A: A ⊢ ∃xA.
    Iota(Quantifier, Var, Formula),
    /// γ^{∀x}_D: D ⊢ ∀xD and γ^{∃x}_D: ∃xD ⊢ D, x not free in D.
    Gamma(Quantifier, Var, Formula),
    /// θ̌^{∀x→}_{A,D}: ∀x(A∨D) ⊢ ∀xA∨D.
    ThetaAllR(Var, Formula, Formula),
    /// θ̂^{∃x←}_{A,D}: ∃xA∧D ⊢ ∃x(A∧D).
    ThetaExL(Var, Formula, Formula),
    /// Δ^∀_{B,A}: A ⊢ A∧∀X̄(¬B∨B).
    DeltaAll(Formula, Formula),
    /// Σ^∃_{B,A}: ∃X̄(B∧¬B)∨A ⊢ A.
    SigmaEx(Formula, Formula),
    /// m_{A,B}: A∧B ⊢ A∨B.
    Mix(Formula, Formula),
    /// `Comp(g, f)` is g∘f.
    Comp(Box<Arrow>, Box<Arrow>),
    Tensor(Conn, Box<Arrow>, Box<Arrow>),
    Quant(Quantifier, Var, Box<Arrow>),
    /// [f]^x_y.
    Ren(Var, Var, Box<Arrow>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Sequent {
    pub source: Formula,
    pub target: Formula,
}

impl Sequent {
    pub fn new(source: Formula, target: Formula) -> Sequent {
        Sequent { source, target }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {}", self.source, self.target)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrowError {
    #[error("proviso violation: {0}")]
    ProvisoViolation(String),
    #[error("undefined substitution: {0}")]
    UndefinedSubstitution(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("system violation: {0}")]
    SystemViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<LangError> for ArrowError {
    fn from(e: LangError) -> ArrowError {
        match e {
            LangError::Parse { .. } => ArrowError::Parse(e.to_string()),
            LangError::SystemViolation(m) => ArrowError::SystemViolation(m),
        }
    }
}

pub type Result<T> = std::result::Result<T, ArrowError>;

/// ∀X̄(¬B∨B) for X̄ the free-variable sequence of B.
pub fn crown_all(b: &Formula) -> Formula {
    let xs = b.free_var_sequence();
    Formula::quant_seq(
        Quantifier::All,
        &xs,
        Formula::or(Formula::neg(b.clone()), b.clone()),
    )
}

/// ∃X̄(B∧¬B).
pub fn crown_ex(b: &Formula) -> Formula {
    let xs = b.free_var_sequence();
    Formula::quant_seq(
        Quantifier::Ex,
        &xs,
        Formula::and(b.clone(), Formula::neg(b.clone())),
    )
}

/// ∀X̄(B∨¬B), the crown of Δ′^∀ and Σ′^∀.
pub fn crown_all_p(b: &Formula) -> Formula {
    let xs = b.free_var_sequence();
    Formula::quant_seq(
        Quantifier::All,
        &xs,
        Formula::or(b.clone(), Formula::neg(b.clone())),
    )
}

/// ∃X̄(¬B∧B), the crown of Σ′^∃ and Δ′^∃.
pub fn crown_ex_p(b: &Formula) -> Formula {
    let xs = b.free_var_sequence();
    Formula::quant_seq(
        Quantifier::Ex,
        &xs,
        Formula::and(Formula::neg(b.clone()), b.clone()),
    )
}

fn subst_or_err(a: &Formula, x: &Var, y: &Var) -> Result<Formula> {
    a.subst(x, y)
        .ok_or_else(|| ArrowError::UndefinedSubstitution(format!("({a})^{x}_{y} is not defined")))
}

struct Checker {
    system: Option<SystemId>,
}

impl Checker {
    fn formula(&self, a: &Formula) -> Result<()> {
        if let Some(sys) = self.system {
            a.check_grammar(sys.grammar())?;
        }
        Ok(())
    }

    fn check(&self, t: &Arrow) -> Result<Sequent> {
        use Arrow::*;
        if let Some(sys) = self.system {
            match t {
                Mix(..) if !sys.has_mix() => {
                    return Err(ArrowError::SystemViolation(format!(
                        "mix is not available in {sys}"
                    )))
                }
                DeltaAll(..) | SigmaEx(..) if !sys.has_xi() => {
                    return Err(ArrowError::SystemViolation(format!(
                        "Δ/Σ are not available in {sys}"
                    )))
                }
                DeltaAll(b, _) | SigmaEx(b, _)
                    if sys.grammar() == Grammar::AtomNeg && !b.is_atom() =>
                {
                    return Err(ArrowError::SystemViolation(format!(
                        "crown index must be atomic in {sys}: {b}"
                    )))
                }
                _ => {}
            }
        }
        for a in t.indices() {
            self.formula(a)?;
        }
        Ok(match t {
            Id(a) => Sequent::new(a.clone(), a.clone()),
            BHat(dir, a, b, c) | BCheck(dir, a, b, c) => {
                let op = if matches!(t, BHat(..)) {
                    Conn::And
                } else {
                    Conn::Or
                };
                let right = Formula::bin(op, a.clone(), Formula::bin(op, b.clone(), c.clone()));
                let left = Formula::bin(op, Formula::bin(op, a.clone(), b.clone()), c.clone());
                match dir {
                    Dir::Right => Sequent::new(right, left),
                    Dir::Left => Sequent::new(left, right),
                }
            }
            CHat(a, b) => Sequent::new(
                Formula::and(a.clone(), b.clone()),
                Formula::and(b.clone(), a.clone()),
            ),
            CCheck(a, b) => Sequent::new(
                Formula::or(b.clone(), a.clone()),
                Formula::or(a.clone(), b.clone()),
            ),
            D(a, b, c) => Sequent::new(
                Formula::and(a.clone(), Formula::or(b.clone(), c.clone())),
                Formula::or(Formula::and(a.clone(), b.clone()), c.clone()),
            ),
            Iota(q, x, a) => {
                let qa = Formula::quant(*q, x.clone(), a.clone());
                match q {
                    Quantifier::All => Sequent::new(qa, a.clone()),
                    Quantifier::Ex => Sequent::new(a.clone(), qa),
                }
            }
            Gamma(q, x, d) => {
                if d.is_free_in(x) {
                    return Err(ArrowError::ProvisoViolation(format!("{x} is free in {d}")));
                }
                let qd = Formula::quant(*q, x.clone(), d.clone());
                match q {
                    Quantifier::All => Sequent::new(d.clone(), qd),
                    Quantifier::Ex => Sequent::new(qd, d.clone()),
                }
            }
            ThetaAllR(x, a, d) => {
                if d.is_free_in(x) {
                    return Err(ArrowError::ProvisoViolation(format!("{x} is free in {d}")));
                }
                Sequent::new(
                    Formula::all(x.clone(), Formula::or(a.clone(), d.clone())),
                    Formula::or(Formula::all(x.clone(), a.clone()), d.clone()),
                )
            }
            ThetaExL(x, a, d) => {
                if d.is_free_in(x) {
                    return Err(ArrowError::ProvisoViolation(format!("{x} is free in {d}")));
                }
                Sequent::new(
                    Formula::and(Formula::ex(x.clone(), a.clone()), d.clone()),
                    Formula::ex(x.clone(), Formula::and(a.clone(), d.clone())),
                )
            }
            DeltaAll(b, a) => {
                let crown = crown_all(b);
                self.formula(&crown)?;
                Sequent::new(a.clone(), Formula::and(a.clone(), crown))
            }
            SigmaEx(b, a) => {
                let crown = crown_ex(b);
                self.formula(&crown)?;
                Sequent::new(Formula::or(crown, a.clone()), a.clone())
            }
            Mix(a, b) => Sequent::new(
                Formula::and(a.clone(), b.clone()),
                Formula::or(a.clone(), b.clone()),
            ),
            Comp(g, f) => {
                let tf = self.check(f)?;
                let tg = self.check(g)?;
                if tf.target != tg.source {
                    return Err(ArrowError::TypeMismatch(format!(
                        "cannot compose: target {} differs from source {}",
                        tf.target, tg.source
                    )));
                }
                Sequent::new(tf.source, tg.target)
            }
            Tensor(op, f, g) => {
                let tf = self.check(f)?;
                let tg = self.check(g)?;
                Sequent::new(
                    Formula::bin(*op, tf.source, tg.source),
                    Formula::bin(*op, tf.target, tg.target),
                )
            }
            Quant(q, x, f) => {
                let tf = self.check(f)?;
                Sequent::new(
                    Formula::quant(*q, x.clone(), tf.source),
                    Formula::quant(*q, x.clone(), tf.target),
                )
            }
            Ren(x, y, f) => {
                let tf = self.check(f)?;
                Sequent::new(
                    subst_or_err(&tf.source, x, y)?,
                    subst_or_err(&tf.target, x, y)?,
                )
            }
        })
    }
}

/// The type of `t` in `system`, with every proviso checked.
pub fn typecheck(t: &Arrow, system: SystemId) -> Result<Sequent> {
    Checker {
        system: Some(system),
    }
    .check(t)
}

/// The type of `t` without system restrictions.
pub fn infer(t: &Arrow) -> Result<Sequent> {
    Checker { system: None }.check(t)
}

/// [f]^x_y, which type-checks by its endpoints only.
pub fn mk_rename(x: &Var, y: &Var, f: Arrow) -> Result<Arrow> {
    let t = Arrow::Ren(x.clone(), y.clone(), Box::new(f));
    infer(&t)?;
    Ok(t)
}

impl Arrow {
    pub fn id(a: Formula) -> Arrow {
        Arrow::Id(a)
    }

    /// g∘f.
    pub fn comp(g: Arrow, f: Arrow) -> Arrow {
        Arrow::Comp(Box::new(g), Box::new(f))
    }

    /// fs[0]∘fs[1]∘...: the head of the list is applied last.
    pub fn chain(fs: Vec<Arrow>) -> Arrow {
        let mut it = fs.into_iter().rev();
        let first = it.next().expect("chain of at least one arrow");
        it.fold(first, |acc, g| Arrow::comp(g, acc))
    }

    pub fn tensor(op: Conn, f: Arrow, g: Arrow) -> Arrow {
        Arrow::Tensor(op, Box::new(f), Box::new(g))
    }

    pub fn and(f: Arrow, g: Arrow) -> Arrow {
        Arrow::tensor(Conn::And, f, g)
    }

    pub fn or(f: Arrow, g: Arrow) -> Arrow {
        Arrow::tensor(Conn::Or, f, g)
    }

    pub fn quant(q: Quantifier, x: Var, f: Arrow) -> Arrow {
        Arrow::Quant(q, x, Box::new(f))
    }

    pub fn ren(x: Var, y: Var, f: Arrow) -> Arrow {
        Arrow::Ren(x, y, Box::new(f))
    }

    /// Formula indices of a primitive; empty for the operations.
    pub fn indices(&self) -> Vec<&Formula> {
        use Arrow::*;
        match self {
            Id(a) | Iota(_, _, a) | Gamma(_, _, a) => vec![a],
            BHat(_, a, b, c) | BCheck(_, a, b, c) | D(a, b, c) => vec![a, b, c],
            CHat(a, b)
            | CCheck(a, b)
            | ThetaAllR(_, a, b)
            | ThetaExL(_, a, b)
            | DeltaAll(a, b)
            | SigmaEx(a, b)
            | Mix(a, b) => vec![a, b],
            Comp(..) | Tensor(..) | Quant(..) | Ren(..) => vec![],
        }
    }

    pub fn is_primitive(&self) -> bool {
        !matches!(
            self,
            Arrow::Comp(..) | Arrow::Tensor(..) | Arrow::Quant(..) | Arrow::Ren(..)
        )
    }

    pub fn children(&self) -> Vec<&Arrow> {
        match self {
            Arrow::Comp(g, f) => vec![g, f],
            Arrow::Tensor(_, f, g) => vec![f, g],
            Arrow::Quant(_, _, f) | Arrow::Ren(_, _, f) => vec![f],
            _ => vec![],
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Arrow::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Arrow::depth)
            .max()
            .unwrap_or(0)
    }

    /// Subterm at a path of child indices.
    pub fn at(&self, path: &[usize]) -> Option<&Arrow> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i).and_then(|c| c.at(rest)),
        }
    }

    /// Replace the subterm at `path`.
    pub fn replace_at(&self, path: &[usize], new: Arrow) -> Option<Arrow> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(new);
        };
        Some(match (self, i) {
            (Arrow::Comp(g, f), 0) => Arrow::comp(g.replace_at(rest, new)?, (**f).clone()),
            (Arrow::Comp(g, f), 1) => Arrow::comp((**g).clone(), f.replace_at(rest, new)?),
            (Arrow::Tensor(op, f, g), 0) => {
                Arrow::tensor(*op, f.replace_at(rest, new)?, (**g).clone())
            }
            (Arrow::Tensor(op, f, g), 1) => {
                Arrow::tensor(*op, (**f).clone(), g.replace_at(rest, new)?)
            }
            (Arrow::Quant(q, x, f), 0) => Arrow::quant(*q, x.clone(), f.replace_at(rest, new)?),
            (Arrow::Ren(x, y, f), 0) => Arrow::ren(x.clone(), y.clone(), f.replace_at(rest, new)?),
            _ => return None,
        })
    }

    /// All paths, preorder.
    pub fn positions(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for (i, c) in self.children().into_iter().enumerate() {
            for mut p in c.positions() {
                p.insert(0, i);
                out.push(p);
            }
        }
        out
    }

    pub fn contains(&self, pred: &impl Fn(&Arrow) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.contains(pred))
    }

    /// Rename predicate letters in every index.
    pub fn map_formulas(&self, m: &impl Fn(&Formula) -> Formula) -> Arrow {
        use Arrow::*;
        match self {
            Id(a) => Id(m(a)),
            BHat(d, a, b, c) => BHat(*d, m(a), m(b), m(c)),
            BCheck(d, a, b, c) => BCheck(*d, m(a), m(b), m(c)),
            CHat(a, b) => CHat(m(a), m(b)),
            CCheck(a, b) => CCheck(m(a), m(b)),
            D(a, b, c) => D(m(a), m(b), m(c)),
            Iota(q, x, a) => Iota(*q, x.clone(), m(a)),
            Gamma(q, x, a) => Gamma(*q, x.clone(), m(a)),
            ThetaAllR(x, a, d) => ThetaAllR(x.clone(), m(a), m(d)),
            ThetaExL(x, a, d) => ThetaExL(x.clone(), m(a), m(d)),
            DeltaAll(b, a) => DeltaAll(m(b), m(a)),
            SigmaEx(b, a) => SigmaEx(m(b), m(a)),
            Mix(a, b) => Mix(m(a), m(b)),
            Comp(g, f) => Arrow::comp(g.map_formulas(m), f.map_formulas(m)),
            Tensor(op, f, g) => Arrow::tensor(*op, f.map_formulas(m), g.map_formulas(m)),
            Quant(q, x, f) => Arrow::quant(*q, x.clone(), f.map_formulas(m)),
            Ren(x, y, f) => Arrow::ren(x.clone(), y.clone(), f.map_formulas(m)),
        }
    }

    /// Primitive with every formula index (and bound variable of the
    /// index) substituted, as in the rhs of (ren α). `None` when a
    /// substitution is undefined.
    pub fn subst_primitive(&self, x: &Var, y: &Var) -> Option<Arrow> {
        use Arrow::*;
        let s = |a: &Formula| a.subst(x, y);
        Some(match self {
            Id(a) => Id(s(a)?),
            BHat(d, a, b, c) => BHat(*d, s(a)?, s(b)?, s(c)?),
            BCheck(d, a, b, c) => BCheck(*d, s(a)?, s(b)?, s(c)?),
            CHat(a, b) => CHat(s(a)?, s(b)?),
            CCheck(a, b) => CCheck(s(a)?, s(b)?),
            D(a, b, c) => D(s(a)?, s(b)?, s(c)?),
            Iota(q, z, a) | Gamma(q, z, a) => {
                let qa = Formula::quant(*q, z.clone(), a.clone()).subst(x, y)?;
                let Formula::Quant(_, z2, a2) = qa else {
                    unreachable!()
                };
                if matches!(self, Iota(..)) {
                    Iota(*q, z2, *a2)
                } else {
                    Gamma(*q, z2, *a2)
                }
            }
            ThetaAllR(z, a, d) | ThetaExL(z, a, d) => {
                if z == x {
                    return Some(self.clone());
                }
                if z == y && (a.is_free_in(x) || d.is_free_in(x)) {
                    return None;
                }
                if matches!(self, ThetaAllR(..)) {
                    ThetaAllR(z.clone(), s(a)?, s(d)?)
                } else {
                    ThetaExL(z.clone(), s(a)?, s(d)?)
                }
            }
            DeltaAll(b, a) => DeltaAll(b.clone(), s(a)?),
            SigmaEx(b, a) => SigmaEx(b.clone(), s(a)?),
            Mix(a, b) => Mix(s(a)?, s(b)?),
            Comp(..) | Tensor(..) | Quant(..) | Ren(..) => return None,
        })
    }
}

fn src(f: &Arrow) -> Result<Formula> {
    Ok(infer(f)?.source)
}

fn tgt(f: &Arrow) -> Result<Formula> {
    Ok(infer(f)?.target)
}

/// Q_{X̄} f = Q_{x_n}...Q_{x_1} f.
pub fn quant_seq(q: Quantifier, xs: &[Var], f: Arrow) -> Arrow {
    xs.iter().fold(f, |acc, x| Arrow::quant(q, x.clone(), acc))
}

/// d^R_{C,B,A}: (C∨B)∧A ⊢ C∨(B∧A).
pub fn d_r(c: &Formula, b: &Formula, a: &Formula) -> Arrow {
    Arrow::chain(vec![
        Arrow::CCheck(c.clone(), Formula::and(b.clone(), a.clone())),
        Arrow::or(Arrow::CHat(a.clone(), b.clone()), Arrow::id(c.clone())),
        Arrow::D(a.clone(), b.clone(), c.clone()),
        Arrow::and(Arrow::id(a.clone()), Arrow::CCheck(b.clone(), c.clone())),
        Arrow::CHat(Formula::or(c.clone(), b.clone()), a.clone()),
    ])
}

/// Change of bound variable τ^{Qx}_{A,a,b}: Q_a A^x_a ⊢ Q_b A^x_b; x is a
/// placeholder for the bound position.
pub fn tau(q: Quantifier, a_body: &Formula, x: &Var, a: &Var, b: &Var) -> Result<Arrow> {
    let others: Vec<Var> = a_body.free_vars().into_iter().filter(|v| v != x).collect();
    if others.contains(a) || others.contains(b) {
        return Err(ArrowError::ProvisoViolation(format!(
            "{a} or {b} is free in {a_body}"
        )));
    }
    let aa = subst_or_err(a_body, x, a)?;
    let ab = subst_or_err(a_body, x, b)?;
    let t = match q {
        Quantifier::All => Arrow::comp(
            Arrow::quant(
                q,
                b.clone(),
                Arrow::ren(a.clone(), b.clone(), Arrow::Iota(q, a.clone(), aa.clone())),
            ),
            Arrow::Gamma(q, b.clone(), Formula::all(a.clone(), aa)),
        ),
        Quantifier::Ex => Arrow::comp(
            Arrow::Gamma(q, a.clone(), Formula::ex(b.clone(), ab)),
            Arrow::quant(
                q,
                a.clone(),
                Arrow::ren(
                    b.clone(),
                    a.clone(),
                    Arrow::Iota(q, b.clone(), subst_or_err(a_body, x, b)?),
                ),
            ),
        ),
    };
    infer(&t)?;
    Ok(t)
}

/// The four defined distributivity arrows.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ThetaVariant {
    /// θ̌^{∀x←}_{A,D}: ∀xA∨D ⊢ ∀x(A∨D).
    AllOrLeft,
    /// θ̂^{∃x→}_{A,D}: ∃x(A∧D) ⊢ ∃xA∧D.
    ExAndRight,
    /// θ̂^{∀x←}_{A,D}: ∀xA∧D ⊢ ∀x(A∧D).
    AllAndLeft,
    /// θ̌^{∃x→}_{A,D}: ∃x(A∨D) ⊢ ∃xA∨D.
    ExOrRight,
}

pub fn derive_theta(v: ThetaVariant, x: &Var, a: &Formula, d: &Formula) -> Result<Arrow> {
    if d.is_free_in(x) {
        return Err(ArrowError::ProvisoViolation(format!("{x} is free in {d}")));
    }
    let xa_all = Formula::all(x.clone(), a.clone());
    let xa_ex = Formula::ex(x.clone(), a.clone());
    let iota_all = Arrow::Iota(Quantifier::All, x.clone(), a.clone());
    let iota_ex = Arrow::Iota(Quantifier::Ex, x.clone(), a.clone());
    let t = match v {
        ThetaVariant::AllOrLeft => Arrow::comp(
            Arrow::quant(
                Quantifier::All,
                x.clone(),
                Arrow::or(iota_all, Arrow::id(d.clone())),
            ),
            Arrow::Gamma(Quantifier::All, x.clone(), Formula::or(xa_all, d.clone())),
        ),
        ThetaVariant::ExAndRight => Arrow::comp(
            Arrow::Gamma(Quantifier::Ex, x.clone(), Formula::and(xa_ex, d.clone())),
            Arrow::quant(
                Quantifier::Ex,
                x.clone(),
                Arrow::and(iota_ex, Arrow::id(d.clone())),
            ),
        ),
        ThetaVariant::AllAndLeft => Arrow::comp(
            Arrow::quant(
                Quantifier::All,
                x.clone(),
                Arrow::and(iota_all, Arrow::id(d.clone())),
            ),
            Arrow::Gamma(Quantifier::All, x.clone(), Formula::and(xa_all, d.clone())),
        ),
        ThetaVariant::ExOrRight => Arrow::comp(
            Arrow::Gamma(Quantifier::Ex, x.clone(), Formula::or(xa_ex, d.clone())),
            Arrow::quant(
                Quantifier::Ex,
                x.clone(),
                Arrow::or(iota_ex, Arrow::id(d.clone())),
            ),
        ),
    };
    infer(&t)?;
    Ok(t)
}

/// ι^{Q X̄_n}_B: ∀X̄B ⊢ B for ∀, B ⊢ ∃X̄B for ∃.
pub fn iota_closure(q: Quantifier, xs: &[Var], b: &Formula) -> Arrow {
    match xs.split_last() {
        None => Arrow::id(b.clone()),
        Some((xn, rest)) => {
            let inner = Formula::quant_seq(q, rest, b.clone());
            let step = Arrow::Iota(q, xn.clone(), inner);
            match q {
                Quantifier::All => Arrow::comp(iota_closure(q, rest, b), step),
                Quantifier::Ex => Arrow::comp(step, iota_closure(q, rest, b)),
            }
        }
    }
}

/// γ^{Q X̄_n}_B: B ⊢ ∀X̄B for ∀, ∃X̄B ⊢ B for ∃.
pub fn gamma_closure(q: Quantifier, xs: &[Var], b: &Formula) -> Result<Arrow> {
    let t = gamma_closure_raw(q, xs, b);
    infer(&t)?;
    Ok(t)
}

fn gamma_closure_raw(q: Quantifier, xs: &[Var], b: &Formula) -> Arrow {
    match xs.split_last() {
        None => Arrow::id(b.clone()),
        Some((xn, rest)) => {
            let inner = Formula::quant_seq(q, rest, b.clone());
            let step = Arrow::Gamma(q, xn.clone(), inner);
            match q {
                Quantifier::All => Arrow::comp(step, gamma_closure_raw(q, rest, b)),
                Quantifier::Ex => Arrow::comp(gamma_closure_raw(q, rest, b), step),
            }
        }
    }
}

/// [f]^{X̄_n}_{Ȳ_n}.
pub fn ren_closure(xs: &[Var], ys: &[Var], f: Arrow) -> Result<Arrow> {
    assert_eq!(xs.len(), ys.len(), "renaming closure needs equal lengths");
    let t = xs
        .iter()
        .zip(ys)
        .fold(f, |acc, (x, y)| Arrow::ren(x.clone(), y.clone(), acc));
    infer(&t)?;
    Ok(t)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClosureKind {
    Iota,
    Gamma,
}

/// The closure abbreviations for ι and γ.
pub fn derive_closure(kind: ClosureKind, q: Quantifier, xs: &[Var], b: &Formula) -> Result<Arrow> {
    match kind {
        ClosureKind::Iota => Ok(iota_closure(q, xs, b)),
        ClosureKind::Gamma => gamma_closure(q, xs, b),
    }
}

/// The abbreviated Δ/Σ arrows.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum XiKind {
    SigmaAll,
    DeltaEx,
    DeltaCheck,
    SigmaHat,
    DeltaCheckP,
    SigmaHatP,
    DeltaPAll,
    SigmaPEx,
    SigmaPAll,
    DeltaPEx,
    SigmaCheck,
    DeltaHat,
    SigmaCheckP,
    DeltaHatP,
}

impl XiKind {
    pub const ALL: [XiKind; 14] = [
        XiKind::SigmaAll,
        XiKind::DeltaEx,
        XiKind::DeltaCheck,
        XiKind::SigmaHat,
        XiKind::DeltaCheckP,
        XiKind::SigmaHatP,
        XiKind::DeltaPAll,
        XiKind::SigmaPEx,
        XiKind::SigmaPAll,
        XiKind::DeltaPEx,
        XiKind::SigmaCheck,
        XiKind::DeltaHat,
        XiKind::SigmaCheckP,
        XiKind::DeltaHatP,
    ];
}

/// Δ/Σ abbreviations over crown B and stem A.
pub fn derive_xi(which: XiKind, b: &Formula, a: &Formula) -> Arrow {
    use XiKind::*;
    let nb = Formula::neg(b.clone());
    let xs = b.free_var_sequence();
    let id_a = Arrow::id(a.clone());
    match which {
        SigmaAll => Arrow::comp(
            Arrow::CHat(a.clone(), crown_all(b)),
            Arrow::DeltaAll(b.clone(), a.clone()),
        ),
        DeltaEx => Arrow::comp(
            Arrow::SigmaEx(b.clone(), a.clone()),
            Arrow::CCheck(crown_ex(b), a.clone()),
        ),
        DeltaCheck => Arrow::comp(
            Arrow::and(
                id_a,
                iota_closure(Quantifier::All, &xs, &Formula::or(nb, b.clone())),
            ),
            Arrow::DeltaAll(b.clone(), a.clone()),
        ),
        SigmaHat => Arrow::comp(
            Arrow::SigmaEx(b.clone(), a.clone()),
            Arrow::or(
                iota_closure(Quantifier::Ex, &xs, &Formula::and(b.clone(), nb)),
                id_a,
            ),
        ),
        DeltaCheckP => Arrow::comp(
            Arrow::and(id_a, Arrow::CCheck(b.clone(), nb)),
            derive_xi(DeltaCheck, b, a),
        ),
        SigmaHatP => Arrow::comp(
            derive_xi(SigmaHat, b, a),
            Arrow::or(Arrow::CHat(nb, b.clone()), id_a),
        ),
        DeltaPAll => Arrow::comp(
            Arrow::and(
                id_a,
                quant_seq(Quantifier::All, &xs, Arrow::CCheck(b.clone(), nb)),
            ),
            Arrow::DeltaAll(b.clone(), a.clone()),
        ),
        SigmaPEx => Arrow::comp(
            Arrow::SigmaEx(b.clone(), a.clone()),
            Arrow::or(
                quant_seq(Quantifier::Ex, &xs, Arrow::CHat(nb, b.clone())),
                id_a,
            ),
        ),
        SigmaPAll => Arrow::comp(
            Arrow::CHat(a.clone(), crown_all_p(b)),
            derive_xi(DeltaPAll, b, a),
        ),
        DeltaPEx => Arrow::comp(
            derive_xi(SigmaPEx, b, a),
            Arrow::CCheck(crown_ex_p(b), a.clone()),
        ),
        SigmaCheck => Arrow::comp(
            Arrow::CHat(a.clone(), Formula::or(nb, b.clone())),
            derive_xi(DeltaCheck, b, a),
        ),
        DeltaHat => Arrow::comp(
            derive_xi(SigmaHat, b, a),
            Arrow::CCheck(Formula::and(b.clone(), nb), a.clone()),
        ),
        SigmaCheckP => Arrow::comp(
            Arrow::CHat(a.clone(), Formula::or(b.clone(), nb)),
            derive_xi(DeltaCheckP, b, a),
        ),
        DeltaHatP => Arrow::comp(
            derive_xi(SigmaHatP, b, a),
            Arrow::CCheck(Formula::and(nb, b.clone()), a.clone()),
        ),
    }
}

pub fn derive_xi_family(which: XiKind, b: &Formula, a: &Formula) -> Result<Arrow> {
    let t = derive_xi(which, b, a);
    infer(&t)?;
    Ok(t)
}

/// A quantifier prefix Q_1 y_1 ... Q_k y_k, outermost first.
pub type PrefixSeq = Vec<(Quantifier, Var)>;

pub fn apply_prefix(s: &PrefixSeq, b: &Formula) -> Formula {
    s.iter()
        .rev()
        .fold(b.clone(), |acc, (q, y)| Formula::quant(*q, y.clone(), acc))
}

/// j^→_{S,B}: B ⊢ SB from γ^∀ and ι^∃.
pub fn prefix_iso_in(s: &PrefixSeq, b: &Formula) -> Arrow {
    let mut acc = Arrow::id(b.clone());
    let mut cur = b.clone();
    for (q, y) in s.iter().rev() {
        let step = match q {
            Quantifier::All => Arrow::Gamma(*q, y.clone(), cur.clone()),
            Quantifier::Ex => Arrow::Iota(*q, y.clone(), cur.clone()),
        };
        acc = Arrow::comp(step, acc);
        cur = Formula::quant(*q, y.clone(), cur);
    }
    acc
}

/// j^←_{S,B}: SB ⊢ B from ι^∀ and γ^∃.
pub fn prefix_iso_out(s: &PrefixSeq, b: &Formula) -> Arrow {
    let mut acc = Arrow::id(b.clone());
    let mut cur = b.clone();
    for (q, y) in s.iter().rev() {
        let step = match q {
            Quantifier::All => Arrow::Iota(*q, y.clone(), cur.clone()),
            Quantifier::Ex => Arrow::Gamma(*q, y.clone(), cur.clone()),
        };
        acc = Arrow::comp(acc, step);
        cur = Formula::quant(*q, y.clone(), cur);
    }
    acc
}

/// The index tuple I = (P X̄, A, Ȳ, S, S¬) of the generalized Δ/Σ arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiIndex {
    pub atom: Formula,
    pub stem: Formula,
    pub outer_vars: Vec<Var>,
    pub s_left: PrefixSeq,
    pub s_right: PrefixSeq,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum XiIKind {
    DeltaAll,
    SigmaEx,
    SigmaAll,
    DeltaEx,
    DeltaPAll,
    SigmaPEx,
    SigmaPAll,
    DeltaPEx,
}

impl XiIKind {
    pub const ALL: [XiIKind; 8] = [
        XiIKind::DeltaAll,
        XiIKind::SigmaEx,
        XiIKind::SigmaAll,
        XiIKind::DeltaEx,
        XiIKind::DeltaPAll,
        XiIKind::SigmaPEx,
        XiIKind::SigmaPAll,
        XiIKind::DeltaPEx,
    ];
}

/// Δ_I and relatives: the crown closure is unfolded by ι, the prefixes S
/// and S¬ are attached by j^→ (j^← on the Σ side), then the outer
/// variables Ȳ are closed.
pub fn derive_xi_i(which: XiIKind, idx: &XiIndex) -> Result<Arrow> {
    let p = &idx.atom;
    if !p.is_atom() {
        return Err(ArrowError::ProvisoViolation(format!(
            "crown index {p} is not atomic"
        )));
    }
    let fv = p.free_vars();
    if idx
        .s_left
        .iter()
        .chain(&idx.s_right)
        .any(|(_, y)| fv.contains(y))
    {
        return Err(ArrowError::ProvisoViolation(format!(
            "prefix sequence is not foreign to {p}"
        )));
    }
    let a = &idx.stem;
    let np = Formula::neg(p.clone());
    let xs = p.free_var_sequence();
    let ys = &idx.outer_vars;
    let sp = apply_prefix(&idx.s_left, p);
    let snp = apply_prefix(&idx.s_right, &np);
    let all = Quantifier::All;
    let ex = Quantifier::Ex;
    let delta = || -> Result<Arrow> {
        let inner = Arrow::comp(
            Arrow::or(
                prefix_iso_in(&idx.s_right, &np),
                prefix_iso_in(&idx.s_left, p),
            ),
            iota_closure(all, &xs, &Formula::or(np.clone(), p.clone())),
        );
        Ok(Arrow::comp(
            Arrow::and(
                Arrow::id(a.clone()),
                Arrow::comp(
                    quant_seq(all, ys, inner),
                    gamma_closure(all, ys, &crown_all(p))?,
                ),
            ),
            Arrow::DeltaAll(p.clone(), a.clone()),
        ))
    };
    let sigma = || -> Result<Arrow> {
        let inner = Arrow::comp(
            iota_closure(ex, &xs, &Formula::and(p.clone(), np.clone())),
            Arrow::and(
                prefix_iso_out(&idx.s_left, p),
                prefix_iso_out(&idx.s_right, &np),
            ),
        );
        Ok(Arrow::comp(
            Arrow::SigmaEx(p.clone(), a.clone()),
            Arrow::or(
                Arrow::comp(
                    gamma_closure(ex, ys, &crown_ex(p))?,
                    quant_seq(ex, ys, inner),
                ),
                Arrow::id(a.clone()),
            ),
        ))
    };
    let crown_d = Formula::quant_seq(all, ys, Formula::or(snp.clone(), sp.clone()));
    let crown_s = Formula::quant_seq(ex, ys, Formula::and(sp.clone(), snp.clone()));
    let crown_dp = Formula::quant_seq(all, ys, Formula::or(sp.clone(), snp.clone()));
    let crown_sp = Formula::quant_seq(ex, ys, Formula::and(snp.clone(), sp.clone()));
    let delta_p = || -> Result<Arrow> {
        Ok(Arrow::comp(
            Arrow::and(
                Arrow::id(a.clone()),
                quant_seq(all, ys, Arrow::CCheck(sp.clone(), snp.clone())),
            ),
            delta()?,
        ))
    };
    let sigma_p = || -> Result<Arrow> {
        Ok(Arrow::comp(
            sigma()?,
            Arrow::or(
                quant_seq(ex, ys, Arrow::CHat(snp.clone(), sp.clone())),
                Arrow::id(a.clone()),
            ),
        ))
    };
    let t = match which {
        XiIKind::DeltaAll => delta()?,
        XiIKind::SigmaEx => sigma()?,
        XiIKind::SigmaAll => Arrow::comp(Arrow::CHat(a.clone(), crown_d), delta()?),
        XiIKind::DeltaEx => Arrow::comp(sigma()?, Arrow::CCheck(crown_s, a.clone())),
        XiIKind::DeltaPAll => delta_p()?,
        XiIKind::SigmaPEx => sigma_p()?,
        XiIKind::SigmaPAll => Arrow::comp(Arrow::CHat(a.clone(), crown_dp), delta_p()?),
        XiIKind::DeltaPEx => Arrow::comp(sigma_p()?, Arrow::CCheck(crown_sp, a.clone())),
    };
    infer(&t)?;
    Ok(t)
}

/// Inverse of an arrow built from identities, associativity and
/// commutativity arrows, tensors and quantifier functors. `None` for
/// anything else.
pub fn invert_structural(t: &Arrow) -> Option<Arrow> {
    use Arrow::*;
    Some(match t {
        Id(a) => Id(a.clone()),
        BHat(d, a, b, c) => BHat(d.flip(), a.clone(), b.clone(), c.clone()),
        BCheck(d, a, b, c) => BCheck(d.flip(), a.clone(), b.clone(), c.clone()),
        CHat(a, b) => CHat(b.clone(), a.clone()),
        CCheck(a, b) => CCheck(b.clone(), a.clone()),
        Comp(g, f) => Arrow::comp(invert_structural(f)?, invert_structural(g)?),
        Tensor(op, f, g) => Arrow::tensor(*op, invert_structural(f)?, invert_structural(g)?),
        Quant(q, x, f) => Arrow::quant(*q, x.clone(), invert_structural(f)?),
        _ => return None,
    })
}

/// Source of a well-typed arrow.
pub fn source_of(f: &Arrow) -> Formula {
    src(f).expect("source_of on an ill-typed arrow")
}

/// Target of a well-typed arrow.
pub fn target_of(f: &Arrow) -> Formula {
    tgt(f).expect("target_of on an ill-typed arrow")
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Arrow::*;
        let dir = |d: &Dir| if *d == Dir::Right { "+" } else { "-" };
        match self {
            Id(a) => write!(f, "(id {{{a}}})"),
            BHat(d, a, b, c) => write!(f, "(bhat{} {{{a}}} {{{b}}} {{{c}}})", dir(d)),
            BCheck(d, a, b, c) => write!(f, "(bcheck{} {{{a}}} {{{b}}} {{{c}}})", dir(d)),
            CHat(a, b) => write!(f, "(chat {{{a}}} {{{b}}})"),
            CCheck(a, b) => write!(f, "(ccheck {{{a}}} {{{b}}})"),
            D(a, b, c) => write!(f, "(d {{{a}}} {{{b}}} {{{c}}})"),
            Iota(Quantifier::All, x, a) => write!(f, "(iota-all {x} {{{a}}})"),
            Iota(Quantifier::Ex, x, a) => write!(f, "(iota-ex {x} {{{a}}})"),
            Gamma(Quantifier::All, x, a) => write!(f, "(gamma-all {x} {{{a}}})"),
            Gamma(Quantifier::Ex, x, a) => write!(f, "(gamma-ex {x} {{{a}}})"),
            ThetaAllR(x, a, d) => write!(f, "(theta-all {x} {{{a}}} {{{d}}})"),
            ThetaExL(x, a, d) => write!(f, "(theta-ex {x} {{{a}}} {{{d}}})"),
            DeltaAll(b, a) => write!(f, "(delta-all {{{b}}} {{{a}}})"),
            SigmaEx(b, a) => write!(f, "(sigma-ex {{{b}}} {{{a}}})"),
            Mix(a, b) => write!(f, "(mix {{{a}}} {{{b}}})"),
            Comp(g, h) => write!(f, "(comp {g} {h})"),
            Tensor(Conn::And, g, h) => write!(f, "(and {g} {h})"),
            Tensor(Conn::Or, g, h) => write!(f, "(or {g} {h})"),
            Quant(Quantifier::All, x, g) => write!(f, "(all {x} {g})"),
            Quant(Quantifier::Ex, x, g) => write!(f, "(ex {x} {g})"),
            Ren(x, y, g) => write!(f, "(ren {x} {y} {g})"),
        }
    }
}

impl fmt::Debug for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Tokens of the s-expression syntax shared by arrow and Gentzen terms.
#[derive(Clone, Debug, PartialEq)]
pub enum SexpTok {
    Open,
    Close,
    Word(String),
    Formula(String),
}

pub fn lex_sexp(text: &str) -> Result<Vec<SexpTok>> {
    let mut out = Vec::new();
    let mut it = text.chars().peekable();
    while let Some(&c) = it.peek() {
        match c {
            '(' => {
                it.next();
                out.push(SexpTok::Open);
            }
            ')' => {
                it.next();
                out.push(SexpTok::Close);
            }
            '{' => {
                it.next();
                let mut depth = 0usize;
                let mut s = String::new();
                loop {
                    match it.next() {
                        None => return Err(ArrowError::Parse("unterminated '{'".into())),
                        Some('}') if depth == 0 => break,
                        Some(ch) => {
                            if ch == '{' {
                                depth += 1;
                            } else if ch == '}' {
                                depth -= 1;
                            }
                            s.push(ch);
                        }
                    }
                }
                out.push(SexpTok::Formula(s));
            }
            c if c.is_whitespace() => {
                it.next();
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = it.peek() {
                    if ch.is_whitespace() || "(){}".contains(ch) {
                        break;
                    }
                    s.push(ch);
                    it.next();
                }
                out.push(SexpTok::Word(s));
            }
        }
    }
    Ok(out)
}

/// Cursor over s-expression tokens, with a shared arity table.
pub struct SexpCursor {
    toks: Vec<SexpTok>,
    pos: usize,
    grammar: Grammar,
    arities: ArityTable,
}

impl SexpCursor {
    pub fn new(text: &str, grammar: Grammar) -> Result<SexpCursor> {
        Ok(SexpCursor {
            toks: lex_sexp(text)?,
            pos: 0,
            grammar,
            arities: ArityTable::default(),
        })
    }

    pub fn next(&mut self) -> Option<SexpTok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    pub fn peek(&self) -> Option<&SexpTok> {
        self.toks.get(self.pos)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn open(&mut self) -> Result<()> {
        match self.next() {
            Some(SexpTok::Open) => Ok(()),
            t => Err(ArrowError::Parse(format!("expected '(', found {t:?}"))),
        }
    }

    pub fn close(&mut self) -> Result<()> {
        match self.next() {
            Some(SexpTok::Close) => Ok(()),
            t => Err(ArrowError::Parse(format!("expected ')', found {t:?}"))),
        }
    }

    pub fn word(&mut self) -> Result<String> {
        match self.next() {
            Some(SexpTok::Word(w)) => Ok(w),
            t => Err(ArrowError::Parse(format!("expected a word, found {t:?}"))),
        }
    }

    pub fn var(&mut self) -> Result<Var> {
        let w = self.word()?;
        if w.chars().next().is_some_and(|c| c.is_ascii_lowercase()) {
            Ok(Var::new(w))
        } else {
            Err(ArrowError::Parse(format!("expected a variable, found {w}")))
        }
    }

    pub fn formula(&mut self) -> Result<Formula> {
        match self.next() {
            Some(SexpTok::Formula(s)) => Ok(crate::lang::parse_formula_with(
                &s,
                self.grammar,
                &mut self.arities,
            )?),
            t => Err(ArrowError::Parse(format!(
                "expected {{formula}}, found {t:?}"
            ))),
        }
    }

    pub fn arrow(&mut self) -> Result<Arrow> {
        use Arrow::*;
        self.open()?;
        let head = self.word()?;
        let t = match head.as_str() {
            "id" => Id(self.formula()?),
            "bhat+" | "bhat-" | "bcheck+" | "bcheck-" => {
                let d = if head.ends_with('+') {
                    Dir::Right
                } else {
                    Dir::Left
                };
                let (a, b, c) = (self.formula()?, self.formula()?, self.formula()?);
                if head.starts_with("bhat") {
                    BHat(d, a, b, c)
                } else {
                    BCheck(d, a, b, c)
                }
            }
            "chat" => CHat(self.formula()?, self.formula()?),
            "ccheck" => CCheck(self.formula()?, self.formula()?),
            "d" => D(self.formula()?, self.formula()?, self.formula()?),
            "iota-all" => Iota(Quantifier::All, self.var()?, self.formula()?),
            "iota-ex" => Iota(Quantifier::Ex, self.var()?, self.formula()?),
            "gamma-all" => Gamma(Quantifier::All, self.var()?, self.formula()?),
            "gamma-ex" => Gamma(Quantifier::Ex, self.var()?, self.formula()?),
            "theta-all" => ThetaAllR(self.var()?, self.formula()?, self.formula()?),
            "theta-ex" => ThetaExL(self.var()?, self.formula()?, self.formula()?),
            "delta-all" => DeltaAll(self.formula()?, self.formula()?),
            "sigma-ex" => SigmaEx(self.formula()?, self.formula()?),
            "mix" => Mix(self.formula()?, self.formula()?),
            "comp" => {
                let g = self.arrow()?;
                Arrow::comp(g, self.arrow()?)
            }
            "and" | "or" => {
                let f = self.arrow()?;
                let g = self.arrow()?;
                Arrow::tensor(if head == "and" { Conn::And } else { Conn::Or }, f, g)
            }
            "all" | "ex" => {
                let x = self.var()?;
                let q = if head == "all" {
                    Quantifier::All
                } else {
                    Quantifier::Ex
                };
                Arrow::quant(q, x, self.arrow()?)
            }
            "ren" => {
                let x = self.var()?;
                let y = self.var()?;
                Arrow::ren(x, y, self.arrow()?)
            }
            other => {
                return Err(ArrowError::Parse(format!(
                    "unknown arrow constructor {other}"
                )))
            }
        };
        self.close()?;
        Ok(t)
    }
}

/// Parse an arrow term in the s-expression syntax. Formula indices are read
/// with the grammar of `system`; typing is left to [`typecheck`].
pub fn parse_arrow(text: &str, system: SystemId) -> Result<Arrow> {
    let mut c = SexpCursor::new(text, system.grammar())?;
    let t = c.arrow()?;
    if !c.at_end() {
        return Err(ArrowError::Parse("trailing input after term".into()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{atom, var};

    fn p(s: &str) -> Formula {
        crate::lang::parse_formula(s, SystemId::QmpnNeg).unwrap()
    }

    #[test]
    fn primitive_typing() {
        let t = Arrow::Iota(Quantifier::All, var("x"), atom("P", &["x"]));
        assert_eq!(
            typecheck(&t, SystemId::Qds).unwrap().to_string(),
            "all x. P(x) |- P(x)"
        );
        let g = Arrow::Gamma(Quantifier::All, var("x"), atom("P", &["x"]));
        assert!(matches!(
            typecheck(&g, SystemId::Qds),
            Err(ArrowError::ProvisoViolation(_))
        ));
        let d = Arrow::DeltaAll(atom("P", &["x"]), atom("Q", &[]));
        assert_eq!(
            typecheck(&d, SystemId::QpnNeg).unwrap().target,
            p("Q & all x. (~P(x) | P(x))")
        );
        assert!(matches!(
            typecheck(&d, SystemId::Qds),
            Err(ArrowError::SystemViolation(_))
        ));
        let m = Arrow::Mix(atom("P", &[]), atom("Q", &[]));
        assert!(typecheck(&m, SystemId::Qmds).is_ok());
        assert!(matches!(
            typecheck(&m, SystemId::Qds),
            Err(ArrowError::SystemViolation(_))
        ));
    }

    #[test]
    fn renaming_checks_endpoints_only() {
        let f = Arrow::Iota(Quantifier::Ex, var("y"), p("R(x,y)"));
        let g = Arrow::Iota(Quantifier::Ex, var("x"), p("some y. R(x,y)"));
        assert!(matches!(
            mk_rename(&var("x"), &var("y"), f.clone()),
            Err(ArrowError::UndefinedSubstitution(_))
        ));
        assert!(mk_rename(&var("x"), &var("y"), g.clone()).is_err());
        assert!(mk_rename(&var("x"), &var("y"), Arrow::comp(g, f)).is_ok());
        let r = mk_rename(&var("x"), &var("y"), Arrow::id(p("P(x)"))).unwrap();
        assert_ne!(r, Arrow::id(p("P(y)")));
        assert_eq!(infer(&r).unwrap(), Sequent::new(p("P(y)"), p("P(y)")));
        let r1 = mk_rename(&var("x"), &var("x"), Arrow::id(p("P(x)"))).unwrap();
        assert_eq!(infer(&r1).unwrap(), Sequent::new(p("P(x)"), p("P(x)")));
    }

    #[test]
    fn tau_types() {
        let t = tau(Quantifier::All, &p("P(x)"), &var("x"), &var("u"), &var("v")).unwrap();
        assert_eq!(
            infer(&t).unwrap(),
            Sequent::new(p("all u. P(u)"), p("all v. P(v)"))
        );
        let t = tau(
            Quantifier::Ex,
            &p("P(x) & Q"),
            &var("x"),
            &var("u"),
            &var("v"),
        )
        .unwrap();
        assert_eq!(
            infer(&t).unwrap(),
            Sequent::new(p("some u. (P(u) & Q)"), p("some v. (P(v) & Q)"))
        );
        assert!(matches!(
            tau(
                Quantifier::All,
                &p("R(u,x)"),
                &var("x"),
                &var("u"),
                &var("v")
            ),
            Err(ArrowError::ProvisoViolation(_))
        ));
    }

    #[test]
    fn tau_placeholder_is_irrelevant() {
        let a = tau(
            Quantifier::All,
            &p("R(x,z)"),
            &var("x"),
            &var("u"),
            &var("v"),
        )
        .unwrap();
        let b = tau(
            Quantifier::All,
            &p("R(w,z)"),
            &var("w"),
            &var("u"),
            &var("v"),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn theta_types() {
        let (a, d) = (p("P(x)"), p("Q"));
        let t = derive_theta(ThetaVariant::AllOrLeft, &var("x"), &a, &d).unwrap();
        assert_eq!(
            infer(&t).unwrap(),
            Sequent::new(p("all x. P(x) | Q"), p("all x. (P(x) | Q)"))
        );
        let t = derive_theta(ThetaVariant::AllAndLeft, &var("x"), &a, &d).unwrap();
        assert_eq!(
            infer(&t).unwrap(),
            Sequent::new(p("all x. P(x) & Q"), p("all x. (P(x) & Q)"))
        );
        let t = derive_theta(ThetaVariant::ExOrRight, &var("x"), &a, &d).unwrap();
        assert_eq!(
            infer(&t).unwrap(),
            Sequent::new(p("some x. (P(x) | Q)"), p("some x. P(x) | Q"))
        );
    }

    #[test]
    fn closures() {
        let b = p("R(x,y)");
        assert_eq!(
            derive_closure(ClosureKind::Iota, Quantifier::All, &[], &b).unwrap(),
            Arrow::id(b.clone())
        );
        let t = derive_closure(
            ClosureKind::Iota,
            Quantifier::All,
            &[var("x"), var("y")],
            &b,
        )
        .unwrap();
        assert_eq!(
            infer(&t).unwrap(),
            Sequent::new(p("all y. all x. R(x,y)"), b.clone())
        );
        let t =
            derive_closure(ClosureKind::Iota, Quantifier::Ex, &[var("x"), var("y")], &b).unwrap();
        assert_eq!(
            infer(&t).unwrap(),
            Sequent::new(b.clone(), p("some y. some x. R(x,y)"))
        );
        let c = p("Q");
        let t = derive_closure(
            ClosureKind::Gamma,
            Quantifier::Ex,
            &[var("x"), var("y")],
            &c,
        )
        .unwrap();
        assert_eq!(infer(&t).unwrap(), Sequent::new(p("some y. some x. Q"), c));
        let f = Arrow::id(p("P(x)"));
        assert_eq!(
            ren_closure(&[var("x")], &[var("y")], f.clone()).unwrap(),
            mk_rename(&var("x"), &var("y"), f).unwrap()
        );
    }

    #[test]
    fn xi_family_types() {
        let b = p("P(x)");
        let a = p("Q");
        let expect = [
            (XiKind::SigmaAll, "Q", "all x. (~P(x) | P(x)) & Q"),
            (XiKind::DeltaEx, "Q | some x. (P(x) & ~P(x))", "Q"),
            (XiKind::DeltaCheck, "Q", "Q & (~P(x) | P(x))"),
            (XiKind::SigmaHat, "(P(x) & ~P(x)) | Q", "Q"),
            (XiKind::DeltaCheckP, "Q", "Q & (P(x) | ~P(x))"),
            (XiKind::SigmaHatP, "(~P(x) & P(x)) | Q", "Q"),
            (XiKind::DeltaPAll, "Q", "Q & all x. (P(x) | ~P(x))"),
            (XiKind::SigmaPEx, "some x. (~P(x) & P(x)) | Q", "Q"),
            (XiKind::SigmaPAll, "Q", "all x. (P(x) | ~P(x)) & Q"),
            (XiKind::DeltaPEx, "Q | some x. (~P(x) & P(x))", "Q"),
            (XiKind::SigmaCheck, "Q", "(~P(x) | P(x)) & Q"),
            (XiKind::DeltaHat, "Q | (P(x) & ~P(x))", "Q"),
            (XiKind::SigmaCheckP, "Q", "(P(x) | ~P(x)) & Q"),
            (XiKind::DeltaHatP, "Q | (~P(x) & P(x))", "Q"),
        ];
        for (k, s, t) in expect {
            let f = derive_xi_family(k, &b, &a).unwrap();
            assert_eq!(infer(&f).unwrap(), Sequent::new(p(s), p(t)), "{k:?}");
        }
    }

    #[test]
    fn xi_i_types() {
        let idx = XiIndex {
            atom: p("P(x)"),
            stem: p("Q"),
            outer_vars: vec![var("z")],
            s_left: vec![(Quantifier::All, var("u"))],
            s_right: vec![(Quantifier::Ex, var("v"))],
        };
        let t = derive_xi_i(XiIKind::DeltaAll, &idx).unwrap();
        assert_eq!(
            infer(&t).unwrap().target,
            p("Q & all z. (some v. ~P(x) | all u. P(x))")
        );
        let t = derive_xi_i(XiIKind::SigmaEx, &idx).unwrap();
        assert_eq!(
            infer(&t).unwrap().source,
            p("some z. (all u. P(x) & some v. ~P(x)) | Q")
        );
        for k in XiIKind::ALL {
            assert!(derive_xi_i(k, &idx).is_ok(), "{k:?}");
        }
        let bad = XiIndex {
            s_left: vec![(Quantifier::All, var("x"))],
            ..idx
        };
        assert!(matches!(
            derive_xi_i(XiIKind::DeltaAll, &bad),
            Err(ArrowError::ProvisoViolation(_))
        ));
    }

    #[test]
    fn d_r_type() {
        let t = d_r(&p("C"), &p("B"), &p("A"));
        assert_eq!(
            infer(&t).unwrap(),
            Sequent::new(p("(C | B) & A"), p("C | (B & A)"))
        );
    }

    #[test]
    fn sexp_round_trip() {
        let src =
            "(comp (ren x y (iota-all x {all x. P(x)})) (and (id {Q}) (theta-ex z {R(z)} {Q})))";
        let t = parse_arrow(src, SystemId::Qds).unwrap();
        assert_eq!(parse_arrow(&t.to_string(), SystemId::Qds).unwrap(), t);
        assert!(matches!(
            parse_arrow("(id {P}", SystemId::Qds),
            Err(ArrowError::Parse(_))
        ));
        assert!(matches!(
            parse_arrow("(frob {P})", SystemId::Qds),
            Err(ArrowError::Parse(_))
        ));
    }
}
