//! The equations of every system as data. A schema has metavariable slots
//! (variables, formulas, arrows with a source pattern and a named target),
//! an executable proviso and two sides written as patterns.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::Rng;

use crate::arrows::{
    crown_all, crown_ex, derive_theta, derive_xi, infer, quant_seq, tau, typecheck, Arrow, Dir,
    Sequent, ThetaVariant, XiKind,
};
use crate::gen::Generator;
use crate::lang::{Conn, Formula, Grammar, Quantifier, SystemId, Var};

/// Largest formula allowed for a formula metavariable.
pub const MAX_META_FORMULA: usize = 12;
/// Attempts at a random instance before giving up.
pub const MAX_TRIES: usize = 1000;

/// Bindings of metavariables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Env {
    pub vars: BTreeMap<&'static str, Var>,
    pub formulas: BTreeMap<&'static str, Formula>,
    pub arrows: BTreeMap<&'static str, Arrow>,
    pub seqs: BTreeMap<&'static str, Vec<Var>>,
}

impl Env {
    pub fn v(&self, n: &str) -> Var {
        self.vars
            .get(n)
            .unwrap_or_else(|| panic!("unbound variable meta {n}"))
            .clone()
    }

    pub fn f(&self, n: &str) -> Formula {
        self.formulas
            .get(n)
            .unwrap_or_else(|| panic!("unbound formula meta {n}"))
            .clone()
    }

    pub fn a(&self, n: &str) -> Arrow {
        self.arrows
            .get(n)
            .unwrap_or_else(|| panic!("unbound arrow meta {n}"))
            .clone()
    }

    pub fn s(&self, n: &str) -> Vec<Var> {
        self.seqs
            .get(n)
            .unwrap_or_else(|| panic!("unbound sequence meta {n}"))
            .clone()
    }

    fn bind_var(&mut self, n: &'static str, v: &Var) -> bool {
        match self.vars.get(n) {
            Some(w) => w == v,
            None => {
                self.vars.insert(n, v.clone());
                true
            }
        }
    }

    fn bind_formula(&mut self, n: &'static str, a: &Formula) -> bool {
        match self.formulas.get(n) {
            Some(b) => b == a,
            None => {
                self.formulas.insert(n, a.clone());
                true
            }
        }
    }

    fn bind_arrow(&mut self, n: &'static str, t: &Arrow) -> bool {
        match self.arrows.get(n) {
            Some(u) => u == t,
            None => {
                self.arrows.insert(n, t.clone());
                true
            }
        }
    }
}

/// Formula patterns. The computed forms are built from the environment and
/// match anything; an instance is always checked by rebuilding.
#[derive(Clone)]
pub enum FP {
    Meta(&'static str),
    Neg(Box<FP>),
    Bin(Conn, Box<FP>, Box<FP>),
    Quant(Quantifier, &'static str, Box<FP>),
    CrownAll(Box<FP>),
    CrownEx(Box<FP>),
    Subst(Box<FP>, &'static str, &'static str),
    Fn(fn(&Env) -> Option<Formula>),
}

/// Primitive arrow shapes; the variable slot names a variable meta.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prim {
    Id,
    BHat(Dir),
    BCheck(Dir),
    CHat,
    CCheck,
    D,
    Iota(Quantifier, &'static str),
    Gamma(Quantifier, &'static str),
    ThetaAllR(&'static str),
    ThetaExL(&'static str),
    DeltaAll,
    SigmaEx,
    Mix,
}

/// Arrow patterns. `Xi`, `Theta`, `Tau`, `RenPrim` and `Fn` are defined
/// arrows: built from the environment, never matched structurally.
#[derive(Clone)]
pub enum AP {
    Meta(&'static str),
    Prim(Prim, Vec<FP>),
    Comp(Box<AP>, Box<AP>),
    Tensor(Conn, Box<AP>, Box<AP>),
    Quant(Quantifier, &'static str, Box<AP>),
    Ren(&'static str, &'static str, Box<AP>),
    Xi(XiKind, FP, FP),
    Theta(ThetaVariant, &'static str, FP, FP),
    /// τ^{Qx}_{A,a,b} with body, placeholder, source and target variables.
    Tau(Quantifier, FP, &'static str, &'static str, &'static str),
    /// Right-hand side of (ren α): the primitive with substituted indices.
    RenPrim(&'static str, &'static str, Box<AP>),
    Fn(fn(&Env) -> Option<Arrow>),
}

#[derive(Clone)]
pub struct ArrowMeta {
    pub name: &'static str,
    pub source: FP,
    pub target: &'static str,
}

/// Which formula metas are crown indices: atomic in systems whose
/// negation is atomic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Any,
    Crown,
}

#[derive(Clone)]
pub struct AxiomSchema {
    pub name: String,
    /// Smallest system the equation belongs to.
    pub system: SystemId,
    /// Derived in the system rather than postulated.
    pub derived: bool,
    pub extra_vars: Vec<&'static str>,
    pub extra_formulas: Vec<&'static str>,
    pub crowns: Vec<&'static str>,
    /// Sequence metas with the formula whose free-variable sequence fixes
    /// their length.
    pub seqs: Vec<(&'static str, &'static str)>,
    pub arrows: Vec<ArrowMeta>,
    pub proviso: fn(&Env) -> bool,
    pub lhs: AP,
    pub rhs: AP,
}

impl std::fmt::Debug for AxiomSchema {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AxiomSchema({} in {})", self.name, self.system)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

/// A random instance: both sides built and typed in the schema's system.
#[derive(Clone, Debug)]
pub struct Instance {
    pub env: Env,
    pub lhs: Arrow,
    pub rhs: Arrow,
    pub lhs_type: Sequent,
    pub rhs_type: Sequent,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no match: {0}")]
pub struct NoMatch(pub String);

impl AxiomSchema {
    fn new(name: impl Into<String>, system: SystemId, lhs: AP, rhs: AP) -> AxiomSchema {
        AxiomSchema {
            name: name.into(),
            system,
            derived: false,
            extra_vars: vec![],
            extra_formulas: vec![],
            crowns: vec![],
            seqs: vec![],
            arrows: vec![],
            proviso: |_| true,
            lhs,
            rhs,
        }
    }

    fn arrow(mut self, name: &'static str, source: FP, target: &'static str) -> Self {
        self.arrows.push(ArrowMeta {
            name,
            source,
            target,
        });
        self
    }

    fn crown(mut self, names: &[&'static str]) -> Self {
        self.crowns.extend_from_slice(names);
        self
    }

    fn vars(mut self, names: &[&'static str]) -> Self {
        self.extra_vars.extend_from_slice(names);
        self
    }

    fn formulas(mut self, names: &[&'static str]) -> Self {
        self.extra_formulas.extend_from_slice(names);
        self
    }

    fn seq(mut self, name: &'static str, len_of: &'static str) -> Self {
        self.seqs.push((name, len_of));
        self
    }

    fn proviso(mut self, p: fn(&Env) -> bool) -> Self {
        self.proviso = p;
        self
    }

    fn derived(mut self) -> Self {
        self.derived = true;
        self
    }

    fn side(&self, d: Direction) -> (&AP, &AP) {
        match d {
            Direction::LeftToRight => (&self.lhs, &self.rhs),
            Direction::RightToLeft => (&self.rhs, &self.lhs),
        }
    }

    /// Variable and formula metas in order of first mention; arrow targets
    /// are excluded since arrows bind them.
    fn metas(&self) -> (Vec<&'static str>, Vec<&'static str>) {
        let mut vs = self.extra_vars.clone();
        let mut fs = self.extra_formulas.clone();
        for m in &self.arrows {
            collect_fp(&m.source, &mut vs, &mut fs);
        }
        collect_ap(&self.lhs, &mut vs, &mut fs);
        collect_ap(&self.rhs, &mut vs, &mut fs);
        fs.extend(self.crowns.iter().copied());
        let targets: Vec<&str> = self.arrows.iter().map(|m| m.target).collect();
        let mut seen = Vec::new();
        fs.retain(|f| {
            !targets.contains(f) && !seen.contains(f) && {
                seen.push(*f);
                true
            }
        });
        let mut seen = Vec::new();
        vs.retain(|v| {
            !seen.contains(v) && {
                seen.push(*v);
                true
            }
        });
        (vs, fs)
    }
}

fn push(v: &mut Vec<&'static str>, n: &'static str) {
    if !v.contains(&n) {
        v.push(n);
    }
}

fn collect_fp(p: &FP, vs: &mut Vec<&'static str>, fs: &mut Vec<&'static str>) {
    match p {
        FP::Meta(n) => push(fs, n),
        FP::Neg(a) | FP::CrownAll(a) | FP::CrownEx(a) => collect_fp(a, vs, fs),
        FP::Bin(_, a, b) => {
            collect_fp(a, vs, fs);
            collect_fp(b, vs, fs);
        }
        FP::Quant(_, x, a) => {
            push(vs, x);
            collect_fp(a, vs, fs);
        }
        FP::Subst(a, x, y) => {
            push(vs, x);
            push(vs, y);
            collect_fp(a, vs, fs);
        }
        FP::Fn(_) => {}
    }
}

fn collect_ap(p: &AP, vs: &mut Vec<&'static str>, fs: &mut Vec<&'static str>) {
    match p {
        AP::Meta(_) | AP::Fn(_) => {}
        AP::Prim(k, idx) => {
            match k {
                Prim::Iota(_, x) | Prim::Gamma(_, x) | Prim::ThetaAllR(x) | Prim::ThetaExL(x) => {
                    push(vs, x)
                }
                _ => {}
            }
            idx.iter().for_each(|i| collect_fp(i, vs, fs));
        }
        AP::Comp(g, f) | AP::Tensor(_, g, f) => {
            collect_ap(g, vs, fs);
            collect_ap(f, vs, fs);
        }
        AP::Quant(_, x, f) => {
            push(vs, x);
            collect_ap(f, vs, fs);
        }
        AP::Ren(x, y, f) | AP::RenPrim(x, y, f) => {
            push(vs, x);
            push(vs, y);
            collect_ap(f, vs, fs);
        }
        AP::Xi(_, b, a) => {
            collect_fp(b, vs, fs);
            collect_fp(a, vs, fs);
        }
        AP::Theta(_, x, a, d) => {
            push(vs, x);
            collect_fp(a, vs, fs);
            collect_fp(d, vs, fs);
        }
        AP::Tau(_, body, x, a, b) => {
            collect_fp(body, vs, fs);
            push(vs, x);
            push(vs, a);
            push(vs, b);
        }
    }
}

pub fn build_fp(p: &FP, e: &Env) -> Option<Formula> {
    Some(match p {
        FP::Meta(n) => e.f(n),
        FP::Neg(a) => Formula::neg(build_fp(a, e)?),
        FP::Bin(op, a, b) => Formula::bin(*op, build_fp(a, e)?, build_fp(b, e)?),
        FP::Quant(q, x, a) => Formula::quant(*q, e.v(x), build_fp(a, e)?),
        FP::CrownAll(b) => crown_all(&build_fp(b, e)?),
        FP::CrownEx(b) => crown_ex(&build_fp(b, e)?),
        FP::Subst(a, x, y) => build_fp(a, e)?.subst(&e.v(x), &e.v(y))?,
        FP::Fn(f) => f(e)?,
    })
}

fn build_prim(k: Prim, idx: Vec<Formula>, e: &Env) -> Arrow {
    let mut it = idx.into_iter();
    let mut n = || it.next().expect("primitive index arity");
    match k {
        Prim::Id => Arrow::Id(n()),
        Prim::BHat(d) => Arrow::BHat(d, n(), n(), n()),
        Prim::BCheck(d) => Arrow::BCheck(d, n(), n(), n()),
        Prim::CHat => Arrow::CHat(n(), n()),
        Prim::CCheck => Arrow::CCheck(n(), n()),
        Prim::D => Arrow::D(n(), n(), n()),
        Prim::Iota(q, x) => Arrow::Iota(q, e.v(x), n()),
        Prim::Gamma(q, x) => Arrow::Gamma(q, e.v(x), n()),
        Prim::ThetaAllR(x) => Arrow::ThetaAllR(e.v(x), n(), n()),
        Prim::ThetaExL(x) => Arrow::ThetaExL(e.v(x), n(), n()),
        Prim::DeltaAll => Arrow::DeltaAll(n(), n()),
        Prim::SigmaEx => Arrow::SigmaEx(n(), n()),
        Prim::Mix => Arrow::Mix(n(), n()),
    }
}

pub fn build_ap(p: &AP, e: &Env) -> Option<Arrow> {
    Some(match p {
        AP::Meta(n) => e.a(n),
        AP::Prim(k, idx) => {
            let fs = idx
                .iter()
                .map(|i| build_fp(i, e))
                .collect::<Option<Vec<_>>>()?;
            build_prim(*k, fs, e)
        }
        AP::Comp(g, f) => Arrow::comp(build_ap(g, e)?, build_ap(f, e)?),
        AP::Tensor(op, f, g) => Arrow::tensor(*op, build_ap(f, e)?, build_ap(g, e)?),
        AP::Quant(q, x, f) => Arrow::quant(*q, e.v(x), build_ap(f, e)?),
        AP::Ren(x, y, f) => Arrow::ren(e.v(x), e.v(y), build_ap(f, e)?),
        AP::Xi(k, b, a) => derive_xi(*k, &build_fp(b, e)?, &build_fp(a, e)?),
        AP::Theta(v, x, a, d) => {
            derive_theta(*v, &e.v(x), &build_fp(a, e)?, &build_fp(d, e)?).ok()?
        }
        AP::Tau(q, body, x, a, b) => {
            tau(*q, &build_fp(body, e)?, &e.v(x), &e.v(a), &e.v(b)).ok()?
        }
        AP::RenPrim(x, y, f) => build_ap(f, e)?.subst_primitive(&e.v(x), &e.v(y))?,
        AP::Fn(f) => f(e)?,
    })
}

fn match_fp(p: &FP, a: &Formula, e: &mut Env) -> bool {
    match (p, a) {
        (FP::Meta(n), _) => e.bind_formula(n, a),
        (FP::Neg(p), Formula::Neg(b)) => match_fp(p, b, e),
        (FP::Bin(op, p1, p2), Formula::Bin(op2, a1, a2)) => {
            op == op2 && match_fp(p1, a1, e) && match_fp(p2, a2, e)
        }
        (FP::Quant(q, x, p), Formula::Quant(q2, y, b)) => {
            q == q2 && e.bind_var(x, y) && match_fp(p, b, e)
        }
        (FP::CrownAll(_) | FP::CrownEx(_) | FP::Subst(..) | FP::Fn(_), _) => true,
        _ => false,
    }
}

fn match_prim(k: Prim, idx: &[FP], t: &Arrow, e: &mut Env) -> bool {
    use Arrow as A;
    let (var, forms): (Option<(&'static str, &Var)>, Vec<&Formula>) = match (k, t) {
        (Prim::Id, A::Id(a)) => (None, vec![a]),
        (Prim::BHat(d), A::BHat(d2, a, b, c)) | (Prim::BCheck(d), A::BCheck(d2, a, b, c))
            if d == *d2 =>
        {
            (None, vec![a, b, c])
        }
        (Prim::CHat, A::CHat(a, b))
        | (Prim::CCheck, A::CCheck(a, b))
        | (Prim::Mix, A::Mix(a, b)) => (None, vec![a, b]),
        (Prim::DeltaAll, A::DeltaAll(a, b)) | (Prim::SigmaEx, A::SigmaEx(a, b)) => {
            (None, vec![a, b])
        }
        (Prim::D, A::D(a, b, c)) => (None, vec![a, b, c]),
        (Prim::Iota(q, x), A::Iota(q2, y, a)) | (Prim::Gamma(q, x), A::Gamma(q2, y, a))
            if q == *q2 =>
        {
            (Some((x, y)), vec![a])
        }
        (Prim::ThetaAllR(x), A::ThetaAllR(y, a, d)) | (Prim::ThetaExL(x), A::ThetaExL(y, a, d)) => {
            (Some((x, y)), vec![a, d])
        }
        _ => return false,
    };
    if let Some((x, y)) = var {
        if !e.bind_var(x, y) {
            return false;
        }
    }
    idx.iter().zip(forms).all(|(p, a)| match_fp(p, a, e))
}

fn match_ap(p: &AP, t: &Arrow, e: &mut Env) -> bool {
    match (p, t) {
        (AP::Meta(n), _) => e.bind_arrow(n, t),
        (AP::Prim(k, idx), _) => match_prim(*k, idx, t, e),
        (AP::Comp(pg, pf), Arrow::Comp(g, f)) => match_ap(pg, g, e) && match_ap(pf, f, e),
        (AP::Tensor(op, pf, pg), Arrow::Tensor(op2, f, g)) => {
            op == op2 && match_ap(pf, f, e) && match_ap(pg, g, e)
        }
        (AP::Quant(q, x, pf), Arrow::Quant(q2, y, f)) => {
            q == q2 && e.bind_var(x, y) && match_ap(pf, f, e)
        }
        (AP::Ren(x, y, pf), Arrow::Ren(x2, y2, f)) => {
            e.bind_var(x, x2) && e.bind_var(y, y2) && match_ap(pf, f, e)
        }
        (AP::Xi(..) | AP::Theta(..) | AP::Tau(..) | AP::RenPrim(..) | AP::Fn(_), _) => true,
        _ => false,
    }
}

/// Fill every unbound meta at random. Arrow metas bound already have
/// their endpoints matched against the declared source and target.
fn fill(s: &AxiomSchema, g: &mut Generator, e: &mut Env) -> Option<()> {
    let (vs, fs) = s.metas();
    for m in &s.arrows {
        if let Some(t) = e.arrows.get(m.name).cloned() {
            let ty = infer(&t).ok()?;
            if !match_fp(&m.source, &ty.source, e) || !e.bind_formula(m.target, &ty.target) {
                return None;
            }
        }
    }
    for v in vs {
        if !e.vars.contains_key(v) {
            let x = g.var();
            e.vars.insert(v, x);
        }
    }
    let atomic_crowns = g.system.grammar() == Grammar::AtomNeg;
    for f in fs {
        if e.formulas.contains_key(f) {
            continue;
        }
        let a = if s.crowns.contains(&f) {
            if atomic_crowns {
                g.atom()
            } else {
                let n = g.rng.gen_range(1..=3);
                g.formula(n)
            }
        } else {
            let n = g.rng.gen_range(1..=5);
            g.formula(n)
        };
        if a.size() > MAX_META_FORMULA {
            return None;
        }
        e.formulas.insert(f, a);
    }
    for (n, len_of) in &s.seqs {
        if !e.seqs.contains_key(n) {
            let k = e.f(len_of).free_var_sequence().len();
            let xs = (0..k).map(|_| g.var()).collect();
            e.seqs.insert(n, xs);
        }
    }
    for m in &s.arrows {
        if e.arrows.contains_key(m.name) {
            continue;
        }
        let src = build_fp(&m.source, e)?;
        let budget = g.rng.gen_range(0..=3);
        let t = g.arrow_from(&src, budget);
        let ty = infer(&t).ok()?;
        if ty.target.size() > MAX_META_FORMULA * 2 || !e.bind_formula(m.target, &ty.target) {
            return None;
        }
        e.arrows.insert(m.name, t);
    }
    Some(())
}

fn sides(s: &AxiomSchema, e: &Env, system: SystemId) -> Option<Instance> {
    if !(s.proviso)(e) {
        return None;
    }
    let lhs = build_ap(&s.lhs, e)?;
    let rhs = build_ap(&s.rhs, e)?;
    let lhs_type = typecheck(&lhs, system).ok()?;
    let rhs_type = typecheck(&rhs, system).ok()?;
    Some(Instance {
        env: e.clone(),
        lhs,
        rhs,
        lhs_type,
        rhs_type,
    })
}

/// A random instance with both sides defined, or `None` after
/// [`MAX_TRIES`] attempts. The generator's system is used for typing.
pub fn instantiate(s: &AxiomSchema, g: &mut Generator) -> Option<Instance> {
    for _ in 0..MAX_TRIES {
        g.reset_letters();
        let mut e = Env::default();
        if fill(s, g, &mut e).is_none() {
            continue;
        }
        if let Some(inst) = sides(s, &e, g.system) {
            return Some(inst);
        }
    }
    None
}

/// Replace the subterm of `f` at `path` by the other side of `schema`.
/// Metas not fixed by the match are filled from `g`; the result has the
/// type of `f`.
pub fn rewrite_once(
    f: &Arrow,
    schema: &AxiomSchema,
    path: &[usize],
    dir: Direction,
    g: &mut Generator,
) -> Result<Arrow, NoMatch> {
    let sub = f
        .at(path)
        .ok_or_else(|| NoMatch(format!("no subterm at {path:?}")))?;
    let sub_type = infer(sub).map_err(|e| NoMatch(e.to_string()))?;
    let (from, to) = schema.side(dir);
    let mut base = Env::default();
    if !match_ap(from, sub, &mut base) {
        return Err(NoMatch(format!("{} does not match {sub}", schema.name)));
    }
    for _ in 0..64 {
        let mut e = base.clone();
        if fill(schema, g, &mut e).is_none() || !(schema.proviso)(&e) {
            continue;
        }
        if build_ap(from, &e).as_ref() != Some(sub) {
            continue;
        }
        let Some(new) = build_ap(to, &e) else {
            continue;
        };
        match typecheck(&new, g.system) {
            Ok(ty) if ty == sub_type => {}
            _ => continue,
        }
        if let Some(out) = f.replace_at(path, new) {
            if typecheck(&out, g.system).is_ok() {
                return Ok(out);
            }
        }
    }
    Err(NoMatch(format!(
        "{} matched {sub} but no instance was defined",
        schema.name
    )))
}

/// Every equation available in `system`, derived ones included.
pub fn axiom_schemas(system: SystemId) -> Vec<&'static AxiomSchema> {
    all_schemas()
        .iter()
        .filter(|s| system.includes(s.system))
        .collect()
}

pub fn all_schemas() -> &'static [AxiomSchema] {
    static TABLE: OnceLock<Vec<AxiomSchema>> = OnceLock::new();
    TABLE.get_or_init(table)
}

pub fn find_schema(name: &str) -> Option<&'static AxiomSchema> {
    all_schemas().iter().find(|s| s.name == name)
}

// Pattern constructors.

fn f(n: &'static str) -> FP {
    FP::Meta(n)
}
fn neg(a: FP) -> FP {
    FP::Neg(Box::new(a))
}
fn bin(op: Conn, a: FP, b: FP) -> FP {
    FP::Bin(op, Box::new(a), Box::new(b))
}
fn and(a: FP, b: FP) -> FP {
    bin(Conn::And, a, b)
}
fn or(a: FP, b: FP) -> FP {
    bin(Conn::Or, a, b)
}
fn qf(q: Quantifier, x: &'static str, a: FP) -> FP {
    FP::Quant(q, x, Box::new(a))
}
fn kall(b: FP) -> FP {
    FP::CrownAll(Box::new(b))
}
fn kex(b: FP) -> FP {
    FP::CrownEx(Box::new(b))
}
fn sub(a: FP, x: &'static str, y: &'static str) -> FP {
    FP::Subst(Box::new(a), x, y)
}

fn a(n: &'static str) -> AP {
    AP::Meta(n)
}
fn prim(k: Prim, idx: Vec<FP>) -> AP {
    AP::Prim(k, idx)
}
fn id(p: FP) -> AP {
    prim(Prim::Id, vec![p])
}
fn assoc(op: Conn, d: Dir, p: FP, q: FP, r: FP) -> AP {
    let k = if op == Conn::And {
        Prim::BHat(d)
    } else {
        Prim::BCheck(d)
    };
    prim(k, vec![p, q, r])
}
fn ch(p: FP, q: FP) -> AP {
    prim(Prim::CHat, vec![p, q])
}
fn cc(p: FP, q: FP) -> AP {
    prim(Prim::CCheck, vec![p, q])
}
fn dd(p: FP, q: FP, r: FP) -> AP {
    prim(Prim::D, vec![p, q, r])
}
fn io(q: Quantifier, x: &'static str, p: FP) -> AP {
    prim(Prim::Iota(q, x), vec![p])
}
fn ga(q: Quantifier, x: &'static str, p: FP) -> AP {
    prim(Prim::Gamma(q, x), vec![p])
}
fn ta(x: &'static str, p: FP, d: FP) -> AP {
    prim(Prim::ThetaAllR(x), vec![p, d])
}
fn te(x: &'static str, p: FP, d: FP) -> AP {
    prim(Prim::ThetaExL(x), vec![p, d])
}
fn de(b: FP, p: FP) -> AP {
    prim(Prim::DeltaAll, vec![b, p])
}
fn si(b: FP, p: FP) -> AP {
    prim(Prim::SigmaEx, vec![b, p])
}
fn mx(p: FP, q: FP) -> AP {
    prim(Prim::Mix, vec![p, q])
}
fn c(g: AP, f: AP) -> AP {
    AP::Comp(Box::new(g), Box::new(f))
}
/// fs[0]∘fs[1]∘..., nested like `Arrow::chain`.
fn chain(fs: Vec<AP>) -> AP {
    let mut it = fs.into_iter().rev();
    let first = it.next().expect("nonempty chain");
    it.fold(first, |acc, g| c(g, acc))
}
fn t(op: Conn, f: AP, g: AP) -> AP {
    AP::Tensor(op, Box::new(f), Box::new(g))
}
fn tand(f: AP, g: AP) -> AP {
    t(Conn::And, f, g)
}
fn tor(f: AP, g: AP) -> AP {
    t(Conn::Or, f, g)
}
fn qa(q: Quantifier, x: &'static str, f: AP) -> AP {
    AP::Quant(q, x, Box::new(f))
}
fn rn(x: &'static str, y: &'static str, f: AP) -> AP {
    AP::Ren(x, y, Box::new(f))
}
fn xi(k: XiKind, b: FP, p: FP) -> AP {
    AP::Xi(k, b, p)
}
fn th(v: ThetaVariant, x: &'static str, p: FP, d: FP) -> AP {
    AP::Theta(v, x, p, d)
}
fn tau_p(q: Quantifier, body: FP, x: &'static str, u: &'static str, v: &'static str) -> AP {
    AP::Tau(q, body, x, u, v)
}
/// d^R_{C,B,A} spelled out so that it can be matched.
fn dr(cf: FP, bf: FP, af: FP) -> AP {
    chain(vec![
        cc(cf.clone(), and(bf.clone(), af.clone())),
        tor(ch(af.clone(), bf.clone()), id(cf.clone())),
        dd(af.clone(), bf.clone(), cf.clone()),
        tand(id(af.clone()), cc(bf.clone(), cf.clone())),
        ch(or(cf, bf), af),
    ])
}

fn distinct(e: &Env, names: &[&str]) -> bool {
    let vs: Vec<Var> = names.iter().map(|n| e.v(n)).collect();
    vs.iter().enumerate().all(|(i, v)| !vs[i + 1..].contains(v))
}

fn op_sym(op: Conn) -> &'static str {
    op.symbol()
}

fn q_sym(q: Quantifier) -> &'static str {
    match q {
        Quantifier::All => "∀",
        Quantifier::Ex => "∃",
    }
}

/// Q_{X̄}(¬B∨B) closures of τ with sequence metas U and V over
/// X̄ = fvseq(B); the proviso keeps the substitutions independent.
fn tau_seq(q: Quantifier, body: &Formula, xs: &[Var], src: &[Var], tgt: &[Var]) -> Option<Arrow> {
    let subst_all = |a: &Formula, ys: &[Var]| -> Option<Formula> {
        xs.iter()
            .zip(ys)
            .try_fold(a.clone(), |acc, (x, y)| acc.subst(x, y))
    };
    let ren = |f: Arrow, from: &[Var], to: &[Var]| -> Arrow {
        from.iter()
            .zip(to)
            .fold(f, |acc, (u, v)| Arrow::ren(u.clone(), v.clone(), acc))
    };
    use crate::arrows::{gamma_closure, iota_closure};
    let t = match q {
        Quantifier::All => {
            let au = subst_all(body, src)?;
            let qu = Formula::quant_seq(q, src, au.clone());
            Arrow::comp(
                quant_seq(q, tgt, ren(iota_closure(q, src, &au), src, tgt)),
                gamma_closure(q, tgt, &qu).ok()?,
            )
        }
        Quantifier::Ex => {
            let au = subst_all(body, tgt)?;
            let qu = Formula::quant_seq(q, tgt, au.clone());
            Arrow::comp(
                gamma_closure(q, src, &qu).ok()?,
                quant_seq(q, src, ren(iota_closure(q, tgt, &au), tgt, src)),
            )
        }
    };
    infer(&t).ok()?;
    Some(t)
}

fn seq_subst(b: &Formula, xs: &[Var], ys: &[Var]) -> Option<Formula> {
    xs.iter()
        .zip(ys)
        .try_fold(b.clone(), |acc, (x, y)| acc.subst(x, y))
}

/// X̄ = fvseq(B) and the sequences U, V are pairwise disjoint and
/// repetition free.
fn tau_seq_ok(e: &Env) -> bool {
    let xs = e.f("B").free_var_sequence();
    let mut all: Vec<Var> = xs;
    all.extend(e.s("U"));
    all.extend(e.s("V"));
    all.iter()
        .enumerate()
        .all(|(i, v)| !all[i + 1..].contains(v))
}

fn table() -> Vec<AxiomSchema> {
    use Conn::{And, Or};
    use Dir::{Left, Right};
    use Quantifier::{All, Ex};
    use SystemId::{Qds, Qmds, QpnNeg};
    let mut out = Vec::new();

    // Categorial equations.
    out.push(
        AxiomSchema::new("(cat 1) right", Qds, c(a("f"), id(f("A"))), a("f")).arrow(
            "f",
            f("A"),
            "B",
        ),
    );
    out.push(
        AxiomSchema::new("(cat 1) left", Qds, c(id(f("B")), a("f")), a("f")).arrow(
            "f",
            f("A"),
            "B",
        ),
    );
    out.push(
        AxiomSchema::new(
            "(cat 2)",
            Qds,
            c(a("h"), c(a("g"), a("f"))),
            c(c(a("h"), a("g")), a("f")),
        )
        .arrow("f", f("A"), "B")
        .arrow("g", f("B"), "C")
        .arrow("h", f("C"), "D"),
    );

    // Monoidal structure, for each connective.
    for op in [And, Or] {
        let s = op_sym(op);
        let b = |x: FP, y: FP| bin(op, x, y);
        out.push(AxiomSchema::new(
            format!("({s}1)"),
            Qds,
            t(op, id(f("A")), id(f("B"))),
            id(b(f("A"), f("B"))),
        ));
        out.push(
            AxiomSchema::new(
                format!("({s}2)"),
                Qds,
                t(op, c(a("g1"), a("f1")), c(a("g2"), a("f2"))),
                c(t(op, a("g1"), a("g2")), t(op, a("f1"), a("f2"))),
            )
            .arrow("f1", f("A"), "B")
            .arrow("g1", f("B"), "C")
            .arrow("f2", f("D"), "E")
            .arrow("g2", f("E"), "F"),
        );
        out.push(
            AxiomSchema::new(
                format!("(b{s}→ nat)"),
                Qds,
                c(
                    t(op, t(op, a("f"), a("g")), a("h")),
                    assoc(op, Right, f("A"), f("B"), f("C")),
                ),
                c(
                    assoc(op, Right, f("D"), f("E"), f("F")),
                    t(op, a("f"), t(op, a("g"), a("h"))),
                ),
            )
            .arrow("f", f("A"), "D")
            .arrow("g", f("B"), "E")
            .arrow("h", f("C"), "F"),
        );
        out.push(AxiomSchema::new(
            format!("(b{s}b{s}) →←"),
            Qds,
            c(
                assoc(op, Right, f("A"), f("B"), f("C")),
                assoc(op, Left, f("A"), f("B"), f("C")),
            ),
            id(b(b(f("A"), f("B")), f("C"))),
        ));
        out.push(AxiomSchema::new(
            format!("(b{s}b{s}) ←→"),
            Qds,
            c(
                assoc(op, Left, f("A"), f("B"), f("C")),
                assoc(op, Right, f("A"), f("B"), f("C")),
            ),
            id(b(f("A"), b(f("B"), f("C")))),
        ));
        out.push(AxiomSchema::new(
            format!("(b{s}5)"),
            Qds,
            c(
                assoc(op, Left, f("A"), f("B"), b(f("C"), f("D"))),
                assoc(op, Left, b(f("A"), f("B")), f("C"), f("D")),
            ),
            chain(vec![
                t(op, id(f("A")), assoc(op, Left, f("B"), f("C"), f("D"))),
                assoc(op, Left, f("A"), b(f("B"), f("C")), f("D")),
                t(op, assoc(op, Left, f("A"), f("B"), f("C")), id(f("D"))),
            ]),
        ));
    }
    out.push(
        AxiomSchema::new(
            "(ĉ nat)",
            Qds,
            c(tand(a("g"), a("f")), ch(f("A"), f("B"))),
            c(ch(f("D"), f("E")), tand(a("f"), a("g"))),
        )
        .arrow("f", f("A"), "D")
        .arrow("g", f("B"), "E"),
    );
    out.push(
        AxiomSchema::new(
            "(č nat)",
            Qds,
            c(tor(a("g"), a("f")), cc(f("B"), f("A"))),
            c(cc(f("E"), f("D")), tor(a("f"), a("g"))),
        )
        .arrow("f", f("A"), "D")
        .arrow("g", f("B"), "E"),
    );
    out.push(
        AxiomSchema::new(
            "(d nat)",
            Qds,
            c(
                tor(tand(a("f"), a("g")), a("h")),
                dd(f("A"), f("B"), f("C")),
            ),
            c(
                dd(f("D"), f("E"), f("F")),
                tand(a("f"), tor(a("g"), a("h"))),
            ),
        )
        .arrow("f", f("A"), "D")
        .arrow("g", f("B"), "E")
        .arrow("h", f("C"), "F"),
    );
    out.push(AxiomSchema::new(
        "(ĉĉ)",
        Qds,
        c(ch(f("B"), f("A")), ch(f("A"), f("B"))),
        id(and(f("A"), f("B"))),
    ));
    out.push(AxiomSchema::new(
        "(čč)",
        Qds,
        c(cc(f("A"), f("B")), cc(f("B"), f("A"))),
        id(or(f("A"), f("B"))),
    ));
    out.push(AxiomSchema::new(
        "(b̂ĉ)",
        Qds,
        chain(vec![
            tand(id(f("B")), ch(f("C"), f("A"))),
            assoc(And, Left, f("B"), f("C"), f("A")),
            ch(f("A"), and(f("B"), f("C"))),
            assoc(And, Left, f("A"), f("B"), f("C")),
            tand(ch(f("B"), f("A")), id(f("C"))),
        ]),
        assoc(And, Left, f("B"), f("A"), f("C")),
    ));
    out.push(AxiomSchema::new(
        "(b̌č)",
        Qds,
        chain(vec![
            tor(id(f("B")), cc(f("A"), f("C"))),
            assoc(Or, Left, f("B"), f("C"), f("A")),
            cc(or(f("B"), f("C")), f("A")),
            assoc(Or, Left, f("A"), f("B"), f("C")),
            tor(cc(f("A"), f("B")), id(f("C"))),
        ]),
        assoc(Or, Left, f("B"), f("A"), f("C")),
    ));
    out.push(AxiomSchema::new(
        "(d∧)",
        Qds,
        c(
            tor(assoc(And, Left, f("A"), f("B"), f("C")), id(f("D"))),
            dd(and(f("A"), f("B")), f("C"), f("D")),
        ),
        chain(vec![
            dd(f("A"), and(f("B"), f("C")), f("D")),
            tand(id(f("A")), dd(f("B"), f("C"), f("D"))),
            assoc(And, Left, f("A"), f("B"), or(f("C"), f("D"))),
        ]),
    ));
    out.push(AxiomSchema::new(
        "(d∨)",
        Qds,
        c(
            dd(f("D"), f("C"), or(f("B"), f("A"))),
            tand(id(f("D")), assoc(Or, Left, f("C"), f("B"), f("A"))),
        ),
        chain(vec![
            assoc(Or, Left, and(f("D"), f("C")), f("B"), f("A")),
            tor(dd(f("D"), f("C"), f("B")), id(f("A"))),
            dd(f("D"), or(f("C"), f("B")), f("A")),
        ]),
    ));
    out.push(AxiomSchema::new(
        "(d b̂)",
        Qds,
        c(
            dr(and(f("A"), f("B")), f("C"), f("D")),
            tand(dd(f("A"), f("B"), f("C")), id(f("D"))),
        ),
        chain(vec![
            dd(f("A"), f("B"), and(f("C"), f("D"))),
            tand(id(f("A")), dr(f("B"), f("C"), f("D"))),
            assoc(And, Left, f("A"), or(f("B"), f("C")), f("D")),
        ]),
    ));
    out.push(AxiomSchema::new(
        "(d b̌)",
        Qds,
        c(
            tor(id(f("D")), dd(f("C"), f("B"), f("A"))),
            dr(f("D"), f("C"), or(f("B"), f("A"))),
        ),
        chain(vec![
            assoc(Or, Left, f("D"), and(f("C"), f("B")), f("A")),
            tor(dr(f("D"), f("C"), f("B")), id(f("A"))),
            dd(or(f("D"), f("C")), f("B"), f("A")),
        ]),
    ));

    // Quantifiers.
    for q in [All, Ex] {
        let s = q_sym(q);
        out.push(AxiomSchema::new(
            format!("({s}1)"),
            Qds,
            qa(q, "x", id(f("A"))),
            id(qf(q, "x", f("A"))),
        ));
        out.push(
            AxiomSchema::new(
                format!("({s}2)"),
                Qds,
                qa(q, "x", c(a("g"), a("f"))),
                c(qa(q, "x", a("g")), qa(q, "x", a("f"))),
            )
            .arrow("f", f("A"), "B")
            .arrow("g", f("B"), "C"),
        );
    }
    out.push(
        AxiomSchema::new(
            "(∀ι nat)",
            Qds,
            c(a("f"), io(All, "x", f("A"))),
            c(io(All, "x", f("B")), qa(All, "x", a("f"))),
        )
        .arrow("f", f("A"), "B"),
    );
    out.push(
        AxiomSchema::new(
            "(∃ι nat)",
            Qds,
            c(qa(Ex, "x", a("f")), io(Ex, "x", f("A"))),
            c(io(Ex, "x", f("B")), a("f")),
        )
        .arrow("f", f("A"), "B"),
    );
    out.push(
        AxiomSchema::new(
            "(∀γ nat)",
            Qds,
            c(qa(All, "x", a("f")), ga(All, "x", f("A"))),
            c(ga(All, "x", f("B")), a("f")),
        )
        .arrow("f", f("A"), "B"),
    );
    out.push(
        AxiomSchema::new(
            "(∃γ nat)",
            Qds,
            c(a("f"), ga(Ex, "x", f("A"))),
            c(ga(Ex, "x", f("B")), qa(Ex, "x", a("f"))),
        )
        .arrow("f", f("A"), "B"),
    );
    out.push(AxiomSchema::new(
        "(∀β)",
        Qds,
        c(io(All, "x", f("A")), ga(All, "x", f("A"))),
        id(f("A")),
    ));
    out.push(AxiomSchema::new(
        "(∃β)",
        Qds,
        c(ga(Ex, "x", f("A")), io(Ex, "x", f("A"))),
        id(f("A")),
    ));
    out.push(AxiomSchema::new(
        "(∀η)",
        Qds,
        c(
            qa(All, "x", io(All, "x", f("A"))),
            ga(All, "x", qf(All, "x", f("A"))),
        ),
        id(qf(All, "x", f("A"))),
    ));
    out.push(AxiomSchema::new(
        "(∃η)",
        Qds,
        c(
            ga(Ex, "x", qf(Ex, "x", f("A"))),
            qa(Ex, "x", io(Ex, "x", f("A"))),
        ),
        id(qf(Ex, "x", f("A"))),
    ));
    out.push(AxiomSchema::new(
        "(∀θθ) ←→",
        Qds,
        c(
            th(ThetaVariant::AllOrLeft, "x", f("A"), f("D")),
            ta("x", f("A"), f("D")),
        ),
        id(qf(All, "x", or(f("A"), f("D")))),
    ));
    out.push(AxiomSchema::new(
        "(∀θθ) →←",
        Qds,
        c(
            ta("x", f("A"), f("D")),
            th(ThetaVariant::AllOrLeft, "x", f("A"), f("D")),
        ),
        id(or(qf(All, "x", f("A")), f("D"))),
    ));
    out.push(AxiomSchema::new(
        "(∃θθ) ←→",
        Qds,
        c(
            te("x", f("A"), f("D")),
            th(ThetaVariant::ExAndRight, "x", f("A"), f("D")),
        ),
        id(qf(Ex, "x", and(f("A"), f("D")))),
    ));
    out.push(AxiomSchema::new(
        "(∃θθ) →←",
        Qds,
        c(
            th(ThetaVariant::ExAndRight, "x", f("A"), f("D")),
            te("x", f("A"), f("D")),
        ),
        id(and(qf(Ex, "x", f("A")), f("D"))),
    ));

    // Renaming.
    let alpha: Vec<(&str, AP, SystemId)> = vec![
        ("1", id(f("A")), Qds),
        ("b̂→", assoc(And, Right, f("A"), f("B"), f("C")), Qds),
        ("b̂←", assoc(And, Left, f("A"), f("B"), f("C")), Qds),
        ("b̌→", assoc(Or, Right, f("A"), f("B"), f("C")), Qds),
        ("b̌←", assoc(Or, Left, f("A"), f("B"), f("C")), Qds),
        ("ĉ", ch(f("A"), f("B")), Qds),
        ("č", cc(f("A"), f("B")), Qds),
        ("d", dd(f("A"), f("B"), f("C")), Qds),
        ("γ∀", ga(All, "z", f("A")), Qds),
        ("γ∃", ga(Ex, "z", f("A")), Qds),
        ("θ̌∀", ta("z", f("A"), f("B")), Qds),
        ("θ̂∃", te("z", f("A"), f("B")), Qds),
        ("m", mx(f("A"), f("B")), Qmds),
    ];
    for (k, p, sys) in alpha {
        out.push(
            AxiomSchema::new(
                format!("(ren α) {k}"),
                sys,
                rn("x", "y", p.clone()),
                AP::RenPrim("x", "y", Box::new(p)),
            )
            .vars(&["z"])
            .proviso(|e| distinct(e, &["x", "y", "z"])),
        );
    }
    out.push(
        AxiomSchema::new(
            "(ren ∘)",
            Qds,
            rn("x", "y", c(a("g"), a("f"))),
            c(rn("x", "y", a("g")), rn("x", "y", a("f"))),
        )
        .arrow("f", f("A"), "B")
        .arrow("g", f("B"), "C")
        .proviso(|e| distinct(e, &["x", "y"])),
    );
    for op in [And, Or] {
        out.push(
            AxiomSchema::new(
                format!("(ren {})", op_sym(op)),
                Qds,
                rn("x", "y", t(op, a("f"), a("g"))),
                t(op, rn("x", "y", a("f")), rn("x", "y", a("g"))),
            )
            .arrow("f", f("A"), "B")
            .arrow("g", f("C"), "D")
            .proviso(|e| distinct(e, &["x", "y"])),
        );
    }
    for q in [All, Ex] {
        out.push(
            AxiomSchema::new(
                format!("(ren {})", q_sym(q)),
                Qds,
                rn("x", "y", qa(q, "z", a("f"))),
                qa(q, "z", rn("x", "y", a("f"))),
            )
            .arrow("f", f("A"), "B")
            .proviso(|e| distinct(e, &["x", "y", "z"])),
        );
    }
    out.push(
        AxiomSchema::new("(ren 1)", Qds, rn("x", "x", a("f")), a("f")).arrow("f", f("A"), "B"),
    );
    out.push(
        AxiomSchema::new("(ren 2)", Qds, rn("x", "y", a("f")), a("f"))
            .arrow("f", f("A"), "B")
            .proviso(|e| {
                distinct(e, &["x", "y"])
                    && !e.f("A").is_free_in(&e.v("x"))
                    && !e.f("B").is_free_in(&e.v("x"))
            }),
    );
    out.push(
        AxiomSchema::new(
            "(ren 3)",
            Qds,
            rn("x", "y", rn("z", "v", a("f"))),
            rn("z", "v", rn("x", "y", a("f"))),
        )
        .arrow("f", f("A"), "B")
        .proviso(|e| distinct(e, &["x", "y", "z", "v"])),
    );
    out.push(
        AxiomSchema::new(
            "(ren 4)",
            Qds,
            rn("x", "y", rn("z", "y", a("f"))),
            rn("z", "y", rn("x", "y", a("f"))),
        )
        .arrow("f", f("A"), "B")
        .proviso(|e| distinct(e, &["x", "y", "z"])),
    );
    out.push(
        AxiomSchema::new(
            "(ren 5)",
            Qds,
            rn("x", "y", rn("z", "x", a("f"))),
            rn("x", "y", rn("z", "y", a("f"))),
        )
        .arrow("f", f("A"), "B")
        .proviso(|e| distinct(e, &["x", "y", "z"])),
    );
    out.push(
        AxiomSchema::new(
            "(ren 6)",
            Qds,
            rn("x", "y", rn("y", "x", a("f"))),
            rn("x", "y", a("f")),
        )
        .arrow("f", f("A"), "B")
        .proviso(|e| distinct(e, &["x", "y"])),
    );

    // Derived equations of QDS.
    out.push(
        AxiomSchema::new(
            "(∀γι)",
            Qds,
            c(ga(All, "x", f("A")), io(All, "x", f("A"))),
            id(qf(All, "x", f("A"))),
        )
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∃γι)",
            Qds,
            c(io(Ex, "x", f("A")), ga(Ex, "x", f("A"))),
            id(qf(Ex, "x", f("A"))),
        )
        .derived(),
    );
    for q in [All, Ex] {
        let s = q_sym(q);
        out.push(
            AxiomSchema::new(
                format!("({s}ι)"),
                Qds,
                qa(q, "x", io(q, "x", f("A"))),
                io(q, "x", qf(q, "x", f("A"))),
            )
            .derived(),
        );
        out.push(
            AxiomSchema::new(
                format!("({s}γ)"),
                Qds,
                qa(q, "x", ga(q, "x", f("A"))),
                ga(q, "x", qf(q, "x", f("A"))),
            )
            .derived(),
        );
    }
    // f: B ⊢ ∀xA is taken as ∀x h∘γ^{∀x}_B so that its target has the
    // required shape.
    let fa = c(qa(All, "x", a("h")), ga(All, "x", f("B")));
    out.push(
        AxiomSchema::new(
            "(∀ext)",
            Qds,
            c(
                qa(All, "x", c(io(All, "x", f("A")), fa.clone())),
                ga(All, "x", f("B")),
            ),
            fa,
        )
        .arrow("h", f("B"), "A")
        .derived(),
    );
    let ge = c(ga(Ex, "x", f("B")), qa(Ex, "x", a("h")));
    out.push(
        AxiomSchema::new(
            "(∃ext)",
            Qds,
            c(
                ga(Ex, "x", f("B")),
                qa(Ex, "x", c(ge.clone(), io(Ex, "x", f("A")))),
            ),
            ge,
        )
        .arrow("h", f("A"), "B")
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(θ̌∀ by γι)",
            Qds,
            ta("x", f("A"), f("D")),
            c(
                tor(ga(All, "x", f("A")), id(f("D"))),
                io(All, "x", or(f("A"), f("D"))),
            ),
        )
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(θ̂∃ by γι)",
            Qds,
            te("x", f("A"), f("D")),
            c(
                io(Ex, "x", and(f("A"), f("D"))),
                tand(ga(Ex, "x", f("A")), id(f("D"))),
            ),
        )
        .derived(),
    );
    for q in [All, Ex] {
        let s = q_sym(q);
        out.push(
            AxiomSchema::new(
                format!("({s}τ ren)"),
                Qds,
                rn("y", "z", tau_p(q, f("A"), "x", "u", "v")),
                tau_p(q, sub(f("A"), "y", "z"), "x", "u", "v"),
            )
            .proviso(|e| {
                let (y, z) = (e.v("y"), e.v("z"));
                let others = [e.v("x"), e.v("u"), e.v("v")];
                y != z && !others.contains(&y) && !others.contains(&z)
            })
            .derived(),
        );
        out.push(
            AxiomSchema::new(
                format!("({s}τ nat)"),
                Qds,
                c(
                    qa(q, "v", rn("x", "v", a("f"))),
                    tau_p(q, f("A"), "x", "u", "v"),
                ),
                c(
                    tau_p(q, f("B"), "x", "u", "v"),
                    qa(q, "u", rn("x", "u", a("f"))),
                ),
            )
            .arrow("f", f("A"), "B")
            .derived(),
        );
        out.push(
            AxiomSchema::new(
                format!("({s}τ ref)"),
                Qds,
                tau_p(q, f("A"), "x", "u", "u"),
                id(qf(q, "u", sub(f("A"), "x", "u"))),
            )
            .derived(),
        );
        out.push(
            AxiomSchema::new(
                format!("({s}τ sym)"),
                Qds,
                c(
                    tau_p(q, f("A"), "x", "v", "u"),
                    tau_p(q, f("A"), "x", "u", "v"),
                ),
                id(qf(q, "u", sub(f("A"), "x", "u"))),
            )
            .derived(),
        );
        out.push(
            AxiomSchema::new(
                format!("({s}τ trans)"),
                Qds,
                c(
                    tau_p(q, f("A"), "x", "v", "w"),
                    tau_p(q, f("A"), "x", "u", "v"),
                ),
                tau_p(q, f("A"), "x", "u", "w"),
            )
            .derived(),
        );
    }
    out.push(
        AxiomSchema::new(
            "(∀τι)",
            Qds,
            c(
                io(All, "v", sub(f("A"), "x", "v")),
                tau_p(All, f("A"), "x", "u", "v"),
            ),
            rn("u", "v", io(All, "u", sub(f("A"), "x", "u"))),
        )
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∃τι)",
            Qds,
            c(
                tau_p(Ex, f("A"), "x", "v", "u"),
                io(Ex, "v", sub(f("A"), "x", "v")),
            ),
            rn("u", "v", io(Ex, "u", sub(f("A"), "x", "u"))),
        )
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∀τγ)",
            Qds,
            c(tau_p(All, f("A"), "x", "u", "v"), ga(All, "u", f("A"))),
            ga(All, "v", f("A")),
        )
        .proviso(|e| !e.f("A").is_free_in(&e.v("x")))
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∃τγ)",
            Qds,
            c(ga(Ex, "u", f("A")), tau_p(Ex, f("A"), "x", "v", "u")),
            ga(Ex, "v", f("A")),
        )
        .proviso(|e| !e.f("A").is_free_in(&e.v("x")))
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∀τθ̌)",
            Qds,
            c(
                tor(tau_p(All, f("A"), "x", "u", "v"), id(f("D"))),
                ta("u", sub(f("A"), "x", "u"), f("D")),
            ),
            c(
                ta("v", sub(f("A"), "x", "v"), f("D")),
                tau_p(All, or(f("A"), f("D")), "x", "u", "v"),
            ),
        )
        .proviso(|e| !e.f("D").is_free_in(&e.v("x")))
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∃τθ̂)",
            Qds,
            c(
                tau_p(Ex, and(f("A"), f("D")), "x", "u", "v"),
                te("u", sub(f("A"), "x", "u"), f("D")),
            ),
            c(
                te("v", sub(f("A"), "x", "v"), f("D")),
                tand(tau_p(Ex, f("A"), "x", "u", "v"), id(f("D"))),
            ),
        )
        .proviso(|e| !e.f("D").is_free_in(&e.v("x")))
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∀θι)",
            Qds,
            c(
                io(All, "x", or(f("A"), f("D"))),
                th(ThetaVariant::AllOrLeft, "x", f("A"), f("D")),
            ),
            tor(io(All, "x", f("A")), id(f("D"))),
        )
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∃θι)",
            Qds,
            c(
                th(ThetaVariant::ExAndRight, "x", f("A"), f("D")),
                io(Ex, "x", and(f("A"), f("D"))),
            ),
            tand(io(Ex, "x", f("A")), id(f("D"))),
        )
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∀θ̌ι)",
            Qds,
            c(
                tor(io(All, "x", f("A")), id(f("D"))),
                ta("x", f("A"), f("D")),
            ),
            io(All, "x", or(f("A"), f("D"))),
        )
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∃θ̂ι)",
            Qds,
            c(
                te("x", f("A"), f("D")),
                tand(io(Ex, "x", f("A")), id(f("D"))),
            ),
            io(Ex, "x", and(f("A"), f("D"))),
        )
        .derived(),
    );

    // Mix.
    out.push(
        AxiomSchema::new(
            "(m nat)",
            Qmds,
            c(tor(a("f"), a("g")), mx(f("A"), f("B"))),
            c(mx(f("D"), f("E")), tand(a("f"), a("g"))),
        )
        .arrow("f", f("A"), "D")
        .arrow("g", f("B"), "E"),
    );
    out.push(AxiomSchema::new(
        "(b̂m)",
        Qmds,
        c(
            mx(and(f("A"), f("B")), f("C")),
            assoc(And, Right, f("A"), f("B"), f("C")),
        ),
        c(
            dd(f("A"), f("B"), f("C")),
            tand(id(f("A")), mx(f("B"), f("C"))),
        ),
    ));
    out.push(AxiomSchema::new(
        "(b̌m)",
        Qmds,
        c(
            assoc(Or, Right, f("C"), f("B"), f("A")),
            mx(f("C"), or(f("B"), f("A"))),
        ),
        c(
            tor(mx(f("C"), f("B")), id(f("A"))),
            dd(f("C"), f("B"), f("A")),
        ),
    ));
    out.push(AxiomSchema::new(
        "(cm)",
        Qmds,
        c(mx(f("B"), f("A")), ch(f("A"), f("B"))),
        c(cc(f("B"), f("A")), mx(f("A"), f("B"))),
    ));

    // Negation: Δ and Σ.
    out.push(
        AxiomSchema::new(
            "(Δ∀ nat)",
            QpnNeg,
            c(tand(a("f"), id(kall(f("B")))), de(f("B"), f("A"))),
            c(de(f("B"), f("D")), a("f")),
        )
        .arrow("f", f("A"), "D")
        .crown(&["B"]),
    );
    out.push(
        AxiomSchema::new(
            "(Σ∃ nat)",
            QpnNeg,
            c(a("f"), si(f("B"), f("A"))),
            c(si(f("B"), f("D")), tor(id(kex(f("B"))), a("f"))),
        )
        .arrow("f", f("A"), "D")
        .crown(&["B"]),
    );
    out.push(
        AxiomSchema::new(
            "(b̂Δ)",
            QpnNeg,
            c(
                assoc(And, Left, f("A"), f("B"), kall(f("C"))),
                de(f("C"), and(f("A"), f("B"))),
            ),
            tand(id(f("A")), de(f("C"), f("B"))),
        )
        .crown(&["C"]),
    );
    out.push(
        AxiomSchema::new(
            "(b̌Σ)",
            QpnNeg,
            c(
                si(f("C"), or(f("B"), f("A"))),
                assoc(Or, Left, kex(f("C")), f("B"), f("A")),
            ),
            tor(si(f("C"), f("B")), id(f("A"))),
        )
        .crown(&["C"]),
    );
    out.push(
        AxiomSchema::new(
            "(dΣ∀)",
            QpnNeg,
            c(
                dd(kall(f("A")), f("B"), f("C")),
                xi(XiKind::SigmaAll, f("A"), or(f("B"), f("C"))),
            ),
            tor(xi(XiKind::SigmaAll, f("A"), f("B")), id(f("C"))),
        )
        .crown(&["A"])
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(dΔ∃)",
            QpnNeg,
            c(
                xi(XiKind::DeltaEx, f("A"), and(f("C"), f("B"))),
                dd(f("C"), f("B"), kex(f("A"))),
            ),
            tand(id(f("C")), xi(XiKind::DeltaEx, f("A"), f("B"))),
        )
        .crown(&["A"])
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(Σ̂Δ̌)",
            QpnNeg,
            chain(vec![
                xi(XiKind::SigmaHat, f("A"), f("A")),
                dd(f("A"), neg(f("A")), f("A")),
                xi(XiKind::DeltaCheck, f("A"), f("A")),
            ]),
            id(f("A")),
        )
        .crown(&["A"]),
    );
    out.push(
        AxiomSchema::new(
            "(Σ̂′Δ̌′)",
            QpnNeg,
            chain(vec![
                xi(XiKind::SigmaHatP, f("A"), neg(f("A"))),
                dd(neg(f("A")), f("A"), neg(f("A"))),
                xi(XiKind::DeltaCheckP, f("A"), neg(f("A"))),
            ]),
            id(neg(f("A"))),
        )
        .crown(&["A"]),
    );
    out.push(
        AxiomSchema::new(
            "(ren Δ)",
            QpnNeg,
            rn("x", "y", de(f("B"), f("A"))),
            de(f("B"), sub(f("A"), "x", "y")),
        )
        .crown(&["B"])
        .proviso(|e| distinct(e, &["x", "y"])),
    );
    out.push(
        AxiomSchema::new(
            "(ren Σ)",
            QpnNeg,
            rn("x", "y", si(f("B"), f("A"))),
            si(f("B"), sub(f("A"), "x", "y")),
        )
        .crown(&["B"])
        .proviso(|e| distinct(e, &["x", "y"])),
    );
    out.push(
        AxiomSchema::new(
            "(Δτ)",
            QpnNeg,
            AP::Fn(|e| {
                let b = e.f("B");
                Some(Arrow::DeltaAll(
                    seq_subst(&b, &b.free_var_sequence(), &e.s("V"))?,
                    e.f("A"),
                ))
            }),
            AP::Fn(|e| {
                let b = e.f("B");
                let xs = b.free_var_sequence();
                let body = Formula::or(Formula::neg(b.clone()), b.clone());
                Some(Arrow::comp(
                    Arrow::and(
                        Arrow::id(e.f("A")),
                        tau_seq(Quantifier::All, &body, &xs, &e.s("U"), &e.s("V"))?,
                    ),
                    Arrow::DeltaAll(seq_subst(&b, &xs, &e.s("U"))?, e.f("A")),
                ))
            }),
        )
        .formulas(&["A", "B"])
        .crown(&["B"])
        .seq("U", "B")
        .seq("V", "B")
        .proviso(tau_seq_ok)
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(Στ)",
            QpnNeg,
            AP::Fn(|e| {
                let b = e.f("B");
                Some(Arrow::SigmaEx(
                    seq_subst(&b, &b.free_var_sequence(), &e.s("V"))?,
                    e.f("A"),
                ))
            }),
            AP::Fn(|e| {
                let b = e.f("B");
                let xs = b.free_var_sequence();
                let body = Formula::and(b.clone(), Formula::neg(b.clone()));
                Some(Arrow::comp(
                    Arrow::SigmaEx(seq_subst(&b, &xs, &e.s("U"))?, e.f("A")),
                    Arrow::or(
                        tau_seq(Quantifier::Ex, &body, &xs, &e.s("V"), &e.s("U"))?,
                        Arrow::id(e.f("A")),
                    ),
                ))
            }),
        )
        .formulas(&["A", "B"])
        .crown(&["B"])
        .seq("U", "B")
        .seq("V", "B")
        .proviso(tau_seq_ok)
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∀Δ)",
            QpnNeg,
            qa(All, "x", de(f("B"), f("A"))),
            chain(vec![
                qa(All, "x", tand(io(All, "x", f("A")), id(kall(f("B"))))),
                ga(All, "x", and(qf(All, "x", f("A")), kall(f("B")))),
                de(f("B"), qf(All, "x", f("A"))),
            ]),
        )
        .crown(&["B"])
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∃Δ)",
            QpnNeg,
            qa(Ex, "x", de(f("B"), f("A"))),
            c(
                te("x", f("A"), kall(f("B"))),
                de(f("B"), qf(Ex, "x", f("A"))),
            ),
        )
        .crown(&["B"])
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∀Σ)",
            QpnNeg,
            qa(All, "x", si(f("B"), f("A"))),
            chain(vec![
                si(f("B"), qf(All, "x", f("A"))),
                cc(kex(f("B")), qf(All, "x", f("A"))),
                ta("x", f("A"), kex(f("B"))),
                qa(All, "x", cc(f("A"), kex(f("B")))),
            ]),
        )
        .crown(&["B"])
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(∃Σ)",
            QpnNeg,
            qa(Ex, "x", si(f("B"), f("A"))),
            chain(vec![
                si(f("B"), qf(Ex, "x", f("A"))),
                ga(Ex, "x", or(kex(f("B")), qf(Ex, "x", f("A")))),
                qa(Ex, "x", tor(id(kex(f("B"))), io(Ex, "x", f("A")))),
            ]),
        )
        .crown(&["B"])
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(θ̌∀ by Δ)",
            QpnNeg,
            ta("x", f("A"), f("D")),
            chain(vec![
                tor(
                    c(
                        qa(
                            All,
                            "x",
                            c(
                                xi(XiKind::DeltaHat, f("D"), f("A")),
                                dr(f("A"), f("D"), neg(f("D"))),
                            ),
                        ),
                        th(
                            ThetaVariant::AllAndLeft,
                            "x",
                            or(f("A"), f("D")),
                            neg(f("D")),
                        ),
                    ),
                    id(f("D")),
                ),
                dd(qf(All, "x", or(f("A"), f("D"))), neg(f("D")), f("D")),
                xi(XiKind::DeltaCheck, f("D"), qf(All, "x", or(f("A"), f("D")))),
            ]),
        )
        .crown(&["D"])
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(θ̂∃ by Δ)",
            QpnNeg,
            te("x", f("A"), f("D")),
            chain(vec![
                xi(XiKind::DeltaHatP, f("D"), qf(Ex, "x", and(f("A"), f("D")))),
                dr(qf(Ex, "x", and(f("A"), f("D"))), neg(f("D")), f("D")),
                tand(
                    c(
                        th(
                            ThetaVariant::ExOrRight,
                            "x",
                            and(f("A"), f("D")),
                            neg(f("D")),
                        ),
                        qa(
                            Ex,
                            "x",
                            c(
                                dd(f("A"), f("D"), neg(f("D"))),
                                xi(XiKind::DeltaCheckP, f("D"), f("A")),
                            ),
                        ),
                    ),
                    id(f("D")),
                ),
            ]),
        )
        .crown(&["D"])
        .derived(),
    );
    out.push(
        AxiomSchema::new(
            "(Δ∀ n)",
            QpnNeg,
            de(neg(f("B")), f("A")),
            c(
                tand(
                    id(f("A")),
                    AP::Fn(|e| {
                        let b = e.f("B");
                        let inner = Arrow::or(
                            crate::translate::double_neg_intro(&b),
                            Arrow::id(Formula::neg(b.clone())),
                        );
                        Some(quant_seq(Quantifier::All, &b.free_var_sequence(), inner))
                    }),
                ),
                xi(XiKind::DeltaPAll, f("B"), f("A")),
            ),
        )
        .crown(&["B"])
        .derived(),
    );

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let names: Vec<&str> = all_schemas().iter().map(|s| s.name.as_str()).collect();
        for (i, n) in names.iter().enumerate() {
            assert!(!names[i + 1..].contains(n), "duplicate schema {n}");
        }
    }

    #[test]
    fn every_schema_instantiates_with_equal_types() {
        for s in all_schemas() {
            let mut g = Generator::new(s.system, 7).with_max_size(12);
            let inst =
                instantiate(s, &mut g).unwrap_or_else(|| panic!("{} never instantiated", s.name));
            assert_eq!(
                inst.lhs_type, inst.rhs_type,
                "{}: {} vs {}",
                s.name, inst.lhs, inst.rhs
            );
        }
    }

    #[test]
    fn qds_table_excludes_mix_and_xi() {
        let names: Vec<&str> = axiom_schemas(SystemId::Qds)
            .iter()
            .map(|s| s.name.as_str())
            .collect();
        assert!(names.contains(&"(ĉĉ)"));
        assert!(!names.contains(&"(cm)"));
        assert!(!names.contains(&"(Δ∀ nat)"));
        assert!(axiom_schemas(SystemId::Qmds)
            .iter()
            .any(|s| s.name == "(cm)"));
    }

    #[test]
    fn rewrite_identity_introduction() {
        let mut g = Generator::new(SystemId::Qds, 3);
        let t = g.arrow(6);
        let s = find_schema("(cat 1) right").unwrap();
        let out = rewrite_once(&t, s, &[], Direction::RightToLeft, &mut g).unwrap();
        assert_eq!(infer(&out).unwrap(), infer(&t).unwrap());
        assert!(matches!(out, Arrow::Comp(..)));
    }
}

#[cfg(test)]
mod soundness {
    use super::*;
    use crate::graphs::{graph_eq, graph_of};

    #[test]
    fn sides_have_equal_graphs() {
        for s in all_schemas() {
            for seed in 0..20 {
                let mut g = Generator::new(s.system, seed).with_max_size(12);
                let inst = instantiate(s, &mut g).unwrap();
                let (l, r) = (graph_of(&inst.lhs).unwrap(), graph_of(&inst.rhs).unwrap());
                assert!(graph_eq(&l, &r), "{}: {} vs {}", s.name, inst.lhs, inst.rhs);
            }
        }
    }
}

#[cfg(test)]
mod coverage {
    use super::*;

    #[test]
    fn change_of_variable_instances_are_not_all_closed() {
        for name in ["(Δτ)", "(Στ)"] {
            let s = find_schema(name).unwrap();
            let open = (0..40)
                .filter_map(|seed| instantiate(s, &mut Generator::new(s.system, seed)))
                .filter(|i| !i.env.s("U").is_empty())
                .count();
            assert!(open > 0, "{name} only instantiated with closed crowns");
        }
    }
}
