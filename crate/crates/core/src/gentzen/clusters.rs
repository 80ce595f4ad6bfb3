//! Couples, bridges, arcs and clusters of variable occurrences, and
//! eigendiversification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lang::{Formula, Letter, Quantifier, Var};

use super::formset::canon_form_set;
use super::term::{GentzenTerm, QRule, Rule};
use super::{Gensym, GentzenError, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Binding {
    All,
    Free,
    Ex,
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Binding::All => "∀",
            Binding::Free => "∅",
            Binding::Ex => "∃",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Side {
    Source,
    Target,
}

/// A variable occurrence at an argument place of an atom.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Occ {
    pub var: Var,
    pub binding: Binding,
    /// Path of the binding quantifier prefix in the formula tree.
    pub binder: Option<Vec<usize>>,
}

/// Occurrences keyed by letter and argument place (from 1). Keys are
/// unique in a diversified formula.
pub fn occurrences(a: &Formula) -> BTreeMap<(Letter, usize), Occ> {
    fn go(
        a: &Formula,
        path: &mut Vec<usize>,
        env: &mut Vec<(Var, Quantifier, Vec<usize>)>,
        out: &mut BTreeMap<(Letter, usize), Occ>,
    ) {
        match a {
            Formula::Atom { letter, args } => {
                for (j, v) in args.iter().enumerate() {
                    let occ = match env.iter().rev().find(|(x, ..)| x == v) {
                        Some((_, q, p)) => Occ {
                            var: v.clone(),
                            binding: if *q == Quantifier::All {
                                Binding::All
                            } else {
                                Binding::Ex
                            },
                            binder: Some(p.clone()),
                        },
                        None => Occ {
                            var: v.clone(),
                            binding: Binding::Free,
                            binder: None,
                        },
                    };
                    out.insert((letter.clone(), j + 1), occ);
                }
            }
            Formula::Neg(b) => {
                path.push(0);
                go(b, path, env, out);
                path.pop();
            }
            Formula::Bin(_, l, r) => {
                for (k, c) in [l, r].into_iter().enumerate() {
                    path.push(k);
                    go(c, path, env, out);
                    path.pop();
                }
            }
            Formula::Quant(q, x, b) => {
                env.push((x.clone(), *q, path.clone()));
                path.push(0);
                go(b, path, env, out);
                path.pop();
                env.pop();
            }
        }
    }
    let mut out = BTreeMap::new();
    go(a, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// The P_j-couple of some sequent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Couple {
    pub letter: Letter,
    pub arg: usize,
    pub src: Occ,
    pub tgt: Occ,
}

impl Couple {
    pub fn kind(&self) -> (Binding, Binding) {
        (self.src.binding, self.tgt.binding)
    }

    /// Whether the kind is one of the six that can occur.
    pub fn kind_allowed(&self) -> bool {
        !matches!(
            self.kind(),
            (Binding::Free, Binding::All)
                | (Binding::Ex, Binding::All)
                | (Binding::Ex, Binding::Free)
        )
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.letter, self.arg)
    }

    fn has_free(&self) -> bool {
        self.src.binding == Binding::Free || self.tgt.binding == Binding::Free
    }
}

/// The couples of the sequent `source ⊢ target`, ordered by letter and place.
pub fn couples_of(source: &Formula, target: &Formula) -> Vec<Couple> {
    let s = occurrences(source);
    let t = occurrences(target);
    s.into_iter()
        .filter_map(|(k, src)| {
            let tgt = t.get(&k)?.clone();
            Some(Couple {
                letter: k.0,
                arg: k.1,
                src,
                tgt,
            })
        })
        .collect()
}

/// A quantifier prefix simultaneously binding two couples on one side.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bridge {
    pub side: Side,
    pub binder: Vec<usize>,
    pub var: Var,
    pub couples: (usize, usize),
}

/// The P_j-couples of all subterms whose type contains P.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arc {
    pub letter: Letter,
    pub arg: usize,
    /// Subterm path and couple, root first.
    pub couples: Vec<(Vec<usize>, Couple)>,
}

impl Arc {
    pub fn free_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for (_, c) in &self.couples {
            for o in [&c.src, &c.tgt] {
                if o.binding == Binding::Free {
                    out.insert(o.var.clone());
                }
            }
        }
        out
    }
}

/// A quantifier rule whose instance places fall in a cluster.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gate {
    pub path: Vec<usize>,
    pub rule: QRule,
}

impl Gate {
    pub fn is_eigengate(&self) -> bool {
        self.rule.is_eigen()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cluster {
    /// Indices into `ClusterReport::couples`, which are also arc indices.
    pub couples: Vec<usize>,
    pub gates: Vec<Gate>,
    /// Free variables of the arcs of the arc-cluster.
    pub free_variables: BTreeSet<Var>,
}

impl Cluster {
    pub fn eigengates(&self) -> Vec<&Gate> {
        self.gates.iter().filter(|g| g.is_eigengate()).collect()
    }

    /// The free variable of the arc-cluster, when there is exactly one.
    pub fn free_variable(&self) -> Option<&Var> {
        match self.free_variables.len() {
            1 => self.free_variables.iter().next(),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClusterReport {
    pub couples: Vec<Couple>,
    pub bridges: Vec<Bridge>,
    /// `arcs[i]` has bottom `couples[i]`.
    pub arcs: Vec<Arc>,
    pub clusters: Vec<Cluster>,
}

impl ClusterReport {
    /// Index of the cluster holding the P_j-couple.
    pub fn cluster_of(&self, letter: &Letter, arg: usize) -> Option<usize> {
        let i = self
            .couples
            .iter()
            .position(|c| c.letter == *letter && c.arg == arg)?;
        self.clusters.iter().position(|cl| cl.couples.contains(&i))
    }

    /// Clusters as sorted lists of couple labels such as `R2`.
    pub fn labels(&self) -> Vec<Vec<String>> {
        self.clusters
            .iter()
            .map(|cl| {
                cl.couples
                    .iter()
                    .map(|&i| self.couples[i].label())
                    .collect()
            })
            .collect()
    }

    /// Violations of the kind table, the eigengate bound, the kind
    /// restrictions inside clusters and the Eigengate Remark.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.couples {
            if !c.kind_allowed() {
                let (a, b) = c.kind();
                out.push(format!("{} has kind ({a},{b})", c.label()));
            }
        }
        for cl in &self.clusters {
            let kinds: Vec<_> = cl.couples.iter().map(|&i| self.couples[i].kind()).collect();
            let names = || {
                cl.couples
                    .iter()
                    .map(|&i| self.couples[i].label())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            if cl.eigengates().len() > 1 {
                out.push(format!(
                    "cluster {{{}}} has {} eigengates",
                    names(),
                    cl.eigengates().len()
                ));
            }
            if kinds.contains(&(Binding::Free, Binding::Free)) && kinds.len() > 1 {
                out.push(format!(
                    "cluster {{{}}} has a (∅,∅) couple and is not a singleton",
                    names()
                ));
            }
            let uu = kinds.contains(&(Binding::All, Binding::All));
            let ee = kinds.contains(&(Binding::Ex, Binding::Ex));
            if (uu || ee) && cl.eigengates().is_empty() {
                out.push(format!(
                    "cluster {{{}}} has a (∀,∀) or (∃,∃) couple and no eigengate",
                    names()
                ));
            }
            if !cl.eigengates().is_empty() && cl.couples.iter().any(|&i| self.couples[i].has_free())
            {
                out.push(format!(
                    "cluster {{{}}} has an eigengate and a free coordinate",
                    names()
                ));
            }
        }
        out
    }
}

fn check_pre(t: &GentzenTerm) -> Result<()> {
    if !t.is_variable_pure() {
        return Err(GentzenError::NotVariablePure(t.sequent_string()));
    }
    if !t.is_cut_free() {
        return Err(GentzenError::HasCut);
    }
    if !t.is_renaming_free() {
        return Err(GentzenError::HasRenaming);
    }
    canon_form_set(&t.source)?;
    canon_form_set(&t.target)?;
    Ok(())
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut k = i;
    while parent[k] != r {
        let next = parent[k];
        parent[k] = r;
        k = next;
    }
    r
}

/// Places (P, j) of the body where the bound variable of a quantifier rule
/// occurs.
fn instance_places(x: &Var, body: &Formula) -> Vec<(Letter, usize)> {
    occurrences(body)
        .into_iter()
        .filter(|(_, o)| o.var == *x && o.binding == Binding::Free)
        .map(|(k, _)| k)
        .collect()
}

/// The cluster analysis of a variable-pure, cut-free and renaming-free term.
pub fn compute_clusters(t: &GentzenTerm) -> Result<ClusterReport> {
    check_pre(t)?;
    let couples = couples_of(&t.source, &t.target);
    let index: BTreeMap<(Letter, usize), usize> = couples
        .iter()
        .enumerate()
        .map(|(i, c)| ((c.letter.clone(), c.arg), i))
        .collect();

    let mut bridges = Vec::new();
    for (i, a) in couples.iter().enumerate() {
        for (j, b) in couples.iter().enumerate().skip(i + 1) {
            for (side, oa, ob) in [
                (Side::Source, &a.src, &b.src),
                (Side::Target, &a.tgt, &b.tgt),
            ] {
                if let (Some(pa), Some(pb)) = (&oa.binder, &ob.binder) {
                    if pa == pb {
                        bridges.push(Bridge {
                            side,
                            binder: pa.clone(),
                            var: oa.var.clone(),
                            couples: (i, j),
                        });
                    }
                }
            }
        }
    }

    let mut parent: Vec<usize> = (0..couples.len()).collect();
    for b in &bridges {
        let (ra, rb) = (
            find(&mut parent, b.couples.0),
            find(&mut parent, b.couples.1),
        );
        parent[ra.max(rb)] = ra.min(rb);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..couples.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut clusters: Vec<Cluster> = groups
        .into_values()
        .map(|couples| Cluster {
            couples,
            gates: Vec::new(),
            free_variables: BTreeSet::new(),
        })
        .collect();
    let cluster_of = |i: usize, cls: &[Cluster]| {
        cls.iter()
            .position(|c| c.couples.contains(&i))
            .expect("partition")
    };

    let mut arcs: Vec<Arc> = couples
        .iter()
        .map(|c| Arc {
            letter: c.letter.clone(),
            arg: c.arg,
            couples: Vec::new(),
        })
        .collect();
    for (path, s) in t.subterms_with_paths() {
        for c in couples_of(&s.source, &s.target) {
            if let Some(&i) = index.get(&(c.letter.clone(), c.arg)) {
                arcs[i].couples.push((path.clone(), c));
            }
        }
        if let Some((k, x, body, ..)) = s.as_quant() {
            for place in instance_places(x, body) {
                if let Some(&i) = index.get(&place) {
                    let ci = cluster_of(i, &clusters);
                    let gate = Gate {
                        path: path.clone(),
                        rule: k,
                    };
                    if !clusters[ci].gates.contains(&gate) {
                        clusters[ci].gates.push(gate);
                    }
                }
            }
        }
    }
    for (i, arc) in arcs.iter().enumerate() {
        let ci = cluster_of(i, &clusters);
        clusters[ci].free_variables.extend(arc.free_variables());
    }
    Ok(ClusterReport {
        couples,
        bridges,
        arcs,
        clusters,
    })
}

/// Whether every arc-cluster with an eigengate has a free variable that no
/// other arc-cluster has.
pub fn is_eigendiversified(t: &GentzenTerm) -> Result<bool> {
    let r = compute_clusters(t)?;
    Ok(colliding(&r).is_empty())
}

fn colliding(r: &ClusterReport) -> Vec<usize> {
    (0..r.clusters.len())
        .filter(|&i| {
            let c = &r.clusters[i];
            !c.eigengates().is_empty()
                && c.free_variables.iter().any(|v| {
                    r.clusters
                        .iter()
                        .enumerate()
                        .any(|(j, d)| j != i && d.free_variables.contains(v))
                })
        })
        .collect()
}

type Relabel = BTreeMap<(Letter, usize), (Var, Var)>;

fn relabel_formula(a: &Formula, m: &Relabel) -> Formula {
    match a {
        Formula::Atom { letter, args } => {
            let args = args
                .iter()
                .enumerate()
                .map(|(j, v)| match m.get(&(letter.clone(), j + 1)) {
                    Some((from, to)) if from == v => to.clone(),
                    _ => v.clone(),
                })
                .collect();
            Formula::Atom {
                letter: letter.clone(),
                args,
            }
        }
        Formula::Neg(b) => Formula::neg(relabel_formula(b, m)),
        Formula::Bin(op, l, r) => Formula::bin(*op, relabel_formula(l, m), relabel_formula(r, m)),
        Formula::Quant(q, x, b) => Formula::quant(*q, x.clone(), relabel_formula(b, m)),
    }
}

fn relabel_term(t: &GentzenTerm, m: &Relabel) -> Result<GentzenTerm> {
    let rl = |a: &Formula| relabel_formula(a, m);
    let ro = |a: &Option<Formula>| a.as_ref().map(rl);
    let ps = t
        .premises()
        .into_iter()
        .map(|p| relabel_term(p, m))
        .collect::<Result<Vec<_>>>()?;
    let mut it = ps.into_iter();
    let mut next = || it.next().expect("premise");
    match &t.rule {
        Rule::Id => GentzenTerm::id(rl(&t.source)),
        Rule::And { y1, y2, z1, z2, .. } => {
            GentzenTerm::and(rl(y1), rl(y2), ro(z1), ro(z2), next(), next())
        }
        Rule::Or { x1, x2, z1, z2, .. } => {
            GentzenTerm::or(rl(x1), rl(x2), ro(z1), ro(z2), next(), next())
        }
        Rule::Mix { .. } => GentzenTerm::mix(next(), next()),
        Rule::Cut { .. } | Rule::Ren { .. } => Err(GentzenError::Malformed(
            "cut or renaming in relabeling".into(),
        )),
        _ => {
            let (k, x, body, v, z, _) = t.as_quant().expect("quantifier rule");
            let body = rl(body);
            let prem = next();
            let side = if k.is_left() {
                &prem.source
            } else {
                &prem.target
            };
            let v = match instance_places(x, &body).first() {
                Some(place) => occurrences(side)
                    .get(place)
                    .map(|o| o.var.clone())
                    .unwrap_or_else(|| v.clone()),
                None => v.clone(),
            };
            GentzenTerm::quant(k, x.clone(), body, v, ro(z), prem)
        }
    }
}

/// An eigendiversified term analogous to `t`: the free variable of every
/// eigengated arc-cluster that shares it with another arc-cluster is
/// replaced by a fresh one throughout that arc-cluster.
pub fn eigendiversify(t: &GentzenTerm) -> Result<GentzenTerm> {
    let r = compute_clusters(t)?;
    let todo = colliding(&r);
    if todo.is_empty() {
        return Ok(t.clone());
    }
    let mut gs = Gensym::for_term(t);
    let mut m = Relabel::new();
    for i in todo {
        let cl = &r.clusters[i];
        for u in &cl.free_variables {
            let fresh = gs.fresh();
            for &k in &cl.couples {
                let c = &r.couples[k];
                m.insert((c.letter.clone(), c.arg), (u.clone(), fresh.clone()));
            }
        }
    }
    relabel_term(t, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_formula, var, SystemId};

    fn p(s: &str) -> Formula {
        parse_formula(s, SystemId::Qds).unwrap()
    }

    fn q(k: QRule, x: &str, body: &str, v: &str, f: GentzenTerm) -> GentzenTerm {
        GentzenTerm::quant(k, var(x), p(body), var(v), None, f).unwrap()
    }

    fn id(a: &str) -> GentzenTerm {
        GentzenTerm::id(p(a)).unwrap()
    }

    /// ∃^R_{z,R(u,z)∧P(z)} ∧_{R(u,y),P(y)}(∀^L_{x,R(u,x)} 1_{R(u,y)}, 1_{P(y)}).
    fn two_clusters() -> GentzenTerm {
        let l = q(QRule::AllL, "x", "R(u,x)", "y", id("R(u,y)"));
        let a = GentzenTerm::and(p("R(u,y)"), p("P(y)"), None, None, l, id("P(y)")).unwrap();
        q(QRule::ExR, "z", "R(u,z) & P(z)", "y", a)
    }

    #[test]
    fn worked_example_with_two_clusters() {
        let t = two_clusters();
        assert_eq!(
            t.sequent_string(),
            "P(y) & all x. R(u,x) |- some z. (P(z) & R(u,z))"
        );
        let r = compute_clusters(&t).unwrap();
        assert_eq!(r.labels(), vec![vec!["P1", "R2"], vec!["R1"]]);
        let k = |l: &str, j| {
            r.couples
                .iter()
                .find(|c| c.letter.name() == l && c.arg == j)
                .unwrap()
                .kind()
        };
        assert_eq!(k("R", 1), (Binding::Free, Binding::Free));
        assert_eq!(k("R", 2), (Binding::All, Binding::Ex));
        assert_eq!(k("P", 1), (Binding::Free, Binding::Ex));
        assert_eq!(r.bridges.len(), 1);
        assert_eq!(r.bridges[0].side, Side::Target);
        let big = &r.clusters[0];
        assert_eq!(big.free_variable(), Some(&var("y")));
        assert_eq!(big.gates.len(), 2);
        assert!(big.eigengates().is_empty());
        assert_eq!(r.clusters[1].free_variable(), Some(&var("u")));
        assert!(r.violations().is_empty());
    }

    #[test]
    fn worked_example_with_one_cluster() {
        let l = q(QRule::AllL, "x", "R(x,x)", "y", id("R(y,y)"));
        let a = GentzenTerm::and(p("R(y,y)"), p("P(y)"), None, None, l, id("P(y)")).unwrap();
        let t = q(QRule::ExR, "z", "R(y,z) & P(z)", "y", a);
        let r = compute_clusters(&t).unwrap();
        assert_eq!(r.labels(), vec![vec!["P1", "R1", "R2"]]);
        assert!(r.violations().is_empty());
    }

    #[test]
    fn identity_is_a_free_singleton() {
        let r = compute_clusters(&id("P(x)")).unwrap();
        assert_eq!(r.labels(), vec![vec!["P1"]]);
        assert_eq!(r.couples[0].kind(), (Binding::Free, Binding::Free));
        assert!(r.clusters[0].gates.is_empty());
    }

    /// ∧(∃^R_{z,S(z)} ∀^L_{y,S(y)} 1_{S(u)}, ∀^R_{x,P(x)} ∀^L_{w,P(w)} 1_{P(u)}).
    fn shared_eigenvariable() -> GentzenTerm {
        let s = q(
            QRule::ExR,
            "z",
            "S(z)",
            "u",
            q(QRule::AllL, "y", "S(y)", "u", id("S(u)")),
        );
        let pr = q(
            QRule::AllR,
            "x",
            "P(x)",
            "u",
            q(QRule::AllL, "w", "P(w)", "u", id("P(u)")),
        );
        GentzenTerm::and(s.target.clone(), pr.target.clone(), None, None, s, pr).unwrap()
    }

    #[test]
    fn colliding_eigengated_cluster_gets_a_fresh_variable() {
        let t = shared_eigenvariable();
        assert!(!is_eigendiversified(&t).unwrap());
        let out = eigendiversify(&t).unwrap();
        assert!(is_eigendiversified(&out).unwrap());
        assert_eq!(out.skeleton(), t.skeleton());
        assert_eq!(out.sequent_string(), t.sequent_string());
        let r = compute_clusters(&out).unwrap();
        let pc = &r.clusters[r.cluster_of(&Letter::new("P"), 1).unwrap()];
        let sc = &r.clusters[r.cluster_of(&Letter::new("S"), 1).unwrap()];
        assert_eq!(pc.free_variable(), Some(&var("v$0")));
        assert_eq!(sc.free_variable(), Some(&var("u")));
        assert_eq!(eigendiversify(&out).unwrap(), out);
    }

    #[test]
    fn preconditions() {
        let t = crate::gentzen::renaming_counterexample();
        assert!(compute_clusters(&t).is_err());
    }
}
