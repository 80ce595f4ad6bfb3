//! Kelly-Mac Lane graphs: perfect matchings over the atom occurrences of a
//! source and target, composed by path tracing.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::arrows::{infer, Arrow, ArrowError, Sequent};
use crate::lang::{Conn, Formula, Letter, Polarity};

/// Letter and polarity of one atom occurrence.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Site {
    pub letter: Letter,
    pub polarity: Polarity,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.polarity == Polarity::Pos {
            '+'
        } else {
            '-'
        };
        write!(f, "{}[{sign}]", self.letter)
    }
}

pub fn profile(a: &Formula) -> Vec<Site> {
    a.atom_profile()
        .into_iter()
        .map(|o| Site {
            letter: o.letter,
            polarity: o.polarity,
        })
        .collect()
}

/// A tagged position: `S(i)` in the source, `T(j)` in the target.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum End {
    S(usize),
    T(usize),
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            End::S(i) => write!(f, "S{i}"),
            End::T(j) => write!(f, "T{j}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("profile mismatch at middle position {0}")]
    ProfileMismatch(String),
    #[error(transparent)]
    Arrow(#[from] ArrowError),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KmGraph {
    pub src: Vec<Site>,
    pub tgt: Vec<Site>,
    /// Mate of each position; sources come first, then targets.
    mate: Vec<usize>,
    pub loops: usize,
}

impl KmGraph {
    fn n(&self) -> usize {
        self.src.len()
    }

    fn index(&self, e: End) -> usize {
        match e {
            End::S(i) => i,
            End::T(j) => self.n() + j,
        }
    }

    fn end(&self, k: usize) -> End {
        if k < self.n() {
            End::S(k)
        } else {
            End::T(k - self.n())
        }
    }

    /// Graph from a link list. Panics if the links are not a perfect
    /// matching.
    pub fn from_links(src: Vec<Site>, tgt: Vec<Site>, links: &[(End, End)]) -> KmGraph {
        let total = src.len() + tgt.len();
        let mut g = KmGraph {
            src,
            tgt,
            mate: vec![usize::MAX; total],
            loops: 0,
        };
        for &(a, b) in links {
            let (i, j) = (g.index(a), g.index(b));
            assert!(
                g.mate[i] == usize::MAX && g.mate[j] == usize::MAX,
                "position linked twice"
            );
            g.mate[i] = j;
            g.mate[j] = i;
        }
        assert!(
            g.mate.iter().all(|&m| m != usize::MAX),
            "matching is not perfect"
        );
        g
    }

    /// Identity matching on a profile.
    pub fn identity(p: Vec<Site>) -> KmGraph {
        let n = p.len();
        let links: Vec<_> = (0..n).map(|i| (End::S(i), End::T(i))).collect();
        KmGraph::from_links(p.clone(), p, &links)
    }

    pub fn mate_of(&self, e: End) -> End {
        self.end(self.mate[self.index(e)])
    }

    /// Links as ordered pairs, the smaller end first, sorted.
    pub fn links(&self) -> Vec<(End, End)> {
        let mut out: Vec<_> = (0..self.mate.len())
            .filter(|&k| k < self.mate[k])
            .map(|k| (self.end(k), self.end(self.mate[k])))
            .collect();
        out.sort();
        out
    }

    /// Matching well-formedness: same letter on both ends, equal polarity
    /// across sides, opposite polarity on one side.
    pub fn is_well_formed(&self) -> bool {
        self.links().into_iter().all(|(a, b)| {
            let sa = self.site(a);
            let sb = self.site(b);
            let cross = matches!((a, b), (End::S(_), End::T(_)) | (End::T(_), End::S(_)));
            sa.letter == sb.letter && (sa.polarity == sb.polarity) == cross
        })
    }

    pub fn site(&self, e: End) -> &Site {
        match e {
            End::S(i) => &self.src[i],
            End::T(j) => &self.tgt[j],
        }
    }

    /// Compact text form `n m | S0-T1 ...`, optionally with the loop count.
    pub fn to_text(&self, with_loops: bool) -> String {
        let mut s = format!("{} {} |", self.src.len(), self.tgt.len());
        for (a, b) in self.links() {
            s.push_str(&format!(" {a}-{b}"));
        }
        if with_loops {
            s.push_str(&format!(" loops={}", self.loops));
        }
        s
    }
}

impl fmt::Display for KmGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(false))
    }
}

/// Side-by-side union.
pub fn tensor_graphs(f: &KmGraph, g: &KmGraph) -> KmGraph {
    let shift = |e: End| match e {
        End::S(i) => End::S(i + f.src.len()),
        End::T(j) => End::T(j + f.tgt.len()),
    };
    let mut links = f.links();
    links.extend(g.links().into_iter().map(|(a, b)| (shift(a), shift(b))));
    let src = f.src.iter().chain(&g.src).cloned().collect();
    let tgt = f.tgt.iter().chain(&g.tgt).cloned().collect();
    let mut out = KmGraph::from_links(src, tgt, &links);
    out.loops = f.loops + g.loops;
    out
}

/// g∘f by tracing alternating paths through the middle profile. Closed
/// cycles in the middle are discarded and counted.
pub fn compose_graphs(g: &KmGraph, f: &KmGraph) -> Result<KmGraph, GraphError> {
    if f.tgt.len() != g.src.len() {
        return Err(GraphError::ProfileMismatch(format!(
            "middle lengths {} and {}",
            f.tgt.len(),
            g.src.len()
        )));
    }
    if let Some(k) = (0..f.tgt.len()).find(|&k| f.tgt[k] != g.src[k]) {
        return Err(GraphError::ProfileMismatch(format!(
            "{k}: {} vs {}",
            f.tgt[k], g.src[k]
        )));
    }
    let mid = f.tgt.len();
    let mut seen = vec![false; mid];
    let mut links = Vec::new();
    // Follow from an outer end, alternating f and g, until leaving the middle.
    let walk = |start_in_f: bool, e: End, seen: &mut Vec<bool>| -> End {
        let mut in_f = start_in_f;
        let mut cur = e;
        loop {
            let m = if in_f { f.mate_of(cur) } else { g.mate_of(cur) };
            match (in_f, m) {
                (true, End::S(i)) => return End::S(i),
                (false, End::T(j)) => return End::T(j),
                (true, End::T(k)) => {
                    seen[k] = true;
                    in_f = false;
                    cur = End::S(k);
                }
                (false, End::S(k)) => {
                    seen[k] = true;
                    in_f = true;
                    cur = End::T(k);
                }
            }
        }
    };
    for i in 0..f.src.len() {
        let other = walk(true, End::S(i), &mut seen);
        if End::S(i) < other {
            links.push((End::S(i), other));
        }
    }
    for j in 0..g.tgt.len() {
        // Source-target paths were already recorded from the source side.
        if let End::T(o) = walk(false, End::T(j), &mut seen) {
            if j < o {
                links.push((End::T(j), End::T(o)));
            }
        }
    }
    let mut loops = f.loops + g.loops;
    for k in 0..mid {
        if seen[k] {
            continue;
        }
        loops += 1;
        // Mark the whole cycle through middle position k.
        let mut cur = k;
        loop {
            seen[cur] = true;
            let End::T(a) = f.mate_of(End::T(cur)) else {
                unreachable!("open path in a closed cycle")
            };
            seen[a] = true;
            let End::S(b) = g.mate_of(End::S(a)) else {
                unreachable!("open path in a closed cycle")
            };
            if b == k {
                break;
            }
            cur = b;
        }
    }
    let mut out = KmGraph::from_links(f.src.clone(), g.tgt.clone(), &links);
    out.loops = loops;
    Ok(out)
}

/// Profiles equal positionwise and equal link sets; loops are ignored.
pub fn graph_eq(a: &KmGraph, b: &KmGraph) -> bool {
    a.src == b.src && a.tgt == b.tgt && a.mate == b.mate
}

/// First difference between two graphs, if any.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    SourceProfile {
        position: usize,
    },
    TargetProfile {
        position: usize,
    },
    ProfileLength {
        side: String,
        left: usize,
        right: usize,
    },
    Link {
        at: String,
        left: String,
        right: String,
    },
}

pub fn first_difference(a: &KmGraph, b: &KmGraph) -> Option<Witness> {
    if a.src.len() != b.src.len() {
        return Some(Witness::ProfileLength {
            side: "source".into(),
            left: a.src.len(),
            right: b.src.len(),
        });
    }
    if a.tgt.len() != b.tgt.len() {
        return Some(Witness::ProfileLength {
            side: "target".into(),
            left: a.tgt.len(),
            right: b.tgt.len(),
        });
    }
    if let Some(i) = (0..a.src.len()).find(|&i| a.src[i] != b.src[i]) {
        return Some(Witness::SourceProfile { position: i });
    }
    if let Some(j) = (0..a.tgt.len()).find(|&j| a.tgt[j] != b.tgt[j]) {
        return Some(Witness::TargetProfile { position: j });
    }
    (0..a.mate.len())
        .find(|&k| a.mate[k] != b.mate[k])
        .map(|k| Witness::Link {
            at: a.end(k).to_string(),
            left: a.end(a.mate[k]).to_string(),
            right: b.end(b.mate[k]).to_string(),
        })
}

/// The graph of a primitive arrow, given its type.
fn primitive_graph(t: &Arrow, ty: &Sequent) -> KmGraph {
    let sp = profile(&ty.source);
    let tp = profile(&ty.target);
    match t {
        Arrow::CHat(a, b) => {
            let (na, nb) = (a.atom_count(), b.atom_count());
            let mut links: Vec<_> = (0..na).map(|i| (End::S(i), End::T(nb + i))).collect();
            links.extend((0..nb).map(|j| (End::S(na + j), End::T(j))));
            KmGraph::from_links(sp, tp, &links)
        }
        Arrow::CCheck(a, b) => {
            let (na, nb) = (a.atom_count(), b.atom_count());
            let mut links: Vec<_> = (0..nb).map(|i| (End::S(i), End::T(na + i))).collect();
            links.extend((0..na).map(|j| (End::S(nb + j), End::T(j))));
            KmGraph::from_links(sp, tp, &links)
        }
        Arrow::DeltaAll(b, a) => {
            let (na, nb) = (a.atom_count(), b.atom_count());
            let mut links: Vec<_> = (0..na).map(|i| (End::S(i), End::T(i))).collect();
            links.extend((0..nb).map(|k| (End::T(na + k), End::T(na + nb + k))));
            KmGraph::from_links(sp, tp, &links)
        }
        Arrow::SigmaEx(b, a) => {
            let (na, nb) = (a.atom_count(), b.atom_count());
            let mut links: Vec<_> = (0..nb).map(|k| (End::S(k), End::S(nb + k))).collect();
            links.extend((0..na).map(|i| (End::S(2 * nb + i), End::T(i))));
            KmGraph::from_links(sp, tp, &links)
        }
        _ => {
            debug_assert_eq!(sp, tp);
            KmGraph::identity(sp)
        }
    }
}

/// The functor G. Only primitives are typed; operations act on graphs.
pub fn graph_of(t: &Arrow) -> Result<KmGraph, GraphError> {
    match t {
        Arrow::Comp(g, f) => compose_graphs(&graph_of(g)?, &graph_of(f)?),
        Arrow::Tensor(_, f, g) => Ok(tensor_graphs(&graph_of(f)?, &graph_of(g)?)),
        Arrow::Quant(_, _, f) | Arrow::Ren(_, _, f) => graph_of(f),
        _ => {
            let ty = infer(t)?;
            Ok(primitive_graph(t, &ty))
        }
    }
}

/// Deterministic DOT rendering.
pub fn to_dot(g: &KmGraph) -> String {
    let mut s = String::from("digraph km {\n");
    if g.src.is_empty() && g.tgt.is_empty() {
        s.push_str("}\n");
        return s;
    }
    s.push_str(&format!("  graph [loops={}];\n", g.loops));
    for (i, site) in g.src.iter().enumerate() {
        s.push_str(&format!("  s{i} [label=\"{site}\"];\n"));
    }
    for (j, site) in g.tgt.iter().enumerate() {
        s.push_str(&format!("  t{j} [label=\"{site}\"];\n"));
    }
    for (a, b) in g.links() {
        let name = |e: End| match e {
            End::S(i) => format!("s{i}"),
            End::T(j) => format!("t{j}"),
        };
        s.push_str(&format!("  {} -> {} [dir=none];\n", name(a), name(b)));
    }
    s.push_str("}\n");
    s
}

/// Connective directly above each atom occurrence once quantifier prefixes
/// are skipped; `None` when only quantifiers lie above it.
pub fn atom_contexts(a: &Formula) -> Vec<Option<Conn>> {
    fn go(a: &Formula, ctx: Option<Conn>, out: &mut Vec<Option<Conn>>) {
        match a {
            Formula::Atom { .. } => out.push(ctx),
            Formula::Neg(b) => go(b, None, out),
            Formula::Quant(_, _, b) => go(b, ctx, out),
            Formula::Bin(op, l, r) => {
                go(l, Some(*op), out);
                go(r, Some(*op), out);
            }
        }
    }
    let mut out = Vec::new();
    go(a, None, &mut out);
    out
}

/// Pairs of atom positions that are the two immediate operands of one
/// binary node with the given connective.
pub fn atom_operand_pairs(a: &Formula, op: Conn) -> Vec<(usize, usize)> {
    fn go(a: &Formula, op: Conn, base: &mut usize, out: &mut Vec<(usize, usize)>) {
        match a {
            Formula::Atom { .. } => *base += 1,
            Formula::Neg(b) | Formula::Quant(_, _, b) => go(b, op, base, out),
            Formula::Bin(o, l, r) => {
                if *o == op && l.is_atom() && r.is_atom() {
                    out.push((*base, *base + 1));
                }
                go(l, op, base, out);
                go(r, op, base, out);
            }
        }
    }
    let mut out = Vec::new();
    go(a, op, &mut 0, &mut out);
    out
}

/// A tied pair (X, Y) where X sits under prefixes below a ∧ in the source
/// and Y under prefixes below a ∨ in the target.
pub fn and_or_violation(ty: &Sequent, g: &KmGraph) -> Option<(usize, usize)> {
    let cs = atom_contexts(&ty.source);
    let ct = atom_contexts(&ty.target);
    g.links().into_iter().find_map(|l| match l {
        (End::S(i), End::T(j)) if cs[i] == Some(Conn::And) && ct[j] == Some(Conn::Or) => {
            Some((i, j))
        }
        _ => None,
    })
}

/// Two atoms joined by ∨ in the source tied to two atoms joined by ∧ in the
/// target.
pub fn or_and_violation(ty: &Sequent, g: &KmGraph) -> Option<((usize, usize), (usize, usize))> {
    let ors = atom_operand_pairs(&ty.source, Conn::Or);
    let ands = atom_operand_pairs(&ty.target, Conn::And);
    for &(x1, x2) in &ors {
        let (End::T(y1), End::T(y2)) = (g.mate_of(End::S(x1)), g.mate_of(End::S(x2))) else {
            continue;
        };
        let pair = (y1.min(y2), y1.max(y2));
        if ands.contains(&pair) {
            return Some(((x1, x2), pair));
        }
    }
    None
}

/// Every link crosses sides and pairs occurrences of one letter.
pub fn is_tying(g: &KmGraph) -> bool {
    g.src.len() == g.tgt.len()
        && g.links()
            .into_iter()
            .all(|l| matches!(l, (End::S(_), End::T(_))))
        && g.is_well_formed()
}
