//! Brute-force graph evaluator, independent of `graph_of`.
//!
//! A term is flattened into a column of formulas, one primitive acting in
//! context between consecutive columns. Each step contributes straight
//! edges between the columns plus cups (new pairs in its target) and caps
//! (pairs consumed from its source). Links are then read off by walking
//! paths from the outer columns, and leftover cycles are loops.

use mlcoh::arrows::{infer, Arrow};
use mlcoh::graphs::End;

type Pairs = Vec<(usize, usize)>;

struct Step {
    /// Atom counts of the column before and after.
    before: usize,
    after: usize,
    /// (position before, position after).
    straight: Vec<(usize, usize)>,
    cups: Vec<(usize, usize)>,
    caps: Vec<(usize, usize)>,
}

fn atoms_of(t: &Arrow) -> (usize, usize) {
    let ty = infer(t).expect("oracle input typechecks");
    (ty.source.atom_count(), ty.target.atom_count())
}

/// Local action of a primitive on its own atoms.
fn local(t: &Arrow) -> (Pairs, Pairs, Pairs) {
    let (n, m) = atoms_of(t);
    let ident = |k: usize| (0..k).map(|i| (i, i)).collect::<Vec<_>>();
    match t {
        Arrow::CHat(a, b) | Arrow::CCheck(b, a) => {
            // a⋆b on the left of the turnstile, b⋆a on the right.
            let (p, q) = (a.atom_count(), b.atom_count());
            let mut s: Vec<_> = (0..p).map(|i| (i, q + i)).collect();
            s.extend((0..q).map(|j| (p + j, j)));
            (s, vec![], vec![])
        }
        Arrow::DeltaAll(b, a) => {
            let (p, q) = (a.atom_count(), b.atom_count());
            let cups = (0..q).map(|k| (p + k, p + q + k)).collect();
            (ident(p), cups, vec![])
        }
        Arrow::SigmaEx(b, a) => {
            let (p, q) = (a.atom_count(), b.atom_count());
            let caps = (0..q).map(|k| (k, q + k)).collect();
            let s = (0..p).map(|i| (2 * q + i, i)).collect();
            (s, vec![], caps)
        }
        _ => {
            assert_eq!(n, m, "order-preserving primitive {t}");
            (ident(n), vec![], vec![])
        }
    }
}

fn flatten(t: &Arrow, pre: usize, post: usize, out: &mut Vec<Step>) {
    match t {
        Arrow::Comp(g, f) => {
            flatten(f, pre, post, out);
            flatten(g, pre, post, out);
        }
        Arrow::Tensor(_, f, g) => {
            let (c, _) = atoms_of(g);
            let (_, b) = atoms_of(f);
            flatten(f, pre, post + c, out);
            flatten(g, pre + b, post, out);
        }
        Arrow::Quant(_, _, f) | Arrow::Ren(_, _, f) => flatten(f, pre, post, out),
        prim => {
            let (n, m) = atoms_of(prim);
            let (s, cups, caps) = local(prim);
            let mut straight: Vec<_> = (0..pre).map(|i| (i, i)).collect();
            straight.extend(s.into_iter().map(|(i, j)| (pre + i, pre + j)));
            straight.extend((0..post).map(|k| (pre + n + k, pre + m + k)));
            out.push(Step {
                before: pre + n + post,
                after: pre + m + post,
                straight,
                cups: cups.into_iter().map(|(i, j)| (pre + i, pre + j)).collect(),
                caps: caps.into_iter().map(|(i, j)| (pre + i, pre + j)).collect(),
            });
        }
    }
}

/// Links (smaller end first, sorted) and loop count of `t`.
pub fn oracle_graph(t: &Arrow) -> (Vec<(End, End)>, usize) {
    let mut steps = Vec::new();
    flatten(t, 0, 0, &mut steps);
    // Node ids: column c, position i.
    let mut cols = vec![steps[0].before];
    cols.extend(steps.iter().map(|s| s.after));
    let mut base = vec![0];
    for c in &cols {
        base.push(base.last().unwrap() + c);
    }
    let total = *base.last().unwrap();
    // Adjacency as (neighbour, edge id) so that double edges walk correctly.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); total];
    let mut edges = 0;
    let mut link = |a: usize, b: usize| {
        adj[a].push((b, edges));
        adj[b].push((a, edges));
        edges += 1;
    };
    for (k, s) in steps.iter().enumerate() {
        assert_eq!(s.before, cols[k]);
        for &(i, j) in &s.straight {
            link(base[k] + i, base[k + 1] + j);
        }
        for &(i, j) in &s.cups {
            link(base[k + 1] + i, base[k + 1] + j);
        }
        for &(i, j) in &s.caps {
            link(base[k] + i, base[k] + j);
        }
    }
    let last = cols.len() - 1;
    let end_of = |v: usize| -> Option<End> {
        if v < cols[0] {
            Some(End::S(v))
        } else if v >= base[last] {
            Some(End::T(v - base[last]))
        } else {
            None
        }
    };
    let mut seen = vec![false; total];
    let mut links = Vec::new();
    for v in (0..total).filter(|&v| end_of(v).is_some()) {
        if seen[v] {
            continue;
        }
        assert_eq!(adj[v].len(), 1, "outer node of degree one");
        let (mut via, mut cur) = (usize::MAX, v);
        seen[v] = true;
        loop {
            let &(next, e) = adj[cur].iter().find(|&&(_, e)| e != via).unwrap();
            via = e;
            cur = next;
            seen[cur] = true;
            if end_of(cur).is_some() {
                break;
            }
        }
        let (a, b) = (end_of(v).unwrap(), end_of(cur).unwrap());
        links.push(if a < b { (a, b) } else { (b, a) });
    }
    links.sort();
    let mut loops = 0;
    for v in 0..total {
        if seen[v] {
            continue;
        }
        loops += 1;
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if !std::mem::replace(&mut seen[u], true) {
                stack.extend(adj[u].iter().map(|&(w, _)| w));
            }
        }
    }
    (links, loops)
}
