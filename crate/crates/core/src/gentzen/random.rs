//! Seeded random cut-free Gentzen terms that are variable-pure and
//! diversified, optionally with renaming.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{Conn, Formula, Letter, SystemId, Var};

use super::formset::{remove_operands, FormSet};
use super::term::{GentzenTerm, QRule};

/// Variables that only ever occur free.
pub const FREE_VARS: [&str; 3] = ["u", "v", "w"];
/// Variables that only ever occur bound.
pub const BOUND_VARS: [&str; 4] = ["x", "y", "z", "t"];

pub struct GentzenGen {
    rng: ChaCha8Rng,
    mix: bool,
    renaming: bool,
    next_letter: usize,
    free: Vec<Var>,
    bound: Vec<Var>,
}

impl GentzenGen {
    /// Mix is used when `system` has it; renaming nodes only when asked.
    pub fn new(system: SystemId, seed: u64, renaming: bool) -> GentzenGen {
        GentzenGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            mix: system.has_mix(),
            renaming,
            next_letter: 0,
            free: FREE_VARS.iter().map(|v| Var::new(*v)).collect(),
            bound: BOUND_VARS.iter().map(|v| Var::new(*v)).collect(),
        }
    }

    /// A term with about `budget` rule applications.
    pub fn term(&mut self, budget: usize) -> GentzenTerm {
        if budget <= 1 {
            return self.leaf();
        }
        let choice = self.rng.gen_range(0..10);
        match choice {
            0..=1 => self.binary(Conn::And, budget),
            2..=3 => self.binary(Conn::Or, budget),
            4 if self.mix => {
                let (f, g) = self.split(budget);
                GentzenTerm::mix(f, g).expect("mix is total")
            }
            8..=9 if self.renaming => {
                let f = self.term(budget - 1);
                self.rename(f)
            }
            _ => {
                let f = self.term(budget - 1);
                let kind = *[QRule::AllL, QRule::AllR, QRule::ExL, QRule::ExR]
                    .choose(&mut self.rng)
                    .expect("four rules");
                self.quantify(kind, f.clone()).unwrap_or(f)
            }
        }
    }

    fn leaf(&mut self) -> GentzenTerm {
        let letter = Letter::new(format!("P{}", self.next_letter));
        self.next_letter += 1;
        let arity = self.rng.gen_range(0..=2);
        let args = (0..arity)
            .map(|_| self.free.choose(&mut self.rng).expect("pool").clone())
            .collect();
        GentzenTerm::id(Formula::Atom { letter, args }).expect("atomic identity")
    }

    fn split(&mut self, budget: usize) -> (GentzenTerm, GentzenTerm) {
        let left = self.rng.gen_range(1..budget);
        let f = self.term(left);
        let g = self.term(budget - left);
        (f, g)
    }

    /// An operand of `side` under `op` and the rest.
    fn pick(&mut self, side: &Formula, op: Conn) -> (Formula, Option<Formula>) {
        let ops = FormSet::of(side).operands(op);
        let a = ops.choose(&mut self.rng).expect("nonempty").to_formula();
        let rest = remove_operands(side, &a, op).expect("operand of its own side");
        (a, rest)
    }

    fn binary(&mut self, op: Conn, budget: usize) -> GentzenTerm {
        let (f, g) = self.split(budget);
        match op {
            Conn::And => {
                let (y1, z1) = self.pick(&f.target, Conn::Or);
                let (y2, z2) = self.pick(&g.target, Conn::Or);
                GentzenTerm::and(y1, y2, z1, z2, f, g).expect("∧ premises fit")
            }
            Conn::Or => {
                let (x1, z1) = self.pick(&f.source, Conn::And);
                let (x2, z2) = self.pick(&g.source, Conn::And);
                GentzenTerm::or(x1, x2, z1, z2, f, g).expect("∨ premises fit")
            }
        }
    }

    fn rename(&mut self, f: GentzenTerm) -> GentzenTerm {
        let free: Vec<Var> = self
            .free
            .iter()
            .filter(|v| f.source.is_free_in(v) || f.target.is_free_in(v))
            .cloned()
            .collect();
        let Some(x) = free.choose(&mut self.rng).cloned() else {
            return f;
        };
        let y = self.free.choose(&mut self.rng).expect("pool").clone();
        GentzenTerm::ren(x, y, f.clone()).unwrap_or(f)
    }

    /// Applies a quantifier rule to an operand of the premise, abstracting
    /// some occurrences of a free variable (all of them for eigenvariables).
    fn quantify(&mut self, kind: QRule, f: GentzenTerm) -> Option<GentzenTerm> {
        let (side, op) = if kind.is_left() {
            (&f.source, Conn::And)
        } else {
            (&f.target, Conn::Or)
        };
        let (a, rest) = self.pick(side, op);
        let all_vars = a.all_vars();
        let x = self
            .bound
            .iter()
            .filter(|x| !all_vars.contains(*x))
            .collect::<Vec<_>>()
            .choose(&mut self.rng)
            .cloned()?
            .clone();
        let candidates: Vec<Var> = if kind.is_eigen() {
            let other = if kind.is_left() { &f.target } else { &f.source };
            self.free
                .iter()
                .filter(|v| !other.is_free_in(v) && !rest.as_ref().is_some_and(|r| r.is_free_in(v)))
                .cloned()
                .collect()
        } else {
            self.free.clone()
        };
        let v = candidates.choose(&mut self.rng)?.clone();
        let body = self.abstract_occurrences(&a, &v, &x, kind.is_eigen());
        GentzenTerm::quant(kind, x, body, v, rest, f).ok()
    }

    fn abstract_occurrences(&mut self, a: &Formula, v: &Var, x: &Var, every: bool) -> Formula {
        match a {
            Formula::Atom { letter, args } => {
                let args = args
                    .iter()
                    .map(|w| {
                        if w == v && (every || self.rng.gen_bool(0.7)) {
                            x.clone()
                        } else {
                            w.clone()
                        }
                    })
                    .collect();
                Formula::Atom {
                    letter: letter.clone(),
                    args,
                }
            }
            Formula::Neg(b) => Formula::neg(self.abstract_occurrences(b, v, x, every)),
            Formula::Bin(op, l, r) => {
                let l = self.abstract_occurrences(l, v, x, every);
                Formula::bin(*op, l, self.abstract_occurrences(r, v, x, every))
            }
            Formula::Quant(q, y, b) => {
                Formula::quant(*q, y.clone(), self.abstract_occurrences(b, v, x, every))
            }
        }
    }
}

/// `GentzenGen::new(system, seed, renaming).term(budget)`.
pub fn random_cut_free(system: SystemId, seed: u64, budget: usize, renaming: bool) -> GentzenTerm {
    GentzenGen::new(system, seed, renaming).term(budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gentzen::{
        analogous, canon_form_set, compute_clusters, denote_at, eliminate_renaming, parse_gentzen,
    };
    use crate::graphs::{graph_eq, graph_of};

    #[test]
    fn terms_are_pure_cut_free_and_diversified() {
        let mut with_ren = 0;
        for seed in 0..300 {
            for sys in [SystemId::Qds, SystemId::Qmds] {
                let t = random_cut_free(sys, seed, 12, seed % 2 == 0);
                assert!(t.is_variable_pure() && t.is_cut_free(), "{t}");
                assert!(canon_form_set(&t.source).is_ok() && canon_form_set(&t.target).is_ok());
                assert_eq!(parse_gentzen(&t.to_string(), sys).unwrap(), t);
                assert!(sys.has_mix() || !t.uses_mix());
                if !t.is_renaming_free() {
                    with_ren += 1;
                }
            }
        }
        assert!(with_ren > 100, "{with_ren}");
    }

    #[test]
    fn cluster_properties_hold() {
        for seed in 0..300 {
            for sys in [SystemId::Qds, SystemId::Qmds] {
                let t = random_cut_free(sys, seed, 12, false);
                let r = compute_clusters(&t).unwrap();
                assert!(r.violations().is_empty(), "{t}\n{:?}", r.violations());
            }
        }
    }

    #[test]
    fn renaming_elimination_on_random_terms() {
        for seed in 0..200 {
            let t = random_cut_free(SystemId::Qmds, seed, 12, true);
            let out = eliminate_renaming(&t).unwrap();
            assert!(out.is_renaming_free() && analogous(&t, &out));
            let a = graph_of(&denote_at(&t, &t.source, &t.target).unwrap()).unwrap();
            let b = graph_of(&denote_at(&out, &t.source, &t.target).unwrap()).unwrap();
            assert!(graph_eq(&a, &b), "{t}");
        }
    }
}
