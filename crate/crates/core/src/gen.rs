//! Seeded random formulas and well-typed arrow terms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrows::{crown_ex, infer, Arrow, Dir};
use crate::lang::{Conn, Formula, Grammar, Letter, Quantifier, SystemId, Var};

/// Predicate letters and their arities. Arity is fixed per name so that
/// every generated term parses back under one arity table.
pub const LETTERS: [(&str, usize); 8] = [
    ("P", 1),
    ("Q", 0),
    ("R", 2),
    ("S", 1),
    ("T", 0),
    ("U", 1),
    ("V", 2),
    ("W", 0),
];

pub const VARS: [&str; 4] = ["x", "y", "z", "w"];

pub struct Generator {
    pub system: SystemId,
    pub rng: ChaCha8Rng,
    /// Upper bound on formula size for sources and for growing steps.
    pub max_size: usize,
    pub vars: Vec<Var>,
    /// Use every letter at most once, so that types are diversified.
    pub diversified: bool,
    used: Vec<bool>,
}

impl Generator {
    pub fn new(system: SystemId, seed: u64) -> Generator {
        Generator {
            system,
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_size: 24,
            vars: VARS.iter().map(|v| Var::new(*v)).collect(),
            diversified: false,
            used: vec![false; LETTERS.len()],
        }
    }

    pub fn diversified(mut self) -> Generator {
        self.diversified = true;
        self
    }

    pub fn with_max_size(mut self, n: usize) -> Generator {
        self.max_size = n;
        self
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn var(&mut self) -> Var {
        self.vars
            .choose(&mut self.rng)
            .expect("nonempty variable pool")
            .clone()
    }

    pub fn reset_letters(&mut self) {
        self.used.iter_mut().for_each(|u| *u = false);
    }

    pub fn atom(&mut self) -> Formula {
        let k = if self.diversified {
            let free: Vec<usize> = (0..LETTERS.len()).filter(|&k| !self.used[k]).collect();
            match free.choose(&mut self.rng) {
                Some(&k) => k,
                None => self.rng.gen_range(0..LETTERS.len()),
            }
        } else {
            self.rng.gen_range(0..LETTERS.len())
        };
        self.used[k] = true;
        let (name, arity) = LETTERS[k];
        let args = (0..arity).map(|_| self.var()).collect();
        Formula::Atom {
            letter: Letter::new(name),
            args,
        }
    }

    fn atoms_left(&self) -> usize {
        if self.diversified {
            self.used.iter().filter(|u| !**u).count()
        } else {
            usize::MAX
        }
    }

    /// A random formula of about `size` nodes in the system's grammar.
    pub fn formula(&mut self, size: usize) -> Formula {
        let grammar = self.system.grammar();
        if size <= 1 || self.atoms_left() <= 1 {
            let a = self.atom();
            return if grammar == Grammar::AtomNeg && size <= 2 && self.chance(0.3) {
                Formula::neg(a)
            } else {
                a
            };
        }
        let roll = self.rng.gen_range(0..10);
        match roll {
            0..=5 => {
                let left = self.rng.gen_range(1..size.max(2));
                let right = (size - 1).saturating_sub(left).max(1);
                let op = if self.chance(0.5) {
                    Conn::And
                } else {
                    Conn::Or
                };
                let l = self.formula(left);
                let r = self.formula(right);
                Formula::bin(op, l, r)
            }
            6..=8 => {
                let q = if self.chance(0.5) {
                    Quantifier::All
                } else {
                    Quantifier::Ex
                };
                let x = self.var();
                Formula::quant(q, x, self.formula(size - 1))
            }
            _ => match grammar {
                Grammar::Neg => Formula::neg(self.formula(size - 1)),
                Grammar::AtomNeg => Formula::neg(self.atom()),
                Grammar::Plain => self.formula(size),
            },
        }
    }

    /// A random source formula; in systems with Δ/Σ a Σ-redex is sometimes
    /// planted on the left.
    pub fn source(&mut self, size: usize) -> Formula {
        if self.system.has_xi() && self.chance(0.2) {
            let b = self.crown_index();
            let rest = self.formula(size.saturating_sub(b.size() * 2 + 2).max(1));
            return Formula::or(crown_ex(&b), rest);
        }
        self.formula(size)
    }

    fn crown_index(&mut self) -> Formula {
        if self.system.grammar() == Grammar::AtomNeg {
            self.atom()
        } else {
            let n = self.rng.gen_range(1..=3);
            self.formula(n)
        }
    }

    /// A well-typed arrow term of about `budget` steps from a random source.
    /// Budget 1 gives an identity on an atom.
    pub fn arrow(&mut self, budget: usize) -> Arrow {
        self.reset_letters();
        if budget <= 1 {
            return Arrow::id(self.atom());
        }
        let n = self.rng.gen_range(1..=(self.max_size / 2).max(1));
        let src = self.source(n);
        self.arrow_from(&src, budget)
    }

    /// A well-typed arrow term with source `a`.
    pub fn arrow_from(&mut self, a: &Formula, budget: usize) -> Arrow {
        let t = self.step(a, budget);
        debug_assert!(
            infer(&t).is_ok(),
            "generator produced an ill-typed term {t}"
        );
        t
    }

    fn step(&mut self, a: &Formula, budget: usize) -> Arrow {
        if budget == 0 {
            return Arrow::id(a.clone());
        }
        for _ in 0..8 {
            let roll = self.rng.gen_range(0..12);
            let made = match roll {
                0..=2 if budget >= 2 => {
                    let b1 = self.rng.gen_range(1..budget);
                    let f = self.step(a, b1);
                    let mid = infer(&f).expect("well-typed step").target;
                    let g = self.step(&mid, budget - b1);
                    Some(Arrow::comp(g, f))
                }
                3..=4 => match a {
                    Formula::Bin(op, l, r) => {
                        let b1 = self.rng.gen_range(0..=budget);
                        let f = self.step(l, b1);
                        let g = self.step(r, budget - b1);
                        Some(Arrow::tensor(*op, f, g))
                    }
                    _ => None,
                },
                5 => match a {
                    Formula::Quant(q, x, body) => {
                        let f = self.step(body, budget - 1);
                        Some(Arrow::quant(*q, x.clone(), f))
                    }
                    _ => None,
                },
                6 if budget >= 2 => self.renaming(a, budget - 1),
                _ => self.primitive(a),
            };
            if let Some(t) = made {
                return t;
            }
        }
        Arrow::id(a.clone())
    }

    fn renaming(&mut self, a: &Formula, budget: usize) -> Option<Arrow> {
        let all = a.all_vars();
        let fresh: Vec<Var> = self
            .vars
            .iter()
            .filter(|v| !all.contains(*v))
            .cloned()
            .collect();
        let x = fresh.choose(&mut self.rng)?.clone();
        let fv: Vec<Var> = a.free_vars().into_iter().collect();
        let (a1, y) = match fv.choose(&mut self.rng) {
            Some(y) if self.chance(0.7) => (a.subst(y, &x)?, y.clone()),
            _ => (a.clone(), self.var()),
        };
        let f = self.step(&a1, budget);
        let t = Arrow::ren(x, y, f);
        let ty = infer(&t).ok()?;
        (ty.source == *a && ty.target.size() <= self.max_size).then_some(t)
    }

    /// One primitive whose source is `a`, when some applies.
    fn primitive(&mut self, a: &Formula) -> Option<Arrow> {
        let mut cands: Vec<Arrow> = Vec::new();
        let grow_ok = a.size() + 2 <= self.max_size;
        if let Formula::Bin(op, l, r) = a {
            if let Formula::Bin(op2, rl, rr) = &**r {
                if op2 == op {
                    let (x, y, z) = ((**l).clone(), (**rl).clone(), (**rr).clone());
                    cands.push(match op {
                        Conn::And => Arrow::BHat(Dir::Right, x, y, z),
                        Conn::Or => Arrow::BCheck(Dir::Right, x, y, z),
                    });
                }
            }
            if let Formula::Bin(op2, ll, lr) = &**l {
                if op2 == op {
                    let (x, y, z) = ((**ll).clone(), (**lr).clone(), (**r).clone());
                    cands.push(match op {
                        Conn::And => Arrow::BHat(Dir::Left, x, y, z),
                        Conn::Or => Arrow::BCheck(Dir::Left, x, y, z),
                    });
                }
            }
            match op {
                Conn::And => {
                    cands.push(Arrow::CHat((**l).clone(), (**r).clone()));
                    if let Formula::Bin(Conn::Or, rl, rr) = &**r {
                        cands.push(Arrow::D((**l).clone(), (**rl).clone(), (**rr).clone()));
                    }
                    if let Formula::Quant(Quantifier::Ex, x, body) = &**l {
                        if !r.is_free_in(x) {
                            cands.push(Arrow::ThetaExL(x.clone(), (**body).clone(), (**r).clone()));
                        }
                    }
                    if self.system.has_mix() {
                        cands.push(Arrow::Mix((**l).clone(), (**r).clone()));
                    }
                }
                Conn::Or => {
                    cands.push(Arrow::CCheck((**r).clone(), (**l).clone()));
                    if self.system.has_xi() {
                        if let Some(b) = crown_ex_index(l) {
                            cands.push(Arrow::SigmaEx(b, (**r).clone()));
                        }
                    }
                }
            }
        }
        if let Formula::Quant(q, x, body) = a {
            match q {
                Quantifier::All => {
                    cands.push(Arrow::Iota(Quantifier::All, x.clone(), (**body).clone()));
                    if let Formula::Bin(Conn::Or, bl, br) = &**body {
                        if !br.is_free_in(x) {
                            cands.push(Arrow::ThetaAllR(x.clone(), (**bl).clone(), (**br).clone()));
                        }
                    }
                }
                Quantifier::Ex => {
                    if !body.is_free_in(x) {
                        cands.push(Arrow::Gamma(Quantifier::Ex, x.clone(), (**body).clone()));
                    }
                }
            }
        }
        if grow_ok {
            let x = self.var();
            cands.push(Arrow::Iota(Quantifier::Ex, x.clone(), a.clone()));
            if !a.is_free_in(&x) {
                cands.push(Arrow::Gamma(Quantifier::All, x, a.clone()));
            }
        }
        if self.system.has_xi() && !self.diversified {
            let b = self.crown_index();
            if a.size() + 2 * b.size() + 4 + b.free_vars().len() <= self.max_size {
                cands.push(Arrow::DeltaAll(b, a.clone()));
            }
        }
        if cands.is_empty() {
            return None;
        }
        let k = self.rng.gen_range(0..cands.len());
        Some(cands.swap_remove(k))
    }
}

/// B when `a` is ∃X̄(B∧¬B) with X̄ the free-variable sequence of B.
pub fn crown_ex_index(a: &Formula) -> Option<Formula> {
    let mut cur = a;
    while let Formula::Quant(Quantifier::Ex, _, body) = cur {
        cur = body;
    }
    match cur {
        Formula::Bin(Conn::And, b, nb) if **nb == Formula::neg((**b).clone()) => {
            (crown_ex(b) == *a).then(|| (**b).clone())
        }
        _ => None,
    }
}

/// A well-typed term of `system`, deterministic per seed.
pub fn gen_random_arrow(system: SystemId, budget: usize, seed: u64) -> Arrow {
    Generator::new(system, seed).arrow(budget.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrows::typecheck;

    #[test]
    fn budget_one_is_atomic_identity() {
        for seed in 0..20 {
            match gen_random_arrow(SystemId::Qds, 1, seed) {
                Arrow::Id(a) => assert!(a.is_atom()),
                t => panic!("expected an identity, got {t}"),
            }
        }
    }

    #[test]
    fn generated_terms_typecheck() {
        for sys in SystemId::ALL {
            for seed in 0..300 {
                let t = gen_random_arrow(sys, 15, seed);
                typecheck(&t, sys).unwrap_or_else(|e| panic!("{sys} seed {seed}: {e}\n{t}"));
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(
            gen_random_arrow(SystemId::QmpnNeg, 12, 9),
            gen_random_arrow(SystemId::QmpnNeg, 12, 9)
        );
    }

    #[test]
    fn delta_appears_in_xi_systems() {
        let hits = (0..1000)
            .filter(|&s| {
                gen_random_arrow(SystemId::QpnNeg, 6, s)
                    .contains(&|t| matches!(t, Arrow::DeltaAll(..)))
            })
            .count();
        assert!(hits >= 1);
    }

    #[test]
    fn diversified_sources_stay_diversified() {
        for seed in 0..200 {
            let mut g = Generator::new(SystemId::Qds, seed).diversified();
            let t = g.arrow(10);
            let ty = infer(&t).unwrap();
            assert!(
                ty.source.is_diversified() && ty.target.is_diversified(),
                "{t}"
            );
        }
    }
}
