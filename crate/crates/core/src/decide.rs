//! Equality of arrow terms by comparing types and graphs.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::arrows::{typecheck, Arrow, ArrowError, Sequent};
use crate::gen::Generator;
use crate::graphs::{first_difference, graph_of, Witness};
use crate::lang::SystemId;
use crate::schemas::{axiom_schemas, rewrite_once, Direction};

pub use crate::gen::gen_random_arrow;
pub use crate::schemas::NoMatch;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Equal,
    Unequal { witness: Witness },
    TypeMismatch { lhs: String, rhs: String },
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdicts serialize")
    }
}

/// Equal iff both terms have the same sequent and the same graph.
pub fn decide_eq(f: &Arrow, g: &Arrow, system: SystemId) -> Result<Verdict, ArrowError> {
    let tf = typecheck(f, system)?;
    let tg = typecheck(g, system)?;
    Ok(compare(f, &tf, g, &tg))
}

fn compare(f: &Arrow, tf: &Sequent, g: &Arrow, tg: &Sequent) -> Verdict {
    if tf != tg {
        return Verdict::TypeMismatch {
            lhs: tf.to_string(),
            rhs: tg.to_string(),
        };
    }
    let gf = graph_of(f).expect("graph of a well-typed term");
    let gg = graph_of(g).expect("graph of a well-typed term");
    match first_difference(&gf, &gg) {
        None => Verdict::Equal,
        Some(witness) => Verdict::Unequal { witness },
    }
}

/// Attempts per step when searching for a schema and position that match.
pub const REWRITE_ATTEMPTS: usize = 200;

/// Apply up to `steps` random rewrites with schemas of `g.system`.
/// Returns the final term and the number of rewrites performed.
pub fn random_rewrites(f: &Arrow, steps: usize, g: &mut Generator) -> (Arrow, usize) {
    let schemas = axiom_schemas(g.system);
    let mut cur = f.clone();
    let mut done = 0;
    for _ in 0..steps {
        let positions = cur.positions();
        let mut next = None;
        for _ in 0..REWRITE_ATTEMPTS {
            let s = *schemas.choose(&mut g.rng).expect("nonempty table");
            let p = positions.choose(&mut g.rng).expect("root position").clone();
            let d = if rand::Rng::gen_bool(&mut g.rng, 0.5) {
                Direction::LeftToRight
            } else {
                Direction::RightToLeft
            };
            if let Ok(t) = rewrite_once(&cur, s, &p, d, g) {
                next = Some(t);
                break;
            }
        }
        match next {
            Some(t) => {
                cur = t;
                done += 1;
            }
            None => break,
        }
    }
    (cur, done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrows::{derive_theta, ThetaVariant};
    use crate::lang::{atom, var, Formula};

    #[test]
    fn gamma_iota_is_identity() {
        let a = atom("P", &["y"]);
        let x = var("x");
        let lhs = Arrow::comp(
            Arrow::Gamma(crate::lang::Quantifier::All, x.clone(), a.clone()),
            Arrow::Iota(crate::lang::Quantifier::All, x.clone(), a.clone()),
        );
        let rhs = Arrow::id(Formula::all(x, a));
        assert_eq!(
            decide_eq(&lhs, &rhs, SystemId::Qds).unwrap(),
            Verdict::Equal
        );
        assert_eq!(Verdict::Equal.to_json(), r#"{"verdict":"equal"}"#);
    }

    #[test]
    fn commutation_is_not_identity() {
        let p = atom("P", &[]);
        let v = decide_eq(
            &Arrow::CHat(p.clone(), p.clone()),
            &Arrow::id(Formula::and(p.clone(), p)),
            SystemId::Qds,
        )
        .unwrap();
        assert!(v
            .to_json()
            .starts_with(r#"{"verdict":"unequal","witness":{"kind":"link""#));
        match v {
            Verdict::Unequal {
                witness: Witness::Link { at, left, right },
            } => {
                assert_eq!(
                    (at.as_str(), left.as_str(), right.as_str()),
                    ("S0", "T1", "T0")
                );
            }
            other => panic!("unexpected verdict {other:?}"),
        }
    }

    #[test]
    fn theta_round_trip() {
        let x = var("x");
        let a = atom("R", &["x", "y"]);
        let d = atom("Q", &[]);
        let back = derive_theta(ThetaVariant::AllOrLeft, &x, &a, &d).unwrap();
        let t = Arrow::comp(back, Arrow::ThetaAllR(x.clone(), a.clone(), d.clone()));
        let id = Arrow::id(Formula::all(x, Formula::or(a, d)));
        assert!(decide_eq(&t, &id, SystemId::Qds).unwrap().is_equal());
    }

    #[test]
    fn type_mismatch_is_reported() {
        let p = atom("P", &[]);
        let q = atom("Q", &[]);
        let v = decide_eq(&Arrow::id(p), &Arrow::id(q), SystemId::Qds).unwrap();
        assert!(matches!(v, Verdict::TypeMismatch { .. }));
    }

    #[test]
    fn rewrite_chains_preserve_equality() {
        for sys in [SystemId::Qds, SystemId::QmpnNeg] {
            for seed in 0..20 {
                let mut g = Generator::new(sys, seed).with_max_size(10);
                let f = g.arrow(6);
                let (h, _) = random_rewrites(&f, 5, &mut g);
                assert!(decide_eq(&f, &h, sys).unwrap().is_equal(), "{f} vs {h}");
            }
        }
    }
}
