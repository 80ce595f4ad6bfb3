//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Sizes, counts and time limits are pinned below.

mod common;

use std::time::{Duration, Instant};

use common::oracle::oracle_graph;
use mlcoh::arrows::{derive_xi, typecheck, Arrow, XiKind};
use mlcoh::decide::random_rewrites;
use mlcoh::gen::Generator;
use mlcoh::gentzen::{
    analogous, compute_clusters, cut_free_form, denote_at, eliminate_renaming, equiv,
    random_cut_free, renaming_counterexample, GentzenError, GentzenTerm, QRule,
};
use mlcoh::graphs::{and_or_violation, or_and_violation, Witness};
use mlcoh::lang::{parse_formula, var};
use mlcoh::par::Exec;
use mlcoh::schemas::{all_schemas, instantiate};
use mlcoh::translate::{build_iso, nnf_arrow, nnf_formula};
use mlcoh::{decide_eq, graph_eq, graph_of, Dir, Formula, SystemId, Verdict};

const SCHEMA_INSTANCES: u64 = 100;
const SCHEMA_FORMULA_SIZE: usize = 12;
const SCHEMA_LIMIT: Duration = Duration::from_secs(60);

const CUT_SEEDS: u64 = 500;
const CUT_BUDGET: usize = 10;
const CUT_INSTANCE_LIMIT: Duration = Duration::from_secs(1);

const RENAMING_TERMS: u64 = 300;
const RENAMING_BUDGET: usize = 9;

const REWRITE_PAIRS: u64 = 500;
const REWRITE_STEPS: usize = 10;
const REWRITE_BUDGET: usize = 8;

const NNF_TERMS: u64 = 200;
const NNF_BUDGET: usize = 8;
const NNF_LIMIT: Duration = Duration::from_secs(30);

const LEMMA_TERMS: u64 = 1000;
const LEMMA_BUDGET: usize = 10;

const CLUSTER_TERMS: u64 = 500;
const CLUSTER_BUDGET: usize = 9;

const ORACLE_TERMS: usize = 1000;
const ORACLE_MAX_SIZE: usize = 10;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn p(s: &str) -> Formula {
    parse_formula(s, SystemId::QmpnNeg).expect("fixed formula")
}

fn graph_equal(f: &Arrow, g: &Arrow) -> bool {
    match (graph_of(f), graph_of(g)) {
        (Ok(a), Ok(b)) => graph_eq(&a, &b),
        _ => false,
    }
}

/// Both sides of every schema on random instances decide Equal.
fn axiom_soundness(exec: Exec) -> Outcome {
    let start = Instant::now();
    let schemas: Vec<_> = all_schemas().iter().collect();
    let failures: Vec<String> = exec
        .map(schemas.clone(), |s| {
            (0..SCHEMA_INSTANCES).find_map(|seed| {
                let mut g = Generator::new(s.system, seed).with_max_size(SCHEMA_FORMULA_SIZE);
                let Some(inst) = instantiate(s, &mut g) else {
                    return Some(format!("{}: no instance at seed {seed}", s.name));
                };
                if inst.lhs_type != inst.rhs_type {
                    return Some(format!("{}: types differ at seed {seed}", s.name));
                }
                match decide_eq(&inst.lhs, &inst.rhs, s.system) {
                    Ok(Verdict::Equal) => None,
                    other => Some(format!("{}: {other:?} at seed {seed}", s.name)),
                }
            })
        })
        .into_iter()
        .flatten()
        .collect();
    let took = start.elapsed();
    outcome(
        failures.is_empty() && took <= SCHEMA_LIMIT,
        format!(
            "{} schemas x {SCHEMA_INSTANCES} instances, {} failing, {:.1}s (limit {}s){}",
            schemas.len(),
            failures.len(),
            took.as_secs_f64(),
            SCHEMA_LIMIT.as_secs(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn cut_elimination(exec: Exec) -> Outcome {
    let failures: Vec<String> = exec
        .map_seeds(0..CUT_SEEDS, |seed| {
            let sys = if seed % 2 == 0 {
                SystemId::Qds
            } else {
                SystemId::Qmds
            };
            let f = Generator::new(sys, seed)
                .diversified()
                .with_max_size(CUT_BUDGET)
                .arrow(CUT_BUDGET);
            let start = Instant::now();
            let r = match cut_free_form(&f, sys) {
                Ok(r) => r,
                Err(e) => return Some(format!("seed {seed}: {e}")),
            };
            let took = start.elapsed();
            let out = &r.output;
            let checks = [
                (out.is_cut_free(), "cut left"),
                (out.is_renaming_free(), "renaming left"),
                (out.is_variable_pure(), "not variable-pure"),
                (
                    equiv(&out.source, &r.pure.source) && equiv(&out.target, &r.pure.target),
                    "sequent changed",
                ),
                (
                    r.trace.iter().all(|(a, b)| b < a),
                    "measure did not decrease",
                ),
                (graph_equal(&r.denotation, &f), "graph changed"),
                (took <= CUT_INSTANCE_LIMIT, "over time"),
            ];
            checks
                .iter()
                .find(|(ok, _)| !ok)
                .map(|(_, why)| format!("seed {seed}: {why}"))
        })
        .into_iter()
        .flatten()
        .collect();
    outcome(
        failures.is_empty(),
        format!(
            "{CUT_SEEDS} seeds, {} failing (per-instance limit {}ms){}",
            failures.len(),
            CUT_INSTANCE_LIMIT.as_millis(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn same_denotation(a: &GentzenTerm, b: &GentzenTerm) -> bool {
    match (
        denote_at(a, &a.source, &a.target),
        denote_at(b, &a.source, &a.target),
    ) {
        (Ok(x), Ok(y)) => graph_equal(&x, &y),
        _ => false,
    }
}

fn renaming_elimination(exec: Exec) -> Outcome {
    let results = exec.map_seeds(0..RENAMING_TERMS, |seed| {
        let sys = if seed % 2 == 0 {
            SystemId::Qds
        } else {
            SystemId::Qmds
        };
        let t = random_cut_free(sys, seed, RENAMING_BUDGET, true);
        let had = !t.is_renaming_free();
        match eliminate_renaming(&t) {
            Ok(out)
                if out.is_renaming_free() && analogous(&t, &out) && same_denotation(&t, &out) =>
            {
                Ok(had)
            }
            Ok(_) => Err(format!(
                "seed {seed}: output not renaming-free, analogous and graph-equal"
            )),
            Err(e) => Err(format!("seed {seed}: {e}")),
        }
    });
    let with_renaming = results.iter().filter(|r| matches!(r, Ok(true))).count();
    let failures: Vec<_> = results.into_iter().filter_map(Result::err).collect();
    let rejected = matches!(
        eliminate_renaming(&renaming_counterexample()),
        Err(GentzenError::NotVariablePure(_))
    );
    outcome(
        failures.is_empty() && rejected && with_renaming > 0,
        format!(
            "{RENAMING_TERMS} terms ({with_renaming} with renaming), {} failing; counterexample {}{}",
            failures.len(),
            if rejected { "rejected" } else { "NOT rejected" },
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

fn rewrite_closure(exec: Exec) -> Outcome {
    let results = exec.map_seeds(0..REWRITE_PAIRS, |seed| {
        let sys = SystemId::ALL[seed as usize % SystemId::ALL.len()];
        let mut g = Generator::new(sys, seed);
        let f = g.arrow(REWRITE_BUDGET);
        let (h, steps) = random_rewrites(&f, REWRITE_STEPS, &mut g);
        match decide_eq(&f, &h, sys) {
            Ok(Verdict::Equal) => Ok(steps),
            other => Err(format!("{sys} seed {seed}: {other:?}")),
        }
    });
    let steps: usize = results.iter().filter_map(|r| r.as_ref().ok()).sum();
    let failures: Vec<_> = results.into_iter().filter_map(Result::err).collect();
    outcome(
        failures.is_empty() && steps > 0,
        format!(
            "{REWRITE_PAIRS} pairs, {steps} rewrite steps in total, {} failing{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

/// The link through `at` in the oracle's graph of `t`.
fn oracle_mate(t: &Arrow, at: &str) -> Option<String> {
    let (links, _) = oracle_graph(t);
    links.into_iter().find_map(|(a, b)| {
        if a.to_string() == at {
            Some(b.to_string())
        } else if b.to_string() == at {
            Some(a.to_string())
        } else {
            None
        }
    })
}

/// Unequal with a link witness that the oracle confirms on both sides.
fn separated(f: &Arrow, g: &Arrow, sys: SystemId) -> Result<String, String> {
    match decide_eq(f, g, sys) {
        Ok(Verdict::Unequal {
            witness: Witness::Link { at, left, right },
        }) => {
            if oracle_mate(f, &at).as_deref() == Some(left.as_str())
                && oracle_mate(g, &at).as_deref() == Some(right.as_str())
            {
                Ok(format!("{at}: {left} vs {right}"))
            } else {
                Err(format!("witness {at}: {left} vs {right} not confirmed"))
            }
        }
        other => Err(format!("{other:?}")),
    }
}

fn separation() -> Outcome {
    let pp = p("P");
    let chat = Arrow::CHat(pp.clone(), pp.clone());
    let a = separated(&chat, &Arrow::id(p("P & P")), SystemId::Qds);

    // Cap the first P against ¬P, then cup a fresh ¬P∨P.
    let np = p("~P");
    let with_delta = Arrow::chain(vec![
        derive_xi(XiKind::DeltaCheck, &pp, &pp),
        derive_xi(XiKind::SigmaHat, &pp, &pp),
        Arrow::D(pp.clone(), np.clone(), pp.clone()),
    ]);
    let b = separated(&with_delta, &Arrow::id(p("P & (~P | P)")), SystemId::QpnNeg);

    let ppp = p("(P & P) & P");
    let swap_front = Arrow::and(chat.clone(), Arrow::id(pp.clone()));
    let swap_back = Arrow::chain(vec![
        Arrow::BHat(Dir::Right, pp.clone(), pp.clone(), pp.clone()),
        Arrow::and(Arrow::id(pp.clone()), chat),
        Arrow::BHat(Dir::Left, pp.clone(), pp.clone(), pp),
    ]);
    let typed = typecheck(&swap_back, SystemId::Qds)
        .map(|t| t.source == ppp && t.target == ppp)
        .unwrap_or(false);
    let c = if typed {
        separated(&swap_front, &swap_back, SystemId::Qds)
    } else {
        Err("permutation terms mistyped".into())
    };
    let all = [("a", a), ("b", b), ("c", c)];
    let ok = all.iter().all(|(_, r)| r.is_ok());
    let detail = all
        .iter()
        .map(|(n, r)| match r {
            Ok(w) => format!("({n}) {w}"),
            Err(e) => format!("({n}) FAILED {e}"),
        })
        .collect::<Vec<_>>()
        .join("; ");
    outcome(ok, detail)
}

fn nnf_equivalence(exec: Exec) -> Outcome {
    let start = Instant::now();
    let failures: Vec<String> = exec
        .map_seeds(0..NNF_TERMS, |seed| {
            let sys = SystemId::QpnNeg;
            let f = Generator::new(sys, seed).arrow(NNF_BUDGET);
            let ty = typecheck(&f, sys).ok()?;
            let ff = match nnf_arrow(&f) {
                Ok(t) => t,
                Err(e) => return Some(format!("seed {seed}: {e}")),
            };
            let Ok(fty) = typecheck(&ff, SystemId::Qpn) else {
                return Some(format!("seed {seed}: Ff is not a QPN term"));
            };
            if fty.source != nnf_formula(&ty.source) || fty.target != nnf_formula(&ty.target) {
                return Some(format!("seed {seed}: Ff has the wrong type"));
            }
            if !graph_equal(&ff, &f) {
                return Some(format!("seed {seed}: GFf differs from Gf"));
            }
            let (Ok((i, _)), Ok((_, j))) = (build_iso(&ty.source), build_iso(&ty.target)) else {
                return Some(format!("seed {seed}: isomorphism failed"));
            };
            let round = Arrow::chain(vec![j, ff, i]);
            match typecheck(&round, sys) {
                Ok(t) if t == ty && graph_equal(&round, &f) => None,
                _ => Some(format!("seed {seed}: i⁻¹∘Ff∘i differs from f")),
            }
        })
        .into_iter()
        .flatten()
        .collect();
    let took = start.elapsed();
    outcome(
        failures.is_empty() && took <= NNF_LIMIT,
        format!(
            "{NNF_TERMS} terms, {} failing, {:.1}s (limit {}s){}",
            failures.len(),
            took.as_secs_f64(),
            NNF_LIMIT.as_secs(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn lemma_properties(exec: Exec) -> Outcome {
    let count = |sys: SystemId| {
        let hits = exec.map_seeds(0..LEMMA_TERMS, move |seed| {
            let f = Generator::new(sys, seed).arrow(LEMMA_BUDGET);
            let ty = typecheck(&f, sys).expect("generated terms typecheck");
            let g = graph_of(&f).expect("graph of a typed term");
            (
                and_or_violation(&ty, &g).is_some(),
                or_and_violation(&ty, &g).is_some(),
            )
        });
        (
            hits.iter().filter(|h| h.0).count(),
            hits.iter().filter(|h| h.1).count(),
        )
    };
    let (qds_ao, qds_oa) = count(SystemId::Qds);
    let (qmds_ao, qmds_oa) = count(SystemId::Qmds);
    let mix = Arrow::Mix(p("P"), p("Q"));
    let ty = typecheck(&mix, SystemId::Qmds).expect("mix typechecks");
    let mix_witness = and_or_violation(&ty, &graph_of(&mix).expect("mix graph")).is_some();
    outcome(
        qds_ao == 0 && qds_oa == 0 && qmds_oa == 0 && qmds_ao > 0 && mix_witness,
        format!(
            "QDS ∧∨ {qds_ao}, QDS ∨∧ {qds_oa}, QMDS ∨∧ {qmds_oa} (all must be 0); QMDS ∧∨ {qmds_ao} (must be > 0); m_(P,Q) witness {mix_witness}"
        ),
    )
}

fn cluster_analysis(exec: Exec) -> Outcome {
    let q = |k: QRule, x: &str, body: &str, v: &str, f: GentzenTerm| {
        GentzenTerm::quant(k, var(x), p(body), var(v), None, f).expect("fixed term")
    };
    let id = |a: &str| GentzenTerm::id(p(a)).expect("fixed term");
    let labels = |t: &GentzenTerm| compute_clusters(t).map(|r| r.labels()).ok();

    let l = q(QRule::AllL, "x", "R(u,x)", "y", id("R(u,y)"));
    let a =
        GentzenTerm::and(p("R(u,y)"), p("P(y)"), None, None, l, id("P(y)")).expect("fixed term");
    let two = q(QRule::ExR, "z", "R(u,z) & P(z)", "y", a);
    let two_ok = labels(&two) == Some(vec![vec!["P1".into(), "R2".into()], vec!["R1".into()]]);

    let l = q(QRule::AllL, "x", "R(x,x)", "y", id("R(y,y)"));
    let a =
        GentzenTerm::and(p("R(y,y)"), p("P(y)"), None, None, l, id("P(y)")).expect("fixed term");
    let one = q(QRule::ExR, "z", "R(y,z) & P(z)", "y", a);
    let one_ok = labels(&one) == Some(vec![vec!["P1".into(), "R1".into(), "R2".into()]]);

    let failures: Vec<String> = exec
        .map_seeds(0..CLUSTER_TERMS, |seed| {
            let sys = if seed % 2 == 0 {
                SystemId::Qds
            } else {
                SystemId::Qmds
            };
            let t = random_cut_free(sys, seed, CLUSTER_BUDGET, false);
            match compute_clusters(&t) {
                Ok(r) if r.violations().is_empty() => None,
                Ok(r) => Some(format!("seed {seed}: {:?}", r.violations())),
                Err(e) => Some(format!("seed {seed}: {e}")),
            }
        })
        .into_iter()
        .flatten()
        .collect();
    outcome(
        two_ok && one_ok && failures.is_empty(),
        format!(
            "two-cluster example {}, one-cluster example {}; {CLUSTER_TERMS} terms, {} violating{}",
            if two_ok { "reproduced" } else { "WRONG" },
            if one_ok { "reproduced" } else { "WRONG" },
            failures.len(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn oracle_cross_check(exec: Exec) -> Outcome {
    let mut terms = Vec::new();
    let mut seed = 0u64;
    while terms.len() < ORACLE_TERMS {
        let sys = SystemId::ALL[seed as usize % SystemId::ALL.len()];
        let f = Generator::new(sys, seed)
            .with_max_size(ORACLE_MAX_SIZE)
            .arrow(ORACLE_MAX_SIZE);
        if f.size() <= ORACLE_MAX_SIZE {
            terms.push((seed, f));
        }
        seed += 1;
    }
    let failures: Vec<String> = exec
        .map(terms, |(seed, f)| {
            let g = graph_of(&f).ok()?;
            let (links, loops) = oracle_graph(&f);
            (links != g.links() || loops != g.loops).then(|| format!("seed {seed}: {f}"))
        })
        .into_iter()
        .flatten()
        .collect();
    outcome(
        failures.is_empty(),
        format!(
            "{ORACLE_TERMS} terms of size <= {ORACLE_MAX_SIZE}, {} disagreeing{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn main() {
    let exec = Exec::Parallel;
    type Run = Box<dyn Fn() -> Outcome>;
    let criteria: Vec<(&str, Run)> = vec![
        ("axiom soundness", Box::new(move || axiom_soundness(exec))),
        ("cut elimination", Box::new(move || cut_elimination(exec))),
        (
            "renaming elimination",
            Box::new(move || renaming_elimination(exec)),
        ),
        ("rewrite closure", Box::new(move || rewrite_closure(exec))),
        ("separation", Box::new(separation)),
        ("nnf equivalence", Box::new(move || nnf_equivalence(exec))),
        ("lemma properties", Box::new(move || lemma_properties(exec))),
        ("cluster analysis", Box::new(move || cluster_analysis(exec))),
        (
            "oracle cross-check",
            Box::new(move || oracle_cross_check(exec)),
        ),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.ok {
            failed += 1;
        }
        println!(
            "criterion {} {}: {} ({})",
            k + 1,
            if o.ok { "PASS" } else { "FAIL" },
            name,
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
