use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mlcoh::arrows::{parse_arrow, typecheck, Arrow, ArrowError};
use mlcoh::gen::Generator;
use mlcoh::gentzen::{cut_free_form, develop, eliminate_cut, parse_gentzen, purify, GentzenError};
use mlcoh::graphs::to_dot;
use mlcoh::par::Exec;
use mlcoh::schemas::{axiom_schemas, instantiate};
use mlcoh::translate::{negate_arrow, nnf_arrow};
use mlcoh::{decide_eq, graph_of, SystemId, Verdict};

/// Proof terms of multiplicative linear first-order predicate logic.
///
/// Terms are given inline when they start with `(`, otherwise they name a
/// UTF-8 file holding one term.
///
/// Exit codes: 0 success or equal, 1 unequal (or a failing selftest),
/// 2 type or proviso error, 3 parse error, 4 precondition error.
#[derive(Parser)]
#[command(name = "mlcoh", version)]
struct Cli {
    /// Category the terms live in; mix is available in qmds, qmpn-neg and qmpn.
    #[arg(long, global = true, value_enum)]
    system: Option<System>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    Qds,
    Qmds,
    QpnNeg,
    QmpnNeg,
    Qpn,
    Qmpn,
}

impl From<System> for SystemId {
    fn from(s: System) -> SystemId {
        match s {
            System::Qds => SystemId::Qds,
            System::Qmds => SystemId::Qmds,
            System::QpnNeg => SystemId::QpnNeg,
            System::QmpnNeg => SystemId::QmpnNeg,
            System::Qpn => SystemId::Qpn,
            System::Qmpn => SystemId::Qmpn,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the type of a term.
    Check { term: String },
    /// Decide equality of two terms; prints the verdict as JSON.
    Eq { lhs: String, rhs: String },
    /// Print the Kelly-Mac Lane graph as `n m | S0-T1 ...`.
    Graph {
        term: String,
        /// Append the number of closed loops.
        #[arg(long)]
        loops: bool,
    },
    /// Print the graph in DOT.
    Dot { term: String },
    /// Eliminate cut from an arrow term (via Gentzenization) or a
    /// variable-pure Gentzen term.
    Cutelim { term: String },
    /// Variable-purify a Gentzen term, or the Gentzenization of an arrow term.
    Purify { term: String },
    /// Factor a QDS or QMDS term into a developed term.
    Develop { term: String },
    /// Translate a QPN¬ or QMPN¬ term into negation normal form.
    Nnf { term: String },
    /// Apply the contravariant negation functor.
    Negate { term: String },
    /// Check every equation of the system on random instances.
    Selftest {
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<ArrowError> for Failure {
    fn from(e: ArrowError) -> Failure {
        let code = if matches!(e, ArrowError::Parse(_)) {
            3
        } else {
            2
        };
        Failure::new(code, e.to_string())
    }
}

impl From<GentzenError> for Failure {
    fn from(e: GentzenError) -> Failure {
        match e {
            GentzenError::Arrow(a) => a.into(),
            GentzenError::Malformed(_) => Failure::new(2, e.to_string()),
            other => Failure::new(4, other.to_string()),
        }
    }
}

/// Output lines and the exit code they come with.
struct Report {
    lines: Vec<String>,
    code: u8,
}

impl Report {
    fn ok(line: impl Into<String>) -> Report {
        Report {
            lines: vec![line.into()],
            code: 0,
        }
    }
}

fn read_term(arg: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('(') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Failure::new(3, format!("cannot read {arg}: {e}")))
}

const GENTZEN_HEADS: [&str; 10] = [
    "gid", "cut", "gand", "gor", "allL", "allR", "exL", "exR", "gren", "gmix",
];

/// Gentzen terms are told apart from arrow terms by their head.
fn is_gentzen(text: &str) -> bool {
    let head = text.trim_start().trim_start_matches('(');
    let head = head
        .split(|c: char| c.is_whitespace() || c == '(')
        .next()
        .unwrap_or("");
    GENTZEN_HEADS.contains(&head)
}

fn arrow(arg: &str, sys: SystemId) -> Result<Arrow, Failure> {
    let t = parse_arrow(&read_term(arg)?, sys)?;
    typecheck(&t, sys)?;
    Ok(t)
}

fn run(cli: Cli) -> Result<Report, Failure> {
    let sys: SystemId = cli
        .system
        .ok_or_else(|| Failure::new(4, "--system is required"))?
        .into();
    Ok(match cli.command {
        Command::Check { term } => Report::ok(typecheck(&arrow(&term, sys)?, sys)?.to_string()),
        Command::Eq { lhs, rhs } => {
            let v = decide_eq(&arrow(&lhs, sys)?, &arrow(&rhs, sys)?, sys)?;
            Report {
                lines: vec![v.to_json()],
                code: if v.is_equal() { 0 } else { 1 },
            }
        }
        Command::Graph { term, loops } => {
            let g = graph_of(&arrow(&term, sys)?).map_err(|e| Failure::new(2, e.to_string()))?;
            Report::ok(g.to_text(loops))
        }
        Command::Dot { term } => {
            let g = graph_of(&arrow(&term, sys)?).map_err(|e| Failure::new(2, e.to_string()))?;
            Report::ok(to_dot(&g).trim_end())
        }
        Command::Cutelim { term } => {
            let text = read_term(&term)?;
            let out = if is_gentzen(&text) {
                eliminate_cut(&parse_gentzen(&text, sys)?)?
            } else {
                cut_free_form(&arrow(&term, sys)?, sys)?.output
            };
            Report::ok(out.to_string())
        }
        Command::Purify { term } => {
            let text = read_term(&term)?;
            let g = if is_gentzen(&text) {
                parse_gentzen(&text, sys)?
            } else {
                mlcoh::gentzen::gentzenize(&arrow(&term, sys)?)?
            };
            Report::ok(purify(&g)?.1.to_string())
        }
        Command::Develop { term } => Report::ok(develop(&arrow(&term, sys)?, sys)?.to_string()),
        Command::Nnf { term } => Report::ok(nnf_arrow(&arrow(&term, sys)?)?.to_string()),
        Command::Negate { term } => Report::ok(negate_arrow(&arrow(&term, sys)?)?.to_string()),
        Command::Selftest { count, seed } => selftest(sys, count, seed),
    })
}

/// One JSON line per schema, then a summary line.
fn selftest(sys: SystemId, count: u64, seed: u64) -> Report {
    let schemas = axiom_schemas(sys);
    let rows = Exec::Parallel.map(schemas, |s| {
        let passed = (seed..seed + count)
            .filter(|&k| {
                let mut g = Generator::new(sys, k).with_max_size(12);
                instantiate(s, &mut g).is_some_and(|inst| {
                    inst.lhs_type == inst.rhs_type
                        && matches!(decide_eq(&inst.lhs, &inst.rhs, sys), Ok(Verdict::Equal))
                })
            })
            .count() as u64;
        (s.name.clone(), passed)
    });
    let failing = rows.iter().filter(|(_, p)| *p < count).count();
    let mut lines: Vec<String> = rows
        .iter()
        .map(|(name, passed)| {
            serde_json::json!({"schema": name, "passed": passed, "count": count}).to_string()
        })
        .collect();
    lines.push(
        serde_json::json!({
            "system": sys.name(),
            "schemas": rows.len(),
            "failing": failing,
            "seed": seed,
        })
        .to_string(),
    );
    Report {
        lines,
        code: if failing == 0 { 0 } else { 1 },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { 3 } else { 0 };
            return ExitCode::from(code);
        }
    };
    let out = cli.out.clone();
    match run(cli) {
        Ok(report) => {
            let text = report.lines.join("\n") + "\n";
            let written = match &out {
                Some(path) => std::fs::write(path, text),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("mlcoh: cannot write output: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(report.code)
        }
        Err(f) => {
            eprintln!("mlcoh: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
