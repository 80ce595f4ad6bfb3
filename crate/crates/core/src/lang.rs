//! Formulas of the object language: variables, predicate letters, the three
//! negation grammars, substitution and occurrence analysis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// An individual variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Var {
        let name = name.into();
        assert!(!name.is_empty(), "variable names are nonempty");
        Var(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A predicate letter. Arity is the length of the argument list of the atom
/// carrying it; the parser keeps it fixed per name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Letter(String);

impl Letter {
    pub fn new(name: impl Into<String>) -> Letter {
        Letter(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum Conn {
    And,
    Or,
}

impl Conn {
    pub fn dual(self) -> Conn {
        match self {
            Conn::And => Conn::Or,
            Conn::Or => Conn::And,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Conn::And => "&",
            Conn::Or => "|",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum Quantifier {
    All,
    Ex,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::All => Quantifier::Ex,
            Quantifier::Ex => Quantifier::All,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::All => "all",
            Quantifier::Ex => "some",
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom { letter: Letter, args: Vec<Var> },
    Neg(Box<Formula>),
    Bin(Conn, Box<Formula>, Box<Formula>),
    Quant(Quantifier, Var, Box<Formula>),
}

/// Which negations a formula may contain.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Grammar {
    /// No negation at all.
    Plain,
    /// Negation anywhere.
    Neg,
    /// Negation only directly on atoms.
    AtomNeg,
}

/// The six categories. The system fixes the formula grammar, the legal
/// primitives and whether mix is available.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, PartialOrd, Ord)]
pub enum SystemId {
    Qds,
    Qmds,
    QpnNeg,
    QmpnNeg,
    Qpn,
    Qmpn,
}

impl SystemId {
    pub const ALL: [SystemId; 6] = [
        SystemId::Qds,
        SystemId::Qmds,
        SystemId::QpnNeg,
        SystemId::QmpnNeg,
        SystemId::Qpn,
        SystemId::Qmpn,
    ];

    pub fn grammar(self) -> Grammar {
        match self {
            SystemId::Qds | SystemId::Qmds => Grammar::Plain,
            SystemId::QpnNeg | SystemId::QmpnNeg => Grammar::Neg,
            SystemId::Qpn | SystemId::Qmpn => Grammar::AtomNeg,
        }
    }

    pub fn has_mix(self) -> bool {
        matches!(self, SystemId::Qmds | SystemId::QmpnNeg | SystemId::Qmpn)
    }

    /// Whether the Δ/Σ primitives exist.
    pub fn has_xi(self) -> bool {
        self.grammar() != Grammar::Plain
    }

    /// Every term of `other` is a term of `self`.
    pub fn includes(self, other: SystemId) -> bool {
        let grammar_ok = matches!(
            (self.grammar(), other.grammar()),
            (_, Grammar::Plain) | (Grammar::Neg, _) | (Grammar::AtomNeg, Grammar::AtomNeg)
        );
        grammar_ok && (self.has_mix() || !other.has_mix())
    }

    pub fn with_mix(self) -> SystemId {
        match self {
            SystemId::Qds | SystemId::Qmds => SystemId::Qmds,
            SystemId::QpnNeg | SystemId::QmpnNeg => SystemId::QmpnNeg,
            SystemId::Qpn | SystemId::Qmpn => SystemId::Qmpn,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SystemId::Qds => "qds",
            SystemId::Qmds => "qmds",
            SystemId::QpnNeg => "qpn-neg",
            SystemId::QmpnNeg => "qmpn-neg",
            SystemId::Qpn => "qpn",
            SystemId::Qmpn => "qmpn",
        }
    }

    pub fn from_name(s: &str) -> Option<SystemId> {
        SystemId::ALL.into_iter().find(|sys| sys.name() == s)
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, PartialOrd, Ord)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Polarity::Pos => 1,
            Polarity::Neg => -1,
        }
    }
}

/// One atom occurrence, numbered left to right.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct AtomOccurrence {
    pub position: usize,
    pub letter: Letter,
    pub polarity: Polarity,
    pub args: Vec<Var>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LangError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{0}")]
    SystemViolation(String),
}

pub fn atom(letter: &str, args: &[&str]) -> Formula {
    Formula::Atom {
        letter: Letter::new(letter),
        args: args.iter().map(|a| Var::new(*a)).collect(),
    }
}

pub fn var(name: &str) -> Var {
    Var::new(name)
}

impl Formula {
    pub fn neg(a: Formula) -> Formula {
        Formula::Neg(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::Bin(Conn::And, Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Bin(Conn::Or, Box::new(a), Box::new(b))
    }

    pub fn bin(op: Conn, a: Formula, b: Formula) -> Formula {
        Formula::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn all(x: Var, a: Formula) -> Formula {
        Formula::Quant(Quantifier::All, x, Box::new(a))
    }

    pub fn ex(x: Var, a: Formula) -> Formula {
        Formula::Quant(Quantifier::Ex, x, Box::new(a))
    }

    pub fn quant(q: Quantifier, x: Var, a: Formula) -> Formula {
        Formula::Quant(q, x, Box::new(a))
    }

    /// Q_{x_n} ... Q_{x_1} A for `xs = [x_1, ..., x_n]`: the first variable
    /// ends up innermost.
    pub fn quant_seq(q: Quantifier, xs: &[Var], a: Formula) -> Formula {
        xs.iter()
            .fold(a, |acc, x| Formula::quant(q, x.clone(), acc))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom { .. })
    }

    /// An atom or a negated atom.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Atom { .. } => true,
            Formula::Neg(b) => b.is_atom(),
            _ => false,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom { .. } => 1,
            Formula::Neg(b) => 1 + b.size(),
            Formula::Bin(_, a, b) => 1 + a.size() + b.size(),
            Formula::Quant(_, _, b) => 1 + b.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom { args, .. } => {
                for a in args {
                    if !bound.contains(a) {
                        out.insert(a.clone());
                    }
                }
            }
            Formula::Neg(b) => b.collect_free(bound, out),
            Formula::Bin(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_free_in(&self, x: &Var) -> bool {
        match self {
            Formula::Atom { args, .. } => args.contains(x),
            Formula::Neg(b) => b.is_free_in(x),
            Formula::Bin(_, a, b) => a.is_free_in(x) || b.is_free_in(x),
            Formula::Quant(_, z, b) => z != x && b.is_free_in(x),
        }
    }

    /// Some quantifier node binds `x`, vacuous or not.
    pub fn is_bound_in(&self, x: &Var) -> bool {
        match self {
            Formula::Atom { .. } => false,
            Formula::Neg(b) => b.is_bound_in(x),
            Formula::Bin(_, a, b) => a.is_bound_in(x) || b.is_bound_in(x),
            Formula::Quant(_, z, b) => z == x || b.is_bound_in(x),
        }
    }

    pub fn bound_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Quant(_, x, _) = f {
                out.insert(x.clone());
            }
        });
        out
    }

    /// Every variable occurring anywhere, free, bound or as a binder.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom { args, .. } => out.extend(args.iter().cloned()),
            Formula::Quant(_, x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Atom { .. } => {}
            Formula::Neg(b) | Formula::Quant(_, _, b) => b.visit(f),
            Formula::Bin(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Free variables in order of first free occurrence from the left.
    pub fn free_var_sequence(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_seq(&mut Vec::new(), &mut out);
        out
    }

    fn collect_seq(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        match self {
            Formula::Atom { args, .. } => {
                for a in args {
                    if !bound.contains(a) && !out.contains(a) {
                        out.push(a.clone());
                    }
                }
            }
            Formula::Neg(b) => b.collect_seq(bound, out),
            Formula::Bin(_, a, b) => {
                a.collect_seq(bound, out);
                b.collect_seq(bound, out);
            }
            Formula::Quant(_, x, b) => {
                bound.push(x.clone());
                b.collect_seq(bound, out);
                bound.pop();
            }
        }
    }

    /// A^x_y, or `None` when y is not free for x in A. Never renames bound
    /// variables.
    pub fn subst(&self, x: &Var, y: &Var) -> Option<Formula> {
        if x == y {
            return Some(self.clone());
        }
        self.subst_inner(x, y)
    }

    fn subst_inner(&self, x: &Var, y: &Var) -> Option<Formula> {
        Some(match self {
            Formula::Atom { letter, args } => Formula::Atom {
                letter: letter.clone(),
                args: args
                    .iter()
                    .map(|a| if a == x { y.clone() } else { a.clone() })
                    .collect(),
            },
            Formula::Neg(b) => Formula::neg(b.subst_inner(x, y)?),
            Formula::Bin(op, a, b) => Formula::bin(*op, a.subst_inner(x, y)?, b.subst_inner(x, y)?),
            Formula::Quant(q, z, b) => {
                if z == x || !b.is_free_in(x) {
                    self.clone()
                } else if z == y {
                    return None;
                } else {
                    Formula::quant(*q, z.clone(), b.subst_inner(x, y)?)
                }
            }
        })
    }

    /// Atom occurrences left to right; polarity is the parity of enclosing
    /// negations.
    pub fn atom_profile(&self) -> Vec<AtomOccurrence> {
        let mut out = Vec::new();
        self.collect_profile(Polarity::Pos, &mut out);
        out
    }

    fn collect_profile(&self, pol: Polarity, out: &mut Vec<AtomOccurrence>) {
        match self {
            Formula::Atom { letter, args } => out.push(AtomOccurrence {
                position: out.len(),
                letter: letter.clone(),
                polarity: pol,
                args: args.clone(),
            }),
            Formula::Neg(b) => b.collect_profile(pol.flip(), out),
            Formula::Bin(_, a, b) => {
                a.collect_profile(pol, out);
                b.collect_profile(pol, out);
            }
            Formula::Quant(_, _, b) => b.collect_profile(pol, out),
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Atom { .. } => 1,
            Formula::Neg(b) | Formula::Quant(_, _, b) => b.atom_count(),
            Formula::Bin(_, a, b) => a.atom_count() + b.atom_count(),
        }
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.atom_profile().into_iter().map(|o| o.letter).collect()
    }

    /// No predicate letter occurs twice.
    pub fn is_diversified(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.letters().into_iter().all(|l| seen.insert(l))
    }

    pub fn check_grammar(&self, grammar: Grammar) -> Result<(), LangError> {
        match self {
            Formula::Atom { .. } => Ok(()),
            Formula::Neg(b) => match grammar {
                Grammar::Plain => Err(LangError::SystemViolation(format!(
                    "negation is not available: {self}"
                ))),
                Grammar::AtomNeg if !b.is_atom() => Err(LangError::SystemViolation(format!(
                    "negation only applies to atoms here: {self}"
                ))),
                _ => b.check_grammar(grammar),
            },
            Formula::Bin(_, a, b) => {
                a.check_grammar(grammar)?;
                b.check_grammar(grammar)
            }
            Formula::Quant(_, _, b) => b.check_grammar(grammar),
        }
    }

    /// Replace predicate letters through `map`; letters not in the map stay.
    pub fn map_letters(&self, map: &impl Fn(&Letter) -> Letter) -> Formula {
        match self {
            Formula::Atom { letter, args } => Formula::Atom {
                letter: map(letter),
                args: args.clone(),
            },
            Formula::Neg(b) => Formula::neg(b.map_letters(map)),
            Formula::Bin(op, a, b) => Formula::bin(*op, a.map_letters(map), b.map_letters(map)),
            Formula::Quant(q, x, b) => Formula::quant(*q, x.clone(), b.map_letters(map)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { letter, args } => {
                write!(f, "{letter}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Neg(b) => match **b {
                Formula::Bin(..) => write!(f, "~({b})"),
                _ => write!(f, "~{b}"),
            },
            Formula::Bin(op, a, b) => {
                match **a {
                    Formula::Bin(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " {} ", op.symbol())?;
                match &**b {
                    Formula::Bin(op2, ..) if op2 != op => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Formula::Quant(q, x, b) => match **b {
                Formula::Bin(..) => write!(f, "{} {x}. ({b})", q.keyword()),
                _ => write!(f, "{} {x}. {b}", q.keyword()),
            },
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Arities seen so far; predicate letters keep their first arity.
#[derive(Default, Clone, Debug)]
pub struct ArityTable(BTreeMap<Letter, usize>);

impl ArityTable {
    pub fn check(&mut self, letter: &Letter, arity: usize) -> Result<(), String> {
        match self.0.get(letter) {
            Some(&n) if n != arity => Err(format!(
                "{letter} used with arity {arity}, earlier with {n}"
            )),
            Some(_) => Ok(()),
            None => {
                self.0.insert(letter.clone(), arity);
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Upper(String),
    Lower(String),
    All,
    Some,
    Dot,
    Comma,
    LParen,
    RParen,
    Tilde,
    And,
    Or,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LangError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        let simple = match c {
            '.' => Some(Tok::Dot),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '~' | '¬' => Some(Tok::Tilde),
            '&' | '∧' => Some(Tok::And),
            '|' | '∨' => Some(Tok::Or),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((pos, t));
            it.next();
            continue;
        }
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut word = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_ascii_alphanumeric() || d == '_' || d == '$' || d == '\'' {
                    word.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            let tok = match word.as_str() {
                "all" => Tok::All,
                "some" => Tok::Some,
                _ if c.is_ascii_uppercase() => Tok::Upper(word),
                _ => Tok::Lower(word),
            };
            out.push((pos, tok));
            continue;
        }
        return Err(LangError::Parse {
            pos,
            msg: format!("unexpected character {c:?}"),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    arities: &'a mut ArityTable,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LangError> {
        Err(LangError::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<(), LangError> {
        if self.peek() == Some(&t) {
            self.i += 1;
            Ok(())
        } else {
            self.err(format!("expected {t:?}"))
        }
    }

    fn formula(&mut self) -> Result<Formula, LangError> {
        let first = self.quant()?;
        let op = match self.peek() {
            Some(Tok::And) => Conn::And,
            Some(Tok::Or) => Conn::Or,
            _ => return Ok(first),
        };
        let mut items = vec![first];
        while let Some(t) = self.peek() {
            let this = match t {
                Tok::And => Conn::And,
                Tok::Or => Conn::Or,
                _ => break,
            };
            if this != op {
                return self.err("mixed '&' and '|' need parentheses");
            }
            self.i += 1;
            items.push(self.quant()?);
        }
        let mut acc = items.pop().expect("at least two items");
        while let Some(a) = items.pop() {
            acc = Formula::bin(op, a, acc);
        }
        Ok(acc)
    }

    fn quant(&mut self) -> Result<Formula, LangError> {
        let q = match self.peek() {
            Some(Tok::All) => Quantifier::All,
            Some(Tok::Some) => Quantifier::Ex,
            _ => return self.unary(),
        };
        self.i += 1;
        let x = self.var()?;
        self.expect(Tok::Dot)?;
        let body = self.quant()?;
        Ok(Formula::quant(q, x, body))
    }

    fn unary(&mut self) -> Result<Formula, LangError> {
        match self.peek().cloned() {
            Some(Tok::Tilde) => {
                self.i += 1;
                // A quantified formula may follow directly so that printed
                // negated quantifiers read back.
                let body = match self.peek() {
                    Some(Tok::All | Tok::Some) => self.quant()?,
                    _ => self.unary()?,
                };
                Ok(Formula::neg(body))
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Upper(name)) => {
                self.i += 1;
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.i += 1;
                    args.push(self.var()?);
                    while self.peek() == Some(&Tok::Comma) {
                        self.i += 1;
                        args.push(self.var()?);
                    }
                    self.expect(Tok::RParen)?;
                }
                let letter = Letter::new(name);
                if let Err(msg) = self.arities.check(&letter, args.len()) {
                    return self.err(msg);
                }
                Ok(Formula::Atom { letter, args })
            }
            _ => self.err("expected a formula"),
        }
    }

    fn var(&mut self) -> Result<Var, LangError> {
        match self.peek().cloned() {
            Some(Tok::Lower(name)) => {
                self.i += 1;
                Ok(Var::new(name))
            }
            _ => self.err("expected a variable"),
        }
    }
}

/// Parse with a caller-held arity table, so several formulas can share one.
pub fn parse_formula_with(
    text: &str,
    grammar: Grammar,
    arities: &mut ArityTable,
) -> Result<Formula, LangError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: text.len(),
        arities,
    };
    let f = p.formula()?;
    if p.i != p.toks.len() {
        return p.err("trailing input");
    }
    f.check_grammar(grammar)?;
    Ok(f)
}

pub fn parse_formula(text: &str, system: SystemId) -> Result<Formula, LangError> {
    parse_formula_with(text, system.grammar(), &mut ArityTable::default())
}
