//! The formula language: connectives, choice quantifiers and the three
//! families of recurrence operators.
//!
//! Formulas are plain values. [`parse`](parse::parse_formula) reads the ASCII
//! concrete syntax, [`render`](render::render) prints it back, and
//! [`to_nnf`](nnf::to_nnf) eliminates implication and pushes negation down to
//! the atoms. [`instantiate_scheme`](scheme::instantiate_scheme) builds the
//! game formulas for short and long production.

mod nnf;
mod parse;
mod render;
mod scheme;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use nnf::{is_nnf, to_nnf};
pub use parse::{parse_formula, parse_with_bang, ParseError};
pub use render::render;
pub use scheme::{instantiate_scheme, Binding, Scheme, SchemeError};

/// A constant, written as a decimal numeral. Constants start at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Constant(pub u64);

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An argument of an atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(Constant),
}

/// Which of the two branching recurrences a node stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cardinality {
    /// `!u`: the machine must win in every infinite thread.
    Uncountable,
    /// `!c`: only essentially finite threads count.
    Aleph0,
}

/// The recurrence a bare `!` in a scheme is bound to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bang {
    Parallel,
    Aleph0,
    Uncountable,
}

impl Bang {
    pub fn cardinality(self) -> Option<Cardinality> {
        match self {
            Bang::Parallel => None,
            Bang::Aleph0 => Some(Cardinality::Aleph0),
            Bang::Uncountable => Some(Cardinality::Uncountable),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Bang::Parallel => "parallel",
            Bang::Aleph0 => "aleph0",
            Bang::Uncountable => "uncountable",
        }
    }

    /// `!` applied to `f`.
    pub fn rec(self, f: Formula) -> Formula {
        match self.cardinality() {
            None => Formula::PRec(Box::new(f)),
            Some(c) => Formula::BRec(c, Box::new(f)),
        }
    }

    /// `?` applied to `f`.
    pub fn corec(self, f: Formula) -> Formula {
        match self.cardinality() {
            None => Formula::PCorec(Box::new(f)),
            Some(c) => Formula::BCorec(c, Box::new(f)),
        }
    }
}

impl std::str::FromStr for Bang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "parallel" | "prec" | "p" => Ok(Bang::Parallel),
            "aleph0" | "countable" | "c" => Ok(Bang::Aleph0),
            "uncountable" | "u" => Ok(Bang::Uncountable),
            other => Err(format!("unknown recurrence `{other}`")),
        }
    }
}

/// An atomic formula `P` or `p(x, 3)`, optionally carrying an occurrence tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub letter: String,
    pub args: Vec<Term>,
    /// Stable occurrence identifier (`P#3`), used to name subgames.
    pub tag: Option<u32>,
}

impl Atom {
    pub fn new(letter: impl Into<String>) -> Self {
        Atom { letter: letter.into(), args: Vec::new(), tag: None }
    }

    pub fn with_args(letter: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { letter: letter.into(), args, tag: None }
    }

    pub fn tagged(mut self, tag: u32) -> Self {
        self.tag = Some(tag);
        self
    }

    pub fn kind(&self) -> LetterKind {
        if self.args.is_empty() {
            LetterKind::Enumeration
        } else {
            LetterKind::Elementary { arity: self.args.len() }
        }
    }
}

/// How a letter is interpreted. Nullary letters denote enumeration games,
/// letters with arguments denote elementary (moveless) games.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LetterKind {
    Elementary { arity: usize },
    Enumeration,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Neg(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// `⊓x`: resolved by the environment.
    ChoiceAll(String, Box<Formula>),
    /// `⊔x`: resolved by the machine.
    ChoiceExists(String, Box<Formula>),
    PRec(Box<Formula>),
    PCorec(Box<Formula>),
    BRec(Cardinality, Box<Formula>),
    BCorec(Cardinality, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(letter: &str) -> Formula {
        Formula::Atom(Atom::new(letter))
    }

    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Children in address order.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) => Vec::new(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().collect(),
            Formula::Implies(a, b) => vec![a, b],
            Formula::Neg(c)
            | Formula::ChoiceAll(_, c)
            | Formula::ChoiceExists(_, c)
            | Formula::PRec(c)
            | Formula::PCorec(c)
            | Formula::BRec(_, c)
            | Formula::BCorec(_, c) => vec![c],
        }
    }

    /// Every atom occurrence, left to right.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Atom>) {
            if let Formula::Atom(a) = f {
                out.push(a);
            }
            for c in f.children() {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }

    /// The letters of the formula with their kinds.
    pub fn letters(&self) -> Result<BTreeMap<String, LetterKind>, String> {
        let mut out = BTreeMap::new();
        for a in self.atoms() {
            let kind = a.kind();
            match out.insert(a.letter.clone(), kind) {
                Some(prev) if prev != kind => {
                    return Err(a.letter.clone());
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// Replace the free occurrences of `var` by `c`.
    pub fn substitute(&self, var: &str, c: Constant) -> Formula {
        match self {
            Formula::Atom(a) => {
                let args = a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) if v == var => Term::Const(c),
                        other => other.clone(),
                    })
                    .collect();
                Formula::Atom(Atom { letter: a.letter.clone(), args, tag: a.tag })
            }
            Formula::ChoiceAll(v, _) | Formula::ChoiceExists(v, _) if v == var => self.clone(),
            Formula::ChoiceAll(v, body) => {
                Formula::ChoiceAll(v.clone(), Box::new(body.substitute(var, c)))
            }
            Formula::ChoiceExists(v, body) => {
                Formula::ChoiceExists(v.clone(), Box::new(body.substitute(var, c)))
            }
            Formula::Neg(b) => Formula::Neg(Box::new(b.substitute(var, c))),
            Formula::And(cs) => Formula::And(cs.iter().map(|f| f.substitute(var, c)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|f| f.substitute(var, c)).collect()),
            Formula::PRec(b) => Formula::PRec(Box::new(b.substitute(var, c))),
            Formula::PCorec(b) => Formula::PCorec(Box::new(b.substitute(var, c))),
            Formula::BRec(k, b) => Formula::BRec(*k, Box::new(b.substitute(var, c))),
            Formula::BCorec(k, b) => Formula::BCorec(*k, Box::new(b.substitute(var, c))),
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute(var, c), b.substitute(var, c))
            }
        }
    }

    /// Change the cardinality flag of every branching node.
    pub fn with_cardinality(&self, card: Cardinality) -> Formula {
        let map = |b: &Formula| Box::new(b.with_cardinality(card));
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Neg(b) => Formula::Neg(map(b)),
            Formula::And(cs) => Formula::And(cs.iter().map(|f| f.with_cardinality(card)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|f| f.with_cardinality(card)).collect()),
            Formula::ChoiceAll(v, b) => Formula::ChoiceAll(v.clone(), map(b)),
            Formula::ChoiceExists(v, b) => Formula::ChoiceExists(v.clone(), map(b)),
            Formula::PRec(b) => Formula::PRec(map(b)),
            Formula::PCorec(b) => Formula::PCorec(map(b)),
            Formula::BRec(_, b) => Formula::BRec(card, map(b)),
            Formula::BCorec(_, b) => Formula::BCorec(card, map(b)),
            Formula::Implies(a, b) => Formula::Implies(map(a), map(b)),
        }
    }

    pub fn contains_implication(&self) -> bool {
        matches!(self, Formula::Implies(..)) || self.children().iter().any(|c| c.contains_implication())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
