//! Post-hoc analysis of plays against C and D: literals, chains, the lemma
//! checks, and the interpretations under which the machine loses.

mod s4;
mod s6;

pub use s4::{
    s4_chains, s4_interpretation, s4_lemmas, s4_literals, s4_verdict_checks, Pair, S4Chain, S4Chains, S4Inventory,
    S4Literal,
};
pub use s6::{
    s6_chains, s6_interpretation, s6_lemmas, s6_literals, s6_verdict_checks, S6Chains, S6Inventory, S6Literal,
};

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::adjudicator::Interpretation;
use crate::arena::LabeledMove;
use crate::formula::{instantiate_scheme, Bang, Formula, Scheme};

/// A move with the computation step it was made in.
pub type Timed = (usize, LabeledMove);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    S4,
    S6,
}

impl Mode {
    pub fn of(scheme: Scheme) -> Option<Mode> {
        match scheme {
            Scheme::S4 => Some(Mode::S4),
            Scheme::S6 => Some(Mode::S6),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("the formula is not the {0:?} instance")]
    SchemeMismatch(Mode),
    #[error("both heads have complete chains: {0} and {1}")]
    BothComplete(String, String),
}

/// Checks that `f` is the instance the mode's analysis is written for.
pub fn check_instance(mode: Mode, f: &Formula) -> Result<(), AnalysisError> {
    let scheme = match mode {
        Mode::S4 => Scheme::S4,
        Mode::S6 => Scheme::S6,
    };
    let ok = [Bang::Uncountable, Bang::Aleph0]
        .into_iter()
        .any(|b| instantiate_scheme(scheme, b, &Default::default()).as_ref() == Ok(f));
    if ok {
        Ok(())
    } else {
        Err(AnalysisError::SchemeMismatch(mode))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub passed: bool,
    /// Counterexample or summary.
    pub detail: String,
}

impl LemmaCheck {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        LemmaCheck { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&LemmaCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Everything the analysis produces for one play.
#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub mode: Mode,
    pub literals: Vec<String>,
    pub chains: Vec<String>,
    pub lemmas: LemmaReport,
    pub interpretation: Option<Interpretation>,
    /// Why no interpretation could be built, if so.
    pub error: Option<String>,
}

/// Runs the whole analysis for a mode: literals, chains, lemma checks, and
/// the induced interpretation together with the verdict checks under it.
pub fn analyze(mode: Mode, f: &Formula, timed: &[Timed]) -> Result<Analysis, AnalysisError> {
    check_instance(mode, f)?;
    let run: Vec<LabeledMove> = timed.iter().map(|(_, m)| m.clone()).collect();
    Ok(match mode {
        Mode::S4 => {
            let inv = s4_literals(f, timed);
            let chains = s4_chains(&inv);
            let mut lemmas = s4_lemmas(&inv, &chains);
            let (interpretation, error) = match s4_interpretation(&inv, &chains) {
                Ok(i) => {
                    lemmas.checks.extend(s4_verdict_checks(f, &i, &run, &inv, &chains));
                    (Some(i), None)
                }
                Err(e) => {
                    lemmas.checks.push(LemmaCheck::new("interpretation", false, e.to_string()));
                    (None, Some(e.to_string()))
                }
            };
            Analysis {
                mode,
                literals: inv.literals.iter().map(|l| l.to_string()).collect(),
                chains: chains.lines(),
                lemmas,
                interpretation,
                error,
            }
        }
        Mode::S6 => {
            let inv = s6_literals(f, &run);
            let chains = s6_chains(&inv);
            let mut lemmas = s6_lemmas(&inv, &chains);
            let i = s6_interpretation(&inv, &chains);
            lemmas.checks.extend(s6_verdict_checks(f, &i, &run, &inv, &chains));
            Analysis {
                mode,
                literals: inv.literals.iter().map(|l| l.to_string()).collect(),
                chains: chains.lines(&inv),
                lemmas,
                interpretation: Some(i),
                error: None,
            }
        }
    })
}
