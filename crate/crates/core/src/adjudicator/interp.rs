use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arena::Player;
use crate::formula::{Atom, Constant, Formula, LetterKind, Term};

/// Win predicate of an enumeration letter over `(S_⊤, S_⊥)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumPredicate {
    Const(bool),
    /// ⊤ wins iff `S_⊤ ⊇ S_⊥`.
    Superset,
    /// ⊤ wins iff `S_⊤ = S_⊥`.
    Equal,
    /// A pseudo-random but fixed function of the two sets.
    Hashed { seed: u64 },
    /// ⊤ wins exactly on the listed pairs, otherwise `default`.
    Table { default: bool, wins: BTreeSet<(BTreeSet<Constant>, BTreeSet<Constant>)> },
}

/// Truth table of an elementary letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthTable {
    Const(bool),
    Hashed { seed: u64 },
    Table {
        default: bool,
        #[serde(with = "pairs")]
        entries: BTreeMap<Vec<Constant>, bool>,
    },
}

// JSON objects need string keys; tables are written as `[args, value]` pairs.
mod pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::formula::Constant;

    pub fn serialize<S: Serializer>(m: &BTreeMap<Vec<Constant>, bool>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Vec<Constant>, bool>, D::Error> {
        Ok(Vec::<(Vec<Constant>, bool)>::deserialize(d)?.into_iter().collect())
    }
}

fn hashed(seed: u64, parts: &[&[Constant]]) -> bool {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        for c in *p {
            h.update(c.0.to_le_bytes());
        }
    }
    h.finalize()[0] & 1 == 1
}

impl EnumPredicate {
    pub fn machine_wins(&self, s_top: &BTreeSet<Constant>, s_bot: &BTreeSet<Constant>) -> bool {
        match self {
            EnumPredicate::Const(b) => *b,
            EnumPredicate::Superset => s_top.is_superset(s_bot),
            EnumPredicate::Equal => s_top == s_bot,
            EnumPredicate::Hashed { seed } => {
                let t: Vec<Constant> = s_top.iter().copied().collect();
                let b: Vec<Constant> = s_bot.iter().copied().collect();
                hashed(*seed, &[&t, &b])
            }
            EnumPredicate::Table { default, wins } => {
                if wins.contains(&(s_top.clone(), s_bot.clone())) {
                    true
                } else {
                    *default
                }
            }
        }
    }
}

impl TruthTable {
    pub fn value(&self, args: &[Constant]) -> bool {
        match self {
            TruthTable::Const(b) => *b,
            TruthTable::Hashed { seed } => hashed(*seed, &[args]),
            TruthTable::Table { default, entries } => entries.get(args).copied().unwrap_or(*default),
        }
    }
}

/// Meaning of every letter of a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub elementary: BTreeMap<String, TruthTable>,
    pub enumeration: BTreeMap<String, EnumPredicate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpretationError {
    #[error("no meaning for letter `{0}`")]
    MissingLetter(String),
    #[error("atom `{0}` still has a variable argument")]
    OpenAtom(String),
}

impl Interpretation {
    pub fn new() -> Self {
        Interpretation::default()
    }

    pub fn with_elementary(mut self, letter: &str, t: TruthTable) -> Self {
        self.elementary.insert(letter.to_string(), t);
        self
    }

    pub fn with_enumeration(mut self, letter: &str, p: EnumPredicate) -> Self {
        self.enumeration.insert(letter.to_string(), p);
        self
    }

    /// The same predicate or table for every letter of `f`.
    pub fn uniform(f: &Formula, p: EnumPredicate, t: TruthTable) -> Self {
        let mut i = Interpretation::new();
        for (letter, kind) in f.letters().unwrap_or_default() {
            match kind {
                LetterKind::Enumeration => i.enumeration.insert(letter, p.clone()).map(|_| ()),
                LetterKind::Elementary { .. } => i.elementary.insert(letter, t.clone()).map(|_| ()),
            };
        }
        i
    }

    /// Winner of an atom given its move log (players as seen inside the atom).
    pub fn atom_winner(&self, atom: &Atom, log: &[(Player, Constant)]) -> Result<Player, InterpretationError> {
        let won = match atom.kind() {
            LetterKind::Enumeration => {
                let p = self
                    .enumeration
                    .get(&atom.letter)
                    .ok_or_else(|| InterpretationError::MissingLetter(atom.letter.clone()))?;
                let (top, bot) = contents(log);
                p.machine_wins(&top, &bot)
            }
            LetterKind::Elementary { .. } => {
                let t = self
                    .elementary
                    .get(&atom.letter)
                    .ok_or_else(|| InterpretationError::MissingLetter(atom.letter.clone()))?;
                let args = atom
                    .args
                    .iter()
                    .map(|a| match a {
                        Term::Const(c) => Ok(*c),
                        Term::Var(_) => Err(InterpretationError::OpenAtom(atom.letter.clone())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                t.value(&args)
            }
        };
        Ok(if won { Player::Machine } else { Player::Env })
    }
}

/// `(S_⊤, S_⊥)`: the constants each player has moved in an atom.
pub fn contents(log: &[(Player, Constant)]) -> (BTreeSet<Constant>, BTreeSet<Constant>) {
    let mut top = BTreeSet::new();
    let mut bot = BTreeSet::new();
    for (p, c) in log {
        match p {
            Player::Machine => top.insert(*c),
            Player::Env => bot.insert(*c),
        };
    }
    (top, bot)
}
