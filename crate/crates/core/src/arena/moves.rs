use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Constant, Formula};

/// ⊤ is the machine, ⊥ the environment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "T")]
    Machine,
    #[serde(rename = "B")]
    Env,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Machine => Player::Env,
            Player::Env => Player::Machine,
        }
    }

    pub fn flip_if(self, flip: bool) -> Player {
        if flip {
            self.opponent()
        } else {
            self
        }
    }

    pub fn label(self) -> char {
        match self {
            Player::Machine => 'T',
            Player::Env => 'B',
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A finite bit string naming a thread. `Bits::empty()` is the root thread.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Bits(String);

impl Bits {
    pub fn empty() -> Bits {
        Bits(String::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn child(&self, bit: u8) -> Bits {
        let mut s = self.0.clone();
        s.push(if bit == 0 { '0' } else { '1' });
        Bits(s)
    }

    pub fn is_prefix_of(&self, other: &Bits) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn parent(&self) -> Option<Bits> {
        if self.0.is_empty() {
            None
        } else {
            Some(Bits(self.0[..self.0.len() - 1].to_string()))
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.bytes().map(|b| b - b'0')
    }

    pub fn ones(&self) -> usize {
        self.0.bytes().filter(|&b| b == b'1').count()
    }

    /// All strings of exactly `len` bits, in lexicographic order.
    pub fn all_of_len(len: usize) -> Vec<Bits> {
        let mut out = vec![Bits::empty()];
        for _ in 0..len {
            out = out.iter().flat_map(|b| [b.child(0), b.child(1)]).collect();
        }
        out
    }
}

impl FromStr for Bits {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.bytes().all(|b| b == b'0' || b == b'1') {
            Ok(Bits(s.to_string()))
        } else {
            Err(format!("`{s}` is not a bit string"))
        }
    }
}

impl TryFrom<String> for Bits {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Bits> for String {
    fn from(b: Bits) -> String {
        b.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("ε")
        } else {
            f.write_str(&self.0)
        }
    }
}

/// One step of a move address.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Segment {
    /// Operand of `&`/`|`, or copy of `!p`/`?p`; 1-based.
    Index(u32),
    /// Thread of a branching recurrence; more segments follow.
    Thread(Bits),
    /// Split of a leaf thread; always the last segment.
    Replicate(Bits),
    /// A constant: a choice resolution, an enumeration move, or (not last)
    /// the already made resolution of a choice the move passes through.
    Const(Constant),
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Index(i) => write!(f, "{i}"),
            Segment::Thread(w) => f.write_str(w.as_str()),
            Segment::Replicate(w) => write!(f, "{}:", w.as_str()),
            Segment::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledMove {
    pub player: Player,
    pub path: Vec<Segment>,
}

pub type Run = Vec<LabeledMove>;

impl LabeledMove {
    pub fn new(player: Player, path: Vec<Segment>) -> Self {
        LabeledMove { player, path }
    }

    pub fn payload(&self) -> Option<&Segment> {
        self.path.last()
    }

    /// Wire form: label, a space, segments joined by `.`.
    pub fn to_wire(&self) -> String {
        let segs: Vec<String> = self.path.iter().map(|s| s.to_string()).collect();
        format!("{} {}", self.player.label(), segs.join("."))
    }

    /// Parse the wire form. Segments are typed by the node of `f` they land on.
    pub fn parse_wire(f: &Formula, text: &str) -> Result<LabeledMove, WireError> {
        let (label, rest) = text.split_once(' ').ok_or(WireError::MissingLabel)?;
        let player = match label {
            "T" => Player::Machine,
            "B" => Player::Env,
            other => return Err(WireError::BadLabel(other.to_string())),
        };
        let raw: Vec<&str> = rest.split('.').collect();
        let mut path = Vec::with_capacity(raw.len());
        let mut node = f;
        let mut i = 0;
        while i < raw.len() {
            let tok = raw[i];
            let last = i + 1 == raw.len();
            match node {
                Formula::Neg(c) => {
                    node = c;
                    continue;
                }
                Formula::And(cs) | Formula::Or(cs) => {
                    let k = parse_index(tok, i)?;
                    node = cs.get(k as usize - 1).ok_or(WireError::BadSegment { at: i, text: tok.into() })?;
                    path.push(Segment::Index(k));
                }
                Formula::PRec(c) | Formula::PCorec(c) => {
                    path.push(Segment::Index(parse_index(tok, i)?));
                    node = c;
                }
                Formula::BRec(_, c) | Formula::BCorec(_, c) => {
                    if let Some(w) = tok.strip_suffix(':') {
                        let bits = w.parse().map_err(|_| WireError::BadSegment { at: i, text: tok.into() })?;
                        if !last {
                            return Err(WireError::TrailingSegments { at: i + 1 });
                        }
                        path.push(Segment::Replicate(bits));
                    } else {
                        let bits = tok.parse().map_err(|_| WireError::BadSegment { at: i, text: tok.into() })?;
                        path.push(Segment::Thread(bits));
                        node = c;
                    }
                }
                Formula::ChoiceAll(_, c) | Formula::ChoiceExists(_, c) => {
                    path.push(Segment::Const(parse_const(tok, i)?));
                    node = c;
                }
                Formula::Atom(_) => {
                    path.push(Segment::Const(parse_const(tok, i)?));
                    if !last {
                        return Err(WireError::TrailingSegments { at: i + 1 });
                    }
                }
                Formula::Implies(..) => return Err(WireError::Implication),
            }
            i += 1;
        }
        Ok(LabeledMove { player, path })
    }
}

impl fmt::Display for LabeledMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_wire())
    }
}

fn parse_index(tok: &str, at: usize) -> Result<u32, WireError> {
    match tok.parse::<u32>() {
        Ok(k) if k >= 1 && !tok.starts_with('0') => Ok(k),
        _ => Err(WireError::BadSegment { at, text: tok.into() }),
    }
}

fn parse_const(tok: &str, at: usize) -> Result<Constant, WireError> {
    match tok.parse::<u64>() {
        Ok(c) if c >= 1 && !tok.starts_with('0') && !tok.starts_with('+') => Ok(Constant(c)),
        _ => Err(WireError::BadSegment { at, text: tok.into() }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("move has no player label")]
    MissingLabel,
    #[error("unknown player label `{0}`")]
    BadLabel(String),
    #[error("segment {at} (`{text}`) does not fit the formula")]
    BadSegment { at: usize, text: String },
    #[error("segments after a terminal payload, from segment {at}")]
    TrailingSegments { at: usize },
    #[error("moves are addressed on implication-free formulas only")]
    Implication,
}
