use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{BitTree, Bits, LabeledMove, Player, Run, Segment};
use crate::formula::{Constant, Formula, LetterKind};

/// Runtime state of one formula node. Atom logs record players as seen from
/// inside the atom, i.e. flipped once per enclosing negation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeState {
    Atom { log: Vec<(Player, Constant)> },
    Neg(Box<NodeState>),
    Junction(Vec<NodeState>),
    Choice(Option<Resolution>),
    /// Touched copies of `!p`/`?p`; untouched copies are in the initial state.
    Copies(BTreeMap<u32, NodeState>),
    /// The thread tree and one state per leaf thread.
    Branch { tree: BitTree, threads: BTreeMap<Bits, NodeState> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Resolution {
    pub constant: Constant,
    pub instance: Formula,
    pub state: Box<NodeState>,
}

impl NodeState {
    pub fn fresh(f: &Formula) -> NodeState {
        match f {
            Formula::Atom(_) => NodeState::Atom { log: Vec::new() },
            Formula::Neg(c) => NodeState::Neg(Box::new(NodeState::fresh(c))),
            Formula::And(cs) | Formula::Or(cs) => NodeState::Junction(cs.iter().map(NodeState::fresh).collect()),
            Formula::ChoiceAll(..) | Formula::ChoiceExists(..) => NodeState::Choice(None),
            Formula::PRec(_) | Formula::PCorec(_) => NodeState::Copies(BTreeMap::new()),
            Formula::BRec(_, c) | Formula::BCorec(_, c) => NodeState::Branch {
                tree: BitTree::new(),
                threads: BTreeMap::from([(Bits::empty(), NodeState::fresh(c))]),
            },
            Formula::Implies(..) => panic!("implication has no game state"),
        }
    }
}

/// Which legality rule a move broke.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    ReplicativeByMachine,
    ReplicativeByEnv,
    NotALeaf,
    NotAnActualNode,
    ChoiceByMachine,
    ChoiceByEnv,
    AlreadyResolved,
    BelowUnresolvedChoice,
    ResolutionMismatch,
    WrongSegmentKind,
    IndexOutOfRange,
    ElementaryAtom,
    MissingPayload,
    TrailingSegments,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::ReplicativeByMachine => "replicative move by ⊤",
            Rule::ReplicativeByEnv => "replicative move by ⊥",
            Rule::NotALeaf => "w is not a leaf",
            Rule::NotAnActualNode => "w is not an actual node",
            Rule::ChoiceByMachine => "⊓-choice by ⊤",
            Rule::ChoiceByEnv => "⊔-choice by ⊥",
            Rule::AlreadyResolved => "choice already resolved",
            Rule::BelowUnresolvedChoice => "move below an unresolved choice",
            Rule::ResolutionMismatch => "constant differs from the resolution",
            Rule::WrongSegmentKind => "segment does not fit the node",
            Rule::IndexOutOfRange => "operand index out of range",
            Rule::ElementaryAtom => "elementary atoms have no moves",
            Rule::MissingPayload => "address ends before a payload",
            Rule::TrailingSegments => "segments after the payload",
        })
    }
}

/// An illegal-move verdict: the rule and the index of the offending segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Error)]
#[error("{rule} (segment {at})")]
pub struct IllegalMove {
    pub rule: Rule,
    pub at: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("eliminate implications before play")]
    Implication,
    #[error("letter `{0}` is used with conflicting kinds")]
    ConflictingLetter(String),
}

/// A formula, the state of every node, and the run so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    formula: Formula,
    root: NodeState,
    history: Run,
}

pub fn new_game(f: &Formula) -> Result<GameState, GameError> {
    GameState::new(f)
}

impl GameState {
    pub fn new(f: &Formula) -> Result<GameState, GameError> {
        if f.contains_implication() {
            return Err(GameError::Implication);
        }
        f.letters().map_err(GameError::ConflictingLetter)?;
        Ok(GameState { formula: f.clone(), root: NodeState::fresh(f), history: Vec::new() })
    }

    /// Replay a run from the initial position, stopping at the first illegal move.
    pub fn replay(f: &Formula, run: &[LabeledMove]) -> Result<GameState, (usize, IllegalMove)> {
        let mut s = GameState::new(f).expect("replayable formula");
        for (i, m) in run.iter().enumerate() {
            s.apply(m).map_err(|e| (i, e))?;
        }
        Ok(s)
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn root(&self) -> &NodeState {
        &self.root
    }

    pub fn history(&self) -> &Run {
        &self.history
    }

    pub fn check(&self, m: &LabeledMove) -> Result<(), IllegalMove> {
        check(&self.formula, &self.root, &m.path, 0, m.player)
    }

    /// Apply `m` in place if legal; on an illegal move the state is unchanged.
    pub fn apply(&mut self, m: &LabeledMove) -> Result<(), IllegalMove> {
        self.check(m)?;
        apply(&self.formula, &mut self.root, &m.path, m.player);
        self.history.push(m.clone());
        Ok(())
    }

    pub fn check_and_apply(&self, m: &LabeledMove) -> Result<GameState, IllegalMove> {
        let mut next = self.clone();
        next.apply(m)?;
        Ok(next)
    }

    /// The formula and state at an address. Negations are passed through
    /// while segments remain; a thread segment must name a leaf.
    pub fn node_at(&self, r: &[Segment]) -> Option<(&Formula, &NodeState)> {
        let (mut f, mut st) = (&self.formula, &self.root);
        let mut segs = r;
        loop {
            if segs.is_empty() {
                return Some((f, st));
            }
            match (f, st) {
                (Formula::Neg(c), NodeState::Neg(s)) => {
                    f = c;
                    st = s;
                    continue;
                }
                (Formula::And(cs) | Formula::Or(cs), NodeState::Junction(ss)) => {
                    let Segment::Index(i) = segs[0] else { return None };
                    let i = (i as usize).checked_sub(1)?;
                    f = cs.get(i)?;
                    st = ss.get(i)?;
                }
                (Formula::PRec(c) | Formula::PCorec(c), NodeState::Copies(copies)) => {
                    let Segment::Index(i) = segs[0] else { return None };
                    f = c;
                    st = copies.get(&i)?;
                }
                (Formula::BRec(_, c) | Formula::BCorec(_, c), NodeState::Branch { threads, .. }) => {
                    let Segment::Thread(w) = &segs[0] else { return None };
                    f = c;
                    st = threads.get(w)?;
                }
                (Formula::ChoiceAll(..) | Formula::ChoiceExists(..), NodeState::Choice(Some(r))) => {
                    let Segment::Const(c) = segs[0] else { return None };
                    if c != r.constant {
                        return None;
                    }
                    f = &r.instance;
                    st = &r.state;
                }
                _ => return None,
            }
            segs = &segs[1..];
        }
    }

    /// Actual nodes and leaves of the branching node at `r`.
    pub fn tree_view(&self, r: &[Segment]) -> Option<(BTreeSet<Bits>, Vec<Bits>)> {
        match self.node_at(r)? {
            (_, NodeState::Branch { tree, .. }) => Some((tree.actual().clone(), tree.leaves().cloned().collect())),
            _ => None,
        }
    }

    /// Hash of a canonical walk of the node states.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{:?}", self.root).as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn illegal(rule: Rule, at: usize) -> Result<(), IllegalMove> {
    Err(IllegalMove { rule, at })
}

fn check(f: &Formula, st: &NodeState, segs: &[Segment], at: usize, who: Player) -> Result<(), IllegalMove> {
    if let (Formula::Neg(c), NodeState::Neg(s)) = (f, st) {
        return check(c, s, segs, at, who.opponent());
    }
    let Some((head, rest)) = segs.split_first() else {
        return illegal(Rule::MissingPayload, at);
    };
    match (f, st) {
        (Formula::Atom(a), NodeState::Atom { .. }) => {
            if matches!(a.kind(), LetterKind::Elementary { .. }) {
                return illegal(Rule::ElementaryAtom, at);
            }
            if !matches!(head, Segment::Const(_)) {
                return illegal(Rule::WrongSegmentKind, at);
            }
            if !rest.is_empty() {
                return illegal(Rule::TrailingSegments, at + 1);
            }
            Ok(())
        }
        (Formula::And(cs) | Formula::Or(cs), NodeState::Junction(ss)) => {
            let Segment::Index(i) = head else { return illegal(Rule::WrongSegmentKind, at) };
            let i = *i as usize;
            if i == 0 || i > cs.len() {
                return illegal(Rule::IndexOutOfRange, at);
            }
            check(&cs[i - 1], &ss[i - 1], rest, at + 1, who)
        }
        (Formula::ChoiceAll(..) | Formula::ChoiceExists(..), NodeState::Choice(res)) => {
            let Segment::Const(c) = head else { return illegal(Rule::WrongSegmentKind, at) };
            match res {
                None if !rest.is_empty() => illegal(Rule::BelowUnresolvedChoice, at + 1),
                None => match (f, who) {
                    (Formula::ChoiceAll(..), Player::Machine) => illegal(Rule::ChoiceByMachine, at),
                    (Formula::ChoiceExists(..), Player::Env) => illegal(Rule::ChoiceByEnv, at),
                    _ => Ok(()),
                },
                Some(_) if rest.is_empty() => illegal(Rule::AlreadyResolved, at),
                Some(r) if r.constant != *c => illegal(Rule::ResolutionMismatch, at),
                Some(r) => check(&r.instance, &r.state, rest, at + 1, who),
            }
        }
        (Formula::PRec(c) | Formula::PCorec(c), NodeState::Copies(copies)) => {
            let Segment::Index(i) = head else { return illegal(Rule::WrongSegmentKind, at) };
            if *i == 0 {
                return illegal(Rule::IndexOutOfRange, at);
            }
            match copies.get(i) {
                Some(s) => check(c, s, rest, at + 1, who),
                None => check(c, &NodeState::fresh(c), rest, at + 1, who),
            }
        }
        (Formula::BRec(_, c) | Formula::BCorec(_, c), NodeState::Branch { tree, threads }) => match head {
            Segment::Replicate(w) => {
                let owner = if matches!(f, Formula::BRec(..)) { Player::Env } else { Player::Machine };
                if who != owner {
                    let rule = if who == Player::Machine { Rule::ReplicativeByMachine } else { Rule::ReplicativeByEnv };
                    return illegal(rule, at);
                }
                if !rest.is_empty() {
                    return illegal(Rule::TrailingSegments, at + 1);
                }
                if !tree.is_leaf(w) {
                    return illegal(Rule::NotALeaf, at);
                }
                Ok(())
            }
            Segment::Thread(w) => {
                if !tree.contains(w) {
                    return illegal(Rule::NotAnActualNode, at);
                }
                for leaf in tree.leaves_under(w) {
                    check(c, &threads[leaf], rest, at + 1, who)?;
                }
                Ok(())
            }
            _ => illegal(Rule::WrongSegmentKind, at),
        },
        _ => unreachable!("state does not match formula"),
    }
}

fn apply(f: &Formula, st: &mut NodeState, segs: &[Segment], who: Player) {
    if let (Formula::Neg(c), NodeState::Neg(s)) = (f, &mut *st) {
        return apply(c, s, segs, who.opponent());
    }
    let (head, rest) = segs.split_first().expect("checked");
    match (f, st) {
        (Formula::Atom(_), NodeState::Atom { log }) => {
            let Segment::Const(c) = head else { unreachable!() };
            log.push((who, *c));
        }
        (Formula::And(cs) | Formula::Or(cs), NodeState::Junction(ss)) => {
            let Segment::Index(i) = head else { unreachable!() };
            let i = *i as usize - 1;
            apply(&cs[i], &mut ss[i], rest, who);
        }
        (Formula::ChoiceAll(v, body) | Formula::ChoiceExists(v, body), NodeState::Choice(res)) => {
            let Segment::Const(c) = head else { unreachable!() };
            match res {
                None => {
                    let instance = body.substitute(v, *c);
                    let state = Box::new(NodeState::fresh(&instance));
                    *res = Some(Resolution { constant: *c, instance, state });
                }
                Some(r) => apply(&r.instance, &mut r.state, rest, who),
            }
        }
        (Formula::PRec(c) | Formula::PCorec(c), NodeState::Copies(copies)) => {
            let Segment::Index(i) = head else { unreachable!() };
            let s = copies.entry(*i).or_insert_with(|| NodeState::fresh(c));
            apply(c, s, rest, who);
        }
        (Formula::BRec(_, c) | Formula::BCorec(_, c), NodeState::Branch { tree, threads }) => match head {
            Segment::Replicate(w) => {
                tree.split(w);
                let s = threads.remove(w).expect("leaf state");
                threads.insert(w.child(0), s.clone());
                threads.insert(w.child(1), s);
            }
            Segment::Thread(w) => {
                let leaves: Vec<Bits> = tree.leaves_under(w).cloned().collect();
                for leaf in leaves {
                    apply(c, threads.get_mut(&leaf).expect("leaf state"), rest, who);
                }
            }
            _ => unreachable!(),
        },
        _ => unreachable!("state does not match formula"),
    }
}
