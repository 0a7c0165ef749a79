//! A reference enumeration of legal moves, computed from the formula and the
//! run alone by projecting the run onto each subgame. It shares no code with
//! the incremental checker in [`GameState`].

use std::collections::{BTreeSet, HashSet};

use super::{BitTree, Bits, GameState, LabeledMove, Player, Segment};
use crate::formula::{Constant, Formula, LetterKind};

/// Finite bounds on the otherwise infinite move sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Copies `1..=copy_cap` of `!p`/`?p` are enumerated.
    pub copy_cap: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { copy_cap: 3 }
    }
}

type Sub = Vec<(Player, Vec<Segment>)>;
type LeafMoves = Vec<(Bits, HashSet<(Player, Vec<Segment>)>)>;

/// Every move with constants from `universe` (and copy indices within
/// `bounds`) that is legal in the current position of `s`.
pub fn legal_moves_oracle(s: &GameState, universe: &[Constant], bounds: Bounds) -> BTreeSet<LabeledMove> {
    let run: Sub = s.history().iter().map(|m| (m.player, m.path.clone())).collect();
    legal(s.formula(), &run, universe, bounds)
        .into_iter()
        .map(|(player, path)| LabeledMove { player, path })
        .collect()
}

fn strip(run: &Sub, head: &Segment) -> Sub {
    run.iter()
        .filter(|(_, p)| p.first() == Some(head))
        .map(|(pl, p)| (*pl, p[1..].to_vec()))
        .collect()
}

fn prefixed(head: Segment, moves: Vec<(Player, Vec<Segment>)>) -> impl Iterator<Item = (Player, Vec<Segment>)> {
    moves.into_iter().map(move |(p, mut path)| {
        path.insert(0, head.clone());
        (p, path)
    })
}

fn legal(f: &Formula, run: &Sub, universe: &[Constant], bounds: Bounds) -> Vec<(Player, Vec<Segment>)> {
    match f {
        Formula::Atom(a) => match a.kind() {
            LetterKind::Elementary { .. } => Vec::new(),
            LetterKind::Enumeration => universe
                .iter()
                .flat_map(|c| [Player::Machine, Player::Env].map(|p| (p, vec![Segment::Const(*c)])))
                .collect(),
        },
        Formula::Neg(c) => {
            let flipped: Sub = run.iter().map(|(p, path)| (p.opponent(), path.clone())).collect();
            legal(c, &flipped, universe, bounds).into_iter().map(|(p, path)| (p.opponent(), path)).collect()
        }
        Formula::And(cs) | Formula::Or(cs) => {
            let mut out = Vec::new();
            for (i, c) in cs.iter().enumerate() {
                let head = Segment::Index(i as u32 + 1);
                out.extend(prefixed(head.clone(), legal(c, &strip(run, &head), universe, bounds)));
            }
            out
        }
        Formula::ChoiceAll(v, body) | Formula::ChoiceExists(v, body) => {
            let owner = if matches!(f, Formula::ChoiceAll(..)) { Player::Env } else { Player::Machine };
            match run.first() {
                None => universe.iter().map(|c| (owner, vec![Segment::Const(*c)])).collect(),
                Some((_, path)) => {
                    let Some(Segment::Const(c)) = path.first() else { return Vec::new() };
                    let head = Segment::Const(*c);
                    let rest: Sub = strip(&run[1..].to_vec(), &head);
                    prefixed(head, legal(&body.substitute(v, *c), &rest, universe, bounds)).collect()
                }
            }
        }
        Formula::PRec(c) | Formula::PCorec(c) => {
            let mut out = Vec::new();
            for i in 1..=bounds.copy_cap {
                let head = Segment::Index(i);
                out.extend(prefixed(head.clone(), legal(c, &strip(run, &head), universe, bounds)));
            }
            out
        }
        Formula::BRec(_, c) | Formula::BCorec(_, c) => {
            let owner = if matches!(f, Formula::BRec(..)) { Player::Env } else { Player::Machine };
            let mut tree = BitTree::new();
            for (_, path) in run {
                if let Some(Segment::Replicate(w)) = path.first() {
                    tree.split(w);
                }
            }
            let mut out: Vec<(Player, Vec<Segment>)> =
                tree.leaves().map(|w| (owner, vec![Segment::Replicate(w.clone())])).collect();
            // a move in thread w must be legal in every leaf thread below w
            let per_leaf: LeafMoves = tree
                .leaves()
                .map(|v| {
                    let theta: Sub = run
                        .iter()
                        .filter_map(|(p, path)| match path.split_first() {
                            Some((Segment::Thread(u), alpha)) if u.is_prefix_of(v) => Some((*p, alpha.to_vec())),
                            _ => None,
                        })
                        .collect();
                    (v.clone(), legal(c, &theta, universe, bounds).into_iter().collect())
                })
                .collect();
            for w in tree.actual() {
                let mut under = per_leaf.iter().filter(|(v, _)| w.is_prefix_of(v));
                let (_, first) = under.next().expect("a leaf below every actual node");
                let mut common: Vec<(Player, Vec<Segment>)> = first.iter().cloned().collect();
                for (_, set) in under {
                    common.retain(|m| set.contains(m));
                }
                common.sort();
                out.extend(prefixed(Segment::Thread(w.clone()), common));
            }
            out
        }
        Formula::Implies(..) => Vec::new(),
    }
}

/// Every syntactically well-typed address of `f` with constants from
/// `universe`, copy indices up to `copy_cap + 1`, operand indices one past
/// the end and thread names of at most `max_bits` bits, for both players.
/// Most of these are illegal in a given position; the set is the universe
/// over which checker and oracle are compared.
pub fn candidate_moves(f: &Formula, universe: &[Constant], copy_cap: u32, max_bits: usize) -> Vec<LabeledMove> {
    let paths = candidate_paths(f, universe, copy_cap, max_bits);
    paths
        .into_iter()
        .flat_map(|p| [Player::Machine, Player::Env].map(|player| LabeledMove { player, path: p.clone() }))
        .collect()
}

fn candidate_paths(f: &Formula, universe: &[Constant], copy_cap: u32, max_bits: usize) -> Vec<Vec<Segment>> {
    let sub = |c: &Formula, head: Segment| -> Vec<Vec<Segment>> {
        candidate_paths(c, universe, copy_cap, max_bits)
            .into_iter()
            .map(|mut p| {
                p.insert(0, head.clone());
                p
            })
            .collect()
    };
    match f {
        Formula::Atom(_) => universe.iter().map(|c| vec![Segment::Const(*c)]).collect(),
        Formula::Neg(c) => candidate_paths(c, universe, copy_cap, max_bits),
        Formula::And(cs) | Formula::Or(cs) => {
            let mut out = vec![vec![Segment::Index(cs.len() as u32 + 1)]];
            for (i, c) in cs.iter().enumerate() {
                out.extend(sub(c, Segment::Index(i as u32 + 1)));
            }
            out
        }
        Formula::ChoiceAll(_, c) | Formula::ChoiceExists(_, c) => {
            let mut out = Vec::new();
            for k in universe {
                out.push(vec![Segment::Const(*k)]);
                out.extend(sub(c, Segment::Const(*k)));
            }
            out
        }
        Formula::PRec(c) | Formula::PCorec(c) => (1..=copy_cap + 1).flat_map(|i| sub(c, Segment::Index(i))).collect(),
        Formula::BRec(_, c) | Formula::BCorec(_, c) => {
            let mut out = Vec::new();
            for len in 0..=max_bits {
                for w in Bits::all_of_len(len) {
                    out.push(vec![Segment::Replicate(w.clone())]);
                    out.extend(sub(c, Segment::Thread(w)));
                }
            }
            out
        }
        Formula::Implies(..) => Vec::new(),
    }
}
