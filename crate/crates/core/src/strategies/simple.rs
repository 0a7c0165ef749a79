use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Machine;
use crate::arena::{legal_moves_oracle, Bounds, GameState, LabeledMove, NodeState, Player, Segment};
use crate::formula::{Constant, Formula, LetterKind};

/// A place where a move can be made without replication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Open {
    /// An unresolved choice and the player who resolves it.
    Choice(Vec<Segment>, Player),
    /// An enumeration atom.
    Enumeration(Vec<Segment>),
}

/// Unresolved choices and enumeration atoms in address order, through leaf
/// threads and touched copies.
pub fn open_sites(s: &GameState) -> Vec<Open> {
    let mut out = Vec::new();
    walk(s.formula(), s.root(), &mut Vec::new(), false, &mut out);
    out
}

fn walk(f: &Formula, st: &NodeState, path: &mut Vec<Segment>, flipped: bool, out: &mut Vec<Open>) {
    let mut down = |seg: Segment, f: &Formula, st: &NodeState, out: &mut Vec<Open>| {
        path.push(seg);
        walk(f, st, path, flipped, out);
        path.pop();
    };
    match (f, st) {
        (Formula::Atom(a), _) => {
            if a.kind() == LetterKind::Enumeration {
                out.push(Open::Enumeration(path.clone()));
            }
        }
        (Formula::Neg(c), NodeState::Neg(s)) => walk(c, s, path, !flipped, out),
        (Formula::And(cs) | Formula::Or(cs), NodeState::Junction(ss)) => {
            for (i, (c, s)) in cs.iter().zip(ss).enumerate() {
                down(Segment::Index(i as u32 + 1), c, s, out);
            }
        }
        (Formula::ChoiceAll(..) | Formula::ChoiceExists(..), NodeState::Choice(res)) => match res {
            None => {
                let owner = if matches!(f, Formula::ChoiceAll(..)) { Player::Env } else { Player::Machine };
                out.push(Open::Choice(path.clone(), owner.flip_if(flipped)));
            }
            Some(r) => down(Segment::Const(r.constant), &r.instance, &r.state, out),
        },
        (Formula::PRec(c) | Formula::PCorec(c), NodeState::Copies(copies)) => {
            for (i, s) in copies {
                down(Segment::Index(*i), c, s, out);
            }
        }
        (Formula::BRec(_, c) | Formula::BCorec(_, c), NodeState::Branch { threads, .. }) => {
            for (w, s) in threads {
                down(Segment::Thread(w.clone()), c, s, out);
            }
        }
        _ => unreachable!("state does not match formula"),
    }
}

fn last_env_constant(s: &GameState) -> Constant {
    s.history()
        .iter()
        .rev()
        .filter(|m| m.player == Player::Env)
        .find_map(|m| match m.path.last() {
            Some(Segment::Const(c)) => Some(*c),
            _ => None,
        })
        .unwrap_or(Constant(1))
}

/// Resolves the first open ⊔, otherwise moves in the first enumeration
/// atom, always with the environment's latest constant (or 1). Never makes
/// the same move twice.
#[derive(Clone, Debug, Default)]
pub struct Naive {
    made: BTreeSet<LabeledMove>,
}

impl Machine for Naive {
    fn name(&self) -> &str {
        "naive"
    }

    fn next_move(&mut self, s: &GameState) -> Option<LabeledMove> {
        let c = last_env_constant(s);
        let open = open_sites(s);
        let choices = open.iter().filter_map(|o| match o {
            Open::Choice(p, Player::Machine) => Some(p),
            _ => None,
        });
        let atoms = open.iter().filter_map(|o| match o {
            Open::Enumeration(p) => Some(p),
            _ => None,
        });
        for p in choices.chain(atoms) {
            let mut path = p.clone();
            path.push(Segment::Const(c));
            let m = LabeledMove::new(Player::Machine, path);
            if !self.made.contains(&m) && s.check(&m).is_ok() {
                self.made.insert(m.clone());
                return Some(m);
            }
        }
        None
    }
}

/// Plays a uniformly sampled legal move, or passes, until its move budget
/// is spent.
#[derive(Clone, Debug)]
pub struct RandomLegal {
    rng: ChaCha8Rng,
    budget: usize,
    pass: f64,
}

impl RandomLegal {
    pub fn new(seed: u64, budget: usize) -> Self {
        RandomLegal { rng: ChaCha8Rng::seed_from_u64(seed), budget, pass: 0.25 }
    }
}

/// Constants seen so far, plus 1 and one unused constant.
pub fn play_universe(s: &GameState) -> Vec<Constant> {
    let mut seen: BTreeSet<Constant> = BTreeSet::from([Constant(1)]);
    for m in s.history() {
        for seg in &m.path {
            if let Segment::Const(c) = seg {
                seen.insert(*c);
            }
        }
    }
    let fresh = Constant(seen.iter().next_back().map_or(1, |c| c.0) + 1);
    seen.insert(fresh);
    seen.into_iter().collect()
}

impl Machine for RandomLegal {
    fn name(&self) -> &str {
        "random-legal"
    }

    fn next_move(&mut self, s: &GameState) -> Option<LabeledMove> {
        if self.budget == 0 || self.rng.gen_bool(self.pass) {
            return None;
        }
        let universe = play_universe(s);
        let moves: Vec<LabeledMove> = legal_moves_oracle(s, &universe, Bounds { copy_cap: 2 })
            .into_iter()
            .filter(|m| m.player == Player::Machine)
            .collect();
        let m = moves.choose(&mut self.rng)?.clone();
        self.budget -= 1;
        Some(m)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Silent;

impl Machine for Silent {
    fn name(&self) -> &str {
        "silent"
    }

    fn next_move(&mut self, _: &GameState) -> Option<LabeledMove> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{instantiate_scheme, Bang, Scheme};

    #[test]
    fn naive_resolves_in_order() {
        let f = instantiate_scheme(Scheme::S4, Bang::Aleph0, &Default::default()).unwrap();
        let mut s = GameState::new(&f).unwrap();
        let mut n = Naive::default();
        // the first open ⊔ is P in the ?-thread ε
        let m = n.next_move(&s).unwrap();
        assert_eq!(m.to_wire(), "T 2..1.1");
        s.apply(&m).unwrap();
        s.apply(&LabeledMove::parse_wire(&f, "B 1.4").unwrap()).unwrap();
        assert_eq!(n.next_move(&s).unwrap().to_wire(), "T 1.4.4");
    }

    #[test]
    fn random_legal_is_reproducible_and_legal() {
        let f = instantiate_scheme(Scheme::S4, Bang::Uncountable, &Default::default()).unwrap();
        let run = |seed| {
            let mut s = GameState::new(&f).unwrap();
            let mut r = RandomLegal::new(seed, 10);
            for _ in 0..20 {
                if let Some(m) = r.next_move(&s) {
                    s.apply(&m).unwrap();
                }
            }
            s.history().clone()
        };
        assert_eq!(run(3), run(3));
    }
}
