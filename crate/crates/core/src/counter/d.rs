use super::{Environment, FreshAllocator, Phase};
use crate::arena::{Bits, GameState, LabeledMove, Player, Segment};

/// The counterstrategy against long production under uncountable branching
/// recurrence, played on
/// `~P#1 | ?(P#2 & (~P#3 | ~P#4)) | ?((P#5 | P#6) & ~P#7) | !P#8`
/// with `P` an enumeration letter.
///
/// Every step it splits each !-leaf, then makes a fresh move in every
/// subgame of every leaf. It ignores the machine. It has no drain; its
/// closing batch is one more round of fresh moves without splits, so that
/// ?-threads the machine split last still get told apart.
#[derive(Clone, Debug, Default)]
pub struct D {
    fresh: FreshAllocator,
}

fn leaves(s: &GameState, c: u32) -> Vec<Bits> {
    s.tree_view(&[Segment::Index(c)]).map(|(_, l)| l).unwrap_or_default()
}

impl D {
    pub fn new() -> Self {
        D::default()
    }

    /// Sites of every subgame in the current position, in the order D moves
    /// in them.
    pub fn sites(s: &GameState) -> Vec<Vec<Segment>> {
        let mut out = vec![vec![Segment::Index(1)]];
        let threaded = |c: u32, w: &Bits, tail: &[u32]| {
            let mut p = vec![Segment::Index(c), Segment::Thread(w.clone())];
            p.extend(tail.iter().map(|i| Segment::Index(*i)));
            p
        };
        for w in leaves(s, 2) {
            for tail in [&[1][..], &[2, 1], &[2, 2]] {
                out.push(threaded(2, &w, tail));
            }
        }
        for w in leaves(s, 3) {
            for tail in [&[1, 1][..], &[1, 2], &[2]] {
                out.push(threaded(3, &w, tail));
            }
        }
        for w in leaves(s, 4) {
            out.push(threaded(4, &w, &[]));
        }
        out
    }

    fn fresh_moves(&mut self, sim: &mut GameState, out: &mut Vec<LabeledMove>) {
        for mut path in D::sites(sim) {
            path.push(Segment::Const(self.fresh.alloc()));
            let m = LabeledMove::new(Player::Env, path);
            sim.apply(&m).expect("enumeration moves are always legal");
            out.push(m);
        }
    }
}

impl Environment for D {
    fn name(&self) -> &str {
        "d"
    }

    fn drains(&self) -> bool {
        false
    }

    fn batch(&mut self, phase: Phase, s: &GameState) -> Vec<LabeledMove> {
        self.fresh.observe(s.history());
        let mut sim = s.clone();
        let mut out = Vec::new();
        match phase {
            Phase::Round(_) => {
                for w in leaves(s, 4) {
                    let m = LabeledMove::new(Player::Env, vec![Segment::Index(4), Segment::Replicate(w)]);
                    sim.apply(&m).expect("the !-component is split by the environment");
                    out.push(m);
                }
                self.fresh_moves(&mut sim, &mut out);
            }
            Phase::Closing(_) => self.fresh_moves(&mut sim, &mut out),
            Phase::Drain(_) => {}
        }
        out
    }
}
