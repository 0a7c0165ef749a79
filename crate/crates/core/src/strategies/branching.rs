use std::collections::VecDeque;

use super::sync::{network_step, Site, SyncPair};
use super::Machine;
use crate::arena::{Bits, GameState, LabeledMove, Player, Segment};

/// The short-production copycat carried over to branching recurrence, on
/// `~P | ?(P & (~P | ~Q)) | !Q`.
///
/// Each !-thread gets its own ?-thread: line m pairs `~Q` of its left thread
/// with its !-thread, and `P` of its left thread is fed by `~P` of the
/// previous line. When the environment splits a !-thread the line keeps the
/// 0-child and a new line takes the 1-child and a fresh ?-thread. The
/// 1-child inherits a history the fresh thread never saw, which is exactly
/// where this strategy loses.
#[derive(Clone, Debug)]
pub struct BranchingCopycat {
    lines: Vec<(Bits, Bits)>,
    reserve: Bits,
    batch: VecDeque<LabeledMove>,
    queued: VecDeque<Bits>,
    seen: usize,
}

impl Default for BranchingCopycat {
    fn default() -> Self {
        BranchingCopycat::new()
    }
}

fn left(u: &Bits, tail: &[u32]) -> Site {
    let mut p = vec![Segment::Index(2), Segment::Thread(u.clone())];
    p.extend(tail.iter().map(|i| Segment::Index(*i)));
    Site::new(p)
}

impl BranchingCopycat {
    pub fn new() -> Self {
        BranchingCopycat {
            lines: vec![("0".parse().expect("bits"), Bits::empty())],
            reserve: "1".parse().expect("bits"),
            batch: VecDeque::from([LabeledMove::new(
                Player::Machine,
                vec![Segment::Index(2), Segment::Replicate(Bits::empty())],
            )]),
            queued: VecDeque::new(),
            seen: 0,
        }
    }

    pub fn pairs(&self) -> Vec<SyncPair> {
        let mut out = Vec::new();
        for (m, (u, w)) in self.lines.iter().enumerate() {
            let feeder = if m == 0 { Site::new(vec![Segment::Index(1)]) } else { left(&self.lines[m - 1].0, &[2, 1]) };
            out.push(SyncPair::new(feeder, left(u, &[1])));
            out.push(SyncPair::new(left(u, &[2, 2]), Site::new(vec![Segment::Index(3), Segment::Thread(w.clone())])));
        }
        out
    }
}

impl Machine for BranchingCopycat {
    fn name(&self) -> &str {
        "copycat-prover"
    }

    fn next_move(&mut self, s: &GameState) -> Option<LabeledMove> {
        for m in &s.history()[self.seen..] {
            if let (Player::Env, [Segment::Index(3), Segment::Replicate(w)]) = (m.player, m.path.as_slice()) {
                self.queued.push_back(w.clone());
            }
        }
        self.seen = s.history().len();
        if self.batch.is_empty() {
            if let Some(w) = self.queued.pop_front() {
                if let Some(i) = self.lines.iter().position(|(_, b)| *b == w) {
                    let z = self.reserve.clone();
                    self.lines[i].1 = w.child(0);
                    self.lines.push((z.child(0), w.child(1)));
                    self.reserve = z.child(1);
                    self.batch.push_back(LabeledMove::new(Player::Machine, vec![Segment::Index(2), Segment::Replicate(z)]));
                }
            }
        }
        if let Some(m) = self.batch.pop_front() {
            return Some(m);
        }
        network_step(&self.pairs(), s)
    }
}
