//! Environment strategies: the counterstrategies C and D, and random
//! adversaries for fuzzing.

mod c;
mod d;
mod random;

pub use c::{CEvent, C};
pub use d::D;
pub use random::{random_schedule, RandomEnv, ScheduleEnv};

use serde::Serialize;

use crate::arena::{GameState, LabeledMove, Segment};
use crate::formula::Constant;

/// When the scheduler asks the environment for moves. The number is the
/// computation step, counted from 1 and continued through the drain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Phase {
    Round(usize),
    Drain(usize),
    /// Once, after the last machine slot.
    Closing(usize),
}

impl Phase {
    pub fn step(self) -> usize {
        match self {
            Phase::Round(n) | Phase::Drain(n) | Phase::Closing(n) => n,
        }
    }
}

/// An environment strategy: a finite batch of moves per step.
pub trait Environment {
    fn name(&self) -> &str;
    fn batch(&mut self, phase: Phase, s: &GameState) -> Vec<LabeledMove>;
    /// Whether the scheduler runs a drain after the last round.
    fn drains(&self) -> bool {
        true
    }
    /// Free-form notes for the trace.
    fn notes(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Hands out constants never chosen before by either player, nor by an
/// earlier allocation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreshAllocator {
    next: u64,
}

impl Default for FreshAllocator {
    fn default() -> Self {
        FreshAllocator::new()
    }
}

impl FreshAllocator {
    /// Starts above 1, which C reserves for the recurrence-free component.
    pub fn new() -> Self {
        FreshAllocator { next: 2 }
    }

    pub fn observe(&mut self, run: &[LabeledMove]) {
        for m in run {
            for seg in &m.path {
                if let Segment::Const(c) = seg {
                    self.next = self.next.max(c.0 + 1);
                }
            }
        }
    }

    pub fn alloc(&mut self) -> Constant {
        let c = Constant(self.next);
        self.next += 1;
        c
    }
}

/// Silent environment.
#[derive(Clone, Copy, Debug, Default)]
pub struct Idle;

impl Environment for Idle {
    fn name(&self) -> &str {
        "idle"
    }

    fn batch(&mut self, _: Phase, _: &GameState) -> Vec<LabeledMove> {
        Vec::new()
    }
}

/// Names accepted by [`env_by_name`].
pub const ENV_NAMES: &[&str] = &["c", "d", "random", "idle"];

/// Builds an environment from its name. `seed` only matters for `random`.
pub fn env_by_name(name: &str, seed: u64) -> Option<Box<dyn Environment>> {
    Some(match name {
        "c" => Box::new(C::new()),
        "d" => Box::new(D::new()),
        "random" => Box::new(RandomEnv::new(seed, 400)),
        "idle" => Box::new(Idle),
        _ => return None,
    })
}
