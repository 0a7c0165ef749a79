use std::fmt;

use serde::Serialize;

use crate::analysis::Timed;
use crate::arena::{GameState, LabeledMove, Player};
use crate::counter::{Environment, Phase};
use crate::formula::Formula;
use crate::strategies::Machine;

/// What happened in one computation step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub phase: Phase,
    /// Environment moves in wire format, in order.
    pub env: Vec<String>,
    pub machine: Option<String>,
    /// State digest after the step.
    pub digest: String,
}

/// The first illegal move of a match. The match stops there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlayOffence {
    pub step: usize,
    pub player: Player,
    pub wire: String,
    pub rule: String,
}

impl fmt::Display for PlayOffence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {} is illegal ({})", self.step, self.wire, self.rule)
    }
}

#[derive(Clone, Debug)]
pub struct Played {
    pub steps: Vec<StepRecord>,
    /// Every move, the illegal one included, with its step.
    pub timed: Vec<Timed>,
    /// Final position; an illegal move is not applied.
    pub state: GameState,
    pub offence: Option<PlayOffence>,
    /// Whether the drain ended with both sides silent.
    pub quiescent: bool,
}

struct Scheduler<'a> {
    state: GameState,
    steps: Vec<StepRecord>,
    timed: Vec<Timed>,
    offence: Option<PlayOffence>,
    machine: &'a mut dyn Machine,
    env: &'a mut dyn Environment,
}

impl Scheduler<'_> {
    fn apply(&mut self, step: usize, m: LabeledMove) -> bool {
        let ok = self.state.apply(&m);
        let (player, wire) = (m.player, m.to_wire());
        self.timed.push((step, m));
        if let Err(e) = ok {
            self.offence = Some(PlayOffence { step, player, wire, rule: e.rule.to_string() });
            return false;
        }
        true
    }

    /// One step: the environment's batch, then the machine's slot if it has
    /// one. Returns whether anybody moved.
    fn step(&mut self, phase: Phase, machine_slot: bool) -> bool {
        let step = phase.step();
        let batch = self.env.batch(phase, &self.state);
        let mut rec = StepRecord { phase, env: Vec::new(), machine: None, digest: String::new() };
        let mut moved = false;
        for m in batch {
            if self.offence.is_some() {
                break;
            }
            let m = LabeledMove { player: Player::Env, ..m };
            rec.env.push(m.to_wire());
            moved = true;
            self.apply(step, m);
        }
        if machine_slot && self.offence.is_none() {
            if let Some(m) = self.machine.next_move(&self.state) {
                let m = LabeledMove { player: Player::Machine, ..m };
                rec.machine = Some(m.to_wire());
                moved = true;
                self.apply(step, m);
            }
        }
        rec.digest = self.state.digest();
        if moved || matches!(phase, Phase::Round(_)) {
            self.steps.push(rec);
        }
        moved
    }
}

/// Plays `rounds` rounds, then a drain of at most `drain_cap` steps if the
/// environment drains, then the environment's closing batch.
///
/// `after_round` sees the position and the machine after every round.
/// Moves are relabelled with the side that made them, so a strategy cannot
/// move for its opponent.
pub fn play(
    f: &Formula,
    machine: &mut dyn Machine,
    env: &mut dyn Environment,
    rounds: usize,
    drain_cap: usize,
    after_round: &mut dyn FnMut(&GameState, &dyn Machine),
) -> Played {
    let drains = env.drains();
    let mut s = Scheduler {
        state: GameState::new(f).expect("a well-formed formula"),
        steps: Vec::new(),
        timed: Vec::new(),
        offence: None,
        machine,
        env,
    };
    let mut step = 0;
    for n in 1..=rounds {
        step = n;
        s.step(Phase::Round(n), true);
        if s.offence.is_some() {
            break;
        }
        after_round(&s.state, &*s.machine);
    }
    let mut quiescent = !drains;
    if drains && s.offence.is_none() {
        for _ in 0..drain_cap {
            step += 1;
            if !s.step(Phase::Drain(step), true) {
                quiescent = true;
                break;
            }
            if s.offence.is_some() {
                break;
            }
        }
    }
    if s.offence.is_none() {
        step += 1;
        s.step(Phase::Closing(step), false);
    }
    Played { steps: s.steps, timed: s.timed, state: s.state, offence: s.offence, quiescent }
}

/// Lets the machine alone move until it falls silent, on a copy of `s`.
/// `None` if it is still moving after `cap` moves or moves illegally.
pub fn quiesce(machine: &mut dyn Machine, s: &GameState, cap: usize) -> Option<GameState> {
    let mut s = s.clone();
    for _ in 0..=cap {
        match machine.next_move(&s) {
            None => return Some(s),
            Some(m) => s.apply(&LabeledMove { player: Player::Machine, ..m }).ok()?,
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counter::{Idle, C};
    use crate::formula::{instantiate_scheme, Bang, Scheme};
    use crate::strategies::{Naive, Silent};

    #[test]
    fn silent_sides_one_round() {
        let f = instantiate_scheme(Scheme::ShortProd, Bang::Parallel, &Default::default()).unwrap();
        let p = play(&f, &mut Silent, &mut Idle, 1, 10, &mut |_, _| {});
        assert!(p.timed.is_empty());
        assert_eq!(p.steps.len(), 1);
        assert!(p.quiescent);
        assert_eq!(p.steps[0].phase, Phase::Round(1));
    }

    #[test]
    fn machine_gets_a_slot_every_round() {
        let f = instantiate_scheme(Scheme::S4, Bang::Aleph0, &Default::default()).unwrap();
        let mut slots = 0;
        let p = play(&f, &mut Naive::default(), &mut C::new(), 6, 50, &mut |_, _| slots += 1);
        assert_eq!(slots, 6);
        let rounds = p.steps.iter().filter(|r| matches!(r.phase, Phase::Round(_))).count();
        assert_eq!(rounds, 6);
        assert!(p.offence.is_none());
        // C opens in step 1 and answers the machine's step-2 choice in step 3
        assert_eq!(p.steps[0].env, vec!["B 1.1"]);
        assert_eq!(p.steps[0].machine.as_deref(), Some("T 1.1.1"));
        assert_eq!(p.steps[1].machine.as_deref(), Some("T 2..1.1"));
        assert_eq!(p.steps[2].env, vec!["B 2..2.1.2", "B 2..2.2.3"]);
    }
}
