use std::collections::BTreeSet;

use serde::Serialize;

use super::{Environment, FreshAllocator, Phase};
use crate::arena::{Bits, GameState, LabeledMove, NodeState, Player, Segment};
use crate::formula::{Constant, Formula};

/// What C did and why, in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CEvent {
    /// Chose 1 for x in the recurrence-free component.
    Opening { step: usize },
    /// The machine chose `a` in thread `thread`; C chose `b1`, `b2` for the
    /// two x's of the disjunction there.
    Split { step: usize, thread: Bits, a: Constant, b1: Constant, b2: Constant },
    /// The machine chose `m` in the !-component; C split it and chose `n1`,
    /// `n2` in the two halves.
    Bang { step: usize, m: Constant, n1: Constant, n2: Constant },
    /// The machine chose `c` under `~p(b, y)` with `p(b, c)` active; C chose
    /// `d` for y in `p(a, y)`.
    Answer { step: usize, thread: Bits, a: Constant, d: Constant, b: Constant, c: Constant },
    Note { step: usize, text: String },
}

/// The counterstrategy against short production under branching
/// recurrence, played on
/// `A x. E y. ~p(x, y) | ?(E x. A y. p(x, y) & (A x. E y. ~p(x, y) | A x. E y. ~p(x, y))) | !E x. A y. p(x, y)`.
///
/// C answers machine moves in the batch of the next step, at the node where
/// the machine moved.
#[derive(Clone, Debug, Default, Serialize)]
pub struct C {
    fresh: FreshAllocator,
    seen: usize,
    started: bool,
    bang: Option<(Constant, Constant, Constant)>,
    positive: BTreeSet<(Constant, Constant)>,
    events: Vec<CEvent>,
}

fn env(path: Vec<Segment>) -> LabeledMove {
    LabeledMove::new(Player::Env, path)
}

fn in_thread(w: &Bits, tail: &[Segment]) -> Vec<Segment> {
    let mut p = vec![Segment::Index(2), Segment::Thread(w.clone())];
    p.extend_from_slice(tail);
    p
}

impl C {
    pub fn new() -> Self {
        C::default()
    }

    pub fn events(&self) -> &[CEvent] {
        &self.events
    }

    /// The constants m, n1, n2 of the !-component answer, once it happened.
    pub fn bang_constants(&self) -> Option<(Constant, Constant, Constant)> {
        self.bang
    }

    /// Positive literals `p(a, b)` C has brought about so far.
    pub fn active_positive(&self) -> &BTreeSet<(Constant, Constant)> {
        &self.positive
    }

    fn push(&mut self, sim: &mut GameState, out: &mut Vec<LabeledMove>, step: usize, m: LabeledMove) -> bool {
        match sim.apply(&m) {
            Ok(()) => {
                out.push(m);
                true
            }
            Err(e) => {
                self.events.push(CEvent::Note { step, text: format!("{} rejected: {}", m.to_wire(), e.rule) });
                false
            }
        }
    }

    fn respond(&mut self, m: &LabeledMove, sim: &mut GameState, out: &mut Vec<LabeledMove>, step: usize) {
        match m.path.as_slice() {
            [Segment::Index(3), Segment::Thread(w), Segment::Const(mm)] if w.is_empty() && self.bang.is_none() => {
                let (n1, n2) = (self.fresh.alloc(), self.fresh.alloc());
                self.push(sim, out, step, env(vec![Segment::Index(3), Segment::Replicate(Bits::empty())]));
                for (bit, n) in [(0, n1), (1, n2)] {
                    let path = vec![Segment::Index(3), Segment::Thread(w.child(bit)), Segment::Const(*mm), Segment::Const(n)];
                    self.push(sim, out, step, env(path));
                }
                self.positive.insert((*mm, n1));
                self.positive.insert((*mm, n2));
                self.bang = Some((*mm, n1, n2));
                self.events.push(CEvent::Bang { step, m: *mm, n1, n2 });
            }
            [Segment::Index(2), Segment::Thread(w), Segment::Index(1), Segment::Const(a)] => {
                let (b1, b2) = (self.fresh.alloc(), self.fresh.alloc());
                for (k, b) in [(1, b1), (2, b2)] {
                    let path = in_thread(w, &[Segment::Index(2), Segment::Index(k), Segment::Const(b)]);
                    self.push(sim, out, step, env(path));
                }
                self.events.push(CEvent::Split { step, thread: w.clone(), a: *a, b1, b2 });
            }
            [Segment::Index(2), Segment::Thread(w), Segment::Index(2), Segment::Index(_), Segment::Const(b), Segment::Const(c)]
                if self.positive.contains(&(*b, *c)) =>
            {
                self.answer(w, *b, *c, sim, out, step);
            }
            _ => {}
        }
    }

    fn answer(&mut self, w: &Bits, b: Constant, c: Constant, sim: &mut GameState, out: &mut Vec<LabeledMove>, step: usize) {
        let Some((_, leaves)) = sim.tree_view(&[Segment::Index(2)]) else { return };
        let under: Vec<Bits> = leaves.into_iter().filter(|v| w.is_prefix_of(v)).collect();
        // leaves below w where p(a, y) still waits for y
        let open: Vec<(Bits, Constant)> = under
            .iter()
            .filter_map(|v| match sim.node_at(&in_thread(v, &[Segment::Index(1)])) {
                Some((Formula::ChoiceExists(..), NodeState::Choice(Some(r)))) => match r.state.as_ref() {
                    NodeState::Choice(None) => Some((v.clone(), r.constant)),
                    _ => None,
                },
                _ => None,
            })
            .collect();
        if open.is_empty() {
            self.events.push(CEvent::Note { step, text: format!("trigger p({b}, {c}) recurred in thread {w}") });
            return;
        }
        let same_a = open.iter().all(|(_, a)| *a == open[0].1);
        let targets: Vec<(Bits, Constant)> = if open.len() == under.len() && same_a {
            vec![(w.clone(), open[0].1)]
        } else {
            self.events.push(CEvent::Note { step, text: format!("answer to p({b}, {c}) split over the leaves below {w}") });
            open
        };
        for (v, a) in targets {
            let d = self.fresh.alloc();
            let path = in_thread(&v, &[Segment::Index(1), Segment::Const(a), Segment::Const(d)]);
            if self.push(sim, out, step, env(path)) {
                self.positive.insert((a, d));
                self.events.push(CEvent::Answer { step, thread: v, a, d, b, c });
            }
        }
    }
}

impl Environment for C {
    fn name(&self) -> &str {
        "c"
    }

    fn batch(&mut self, phase: Phase, s: &GameState) -> Vec<LabeledMove> {
        let step = phase.step();
        self.fresh.observe(s.history());
        let mut sim = s.clone();
        let mut out = Vec::new();
        if !self.started {
            self.started = true;
            self.push(&mut sim, &mut out, step, env(vec![Segment::Index(1), Segment::Const(Constant(1))]));
            self.events.push(CEvent::Opening { step });
        }
        let new: Vec<LabeledMove> = s.history()[self.seen..].to_vec();
        self.seen = s.history().len();
        for m in new.iter().filter(|m| m.player == Player::Machine) {
            self.respond(m, &mut sim, &mut out, step);
        }
        out
    }

    fn notes(&self) -> Vec<String> {
        self.events
            .iter()
            .filter_map(|e| match e {
                CEvent::Note { step, text } => Some(format!("step {step}: {text}")),
                _ => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{instantiate_scheme, Bang, Scheme};

    fn wires(ms: &[LabeledMove]) -> Vec<String> {
        ms.iter().map(|m| m.to_wire()).collect()
    }

    fn setup() -> (Formula, GameState, C) {
        let f = instantiate_scheme(Scheme::S4, Bang::Uncountable, &Default::default()).unwrap();
        let s = GameState::new(&f).unwrap();
        (f, s, C::new())
    }

    fn play(s: &mut GameState, w: &str) {
        let m = LabeledMove::parse_wire(s.formula(), w).unwrap();
        s.apply(&m).unwrap();
    }

    fn apply_all(s: &mut GameState, ms: &[LabeledMove]) {
        for m in ms {
            s.apply(m).unwrap();
        }
    }

    #[test]
    fn opening_move() {
        let (_, s, mut c) = setup();
        assert_eq!(wires(&c.batch(Phase::Round(1), &s)), vec!["B 1.1"]);
        assert!(c.batch(Phase::Round(2), &s).is_empty());
    }

    #[test]
    fn two_fresh_constants_per_choice() {
        let (_, mut s, mut c) = setup();
        let b = c.batch(Phase::Round(1), &s);
        apply_all(&mut s, &b);
        play(&mut s, "T 2..1.7");
        let b = c.batch(Phase::Round(2), &s);
        assert_eq!(wires(&b), vec!["B 2..2.1.8", "B 2..2.2.9"]);
    }

    #[test]
    fn bang_answer_and_inactive_trigger() {
        let (_, mut s, mut c) = setup();
        let b = c.batch(Phase::Round(1), &s);
        apply_all(&mut s, &b);
        play(&mut s, "T 2..1.3");
        let b = c.batch(Phase::Round(2), &s);
        apply_all(&mut s, &b);
        // p(4, 20) is not active: nothing to answer
        play(&mut s, "T 2..2.1.4.20");
        assert!(c.batch(Phase::Round(3), &s).is_empty());
        play(&mut s, "T 3..5");
        let b = c.batch(Phase::Round(4), &s);
        assert_eq!(wires(&b), vec!["B 3.:", "B 3.0.5.21", "B 3.1.5.22"]);
        assert_eq!(c.bang_constants(), Some((Constant(5), Constant(21), Constant(22))));
        apply_all(&mut s, &b);
        // p(5, 22) is active now
        play(&mut s, "T 2..2.2.5.22");
        let b = c.batch(Phase::Round(5), &s);
        assert_eq!(wires(&b), vec!["B 2..1.3.23"]);
    }
}
