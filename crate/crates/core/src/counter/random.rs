use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Environment, Phase};
use crate::arena::{legal_moves_oracle, BitTree, Bits, Bounds, GameState, LabeledMove, Player, Segment};
use crate::formula::{Constant, Formula};

/// A seeded environment sampling its moves from the legality oracle,
/// weighted towards replications and choices. Silent during the drain.
#[derive(Clone, Debug)]
pub struct RandomEnv {
    rng: ChaCha8Rng,
    budget: usize,
    batch_cap: usize,
    replicate: bool,
    bounds: Bounds,
    universe: u64,
}

impl RandomEnv {
    pub fn new(seed: u64, budget: usize) -> Self {
        RandomEnv { rng: ChaCha8Rng::seed_from_u64(seed), budget, batch_cap: 3, replicate: true, bounds: Bounds::default(), universe: 3 }
    }

    /// Never makes replicative moves.
    pub fn without_replication(mut self) -> Self {
        self.replicate = false;
        self
    }

    pub fn with_batch_cap(mut self, cap: usize) -> Self {
        self.batch_cap = cap;
        self
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = bounds;
        self
    }

    /// Constants `1..=cap` are always available, plus one above the largest
    /// seen once that reaches `cap`.
    pub fn with_universe(mut self, cap: u64) -> Self {
        self.universe = cap.max(1);
        self
    }

    fn weight(s: &GameState, m: &LabeledMove) -> u32 {
        match m.path.last() {
            Some(Segment::Replicate(_)) => 4,
            Some(Segment::Const(_)) => match s.node_at(&m.path[..m.path.len() - 1]) {
                Some((Formula::ChoiceAll(..) | Formula::ChoiceExists(..), _)) => 4,
                _ => 1,
            },
            _ => 1,
        }
    }

    /// One move, or none when no move is legal.
    pub fn sample(&mut self, s: &GameState) -> Option<LabeledMove> {
        let top = s
            .history()
            .iter()
            .flat_map(|m| m.path.iter())
            .filter_map(|seg| match seg {
                Segment::Const(c) => Some(c.0),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let mut universe: Vec<Constant> = (1..=self.universe).map(Constant).collect();
        if top >= self.universe {
            universe.push(Constant(top + 1));
        }
        let moves: Vec<(LabeledMove, u32)> = legal_moves_oracle(s, &universe, self.bounds)
            .into_iter()
            .filter(|m| m.player == Player::Env)
            .filter(|m| self.replicate || !matches!(m.path.last(), Some(Segment::Replicate(_))))
            .map(|m| {
                let w = RandomEnv::weight(s, &m);
                (m, w)
            })
            .collect();
        moves.choose_weighted(&mut self.rng, |(_, w)| *w).ok().map(|(m, _)| m.clone())
    }
}

impl Environment for RandomEnv {
    fn name(&self) -> &str {
        "random"
    }

    fn batch(&mut self, phase: Phase, s: &GameState) -> Vec<LabeledMove> {
        if !matches!(phase, Phase::Round(_)) {
            return Vec::new();
        }
        let mut sim = s.clone();
        let mut out = Vec::new();
        let n = self.rng.gen_range(0..=self.batch_cap);
        for _ in 0..n {
            if self.budget == 0 {
                break;
            }
            let Some(m) = self.sample(&sim) else { break };
            sim.apply(&m).expect("oracle moves are legal");
            self.budget -= 1;
            out.push(m);
        }
        out
    }
}

/// Random splits of the !-thread tree of a game whose `component` is a
/// branching recurrence: up to `max_splits` (step, leaf) pairs with steps in
/// `1..=rounds`, in step order. Every named thread is a leaf when its turn
/// comes.
pub fn random_schedule(seed: u64, max_splits: usize, rounds: usize) -> Vec<(usize, Bits)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(0..=max_splits);
    let mut steps: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=rounds)).collect();
    steps.sort_unstable();
    let mut tree = BitTree::new();
    steps
        .into_iter()
        .map(|step| {
            let leaves: Vec<Bits> = tree.leaves().cloned().collect();
            let w = leaves.choose(&mut rng).expect("a tree has leaves").clone();
            tree.split(&w);
            (step, w)
        })
        .collect()
}

/// Splits the !-component (operand `component`) on a fixed schedule and
/// otherwise plays like a [`RandomEnv`] that never replicates.
#[derive(Clone, Debug)]
pub struct ScheduleEnv {
    component: u32,
    splits: BTreeMap<usize, Vec<Bits>>,
    noise: RandomEnv,
}

impl ScheduleEnv {
    pub fn new(component: u32, schedule: &[(usize, Bits)], seed: u64, budget: usize) -> Self {
        ScheduleEnv::with_noise(component, schedule, RandomEnv::new(seed, budget))
    }

    /// Like [`ScheduleEnv::new`] with a configured noise source. Its
    /// replications are switched off.
    pub fn with_noise(component: u32, schedule: &[(usize, Bits)], noise: RandomEnv) -> Self {
        let mut splits: BTreeMap<usize, Vec<Bits>> = BTreeMap::new();
        for (step, w) in schedule {
            splits.entry(*step).or_default().push(w.clone());
        }
        ScheduleEnv { component, splits, noise: noise.without_replication() }
    }
}

impl Environment for ScheduleEnv {
    fn name(&self) -> &str {
        "schedule"
    }

    fn batch(&mut self, phase: Phase, s: &GameState) -> Vec<LabeledMove> {
        let Phase::Round(step) = phase else { return Vec::new() };
        let mut out = self.noise.batch(phase, s);
        for w in self.splits.remove(&step).unwrap_or_default() {
            out.push(LabeledMove::new(Player::Env, vec![Segment::Index(self.component), Segment::Replicate(w)]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{instantiate_scheme, Bang, Scheme};

    #[test]
    fn deterministic_and_legal() {
        let f = instantiate_scheme(Scheme::ShortProd, Bang::Parallel, &Default::default()).unwrap();
        let s = GameState::new(&f).unwrap();
        let a = RandomEnv::new(5, 10).batch(Phase::Round(1), &s);
        let b = RandomEnv::new(5, 10).batch(Phase::Round(1), &s);
        assert_eq!(a, b);
        let mut t = s.clone();
        for m in &a {
            assert_eq!(m.player, Player::Env);
            t.apply(m).unwrap();
        }
        assert!(RandomEnv::new(5, 0).batch(Phase::Round(1), &s).is_empty());
        assert!(RandomEnv::new(5, 10).batch(Phase::Drain(2), &s).is_empty());
    }

    #[test]
    fn schedules_name_leaves() {
        for seed in 0..50 {
            let sched = random_schedule(seed, 6, 200);
            assert!(sched.len() <= 6);
            let mut tree = BitTree::new();
            for (_, w) in &sched {
                assert!(tree.split(w));
            }
        }
    }
}
