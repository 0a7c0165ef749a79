use super::sync::{network_step, Site, SyncPair};
use super::Machine;
use crate::arena::{GameState, LabeledMove, Player, Segment};

fn site(path: &[u32]) -> Site {
    Site::new(path.iter().map(|i| Segment::Index(*i)).collect())
}

/// Highest copy index the environment has touched in the given components.
fn max_touched(s: &GameState, components: &[u32]) -> u32 {
    s.history()
        .iter()
        .filter(|m| m.player == Player::Env)
        .filter_map(|m| match m.path.as_slice() {
            [Segment::Index(c), Segment::Index(i), ..] if components.contains(c) => Some(*i),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

/// The copycat network for short production under `!p`, played on
/// `~P | ?p (P & (~P | ~Q)) | !p Q`:
/// `~P` with `P` of copy 1, `~P` of copy i with `P` of copy i+1, and `~Q` of
/// copy i with copy i of `!p Q`. Pairs are opened up to one past the highest
/// copy the environment has touched.
pub fn sp_parallel_pairs(s: &GameState) -> Vec<SyncPair> {
    let m = max_touched(s, &[2, 3]) + 1;
    let mut pairs = vec![SyncPair::new(site(&[1]), site(&[2, 1, 1]))];
    for i in 1..=m {
        pairs.push(SyncPair::new(site(&[2, i, 2, 1]), site(&[2, i + 1, 1])));
        pairs.push(SyncPair::new(site(&[2, i, 2, 2]), site(&[3, i])));
    }
    pairs
}

/// Next move of the short-production copycat.
pub fn sp_parallel_next(s: &GameState) -> Option<LabeledMove> {
    network_step(&sp_parallel_pairs(s), s)
}

/// The network for long production under `!p`, played on
/// `~P | ?p (P & (~P | ~Q)) | ?p ((R | Q) & ~R) | !p R`.
///
/// Copy i of each `?p` forms a line: `P` of the left copy i is fed by `~P` of
/// left copy i-1 (or the recurrence-free `~P`), `~Q` of left copy i feeds
/// `Q` of right copy i, and `~R` of right copy i feeds copy i of `!p R`.
/// The `R` inside `R | Q` is never synchronized.
pub fn lp_parallel_pairs(s: &GameState) -> Vec<SyncPair> {
    let m = max_touched(s, &[2, 3, 4]) + 1;
    let mut pairs = vec![SyncPair::new(site(&[1]), site(&[2, 1, 1]))];
    for i in 1..=m {
        pairs.push(SyncPair::new(site(&[2, i, 2, 1]), site(&[2, i + 1, 1])));
        pairs.push(SyncPair::new(site(&[2, i, 2, 2]), site(&[3, i, 1, 2])));
        pairs.push(SyncPair::new(site(&[3, i, 2]), site(&[4, i])));
    }
    pairs
}

pub fn lp_parallel_next(s: &GameState) -> Option<LabeledMove> {
    network_step(&lp_parallel_pairs(s), s)
}

#[derive(Clone, Debug, Default)]
pub struct SpParallel;

impl Machine for SpParallel {
    fn name(&self) -> &str {
        "sp-parallel"
    }

    fn next_move(&mut self, s: &GameState) -> Option<LabeledMove> {
        sp_parallel_next(s)
    }
}

#[derive(Clone, Debug, Default)]
pub struct LpParallel;

impl Machine for LpParallel {
    fn name(&self) -> &str {
        "lp-parallel"
    }

    fn next_move(&mut self, s: &GameState) -> Option<LabeledMove> {
        lp_parallel_next(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{instantiate_scheme, Bang, Formula, Scheme};

    fn play(f: &Formula, s: &mut GameState, w: &str) {
        s.apply(&LabeledMove::parse_wire(f, w).unwrap()).unwrap();
    }

    #[test]
    fn short_production_arcs() {
        let f = instantiate_scheme(Scheme::ShortProd, Bang::Parallel, &Default::default()).unwrap();
        let mut s = GameState::new(&f).unwrap();
        assert_eq!(sp_parallel_next(&s), None);
        play(&f, &mut s, "B 3.1.4");
        assert_eq!(sp_parallel_next(&s).unwrap().to_wire(), "T 2.1.2.2.4");
        let mut s = GameState::new(&f).unwrap();
        play(&f, &mut s, "B 1.9");
        assert_eq!(sp_parallel_next(&s).unwrap().to_wire(), "T 2.1.1.9");
    }

    #[test]
    fn long_production_arcs() {
        let f = instantiate_scheme(Scheme::LongProd, Bang::Parallel, &Default::default()).unwrap();
        let mut s = GameState::new(&f).unwrap();
        assert_eq!(lp_parallel_next(&s), None);
        play(&f, &mut s, "B 4.2.7");
        assert_eq!(lp_parallel_next(&s).unwrap().to_wire(), "T 3.2.2.7");
        play(&f, &mut s, "B 1.3");
        play(&f, &mut s, "T 3.2.2.7");
        assert_eq!(lp_parallel_next(&s).unwrap().to_wire(), "T 2.1.1.3");
    }
}
