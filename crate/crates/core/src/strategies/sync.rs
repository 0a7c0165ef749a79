use std::fmt;

use crate::arena::{GameState, LabeledMove, Player, Segment};

/// Address of a subgame. Thread segments name the thread the subgame is
/// played in; moves made in ancestor threads belong to it too.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site(pub Vec<Segment>);

impl Site {
    pub fn new(path: Vec<Segment>) -> Self {
        Site(path)
    }

    pub fn path(&self) -> &[Segment] {
        &self.0
    }

    /// The part of `path` below this site, if the move lands in it.
    pub fn relative<'a>(&self, path: &'a [Segment]) -> Option<&'a [Segment]> {
        if path.len() <= self.0.len() {
            return None;
        }
        for (s, m) in self.0.iter().zip(path) {
            let ok = match (s, m) {
                (Segment::Thread(x), Segment::Thread(u)) => u.is_prefix_of(x),
                _ => s == m,
            };
            if !ok {
                return None;
            }
        }
        Some(&path[self.0.len()..])
    }

    /// Moves of the run landing in this site: run index, player, relative path.
    pub fn project<'a>(&self, run: &'a [LabeledMove]) -> Vec<(usize, Player, &'a [Segment])> {
        run.iter()
            .enumerate()
            .filter_map(|(i, m)| self.relative(&m.path).map(|r| (i, m.player, r)))
            .collect()
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let segs: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        f.write_str(&segs.join("."))
    }
}

/// Two subgames kept as negations of each other: every adversary move in
/// one is repeated by the machine in the other.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SyncPair {
    pub left: Site,
    pub right: Site,
}

impl SyncPair {
    pub fn new(left: Site, right: Site) -> Self {
        SyncPair { left, right }
    }

    /// Adversary moves of one side not yet repeated on the other, oldest
    /// first, as (run index, move to make).
    pub fn pending(&self, run: &[LabeledMove]) -> Vec<(usize, LabeledMove)> {
        let l = self.left.project(run);
        let r = self.right.project(run);
        let mut out = Vec::new();
        for (from, to, to_site) in [(&l, &r, &self.right), (&r, &l, &self.left)] {
            let copied = to.iter().filter(|m| m.1 == Player::Machine).count();
            out.extend(from.iter().filter(|m| m.1 == Player::Env).skip(copied).map(|(i, _, rel)| {
                let mut path = to_site.0.clone();
                path.extend_from_slice(rel);
                (*i, LabeledMove::new(Player::Machine, path))
            }));
        }
        out.sort_by_key(|(i, _)| *i);
        out
    }

    /// Whether both sides carry the same adversary/machine move sequences.
    pub fn in_sync(&self, run: &[LabeledMove]) -> bool {
        let side = |s: &Site, p: Player| -> Vec<Vec<Segment>> {
            s.project(run).into_iter().filter(|m| m.1 == p).map(|m| m.2.to_vec()).collect()
        };
        side(&self.left, Player::Env) == side(&self.right, Player::Machine)
            && side(&self.right, Player::Env) == side(&self.left, Player::Machine)
    }
}

fn heads(pair: &SyncPair, s: &GameState) -> [Option<(usize, LabeledMove)>; 2] {
    // each direction is a queue; a blocked head blocks the rest of it
    let run = s.history();
    let l = pair.left.project(run);
    let r = pair.right.project(run);
    let mut out = [None, None];
    for (k, (from, to, to_site)) in [(&l, &r, &pair.right), (&r, &l, &pair.left)].into_iter().enumerate() {
        let copied = to.iter().filter(|m| m.1 == Player::Machine).count();
        if let Some((i, _, rel)) = from.iter().filter(|m| m.1 == Player::Env).nth(copied) {
            let mut path = to_site.0.clone();
            path.extend_from_slice(rel);
            let m = LabeledMove::new(Player::Machine, path);
            if s.check(&m).is_ok() {
                out[k] = Some((*i, m));
            }
        }
    }
    out
}

/// The oldest unmirrored adversary move of one pair, translated, if legal.
pub fn copycat_step(pair: &SyncPair, s: &GameState) -> Option<LabeledMove> {
    heads(pair, s).into_iter().flatten().min_by_key(|(i, _)| *i).map(|(_, m)| m)
}

/// The oldest unmirrored adversary move over a whole network of pairs.
pub fn network_step(pairs: &[SyncPair], s: &GameState) -> Option<LabeledMove> {
    pairs.iter().flat_map(|p| heads(p, s)).flatten().min_by_key(|(i, _)| *i).map(|(_, m)| m)
}
