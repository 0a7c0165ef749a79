use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use super::sync::{network_step, Site, SyncPair};
use super::Machine;
use crate::arena::{Bits, GameState, LabeledMove, Player, Segment};

/// One line of the layout: a left ?-thread, a chain of right ?-threads and
/// the !-thread they serve.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    pub left: Bits,
    pub right: Vec<Bits>,
    pub bang: Bits,
}

/// The synchronization layout of K at some stage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KStageLayout {
    pub lines: Vec<Line>,
    /// Reserve thread, the same name in both ?-components.
    pub reserve: Bits,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("thread {0} of the !-component is not a leaf")]
    NotALeaf(Bits),
}

fn b(s: &str) -> Bits {
    s.parse().expect("bit string")
}

// addresses in `~P | ?c (P & (~P | ~Q)) | ?c ((R | Q) & ~R) | !c R`
fn left(u: &Bits, tail: &[u32]) -> Site {
    let mut p = vec![Segment::Index(2), Segment::Thread(u.clone())];
    p.extend(tail.iter().map(|i| Segment::Index(*i)));
    Site::new(p)
}

fn right(v: &Bits, tail: &[u32]) -> Site {
    let mut p = vec![Segment::Index(3), Segment::Thread(v.clone())];
    p.extend(tail.iter().map(|i| Segment::Index(*i)));
    Site::new(p)
}

fn bang(w: &Bits) -> Site {
    Site::new(vec![Segment::Index(4), Segment::Thread(w.clone())])
}

/// A named subgame of the layout, for reports and diagrams.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    FreeNotP,
    LeftP(Bits),
    LeftNotP(Bits),
    LeftNotQ(Bits),
    RightR(Bits),
    RightQ(Bits),
    RightNotR(Bits),
    Bang(Bits),
}

impl Part {
    pub fn site(&self) -> Site {
        match self {
            Part::FreeNotP => Site::new(vec![Segment::Index(1)]),
            Part::LeftP(u) => left(u, &[1]),
            Part::LeftNotP(u) => left(u, &[2, 1]),
            Part::LeftNotQ(u) => left(u, &[2, 2]),
            Part::RightR(v) => right(v, &[1, 1]),
            Part::RightQ(v) => right(v, &[1, 2]),
            Part::RightNotR(v) => right(v, &[2]),
            Part::Bang(w) => bang(w),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Part::FreeNotP => "~P".to_string(),
            Part::LeftP(u) => format!("P@{u}"),
            Part::LeftNotP(u) => format!("~P@{u}"),
            Part::LeftNotQ(u) => format!("~Q@{u}"),
            Part::RightR(v) => format!("R@{v}"),
            Part::RightQ(v) => format!("Q@{v}"),
            Part::RightNotR(v) => format!("~R@{v}"),
            Part::Bang(w) => format!("!R@{w}"),
        }
    }
}

impl KStageLayout {
    /// Stage 1, after the two initialization splits.
    pub fn initial() -> Self {
        KStageLayout { lines: vec![Line { left: b("0"), right: vec![b("0")], bang: Bits::empty() }], reserve: b("1") }
    }

    pub fn stage(&self) -> usize {
        self.lines.len()
    }

    /// The layout after the environment splits !-thread `w`, and the
    /// replications K makes for it: the right threads of the affected line,
    /// then the right reserve, then the left reserve.
    pub fn split(&self, w: &Bits) -> Result<(KStageLayout, Vec<LabeledMove>), LayoutError> {
        let i = self.lines.iter().position(|l| &l.bang == w).ok_or_else(|| LayoutError::NotALeaf(w.clone()))?;
        let mut next = self.clone();
        let z = &self.reserve;
        let old = &self.lines[i];
        let mut reps: Vec<LabeledMove> = old
            .right
            .iter()
            .map(|v| LabeledMove::new(Player::Machine, vec![Segment::Index(3), Segment::Replicate(v.clone())]))
            .collect();
        reps.push(LabeledMove::new(Player::Machine, vec![Segment::Index(3), Segment::Replicate(z.clone())]));
        reps.push(LabeledMove::new(Player::Machine, vec![Segment::Index(2), Segment::Replicate(z.clone())]));
        let mut new_right = vec![z.child(0)];
        new_right.extend(old.right.iter().map(|v| v.child(1)));
        next.lines.push(Line { left: z.child(0), right: new_right, bang: w.child(1) });
        next.lines[i] = Line {
            left: old.left.clone(),
            right: old.right.iter().map(|v| v.child(0)).collect(),
            bang: w.child(0),
        };
        next.reserve = z.child(1);
        Ok((next, reps))
    }

    /// The synchronized pairs, left side the negated subgame.
    pub fn pair_parts(&self) -> Vec<(Part, Part)> {
        let mut out = Vec::new();
        for (m, line) in self.lines.iter().enumerate() {
            let feeder = if m == 0 { Part::FreeNotP } else { Part::LeftNotP(self.lines[m - 1].left.clone()) };
            out.push((feeder, Part::LeftP(line.left.clone())));
            out.push((Part::LeftNotQ(line.left.clone()), Part::RightQ(line.right[0].clone())));
            for e in 1..line.right.len() {
                out.push((Part::RightNotR(line.right[e - 1].clone()), Part::RightR(line.right[e].clone())));
            }
            out.push((Part::RightNotR(line.right.last().expect("a right thread").clone()), Part::Bang(line.bang.clone())));
        }
        out
    }

    pub fn pairs(&self) -> Vec<SyncPair> {
        self.pair_parts().into_iter().map(|(a, b)| SyncPair::new(a.site(), b.site())).collect()
    }

    /// The `Q` of every right thread but the first of its line.
    pub fn wasted(&self) -> Vec<Part> {
        self.lines.iter().flat_map(|l| l.right[1..].iter().map(|v| Part::RightQ(v.clone()))).collect()
    }

    /// Subgames that are in no pair: the `R` of each line's first right
    /// thread and the `~P` of the last line.
    pub fn unsynced(&self) -> Vec<Part> {
        let mut out: Vec<Part> = self.lines.iter().map(|l| Part::RightR(l.right[0].clone())).collect();
        if let Some(last) = self.lines.last() {
            out.push(Part::LeftNotP(last.left.clone()));
        }
        out
    }

    /// Text diagram of the layout.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "stage {}", self.stage());
        let _ = writeln!(s, "reserve {}", self.reserve);
        for (m, l) in self.lines.iter().enumerate() {
            let rights: Vec<String> = l.right.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "line {}: left {} | right {} | bang {}", m + 1, l.left, rights.join(" "), l.bang);
        }
        for (a, b) in self.pair_parts() {
            let _ = writeln!(s, "sync {} ~ {}", a.name(), b.name());
        }
        let wasted: Vec<String> = self.wasted().iter().map(Part::name).collect();
        let _ = writeln!(s, "wasted {}", wasted.join(" "));
        let unsynced: Vec<String> = self.unsynced().iter().map(Part::name).collect();
        let _ = writeln!(s, "unsynced {}", unsynced.join(" "));
        s
    }
}

/// The layout after a sequence of !-thread splits, processed in order.
pub fn k_expected_layout(splits: &[Bits]) -> Result<KStageLayout, LayoutError> {
    let mut layout = KStageLayout::initial();
    for w in splits {
        layout = layout.split(w)?.0;
    }
    Ok(layout)
}

/// The staged strategy for long production under `!c`.
#[derive(Clone, Debug)]
pub struct K {
    layout: KStageLayout,
    init: VecDeque<LabeledMove>,
    batch: VecDeque<LabeledMove>,
    queued: VecDeque<Bits>,
    processed: Vec<Bits>,
    seen: usize,
}

impl Default for K {
    fn default() -> Self {
        K::new()
    }
}

impl K {
    pub fn new() -> Self {
        let split = |c: u32| LabeledMove::new(Player::Machine, vec![Segment::Index(c), Segment::Replicate(Bits::empty())]);
        K {
            layout: KStageLayout::initial(),
            init: VecDeque::from([split(2), split(3)]),
            batch: VecDeque::new(),
            queued: VecDeque::new(),
            processed: Vec::new(),
            seen: 0,
        }
    }

    pub fn layout(&self) -> &KStageLayout {
        &self.layout
    }

    /// Splits whose transition has been installed, in order.
    pub fn processed_splits(&self) -> &[Bits] {
        &self.processed
    }

    /// True between an environment split and the end of the replications
    /// answering it.
    pub fn in_transition(&self) -> bool {
        !self.init.is_empty() || !self.batch.is_empty() || !self.queued.is_empty()
    }

    /// True while initialization or the replications answering a split are
    /// still being made.
    pub fn replicating(&self) -> bool {
        !self.init.is_empty() || !self.batch.is_empty()
    }

    fn observe(&mut self, s: &GameState) {
        for m in &s.history()[self.seen..] {
            if let (Player::Env, [Segment::Index(4), Segment::Replicate(w)]) = (m.player, m.path.as_slice()) {
                self.queued.push_back(w.clone());
            }
        }
        self.seen = s.history().len();
    }
}

impl Machine for K {
    fn name(&self) -> &str {
        "k"
    }

    fn next_move(&mut self, s: &GameState) -> Option<LabeledMove> {
        self.observe(s);
        if let Some(m) = self.init.pop_front() {
            return Some(m);
        }
        if self.batch.is_empty() {
            if let Some(w) = self.queued.pop_front() {
                let (next, reps) = self.layout.split(&w).expect("splits of the !-component name line threads");
                self.layout = next;
                self.processed.push(w);
                self.batch = reps.into();
            }
        }
        if let Some(m) = self.batch.pop_front() {
            return Some(m);
        }
        network_step(&self.layout.pairs(), s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_one_pairs() {
        let l = KStageLayout::initial();
        let names: Vec<(String, String)> = l.pair_parts().iter().map(|(a, b)| (a.name(), b.name())).collect();
        assert_eq!(
            names,
            vec![
                ("~P".to_string(), "P@0".to_string()),
                ("~Q@0".to_string(), "Q@0".to_string()),
                ("~R@0".to_string(), "!R@ε".to_string()),
            ]
        );
    }

    #[test]
    fn first_split() {
        let (l, reps) = KStageLayout::initial().split(&Bits::empty()).unwrap();
        let wires: Vec<String> = reps.iter().map(|m| m.to_wire()).collect();
        assert_eq!(wires, vec!["T 3.0:", "T 3.1:", "T 2.1:"]);
        assert_eq!(l.reserve, b("11"));
        assert_eq!(l.lines[0], Line { left: b("0"), right: vec![b("00")], bang: b("0") });
        assert_eq!(l.lines[1], Line { left: b("10"), right: vec![b("10"), b("01")], bang: b("1") });
        assert_eq!(l.wasted(), vec![Part::RightQ(b("01"))]);
    }

    #[test]
    fn non_leaf_split_is_rejected() {
        assert_eq!(k_expected_layout(&[Bits::empty(), Bits::empty()]), Err(LayoutError::NotALeaf(Bits::empty())));
    }
}
