use std::collections::BTreeSet;

use serde::Serialize;

use super::quiesce;
use crate::adjudicator::{decompose_verdict, Interpretation, VerdictReport};
use crate::analysis::LemmaCheck;
use crate::arena::{BitTree, Bits, GameState, LabeledMove, Player, Segment};
use crate::formula::Formula;
use crate::strategies::{k_expected_layout, KStageLayout, Machine, K};

/// K's layout right after a stage transition, and what was found when its
/// replications were done.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KSnapshot {
    /// The !-component splits processed so far.
    pub splits: Vec<Bits>,
    /// The layout in diagram form.
    pub layout: String,
    /// Whether the layout equals the one computed from `splits` alone.
    pub expected: bool,
    /// Whether the threads in the game agree with the layout. Unset until
    /// K has made all replications of the transition.
    pub threads: Option<bool>,
    /// Whether every lost line is rescued at the quiescent point reached
    /// from here, under every interpretation of the family.
    pub rescued_lines: Option<bool>,
    /// K won that quiescent position under every interpretation.
    pub wins: Option<bool>,
    pub detail: Vec<String>,
}

/// Wraps K and checks its layout against the game at every stage
/// transition. With `probe`, it also plays K ahead to quiescence from each
/// completed transition and checks line rescue and the verdict there.
#[derive(Clone, Debug)]
pub struct KWatch {
    inner: K,
    f: Formula,
    family: Vec<(String, Interpretation)>,
    cap: usize,
    probe: bool,
    snapshots: Vec<KSnapshot>,
}

fn snapshot(k: &K) -> KSnapshot {
    let splits = k.processed_splits().to_vec();
    KSnapshot {
        expected: k_expected_layout(&splits).as_ref() == Ok(k.layout()),
        layout: k.layout().render(),
        splits,
        threads: None,
        rescued_lines: None,
        wins: None,
        detail: Vec::new(),
    }
}

fn leaves(s: &GameState, component: u32) -> BTreeSet<Bits> {
    s.tree_view(&[Segment::Index(component)]).map(|(_, l)| l.into_iter().collect()).unwrap_or_default()
}

/// The !-component splits the environment has made, in order.
fn env_splits(s: &GameState, component: u32) -> Vec<Bits> {
    s.history()
        .iter()
        .filter_map(|m| match (m.player, m.path.as_slice()) {
            (Player::Env, [Segment::Index(c), Segment::Replicate(w)]) if *c == component => Some(w.clone()),
            _ => None,
        })
        .collect()
}

fn thread_winner(r: &VerdictReport, component: &str, w: &Bits) -> Option<Player> {
    let label = format!("thread {w}");
    r.component(component)?.threads.iter().find(|(l, _)| *l == label).map(|(_, p)| *p)
}

/// Line rescue on a verdict: for every line m whose !-thread is lost, the
/// recurrence-free component or a ?-thread of lines 1..=m is won.
pub fn rescued_lines(layout: &KStageLayout, r: &VerdictReport) -> Result<(), String> {
    let won = |c: &str, w: &Bits| thread_winner(r, c, w) == Some(Player::Machine);
    if r.component("recurrence-free").map(|c| c.winner) == Some(Player::Machine) {
        return Ok(());
    }
    for (m, line) in layout.lines.iter().enumerate() {
        if thread_winner(r, "!-component", &line.bang) != Some(Player::Env) {
            continue;
        }
        let rescued = layout.lines[..=m].iter().any(|l| {
            won("left ?-component", &l.left) || l.right.iter().any(|v| won("right ?-component", v))
        });
        if !rescued {
            return Err(format!("line {}: thread {} lost with nothing above it won", m + 1, line.bang));
        }
    }
    Ok(())
}

fn layout_threads(layout: &KStageLayout) -> (BTreeSet<Bits>, BTreeSet<Bits>, BTreeSet<Bits>) {
    let mut left: BTreeSet<Bits> = layout.lines.iter().map(|l| l.left.clone()).collect();
    let mut right: BTreeSet<Bits> = layout.lines.iter().flat_map(|l| l.right.iter().cloned()).collect();
    left.insert(layout.reserve.clone());
    right.insert(layout.reserve.clone());
    let bang = layout.lines.iter().map(|l| l.bang.clone()).collect();
    (left, right, bang)
}

impl KWatch {
    pub fn new(k: K, f: Formula, family: Vec<(String, Interpretation)>, cap: usize, probe: bool) -> Self {
        let first = snapshot(&k);
        KWatch { inner: k, f, family, cap, probe, snapshots: vec![first] }
    }

    pub fn k(&self) -> &K {
        &self.inner
    }

    pub fn snapshots(&self) -> &[KSnapshot] {
        &self.snapshots
    }

    fn inspect(&mut self, s: &GameState) {
        let layout = self.inner.layout().clone();
        let mut detail = Vec::new();
        let (left, right, bang) = layout_threads(&layout);
        let processed = self.inner.processed_splits();
        let made = env_splits(s, 4);
        let mut tree = BitTree::new();
        for w in processed {
            tree.split(w);
        }
        let tree_leaves: BTreeSet<Bits> = tree.leaves().cloned().collect();
        let mut ok = true;
        for (name, found, want) in
            [("left", leaves(s, 2), &left), ("right", leaves(s, 3), &right), ("!", tree_leaves, &bang)]
        {
            if &found != want {
                ok = false;
                detail.push(format!("{name} threads {found:?}, layout has {want:?}"));
            }
        }
        if !made.starts_with(processed) {
            ok = false;
            detail.push(format!("processed splits {processed:?} are not a prefix of {made:?}"));
        }
        let mut rescue = None;
        let mut wins = None;
        if self.probe {
            let mut fork = self.inner.clone();
            match quiesce(&mut fork, s, self.cap) {
                None => {
                    rescue = Some(false);
                    wins = Some(false);
                    detail.push("no quiescence".into());
                }
                Some(q) => {
                    let (mut c, mut w) = (true, true);
                    for (name, i) in &self.family {
                        let r = decompose_verdict(&self.f, i, q.history()).expect("family covers the letters");
                        if let Err(e) = rescued_lines(fork.layout(), &r) {
                            c = false;
                            detail.push(format!("lines unrescued under {name}: {e}"));
                        }
                        if r.winner != Player::Machine {
                            w = false;
                            detail.push(format!("lost under {name}"));
                        }
                    }
                    rescue = Some(c);
                    wins = Some(w);
                }
            }
        }
        let last = self.snapshots.last_mut().expect("a snapshot");
        last.threads = Some(ok);
        last.rescued_lines = rescue;
        last.wins = wins;
        last.detail = detail;
    }

    /// Summary checks over all transitions, plus whether every split the
    /// environment made by the end was processed in order.
    pub fn checks(&self, end: &GameState) -> Vec<LemmaCheck> {
        let n = self.snapshots.len();
        let all = |f: &dyn Fn(&KSnapshot) -> Option<bool>, name: &str| {
            let bad: Vec<usize> = self.snapshots.iter().enumerate().filter(|(_, s)| f(s) == Some(false)).map(|(i, _)| i + 1).collect();
            let seen = self.snapshots.iter().filter(|s| f(s).is_some()).count();
            let detail = if bad.is_empty() {
                format!("{seen} of {n} stages checked")
            } else {
                let first = &self.snapshots[bad[0] - 1];
                format!("stages {bad:?} fail; first: {}", first.detail.join("; "))
            };
            LemmaCheck::new(name, bad.is_empty(), detail)
        };
        let mut out = vec![
            all(&|s| Some(s.expected), "k layout"),
            all(&|s| s.threads, "k threads"),
        ];
        if self.probe {
            out.push(all(&|s| s.rescued_lines, "k rescued lines"));
            out.push(all(&|s| s.wins, "k stage wins"));
            let made = env_splits(end, 4);
            let done = self.inner.processed_splits();
            out.push(LemmaCheck::new(
                "k splits",
                made == done,
                format!("{} of {} environment splits processed", done.len(), made.len()),
            ));
        }
        out
    }
}

impl Machine for KWatch {
    fn name(&self) -> &str {
        "k"
    }

    fn next_move(&mut self, s: &GameState) -> Option<LabeledMove> {
        if !self.inner.replicating() && self.snapshots.last().is_some_and(|x| x.threads.is_none()) {
            self.inspect(s);
        }
        let m = self.inner.next_move(s);
        if self.inner.processed_splits().len() >= self.snapshots.len() {
            let snap = snapshot(&self.inner);
            self.snapshots.push(snap);
        }
        m
    }
}
