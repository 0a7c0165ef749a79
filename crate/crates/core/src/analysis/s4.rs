use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{AnalysisError, LemmaCheck, LemmaReport, Timed};
use crate::adjudicator::{decompose_verdict, Interpretation, TruthTable};
use crate::arena::{Bits, GameState, LabeledMove, NodeState, Player, Segment};
use crate::formula::{Constant, Formula};

/// The two arguments of a literal `p(a, b)` or `~p(a, b)`.
pub type Pair = (Constant, Constant);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct S4Literal {
    pub positive: bool,
    pub a: Constant,
    pub b: Constant,
    /// Where it was brought down: `rf`, `?w.1`, `?w.2.k` or `!w`.
    pub sites: Vec<String>,
    /// Step at which it first emerged.
    pub time: usize,
}

impl fmt::Display for S4Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.positive { "" } else { "~" };
        write!(f, "{sign}p({}, {}) at {} step {}", self.a, self.b, self.sites.join(" "), self.time)
    }
}

fn lit(positive: bool, (a, b): Pair) -> String {
    format!("{}p({a}, {b})", if positive { "" } else { "~" })
}

/// Activated literals of a play on the short-production instance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct S4Inventory {
    pub literals: Vec<S4Literal>,
    /// `(p(a, d), ~p(b, c))`: the first is a threadmate of the second.
    pub threadmates: BTreeSet<(Pair, Pair)>,
    /// Activation time of every chosen constant.
    pub times: BTreeMap<Constant, usize>,
    /// `(m, n1, n2)` once the !-component has been split and answered.
    pub bang: Option<(Constant, Constant, Constant)>,
}

impl S4Inventory {
    pub fn positive(&self) -> BTreeSet<Pair> {
        self.literals.iter().filter(|l| l.positive).map(|l| (l.a, l.b)).collect()
    }

    pub fn negative(&self) -> BTreeSet<Pair> {
        self.literals.iter().filter(|l| !l.positive).map(|l| (l.a, l.b)).collect()
    }

    pub fn heads(&self) -> Vec<(u8, Pair)> {
        match self.bang {
            Some((m, n1, n2)) => vec![(1, (m, n1)), (2, (m, n2))],
            None => Vec::new(),
        }
    }
}

fn resolved_pair(s: &GameState, path: &[Segment]) -> Option<Pair> {
    match s.node_at(path)? {
        (Formula::ChoiceAll(..) | Formula::ChoiceExists(..), NodeState::Choice(Some(r1))) => match r1.state.as_ref() {
            NodeState::Choice(Some(r2)) => Some((r1.constant, r2.constant)),
            _ => None,
        },
        _ => None,
    }
}

/// Literals, threadmates and activation times of a timed run on
/// `A x. E y. ~p(x, y) | ?(E x. A y. p(x, y) & (A x. E y. ~p(x, y) | A x. E y. ~p(x, y))) | !E x. A y. p(x, y)`.
pub fn s4_literals(f: &Formula, timed: &[Timed]) -> S4Inventory {
    let mut inv = S4Inventory::default();
    let mut found: BTreeMap<(bool, Pair), (BTreeSet<String>, usize)> = BTreeMap::new();
    let mut s = GameState::new(f).expect("instance formula");
    for (step, m) in timed {
        if s.apply(m).is_err() {
            break;
        }
        if let Some(Segment::Const(c)) = m.path.last() {
            inv.times.entry(*c).or_insert(*step);
        }
        let hit = match m.path.as_slice() {
            [Segment::Index(1), Segment::Const(x), Segment::Const(y)] => Some((false, (*x, *y), "rf".to_string())),
            [Segment::Index(2), Segment::Thread(w), Segment::Index(1), Segment::Const(a), Segment::Const(d)] => {
                Some((true, (*a, *d), format!("?{w}.1")))
            }
            [Segment::Index(2), Segment::Thread(w), Segment::Index(2), Segment::Index(k), Segment::Const(b), Segment::Const(c)] => {
                Some((false, (*b, *c), format!("?{w}.2.{k}")))
            }
            [Segment::Index(3), Segment::Thread(w), Segment::Const(x), Segment::Const(y)] => {
                Some((true, (*x, *y), format!("!{w}")))
            }
            _ => None,
        };
        if let Some((positive, pair, site)) = hit {
            let e = found.entry((positive, pair)).or_insert((BTreeSet::new(), *step));
            e.0.insert(site);
        }
    }
    inv.literals = found
        .into_iter()
        .map(|((positive, (a, b)), (sites, time))| S4Literal { positive, a, b, sites: sites.into_iter().collect(), time })
        .collect();
    let leaves = |c: u32| s.tree_view(&[Segment::Index(c)]).map(|(_, l)| l).unwrap_or_default();
    for v in leaves(2) {
        let t = |tail: &[u32]| {
            let mut p = vec![Segment::Index(2), Segment::Thread(v.clone())];
            p.extend(tail.iter().map(|i| Segment::Index(*i)));
            p
        };
        if let Some(pos) = resolved_pair(&s, &t(&[1])) {
            for k in 1..=2 {
                if let Some(neg) = resolved_pair(&s, &t(&[2, k])) {
                    inv.threadmates.insert((pos, neg));
                }
            }
        }
    }
    let bang_leaves = leaves(3);
    if bang_leaves == vec![Bits::empty().child(0), Bits::empty().child(1)] {
        let at = |w: &Bits| resolved_pair(&s, &[Segment::Index(3), Segment::Thread(w.clone())]);
        if let (Some((m1, n1)), Some((m2, n2))) = (at(&bang_leaves[0]), at(&bang_leaves[1])) {
            if m1 == m2 {
                inv.bang = Some((m1, n1, n2));
            }
        }
    }
    inv
}

/// A headed semichain, given by its positive literals; `closed` when it is
/// also a chain, i.e. the opposite of its last literal is active.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct S4Chain {
    pub head: u8,
    pub positives: Vec<Pair>,
    pub closed: bool,
}

impl S4Chain {
    /// A chain ending in `~p(1, b)`.
    pub fn complete(&self) -> bool {
        self.closed && self.positives.last().is_some_and(|p| p.0 == Constant(1))
    }

    pub fn a_seq(&self) -> Vec<Constant> {
        self.positives.iter().map(|p| p.0).collect()
    }

    pub fn literals(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, p) in self.positives.iter().enumerate() {
            out.push(lit(true, *p));
            if i + 1 < self.positives.len() || self.closed {
                out.push(lit(false, *p));
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct S4Chains {
    pub semichains: Vec<S4Chain>,
    pub chains: Vec<S4Chain>,
    /// Threadmate cycles met during the search.
    pub cycles: Vec<Vec<Pair>>,
}

impl S4Chains {
    pub fn lines(&self) -> Vec<String> {
        let show = |kind: &str, c: &S4Chain| {
            let tag = if c.complete() { " complete" } else { "" };
            format!("n{} {kind}{tag}: {}", c.head, c.literals().join(", "))
        };
        self.semichains.iter().map(|c| show("semichain", c)).chain(self.chains.iter().map(|c| show("chain", c))).collect()
    }

    pub fn has_complete(&self, head: u8) -> bool {
        self.chains.iter().any(|c| c.head == head && c.complete())
    }

    /// Head with no complete chain, preferring n1.
    pub fn open_head(&self) -> Option<u8> {
        [1, 2].into_iter().find(|h| !self.has_complete(*h))
    }
}

/// All headed semichains and chains, by exhaustive search.
pub fn s4_chains(inv: &S4Inventory) -> S4Chains {
    let neg = inv.negative();
    let mut succ: BTreeMap<Pair, Vec<Pair>> = BTreeMap::new();
    for (p, n) in &inv.threadmates {
        if neg.contains(n) {
            succ.entry(*n).or_default().push(*p);
        }
    }
    let mut out = S4Chains::default();
    fn walk(path: &mut Vec<Pair>, head: u8, succ: &BTreeMap<Pair, Vec<Pair>>, neg: &BTreeSet<Pair>, out: &mut S4Chains) {
        let last = *path.last().expect("nonempty");
        out.semichains.push(S4Chain { head, positives: path.clone(), closed: false });
        if !neg.contains(&last) {
            return;
        }
        out.chains.push(S4Chain { head, positives: path.clone(), closed: true });
        for next in succ.get(&last).into_iter().flatten() {
            if path.contains(next) {
                let mut cycle = path.clone();
                cycle.push(*next);
                out.cycles.push(cycle);
                continue;
            }
            path.push(*next);
            walk(path, head, succ, neg, out);
            path.pop();
        }
    }
    for (head, start) in inv.heads() {
        if inv.positive().contains(&start) {
            walk(&mut vec![start], head, &succ, &neg, &mut out);
        }
    }
    out
}

/// The lemma checks for one play against C.
pub fn s4_lemmas(inv: &S4Inventory, chains: &S4Chains) -> LemmaReport {
    let mut r = LemmaReport::default();
    let at = |c: &Constant| inv.times.get(c).copied().unwrap_or(usize::MAX);

    r.checks.push(LemmaCheck::new(
        "acyclic",
        chains.cycles.is_empty(),
        match chains.cycles.first() {
            None => "no threadmate cycles".to_string(),
            Some(c) => format!("cycle {}", c.iter().map(|p| lit(true, *p)).collect::<Vec<_>>().join(" -> ")),
        },
    ));

    // spine: equal lengths give equal a-sequences, with decreasing times
    let mut by_len: BTreeMap<usize, Vec<&S4Chain>> = BTreeMap::new();
    for c in &chains.semichains {
        by_len.entry(c.positives.len()).or_default().push(c);
    }
    let mut bad = None;
    for cs in by_len.values() {
        let a0 = cs[0].a_seq();
        for c in cs {
            let a = c.a_seq();
            if a != a0 {
                bad = Some(format!("a-sequences {a:?} and {a0:?} differ"));
            } else if a.windows(2).any(|w| at(&w[0]) <= at(&w[1])) {
                bad = Some(format!("activation times along {a:?} do not decrease"));
            }
        }
    }
    r.checks.push(LemmaCheck::new(
        "spine",
        bad.is_none(),
        bad.unwrap_or_else(|| format!("{} headed semichains share their spine", chains.semichains.len())),
    ));

    let positive = inv.positive();
    let reachable: BTreeSet<Pair> = chains.semichains.iter().filter_map(|c| c.positives.last().copied()).collect();
    let unreached: Vec<String> = positive.difference(&reachable).map(|p| lit(true, *p)).collect();
    let detail = if inv.bang.is_none() {
        format!("no split of the !-component; {} positive literals", positive.len())
    } else if unreached.is_empty() {
        format!("all {} positive literals reachable", positive.len())
    } else {
        format!("unreachable: {}", unreached.join(", "))
    };
    r.checks.push(LemmaCheck::new("reachable", unreached.is_empty(), detail));

    let constants: BTreeSet<Constant> = reachable.iter().map(|p| p.0).collect();
    let mut by_time: BTreeMap<usize, Vec<Constant>> = BTreeMap::new();
    for c in &constants {
        by_time.entry(at(c)).or_default().push(*c);
    }
    let clash = by_time.iter().find(|(_, cs)| cs.len() > 1);
    r.checks.push(LemmaCheck::new(
        "distinct times",
        clash.is_none(),
        match clash {
            None => format!("{} reachable constants, distinct times", constants.len()),
            Some((t, cs)) => format!("constants {cs:?} share time {t}"),
        },
    ));

    let mut bad = None;
    for c1 in chains.chains.iter().filter(|c| c.head == 1) {
        for c2 in chains.chains.iter().filter(|c| c.head == 2 && c.positives.len() == c1.positives.len()) {
            if c1.a_seq() == c2.a_seq() && c1.positives.iter().zip(&c2.positives).any(|(x, y)| x.1 == y.1) {
                bad = Some(format!("[{}] and [{}] share a b", c1.literals().join(", "), c2.literals().join(", ")));
            }
        }
    }
    r.checks.push(LemmaCheck::new("pointwise distinct", bad.is_none(), bad.unwrap_or_else(|| "n1 and n2 chains differ pointwise".into())));

    let both = chains.has_complete(1) && chains.has_complete(2);
    r.checks.push(LemmaCheck::new(
        "one complete head",
        !both,
        format!("complete chains: n1 {}, n2 {}", chains.has_complete(1), chains.has_complete(2)),
    ));
    r
}

/// All atoms true when the !-component was never split; otherwise the atoms
/// on semichains headed by a head without complete chains are false.
pub fn s4_interpretation(inv: &S4Inventory, chains: &S4Chains) -> Result<Interpretation, AnalysisError> {
    if inv.bang.is_none() {
        return Ok(Interpretation::new().with_elementary("p", TruthTable::Const(true)));
    }
    let Some(head) = chains.open_head() else {
        let pick = |h: u8| {
            chains.chains.iter().find(|c| c.head == h && c.complete()).map(|c| c.literals().join(", ")).unwrap_or_default()
        };
        return Err(AnalysisError::BothComplete(pick(1), pick(2)));
    };
    let entries = chains
        .semichains
        .iter()
        .filter(|c| c.head == head)
        .flat_map(|c| c.positives.iter().map(|(a, b)| (vec![*a, *b], false)))
        .collect();
    Ok(Interpretation::new().with_elementary("p", TruthTable::Table { default: true, entries }))
}

/// The closing case analysis: under the induced interpretation the machine
/// loses every component, and every thread of the ?-component.
pub fn s4_verdict_checks(
    f: &Formula,
    interp: &Interpretation,
    run: &[LabeledMove],
    inv: &S4Inventory,
    chains: &S4Chains,
) -> Vec<LemmaCheck> {
    let report = match decompose_verdict(f, interp, run) {
        Ok(r) => r,
        Err(e) => return vec![LemmaCheck::new("verdict", false, e.to_string())],
    };
    let mut out = vec![LemmaCheck::new("verdict", report.winner == Player::Env, format!("winner {}", report.winner))];
    for name in ["recurrence-free", "?-component", "!-component"] {
        let c = report.component(name);
        let lost = c.is_some_and(|c| c.winner == Player::Env);
        out.push(LemmaCheck::new(&format!("verdict {name}"), lost, c.map(|c| format!("winner {}", c.winner)).unwrap_or_default()));
    }
    if let Some(c) = report.component("?-component") {
        let won: Vec<&str> = c.threads.iter().filter(|(_, w)| *w == Player::Machine).map(|(t, _)| t.as_str()).collect();
        out.push(LemmaCheck::new(
            "verdict ?-threads",
            won.is_empty(),
            if won.is_empty() { format!("all {} threads lost", c.threads.len()) } else { format!("won: {}", won.join(", ")) },
        ));
    }
    if inv.bang.is_some() {
        let head = chains.open_head().unwrap_or(1);
        let thread = format!("thread {}", head - 1);
        let lost = report
            .component("!-component")
            .and_then(|c| c.threads.iter().find(|(t, _)| *t == thread))
            .is_some_and(|(_, w)| *w == Player::Env);
        out.push(LemmaCheck::new("verdict !-thread", lost, format!("{thread} under head n{head}")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{instantiate_scheme, Bang};

    fn timed(f: &Formula, steps: &[(usize, &str)]) -> Vec<Timed> {
        steps.iter().map(|(t, w)| (*t, LabeledMove::parse_wire(f, w).unwrap())).collect()
    }

    #[test]
    fn empty_trace() {
        let f = instantiate_scheme(crate::formula::Scheme::S4, Bang::Aleph0, &Default::default()).unwrap();
        let inv = s4_literals(&f, &[]);
        assert!(inv.literals.is_empty());
        let ch = s4_chains(&inv);
        assert!(s4_lemmas(&inv, &ch).all_passed());
        assert_eq!(s4_interpretation(&inv, &ch).unwrap().elementary["p"], TruthTable::Const(true));
    }

    #[test]
    fn two_heads_after_the_bang_answer() {
        let f = instantiate_scheme(crate::formula::Scheme::S4, Bang::Uncountable, &Default::default()).unwrap();
        let t = timed(&f, &[(1, "B 1.1"), (1, "T 3..5"), (2, "B 3.:"), (2, "B 3.0.5.6"), (2, "B 3.1.5.7")]);
        let inv = s4_literals(&f, &t);
        let pos: Vec<String> = inv.literals.iter().filter(|l| l.positive).map(|l| lit(true, (l.a, l.b))).collect();
        assert_eq!(pos, vec!["p(5, 6)", "p(5, 7)"]);
        assert_eq!(inv.bang, Some((Constant(5), Constant(6), Constant(7))));
        let ch = s4_chains(&inv);
        assert_eq!(ch.semichains.len(), 2);
        assert!(ch.chains.is_empty());
        let i = s4_interpretation(&inv, &ch).unwrap();
        let run: Vec<LabeledMove> = t.iter().map(|(_, m)| m.clone()).collect();
        assert!(s4_verdict_checks(&f, &i, &run, &inv, &ch).iter().all(|c| c.passed));
    }
}
