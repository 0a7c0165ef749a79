use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use super::{LemmaCheck, LemmaReport};
use crate::adjudicator::{decompose_verdict, EnumPredicate, Interpretation};
use crate::arena::{Bits, GameState, LabeledMove, Player, Segment};
use crate::formula::{Constant, Formula};
use crate::strategies::Site;

/// A literal `P^i_w` (or `~P^i_w`) with its content: what the machine and
/// the environment have moved in that subgame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct S6Literal {
    pub sup: u8,
    /// Absent only for the recurrence-free `~P^1`.
    pub thread: Option<Bits>,
    pub positive: bool,
    pub top: BTreeSet<Constant>,
    pub bot: BTreeSet<Constant>,
}

impl S6Literal {
    pub fn name(&self) -> String {
        let sign = if self.positive { "" } else { "~" };
        match &self.thread {
            None => format!("{sign}P{}", self.sup),
            Some(w) => format!("{sign}P{}@{w}", self.sup),
        }
    }

    fn component(&self) -> u8 {
        match self.sup {
            1 => 1,
            2..=4 => 2,
            5..=7 => 3,
            _ => 4,
        }
    }

    pub fn matches(&self, other: &S6Literal) -> bool {
        self.top == other.bot && self.bot == other.top
    }

    pub fn threadmate_of(&self, other: &S6Literal) -> bool {
        self != other && matches!(self.component(), 2 | 3) && self.component() == other.component() && self.thread == other.thread
    }
}

fn show(s: &BTreeSet<Constant>) -> String {
    let v: Vec<String> = s.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

impl fmt::Display for S6Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.name(), show(&self.top), show(&self.bot))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct S6Inventory {
    /// `~P^1` first, then by component and thread.
    pub literals: Vec<S6Literal>,
    pub bang_leaves: Vec<Bits>,
}

const SHAPES: [(u8, u32, &[u32], bool); 8] = [
    (1, 1, &[], false),
    (2, 2, &[1], true),
    (3, 2, &[2, 1], false),
    (4, 2, &[2, 2], false),
    (5, 3, &[1, 1], true),
    (6, 3, &[1, 2], true),
    (7, 3, &[2], false),
    (8, 4, &[], true),
];

/// Every literal of the final position of a run on
/// `~P#1 | ?(P#2 & (~P#3 | ~P#4)) | ?((P#5 | P#6) & ~P#7) | !P#8`, one per
/// subgame of each leaf thread, with contents from the run.
pub fn s6_literals(f: &Formula, run: &[LabeledMove]) -> S6Inventory {
    let s = GameState::replay(f, run).unwrap_or_else(|(i, _)| {
        GameState::replay(f, &run[..i]).expect("a legal prefix replays")
    });
    let leaves = |c: u32| s.tree_view(&[Segment::Index(c)]).map(|(_, l)| l).unwrap_or_default();
    let mut inv = S6Inventory { bang_leaves: leaves(4), ..Default::default() };
    for (sup, comp, tail, positive) in SHAPES {
        let threads: Vec<Option<Bits>> = if comp == 1 { vec![None] } else { leaves(comp).into_iter().map(Some).collect() };
        for w in threads {
            let mut path = vec![Segment::Index(comp)];
            if let Some(w) = &w {
                path.push(Segment::Thread(w.clone()));
            }
            path.extend(tail.iter().map(|i| Segment::Index(*i)));
            let (mut top, mut bot) = (BTreeSet::new(), BTreeSet::new());
            for (_, player, rel) in Site::new(path).project(s.history()) {
                if let [Segment::Const(c)] = rel {
                    if player == Player::Machine { top.insert(*c) } else { bot.insert(*c) };
                }
            }
            inv.literals.push(S6Literal { sup, thread: w, positive, top, bot });
        }
    }
    inv.literals.sort_by(|a, b| (a.component(), &a.thread, a.sup).cmp(&(b.component(), &b.thread, b.sup)));
    inv
}

/// Chains found by exhaustive search, indices into the inventory.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct S6Chains {
    /// Chains that never revisit a literal at the same parity.
    pub chains: Vec<Vec<usize>>,
    pub reachable: BTreeSet<usize>,
    /// Places where two successors share a superscript.
    pub ambiguous: Vec<String>,
    pub truncated: bool,
}

const CHAIN_CAP: usize = 200_000;

impl S6Chains {
    pub fn types(&self, inv: &S6Inventory) -> Vec<Vec<u8>> {
        self.chains.iter().map(|c| c.iter().map(|i| inv.literals[*i].sup).collect()).collect()
    }

    pub fn lines(&self, inv: &S6Inventory) -> Vec<String> {
        self.chains
            .iter()
            .map(|c| {
                let ty: Vec<String> = c.iter().map(|i| inv.literals[*i].sup.to_string()).collect();
                let ls: Vec<String> = c.iter().map(|i| inv.literals[*i].name()).collect();
                format!("type {}: {}", ty.join(""), ls.join(", "))
            })
            .collect()
    }

    pub fn reachable_bang(&self, inv: &S6Inventory) -> BTreeSet<Bits> {
        self.reachable.iter().filter(|i| inv.literals[**i].sup == 8).filter_map(|i| inv.literals[*i].thread.clone()).collect()
    }

    /// A !-leaf whose literal no chain reaches.
    pub fn unreachable_bang(&self, inv: &S6Inventory) -> Option<Bits> {
        let r = self.reachable_bang(inv);
        inv.bang_leaves.iter().find(|w| !r.contains(*w)).cloned()
    }
}

fn successors(inv: &S6Inventory, by_content: &HashMap<(&BTreeSet<Constant>, &BTreeSet<Constant>), Vec<usize>>, i: usize, odd: bool) -> Vec<usize> {
    let l = &inv.literals[i];
    if odd {
        by_content.get(&(&l.bot, &l.top)).into_iter().flatten().copied().filter(|j| inv.literals[*j].sup != 1).collect()
    } else {
        (0..inv.literals.len()).filter(|j| inv.literals[*j].threadmate_of(l)).collect()
    }
}

/// Chains from `~P^1`: odd steps go to a matching literal, even steps to a
/// threadmate.
pub fn s6_chains(inv: &S6Inventory) -> S6Chains {
    let mut out = S6Chains::default();
    let Some(root) = inv.literals.iter().position(|l| l.sup == 1) else { return out };
    let mut by_content: HashMap<(&BTreeSet<Constant>, &BTreeSet<Constant>), Vec<usize>> = HashMap::new();
    for (i, l) in inv.literals.iter().enumerate() {
        by_content.entry((&l.top, &l.bot)).or_default().push(i);
    }

    // reachability over (literal, parity) states
    let mut seen: BTreeSet<(usize, bool)> = BTreeSet::from([(root, true)]);
    let mut queue = VecDeque::from([(root, true)]);
    while let Some((i, odd)) = queue.pop_front() {
        out.reachable.insert(i);
        let next = successors(inv, &by_content, i, odd);
        let mut by_sup: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
        for j in &next {
            by_sup.entry(inv.literals[*j].sup).or_default().push(*j);
        }
        for (sup, js) in by_sup {
            if js.len() > 1 {
                let names: Vec<String> = js.iter().map(|j| inv.literals[*j].name()).collect();
                out.ambiguous.push(format!("after {}: superscript {sup} fits {}", inv.literals[i].name(), names.join(", ")));
            }
        }
        for j in next {
            if seen.insert((j, !odd)) {
                queue.push_back((j, !odd));
            }
        }
    }

    fn walk(
        inv: &S6Inventory,
        by_content: &HashMap<(&BTreeSet<Constant>, &BTreeSet<Constant>), Vec<usize>>,
        path: &mut Vec<usize>,
        on_path: &mut BTreeSet<(usize, bool)>,
        out: &mut S6Chains,
    ) {
        if out.chains.len() >= CHAIN_CAP {
            out.truncated = true;
            return;
        }
        out.chains.push(path.clone());
        let i = *path.last().expect("nonempty");
        let odd = path.len() % 2 == 1;
        for j in successors(inv, by_content, i, odd) {
            if on_path.insert((j, !odd)) {
                path.push(j);
                walk(inv, by_content, path, on_path, out);
                path.pop();
                on_path.remove(&(j, !odd));
            }
        }
    }
    walk(inv, &by_content, &mut vec![root], &mut BTreeSet::from([(root, true)]), &mut out);
    out
}

/// Content separation, uniqueness of types, and the counting shadow.
pub fn s6_lemmas(inv: &S6Inventory, chains: &S6Chains) -> LemmaReport {
    let mut r = LemmaReport::default();
    let mut by_content: BTreeMap<(&BTreeSet<Constant>, &BTreeSet<Constant>), Vec<String>> = BTreeMap::new();
    for l in &inv.literals {
        by_content.entry((&l.top, &l.bot)).or_default().push(l.name());
    }
    let dup = by_content.values().find(|v| v.len() > 1);
    r.checks.push(LemmaCheck::new(
        "distinct contents",
        dup.is_none(),
        match dup {
            None => format!("{} literals, distinct contents", inv.literals.len()),
            Some(v) => format!("same content: {}", v.join(", ")),
        },
    ));

    let types = chains.types(inv);
    let distinct: BTreeSet<&Vec<u8>> = types.iter().collect();
    let ok = distinct.len() == types.len() && chains.ambiguous.is_empty();
    r.checks.push(LemmaCheck::new(
        "unique types",
        ok,
        if ok {
            format!("{} chains, {} types", types.len(), distinct.len())
        } else {
            chains.ambiguous.first().cloned().unwrap_or_else(|| "two chains share a type".to_string())
        },
    ));

    let reach = chains.reachable_bang(inv).len();
    let leaves = inv.bang_leaves.len();
    let ok = reach <= distinct.len() && reach < leaves && !chains.truncated;
    r.checks.push(LemmaCheck::new(
        "count shadow",
        ok,
        format!(
            "{reach} reachable !-literals, {} realized types, {leaves} !-leaves (countable versus uncountable is not checkable on a finite run)",
            distinct.len()
        ),
    ));
    r
}

/// `P` as the enumeration game won by ⊤ exactly on the contents of
/// reachable positive literals and the swapped contents of reachable
/// negative ones.
pub fn s6_interpretation(inv: &S6Inventory, chains: &S6Chains) -> Interpretation {
    let wins = chains
        .reachable
        .iter()
        .map(|i| {
            let l = &inv.literals[*i];
            if l.positive {
                (l.top.clone(), l.bot.clone())
            } else {
                (l.bot.clone(), l.top.clone())
            }
        })
        .collect();
    Interpretation::new().with_enumeration("P", EnumPredicate::Table { default: false, wins })
}

/// The closing case analysis: the machine loses the recurrence-free
/// component, every thread of both ?-components, and an unreachable
/// !-thread.
pub fn s6_verdict_checks(
    f: &Formula,
    interp: &Interpretation,
    run: &[LabeledMove],
    inv: &S6Inventory,
    chains: &S6Chains,
) -> Vec<LemmaCheck> {
    let report = match decompose_verdict(f, interp, run) {
        Ok(r) => r,
        Err(e) => return vec![LemmaCheck::new("verdict", false, e.to_string())],
    };
    let mut out = vec![LemmaCheck::new("verdict", report.winner == Player::Env, format!("winner {}", report.winner))];
    let rf = report.component("recurrence-free");
    out.push(LemmaCheck::new(
        "verdict recurrence-free",
        rf.is_some_and(|c| c.winner == Player::Env),
        rf.map(|c| format!("winner {}", c.winner)).unwrap_or_default(),
    ));
    for name in ["left ?-component", "right ?-component"] {
        let c = report.component(name);
        let won: Vec<String> = c
            .map(|c| c.threads.iter().filter(|(_, w)| *w == Player::Machine).map(|(t, _)| t.clone()).collect())
            .unwrap_or_default();
        out.push(LemmaCheck::new(
            &format!("verdict {name}"),
            c.is_some_and(|c| c.winner == Player::Env) && won.is_empty(),
            if won.is_empty() { "every thread lost".to_string() } else { format!("won: {}", won.join(", ")) },
        ));
    }
    match chains.unreachable_bang(inv) {
        None => out.push(LemmaCheck::new("verdict !-thread", false, "every !-leaf is reachable")),
        Some(u) => {
            let label = format!("thread {u}");
            let lost = report
                .component("!-component")
                .and_then(|c| c.threads.iter().find(|(t, _)| *t == label))
                .is_some_and(|(_, w)| *w == Player::Env);
            out.push(LemmaCheck::new("verdict !-thread", lost, format!("{label} is unreachable")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counter::{Environment, Phase, D};
    use crate::formula::{instantiate_scheme, Bang, Scheme};

    fn s6() -> Formula {
        instantiate_scheme(Scheme::S6, Bang::Uncountable, &Default::default()).unwrap()
    }

    #[test]
    fn empty_run() {
        let f = s6();
        let inv = s6_literals(&f, &[]);
        assert_eq!(inv.literals.len(), 8);
        assert!(inv.literals.iter().all(|l| l.top.is_empty() && l.bot.is_empty()));
        // with nothing played every literal has the same content
        let ch = s6_chains(&inv);
        assert!(!s6_lemmas(&inv, &ch).get("distinct contents").unwrap().passed);
    }

    #[test]
    fn after_one_round_of_d() {
        let f = s6();
        let mut s = GameState::new(&f).unwrap();
        for m in D::new().batch(Phase::Round(1), &s) {
            s.apply(&m).unwrap();
        }
        let inv = s6_literals(&f, s.history());
        assert_eq!(inv.literals.len(), 9);
        assert!(inv.literals.iter().all(|l| l.top.is_empty() && l.bot.len() == 1));
        let ch = s6_chains(&inv);
        assert_eq!(ch.types(&inv), vec![vec![1]]);
        let i = s6_interpretation(&inv, &ch);
        let EnumPredicate::Table { wins, .. } = &i.enumeration["P"] else { panic!() };
        // ~P1 qualifies through the swapped clause
        assert_eq!(wins.len(), 1);
        assert!(wins.contains(&(BTreeSet::from([Constant(2)]), BTreeSet::new())));
        assert!(s6_lemmas(&inv, &ch).all_passed());
    }

    #[test]
    fn duplicated_content_is_reported() {
        let f = s6();
        let mut inv = s6_literals(&f, &[]);
        inv.literals.truncate(2);
        let ch = s6_chains(&inv);
        let r = s6_lemmas(&inv, &ch);
        let c = r.get("distinct contents").unwrap();
        assert!(!c.passed);
        assert!(c.detail.contains("~P1") && c.detail.contains("P2@ε"));
    }
}
