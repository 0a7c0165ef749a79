//! Winners of finite runs.
//!
//! [`winner_finite`] replays a run through the arena and evaluates the final
//! node states. [`reference_winner`] recomputes the winner from thread
//! projections of the run alone and is used to cross-check it.

mod interp;
mod reference;
mod report;

use serde::Serialize;
use thiserror::Error;

pub use interp::{contents, EnumPredicate, Interpretation, InterpretationError, TruthTable};
pub use reference::reference_winner;
pub use report::{decompose_verdict, ComponentReport, VerdictReport};

use crate::arena::{GameError, GameState, LabeledMove, NodeState, Player, Rule};
use crate::formula::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Atom,
    Neg,
    And,
    Or,
    ChoiceAll,
    ChoiceExists,
    PRec,
    PCorec,
    BRec,
    BCorec,
}

/// Winner of every subgame, as a tree following the node states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Breakdown {
    pub kind: NodeKind,
    pub winner: Player,
    /// Operands by index, copies by index plus `fresh` for the untouched
    /// ones, leaf threads by name, a resolved choice by its constant.
    pub children: Vec<(String, Breakdown)>,
}

impl Breakdown {
    /// The winner implied by the children's winners alone.
    pub fn recombined(&self) -> Option<Player> {
        let ws: Vec<Player> = self.children.iter().map(|(_, b)| b.winner).collect();
        let all = |ws: &[Player]| if ws.iter().all(|w| *w == Player::Machine) { Player::Machine } else { Player::Env };
        let any = |ws: &[Player]| if ws.contains(&Player::Machine) { Player::Machine } else { Player::Env };
        Some(match self.kind {
            NodeKind::Atom => return None,
            NodeKind::Neg => ws[0].opponent(),
            NodeKind::And | NodeKind::PRec | NodeKind::BRec => all(&ws),
            NodeKind::Or | NodeKind::PCorec | NodeKind::BCorec => any(&ws),
            NodeKind::ChoiceAll => ws.first().copied().unwrap_or(Player::Machine),
            NodeKind::ChoiceExists => ws.first().copied().unwrap_or(Player::Env),
        })
    }

    /// Whether every node's winner follows from its children.
    pub fn consistent(&self) -> bool {
        self.recombined().is_none_or(|w| w == self.winner) && self.children.iter().all(|(_, c)| c.consistent())
    }

    pub fn child(&self, label: &str) -> Option<&Breakdown> {
        self.children.iter().find(|(l, _)| l == label).map(|(_, b)| b)
    }
}

/// The first illegal move of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Offence {
    pub index: usize,
    pub player: Player,
    #[serde(serialize_with = "rule_text")]
    pub rule: Rule,
}

fn rule_text<S: serde::Serializer>(r: &Rule, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub winner: Player,
    /// Evaluation of the longest legal prefix.
    pub breakdown: Breakdown,
    /// If set, the offender lost regardless of the breakdown.
    pub illegal: Option<Offence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdjudicationError {
    #[error(transparent)]
    Interpretation(#[from] InterpretationError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Winner of a finite run. An illegal move loses for its maker.
pub fn winner_finite(f: &Formula, interp: &Interpretation, run: &[LabeledMove]) -> Result<Verdict, AdjudicationError> {
    let mut s = GameState::new(f)?;
    let mut illegal = None;
    for (index, m) in run.iter().enumerate() {
        if let Err(e) = s.apply(m) {
            illegal = Some(Offence { index, player: m.player, rule: e.rule });
            break;
        }
    }
    let breakdown = evaluate(&s, interp)?;
    let winner = match illegal {
        Some(o) => o.player.opponent(),
        None => breakdown.winner,
    };
    Ok(Verdict { winner, breakdown, illegal })
}

/// Evaluate the current position of a game as if the run ended here.
pub fn evaluate(s: &GameState, interp: &Interpretation) -> Result<Breakdown, InterpretationError> {
    eval(s.formula(), s.root(), interp)
}

fn eval(f: &Formula, st: &NodeState, interp: &Interpretation) -> Result<Breakdown, InterpretationError> {
    let leaf = |kind, winner| Breakdown { kind, winner, children: Vec::new() };
    let mut b = match (f, st) {
        (Formula::Atom(a), NodeState::Atom { log }) => return Ok(leaf(NodeKind::Atom, interp.atom_winner(a, log)?)),
        (Formula::Neg(c), NodeState::Neg(s)) => {
            Breakdown { kind: NodeKind::Neg, winner: Player::Env, children: vec![(String::new(), eval(c, s, interp)?)] }
        }
        (Formula::And(cs) | Formula::Or(cs), NodeState::Junction(ss)) => {
            let kind = if matches!(f, Formula::And(_)) { NodeKind::And } else { NodeKind::Or };
            let mut children = Vec::with_capacity(cs.len());
            for (i, (c, s)) in cs.iter().zip(ss).enumerate() {
                children.push(((i + 1).to_string(), eval(c, s, interp)?));
            }
            Breakdown { kind, winner: Player::Env, children }
        }
        (Formula::ChoiceAll(..) | Formula::ChoiceExists(..), NodeState::Choice(res)) => {
            let kind = if matches!(f, Formula::ChoiceAll(..)) { NodeKind::ChoiceAll } else { NodeKind::ChoiceExists };
            let children = match res {
                None => Vec::new(),
                Some(r) => vec![(r.constant.to_string(), eval(&r.instance, &r.state, interp)?)],
            };
            Breakdown { kind, winner: Player::Env, children }
        }
        (Formula::PRec(c) | Formula::PCorec(c), NodeState::Copies(copies)) => {
            let kind = if matches!(f, Formula::PRec(_)) { NodeKind::PRec } else { NodeKind::PCorec };
            let mut children = Vec::with_capacity(copies.len() + 1);
            for (i, s) in copies {
                children.push((i.to_string(), eval(c, s, interp)?));
            }
            children.push(("fresh".to_string(), eval(c, &NodeState::fresh(c), interp)?));
            Breakdown { kind, winner: Player::Env, children }
        }
        (Formula::BRec(_, c) | Formula::BCorec(_, c), NodeState::Branch { threads, .. }) => {
            let kind = if matches!(f, Formula::BRec(..)) { NodeKind::BRec } else { NodeKind::BCorec };
            let mut children = Vec::with_capacity(threads.len());
            for (w, s) in threads {
                children.push((w.to_string(), eval(c, s, interp)?));
            }
            Breakdown { kind, winner: Player::Env, children }
        }
        _ => unreachable!("state does not match formula"),
    };
    b.winner = b.recombined().expect("inner node");
    Ok(b)
}

/// The same run with every label reversed.
pub fn flip_run(run: &[LabeledMove]) -> Vec<LabeledMove> {
    run.iter().map(|m| LabeledMove { player: m.player.opponent(), path: m.path.clone() }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, Constant};

    fn run(f: &Formula, ws: &[&str]) -> Vec<LabeledMove> {
        ws.iter().map(|w| LabeledMove::parse_wire(f, w).unwrap()).collect()
    }

    #[test]
    fn unresolved_exists_loses_for_machine() {
        let f = parse_formula("A x. E y. ~p(x, y)").unwrap();
        let i = Interpretation::new().with_elementary("p", TruthTable::Const(true));
        let v = winner_finite(&f, &i, &run(&f, &["B 1"])).unwrap();
        assert_eq!(v.winner, Player::Env);
        let g = parse_formula("E x. A y. p(x, y)").unwrap();
        assert_eq!(winner_finite(&g, &i, &[]).unwrap().winner, Player::Env);
    }

    #[test]
    fn branching_superset_after_echo() {
        let f = parse_formula("!u P").unwrap();
        let i = Interpretation::new().with_enumeration("P", EnumPredicate::Superset);
        let v = winner_finite(&f, &i, &run(&f, &["B :", "B 0.5", "T 0.5"])).unwrap();
        assert_eq!(v.winner, Player::Machine);
        assert_eq!(v.breakdown.children.len(), 2);
        assert!(v.breakdown.children.iter().all(|(_, b)| b.winner == Player::Machine));
        assert!(v.breakdown.consistent());
        let v = winner_finite(&f, &i, &run(&f, &["B :", "B 1.5", "T 0.5"])).unwrap();
        assert_eq!(v.winner, Player::Env);
    }

    #[test]
    fn parallel_copies_include_the_fresh_one() {
        let f = parse_formula("!p P").unwrap();
        // the empty run loses every copy, touched or not
        let i = Interpretation::new().with_enumeration("P", EnumPredicate::Table {
            default: false,
            wins: [([Constant(1)].into(), [Constant(1)].into())].into(),
        });
        let v = winner_finite(&f, &i, &run(&f, &["B 1.1", "T 1.1"])).unwrap();
        assert_eq!(v.breakdown.child("1").unwrap().winner, Player::Machine);
        assert_eq!(v.breakdown.child("fresh").unwrap().winner, Player::Env);
        assert_eq!(v.winner, Player::Env);
    }

    #[test]
    fn offender_loses() {
        let f = parse_formula("!u P").unwrap();
        let i = Interpretation::new().with_enumeration("P", EnumPredicate::Const(true));
        let m = LabeledMove::new(Player::Machine, vec![crate::arena::Segment::Replicate(Default::default())]);
        let v = winner_finite(&f, &i, &[m]).unwrap();
        assert_eq!(v.winner, Player::Env);
        assert_eq!(v.illegal.unwrap().rule, Rule::ReplicativeByMachine);
    }

    #[test]
    fn flip() {
        let f = parse_formula("P").unwrap();
        let r = run(&f, &["T 1", "B 2"]);
        let flipped = flip_run(&r);
        assert_eq!(flipped[0].to_wire(), "B 1");
        assert_eq!(flipped[1].to_wire(), "T 2");
        assert!(flip_run(&[]).is_empty());
    }

    #[test]
    fn missing_letter() {
        let f = parse_formula("P").unwrap();
        assert!(matches!(
            winner_finite(&f, &Interpretation::new(), &[]),
            Err(AdjudicationError::Interpretation(InterpretationError::MissingLetter(_)))
        ));
    }
}
