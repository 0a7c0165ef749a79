use std::collections::BTreeSet;

use super::{Interpretation, InterpretationError};
use crate::arena::{BitTree, Bits, LabeledMove, Player, Segment, ThreadName};
use crate::formula::{Cardinality, Formula};

type Sub = Vec<(Player, Vec<Segment>)>;

/// Winner of a legal finite run, computed from projections of the run.
///
/// A branching node quantifies over threads: every bit string one longer
/// than the deepest actual node, continued by zeros for `!c`/`?c` and left
/// open (standing for all infinite continuations) for `!u`/`?u`.
pub fn reference_winner(f: &Formula, interp: &Interpretation, run: &[LabeledMove]) -> Result<Player, InterpretationError> {
    let sub: Sub = run.iter().map(|m| (m.player, m.path.clone())).collect();
    winner(f, &sub, interp)
}

fn strip(run: &Sub, head: &Segment) -> Sub {
    run.iter().filter(|(_, p)| p.first() == Some(head)).map(|(pl, p)| (*pl, p[1..].to_vec())).collect()
}

fn all_machine(mut ws: impl Iterator<Item = Result<Player, InterpretationError>>) -> Result<Player, InterpretationError> {
    let mut won = true;
    for w in &mut ws {
        won &= w? == Player::Machine;
    }
    Ok(if won { Player::Machine } else { Player::Env })
}

fn any_machine(ws: impl Iterator<Item = Result<Player, InterpretationError>>) -> Result<Player, InterpretationError> {
    let mut won = false;
    for w in ws {
        won |= w? == Player::Machine;
    }
    Ok(if won { Player::Machine } else { Player::Env })
}

fn winner(f: &Formula, run: &Sub, interp: &Interpretation) -> Result<Player, InterpretationError> {
    match f {
        Formula::Atom(a) => {
            let log: Vec<_> = run
                .iter()
                .filter_map(|(p, path)| match path.as_slice() {
                    [Segment::Const(c)] => Some((*p, *c)),
                    _ => None,
                })
                .collect();
            interp.atom_winner(a, &log)
        }
        Formula::Neg(c) => {
            let flipped: Sub = run.iter().map(|(p, path)| (p.opponent(), path.clone())).collect();
            Ok(winner(c, &flipped, interp)?.opponent())
        }
        Formula::And(cs) => all_machine(
            cs.iter().enumerate().map(|(i, c)| winner(c, &strip(run, &Segment::Index(i as u32 + 1)), interp)),
        ),
        Formula::Or(cs) => any_machine(
            cs.iter().enumerate().map(|(i, c)| winner(c, &strip(run, &Segment::Index(i as u32 + 1)), interp)),
        ),
        Formula::ChoiceAll(v, body) | Formula::ChoiceExists(v, body) => match run.first() {
            None if matches!(f, Formula::ChoiceAll(..)) => Ok(Player::Machine),
            None => Ok(Player::Env),
            Some((_, path)) => {
                let Some(Segment::Const(c)) = path.first() else { unreachable!("legal run") };
                let rest = strip(&run[1..].to_vec(), &Segment::Const(*c));
                winner(&body.substitute(v, *c), &rest, interp)
            }
        },
        Formula::PRec(c) | Formula::PCorec(c) => {
            let touched: BTreeSet<u32> = run
                .iter()
                .filter_map(|(_, p)| match p.first() {
                    Some(Segment::Index(i)) => Some(*i),
                    _ => None,
                })
                .collect();
            let copies = touched
                .iter()
                .map(|i| winner(c, &strip(run, &Segment::Index(*i)), interp))
                .chain(std::iter::once(winner(c, &Vec::new(), interp)));
            if matches!(f, Formula::PRec(_)) {
                all_machine(copies)
            } else {
                any_machine(copies)
            }
        }
        Formula::BRec(card, c) | Formula::BCorec(card, c) => {
            let mut tree = BitTree::new();
            for (_, p) in run {
                if let Some(Segment::Replicate(w)) = p.first() {
                    tree.split(w);
                }
            }
            let depth = tree.actual().iter().map(Bits::len).max().unwrap_or(0);
            let threads = Bits::all_of_len(depth + 1).into_iter().map(|x| match card {
                Cardinality::Aleph0 => ThreadName::zeros_after(x),
                Cardinality::Uncountable => ThreadName::finite(x),
            });
            let outcomes = threads.map(|x| {
                let theta: Sub = run
                    .iter()
                    .filter_map(|(p, path)| match path.split_first() {
                        Some((Segment::Thread(u), alpha)) if x.has_prefix(u) => Some((*p, alpha.to_vec())),
                        _ => None,
                    })
                    .collect();
                winner(c, &theta, interp)
            });
            if matches!(f, Formula::BRec(..)) {
                all_machine(outcomes)
            } else {
                any_machine(outcomes)
            }
        }
        Formula::Implies(..) => unreachable!("implication-free formulas only"),
    }
}
