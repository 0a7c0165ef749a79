use thiserror::Error;

use super::{Bits, LabeledMove, Run, Segment};
use crate::formula::Formula;

/// A thread to project onto: a finite bit string, optionally continued by
/// infinitely many zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreadName {
    pub bits: Bits,
    pub zero_tail: bool,
}

impl ThreadName {
    pub fn finite(bits: Bits) -> Self {
        ThreadName { bits, zero_tail: false }
    }

    pub fn zeros_after(bits: Bits) -> Self {
        ThreadName { bits, zero_tail: true }
    }

    /// Whether `u` is an initial segment of this thread.
    pub fn has_prefix(&self, u: &Bits) -> bool {
        if u.is_prefix_of(&self.bits) {
            return true;
        }
        self.zero_tail && self.bits.is_prefix_of(u) && u.as_str()[self.bits.len()..].bytes().all(|b| b == b'0')
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the address does not lead to a branching recurrence")]
pub struct NotBranching;

/// The formula node at `r`, following resolved-choice segments into the body.
pub fn formula_at<'a>(f: &'a Formula, r: &[Segment]) -> Option<&'a Formula> {
    let mut node = f;
    let mut segs = r;
    loop {
        if let Formula::Neg(c) = node {
            if !segs.is_empty() {
                node = c;
                continue;
            }
        }
        let Some((head, rest)) = segs.split_first() else { return Some(node) };
        node = match (node, head) {
            (Formula::And(cs) | Formula::Or(cs), Segment::Index(i)) => cs.get((*i as usize).checked_sub(1)?)?,
            (Formula::PRec(c) | Formula::PCorec(c), Segment::Index(_)) => c,
            (Formula::BRec(_, c) | Formula::BCorec(_, c), Segment::Thread(_)) => c,
            (Formula::ChoiceAll(_, c) | Formula::ChoiceExists(_, c), Segment::Const(_)) => c,
            _ => return None,
        };
        segs = rest;
    }
}

/// The run of the subgame played in thread `x` of the branching node at `r`:
/// keep the moves `r.u.α` with `u` an initial segment of `x`, as `α`.
pub fn project_thread(f: &Formula, run: &[LabeledMove], r: &[Segment], x: &ThreadName) -> Result<Run, NotBranching> {
    match formula_at(f, r) {
        Some(Formula::BRec(..) | Formula::BCorec(..)) => {}
        _ => return Err(NotBranching),
    }
    Ok(run
        .iter()
        .filter_map(|m| {
            let rest = m.path.strip_prefix(r)?;
            match rest.split_first() {
                Some((Segment::Thread(u), alpha)) if x.has_prefix(u) => {
                    Some(LabeledMove { player: m.player, path: alpha.to_vec() })
                }
                _ => None,
            }
        })
        .collect())
}
