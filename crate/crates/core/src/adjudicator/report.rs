use serde::Serialize;

use super::{winner_finite, AdjudicationError, Breakdown, Interpretation, NodeKind, Offence};
use crate::arena::{LabeledMove, Player};
use crate::formula::Formula;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    /// 1-based position among the top-level operands.
    pub index: u32,
    pub name: String,
    pub winner: Player,
    /// Per thread (branching) or per copy (parallel) winners.
    pub threads: Vec<(String, Player)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictReport {
    pub winner: Player,
    pub illegal: Option<Offence>,
    pub components: Vec<ComponentReport>,
}

fn has_recurrence(f: &Formula) -> bool {
    matches!(f, Formula::PRec(_) | Formula::PCorec(_) | Formula::BRec(..) | Formula::BCorec(..))
        || f.children().into_iter().any(has_recurrence)
}

fn is_corec(f: &Formula) -> bool {
    matches!(f, Formula::PCorec(_) | Formula::BCorec(..))
}

fn is_rec(f: &Formula) -> bool {
    matches!(f, Formula::PRec(_) | Formula::BRec(..))
}

/// Verdict split by top-level component: the recurrence-free part, the
/// ?-components (left and right when there are two) and the !-component.
pub fn decompose_verdict(f: &Formula, interp: &Interpretation, run: &[LabeledMove]) -> Result<VerdictReport, AdjudicationError> {
    let v = winner_finite(f, interp, run)?;
    let parts: Vec<(&Formula, &Breakdown)> = match (f, v.breakdown.kind) {
        (Formula::Or(cs) | Formula::And(cs), NodeKind::Or | NodeKind::And) => {
            cs.iter().zip(v.breakdown.children.iter().map(|(_, b)| b)).collect()
        }
        _ => vec![(f, &v.breakdown)],
    };
    let corecs = parts.iter().filter(|(c, _)| is_corec(c)).count();
    let mut seen_corec = 0;
    let components = parts
        .iter()
        .enumerate()
        .map(|(i, (c, b))| {
            let name = if is_corec(c) {
                seen_corec += 1;
                match (corecs, seen_corec) {
                    (2, 1) => "left ?-component".to_string(),
                    (2, 2) => "right ?-component".to_string(),
                    _ => "?-component".to_string(),
                }
            } else if is_rec(c) {
                "!-component".to_string()
            } else if !has_recurrence(c) {
                "recurrence-free".to_string()
            } else {
                format!("component {}", i + 1)
            };
            let threads = match b.kind {
                NodeKind::BRec | NodeKind::BCorec => {
                    b.children.iter().map(|(l, t)| (format!("thread {l}"), t.winner)).collect()
                }
                NodeKind::PRec | NodeKind::PCorec => b
                    .children
                    .iter()
                    .map(|(l, t)| (if l == "fresh" { l.clone() } else { format!("copy {l}") }, t.winner))
                    .collect(),
                _ => Vec::new(),
            };
            ComponentReport { index: i as u32 + 1, name, winner: b.winner, threads }
        })
        .collect();
    Ok(VerdictReport { winner: v.winner, illegal: v.illegal, components })
}

impl VerdictReport {
    pub fn component(&self, name: &str) -> Option<&ComponentReport> {
        self.components.iter().find(|c| c.name == name)
    }

    /// One line per component.
    pub fn lines(&self) -> Vec<String> {
        self.components
            .iter()
            .map(|c| {
                let threads: Vec<String> = c.threads.iter().map(|(t, w)| format!("{t}={w}")).collect();
                format!("{}: {} [{}]", c.name, c.winner, threads.join(", "))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adjudicator::{EnumPredicate, TruthTable};
    use crate::formula::{instantiate_scheme, Bang, Scheme};

    #[test]
    fn s4_after_first_prescription() {
        let f = instantiate_scheme(Scheme::S4, Bang::Aleph0, &Default::default()).unwrap();
        let i = Interpretation::new().with_elementary("p", TruthTable::Const(true));
        let run = vec![LabeledMove::parse_wire(&f, "B 1.1").unwrap()];
        let r = decompose_verdict(&f, &i, &run).unwrap();
        let names: Vec<&str> = r.components.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, vec!["recurrence-free", "?-component", "!-component"]);
        assert!(r.components.iter().all(|c| c.winner == Player::Env));
        assert_eq!(r.winner, Player::Env);
    }

    #[test]
    fn s6_names() {
        let f = instantiate_scheme(Scheme::S6, Bang::Uncountable, &Default::default()).unwrap();
        let i = Interpretation::new().with_enumeration("P", EnumPredicate::Equal);
        let r = decompose_verdict(&f, &i, &[]).unwrap();
        let names: Vec<&str> = r.components.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, vec!["recurrence-free", "left ?-component", "right ?-component", "!-component"]);
        // with nothing played every P is won by ⊤ and every ~P lost
        assert_eq!(r.component("!-component").unwrap().winner, Player::Machine);
        assert_eq!(r.winner, Player::Machine);
    }

    #[test]
    fn single_atom() {
        let f = Formula::atom("P");
        let i = Interpretation::new().with_enumeration("P", EnumPredicate::Const(false));
        let r = decompose_verdict(&f, &i, &[]).unwrap();
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.winner, winner_finite(&f, &i, &[]).unwrap().winner);
    }
}
