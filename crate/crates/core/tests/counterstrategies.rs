use std::collections::BTreeSet;

use proptest::prelude::*;
use recurrence::arena::{GameState, Player, Segment};
use recurrence::formula::{Bang, Constant, Scheme};
use recurrence::harness::{check_replay, run_match, MatchConfig, Trace};

fn env_constants_fresh(s: &GameState) -> Result<(), String> {
    let mut seen: BTreeSet<Constant> = BTreeSet::new();
    for m in s.history() {
        let consts: Vec<Constant> =
            m.path.iter().filter_map(|x| if let Segment::Const(c) = x { Some(*c) } else { None }).collect();
        if m.player == Player::Env {
            if let Some(last) = consts.last() {
                if seen.contains(last) {
                    return Err(format!("{} repeats {last}", m.to_wire()));
                }
            }
        }
        seen.extend(consts);
    }
    Ok(())
}

fn induced_lost(t: &Trace) -> bool {
    t.verdict("induced").is_some_and(|r| r.winner == Player::Env)
}

fn failures(t: &Trace) -> Vec<String> {
    t.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn c_moves_legally_with_fresh_constants(
        seed in 0u64..10_000,
        rounds in 1usize..30,
        uncountable in any::<bool>(),
        machine in prop::sample::select(vec!["naive", "random-legal", "copycat-prover"]),
    ) {
        let bang = if uncountable { Bang::Uncountable } else { Bang::Aleph0 };
        let t = run_match(&MatchConfig::new(Scheme::S4, bang, machine, "c", rounds, seed)).unwrap();
        prop_assert!(t.offence.as_ref().is_none_or(|o| o.player == Player::Machine), "{:?}", t.offence);
        let s = check_replay(&t).unwrap();
        prop_assert!(env_constants_fresh(&s).is_ok(), "{:?}", env_constants_fresh(&s));
        prop_assert!(t.passed(), "{:?}", failures(&t));
        prop_assert!(induced_lost(&t));
    }

    #[test]
    fn d_splits_every_leaf_each_round(
        seed in 0u64..10_000,
        rounds in 1usize..7,
        machine in prop::sample::select(vec!["naive", "random-legal", "k"]),
    ) {
        let t = run_match(&MatchConfig::new(Scheme::S6, Bang::Uncountable, machine, "d", rounds, seed)).unwrap();
        let s = check_replay(&t).unwrap();
        let (_, leaves) = s.tree_view(&[Segment::Index(4)]).unwrap();
        prop_assert_eq!(leaves.len(), 1 << rounds);
        prop_assert!(env_constants_fresh(&s).is_ok(), "{:?}", env_constants_fresh(&s));
        for name in ["distinct contents", "unique types", "count shadow"] {
            prop_assert!(t.checks.iter().any(|c| c.name == name && c.passed), "{}: {:?}", name, failures(&t));
        }
        prop_assert!(induced_lost(&t));
    }
}

#[test]
fn naive_against_c_loses_under_induced() {
    let t = run_match(&MatchConfig::new(Scheme::S4, Bang::Aleph0, "naive", "c", 20, 7)).unwrap();
    assert!(t.passed(), "{:?}", failures(&t));
    assert!(induced_lost(&t));
    let a = t.analysis.as_ref().unwrap();
    assert!(!a.literals.is_empty());
    assert!(a.interpretation.is_some());
}

#[test]
fn d_closing_batch_reaches_every_subgame() {
    let t = run_match(&MatchConfig::new(Scheme::S6, Bang::Uncountable, "silent", "d", 3, 1)).unwrap();
    let s = check_replay(&t).unwrap();
    // 1 + 3 per ?-leaf in each ?-component + 1 per !-leaf, each of the 4 steps
    let per_step: Vec<usize> = t.steps.iter().map(|st| st.env.len()).collect();
    assert_eq!(per_step, vec![1 + 1 + 3 + 3 + 2, 2 + 1 + 3 + 3 + 4, 4 + 1 + 3 + 3 + 8, 1 + 3 + 3 + 8]);
    assert!(env_constants_fresh(&s).is_ok());
}
