mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recurrence::adjudicator::{flip_run, reference_winner, winner_finite};
use recurrence::arena::{candidate_moves, legal_moves_oracle, Bounds, GameState};
use recurrence::formula::{is_nnf, to_nnf, Cardinality, Formula};
use recurrence::harness::interpretation_family;

use common::{branching_formulas, random_run, scheme_formulas, UNIVERSE};

fn all_formulas() -> Vec<Formula> {
    let mut out: Vec<Formula> = scheme_formulas().into_iter().map(|(_, f)| f).collect();
    out.extend(branching_formulas());
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replay_reaches_the_same_position(pick in 0usize..64, seed in any::<u64>(), len in 0usize..12) {
        let fs = all_formulas();
        let f = &fs[pick % fs.len()];
        let run = random_run(f, &mut ChaCha8Rng::seed_from_u64(seed), len, 2, 3);
        let mut s = GameState::new(f).unwrap();
        for m in &run {
            s.apply(m).unwrap();
        }
        let r = GameState::replay(f, &run).unwrap();
        prop_assert_eq!(r.digest(), s.digest());
        prop_assert_eq!(r.history(), &run);
    }

    #[test]
    fn oracle_agrees_with_check(pick in 0usize..5, seed in any::<u64>(), len in 0usize..5) {
        let (_, f) = &scheme_formulas()[pick];
        let s = GameState::replay(f, &random_run(f, &mut ChaCha8Rng::seed_from_u64(seed), len, 1, 3)).unwrap();
        let oracle = legal_moves_oracle(&s, &UNIVERSE, Bounds { copy_cap: 2 });
        for m in candidate_moves(f, &UNIVERSE, 1, 3) {
            prop_assert_eq!(s.check(&m).is_ok(), oracle.contains(&m), "{}", m.to_wire());
        }
    }

    #[test]
    fn negation_swaps_the_winner(pick in 0usize..64, seed in any::<u64>(), len in 0usize..10, which in 0usize..6) {
        let fs = all_formulas();
        let f = &fs[pick % fs.len()];
        let run = random_run(f, &mut ChaCha8Rng::seed_from_u64(seed), len, 2, 3);
        let (_, i) = &interpretation_family(f, seed)[which];
        let a = winner_finite(f, i, &run).unwrap().winner;
        let b = winner_finite(&Formula::neg(f.clone()), i, &flip_run(&run)).unwrap().winner;
        prop_assert_eq!(a, b.opponent());
    }

    #[test]
    fn cardinality_does_not_matter_on_finite_runs(pick in 0usize..64, seed in any::<u64>(), len in 0usize..10) {
        let fs = branching_formulas();
        let f = &fs[pick % fs.len()];
        let run = random_run(f, &mut ChaCha8Rng::seed_from_u64(seed), len, 2, 3);
        for (_, i) in interpretation_family(f, seed) {
            let u = winner_finite(&f.with_cardinality(Cardinality::Uncountable), &i, &run).unwrap();
            let c = winner_finite(&f.with_cardinality(Cardinality::Aleph0), &i, &run).unwrap();
            prop_assert_eq!(u.winner, c.winner);
            prop_assert!(u.breakdown.consistent());
            prop_assert_eq!(u.winner, reference_winner(f, &i, &run).unwrap());
        }
    }

    #[test]
    fn an_illegal_move_loses_for_its_maker(pick in 0usize..64, seed in any::<u64>(), len in 0usize..8, extra in 0usize..1000) {
        let fs = all_formulas();
        let f = &fs[pick % fs.len()];
        let mut run = random_run(f, &mut ChaCha8Rng::seed_from_u64(seed), len, 2, 3);
        let s = GameState::replay(f, &run).unwrap();
        let cands = candidate_moves(f, &UNIVERSE, 2, 3);
        let bad: Vec<_> = cands.iter().filter(|m| s.check(m).is_err()).collect();
        prop_assume!(!bad.is_empty());
        let m = bad[extra % bad.len()].clone();
        let maker = m.player;
        run.push(m);
        let (_, i) = &interpretation_family(f, seed)[0];
        let v = winner_finite(f, i, &run).unwrap();
        prop_assert_eq!(v.winner, maker.opponent());
        prop_assert_eq!(v.illegal.unwrap().index, run.len() - 1);
    }
}

#[test]
fn scheme_formulas_are_in_nnf() {
    for (name, f) in scheme_formulas() {
        assert!(is_nnf(&f), "{name}");
        assert_eq!(to_nnf(&f), f, "{name}");
        assert_eq!(to_nnf(&to_nnf(&Formula::neg(f.clone()))), to_nnf(&Formula::neg(f)), "{name}");
    }
}
