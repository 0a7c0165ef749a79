#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use recurrence::arena::{candidate_moves, GameState, LabeledMove};
use recurrence::formula::{instantiate_scheme, parse_formula, Bang, Constant, Formula, Scheme};

pub const UNIVERSE: [Constant; 3] = [Constant(1), Constant(2), Constant(3)];

/// The five game formulas the strategies are played on.
pub fn scheme_formulas() -> Vec<(String, Formula)> {
    [
        (Scheme::ShortProd, Bang::Parallel),
        (Scheme::LongProd, Bang::Parallel),
        (Scheme::S4, Bang::Aleph0),
        (Scheme::LongProd, Bang::Aleph0),
        (Scheme::S6, Bang::Uncountable),
    ]
    .into_iter()
    .map(|(s, b)| (format!("{s}/{}", b.name()), instantiate_scheme(s, b, &Default::default()).unwrap()))
    .collect()
}

/// Small formulas with branching recurrence, plus the branching scheme
/// instances.
pub fn branching_formulas() -> Vec<Formula> {
    let mut out: Vec<Formula> = [
        "!u P",
        "?u P",
        "!u (P | ~P)",
        "!u E x. A y. p(x, y)",
        "?u (P & ~Q) | !u Q",
        "~P | ?u (P & (~P | ~Q)) | !u Q",
        "!u ?u P",
    ]
    .iter()
    .map(|s| parse_formula(s).unwrap())
    .collect();
    for (s, b) in [(Scheme::S4, Bang::Uncountable), (Scheme::LongProd, Bang::Uncountable), (Scheme::S6, Bang::Uncountable)] {
        out.push(instantiate_scheme(s, b, &Default::default()).unwrap());
    }
    out
}

/// Moves the arena accepts now, among the candidates.
pub fn accepted(s: &GameState, candidates: &[LabeledMove]) -> Vec<LabeledMove> {
    candidates.iter().filter(|m| s.check(m).is_ok()).cloned().collect()
}

/// A random legal run of at most `len` moves, drawn from the candidates
/// the arena accepts.
pub fn random_run<R: Rng>(f: &Formula, rng: &mut R, len: usize, copy_cap: u32, max_bits: usize) -> Vec<LabeledMove> {
    let candidates = candidate_moves(f, &UNIVERSE, copy_cap, max_bits);
    let mut s = GameState::new(f).unwrap();
    let mut run = Vec::new();
    for _ in 0..len {
        let legal = accepted(&s, &candidates);
        let Some(m) = legal.choose(rng) else { break };
        s.apply(m).unwrap();
        run.push(m.clone());
    }
    run
}
