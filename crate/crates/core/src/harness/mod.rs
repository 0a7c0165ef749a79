//! The round scheduler, match traces, and the experiments built on them.
//!
//! A match alternates an environment batch with at most one machine move for
//! a fixed number of rounds, then lets the machine drain its pending moves
//! until both sides fall silent. Every move, state digest, verdict and
//! assertion lands in a [`Trace`].

mod config;
mod kwatch;
mod play;
mod table;
mod trace;

pub use config::{ConfigError, MatchConfig};
pub use kwatch::{rescued_lines, KSnapshot, KWatch};
pub use play::{play, quiesce, PlayOffence, Played, StepRecord};
pub use table::{
    cell_configs, experiment_validity_table, Cell, CellReport, CellVerdict, TableConfig, TableReport, LONG_SUITE,
    SHORT_SUITE,
};
pub use trace::{check_replay, replay_jsonl, ReplayError, Trace, VerdictRecord};

use rayon::prelude::*;

use crate::adjudicator::{decompose_verdict, EnumPredicate, Interpretation, TruthTable, VerdictReport};
use crate::analysis::{analyze, LemmaCheck, Mode};
use crate::arena::{LabeledMove, Player};
use crate::counter::{env_by_name, random_schedule, Environment, RandomEnv, ScheduleEnv};
use crate::formula::{Bang, Formula, Scheme};
use crate::strategies::{machine_by_name, K};

/// Named interpretations a winning strategy has to beat: constant, set
/// comparisons and seeded pseudo-random predicates and tables, uniform and
/// per letter.
pub fn interpretation_family(f: &Formula, seed: u64) -> Vec<(String, Interpretation)> {
    let uniform = |p: EnumPredicate, t: TruthTable| Interpretation::uniform(f, p, t);
    let mut out = vec![
        ("all-true".to_string(), uniform(EnumPredicate::Const(true), TruthTable::Const(true))),
        ("all-false".to_string(), uniform(EnumPredicate::Const(false), TruthTable::Const(false))),
        ("superset".to_string(), uniform(EnumPredicate::Superset, TruthTable::Hashed { seed })),
        ("equal".to_string(), uniform(EnumPredicate::Equal, TruthTable::Hashed { seed: seed + 1 })),
        ("hashed".to_string(), uniform(EnumPredicate::Hashed { seed }, TruthTable::Hashed { seed })),
    ];
    let mut mixed = Interpretation::new();
    for (k, (letter, _)) in f.letters().unwrap_or_default().into_iter().enumerate() {
        let s = seed.wrapping_mul(31).wrapping_add(k as u64 + 1);
        mixed = mixed
            .with_enumeration(&letter, EnumPredicate::Hashed { seed: s })
            .with_elementary(&letter, TruthTable::Hashed { seed: s });
    }
    // keep only the kind each letter has
    let letters = f.letters().unwrap_or_default();
    mixed.enumeration.retain(|l, _| matches!(letters.get(l), Some(crate::formula::LetterKind::Enumeration)));
    mixed.elementary.retain(|l, _| matches!(letters.get(l), Some(crate::formula::LetterKind::Elementary { .. })));
    out.push(("hashed-per-letter".to_string(), mixed));
    out
}

/// Strategies that are supposed to win their scheme outright.
fn is_winning_strategy(cfg: &MatchConfig) -> bool {
    matches!(cfg.machine.as_str(), "sp-parallel" | "lp-parallel")
        || (cfg.machine == "k" && cfg.scheme == Scheme::LongProd)
}

fn build_env(cfg: &MatchConfig) -> Box<dyn Environment> {
    match cfg.env.as_str() {
        "random" => Box::new(
            RandomEnv::new(cfg.seed, 400)
                .with_universe(cfg.universe_cap)
                .with_bounds(crate::arena::Bounds { copy_cap: cfg.copy_cap }),
        ),
        "schedule" => {
            let schedule = cfg.schedule.clone().unwrap_or_else(|| random_schedule(cfg.seed, cfg.max_splits, cfg.rounds));
            let component = cfg.bang_component();
            let noise = RandomEnv::new(cfg.seed.wrapping_add(1), 400)
                .with_universe(cfg.universe_cap)
                .with_bounds(crate::arena::Bounds { copy_cap: cfg.copy_cap });
            Box::new(ScheduleEnv::with_noise(component, &schedule, noise))
        }
        name => env_by_name(name, cfg.seed).expect("validated environment name"),
    }
}

/// The invariant of short production under `!p`, read off a verdict:
/// whenever copy i of the !-component is lost, the recurrence-free `~P` or
/// one of copies 1..=i of the ?-component is won.
pub fn sp_invariant(report: &VerdictReport) -> Result<(), String> {
    let winner_of = |name: &str, i: u32| -> Option<Player> {
        let c = report.component(name)?;
        let copy = format!("copy {i}");
        c.threads
            .iter()
            .find(|(l, _)| *l == copy)
            .or_else(|| c.threads.iter().find(|(l, _)| l == "fresh"))
            .map(|(_, w)| *w)
    };
    let free = report.component("recurrence-free").map(|c| c.winner);
    let Some(bang) = report.component("!-component") else { return Err("no !-component".into()) };
    for (label, w) in &bang.threads {
        let Some(i) = label.strip_prefix("copy ").and_then(|n| n.parse::<u32>().ok()) else { continue };
        if *w != Player::Env || free == Some(Player::Machine) {
            continue;
        }
        if !(1..=i).any(|j| winner_of("?-component", j) == Some(Player::Machine)) {
            return Err(format!("copy {i} of the !-component is lost and nothing before it is won"));
        }
    }
    Ok(())
}

/// Plays one match and records everything about it.
pub fn run_match(cfg: &MatchConfig) -> Result<Trace, ConfigError> {
    cfg.validate()?;
    let f = cfg.formula()?;
    let family = interpretation_family(&f, cfg.seed);
    let mut env = build_env(cfg);
    let mut checks: Vec<LemmaCheck> = Vec::new();
    let mut k_snapshots = Vec::new();
    let mut sp_failures: Option<(usize, Vec<String>)> = None;

    let played = if cfg.machine == "k" {
        let mut k = KWatch::new(K::new(), f.clone(), family.clone(), cfg.drain_cap, cfg.scheme == Scheme::LongProd);
        let played = play(&f, &mut k, env.as_mut(), cfg.rounds, cfg.drain_cap, &mut |_, _| {});
        k_snapshots = k.snapshots().to_vec();
        checks.extend(k.checks(&played.state));
        played
    } else {
        let mut machine = machine_by_name(&cfg.machine, cfg.seed).expect("validated machine name");
        let mut probes = 0usize;
        let mut failures: Vec<String> = Vec::new();
        let sp = cfg.machine == "sp-parallel";
        let played = play(&f, machine.as_mut(), env.as_mut(), cfg.rounds, cfg.drain_cap, &mut |s, m| {
            if !sp {
                return;
            }
            probes += 1;
            let mut fork = m.fork();
            let Some(q) = quiesce(fork.as_mut(), s, cfg.drain_cap) else {
                failures.push(format!("round probe {probes}: no quiescence"));
                return;
            };
            for (name, i) in &family {
                match decompose_verdict(&f, i, q.history()) {
                    Ok(r) => {
                        if let Err(e) = sp_invariant(&r) {
                            failures.push(format!("probe {probes} under {name}: {e}"));
                        }
                    }
                    Err(e) => failures.push(e.to_string()),
                }
            }
        });
        if sp {
            sp_failures = Some((probes, failures));
        }
        played
    };

    checks.push(LemmaCheck::new(
        "legal",
        played.offence.is_none(),
        played.offence.as_ref().map_or("every move legal".to_string(), |o| o.to_string()),
    ));
    if env.drains() {
        checks.push(LemmaCheck::new(
            "quiescent",
            played.quiescent,
            if played.quiescent { "drained" } else { "drain cap exceeded" },
        ));
    }

    let run: Vec<LabeledMove> = played.timed.iter().map(|(_, m)| m.clone()).collect();
    let mut verdicts = Vec::new();
    for (name, i) in &family {
        let r = decompose_verdict(&f, i, &run).expect("family interprets every letter");
        verdicts.push(VerdictRecord { interpretation: name.clone(), report: r });
    }
    if let Some((probes, mut failures)) = sp_failures {
        for v in &verdicts {
            if let Err(e) = sp_invariant(&v.report) {
                failures.push(format!("end of play under {}: {e}", v.interpretation));
            }
        }
        let detail = match failures.first() {
            None => format!("{probes} round probes and the end of play"),
            Some(e) => e.clone(),
        };
        checks.push(LemmaCheck::new("sp invariant", failures.is_empty(), detail));
    }
    if is_winning_strategy(cfg) {
        let lost: Vec<&str> =
            verdicts.iter().filter(|v| v.report.winner != Player::Machine).map(|v| v.interpretation.as_str()).collect();
        let detail = if lost.is_empty() {
            format!("won under all {} interpretations", verdicts.len())
        } else {
            format!("lost under {}", lost.join(", "))
        };
        checks.push(LemmaCheck::new("machine wins", lost.is_empty(), detail));
    }

    let analysis = match (cfg.env.as_str(), Mode::of(cfg.scheme)) {
        ("c", Some(Mode::S4)) | ("d", Some(Mode::S6)) => {
            let mode = Mode::of(cfg.scheme).expect("instance scheme");
            let a = analyze(mode, &f, &played.timed).expect("instance formula");
            if let Some(i) = &a.interpretation {
                let r = decompose_verdict(&f, i, &run).expect("induced interpretation covers the formula");
                verdicts.push(VerdictRecord { interpretation: "induced".to_string(), report: r });
            }
            checks.extend(a.lemmas.checks.iter().cloned());
            Some(a)
        }
        _ => None,
    };

    Ok(Trace {
        config: cfg.clone(),
        formula: crate::formula::render(&f),
        steps: played.steps,
        run: run.iter().map(LabeledMove::to_wire).collect(),
        offence: played.offence,
        quiescent: played.quiescent,
        notes: env.notes(),
        verdicts,
        analysis,
        k_stages: k_snapshots,
        checks,
    })
}

/// Runs independent matches in parallel; results keep the input order.
pub fn run_suite(configs: &[MatchConfig]) -> Vec<Result<Trace, ConfigError>> {
    configs.par_iter().map(run_match).collect()
}

/// The formula a scheme is played on, with letters bound as enumeration
/// letters or, if `elementary`, as `E x. A y. l(x, y)` with `l` the lower
/// case letter.
pub fn scheme_formula(scheme: Scheme, bang: Bang, elementary: bool) -> Result<Formula, ConfigError> {
    let mut letters = std::collections::BTreeMap::new();
    if elementary {
        for l in ["P", "Q", "R"] {
            if scheme.surface().contains(l) {
                letters.insert(l.to_string(), crate::formula::Binding::Elementary(l.to_lowercase()));
            }
        }
    }
    crate::formula::instantiate_scheme(scheme, bang, &letters).map_err(ConfigError::Scheme)
}
