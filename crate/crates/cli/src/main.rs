use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use recurrence::arena::Bits;
use recurrence::formula::{parse_formula, render, to_nnf, Bang, Scheme};
use recurrence::harness::{experiment_validity_table, replay_jsonl, run_match, MatchConfig, TableConfig};
use recurrence::strategies::k_expected_layout;

#[derive(Parser)]
#[command(name = "arena", about = "Play recurrence games between machine and environment strategies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one match and write its trace.
    Run(RunArgs),
    /// Run the suites behind every cell of the validity table.
    Table {
        /// TOML table config; defaults apply to missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write every trace into this directory.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Print K's layout after a sequence of !-component splits.
    Layout {
        /// Comma-separated split threads; `e` or `ε` for the root.
        #[arg(long, default_value = "")]
        splits: String,
    },
    /// Print the negation normal form of a formula.
    Nnf { formula: String },
    /// Replay a trace file and check every digest.
    Replay { trace: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// TOML match config; command line flags are ignored when given.
    #[arg(long, conflicts_with_all = ["scheme", "bang", "machine", "env"])]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    scheme: Option<Scheme>,
    #[arg(long, required_unless_present = "config")]
    bang: Option<Bang>,
    #[arg(long, required_unless_present = "config")]
    machine: Option<String>,
    #[arg(long, required_unless_present = "config")]
    env: Option<String>,
    #[arg(long, default_value_t = 20)]
    rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bind the scheme letters to elementary `E x. A y. l(x, y)`.
    #[arg(long)]
    elementary: bool,
    #[arg(long)]
    drain_cap: Option<usize>,
    /// Largest constant the random environment plays.
    #[arg(long)]
    universe_cap: Option<u64>,
    /// Split schedule for the schedule environment, as `step:thread,...`.
    #[arg(long)]
    schedule: Option<String>,
    /// Trace file; the config's `out` when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn bits(s: &str) -> Result<Bits> {
    let s = s.trim();
    let s = if s == "e" || s == "ε" { "" } else { s };
    s.parse().map_err(anyhow::Error::msg)
}

fn split_list(s: &str) -> Result<Vec<Bits>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(bits).collect()
}

fn schedule(s: &str) -> Result<Vec<(usize, Bits)>> {
    s.split(',')
        .map(|item| {
            let (step, w) = item.split_once(':').with_context(|| format!("`{item}` is not step:thread"))?;
            Ok((step.trim().parse().with_context(|| format!("bad step in `{item}`"))?, bits(w)?))
        })
        .collect()
}

fn match_config(a: &RunArgs) -> Result<MatchConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => {
            let (Some(scheme), Some(bang), Some(machine), Some(env)) = (a.scheme, a.bang, &a.machine, &a.env) else {
                bail!("--scheme, --bang, --machine and --env are required");
            };
            let mut cfg = MatchConfig::new(scheme, bang, machine, env, a.rounds, a.seed).elementary(a.elementary);
            if let Some(c) = a.drain_cap {
                cfg.drain_cap = c;
            }
            if let Some(u) = a.universe_cap {
                cfg.universe_cap = u;
            }
            if let Some(s) = &a.schedule {
                cfg = cfg.with_schedule(schedule(s)?);
            }
            cfg
        }
    };
    if a.out.is_some() {
        cfg.out = a.out.clone();
    }
    Ok(cfg)
}

fn run(a: &RunArgs) -> Result<bool> {
    let cfg = match_config(a)?;
    let trace = run_match(&cfg)?;
    if let Some(out) = &cfg.out {
        std::fs::write(out, trace.to_jsonl()).with_context(|| format!("writing {}", out.display()))?;
    }
    println!("formula  {}", trace.formula);
    println!("moves    {}", trace.run.len());
    if let Some(o) = &trace.offence {
        println!("offence  {o}");
    }
    for v in &trace.verdicts {
        println!("verdict  {:<18} {}", v.interpretation, v.report.winner);
    }
    for n in &trace.notes {
        println!("note     {n}");
    }
    for c in &trace.checks {
        println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    Ok(trace.passed())
}

fn table(config: Option<&PathBuf>, trace_dir: Option<PathBuf>) -> Result<bool> {
    let mut t: TableConfig = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => TableConfig::default(),
    };
    if trace_dir.is_some() {
        t.trace_dir = trace_dir;
    }
    let report = experiment_validity_table(&t)?;
    print!("{report}");
    Ok(report.matches_pattern())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(&a),
        Command::Table { config, trace_dir } => table(config.as_ref(), trace_dir),
        Command::Layout { splits } => split_list(&splits).and_then(|s| {
            print!("{}", k_expected_layout(&s)?.render());
            Ok(true)
        }),
        Command::Nnf { formula } => parse_formula(&formula).map_err(Into::into).map(|f| {
            println!("{}", render(&to_nnf(&f)));
            true
        }),
        Command::Replay { trace } => std::fs::read_to_string(&trace)
            .with_context(|| format!("reading {}", trace.display()))
            .and_then(|text| Ok(replay_jsonl(&text)?))
            .map(|s| {
                println!("{} moves replayed, digest {}", s.history().len(), s.digest());
                true
            }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
