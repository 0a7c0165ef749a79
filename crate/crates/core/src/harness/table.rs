use std::fmt;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{run_suite, MatchConfig, Trace};
use crate::arena::Player;
use crate::formula::{Bang, Scheme};

/// A cell of the validity table: a production principle under one of the
/// three recurrences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Cell {
    pub long: bool,
    pub bang: Bang,
}

impl Cell {
    pub const ALL: [Cell; 6] = [
        Cell { long: false, bang: Bang::Parallel },
        Cell { long: false, bang: Bang::Aleph0 },
        Cell { long: false, bang: Bang::Uncountable },
        Cell { long: true, bang: Bang::Parallel },
        Cell { long: true, bang: Bang::Aleph0 },
        Cell { long: true, bang: Bang::Uncountable },
    ];

    pub fn row(self) -> &'static str {
        if self.long {
            "long"
        } else {
            "short"
        }
    }

    /// The pattern of the table: only branching recurrence under short
    /// production, and uncountable branching recurrence under long
    /// production, fail.
    pub fn valid(self) -> bool {
        match self.bang {
            Bang::Parallel => true,
            Bang::Aleph0 => self.long,
            Bang::Uncountable => false,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.row(), self.bang.name())
    }
}

impl std::str::FromStr for Cell {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (row, bang) = s.split_once('/').ok_or_else(|| format!("`{s}` is not row/recurrence"))?;
        let long = match row {
            "short" => false,
            "long" => true,
            _ => return Err(format!("unknown row `{row}`")),
        };
        Ok(Cell { long, bang: bang.parse()? })
    }
}

impl TryFrom<String> for Cell {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Cell> for String {
    fn from(c: Cell) -> String {
        c.to_string()
    }
}

/// Sizes of the suites behind each cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TableConfig {
    pub seed: u64,
    /// Fuzzed matches per parallel-recurrence cell.
    pub fuzz_matches: usize,
    /// Round budgets of fuzzed matches are drawn from `1..=max_rounds`.
    pub max_rounds: usize,
    /// Random split schedules played against K.
    pub k_schedules: usize,
    pub k_rounds: usize,
    /// Seeds per suite machine against C and D.
    pub counter_seeds: usize,
    pub c_rounds: usize,
    pub d_rounds: usize,
    /// Only these cells; all six when absent.
    pub cells: Option<Vec<Cell>>,
    /// Write every trace here as JSON lines.
    pub trace_dir: Option<PathBuf>,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            seed: 7,
            fuzz_matches: 24,
            max_rounds: 60,
            k_schedules: 12,
            k_rounds: 120,
            counter_seeds: 2,
            c_rounds: 20,
            d_rounds: 8,
            cells: None,
            trace_dir: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellVerdict {
    Valid,
    Invalid,
    /// Some run did not back the expected verdict.
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub cell: Cell,
    pub verdict: CellVerdict,
    pub evidence: String,
    pub runs: usize,
    pub failed: Vec<String>,
    /// Trace files, or match descriptions when no directory was given.
    pub traces: Vec<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub cells: Vec<CellReport>,
}

impl TableReport {
    /// Every cell produced the verdict of the table, backed by its runs.
    pub fn matches_pattern(&self) -> bool {
        self.cells.iter().all(|c| {
            let want = if c.cell.valid() { CellVerdict::Valid } else { CellVerdict::Invalid };
            c.verdict == want
        })
    }

    pub fn get(&self, cell: Cell) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.cell == cell)
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |long: bool, bang: Bang| {
            self.get(Cell { long, bang }).map_or("-", |c| match c.verdict {
                CellVerdict::Valid => "valid",
                CellVerdict::Invalid => "invalid",
                CellVerdict::Failed => "FAILED",
            })
        };
        writeln!(f, "{:<8}{:<12}{:<12}{:<12}", "", "!p", "!c", "!u")?;
        for long in [false, true] {
            let row = if long { "long" } else { "short" };
            writeln!(
                f,
                "{:<8}{:<12}{:<12}{:<12}",
                row,
                mark(long, Bang::Parallel),
                mark(long, Bang::Aleph0),
                mark(long, Bang::Uncountable)
            )?;
        }
        for c in &self.cells {
            writeln!(f)?;
            writeln!(f, "{}: {:?}, {} runs", c.cell, c.verdict, c.runs)?;
            writeln!(f, "  evidence: {}", c.evidence)?;
            if let Some(n) = &c.note {
                writeln!(f, "  note: {n}")?;
            }
            for e in &c.failed {
                writeln!(f, "  failed: {e}")?;
            }
        }
        Ok(())
    }
}

/// Machines C and D are run against.
pub const SHORT_SUITE: &[&str] = &["naive", "random-legal", "copycat-prover"];
pub const LONG_SUITE: &[&str] = &["naive", "random-legal", "k"];

/// The matches behind a cell and what they are evidence of.
pub fn cell_configs(cell: Cell, t: &TableConfig) -> (Vec<MatchConfig>, String, Option<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(t.seed ^ (cell.long as u64) << 8 ^ cell.bang as u64);
    match (cell.long, cell.bang) {
        (long, Bang::Parallel) => {
            let (scheme, machine) = if long { (Scheme::LongProd, "lp-parallel") } else { (Scheme::ShortProd, "sp-parallel") };
            let configs = (0..t.fuzz_matches)
                .map(|i| {
                    let rounds = rng.gen_range(1..=t.max_rounds.max(1));
                    MatchConfig::new(scheme, Bang::Parallel, machine, "random", rounds, t.seed + i as u64)
                        .elementary(i % 2 == 1)
                })
                .collect();
            (configs, format!("{machine} won every fuzzed match under every test interpretation"), None)
        }
        (false, bang) => {
            let configs = SHORT_SUITE
                .iter()
                .flat_map(|m| (0..t.counter_seeds).map(move |i| (m, i)))
                .map(|(m, i)| MatchConfig::new(Scheme::S4, bang, m, "c", t.c_rounds, t.seed + i as u64))
                .collect();
            (configs, "C defeated every machine in the suite under its induced interpretation".to_string(), None)
        }
        (true, Bang::Aleph0) => {
            let configs = (0..t.k_schedules)
                .map(|i| MatchConfig::new(Scheme::LongProd, Bang::Aleph0, "k", "schedule", t.k_rounds, t.seed + i as u64))
                .collect();
            (configs, "K won every match against random split schedules, stage layouts and line rescue checked".to_string(), None)
        }
        (true, _) => {
            let configs = LONG_SUITE
                .iter()
                .flat_map(|m| (0..t.counter_seeds).map(move |i| (m, i)))
                .map(|(m, i)| MatchConfig::new(Scheme::S6, Bang::Uncountable, m, "d", t.d_rounds, t.seed + i as u64))
                .collect();
            (
                configs,
                "D's lemma suite passed and every machine in the suite lost under the induced interpretation".to_string(),
                Some(
                    "finite shadow: the step from countably many reachable literals to an uncountable set of threads \
                     is not machine-checkable; a finite count comparison stands in for it"
                        .to_string(),
                ),
            )
        }
    }
}

fn describe(c: &MatchConfig) -> String {
    format!("{} vs {} on {}/{}, seed {}, {} rounds", c.machine, c.env, c.scheme, c.bang.name(), c.seed, c.rounds)
}

/// Whether a finished match backs its cell's verdict.
fn backs(cell: Cell, t: &Trace) -> bool {
    if !t.passed() {
        return false;
    }
    if cell.valid() {
        t.verdicts.iter().all(|v| v.report.winner == Player::Machine)
    } else {
        t.verdict("induced").is_some_and(|r| r.winner == Player::Env)
    }
}

/// Runs the suites behind the cells and reports each cell's verdict.
pub fn experiment_validity_table(t: &TableConfig) -> std::io::Result<TableReport> {
    if let Some(dir) = &t.trace_dir {
        std::fs::create_dir_all(dir)?;
    }
    let cells = t.cells.clone().unwrap_or_else(|| Cell::ALL.to_vec());
    let mut out = Vec::new();
    for cell in cells {
        let (configs, evidence, note) = cell_configs(cell, t);
        let traces = run_suite(&configs);
        let mut failed = Vec::new();
        let mut links = Vec::new();
        for (i, (cfg, r)) in configs.iter().zip(&traces).enumerate() {
            match r {
                Err(e) => failed.push(format!("{}: {e}", describe(cfg))),
                Ok(tr) => {
                    if !backs(cell, tr) {
                        let why: Vec<String> = tr.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
                        failed.push(format!("{}: {}", describe(cfg), if why.is_empty() { "verdict".to_string() } else { why.join("; ") }));
                    }
                    match &t.trace_dir {
                        Some(dir) => {
                            let path = dir.join(format!("{}-{}-{i}.jsonl", cell.row(), cell.bang.name()));
                            std::fs::write(&path, tr.to_jsonl())?;
                            links.push(path.display().to_string());
                        }
                        None => links.push(describe(cfg)),
                    }
                }
            }
        }
        let verdict = match (failed.is_empty(), cell.valid()) {
            (false, _) => CellVerdict::Failed,
            (true, true) => CellVerdict::Valid,
            (true, false) => CellVerdict::Invalid,
        };
        out.push(CellReport { cell, verdict, evidence, runs: configs.len(), failed, traces: links, note });
    }
    Ok(TableReport { cells: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_names_round_trip() {
        for c in Cell::ALL {
            assert_eq!(c.to_string().parse::<Cell>(), Ok(c));
        }
        assert!("middle/parallel".parse::<Cell>().is_err());
    }

    #[test]
    fn pattern() {
        let valid: Vec<String> = Cell::ALL.iter().filter(|c| c.valid()).map(|c| c.to_string()).collect();
        assert_eq!(valid, vec!["short/parallel", "long/parallel", "long/aleph0"]);
    }
}
