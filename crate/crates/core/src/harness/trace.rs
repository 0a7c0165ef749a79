use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use super::{ConfigError, KSnapshot, MatchConfig, PlayOffence, StepRecord};
use crate::adjudicator::VerdictReport;
use crate::analysis::{Analysis, LemmaCheck};
use crate::arena::{GameState, LabeledMove};

/// A verdict under one named interpretation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictRecord {
    pub interpretation: String,
    pub report: VerdictReport,
}

/// The full record of a match.
#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    pub config: MatchConfig,
    pub formula: String,
    pub steps: Vec<StepRecord>,
    /// The final run in wire format.
    pub run: Vec<String>,
    pub offence: Option<PlayOffence>,
    pub quiescent: bool,
    pub notes: Vec<String>,
    pub verdicts: Vec<VerdictRecord>,
    pub analysis: Option<Analysis>,
    /// K's layout after every stage transition, when K played.
    pub k_stages: Vec<KSnapshot>,
    /// Assertions made about the match.
    pub checks: Vec<LemmaCheck>,
}

impl Trace {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&LemmaCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn verdict(&self, interpretation: &str) -> Option<&VerdictReport> {
        self.verdicts.iter().find(|v| v.interpretation == interpretation).map(|v| &v.report)
    }

    /// Line-delimited JSON: the config, then one record per move, per step
    /// digest, per verdict component, per analysis artifact and per check,
    /// and a closing summary.
    pub fn to_jsonl(&self) -> String {
        let mut lines: Vec<Value> = vec![json!({ "kind": "config", "config": self.config, "formula": self.formula })];
        for (i, st) in self.steps.iter().enumerate() {
            let step = st.phase.step();
            for w in &st.env {
                lines.push(json!({ "kind": "move", "step": step, "wire": w }));
            }
            if let Some(w) = &st.machine {
                lines.push(json!({ "kind": "move", "step": step, "wire": w }));
            }
            lines.push(json!({ "kind": "digest", "record": i, "phase": st.phase, "digest": st.digest }));
        }
        lines.push(json!({ "kind": "outcome", "moves": self.run.len(), "offence": self.offence, "quiescent": self.quiescent }));
        for n in &self.notes {
            lines.push(json!({ "kind": "note", "text": n }));
        }
        for v in &self.verdicts {
            lines.push(json!({
                "kind": "verdict", "interpretation": v.interpretation, "component": "overall",
                "winner": v.report.winner, "illegal": v.report.illegal,
            }));
            for c in &v.report.components {
                lines.push(json!({
                    "kind": "verdict", "interpretation": v.interpretation, "component": c.name,
                    "winner": c.winner, "threads": c.threads,
                }));
            }
        }
        if let Some(a) = &self.analysis {
            for l in &a.literals {
                lines.push(json!({ "kind": "literal", "mode": a.mode, "text": l }));
            }
            for c in &a.chains {
                lines.push(json!({ "kind": "chain", "mode": a.mode, "text": c }));
            }
            lines.push(json!({ "kind": "interpretation", "mode": a.mode, "value": a.interpretation, "error": a.error }));
        }
        for k in &self.k_stages {
            lines.push(json!({ "kind": "k-stage", "stage": k }));
        }
        for c in &self.checks {
            lines.push(json!({ "kind": "check", "name": c.name, "passed": c.passed, "detail": c.detail }));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        lines.push(json!({ "kind": "summary", "passed": failed == 0, "checks": self.checks.len(), "failed": failed }));
        let mut out = String::new();
        for l in lines {
            out.push_str(&serde_json::to_string(&l).expect("plain data"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("step record {record}: digest {found} where the trace has {recorded}")]
    Digest { record: usize, recorded: String, found: String },
    #[error("move {wire} rejected on replay ({rule}) but not recorded as illegal")]
    Rejected { wire: String, rule: String },
}

fn apply_wire(s: &mut GameState, wire: &str, offence: Option<&str>) -> Result<(), ReplayError> {
    let m = LabeledMove::parse_wire(s.formula(), wire)
        .map_err(|e| ReplayError::Format { line: 0, msg: format!("{wire}: {e}") })?;
    match s.apply(&m) {
        Ok(()) => Ok(()),
        Err(_) if offence == Some(wire) => Ok(()),
        Err(e) => Err(ReplayError::Rejected { wire: wire.to_string(), rule: e.rule.to_string() }),
    }
}

/// Replays the recorded moves through the arena and compares every step's
/// digest. Returns the final position.
pub fn check_replay(trace: &Trace) -> Result<GameState, ReplayError> {
    let f = trace.config.formula()?;
    let mut s = GameState::new(&f).map_err(|e| ReplayError::Format { line: 0, msg: e.to_string() })?;
    let offence = trace.offence.as_ref().map(|o| o.wire.as_str());
    for (record, st) in trace.steps.iter().enumerate() {
        for w in st.env.iter().chain(st.machine.iter()) {
            apply_wire(&mut s, w, offence)?;
        }
        let found = s.digest();
        if found != st.digest {
            return Err(ReplayError::Digest { record, recorded: st.digest.clone(), found });
        }
    }
    Ok(s)
}

/// The same check on a trace file: moves are applied in order and each
/// digest record is compared with the position reached.
pub fn replay_jsonl(text: &str) -> Result<GameState, ReplayError> {
    let mut state: Option<GameState> = None;
    let mut offence: Option<String> = None;
    let mut pending: Vec<String> = Vec::new();
    let mut records: Vec<Value> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let v: Value =
            serde_json::from_str(line).map_err(|e| ReplayError::Format { line: i + 1, msg: e.to_string() })?;
        if v["kind"] == "outcome" {
            offence = v["offence"]["wire"].as_str().map(str::to_string);
        }
        records.push(v);
    }
    for (i, v) in records.iter().enumerate() {
        let fail = |msg: &str| ReplayError::Format { line: i + 1, msg: msg.to_string() };
        match v["kind"].as_str() {
            Some("config") => {
                let cfg: MatchConfig =
                    serde_json::from_value(v["config"].clone()).map_err(|e| fail(&e.to_string()))?;
                let f = cfg.formula()?;
                state = Some(GameState::new(&f).map_err(|e| fail(&e.to_string()))?);
            }
            Some("move") => pending.push(v["wire"].as_str().ok_or_else(|| fail("move without wire"))?.to_string()),
            Some("digest") => {
                let s = state.as_mut().ok_or_else(|| fail("digest before config"))?;
                for w in pending.drain(..) {
                    apply_wire(s, &w, offence.as_deref())?;
                }
                let recorded = v["digest"].as_str().ok_or_else(|| fail("digest without value"))?;
                if s.digest() != recorded {
                    return Err(ReplayError::Digest {
                        record: v["record"].as_u64().unwrap_or(0) as usize,
                        recorded: recorded.to_string(),
                        found: s.digest(),
                    });
                }
            }
            _ => {}
        }
    }
    state.ok_or(ReplayError::Format { line: 1, msg: "no config record".into() })
}
