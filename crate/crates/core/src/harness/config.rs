use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::scheme_formula;
use crate::arena::Bits;
use crate::counter::ENV_NAMES;
use crate::formula::{Bang, Formula, Scheme, SchemeError};
use crate::strategies::MACHINE_NAMES;

/// Everything that determines a match. Two runs of the same config produce
/// the same trace, byte for byte.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchConfig {
    pub scheme: Scheme,
    pub bang: Bang,
    pub machine: String,
    pub env: String,
    pub rounds: usize,
    #[serde(default)]
    pub seed: u64,
    /// Machine moves allowed after the last round before giving up on
    /// quiescence.
    #[serde(default = "default_drain_cap")]
    pub drain_cap: usize,
    /// Bind the scheme letters as `E x. A y. l(x, y)` instead of
    /// enumeration letters. Only for the two production schemes.
    #[serde(default)]
    pub elementary: bool,
    /// Constants `1..=universe_cap` are always on offer to the random
    /// environment, plus one fresh constant.
    #[serde(default = "default_universe_cap")]
    pub universe_cap: u64,
    /// Copies of a parallel recurrence the random environment can address.
    #[serde(default = "default_copy_cap")]
    pub copy_cap: u32,
    /// Splits of the !-component for the `schedule` environment, as
    /// `(step, thread)`. Drawn from the seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<(usize, Bits)>>,
    #[serde(default = "default_max_splits")]
    pub max_splits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_drain_cap() -> usize {
    5000
}

fn default_universe_cap() -> u64 {
    3
}

fn default_copy_cap() -> u32 {
    3
}

fn default_max_splits() -> usize {
    6
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("the round budget must be at least 1")]
    NoRounds,
    #[error("unknown machine `{0}`; known: {known}", known = MACHINE_NAMES.join(", "))]
    UnknownMachine(String),
    #[error("unknown environment `{0}`; known: {known}, schedule", known = ENV_NAMES.join(", "))]
    UnknownEnv(String),
    #[error("`{who}` does not play {scheme} under the {bang} recurrence")]
    Incompatible { who: String, scheme: Scheme, bang: &'static str },
    #[error("elementary letters only apply to the short and long schemes")]
    ElementaryInstance,
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

impl MatchConfig {
    pub fn new(scheme: Scheme, bang: Bang, machine: &str, env: &str, rounds: usize, seed: u64) -> Self {
        MatchConfig {
            scheme,
            bang,
            machine: machine.to_string(),
            env: env.to_string(),
            rounds,
            seed,
            drain_cap: default_drain_cap(),
            elementary: false,
            universe_cap: default_universe_cap(),
            copy_cap: default_copy_cap(),
            schedule: None,
            max_splits: default_max_splits(),
            out: None,
        }
    }

    pub fn elementary(mut self, yes: bool) -> Self {
        self.elementary = yes;
        self
    }

    pub fn with_schedule(mut self, schedule: Vec<(usize, Bits)>) -> Self {
        self.schedule = Some(schedule);
        self
    }

    /// Operand index of the top-level recurrence.
    pub fn bang_component(&self) -> u32 {
        match self.scheme {
            Scheme::ShortProd | Scheme::S4 => 3,
            Scheme::LongProd | Scheme::S6 => 4,
        }
    }

    pub fn formula(&self) -> Result<Formula, ConfigError> {
        scheme_formula(self.scheme, self.bang, self.elementary)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        use Scheme::*;
        if self.rounds == 0 {
            return Err(ConfigError::NoRounds);
        }
        if !MACHINE_NAMES.contains(&self.machine.as_str()) {
            return Err(ConfigError::UnknownMachine(self.machine.clone()));
        }
        if !ENV_NAMES.contains(&self.env.as_str()) && self.env != "schedule" {
            return Err(ConfigError::UnknownEnv(self.env.clone()));
        }
        if self.elementary && matches!(self.scheme, S4 | S6) {
            return Err(ConfigError::ElementaryInstance);
        }
        let branching = self.bang != Bang::Parallel;
        let short = matches!(self.scheme, ShortProd | S4);
        let machine_ok = match self.machine.as_str() {
            "sp-parallel" => self.scheme == ShortProd && !branching,
            "lp-parallel" => self.scheme == LongProd && !branching,
            "k" => !short && branching,
            "copycat-prover" => short && branching,
            _ => true,
        };
        let env_ok = match self.env.as_str() {
            "c" => self.scheme == S4,
            "d" => self.scheme == S6,
            "schedule" => branching,
            _ => true,
        };
        for (ok, who) in [(machine_ok, &self.machine), (env_ok, &self.env)] {
            if !ok {
                return Err(ConfigError::Incompatible { who: who.clone(), scheme: self.scheme, bang: self.bang.name() });
            }
        }
        self.formula().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_defaults() {
        let c: MatchConfig =
            toml::from_str("scheme = \"s4\"\nbang = \"aleph0\"\nmachine = \"naive\"\nenv = \"c\"\nrounds = 20\nseed = 7\n")
                .unwrap();
        assert_eq!(c, MatchConfig::new(Scheme::S4, Bang::Aleph0, "naive", "c", 20, 7));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn incompatible_pairs() {
        let bad = [
            MatchConfig::new(Scheme::S4, Bang::Aleph0, "sp-parallel", "c", 5, 0),
            MatchConfig::new(Scheme::ShortProd, Bang::Parallel, "naive", "d", 5, 0),
            MatchConfig::new(Scheme::ShortProd, Bang::Parallel, "naive", "schedule", 5, 0),
            MatchConfig::new(Scheme::S6, Bang::Parallel, "naive", "d", 5, 0),
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
        assert_eq!(MatchConfig::new(Scheme::S4, Bang::Aleph0, "naive", "c", 0, 0).validate(), Err(ConfigError::NoRounds));
    }
}
