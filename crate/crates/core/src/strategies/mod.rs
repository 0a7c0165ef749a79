//! Machine strategies: copycat networks, the staged strategy K, and a few
//! baselines.

mod branching;
mod k;
mod parallel;
mod simple;
pub mod sync;

pub use branching::BranchingCopycat;
pub use k::{k_expected_layout, KStageLayout, LayoutError, Line, Part, K};
pub use parallel::{lp_parallel_next, lp_parallel_pairs, sp_parallel_next, sp_parallel_pairs, LpParallel, SpParallel};
pub use simple::{open_sites, play_universe, Naive, Open, RandomLegal, Silent};
pub use sync::{copycat_step, network_step, Site, SyncPair};

use crate::arena::{GameState, LabeledMove};

/// A machine strategy. It sees the position and either moves or stays put.
pub trait Machine: Fork {
    fn name(&self) -> &str;
    fn next_move(&mut self, s: &GameState) -> Option<LabeledMove>;
}

/// A copy of a machine in its current state, for probing ahead.
pub trait Fork {
    fn fork(&self) -> Box<dyn Machine>;
}

impl<T: Machine + Clone + 'static> Fork for T {
    fn fork(&self) -> Box<dyn Machine> {
        Box::new(self.clone())
    }
}

/// Names accepted by [`machine_by_name`].
pub const MACHINE_NAMES: &[&str] =
    &["k", "sp-parallel", "lp-parallel", "copycat-prover", "naive", "random-legal", "silent"];

/// Builds a machine from its name. `seed` only matters for `random-legal`.
pub fn machine_by_name(name: &str, seed: u64) -> Option<Box<dyn Machine>> {
    Some(match name {
        "k" => Box::new(K::new()),
        "sp-parallel" => Box::new(SpParallel),
        "lp-parallel" => Box::new(LpParallel),
        "copycat-prover" => Box::new(BranchingCopycat::new()),
        "naive" => Box::new(Naive::default()),
        "random-legal" => Box::new(RandomLegal::new(seed, 64)),
        "silent" => Box::new(Silent),
        _ => return None,
    })
}
