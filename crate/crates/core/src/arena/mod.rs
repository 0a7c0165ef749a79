//! Move addressing, legality and state evolution.
//!
//! A move is a player label and an address: operand and copy indices,
//! thread names of branching recurrences, and a constant or a replication as
//! payload. [`GameState`] checks moves incrementally; [`legal_moves_oracle`]
//! recomputes the legal moves from the run alone.

mod bittree;
mod moves;
mod oracle;
mod project;
mod state;

pub use bittree::BitTree;
pub use moves::{Bits, LabeledMove, Player, Run, Segment, WireError};
pub use oracle::{candidate_moves, legal_moves_oracle, Bounds};
pub use project::{formula_at, project_thread, NotBranching, ThreadName};
pub use state::{new_game, GameError, GameState, IllegalMove, NodeState, Resolution, Rule};
