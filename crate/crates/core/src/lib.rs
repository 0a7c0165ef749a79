//! Games for computability-logic formulas with parallel and branching
//! recurrence: an arena that plays them, an adjudicator for finite runs, the
//! machine strategies and environment counterstrategies that separate the
//! three recurrences, and the chain analysis that backs the separations.

pub mod formula;
pub mod arena;
pub mod adjudicator;
pub mod strategies;
pub mod counter;
pub mod analysis;
pub mod harness;
