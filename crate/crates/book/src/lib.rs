//! The guide in `book/`, with every Rust snippet run as a doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/formulas.md")]
pub mod formulas {}

#[doc = include_str!("../../../book/src/arena.md")]
pub mod arena {}

#[doc = include_str!("../../../book/src/adjudication.md")]
pub mod adjudication {}

#[doc = include_str!("../../../book/src/strategies.md")]
pub mod strategies {}

#[doc = include_str!("../../../book/src/counterstrategies.md")]
pub mod counterstrategies {}

#[doc = include_str!("../../../book/src/harness.md")]
pub mod harness {}
