//! Runs the snippets in `book/src` as doc-tests.
//!
//! mdbook cannot link the workspace crates into its own test runs, so every
//! chapter is pulled in here as a module doc and `cargo test --doc` does the
//! work. One module per chapter keeps failures traceable to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}
#[doc = include_str!("../../../book/src/spectral.md")]
pub mod spectral {}
#[doc = include_str!("../../../book/src/systems.md")]
pub mod systems {}
#[doc = include_str!("../../../book/src/network.md")]
pub mod network {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/audits.md")]
pub mod audits {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
