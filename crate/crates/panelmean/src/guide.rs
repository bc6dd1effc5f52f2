//! The narrative guide, compiled from `book/src` so that every code snippet
//! in the book runs under `cargo test --doc`.
//!
//! Read the rendered book with `mdbook serve book/` or browse the chapters
//! here; module order follows the book's table of contents.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/score-data.md")]
pub mod score_data {}

#[doc = include_str!("../../../book/src/variance-model.md")]
pub mod variance_model {}

#[doc = include_str!("../../../book/src/estimation.md")]
pub mod estimation {}

#[doc = include_str!("../../../book/src/strategies.md")]
pub mod strategies {}

#[doc = include_str!("../../../book/src/assignment-plans.md")]
pub mod assignment_plans {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
