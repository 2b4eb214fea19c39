//! Readability scoring and reading-ease evaluation.
//!
//! The crate loads a parallel original/simplified corpus, scores each text
//! unit with readability formulas and word-level measures, turns eye-tracking
//! fixation reports into reading-ease measures, and correlates the
//! original-minus-simplified differences of both.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod eye;
pub mod formulas;
pub mod measures;
pub mod registry;
pub mod scoring;
pub mod stats;

pub use corpus::{Corpus, Granularity, Level, ParallelPair, TextUnit, Token};
pub use error::{Error, Result};
