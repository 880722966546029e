//! Solver for delay games whose winning conditions are LTL or Prompt-LTL
//! formulas.
//!
//! The pipeline relativizes a Prompt-LTL condition with the
//! alternating-color technique, translates it to a deterministic parity
//! automaton, abstracts input blocks into behaviors of a tracking
//! automaton, solves the resulting parity game, and turns Player O's
//! positional strategy into a block-wise delay strategy that is then
//! verified exhaustively. A brute-force oracle with an explicit lookahead
//! buffer cross-checks small instances.

pub mod arena;
pub mod automata;
pub mod bitset;
pub mod error;
pub mod graph;
pub mod logic;
pub mod lowerbounds;
pub mod oracle;
pub mod strategy;
pub mod tracking;

pub use error::{Error, Result, Stage};
