//! Büchi and parity automata over explicit letters: LTL translation,
//! determinization, lasso acceptance and a JSON file format.

pub mod determinize;
pub mod dfa;
pub mod dpa;
pub mod format;
pub mod nba;
pub mod translate;

pub use determinize::{determinize, determinize_capped, DEFAULT_DPA_CAP};
pub use dfa::Dfa;
pub use dpa::Dpa;
pub use format::{read_automaton, write_automaton, Automaton};
pub use nba::Nba;
pub use translate::{ltl_to_nba, ltl_to_nba_capped, DEFAULT_NBA_CAP};
