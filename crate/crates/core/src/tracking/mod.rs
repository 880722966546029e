//! Tracking automaton and the block abstraction.
//!
//! The tracking automaton extends a parity automaton over inputs, outputs
//! and the coloring proposition with the maximal color seen since the last
//! reset and a flag recording whether the coloring changed. Input blocks
//! are abstracted into behaviors: for each tracking state of a domain, the
//! set of tracking states reachable from its reset copy under some choice
//! of outputs.

pub mod abstraction;
pub mod automaton;

pub use abstraction::{behavior, Abstraction, Behavior, BehaviorDfa, Domain, DEFAULT_BUDGET};
pub use automaton::{upd, ColorFlag, Tracking, TrackingState};
