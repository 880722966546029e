//! Prompt-LTL syntax and lasso semantics, and the alternating-color
//! relativization.

pub mod alphabet;
pub mod eval;
pub mod formula;
pub mod lasso;
pub mod parser;
pub mod relativize;

pub use alphabet::{Alphabet, Letter, Partition, COLOR_PROP};
pub use eval::{eval, Evaluator};
pub use formula::Formula;
pub use lasso::{change_points, color, is_k_bounded, is_k_spaced, ChangePoints, LassoWord};
pub use parser::{parse_formula, parse_with_atoms};
pub use relativize::{relativize, REL_SIZE_FACTOR};
