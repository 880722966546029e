//! Delay strategies: extraction from the abstraction game, the prompt
//! bound, exhaustive verification and the end-to-end decision procedure.

mod decide;
mod mealy;
mod verify;

pub use decide::{decide, decide_automaton, decide_with, Budgets, Sizes, Solved, Verdict};
pub use mealy::{extract, MealyState, MealyStrategy, MealyTable, MealyTransition};
pub use verify::{verify, verify_capped, Counterexample, VerificationReport, DEFAULT_VERIFY_BUDGET};

use crate::error::{Error, Result, Stage};
use crate::tracking::Abstraction;

/// `k = 2 (B + 1) d` with B the number of behaviors of the abstraction.
/// Checks the general ceiling `k ≤ 2^(2n² + 2)` for n tracking states.
pub fn compute_bound(abstraction: &Abstraction, d: usize) -> Result<usize> {
    let b = abstraction.behavior_count();
    let k = (b + 1)
        .checked_mul(2 * d)
        .ok_or(Error::Capacity {
            stage: Stage::Extraction,
            what: "prompt bound",
            limit: usize::MAX,
        })?;
    let n = abstraction.tracking().len() as u128;
    let exponent = 2 * n * n + 2;
    if exponent < 127 && k as u128 > 1u128 << exponent {
        return Err(Error::internal(
            Stage::Extraction,
            format!("bound {k} exceeds 2^{exponent}"),
        ));
    }
    Ok(k)
}
