use super::alphabet::COLOR_PROP;
use super::formula::Formula;

/// Linear size bound: `|rel(φ)| ≤ REL_SIZE_FACTOR · |φ|`.
///
/// Each prompt-eventually is replaced by seven fresh subformulas around the
/// relativized argument, and the outer conjunction adds ten more (the two
/// color literals, `F`/`GF` of each, two conjunctions), so
/// `|rel(φ)| ≤ |φ| + 6·|φ| + 8 ≤ 15·|φ|`.
pub const REL_SIZE_FACTOR: usize = 15;

fn color() -> Formula {
    Formula::atom(COLOR_PROP)
}

fn not_color() -> Formula {
    Formula::neg_atom(COLOR_PROP)
}

/// `(p → (p U (¬p U ψ))) ∧ (¬p → (¬p U (p U ψ)))`: `ψ` must hold before
/// the second change point from now.
pub fn within_one_change(psi: Formula) -> Formula {
    let from_p = Formula::or(
        not_color(),
        Formula::until(color(), Formula::until(not_color(), psi.clone())),
    );
    let from_not_p = Formula::or(color(), Formula::until(not_color(), Formula::until(color(), psi)));
    Formula::and(from_p, from_not_p)
}

/// Replaces every prompt-eventually bottom-up; the identity on LTL formulas.
pub fn relativize_inner(formula: &Formula) -> Formula {
    formula.map_bottom_up(&mut |f| match f {
        Formula::PromptFinally(psi) => within_one_change(*psi),
        other => other,
    })
}

/// `rel(φ) = rel'(φ) ∧ G F p ∧ G F ¬p`.
pub fn relativize(formula: &Formula) -> Formula {
    Formula::and(
        Formula::and(relativize_inner(formula), Formula::globally(Formula::finally(color()))),
        Formula::globally(Formula::finally(not_color())),
    )
}
