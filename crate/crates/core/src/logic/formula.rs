use std::collections::{BTreeSet, HashSet};
use std::fmt;

/// A Prompt-LTL formula in negation-normal form.
///
/// Negation only appears on atoms. `->` and `!` over compound formulas are
/// surface syntax handled by the parser (see [`Formula::negate`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    NegAtom(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Finally(Box<Formula>),
    Globally(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    PromptFinally(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn neg_atom(name: impl Into<String>) -> Self {
        Formula::NegAtom(name.into())
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn next(a: Formula) -> Self {
        Formula::Next(Box::new(a))
    }

    pub fn finally(a: Formula) -> Self {
        Formula::Finally(Box::new(a))
    }

    pub fn globally(a: Formula) -> Self {
        Formula::Globally(Box::new(a))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    pub fn prompt(a: Formula) -> Self {
        Formula::PromptFinally(Box::new(a))
    }

    /// Conjunction of a non-empty list, folded to the left.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Option<Self> {
        items.into_iter().reduce(Formula::and)
    }

    /// Disjunction of a non-empty list, folded to the left.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Option<Self> {
        items.into_iter().reduce(Formula::or)
    }

    /// `a -> b`, defined only for a prompt-free antecedent.
    pub fn implies(a: Formula, b: Formula) -> Option<Self> {
        Some(Formula::or(a.negate()?, b))
    }

    /// `a <-> b` for prompt-free operands.
    pub fn iff(a: Formula, b: Formula) -> Option<Self> {
        let na = a.negate()?;
        let nb = b.negate()?;
        Some(Formula::or(Formula::and(a, b), Formula::and(na, nb)))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => vec![],
            Formula::Next(a) | Formula::Finally(a) | Formula::Globally(a) | Formula::PromptFinally(a) => {
                vec![a]
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) | Formula::Release(a, b) => {
                vec![a, b]
            }
        }
    }

    /// True iff no prompt-eventually occurs.
    pub fn is_ltl(&self) -> bool {
        match self {
            Formula::PromptFinally(_) => false,
            _ => self.children().into_iter().all(Formula::is_ltl),
        }
    }

    /// Negation pushed through the classical dualities. `None` if a
    /// prompt-eventually occurs, since its dual is not in the logic.
    pub fn negate(&self) -> Option<Formula> {
        let neg = |f: &Formula| f.negate();
        Some(match self {
            Formula::Atom(a) => Formula::NegAtom(a.clone()),
            Formula::NegAtom(a) => Formula::Atom(a.clone()),
            Formula::And(a, b) => Formula::or(neg(a)?, neg(b)?),
            Formula::Or(a, b) => Formula::and(neg(a)?, neg(b)?),
            Formula::Next(a) => Formula::next(neg(a)?),
            Formula::Finally(a) => Formula::globally(neg(a)?),
            Formula::Globally(a) => Formula::finally(neg(a)?),
            Formula::Until(a, b) => Formula::release(neg(a)?, neg(b)?),
            Formula::Release(a, b) => Formula::until(neg(a)?, neg(b)?),
            Formula::PromptFinally(_) => return None,
        })
    }

    /// Number of distinct subformulas.
    pub fn size(&self) -> usize {
        let mut seen = HashSet::new();
        self.collect_distinct(&mut seen);
        seen.len()
    }

    fn collect_distinct<'a>(&'a self, seen: &mut HashSet<&'a Formula>) {
        if seen.insert(self) {
            for c in self.children() {
                c.collect_distinct(seen);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::Atom(a) | Formula::NegAtom(a) => {
                    out.insert(a.as_str());
                }
                _ => stack.extend(f.children()),
            }
        }
        out
    }

    /// Rebuilds the formula bottom-up, letting `rewrite` replace any node
    /// after its children have been rebuilt.
    pub fn map_bottom_up(&self, rewrite: &mut impl FnMut(Formula) -> Formula) -> Formula {
        let rebuilt = match self {
            Formula::Atom(_) | Formula::NegAtom(_) => self.clone(),
            Formula::And(a, b) => Formula::and(a.map_bottom_up(rewrite), b.map_bottom_up(rewrite)),
            Formula::Or(a, b) => Formula::or(a.map_bottom_up(rewrite), b.map_bottom_up(rewrite)),
            Formula::Until(a, b) => Formula::until(a.map_bottom_up(rewrite), b.map_bottom_up(rewrite)),
            Formula::Release(a, b) => {
                Formula::release(a.map_bottom_up(rewrite), b.map_bottom_up(rewrite))
            }
            Formula::Next(a) => Formula::next(a.map_bottom_up(rewrite)),
            Formula::Finally(a) => Formula::finally(a.map_bottom_up(rewrite)),
            Formula::Globally(a) => Formula::globally(a.map_bottom_up(rewrite)),
            Formula::PromptFinally(a) => Formula::prompt(a.map_bottom_up(rewrite)),
        };
        rewrite(rebuilt)
    }
}

/// Prints in the surface grammar; binary operators are always parenthesized
/// so the output reparses to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unary = |f: &mut fmt::Formatter<'_>, op: &str, a: &Formula| write!(f, "{op} {a}");
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::NegAtom(a) => write!(f, "!{a}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Until(a, b) => write!(f, "({a} U {b})"),
            Formula::Release(a, b) => write!(f, "({a} R {b})"),
            Formula::Next(a) => unary(f, "X", a),
            Formula::Finally(a) => unary(f, "F", a),
            Formula::Globally(a) => unary(f, "G", a),
            Formula::PromptFinally(a) => unary(f, "FP", a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_counts_distinct_subformulas() {
        // G (q | q): subformulas q, (q | q), G (q | q)
        let q = Formula::atom("q");
        let f = Formula::globally(Formula::or(q.clone(), q));
        assert_eq!(f.size(), 3);
    }

    #[test]
    fn negation_dualities() {
        let f = Formula::until(Formula::atom("a"), Formula::next(Formula::neg_atom("b")));
        let n = f.negate().unwrap();
        assert_eq!(
            n,
            Formula::release(Formula::neg_atom("a"), Formula::next(Formula::atom("b")))
        );
        assert_eq!(n.negate().unwrap(), f);
        assert!(Formula::prompt(Formula::atom("a")).negate().is_none());
    }

    #[test]
    fn ltl_detection() {
        assert!(Formula::globally(Formula::atom("a")).is_ltl());
        assert!(!Formula::globally(Formula::prompt(Formula::atom("a"))).is_ltl());
    }
}
