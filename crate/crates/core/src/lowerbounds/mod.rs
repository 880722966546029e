//! Lower-bound formula families and the sequences behind them.
//!
//! Positions carry an `n`-bit address on `b_0 … b_{n-1}` (little-endian).
//! A block runs from an address-0 position to the next address-`2^n − 1`
//! position; its `b_I` bits (resp. `b_O` bits) spell a number whose bit
//! `a` sits at address `a`. Player I must count the addresses and may mark
//! one address with `sharp`; Player O copies a number in every block and
//! marks a claimed bad pair with `left_mark` and `right_mark`.

use serde::Serialize;

use crate::error::{Error, Result, Stage};
use crate::logic::{Formula, Partition};

/// Largest `m` accepted by [`w_sequence`].
pub const MAX_W_INDEX: u32 = 24;
/// Largest `n` accepted by the formula generators.
pub const MAX_GEN_N: usize = 24;

/// A finite sequence over `[0, max]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sequence {
    max: u32,
    entries: Vec<u32>,
}

impl Sequence {
    pub fn new(max: u32, entries: Vec<u32>) -> Result<Self> {
        if let Some(x) = entries.iter().find(|&&x| x > max) {
            return Err(Error::Invalid(format!("entry {x} exceeds the range [0, {max}]")));
        }
        Ok(Sequence { max, entries })
    }

    pub fn max(&self) -> u32 {
        self.max
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Positions `i < i2` with `x_i = x_i2 = j` and everything strictly
/// between them below `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BadPair {
    pub i: usize,
    pub i2: usize,
    pub j: u32,
}

/// `w_0 = 0`, `w_j = w_{j−1} j w_{j−1}`.
pub fn w_sequence(m: u32) -> Result<Sequence> {
    if m > MAX_W_INDEX {
        return Err(Error::Capacity {
            stage: Stage::Generator,
            what: "w-sequence index",
            limit: MAX_W_INDEX as usize,
        });
    }
    let mut w = vec![0u32];
    for j in 1..=m {
        let mut next = Vec::with_capacity(2 * w.len() + 1);
        next.extend_from_slice(&w);
        next.push(j);
        next.extend_from_slice(&w);
        w = next;
    }
    Sequence::new(m, w)
}

/// The bad pair with the smallest right end; the left end is then unique.
pub fn find_bad_pair(s: &[u32]) -> Option<BadPair> {
    // stack of positions whose values strictly decrease
    let mut stack: Vec<usize> = Vec::new();
    for (i2, &x) in s.iter().enumerate() {
        while let Some(&top) = stack.last() {
            if s[top] < x {
                stack.pop();
            } else {
                break;
            }
        }
        if let Some(&i) = stack.last() {
            if s[i] == x {
                return Some(BadPair { i, i2, j: x });
            }
        }
        stack.push(i2);
    }
    None
}

/// A generated condition together with its input/output split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub formula: Formula,
    pub partition: Partition,
}

/// The antecedent and consequent parts of the lookahead family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub psi: [Formula; 6],
}

fn atom(name: &str) -> Formula {
    Formula::atom(name)
}

fn neg(name: &str) -> Formula {
    Formula::neg_atom(name)
}

fn and(items: impl IntoIterator<Item = Formula>) -> Formula {
    Formula::and_all(items).expect("nonempty conjunction")
}

fn or(items: impl IntoIterator<Item = Formula>) -> Formula {
    Formula::or_all(items).expect("nonempty disjunction")
}

fn implies(a: Formula, b: Formula) -> Formula {
    Formula::implies(a, b).expect("prompt-free antecedent")
}

fn iff(a: Formula, b: Formula) -> Formula {
    Formula::iff(a, b).expect("prompt-free operands")
}

fn bit(j: usize) -> String {
    format!("b_{j}")
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    if n > MAX_GEN_N {
        return Err(Error::Capacity {
            stage: Stage::Generator,
            what: "address bits",
            limit: MAX_GEN_N,
        });
    }
    Ok(())
}

/// `(ψ_inc, ψ_0)`: the address increments by one modulo `2^n` from each
/// position to the next, and the addressing starts at zero and always
/// increments.
pub fn addressing_formulas(n: usize) -> Result<(Formula, Formula)> {
    check_n(n)?;
    let mut parts = Vec::with_capacity(n);
    for j in 0..n {
        let b = atom(&bit(j));
        let flip = iff(b.clone(), Formula::next(neg(&bit(j))));
        if j == 0 {
            parts.push(flip);
            continue;
        }
        // bit j flips iff all lower bits are set
        let carry = and((0..j).map(|l| atom(&bit(l))));
        let keep = iff(b, Formula::next(atom(&bit(j))));
        parts.push(and([implies(carry.clone(), flip), or([carry, keep])]));
    }
    let inc = and(parts);
    let zero = and((0..n).map(|j| neg(&bit(j))).chain([Formula::globally(inc.clone())]));
    Ok((inc, zero))
}

/// `ψ_0 … ψ_5` for `n` address bits.
pub fn theorem2_components(n: usize) -> Result<Components> {
    let (_, psi0) = addressing_formulas(n)?;
    let start = and((0..n).map(|j| neg(&bit(j))));
    let last = and((0..n).map(|j| atom(&bit(j))));
    let agree = iff(atom("b_I"), atom("b_O"));
    // from here to the end of the current block, b_I and b_O coincide
    let agree_to_end = Formula::until(agree.clone(), and([last.clone(), agree]));
    // the block starting here has equal numbers, resp. x < y
    let equal_block = agree_to_end.clone();
    let less_block = Formula::until(
        last.negate().expect("LTL"),
        and([neg("b_I"), atom("b_O"), or([last.clone(), Formula::next(agree_to_end)])]),
    );
    let once = |name: &str| {
        and([
            Formula::finally(atom(name)),
            Formula::globally(implies(atom(name), Formula::next(Formula::globally(neg(name))))),
        ])
    };

    let psi1 = Formula::globally(implies(atom("sharp"), Formula::next(Formula::globally(neg("sharp")))));
    let psi2 = and([
        once("left_mark"),
        Formula::globally(implies(atom("left_mark"), and([start.clone(), equal_block.clone()]))),
    ]);
    let psi3 = and([
        once("right_mark"),
        Formula::globally(implies(atom("right_mark"), and([start.clone(), equal_block]))),
        Formula::until(neg("right_mark"), and([atom("left_mark"), neg("right_mark")])),
    ]);
    let psi4 = Formula::globally(implies(
        atom("left_mark"),
        Formula::next(Formula::until(implies(start, less_block), atom("right_mark"))),
    ));
    // positions up to the (single) sharp with the sharp's address
    let same = and(
        [Formula::finally(atom("sharp"))].into_iter().chain(
            (0..n).map(|j| iff(atom(&bit(j)), Formula::finally(and([atom("sharp"), atom(&bit(j))])))),
        ),
    );
    let differ = |first: Formula, second: Formula| {
        Formula::finally(and([same.clone(), first, Formula::finally(and([same.clone(), second]))]))
            .negate()
            .expect("LTL")
    };
    let psi5 = and([differ(atom("b_O"), neg("b_O")), differ(neg("b_O"), atom("b_O"))]);
    Ok(Components {
        psi: [psi0, psi1, psi2, psi3, psi4, psi5],
    })
}

fn theorem_partition(n: usize) -> Partition {
    let inputs: Vec<String> = (0..n).map(bit).chain(["b_I".into(), "sharp".into()]).collect();
    Partition::new(inputs, vec!["b_O".to_string(), "left_mark".into(), "right_mark".into()])
        .expect("generated names are valid")
}

fn assemble(c: Components, extra: Option<Formula>) -> Formula {
    let [psi0, psi1, psi2, psi3, psi4, psi5] = c.psi;
    let consequent = and([psi2, psi3, psi4, psi5].into_iter().chain(extra));
    implies(and([psi0, psi1]), consequent)
}

/// `φ_n = (ψ_0 ∧ ψ_1) → (ψ_2 ∧ ψ_3 ∧ ψ_4 ∧ ψ_5)`: O needs lookahead
/// triply exponential in `n`.
pub fn gen_theorem2(n: usize) -> Result<Generated> {
    let c = theorem2_components(n)?;
    Ok(Generated {
        formula: assemble(c, None),
        partition: theorem_partition(n),
    })
}

/// `φ_n` with the extra conjunct `FP right_mark`.
pub fn gen_theorem3(n: usize) -> Result<Generated> {
    let c = theorem2_components(n)?;
    Ok(Generated {
        formula: assemble(c, Some(Formula::prompt(atom("right_mark")))),
        partition: theorem_partition(n),
    })
}
