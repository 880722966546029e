#![allow(dead_code)]

use std::collections::HashMap;

use promptdelay::logic::{parse_formula, Alphabet, Formula, LassoWord, Letter, Partition};
use promptdelay::strategy::{MealyState, MealyStrategy};
use rand::Rng;

/// A hand-written condition over named inputs and outputs.
pub struct Condition {
    pub inputs: &'static [&'static str],
    pub outputs: &'static [&'static str],
    pub text: &'static str,
}

impl Condition {
    pub fn partition(&self) -> Partition {
        Partition::new(self.inputs.iter().copied(), self.outputs.iter().copied()).unwrap()
    }

    pub fn formula(&self) -> Formula {
        parse_formula(self.text, &self.partition()).unwrap()
    }
}

const fn c(inputs: &'static [&'static str], outputs: &'static [&'static str], text: &'static str) -> Condition {
    Condition { inputs, outputs, text }
}

const Q: &[&str] = &["q"];
const QS: &[&str] = &["q", "s"];
const R: &[&str] = &["r"];
const RT: &[&str] = &["r", "t"];

pub const CORPUS: &[Condition] = &[
    c(Q, R, "G (q -> FP r)"),
    c(Q, R, "G F r"),
    c(Q, R, "G (r <-> X q)"),
    c(Q, R, "FP r"),
    c(Q, R, "G FP r"),
    c(Q, R, "G q"),
    c(Q, R, "G (q -> X r)"),
    c(Q, R, "G F q -> G F r"),
    c(Q, R, "F G r"),
    c(Q, R, "FP q"),
    c(Q, R, "G (r <-> q)"),
    c(Q, R, "G (r <-> X X q)"),
    c(Q, R, "G FP q"),
    c(Q, R, "G (q <-> X r)"),
    c(Q, R, "F (q & r)"),
    c(Q, R, "G (q -> F r)"),
    c(Q, R, "F G q"),
    c(Q, R, "G (r U q)"),
    c(Q, R, "G (r <-> F q)"),
    c(Q, R, "G F q -> G FP r"),
    c(QS, R, "G (r <-> (q & s))"),
    c(QS, R, "G (r <-> X (q | s))"),
    c(Q, RT, "G (r <-> X q) & G (t <-> q)"),
    c(Q, RT, "G FP (r & t)"),
    c(QS, R, "G ((q & s) -> FP r)"),
    c(Q, RT, "G (q -> FP (r & !t))"),
    c(QS, R, "G (s -> X X r) & G F q"),
    c(Q, R, "FP r & G (q -> FP !r)"),
    c(Q, R, "G (r -> X X q)"),
    c(QS, RT, "G (r <-> X s) & G (t <-> X q)"),
];

/// Letter over inputs followed by outputs.
pub fn combine(input: Letter, output: Letter, inputs: usize) -> Letter {
    Letter(input.0 | output.0 << inputs)
}

/// Plays `strategy` against the eventually periodic input block sequence
/// `prefix cycle^ω` and returns the combined word as a lasso. Output block
/// `i` answers input block `i`, so the word pairs them position by
/// position.
pub fn play(strategy: &MealyStrategy, prefix: &[Vec<Letter>], cycle: &[Vec<Letter>]) -> LassoWord {
    assert!(!cycle.is_empty());
    let inputs = strategy.abstraction().tracking().inputs();
    let block = |i: usize| {
        if i < prefix.len() {
            &prefix[i]
        } else {
            &cycle[(i - prefix.len()) % cycle.len()]
        }
    };
    let mut state = strategy.initial();
    let mut outputs: Vec<Vec<Letter>> = Vec::new();
    let mut seen: HashMap<(MealyState, usize), usize> = HashMap::new();
    let mut i = 0;
    loop {
        let (next, out) = strategy.step(&state, block(i)).unwrap();
        if let Some(o) = out {
            outputs.push(o);
        }
        state = next;
        if i >= prefix.len() {
            let phase = (i - prefix.len()) % cycle.len();
            if let Some(&j) = seen.get(&(state.clone(), phase)) {
                // the same state before the same future input: the play
                // repeats from block j on
                let letters = |range: std::ops::Range<usize>| -> Vec<Letter> {
                    range
                        .flat_map(|t| {
                            block(t)
                                .iter()
                                .zip(&outputs[t])
                                .map(|(&a, &b)| combine(a, b, inputs))
                                .collect::<Vec<_>>()
                        })
                        .collect()
                };
                return LassoWord::new(letters(0..j), letters(j..i)).unwrap();
            }
            seen.insert((state.clone(), phase), i);
        }
        i += 1;
    }
}

pub fn random_block(rng: &mut impl Rng, letters: u32, d: usize) -> Vec<Letter> {
    (0..d).map(|_| Letter(rng.gen_range(0..letters))).collect()
}

/// Random prompt-LTL formula in negation normal form with at most
/// `budget` nodes over `atoms`.
pub fn random_formula(rng: &mut impl Rng, atoms: &[&str], budget: usize) -> Formula {
    let atom = |rng: &mut dyn rand::RngCore| {
        let a = atoms[rng.gen_range(0..atoms.len())];
        if rng.gen_bool(0.5) {
            Formula::atom(a)
        } else {
            Formula::neg_atom(a)
        }
    };
    if budget <= 1 {
        return atom(rng);
    }
    match rng.gen_range(0..10) {
        0 => atom(rng),
        1 => Formula::next(random_formula(rng, atoms, budget - 1)),
        2 => Formula::finally(random_formula(rng, atoms, budget - 1)),
        3 => Formula::globally(random_formula(rng, atoms, budget - 1)),
        4 | 5 => Formula::prompt(random_formula(rng, atoms, budget - 1)),
        op => {
            if budget < 3 {
                return Formula::prompt(atom(rng));
            }
            let left = rng.gen_range(1..budget - 1);
            let a = random_formula(rng, atoms, left);
            let b = random_formula(rng, atoms, budget - 1 - left);
            match op {
                6 => Formula::and(a, b),
                7 => Formula::or(a, b),
                8 => Formula::until(a, b),
                _ => Formula::release(a, b),
            }
        }
    }
}

pub fn random_lasso(rng: &mut impl Rng, letters: u32, max_prefix: usize, max_cycle: usize) -> LassoWord {
    let u = rng.gen_range(0..=max_prefix);
    let v = rng.gen_range(1..=max_cycle);
    let pick = |rng: &mut dyn rand::RngCore, n| (0..n).map(|_| Letter(rng.gen_range(0..letters))).collect();
    LassoWord::new(pick(rng, u), pick(rng, v)).unwrap()
}

/// All lassos with `|u| ≤ max_prefix` and `1 ≤ |v| ≤ max_cycle`.
pub fn all_lassos(letters: u32, max_prefix: usize, max_cycle: usize) -> Vec<LassoWord> {
    let words = |len: usize| -> Vec<Vec<Letter>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..letters).map(move |l| {
                        let mut w = w.clone();
                        w.push(Letter(l));
                        w
                    })
                })
                .collect();
        }
        out
    };
    let mut out = Vec::new();
    for u in 0..=max_prefix {
        let prefixes = words(u);
        for v in 1..=max_cycle {
            let cycles = words(v);
            for p in &prefixes {
                for c in &cycles {
                    out.push(LassoWord::new(p.clone(), c.clone()).unwrap());
                }
            }
        }
    }
    out
}

/// All words of length `len` over `0..letters`, in lexicographic order.
pub fn all_words(letters: u32, len: usize) -> Vec<Vec<Letter>> {
    let total = (letters as usize).pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut w = vec![Letter(0); len];
            for slot in w.iter_mut().rev() {
                *slot = Letter((code % letters as usize) as u32);
                code /= letters as usize;
            }
            w
        })
        .collect()
}

/// Builds a lasso from per-position proposition lists; `split` is where
/// the loop starts.
pub fn lasso(alphabet: &Alphabet, positions: &[&[&str]], split: usize) -> LassoWord {
    let letters: Vec<_> = positions.iter().map(|names| alphabet.letter(names.iter().copied()).unwrap()).collect();
    LassoWord::new(letters[..split].to_vec(), letters[split..].to_vec()).unwrap()
}

/// n = 1: x = 2 1 0 2 then 0 forever, y = 2 forever, the bad 2-pair
/// marked at blocks 0 and 3 (positions 0 and 6).
pub fn good_trace() -> Vec<Vec<&'static str>> {
    vec![
        vec!["left_mark"],
        vec!["b_0", "b_I", "b_O"],
        vec!["b_I"],
        vec!["b_0", "b_O"],
        vec![],
        vec!["b_0", "b_O"],
        vec!["right_mark"],
        vec!["b_0", "b_I", "b_O"],
        vec![],
        vec!["b_0", "b_O"],
    ]
}

pub fn build(trace: &[Vec<&'static str>]) -> LassoWord {
    let alphabet = promptdelay::lowerbounds::gen_theorem2(1).unwrap().partition.alphabet();
    let refs: Vec<&[&str]> = trace.iter().map(Vec::as_slice).collect();
    lasso(&alphabet, &refs, 8)
}

