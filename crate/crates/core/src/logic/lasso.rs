use std::fmt;

use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};

/// An ultimately periodic word `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LassoWord {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl LassoWord {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Invalid("lasso loop must be nonempty".into()));
        }
        Ok(LassoWord { prefix, cycle })
    }

    /// Number of distinct positions, `|u| + |v|`.
    pub fn span(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// Maps any position onto its representative in `0..span()`.
    pub fn fold(&self, i: usize) -> usize {
        let u = self.prefix.len();
        if i < u {
            i
        } else {
            u + (i - u) % self.cycle.len()
        }
    }

    /// Folded successor of a folded position.
    pub fn succ(&self, i: usize) -> usize {
        if i + 1 < self.span() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    pub fn letter(&self, i: usize) -> Letter {
        let i = self.fold(i);
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[i - self.prefix.len()]
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.prefix.iter().chain(&self.cycle).copied()
    }

    /// Whether both lassos denote the same ω-word.
    pub fn same_word(&self, other: &LassoWord) -> bool {
        let horizon = self.prefix.len().max(other.prefix.len())
            + lcm(self.cycle.len(), other.cycle.len());
        (0..horizon).all(|i| self.letter(i) == other.letter(i))
    }

    /// Per-letter map, e.g. projection onto a sub-alphabet.
    pub fn map(&self, mut f: impl FnMut(Letter) -> Letter) -> LassoWord {
        LassoWord {
            prefix: self.prefix.iter().map(|&l| f(l)).collect(),
            cycle: self.cycle.iter().map(|&l| f(l)).collect(),
        }
    }

    /// Parses `{a,b} {} ({c} {a})`: prefix letters, then the loop in
    /// parentheses.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<LassoWord> {
        let err = |pos: usize, msg: &str| Error::Parse {
            pos,
            msg: msg.to_string(),
        };
        let mut prefix = Vec::new();
        let mut cycle = Vec::new();
        let mut in_loop = false;
        let mut closed = false;
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b' ' | b'\t' | b'\n' | b'\r' => i += 1,
                b'(' if !in_loop && !closed => {
                    in_loop = true;
                    i += 1;
                }
                b')' if in_loop => {
                    in_loop = false;
                    closed = true;
                    i += 1;
                }
                b'{' if !closed => {
                    let end = text[i..]
                        .find('}')
                        .map(|e| e + i)
                        .ok_or_else(|| err(i, "unterminated letter"))?;
                    let names: Vec<&str> = text[i + 1..end]
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .collect();
                    let letter = alphabet.letter(names).map_err(|e| err(i, &e.to_string()))?;
                    if in_loop {
                        cycle.push(letter);
                    } else {
                        prefix.push(letter);
                    }
                    i = end + 1;
                }
                _ => return Err(err(i, "unexpected character in lasso")),
            }
        }
        if !closed || cycle.is_empty() {
            return Err(err(text.len(), "lasso needs a nonempty parenthesized loop"));
        }
        LassoWord::new(prefix, cycle)
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        LassoDisplay { word: self, alphabet }.to_string()
    }
}

struct LassoDisplay<'a> {
    word: &'a LassoWord,
    alphabet: &'a Alphabet,
}

impl fmt::Display for LassoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.word.prefix {
            write!(f, "{} ", self.alphabet.render(*l))?;
        }
        let cycle: Vec<String> = self.word.cycle.iter().map(|l| self.alphabet.render(*l)).collect();
        write!(f, "({})", cycle.join(" "))
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Change points of a colored lasso.
///
/// `transient` lists the change points among positions `0..|u|+|v|`;
/// `periodic` lists those among `|u|+|v|..|u|+2|v|`, which then repeat
/// with period `|v|` forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangePoints {
    pub transient: Vec<usize>,
    pub periodic: Vec<usize>,
    pub period: usize,
}

impl ChangePoints {
    pub fn infinitely_many(&self) -> bool {
        !self.periodic.is_empty()
    }
}

pub fn change_points(w: &LassoWord, color_bit: usize) -> ChangePoints {
    let span = w.span();
    let v = w.cycle.len();
    let is_cp = |i: usize| i == 0 || w.letter(i - 1).has(color_bit) != w.letter(i).has(color_bit);
    ChangePoints {
        transient: (0..span).filter(|&i| is_cp(i)).collect(),
        periodic: (span..span + v).filter(|&i| is_cp(i)).collect(),
        period: v,
    }
}

/// Lengths of all p-blocks that occur in the word (each distinct
/// occurrence up to periodicity). `None` if there are only finitely many
/// change points, i.e. the last block is infinite.
fn block_lengths(w: &LassoWord, color_bit: usize) -> Option<Vec<usize>> {
    let cps = change_points(w, color_bit);
    if !cps.infinitely_many() {
        return None;
    }
    let horizon = w.span() + 2 * w.cycle.len();
    let all: Vec<usize> = (0..horizon)
        .filter(|&i| i == 0 || w.letter(i - 1).has(color_bit) != w.letter(i).has(color_bit))
        .collect();
    Some(all.windows(2).map(|p| p[1] - p[0]).collect())
}

/// Every p-block has length at most `k` (which forces infinitely many
/// change points).
pub fn is_k_bounded(w: &LassoWord, color_bit: usize, k: usize) -> bool {
    block_lengths(w, color_bit).is_some_and(|lens| lens.iter().all(|&l| l <= k))
}

/// Infinitely many change points and every p-block has length at least `k`.
pub fn is_k_spaced(w: &LassoWord, color_bit: usize, k: usize) -> bool {
    block_lengths(w, color_bit).is_some_and(|lens| lens.iter().all(|&l| l >= k))
}

/// p-coloring with blocks of exactly `block_len` positions, starting with a
/// `¬p` block. The loop is stretched to `lcm(|v|, 2·block_len)`.
pub fn color(w: &LassoWord, color_bit: usize, block_len: usize) -> Result<LassoWord> {
    if block_len == 0 {
        return Err(Error::Invalid("block length must be positive".into()));
    }
    let colored = |i: usize| w.letter(i).with(color_bit, (i / block_len) % 2 == 1);
    let u = w.prefix.len();
    let period = lcm(w.cycle.len(), 2 * block_len);
    LassoWord::new((0..u).map(colored).collect(), (u..u + period).map(colored).collect())
}
