use crate::error::{Error, Result};
use crate::graph;
use crate::logic::{Alphabet, Letter};

/// Deterministic complete automaton on finite words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    initial: usize,
    accepting: Vec<bool>,
    trans: Vec<Vec<usize>>,
}

impl Dfa {
    pub fn new(alphabet: Alphabet, initial: usize, accepting: Vec<bool>, trans: Vec<Vec<usize>>) -> Result<Self> {
        let n = accepting.len();
        let letters = alphabet.letter_count() as usize;
        if initial >= n || trans.len() != n {
            return Err(Error::Invalid("DFA state count mismatch".into()));
        }
        if trans.iter().any(|row| row.len() != letters || row.iter().any(|&t| t >= n)) {
            return Err(Error::Invalid("DFA transition table is not total".into()));
        }
        Ok(Dfa {
            alphabet,
            initial,
            accepting,
            trans,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn states(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn step(&self, q: usize, letter: Letter) -> usize {
        self.trans[q][letter.0 as usize]
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.accepting[word.iter().fold(self.initial, |q, &l| self.step(q, l))]
    }

    /// Whether infinitely many words are accepted: some accepting state is
    /// reachable through a state on a cycle.
    pub fn is_infinite(&self) -> bool {
        let n = self.states();
        let succ = |q: usize| self.trans[q].clone();
        let (comp, _) = graph::sccs(n, &[self.initial], succ);
        let on_cycle: Vec<usize> = (0..n)
            .filter(|&q| comp[q] != usize::MAX && self.trans[q].iter().any(|&t| comp[t] == comp[q]))
            .collect();
        let pumped = graph::reachable(n, &on_cycle, succ);
        (0..n).any(|q| pumped[q] && self.accepting[q])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_and_infinite_languages() {
        let ab = Alphabet::new(["a"]).unwrap();
        // accepts exactly the one-letter words
        let short = Dfa::new(ab.clone(), 0, vec![false, true, false], vec![vec![1, 1], vec![2, 2], vec![2, 2]]).unwrap();
        assert!(short.accepts(&[Letter(1)]));
        assert!(!short.accepts(&[Letter(1), Letter(0)]));
        assert!(!short.is_infinite());
        // words ending in a
        let ends = Dfa::new(ab, 0, vec![false, true], vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(ends.is_infinite());
        assert!(ends.accepts(&[Letter(0), Letter(1)]));
    }
}
