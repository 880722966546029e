use crate::error::{Error, Result};
use crate::graph;
use crate::logic::{Alphabet, LassoWord, Letter};

/// Nondeterministic Büchi automaton over explicit letters.
///
/// `trans[q][letter]` is the (sorted, possibly empty) successor set; an
/// empty set means the run dies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nba {
    pub(crate) alphabet: Alphabet,
    pub(crate) initial: usize,
    pub(crate) accepting: Vec<bool>,
    pub(crate) trans: Vec<Vec<Vec<usize>>>,
}

impl Nba {
    /// An automaton with `states` states and no transitions.
    pub fn new(alphabet: Alphabet, states: usize, initial: usize) -> Result<Self> {
        if initial >= states {
            return Err(Error::Invalid(format!(
                "initial state {initial} out of range ({states} states)"
            )));
        }
        let letters = alphabet.letter_count() as usize;
        Ok(Nba {
            alphabet,
            initial,
            accepting: vec![false; states],
            trans: vec![vec![Vec::new(); letters]; states],
        })
    }

    pub fn add_transition(&mut self, from: usize, letter: Letter, to: usize) {
        let targets = &mut self.trans[from][letter.0 as usize];
        if let Err(at) = targets.binary_search(&to) {
            targets.insert(at, to);
        }
    }

    pub fn set_accepting(&mut self, state: usize, accepting: bool) {
        self.accepting[state] = accepting;
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn states(&self) -> usize {
        self.trans.len()
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn successors(&self, q: usize, letter: Letter) -> &[usize] {
        &self.trans[q][letter.0 as usize]
    }

    /// Whether some run on `w` visits accepting states infinitely often.
    ///
    /// Searches the product of the automaton with the folded positions of
    /// the lasso for a reachable cycle through an accepting state.
    pub fn accepts(&self, w: &LassoWord) -> Result<bool> {
        for l in w.letters() {
            if !self.alphabet.contains(l) {
                return Err(Error::LetterOutOfRange {
                    letter: l.0,
                    aps: self.alphabet.len(),
                });
            }
        }
        let span = w.span();
        let node = |q: usize, i: usize| q * span + i;
        let succ = |v: usize| {
            let (q, i) = (v / span, v % span);
            let j = w.succ(i);
            self.successors(q, w.letter(i))
                .iter()
                .map(move |&t| node(t, j))
                .collect::<Vec<_>>()
        };
        let n = self.states() * span;
        let (comp, count) = graph::sccs(n, &[node(self.initial, 0)], succ);
        // a component is a cycle iff it has an internal edge
        let mut cyclic = vec![false; count];
        let mut accepting = vec![false; count];
        for v in 0..n {
            if comp[v] == usize::MAX {
                continue;
            }
            if self.accepting[v / span] {
                accepting[comp[v]] = true;
            }
            if succ(v).into_iter().any(|t| comp[t] == comp[v]) {
                cyclic[comp[v]] = true;
            }
        }
        Ok((0..count).any(|c| cyclic[c] && accepting[c]))
    }

    /// Drops states from which no accepting cycle is reachable, and
    /// unreachable states. The initial state is always kept.
    pub fn prune(&self) -> Nba {
        let n = self.states();
        let all_succ = |q: usize| {
            let mut out: Vec<usize> = self.trans[q].iter().flatten().copied().collect();
            out.sort_unstable();
            out.dedup();
            out
        };
        let reach = graph::reachable(n, &[self.initial], all_succ);
        let roots: Vec<usize> = (0..n).filter(|&q| reach[q]).collect();
        let (comp, count) = graph::sccs(n, &roots, all_succ);
        let mut good = vec![false; count];
        for q in roots.iter().copied() {
            if self.accepting[q] && all_succ(q).iter().any(|&t| comp[t] == comp[q]) {
                good[comp[q]] = true;
            }
        }
        // components come sinks first, so successors are decided before
        // their predecessors
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
        for &q in &roots {
            members[comp[q]].push(q);
        }
        for c in 0..count {
            if !good[c] {
                good[c] = members[c]
                    .iter()
                    .any(|&q| all_succ(q).iter().any(|&t| comp[t] != c && good[comp[t]]));
            }
        }
        let keep: Vec<bool> = (0..n)
            .map(|q| q == self.initial || (reach[q] && good[comp[q]]))
            .collect();
        self.restrict(&keep)
    }

    fn restrict(&self, keep: &[bool]) -> Nba {
        let mut remap = vec![usize::MAX; self.states()];
        let mut next = 0;
        for (q, &k) in keep.iter().enumerate() {
            if k {
                remap[q] = next;
                next += 1;
            }
        }
        let trans = (0..self.states())
            .filter(|&q| keep[q])
            .map(|q| {
                self.trans[q]
                    .iter()
                    .map(|ts| ts.iter().filter(|&&t| keep[t]).map(|&t| remap[t]).collect())
                    .collect()
            })
            .collect();
        Nba {
            alphabet: self.alphabet.clone(),
            initial: remap[self.initial],
            accepting: (0..self.states()).filter(|&q| keep[q]).map(|q| self.accepting[q]).collect(),
            trans,
        }
    }

    /// Quotient by the coarsest bisimulation that respects acceptance.
    pub fn reduce(&self) -> Nba {
        let n = self.states();
        let mut block: Vec<usize> = self.accepting.iter().map(|&a| a as usize).collect();
        loop {
            let mut signatures = std::collections::HashMap::new();
            let mut next_block = vec![0; n];
            for q in 0..n {
                let sig: (usize, Vec<Vec<usize>>) = (
                    block[q],
                    self.trans[q]
                        .iter()
                        .map(|ts| {
                            let mut bs: Vec<usize> = ts.iter().map(|&t| block[t]).collect();
                            bs.sort_unstable();
                            bs.dedup();
                            bs
                        })
                        .collect(),
                );
                let len = signatures.len();
                next_block[q] = *signatures.entry(sig).or_insert(len);
            }
            let stable = signatures.len() == block.iter().collect::<std::collections::HashSet<_>>().len();
            block = next_block;
            if stable {
                break;
            }
        }
        let count = block.iter().max().map_or(0, |m| m + 1);
        let mut out = Nba {
            alphabet: self.alphabet.clone(),
            initial: block[self.initial],
            accepting: vec![false; count],
            trans: vec![vec![Vec::new(); self.alphabet.letter_count() as usize]; count],
        };
        for q in 0..n {
            out.accepting[block[q]] = self.accepting[q];
            for (l, ts) in self.trans[q].iter().enumerate() {
                for &t in ts {
                    out.add_transition(block[q], Letter(l as u32), block[t]);
                }
            }
        }
        out
    }
}
