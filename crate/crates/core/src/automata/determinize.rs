//! Büchi to parity determinization with history trees.
//!
//! A tree is an ordered tree of nodes labelled with sets of Büchi states;
//! children labels are disjoint subsets of the parent label and older
//! siblings come first. Nodes carry names `1..=k` ordered by age. One step
//! spawns accepting children, moves all labels, removes states already
//! owned by older nodes, drops empty nodes, collapses nodes whose label is
//! covered by their children (these nodes are "green"), and renames the
//! survivors to `1..=k'` preserving order. The step's color is derived from
//! the smallest green name and the smallest removed name.

use std::collections::{HashMap, VecDeque};

use super::dpa::Dpa;
use super::nba::Nba;
use crate::bitset::BitSet;
use crate::error::{Error, Result, Stage};

/// Default cap on the number of determinized states.
pub const DEFAULT_DPA_CAP: usize = 500_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Node {
    name: u32,
    /// index of the parent in preorder, `usize::MAX` for the root
    parent: usize,
    label: BitSet,
}

/// Nodes in preorder, siblings oldest first.
type Tree = Vec<Node>;

struct Stepper<'a> {
    nba: &'a Nba,
    accepting: BitSet,
}

struct Work {
    name: u32,
    label: BitSet,
    children: Vec<usize>,
}

impl Stepper<'_> {
    fn post(&self, set: &BitSet, letter: u32) -> BitSet {
        let mut out = BitSet::new(self.nba.states());
        for q in set.iter() {
            for &t in &self.nba.trans[q][letter as usize] {
                out.insert(t);
            }
        }
        out
    }

    /// One deterministic step; returns the successor tree and its color
    /// in max-parity form.
    fn step(&self, tree: &Tree, letter: u32) -> (Tree, u32) {
        let n = self.nba.states() as u32;
        let k = tree.len() as u32;
        if tree.is_empty() {
            return (Vec::new(), 1);
        }

        let mut work: Vec<Work> = tree
            .iter()
            .map(|node| Work {
                name: node.name,
                label: node.label.clone(),
                children: Vec::new(),
            })
            .collect();
        for (i, node) in tree.iter().enumerate() {
            if node.parent != usize::MAX {
                work[node.parent].children.push(i);
            }
        }

        // spawn a youngest child holding the accepting part of each label
        let mut fresh = k;
        for i in 0..tree.len() {
            let mut acc = work[i].label.clone();
            acc.intersect_with(&self.accepting);
            if !acc.is_empty() {
                fresh += 1;
                work.push(Work {
                    name: fresh,
                    label: acc,
                    children: Vec::new(),
                });
                let id = work.len() - 1;
                work[i].children.push(id);
            }
        }

        for w in work.iter_mut() {
            w.label = self.post(&w.label, letter);
        }

        // horizontal merge in preorder: a node keeps only states of its
        // parent not owned by older siblings; empty nodes disappear with
        // their subtrees
        let mut removed_min = u32::MAX;
        let mut out: Tree = Vec::new();
        let mut stack: Vec<(usize, usize, BitSet)> = vec![(0, usize::MAX, work[0].label.clone())];
        while let Some((w, parent, allowed)) = stack.pop() {
            let mut label = work[w].label.clone();
            label.intersect_with(&allowed);
            if label.is_empty() {
                if work[w].name <= k {
                    removed_min = removed_min.min(work[w].name);
                }
                continue;
            }
            let at = out.len();
            let mut remaining = label.clone();
            out.push(Node {
                name: work[w].name,
                parent,
                label,
            });
            let mut pushes = Vec::new();
            for &c in &work[w].children {
                pushes.push((c, at, remaining.clone()));
                let mut owned = work[c].label.clone();
                owned.intersect_with(&remaining);
                remaining.difference_with(&owned);
            }
            stack.extend(pushes.into_iter().rev());
        }

        // vertical merge: a node whose label is covered by its children
        // turns green and loses its descendants
        let mut union: Vec<Option<BitSet>> = vec![None; out.len()];
        for i in (0..out.len()).rev() {
            let p = out[i].parent;
            if p != usize::MAX {
                let label = out[i].label.clone();
                union[p].get_or_insert_with(|| BitSet::new(self.nba.states())).union_with(&label);
            }
        }
        let mut green_min = u32::MAX;
        let mut alive = vec![false; out.len()];
        let mut green = vec![false; out.len()];
        let mut index_map = vec![usize::MAX; out.len()];
        let mut next: Tree = Vec::new();
        for i in 0..out.len() {
            let p = out[i].parent;
            if p != usize::MAX && (!alive[p] || green[p]) {
                continue;
            }
            alive[i] = true;
            index_map[i] = next.len();
            next.push(Node {
                name: out[i].name,
                parent: if p == usize::MAX { usize::MAX } else { index_map[p] },
                label: out[i].label.clone(),
            });
            if union[i].as_ref() == Some(&out[i].label) {
                green[i] = true;
                green_min = green_min.min(out[i].name);
            }
        }

        let mut names: Vec<u32> = next.iter().map(|node| node.name).collect();
        names.sort_unstable();
        for node in next.iter_mut() {
            node.name = names.binary_search(&node.name).expect("name present") as u32 + 1;
        }

        let pmin = if green_min < removed_min {
            2 * green_min
        } else if removed_min != u32::MAX {
            2 * removed_min - 1
        } else {
            2 * n + 1
        };
        (next, 2 * n + 2 - pmin)
    }
}

/// Determinizes a Büchi automaton into an equivalent max-parity automaton.
pub fn determinize(nba: &Nba) -> Result<Dpa> {
    determinize_capped(nba, DEFAULT_DPA_CAP)
}

pub fn determinize_capped(nba: &Nba, cap: usize) -> Result<Dpa> {
    let n = nba.states();
    let mut accepting = BitSet::new(n);
    for q in 0..n {
        if nba.accepting[q] {
            accepting.insert(q);
        }
    }
    let stepper = Stepper { nba, accepting };
    let letters = nba.alphabet.letter_count();

    let root: Tree = vec![Node {
        name: 1,
        parent: usize::MAX,
        label: BitSet::singleton(n, nba.initial),
    }];
    type Key = (Tree, u32);
    let mut ids: HashMap<Key, usize> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut trans: Vec<Vec<usize>> = Vec::new();
    let start = (root, 0);
    ids.insert(start.clone(), 0);
    keys.push(start);
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let tree = keys[id].0.clone();
        let mut row = Vec::with_capacity(letters as usize);
        for l in 0..letters {
            let key = stepper.step(&tree, l);
            let target = match ids.get(&key) {
                Some(&t) => t,
                None => {
                    if keys.len() >= cap {
                        return Err(Error::Capacity {
                            stage: Stage::Determinization,
                            what: "DPA states",
                            limit: cap,
                        });
                    }
                    let t = keys.len();
                    ids.insert(key.clone(), t);
                    keys.push(key);
                    queue.push_back(t);
                    t
                }
            };
            row.push(target);
        }
        trans.push(row);
    }
    let raw = Dpa {
        alphabet: nba.alphabet.clone(),
        initial: 0,
        colors: keys.iter().map(|k| k.1).collect(),
        trans,
    };
    let reduced = raw.minimize();
    log::debug!(
        "determinized {} NBA states into {} DPA states ({} before reduction)",
        n,
        reduced.states(),
        raw.states()
    );
    Ok(reduced)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::logic::{Alphabet, LassoWord, Letter};

    fn all_lassos(letters: u32, max_u: usize, max_v: usize) -> Vec<LassoWord> {
        let mut by_len: Vec<Vec<Vec<Letter>>> = vec![vec![vec![]]];
        for len in 1..=max_u.max(max_v) {
            let prev = by_len[len - 1].clone();
            by_len.push(
                prev.iter()
                    .flat_map(|w| {
                        (0..letters).map(move |l| {
                            let mut w = w.clone();
                            w.push(Letter(l));
                            w
                        })
                    })
                    .collect(),
            );
        }
        let mut out = Vec::new();
        for u in 0..=max_u {
            for v in 1..=max_v {
                for pre in &by_len[u] {
                    for cyc in &by_len[v] {
                        out.push(LassoWord::new(pre.clone(), cyc.clone()).unwrap());
                    }
                }
            }
        }
        out
    }

    #[test]
    fn deterministic_input_is_preserved() {
        let ab = Alphabet::new(["a"]).unwrap();
        // complete deterministic automaton, all states accepting
        let mut nba = Nba::new(ab, 2, 0).unwrap();
        for q in 0..2 {
            nba.set_accepting(q, true);
            nba.add_transition(q, Letter(0), 0);
            nba.add_transition(q, Letter(1), 1);
        }
        let dpa = determinize(&nba).unwrap();
        for w in all_lassos(2, 3, 3) {
            assert!(dpa.accepts(&w).unwrap());
        }
    }

    #[test]
    fn random_automata_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ab = Alphabet::new(["a"]).unwrap();
        let words = all_lassos(2, 3, 3);
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let mut nba = Nba::new(ab.clone(), n, 0).unwrap();
            for q in 0..n {
                nba.set_accepting(q, rng.gen_bool(0.4));
                for l in 0..2 {
                    for t in 0..n {
                        if rng.gen_bool(0.35) {
                            nba.add_transition(q, Letter(l), t);
                        }
                    }
                }
            }
            let dpa = determinize(&nba).unwrap();
            for w in &words {
                assert_eq!(dpa.accepts(w).unwrap(), nba.accepts(w).unwrap(), "{nba:?} on {w:?}");
            }
        }
    }
}
