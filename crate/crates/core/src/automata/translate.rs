//! Tableau translation from LTL to Büchi automata.
//!
//! A tableau state is the set of formulas that must hold at the current
//! position. Expanding a state yields covers: the literals the current
//! letter must satisfy, the obligations for the next position, and the
//! set of formulas that were expanded. Eventualities (until, finally) give
//! a generalized Büchi condition on covers, which is degeneralized with a
//! counter.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::nba::Nba;
use crate::error::{Error, Result, Stage};
use crate::logic::{Alphabet, Formula, Letter};

/// Default cap on translated automaton states.
pub const DEFAULT_NBA_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy)]
enum Node {
    Atom(Option<usize>),
    NegAtom(Option<usize>),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Finally(usize),
    Globally(usize),
    Until(usize, usize),
    Release(usize, usize),
}

struct Closure {
    nodes: Vec<Node>,
    /// until / finally nodes and the formula that discharges them
    eventualities: Vec<(usize, usize)>,
}

impl Closure {
    fn build(formula: &Formula, alphabet: &Alphabet) -> Result<(Closure, usize)> {
        let mut c = Closure {
            nodes: Vec::new(),
            eventualities: Vec::new(),
        };
        let mut index = HashMap::new();
        let root = c.add(formula, alphabet, &mut index)?;
        Ok((c, root))
    }

    fn add<'f>(
        &mut self,
        f: &'f Formula,
        alphabet: &Alphabet,
        index: &mut HashMap<&'f Formula, usize>,
    ) -> Result<usize> {
        if let Some(&i) = index.get(f) {
            return Ok(i);
        }
        let node = match f {
            Formula::Atom(a) => Node::Atom(alphabet.index_of(a)),
            Formula::NegAtom(a) => Node::NegAtom(alphabet.index_of(a)),
            Formula::And(a, b) => Node::And(self.add(a, alphabet, index)?, self.add(b, alphabet, index)?),
            Formula::Or(a, b) => Node::Or(self.add(a, alphabet, index)?, self.add(b, alphabet, index)?),
            Formula::Next(a) => Node::Next(self.add(a, alphabet, index)?),
            Formula::Finally(a) => Node::Finally(self.add(a, alphabet, index)?),
            Formula::Globally(a) => Node::Globally(self.add(a, alphabet, index)?),
            Formula::Until(a, b) => Node::Until(self.add(a, alphabet, index)?, self.add(b, alphabet, index)?),
            Formula::Release(a, b) => Node::Release(self.add(a, alphabet, index)?, self.add(b, alphabet, index)?),
            Formula::PromptFinally(_) => return Err(Error::NotLtl),
        };
        self.nodes.push(node);
        let i = self.nodes.len() - 1;
        match node {
            Node::Until(_, b) | Node::Finally(b) => self.eventualities.push((i, b)),
            _ => {}
        }
        index.insert(f, i);
        Ok(i)
    }
}

/// One way of satisfying a tableau state at the current position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Cover {
    pos: u32,
    neg: u32,
    next: BTreeSet<usize>,
    /// bit j set iff eventuality j is not pending on this cover
    satisfied: u64,
}

#[derive(Clone)]
struct Branch {
    todo: Vec<usize>,
    done: BTreeSet<usize>,
    pos: u32,
    neg: u32,
    next: BTreeSet<usize>,
}

fn expand(closure: &Closure, obligations: &BTreeSet<usize>) -> Vec<Cover> {
    let mut out = BTreeSet::new();
    let mut stack = vec![Branch {
        todo: obligations.iter().rev().copied().collect(),
        done: BTreeSet::new(),
        pos: 0,
        neg: 0,
        next: BTreeSet::new(),
    }];
    'branches: while let Some(mut br) = stack.pop() {
        while let Some(f) = br.todo.pop() {
            if !br.done.insert(f) {
                continue;
            }
            match closure.nodes[f] {
                Node::Atom(None) => continue 'branches,
                Node::Atom(Some(bit)) => {
                    br.pos |= 1 << bit;
                    if br.neg & br.pos != 0 {
                        continue 'branches;
                    }
                }
                Node::NegAtom(None) => {}
                Node::NegAtom(Some(bit)) => {
                    br.neg |= 1 << bit;
                    if br.neg & br.pos != 0 {
                        continue 'branches;
                    }
                }
                Node::And(a, b) => {
                    br.todo.push(b);
                    br.todo.push(a);
                }
                Node::Next(a) => {
                    br.next.insert(a);
                }
                Node::Globally(a) => {
                    br.next.insert(f);
                    br.todo.push(a);
                }
                Node::Or(a, b) => {
                    let mut other = br.clone();
                    other.todo.push(b);
                    stack.push(other);
                    br.todo.push(a);
                }
                Node::Until(a, b) => {
                    let mut other = br.clone();
                    other.todo.push(a);
                    other.next.insert(f);
                    stack.push(other);
                    br.todo.push(b);
                }
                Node::Finally(b) => {
                    let mut other = br.clone();
                    other.next.insert(f);
                    stack.push(other);
                    br.todo.push(b);
                }
                Node::Release(a, b) => {
                    let mut other = br.clone();
                    other.todo.push(b);
                    other.next.insert(f);
                    stack.push(other);
                    br.todo.push(b);
                    br.todo.push(a);
                }
            }
        }
        let mut satisfied = 0u64;
        for (j, &(u, right)) in closure.eventualities.iter().enumerate() {
            if !br.done.contains(&u) || br.done.contains(&right) {
                satisfied |= 1 << j;
            }
        }
        out.insert(Cover {
            pos: br.pos,
            neg: br.neg,
            next: br.next,
            satisfied,
        });
    }
    out.into_iter().collect()
}

/// Translates an LTL formula into a Büchi automaton over `alphabet`.
///
/// Propositions absent from the alphabet are treated as always false. The
/// result is pruned (states that cannot reach an accepting cycle are
/// dropped) and quotiented by bisimulation.
pub fn ltl_to_nba(formula: &Formula, alphabet: &Alphabet) -> Result<Nba> {
    ltl_to_nba_capped(formula, alphabet, DEFAULT_NBA_CAP)
}

pub fn ltl_to_nba_capped(formula: &Formula, alphabet: &Alphabet, cap: usize) -> Result<Nba> {
    let (closure, root) = Closure::build(formula, alphabet)?;
    let m = closure.eventualities.len();
    if m > 64 {
        return Err(Error::Capacity {
            stage: Stage::Translation,
            what: "eventualities",
            limit: 64,
        });
    }
    let letters: Vec<Letter> = alphabet.letters().collect();

    type Key = (BTreeSet<usize>, usize);
    let mut ids: HashMap<Key, usize> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut edges: Vec<Vec<(Letter, usize)>> = Vec::new();
    let mut covers_memo: HashMap<BTreeSet<usize>, Vec<Cover>> = HashMap::new();
    let mut queue = VecDeque::new();

    let start: Key = (BTreeSet::from([root]), 0);
    ids.insert(start.clone(), 0);
    keys.push(start);
    edges.push(Vec::new());
    queue.push_back(0);

    while let Some(id) = queue.pop_front() {
        let (obligations, counter) = keys[id].clone();
        let covers = covers_memo
            .entry(obligations.clone())
            .or_insert_with(|| expand(&closure, &obligations))
            .clone();
        for cover in covers {
            let mut j = if counter < m { counter } else { 0 };
            while j < m && cover.satisfied & (1 << j) != 0 {
                j += 1;
            }
            let key: Key = (cover.next.clone(), j);
            let target = match ids.get(&key) {
                Some(&t) => t,
                None => {
                    if keys.len() >= cap {
                        return Err(Error::Capacity {
                            stage: Stage::Translation,
                            what: "NBA states",
                            limit: cap,
                        });
                    }
                    let t = keys.len();
                    ids.insert(key.clone(), t);
                    keys.push(key);
                    edges.push(Vec::new());
                    queue.push_back(t);
                    t
                }
            };
            for &l in &letters {
                if l.0 & cover.pos == cover.pos && l.0 & cover.neg == 0 {
                    edges[id].push((l, target));
                }
            }
        }
    }

    let mut nba = Nba::new(alphabet.clone(), keys.len(), 0)?;
    for (id, (_, counter)) in keys.iter().enumerate() {
        nba.set_accepting(id, *counter == m);
        for &(l, t) in &edges[id] {
            nba.add_transition(id, l, t);
        }
    }
    let pruned = nba.prune().reduce();
    log::debug!(
        "translated {} subformulas into {} NBA states ({} before reduction)",
        closure.nodes.len(),
        pruned.states(),
        keys.len()
    );
    Ok(pruned)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{eval, parse_with_atoms, LassoWord};

    fn lassos(aps: usize, max_u: usize, max_v: usize) -> Vec<LassoWord> {
        let letters = 1u32 << aps;
        let mut words: Vec<Vec<Letter>> = vec![vec![]];
        let mut by_len = vec![words.clone()];
        for _ in 0..max_u.max(max_v) {
            words = words
                .iter()
                .flat_map(|w| {
                    (0..letters).map(move |l| {
                        let mut w = w.clone();
                        w.push(Letter(l));
                        w
                    })
                })
                .collect();
            by_len.push(words.clone());
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

    fn agrees(text: &str, aps: &[&str]) {
        let f = parse_with_atoms(text, aps).unwrap();
        let ab = Alphabet::new(aps.iter().copied()).unwrap();
        let nba = ltl_to_nba(&f, &ab).unwrap();
        for w in lassos(aps.len(), 2, 3) {
            assert_eq!(nba.accepts(&w).unwrap(), eval(&w, &ab, 0, 0, &f), "{text} on {}", w.render(&ab));
        }
    }

    #[test]
    fn globally_is_one_state() {
        let ab = Alphabet::new(["p"]).unwrap();
        let nba = ltl_to_nba(&Formula::globally(Formula::atom("p")), &ab).unwrap();
        assert_eq!(nba.states(), 1);
        agrees("G p", &["p"]);
    }

    #[test]
    fn tautology_accepts_everything() {
        let ab = Alphabet::new(["p"]).unwrap();
        let f = parse_with_atoms("p | !p", &["p"]).unwrap();
        let nba = ltl_to_nba(&f, &ab).unwrap();
        for w in lassos(1, 2, 2) {
            assert!(nba.accepts(&w).unwrap());
        }
    }

    #[test]
    fn eventually() {
        let ab = Alphabet::new(["p"]).unwrap();
        let nba = ltl_to_nba(&parse_with_atoms("F p", &["p"]).unwrap(), &ab).unwrap();
        assert!(nba.accepts(&LassoWord::parse("{} ({p})", &ab).unwrap()).unwrap());
        assert!(!nba.accepts(&LassoWord::parse("({})", &ab).unwrap()).unwrap());
    }

    #[test]
    fn assorted_formulas_match_semantics() {
        for text in [
            "a U b",
            "a R b",
            "G F a",
            "F G a",
            "G (a -> X b)",
            "G F a & G F !a",
            "(a U b) U (X !a)",
            "G (a -> F b) & F G !b",
            "X X a | !b R a",
            "G F a -> G F b",
        ] {
            agrees(text, &["a", "b"]);
        }
    }

    #[test]
    fn prompt_is_rejected() {
        let ab = Alphabet::new(["p"]).unwrap();
        assert!(matches!(
            ltl_to_nba(&Formula::prompt(Formula::atom("p")), &ab),
            Err(Error::NotLtl)
        ));
    }
}
