use std::collections::HashMap;

use serde::Serialize;

use super::automaton::{Tracking, TrackingState};
use crate::automata::Dfa;
use crate::bitset::BitSet;
use crate::error::{Error, Result, Stage};
use crate::graph;
use crate::logic::{Alphabet, Letter};

/// Default cap on the total number of behavior-DFA states.
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// Interned sets of tracking states with a memoized projected step.
#[derive(Debug, Clone, Default)]
struct SetPool {
    sets: Vec<BitSet>,
    ids: HashMap<BitSet, u32>,
    step: HashMap<(u32, u32), u32>,
}

impl SetPool {
    fn intern(&mut self, set: BitSet) -> u32 {
        if let Some(&id) = self.ids.get(&set) {
            return id;
        }
        let id = self.sets.len() as u32;
        self.sets.push(set.clone());
        self.ids.insert(set, id);
        id
    }

    fn step(&mut self, tracking: &Tracking, set: u32, a: u32) -> u32 {
        if let Some(&t) = self.step.get(&(set, a)) {
            return t;
        }
        let next = tracking.project_step(&self.sets[set as usize], Letter(a));
        let t = self.intern(next);
        self.step.insert((set, a), t);
        t
    }
}

/// The deterministic automaton whose states are the behaviors witnessed by
/// input words over one domain.
///
/// Node 0 stands for the empty word; every other node is the behavior of
/// the words leading to it, stored as one set (pool id) per reset seed of
/// the domain.
#[derive(Debug, Clone)]
pub struct BehaviorDfa {
    pub tuples: Vec<Vec<u32>>,
    /// `trans[node][a]`
    pub trans: Vec<Vec<u32>>,
    /// Infinitely many words witness the node's behavior.
    pub pumpable: Vec<bool>,
    /// Every word of at least this length reaches a pumpable node.
    pub block_length: usize,
}

#[derive(Debug, Clone)]
pub struct Domain {
    /// Tracking states, sorted.
    pub states: Vec<u32>,
    /// Distinct reset copies of the states, sorted.
    pub seeds: Vec<u32>,
    /// For each entry of `states`, its seed's position in `seeds`.
    pub seed_of: Vec<usize>,
    pub dfa: BehaviorDfa,
    /// Pumpable nodes in increasing order.
    pub behaviors: Vec<u32>,
}

impl Domain {
    pub fn position(&self, x: u32) -> Option<usize> {
        self.states.binary_search(&x).ok()
    }
}

/// Materialized behavior: each domain state with its image set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Behavior {
    pub domain: Vec<u32>,
    pub images: Vec<BitSet>,
}

/// `r_w^D` computed directly from the projected step, independently of any
/// behavior automaton.
pub fn behavior(tracking: &Tracking, domain: &[u32], word: &[Letter]) -> Result<Behavior> {
    if word.is_empty() {
        return Err(Error::Invalid("behaviors are defined for nonempty words".into()));
    }
    let mut domain = domain.to_vec();
    domain.sort_unstable();
    domain.dedup();
    let images = domain
        .iter()
        .map(|&x| {
            let start = BitSet::singleton(tracking.len(), tracking.reset(x) as usize);
            word.iter().fold(start, |s, &a| tracking.project_step(&s, a))
        })
        .collect();
    Ok(Behavior { domain, images })
}

/// Domains reachable in the abstraction game, with their behavior
/// automata.
#[derive(Debug, Clone)]
pub struct Abstraction {
    tracking: Tracking,
    pool: SetPool,
    domains: Vec<Domain>,
    domain_of_set: HashMap<u32, u32>,
    /// pool id of each domain's state set
    domain_set: Vec<u32>,
    /// global behavior index -> (domain, node)
    behaviors: Vec<(u32, u32)>,
    behavior_index: HashMap<(u32, u32), usize>,
    block_length: usize,
    dfa_states: usize,
}

#[derive(Debug, Serialize)]
struct DomainDump {
    id: usize,
    states: usize,
    seeds: usize,
    dfa_states: usize,
    infinite_behaviors: usize,
    finite_behaviors: usize,
    block_length: usize,
}

#[derive(Debug, Serialize)]
struct AbstractionDump {
    tracking_states: usize,
    domains: Vec<DomainDump>,
    behaviors: usize,
    dfa_states: usize,
    block_length: usize,
}

impl Abstraction {
    /// Explores domains from `{q_I^T}`; new domains arise as images of
    /// pumpable behaviors. Fails once more than `budget` behavior-DFA
    /// states would be created.
    pub fn build(tracking: Tracking, budget: usize) -> Result<Abstraction> {
        let mut a = Abstraction {
            pool: SetPool::default(),
            domains: Vec::new(),
            domain_of_set: HashMap::new(),
            domain_set: Vec::new(),
            behaviors: Vec::new(),
            behavior_index: HashMap::new(),
            block_length: 1,
            dfa_states: 0,
            tracking,
        };
        let init = a.pool.intern(BitSet::singleton(a.tracking.len(), a.tracking.initial() as usize));
        a.domain_of_set.insert(init, 0);
        a.domain_set.push(init);
        let mut at = 0;
        while at < a.domain_set.len() {
            let domain = a.build_domain(a.domain_set[at], budget)?;
            for &node in &domain.behaviors {
                a.behavior_index.insert((at as u32, node), a.behaviors.len());
                a.behaviors.push((at as u32, node));
                for &set in &domain.dfa.tuples[node as usize] {
                    if !a.domain_of_set.contains_key(&set) {
                        a.domain_of_set.insert(set, a.domain_set.len() as u32);
                        a.domain_set.push(set);
                    }
                }
            }
            a.block_length = a.block_length.max(domain.dfa.block_length);
            a.domains.push(domain);
            at += 1;
        }
        log::debug!(
            "abstraction: {} tracking states, {} domains, {} behaviors, {} DFA states, d = {}",
            a.tracking.len(),
            a.domains.len(),
            a.behaviors.len(),
            a.dfa_states,
            a.block_length
        );
        Ok(a)
    }

    fn build_domain(&mut self, set: u32, budget: usize) -> Result<Domain> {
        let states: Vec<u32> = self.pool.sets[set as usize].iter().map(|x| x as u32).collect();
        let mut seeds: Vec<u32> = states.iter().map(|&x| self.tracking.reset(x)).collect();
        seeds.sort_unstable();
        seeds.dedup();
        let seed_of = states
            .iter()
            .map(|&x| seeds.binary_search(&self.tracking.reset(x)).expect("seed listed"))
            .collect();
        let n = self.tracking.len();
        let start: Vec<u32> = seeds
            .iter()
            .map(|&s| self.pool.intern(BitSet::singleton(n, s as usize)))
            .collect();
        let letters = self.tracking.input_letters();

        let mut tuples = vec![start];
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut trans: Vec<Vec<u32>> = Vec::new();
        let mut at = 0;
        while at < tuples.len() {
            let mut row = Vec::with_capacity(letters as usize);
            for a in 0..letters {
                let next: Vec<u32> = (0..tuples[at].len())
                    .map(|i| {
                        let s = tuples[at][i];
                        self.pool.step(&self.tracking, s, a)
                    })
                    .collect();
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        if self.dfa_states + tuples.len() >= budget {
                            return Err(Error::Capacity {
                                stage: Stage::Abstraction,
                                what: "behavior-DFA states",
                                limit: budget,
                            });
                        }
                        let id = tuples.len() as u32;
                        ids.insert(next.clone(), id);
                        tuples.push(next);
                        id
                    }
                };
                row.push(id);
            }
            trans.push(row);
            at += 1;
        }
        self.dfa_states += tuples.len();

        let count = tuples.len();
        let succ = |v: usize| trans[v].iter().map(|&t| t as usize).collect::<Vec<_>>();
        let (comp, _) = graph::sccs(count, &[0], succ);
        let cyclic: Vec<usize> = (0..count)
            .filter(|&v| trans[v].iter().any(|&t| comp[t as usize] == comp[v]))
            .collect();
        let pumpable = graph::reachable(count, &cyclic, succ);

        // longest path from node 0 through non-pumpable nodes; those form
        // a DAG, so a memoized search terminates
        let mut longest: Vec<Option<usize>> = vec![None; count];
        let mut stack = vec![(0usize, false)];
        while let Some((v, expanded)) = stack.pop() {
            if longest[v].is_some() {
                continue;
            }
            let next: Vec<usize> = trans[v].iter().map(|&t| t as usize).filter(|&t| !pumpable[t]).collect();
            if expanded {
                let best = next.iter().map(|&t| longest[t].expect("child done") + 1).max().unwrap_or(0);
                longest[v] = Some(best);
            } else {
                stack.push((v, true));
                for t in next {
                    if longest[t].is_none() {
                        stack.push((t, false));
                    }
                }
            }
        }
        let block_length = longest[0].unwrap_or(0) + 1;
        let behaviors = (1..count as u32).filter(|&v| pumpable[v as usize]).collect();
        Ok(Domain {
            states,
            seeds,
            seed_of,
            dfa: BehaviorDfa {
                tuples,
                trans,
                pumpable,
                block_length,
            },
            behaviors,
        })
    }

    pub fn tracking(&self) -> &Tracking {
        &self.tracking
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn domain(&self, id: usize) -> &Domain {
        &self.domains[id]
    }

    /// The pumpable behaviors, indexed globally in discovery order.
    pub fn behaviors(&self) -> &[(u32, u32)] {
        &self.behaviors
    }

    pub fn behavior_count(&self) -> usize {
        self.behaviors.len()
    }

    pub fn behavior_id(&self, domain: usize, node: u32) -> Option<usize> {
        self.behavior_index.get(&(domain as u32, node)).copied()
    }

    pub fn domain_of(&self, r: usize) -> usize {
        self.behaviors[r].0 as usize
    }

    pub fn dfa_states(&self) -> usize {
        self.dfa_states
    }

    /// The set of tracking states behind a pool id.
    pub fn set(&self, id: u32) -> &BitSet {
        &self.pool.sets[id as usize]
    }

    /// `r(q)` as a domain id, for `q` in the domain of `r`.
    pub fn image_domain(&self, r: usize, q: u32) -> usize {
        let (d, node) = self.behaviors[r];
        let dom = &self.domains[d as usize];
        let pos = dom.position(q).expect("q in domain");
        let set = dom.dfa.tuples[node as usize][dom.seed_of[pos]];
        self.domain_of_set[&set] as usize
    }

    /// `r(q)` as a set of tracking states.
    pub fn image(&self, r: usize, q: u32) -> &BitSet {
        let (d, node) = self.behaviors[r];
        let dom = &self.domains[d as usize];
        let pos = dom.position(q).expect("q in domain");
        self.set(dom.dfa.tuples[node as usize][dom.seed_of[pos]])
    }

    /// Behavior-DFA node reached by `word` from the domain's start.
    pub fn run(&self, domain: usize, word: &[Letter]) -> u32 {
        let dfa = &self.domains[domain].dfa;
        word.iter().fold(0, |v, a| dfa.trans[v as usize][a.0 as usize])
    }

    /// The pumpable behavior witnessed by `word` over `domain`, if any.
    pub fn behavior_of(&self, domain: usize, word: &[Letter]) -> Option<usize> {
        self.behavior_id(domain, self.run(domain, word))
    }

    pub fn materialize(&self, r: usize) -> Behavior {
        let (d, node) = self.behaviors[r];
        let dom = &self.domains[d as usize];
        Behavior {
            domain: dom.states.clone(),
            images: dom
                .seed_of
                .iter()
                .map(|&s| self.set(dom.dfa.tuples[node as usize][s]).clone())
                .collect(),
        }
    }

    /// A shortest input word witnessing behavior `r`.
    pub fn shortest_witness(&self, r: usize) -> Result<Vec<Letter>> {
        let (d, node) = self.behaviors[r];
        let dfa = &self.domains[d as usize].dfa;
        let count = dfa.tuples.len();
        // node 0 is never re-entered, so the path has at least one edge
        let path = graph::shortest_path(
            count,
            &[0],
            |v| dfa.trans[v].iter().map(|&t| t as usize).collect::<Vec<_>>(),
            |v| v == node as usize,
        )
        .ok_or_else(|| Error::internal(Stage::Abstraction, format!("behavior {r} has no witness")))?;
        Ok(path
            .windows(2)
            .map(|p| {
                let a = dfa.trans[p[0]].iter().position(|&t| t as usize == p[1]).expect("edge on path");
                Letter(a as u32)
            })
            .collect())
    }

    /// A DFA for the witness language of `r` over the input alphabet.
    pub fn witness_dfa(&self, r: usize, inputs: &Alphabet) -> Result<Dfa> {
        let (d, node) = self.behaviors[r];
        let dfa = &self.domains[d as usize].dfa;
        Dfa::new(
            inputs.clone(),
            0,
            (0..dfa.tuples.len()).map(|v| v == node as usize).collect(),
            dfa.trans.iter().map(|row| row.iter().map(|&t| t as usize).collect()).collect(),
        )
    }

    /// Every word of length at least this witnesses a pumpable behavior,
    /// over every domain.
    pub fn block_length(&self) -> usize {
        self.block_length
    }

    /// Diagnostic summary as JSON.
    pub fn dump(&self) -> serde_json::Value {
        let domains = self
            .domains
            .iter()
            .enumerate()
            .map(|(id, d)| DomainDump {
                id,
                states: d.states.len(),
                seeds: d.seeds.len(),
                dfa_states: d.dfa.tuples.len(),
                infinite_behaviors: d.behaviors.len(),
                finite_behaviors: d.dfa.tuples.len() - 1 - d.behaviors.len(),
                block_length: d.dfa.block_length,
            })
            .collect();
        serde_json::to_value(AbstractionDump {
            tracking_states: self.tracking.len(),
            domains,
            behaviors: self.behaviors.len(),
            dfa_states: self.dfa_states,
            block_length: self.block_length,
        })
        .expect("dump serializes")
    }

    /// Tracking state by id, for display.
    pub fn tracking_state(&self, x: u32) -> TrackingState {
        self.tracking.state(x)
    }
}
