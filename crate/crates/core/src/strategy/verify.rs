//! Exhaustive check of a delay strategy against the parity automaton.
//!
//! The product is explored block by block. A product node is the behavior
//! of the last input block together with the automaton state and the last
//! output color, which is everything the machine's future output and the
//! automaton's future colors depend on apart from the owed input block.
//! The owed block is chosen on the outgoing edge among all blocks
//! witnessing the behavior, so a path of the product corresponds to
//! exactly one input sequence and vice versa. Between two block edges a
//! hub node stands for "these outputs were produced, the next behavior is
//! any behavior the strategy answers with the same tracking state".

use std::collections::HashMap;

use serde::Serialize;

use super::mealy::MealyStrategy;
use crate::automata::Dpa;
use crate::error::{Error, Result, Stage};
use crate::graph;
use crate::logic::Letter;

/// Default cap on explored product edges.
pub const DEFAULT_VERIFY_BUDGET: usize = 20_000_000;

/// An input lasso on which the strategy loses, with the strategy's
/// (unstripped) output letters aligned to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub input_prefix: Vec<u32>,
    pub input_cycle: Vec<u32>,
    pub output_prefix: Vec<u32>,
    pub output_cycle: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub product_nodes: usize,
    pub product_edges: usize,
    /// every reachable cycle has an even maximal automaton color
    pub even_cycles: bool,
    /// longest p-block on any play, `None` if some play has finitely many
    /// change points
    pub longest_p_block: Option<usize>,
    pub p_block_limit: usize,
    /// most consecutive output blocks without a change point
    pub max_change_free_blocks: Option<usize>,
    pub change_free_limit: usize,
    pub counterexample: Option<Counterexample>,
    pub passed: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Start,
    /// behavior, automaton state, last color (`None` before the first
    /// output)
    Node(usize, usize, Option<bool>),
    /// image domain, chosen tracking state, automaton state, last color
    Hub(usize, u32, usize, bool),
}

struct BlockEdge {
    input: Vec<Letter>,
    output: Vec<Letter>,
    /// positions before the first change point (the whole block when
    /// there is none)
    lead: usize,
    /// longest p-block starting and ending inside the block
    interior: usize,
    /// positions from the last change point to the end of the block
    trail: usize,
    change_free: bool,
}

struct Product {
    keys: Vec<Key>,
    ids: HashMap<Key, usize>,
    /// `(target, color, block edge)`
    succ: Vec<Vec<(usize, u32, Option<usize>)>>,
    blocks: Vec<BlockEdge>,
}

impl Product {
    fn id(&mut self, key: Key) -> usize {
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        self.keys.push(key);
        self.succ.push(Vec::new());
        self.ids.insert(key, self.keys.len() - 1);
        self.keys.len() - 1
    }
}

/// Input blocks of length `d` over one domain, grouped by behavior and by
/// the tracking state the strategy picks for that behavior.
struct DomainWords {
    by_behavior: HashMap<usize, Vec<usize>>,
    by_pick: Vec<(u32, Vec<usize>)>,
    words: Vec<Vec<Letter>>,
}

fn p_profile(output: &[Letter], color_bit: usize, last: Option<bool>) -> (usize, usize, usize, bool) {
    let d = output.len();
    let mut changes = Vec::new();
    let mut prev = last;
    for (i, b) in output.iter().enumerate() {
        let p = b.has(color_bit);
        if prev != Some(p) {
            changes.push(i);
        }
        prev = Some(p);
    }
    match (changes.first(), changes.last()) {
        (Some(&first), Some(&last_change)) => {
            let interior = changes.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
            (first, interior, d - last_change, false)
        }
        _ => (d, 0, 0, true),
    }
}

/// Explores the product of `strategy` with `dpa` over all input sequences
/// and checks that (a) every reachable cycle has an even maximal color,
/// (b) every p-block has length at most `k / 2`, and (c) no run of more
/// than B consecutive output blocks (B the number of behaviors) lacks a
/// change point.
pub fn verify(strategy: &MealyStrategy, dpa: &Dpa, k: usize) -> Result<VerificationReport> {
    verify_capped(strategy, dpa, k, DEFAULT_VERIFY_BUDGET)
}

pub fn verify_capped(strategy: &MealyStrategy, dpa: &Dpa, k: usize, budget: usize) -> Result<VerificationReport> {
    if strategy.is_stripped() {
        return Err(Error::Invalid("verification needs the coloring proposition in the outputs".into()));
    }
    let abstraction = strategy.abstraction();
    let tracking = abstraction.tracking();
    if dpa.alphabet() != tracking.dpa().alphabet() {
        return Err(Error::Invalid("automaton alphabet differs from the strategy's".into()));
    }
    let d = strategy.block_length();
    let color_bit = tracking.output_color_bit();

    let mut domain_words: HashMap<usize, DomainWords> = HashMap::new();
    let enumerate = |words: &mut HashMap<usize, DomainWords>, domain: usize| enumerate_domain(strategy, words, domain);

    let mut product = Product {
        keys: Vec::new(),
        ids: HashMap::new(),
        succ: Vec::new(),
        blocks: Vec::new(),
    };
    let mut responses: HashMap<(u32, Vec<Letter>, u32), Vec<Letter>> = HashMap::new();
    let mut edges = 0usize;
    product.id(Key::Start);
    let mut at = 0;
    while at < product.keys.len() {
        let key = product.keys[at];
        let mut out: Vec<(usize, u32, Option<usize>)> = Vec::new();
        match key {
            Key::Start => {
                enumerate(&mut domain_words, 0)?;
                let mut firsts: Vec<usize> = domain_words[&0].by_behavior.keys().copied().collect();
                firsts.sort_unstable();
                for r in firsts {
                    out.push((product.id(Key::Node(r, dpa.initial(), None)), 0, None));
                }
            }
            Key::Node(r, s, last) => {
                let q = strategy
                    .pick(r)
                    .ok_or_else(|| Error::internal(Stage::Verification, format!("no strategy move at behavior {r}")))?;
                let image = abstraction.image_domain(r, q);
                enumerate(&mut domain_words, abstraction.domain_of(r))?;
                enumerate(&mut domain_words, image)?;
                let own = &domain_words[&abstraction.domain_of(r)];
                let next = &domain_words[&image];
                for &w in &own.by_behavior[&r] {
                    let input = &own.words[w];
                    for &(target, _) in &next.by_pick {
                        let key = (q, input.clone(), target);
                        if !responses.contains_key(&key) {
                            let b = strategy.respond(q, input, target)?;
                            responses.insert(key.clone(), b);
                        }
                        let output = responses[&key].clone();
                        let mut state = s;
                        let mut color = 0;
                        for (&a, &b) in input.iter().zip(&output) {
                            state = dpa.step(state, tracking.combine(a, b));
                            color = color.max(dpa.color(state));
                        }
                        let (lead, interior, trail, change_free) = p_profile(&output, color_bit, last);
                        let end = output.last().expect("nonempty block").has(color_bit);
                        let hub = product.id(Key::Hub(image, target, state, end));
                        product.blocks.push(BlockEdge {
                            input: input.clone(),
                            output,
                            lead,
                            interior,
                            trail,
                            change_free,
                        });
                        out.push((hub, color, Some(product.blocks.len() - 1)));
                    }
                }
            }
            Key::Hub(image, target, s, last) => {
                let next = &domain_words[&image];
                let rs = next
                    .by_pick
                    .iter()
                    .find(|(q, _)| *q == target)
                    .map(|(_, rs)| rs.clone())
                    .unwrap_or_default();
                for r in rs {
                    out.push((product.id(Key::Node(r, s, Some(last))), 0, None));
                }
            }
        }
        edges += out.len();
        if edges > budget {
            return Err(Error::Capacity {
                stage: Stage::Verification,
                what: "product edges",
                limit: budget,
            });
        }
        product.succ[at] = out;
        at += 1;
    }

    let n = product.keys.len();
    let cycle = graph::odd_cycle(n, &[0], |v| product.succ[v].iter().map(|&(t, c, _)| (t, c)).collect());
    let mut counterexample = cycle.as_ref().map(|w| lasso_of(&product, &w.stem, &w.cycle));

    // change-free structure: block edges without a change point plus all
    // hub and start edges
    let free_succ = |v: usize| -> Vec<usize> {
        product.succ[v]
            .iter()
            .filter(|&&(_, _, e)| e.map_or(true, |e| product.blocks[e].change_free))
            .map(|&(t, _, _)| t)
            .collect()
    };
    let (comp, count) = graph::sccs(n, &(0..n).collect::<Vec<_>>(), free_succ);
    let mut size = vec![0usize; count];
    for v in 0..n {
        size[comp[v]] += 1;
    }
    let free_cycle = (0..n).find(|&v| size[comp[v]] > 1 || free_succ(v).contains(&v));
    let (longest, max_free) = if let Some(v) = free_cycle {
        if counterexample.is_none() {
            // a play that stops changing colors: reach the cycle, go round
            let stem = graph::shortest_path(n, &[0], |u| product.succ[u].iter().map(|&(t, _, _)| t).collect::<Vec<_>>(), |u| u == v)
                .ok_or_else(|| Error::internal(Stage::Verification, "unreachable product node"))?;
            counterexample = Some(free_lasso(&product, &stem, v, &comp, &free_succ)?);
        }
        (None, None)
    } else {
        // sccs lists components sinks first, so successors are done first
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| comp[v]);
        let mut cont = vec![0usize; n];
        let mut free = vec![0usize; n];
        for &v in &order {
            let mut c = 0;
            let mut f = 0;
            for &(t, _, e) in &product.succ[v] {
                match e {
                    Some(e) if product.blocks[e].change_free => {
                        c = c.max(d + cont[t]);
                        f = f.max(1 + free[t]);
                    }
                    Some(e) => c = c.max(product.blocks[e].lead),
                    None => {
                        c = c.max(cont[t]);
                        f = f.max(free[t]);
                    }
                }
            }
            cont[v] = c;
            free[v] = f;
        }
        let mut longest = 0;
        for v in 0..n {
            for &(t, _, e) in &product.succ[v] {
                if let Some(e) = e {
                    let b = &product.blocks[e];
                    if !b.change_free {
                        longest = longest.max(b.interior).max(b.trail + cont[t]);
                    }
                }
            }
        }
        (Some(longest), Some(free.iter().copied().max().unwrap_or(0)))
    };

    let p_block_limit = k / 2;
    let change_free_limit = abstraction.behavior_count();
    let even_cycles = cycle.is_none();
    let passed = even_cycles
        && longest.is_some_and(|l| l <= p_block_limit)
        && max_free.is_some_and(|f| f <= change_free_limit);
    Ok(VerificationReport {
        product_nodes: n,
        product_edges: edges,
        even_cycles,
        longest_p_block: longest,
        p_block_limit,
        max_change_free_blocks: max_free,
        change_free_limit,
        counterexample,
        passed,
    })
}

fn enumerate_domain(strategy: &MealyStrategy, domain_words: &mut HashMap<usize, DomainWords>, domain: usize) -> Result<()> {
    let abstraction = strategy.abstraction();
    if domain_words.contains_key(&domain) {
        return Ok(());
    }
    let mut by_behavior: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut picks: HashMap<u32, Vec<usize>> = HashMap::new();
    let words: Vec<Vec<Letter>> = strategy.blocks().collect();
    for (i, w) in words.iter().enumerate() {
        let r = abstraction.behavior_of(domain, w).ok_or_else(|| {
            Error::internal(Stage::Verification, "an input block of the block length witnesses no pumpable behavior")
        })?;
        let entry = by_behavior.entry(r).or_default();
        if entry.is_empty() {
            let q = strategy
                .pick(r)
                .ok_or_else(|| Error::internal(Stage::Verification, format!("no strategy move at behavior {r}")))?;
            picks.entry(q).or_default().push(r);
        }
        entry.push(i);
    }
    let mut by_pick: Vec<(u32, Vec<usize>)> = picks.into_iter().collect();
    by_pick.sort_unstable();
    for (_, rs) in by_pick.iter_mut() {
        rs.sort_unstable();
    }
    domain_words.insert(
        domain,
        DomainWords {
            by_behavior,
            by_pick,
            words,
        },
    );
    Ok(())
}

/// Index of an edge from `v` to `t`, preferring edges without a change
/// point.
fn edge_index(product: &Product, v: usize, t: usize) -> usize {
    let free = |e: Option<usize>| e.map_or(true, |e| product.blocks[e].change_free);
    product.succ[v]
        .iter()
        .position(|&(u, _, e)| u == t && free(e))
        .or_else(|| product.succ[v].iter().position(|&(u, _, _)| u == t))
        .expect("edge on path")
}

fn lasso_of(product: &Product, stem: &[(usize, usize)], cycle: &[(usize, usize)]) -> Counterexample {
    let collect = |path: &[(usize, usize)]| {
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for &(v, i) in path {
            if let Some(e) = product.succ[v][i].2 {
                inputs.extend(product.blocks[e].input.iter().map(|a| a.0));
                outputs.extend(product.blocks[e].output.iter().map(|b| b.0));
            }
        }
        (inputs, outputs)
    };
    let (input_prefix, output_prefix) = collect(stem);
    let (input_cycle, output_cycle) = collect(cycle);
    Counterexample {
        input_prefix,
        input_cycle,
        output_prefix,
        output_cycle,
    }
}

fn free_lasso(
    product: &Product,
    stem: &[usize],
    v: usize,
    comp: &[usize],
    free_succ: &dyn Fn(usize) -> Vec<usize>,
) -> Result<Counterexample> {
    let n = product.keys.len();
    // a cycle through v inside its change-free component
    let mut best: Option<Vec<usize>> = None;
    for t in free_succ(v).into_iter().filter(|&t| comp[t] == comp[v]) {
        let path = graph::shortest_path(
            n,
            &[t],
            |u| free_succ(u).into_iter().filter(|&x| comp[x] == comp[v]).collect::<Vec<_>>(),
            |u| u == v,
        );
        if let Some(p) = path {
            let mut full = vec![v];
            full.extend(p);
            if best.as_ref().map_or(true, |b| full.len() < b.len()) {
                best = Some(full);
            }
        }
    }
    let cyc = best.ok_or_else(|| Error::internal(Stage::Verification, "change-free component without a cycle"))?;
    let as_edges = |path: &[usize]| -> Vec<(usize, usize)> {
        path.windows(2).map(|w| (w[0], edge_index(product, w[0], w[1]))).collect()
    };
    Ok(lasso_of(product, &as_edges(stem), &as_edges(&cyc)))
}
