use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph;
use crate::logic::{Alphabet, LassoWord, Letter};

/// Deterministic, complete parity automaton with state colors.
///
/// A run is accepting iff the maximal color seen infinitely often is even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dpa {
    pub(crate) alphabet: Alphabet,
    pub(crate) initial: usize,
    pub(crate) colors: Vec<u32>,
    /// `trans[q][letter]`
    pub(crate) trans: Vec<Vec<usize>>,
}

impl Dpa {
    /// Builds a DPA from a full transition table, checking totality.
    pub fn new(alphabet: Alphabet, initial: usize, colors: Vec<u32>, trans: Vec<Vec<usize>>) -> Result<Self> {
        let n = colors.len();
        if trans.len() != n {
            return Err(Error::Invalid(format!("{} colors for {} states", n, trans.len())));
        }
        if initial >= n {
            return Err(Error::Invalid(format!("initial state {initial} out of range ({n} states)")));
        }
        let letters = alphabet.letter_count() as usize;
        for (q, row) in trans.iter().enumerate() {
            if row.len() != letters {
                return Err(Error::Invalid(format!(
                    "state {q} has {} transitions, expected {letters}",
                    row.len()
                )));
            }
            if let Some(&t) = row.iter().find(|&&t| t >= n) {
                return Err(Error::Invalid(format!("state {q} has a transition to missing state {t}")));
            }
        }
        Ok(Dpa {
            alphabet,
            initial,
            colors,
            trans,
        })
    }

    /// The one-state automaton with a self-loop of the given color.
    pub fn constant(alphabet: Alphabet, color: u32) -> Self {
        let letters = alphabet.letter_count() as usize;
        Dpa {
            alphabet,
            initial: 0,
            colors: vec![color],
            trans: vec![vec![0; letters]],
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn states(&self) -> usize {
        self.colors.len()
    }

    pub fn color(&self, q: usize) -> u32 {
        self.colors[q]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn max_color(&self) -> u32 {
        self.colors.iter().copied().max().unwrap_or(0)
    }

    pub fn step(&self, q: usize, letter: Letter) -> usize {
        self.trans[q][letter.0 as usize]
    }

    /// State reached after reading `word` from `q`.
    pub fn run(&self, q: usize, word: &[Letter]) -> usize {
        word.iter().fold(q, |q, &l| self.step(q, l))
    }

    /// Runs `w` until a (state, loop position) pair repeats and checks the
    /// parity of the maximal color on the repeated segment.
    pub fn accepts(&self, w: &LassoWord) -> Result<bool> {
        for l in w.letters() {
            if !self.alphabet.contains(l) {
                return Err(Error::LetterOutOfRange {
                    letter: l.0,
                    aps: self.alphabet.len(),
                });
            }
        }
        let mut q = self.run(self.initial, &w.prefix);
        let v = w.cycle.len();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut trace = Vec::new();
        for step in 0.. {
            let i = step % v;
            if let Some(&start) = seen.get(&(q, i)) {
                let max = trace[start..].iter().map(|&s| self.colors[s]).max().unwrap_or(0);
                return Ok(max % 2 == 0);
            }
            seen.insert((q, i), step);
            trace.push(q);
            q = self.step(q, w.cycle[i]);
        }
        unreachable!()
    }

    fn successors(&self, q: usize) -> Vec<usize> {
        let mut out = self.trans[q].clone();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Recolors `part` with as few colors as possible while keeping the
    /// parity of the maximal color of every cycle inside `part`. Writes the
    /// new colors and returns the largest one used on a cycle.
    fn normalize(&self, part: &[usize], out: &mut [u32]) -> Option<u32> {
        let n = self.states();
        let mut inside = vec![false; n];
        for &q in part {
            inside[q] = true;
            out[q] = 0;
        }
        let (comp, count) = graph::sccs(n, part, |q| {
            self.successors(q).into_iter().filter(|&t| inside[t]).collect::<Vec<_>>()
        });
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
        for &q in part {
            members[comp[q]].push(q);
        }
        let mut top = None;
        for m in members {
            if m.len() == 1 && !self.trans[m[0]].contains(&m[0]) {
                continue;
            }
            let c = m.iter().map(|&q| self.colors[q]).max().unwrap_or(0);
            let rest: Vec<usize> = m.iter().copied().filter(|&q| self.colors[q] != c).collect();
            let v = match self.normalize(&rest, out) {
                None => c % 2,
                Some(inner) if inner % 2 == c % 2 => inner,
                Some(inner) => inner + 1,
            };
            for &q in m.iter().filter(|&&q| self.colors[q] == c) {
                out[q] = v;
            }
            top = top.max(Some(v));
        }
        top
    }

    /// Language-preserving reduction: keeps reachable states, recolors
    /// with the fewest colors that keep the parity of every cycle
    /// (transient states get color 0), then merges bisimilar states.
    pub fn reduce(&self) -> Dpa {
        let n = self.states();
        let (comp, count) = graph::sccs(n, &[self.initial], |q| self.successors(q));
        let reachable: Vec<usize> = (0..n).filter(|&q| comp[q] != usize::MAX).collect();
        let mut normalized = vec![0u32; n];
        self.normalize(&reachable, &mut normalized);
        // the minimal coloring can separate states that a coloring keeping
        // the original order within each component would merge, so both
        // quotients are built and the smaller one is kept
        let a = self.quotient(&reachable, &normalized);
        let b = self.quotient(&reachable, &self.local_colors(&comp, count));
        if b.states() < a.states() {
            b
        } else {
            a
        }
    }

    /// Colors compressed within each strongly connected component,
    /// keeping order and parity; transient states get color 0.
    fn local_colors(&self, comp: &[usize], count: usize) -> Vec<u32> {
        let n = self.states();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
        for q in 0..n {
            if comp[q] != usize::MAX {
                members[comp[q]].push(q);
            }
        }
        let mut colors = vec![0u32; n];
        for m in members {
            if m.len() == 1 && !self.trans[m[0]].contains(&m[0]) {
                continue;
            }
            let mut used: Vec<u32> = m.iter().map(|&q| self.colors[q]).collect();
            used.sort_unstable();
            used.dedup();
            let mut map = HashMap::new();
            let mut value = used[0] % 2;
            for (i, &col) in used.iter().enumerate() {
                if i > 0 && col % 2 != used[i - 1] % 2 {
                    value += 1;
                }
                map.insert(col, value);
            }
            for &q in &m {
                colors[q] = map[&self.colors[q]];
            }
        }
        colors
    }

    /// Moore quotient of the reachable part under the given coloring,
    /// numbered in breadth-first order from the initial state.
    fn quotient(&self, reachable: &[usize], colors: &[u32]) -> Dpa {
        let n = self.states();
        let mut block = vec![usize::MAX; n];
        for &q in reachable {
            block[q] = colors[q] as usize;
        }
        let mut blocks = reachable.iter().map(|&q| block[q]).collect::<std::collections::HashSet<_>>().len();
        loop {
            let mut sigs: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![usize::MAX; n];
            for &q in reachable {
                let sig = (block[q], self.trans[q].iter().map(|&t| block[t]).collect());
                let len = sigs.len();
                next[q] = *sigs.entry(sig).or_insert(len);
            }
            let stable = sigs.len() == blocks;
            blocks = sigs.len();
            block = next;
            if stable {
                break;
            }
        }
        // renumber blocks in order of first appearance from the initial state
        let mut rename = vec![usize::MAX; blocks];
        let mut next_id = 0;
        let mut bfs = std::collections::VecDeque::from([self.initial]);
        let mut seen = vec![false; n];
        seen[self.initial] = true;
        let mut rep = Vec::new();
        while let Some(q) = bfs.pop_front() {
            if rename[block[q]] == usize::MAX {
                rename[block[q]] = next_id;
                next_id += 1;
                rep.push(q);
            }
            for &t in &self.trans[q] {
                if !seen[t] {
                    seen[t] = true;
                    bfs.push_back(t);
                }
            }
        }
        Dpa {
            alphabet: self.alphabet.clone(),
            initial: 0,
            colors: rep.iter().map(|&q| colors[q]).collect(),
            trans: rep
                .iter()
                .map(|&q| self.trans[q].iter().map(|&t| rename[block[t]]).collect())
                .collect(),
        }
    }

    /// Whether some word is accepted from `qa` in `a` but rejected from
    /// `qb` in `b`. Both automata must share the alphabet.
    pub fn distinguishes(a: &Dpa, qa: usize, b: &Dpa, qb: usize) -> bool {
        let letters = a.alphabet.letter_count() as usize;
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(qa, qb)];
        ids.insert((qa, qb), 0);
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut at = 0;
        while at < pairs.len() {
            let (x, y) = pairs[at];
            let mut row = Vec::with_capacity(letters);
            for l in 0..letters {
                let key = (a.trans[x][l], b.trans[y][l]);
                let id = *ids.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    pairs.len() - 1
                });
                row.push(id);
            }
            row.sort_unstable();
            row.dedup();
            succ.push(row);
            at += 1;
        }
        let ca: Vec<u32> = pairs.iter().map(|&(x, _)| a.colors[x]).collect();
        let cb: Vec<u32> = pairs.iter().map(|&(_, y)| b.colors[y]).collect();
        // look for a cycle whose maximal `a` color is even and maximal `b`
        // color is odd, peeling off the offending maximal colors
        let mut work: Vec<Vec<usize>> = vec![(0..pairs.len()).collect()];
        let mut inside = vec![false; pairs.len()];
        while let Some(part) = work.pop() {
            for &v in &part {
                inside[v] = true;
            }
            let n = pairs.len();
            let (comp, count) = graph::sccs(n, &part, |v| succ[v].iter().copied().filter(|&t| inside[t]).collect::<Vec<_>>());
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
            for &v in &part {
                if comp[v] != usize::MAX {
                    members[comp[v]].push(v);
                }
            }
            for &v in &part {
                inside[v] = false;
            }
            for m in members {
                let cyclic = m.len() > 1 || succ[m[0]].contains(&m[0]);
                if !cyclic {
                    continue;
                }
                let top_a = m.iter().map(|&v| ca[v]).max().unwrap_or(0);
                let top_b = m.iter().map(|&v| cb[v]).max().unwrap_or(0);
                if top_a % 2 == 0 && top_b % 2 == 1 {
                    return true;
                }
                let rest: Vec<usize> = if top_a % 2 == 1 {
                    m.into_iter().filter(|&v| ca[v] != top_a).collect()
                } else {
                    m.into_iter().filter(|&v| cb[v] != top_b).collect()
                };
                if !rest.is_empty() {
                    work.push(rest);
                }
            }
        }
        false
    }

    /// Language equivalence of two automata over the same alphabet.
    pub fn equivalent(&self, other: &Dpa) -> bool {
        self.alphabet == other.alphabet
            && !Dpa::distinguishes(self, self.initial, other, other.initial)
            && !Dpa::distinguishes(other, other.initial, self, self.initial)
    }

    fn same_language(&self, x: usize, y: usize) -> bool {
        !Dpa::distinguishes(self, x, self, y) && !Dpa::distinguishes(self, y, self, x)
    }

    /// Redirects every transition into a state of `gone` to `to`.
    fn redirect(&self, gone: &[usize], to: usize) -> Dpa {
        let mut out = self.clone();
        for row in out.trans.iter_mut() {
            for t in row.iter_mut() {
                if gone.contains(t) {
                    *t = to;
                }
            }
        }
        if gone.contains(&out.initial) {
            out.initial = to;
        }
        out
    }

    /// [`Dpa::reduce`] followed by merging language-equivalent states.
    ///
    /// Redirecting transitions between language-equivalent states does not
    /// preserve the language of a parity automaton in general, so every
    /// candidate merge is kept only if the result is still equivalent to
    /// the input.
    pub fn minimize(&self) -> Dpa {
        let mut cur = self.reduce();
        // whole rounds shrink large automata quickly but settle in worse
        // local optima than the single-merge search below
        while cur.states() > 150 {
            let before = cur.states();
            let mut classes: Vec<Vec<usize>> = Vec::new();
            for q in 0..before {
                match classes.iter_mut().find(|c| cur.same_language(c[0], q)) {
                    Some(c) => c.push(q),
                    None => classes.push(vec![q]),
                }
            }
            // merged states stay in the table, unreachable, until the
            // round ends
            for class in classes.iter().filter(|c| c.len() > 1) {
                let all = cur.redirect(&class[1..], class[0]);
                if all.equivalent(self) {
                    cur = all;
                    continue;
                }
                let mut rep = class[0];
                for &m in &class[1..] {
                    let into_rep = cur.redirect(&[m], rep);
                    if into_rep.equivalent(self) {
                        cur = into_rep;
                        continue;
                    }
                    let into_m = cur.redirect(&[rep], m);
                    if into_m.equivalent(self) {
                        cur = into_m;
                        rep = m;
                    }
                }
            }
            cur = cur.reduce();
            if cur.states() == before {
                break;
            }
        }
        // single merges, re-deriving the classes after each success
        'search: loop {
            let n = cur.states();
            let mut classes: Vec<Vec<usize>> = Vec::new();
            for q in 0..n {
                match classes.iter_mut().find(|c| cur.same_language(c[0], q)) {
                    Some(c) => c.push(q),
                    None => classes.push(vec![q]),
                }
            }
            for class in classes.iter().filter(|c| c.len() > 1) {
                for &rep in class {
                    let rest: Vec<usize> = class.iter().copied().filter(|&q| q != rep).collect();
                    let all = cur.redirect(&rest, rep).reduce();
                    if all.states() < n && all.equivalent(self) {
                        cur = all;
                        continue 'search;
                    }
                }
                for &m in &class[1..] {
                    for (gone, to) in [(m, class[0]), (class[0], m)] {
                        let one = cur.redirect(&[gone], to).reduce();
                        if one.states() < n && one.equivalent(self) {
                            cur = one;
                            continue 'search;
                        }
                    }
                }
            }
            return cur;
        }
    }

    /// The same automaton read over `target`: propositions of `target`
    /// that this automaton does not mention are ignored. Fails if this
    /// automaton uses a proposition missing from `target`.
    pub fn over(&self, target: &Alphabet) -> Result<Dpa> {
        let mut bits = Vec::new();
        for name in self.alphabet.aps() {
            match target.index_of(name) {
                Some(b) => bits.push(b),
                None => {
                    return Err(Error::Alphabet(format!(
                        "automaton proposition `{name}` is not declared"
                    )))
                }
            }
        }
        let project = |l: Letter| {
            Letter(bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | ((l.has(b) as u32) << i)))
        };
        Ok(Dpa {
            alphabet: target.clone(),
            initial: self.initial,
            colors: self.colors.clone(),
            trans: self
                .trans
                .iter()
                .map(|row| target.letters().map(|l| row[project(l).0 as usize]).collect())
                .collect(),
        })
    }

    /// Product with the requirement that the proposition at `color_bit`
    /// changes its value infinitely often.
    ///
    /// Product states track the last value of the proposition and the
    /// maximal base color of the current block; a change step emits that
    /// maximum plus two, every other step emits 1.
    pub fn with_alternation(&self, color_bit: usize) -> Dpa {
        type Key = (usize, Option<bool>, u32, u32);
        let mut ids: HashMap<Key, usize> = HashMap::new();
        let mut keys: Vec<Key> = Vec::new();
        let mut trans: Vec<Vec<usize>> = Vec::new();
        let start: Key = (self.initial, None, self.colors[self.initial], 1);
        ids.insert(start, 0);
        keys.push(start);
        let mut at = 0;
        while at < keys.len() {
            let (q, last, block_max, _) = keys[at];
            let mut row = Vec::with_capacity(self.alphabet.letter_count() as usize);
            for l in self.alphabet.letters() {
                let t = self.step(q, l);
                let p = l.has(color_bit);
                let key = match last {
                    Some(prev) if prev != p => (t, Some(p), self.colors[t], block_max + 2),
                    _ => (t, Some(p), block_max.max(self.colors[t]), 1),
                };
                let id = *ids.entry(key).or_insert_with(|| {
                    keys.push(key);
                    keys.len() - 1
                });
                row.push(id);
            }
            trans.push(row);
            at += 1;
        }
        Dpa {
            alphabet: self.alphabet.clone(),
            initial: 0,
            colors: keys.iter().map(|k| k.3).collect(),
            trans,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a"]).unwrap()
    }

    fn w(prefix: &[u32], cycle: &[u32]) -> LassoWord {
        LassoWord::new(prefix.iter().map(|&b| Letter(b)).collect(), cycle.iter().map(|&b| Letter(b)).collect())
            .unwrap()
    }

    #[test]
    fn constant_colors() {
        let yes = Dpa::constant(ab(), 0);
        let no = Dpa::constant(ab(), 1);
        for word in [w(&[], &[0]), w(&[1, 0], &[1, 1, 0])] {
            assert!(yes.accepts(&word).unwrap());
            assert!(!no.accepts(&word).unwrap());
        }
    }

    #[test]
    fn toggling_colors() {
        // state 0 (color 1) and state 1 (color 2) swap on every letter
        let d = Dpa::new(ab(), 0, vec![1, 2], vec![vec![1, 1], vec![0, 0]]).unwrap();
        assert!(d.accepts(&w(&[], &[0])).unwrap());
        assert!(d.accepts(&w(&[0, 1, 1], &[1, 0, 1])).unwrap());
    }

    #[test]
    fn rejects_partial_tables() {
        assert!(Dpa::new(ab(), 0, vec![0], vec![vec![0]]).is_err());
        assert!(Dpa::new(ab(), 0, vec![0], vec![vec![0, 3]]).is_err());
        assert!(Dpa::new(ab(), 2, vec![0], vec![vec![0, 0]]).is_err());
    }

    #[test]
    fn reduction_merges_equivalent_states() {
        // two copies of "infinitely many a" (a-states colored 2)
        let d = Dpa::new(
            ab(),
            0,
            vec![1, 2, 1, 2],
            vec![vec![2, 1], vec![2, 3], vec![0, 3], vec![0, 1]],
        )
        .unwrap();
        let r = d.reduce();
        assert_eq!(r.states(), 2);
        for word in [w(&[], &[0]), w(&[], &[1]), w(&[1], &[0, 0, 1]), w(&[0], &[1, 0])] {
            assert_eq!(r.accepts(&word).unwrap(), d.accepts(&word).unwrap());
        }
    }

    #[test]
    fn minimization_merges_language_equivalent_states() {
        // "infinitely many a", with a redundant copy reached only via b
        // from the start; colors differ per copy so Moore merging fails
        let d = Dpa::new(
            ab(),
            0,
            vec![1, 2, 3, 4],
            vec![vec![0, 1], vec![0, 1], vec![2, 3], vec![2, 3]],
        )
        .unwrap();
        let big = Dpa::new(
            ab(),
            0,
            vec![1, 2, 1, 4, 3],
            vec![vec![0, 1], vec![3, 4], vec![2, 3], vec![2, 3], vec![2, 3]],
        )
        .unwrap();
        assert!(d.equivalent(&d.reduce()));
        let m = big.minimize();
        assert!(m.equivalent(&big));
        assert!(m.states() <= 2, "{m:?}");
        assert!(!Dpa::constant(ab(), 0).equivalent(&Dpa::constant(ab(), 1)));
        let inf_a = Dpa::new(ab(), 0, vec![1, 2], vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(Dpa::distinguishes(&Dpa::constant(ab(), 0), 0, &inf_a, 0));
        assert!(!Dpa::distinguishes(&inf_a, 0, &Dpa::constant(ab(), 0), 0));
    }

    #[test]
    fn alternation_requires_changes() {
        let d = Dpa::constant(ab(), 0).with_alternation(0);
        assert!(!d.accepts(&w(&[], &[1])).unwrap());
        assert!(!d.accepts(&w(&[0, 1], &[0])).unwrap());
        assert!(d.accepts(&w(&[], &[0, 1])).unwrap());
        assert!(d.accepts(&w(&[1], &[0, 0, 1, 1, 1])).unwrap());
        let never = Dpa::constant(ab(), 1).with_alternation(0);
        assert!(!never.accepts(&w(&[], &[0, 1])).unwrap());
    }

    #[test]
    fn alphabet_extension() {
        // "a now" over {a}, read over {b, a}
        let d = Dpa::new(ab(), 0, vec![1, 0, 1], vec![vec![2, 1], vec![1, 1], vec![2, 2]]).unwrap();
        let wide = d.over(&Alphabet::new(["b", "a"]).unwrap()).unwrap();
        assert!(wide.accepts(&w(&[2], &[1])).unwrap());
        assert!(!wide.accepts(&w(&[1], &[3])).unwrap());
        assert!(d.over(&Alphabet::new(["b"]).unwrap()).is_err());
    }
}
