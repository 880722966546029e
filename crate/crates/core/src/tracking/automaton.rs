use std::collections::HashMap;

use serde::Serialize;

use crate::automata::Dpa;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::logic::{Letter, COLOR_PROP};

/// Last value of the coloring proposition and whether it has changed
/// since the last reset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ColorFlag {
    pub last: bool,
    pub changed: bool,
}

/// `upd((t, s), t')`: the flag stays unchanged only if it was unchanged and
/// the color did not flip.
pub fn upd(flag: ColorFlag, next: bool) -> ColorFlag {
    ColorFlag {
        last: next,
        changed: flag.changed || flag.last != next,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TrackingState {
    pub q: usize,
    pub m: u32,
    pub flag: ColorFlag,
}

/// The tracking automaton, materialized on the states reachable from its
/// initial state and from reset copies of reachable states.
#[derive(Debug, Clone)]
pub struct Tracking {
    dpa: Dpa,
    inputs: usize,
    states: Vec<TrackingState>,
    index: HashMap<TrackingState, u32>,
    /// `delta[x][letter]` over the full alphabet
    delta: Vec<Vec<u32>>,
    /// `proj[x][a]`: successors under input `a` and every output letter
    proj: Vec<Vec<Vec<u32>>>,
    reset: Vec<u32>,
}

impl Tracking {
    /// Builds the tracking automaton for `dpa`, whose alphabet must list the
    /// `inputs` input propositions first and the coloring proposition last.
    pub fn new(dpa: Dpa, inputs: usize) -> Result<Tracking> {
        let aps = dpa.alphabet().aps();
        if aps.last().map(String::as_str) != Some(COLOR_PROP) || inputs >= aps.len() {
            return Err(Error::Alphabet(format!(
                "tracking needs inputs first and `{COLOR_PROP}` last, got {:?}",
                aps
            )));
        }
        let color_bit = aps.len() - 1;
        let letters = dpa.alphabet().letter_count();
        let mut t = Tracking {
            inputs,
            states: Vec::new(),
            index: HashMap::new(),
            delta: Vec::new(),
            proj: Vec::new(),
            reset: Vec::new(),
            dpa,
        };
        let q0 = t.dpa.initial();
        let init = TrackingState {
            q: q0,
            m: t.dpa.color(q0),
            flag: ColorFlag {
                last: false,
                changed: false,
            },
        };
        t.intern(init);
        let mut at = 0;
        while at < t.states.len() {
            let x = t.states[at];
            let row: Vec<u32> = (0..letters)
                .map(|l| {
                    let q = t.dpa.step(x.q, Letter(l));
                    t.intern(TrackingState {
                        q,
                        m: x.m.max(t.dpa.color(q)),
                        flag: upd(x.flag, Letter(l).has(color_bit)),
                    })
                })
                .collect();
            let r = t.intern(TrackingState {
                q: x.q,
                m: t.dpa.color(x.q),
                flag: ColorFlag {
                    last: x.flag.last,
                    changed: false,
                },
            });
            t.delta.push(row);
            t.reset.push(r);
            at += 1;
        }
        let input_letters = 1u32 << inputs;
        t.proj = t
            .delta
            .iter()
            .map(|row| {
                (0..input_letters)
                    .map(|a| {
                        let mut succ: Vec<u32> = row
                            .iter()
                            .enumerate()
                            .filter(|(l, _)| (*l as u32) & (input_letters - 1) == a)
                            .map(|(_, &y)| y)
                            .collect();
                        succ.sort_unstable();
                        succ.dedup();
                        succ
                    })
                    .collect()
            })
            .collect();
        Ok(t)
    }

    fn intern(&mut self, x: TrackingState) -> u32 {
        if let Some(&id) = self.index.get(&x) {
            return id;
        }
        let id = self.states.len() as u32;
        self.states.push(x);
        self.index.insert(x, id);
        id
    }

    pub fn dpa(&self) -> &Dpa {
        &self.dpa
    }

    /// Number of input propositions (the low bits of every letter).
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Number of output propositions including the coloring proposition.
    pub fn outputs(&self) -> usize {
        self.dpa.alphabet().len() - self.inputs
    }

    pub fn input_letters(&self) -> u32 {
        1 << self.inputs
    }

    pub fn output_letters(&self) -> u32 {
        1 << self.outputs()
    }

    /// Position of the coloring proposition inside an output letter.
    pub fn output_color_bit(&self) -> usize {
        self.outputs() - 1
    }

    /// Full letter from an input and an output part.
    pub fn combine(&self, a: Letter, b: Letter) -> Letter {
        Letter(a.0 | (b.0 << self.inputs))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial(&self) -> u32 {
        0
    }

    pub fn state(&self, x: u32) -> TrackingState {
        self.states[x as usize]
    }

    pub fn states(&self) -> &[TrackingState] {
        &self.states
    }

    pub fn id_of(&self, x: &TrackingState) -> Option<u32> {
        self.index.get(x).copied()
    }

    pub fn step(&self, x: u32, letter: Letter) -> u32 {
        self.delta[x as usize][letter.0 as usize]
    }

    /// `(q, Ω(q), (t, 0))` for `x = (q, m, (t, s))`.
    pub fn reset(&self, x: u32) -> u32 {
        self.reset[x as usize]
    }

    pub fn project_successors(&self, x: u32, a: Letter) -> &[u32] {
        &self.proj[x as usize][a.0 as usize]
    }

    /// `δ_P(S, a)`: all successors of `S` under input `a` and any output.
    pub fn project_step(&self, set: &BitSet, a: Letter) -> BitSet {
        let mut out = BitSet::new(self.len());
        for x in set.iter() {
            for &y in &self.proj[x][a.0 as usize] {
                out.insert(y as usize);
            }
        }
        out
    }

    /// The tracking automaton as a parity automaton colored by `m`.
    pub fn as_dpa(&self) -> Dpa {
        Dpa::new(
            self.dpa.alphabet().clone(),
            0,
            self.states.iter().map(|x| x.m).collect(),
            self.delta.iter().map(|row| row.iter().map(|&y| y as usize).collect()).collect(),
        )
        .expect("tracking table is total")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Alphabet;

    #[test]
    fn update_rule() {
        let f = |last, changed| ColorFlag { last, changed };
        assert_eq!(upd(f(true, false), true), f(true, false));
        assert_eq!(upd(f(false, false), true), f(true, true));
        assert_eq!(upd(f(false, true), false), f(false, true));
    }

    #[test]
    fn single_state_base() {
        let ab = Alphabet::new(["a", "b", "p"]).unwrap();
        let t = Tracking::new(Dpa::constant(ab, 0), 1).unwrap();
        assert!(t.len() <= 4);
        assert!(t.states().iter().all(|x| x.q == 0 && x.m == 0));
        let dpa = t.as_dpa();
        assert!((0..t.len()).all(|x| dpa.color(x) == t.state(x as u32).m));

        // two projected steps from the initial reset state reach both flags
        let mut s = BitSet::singleton(t.len(), 0);
        s = t.project_step(&s, Letter(0));
        s = t.project_step(&s, Letter(1));
        let changed: Vec<bool> = s.iter().map(|x| t.state(x as u32).flag.changed).collect();
        assert!(changed.contains(&true) && changed.contains(&false));
        assert!(t.project_step(&BitSet::new(t.len()), Letter(0)).is_empty());
    }

    #[test]
    fn alphabet_layout_is_checked() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        assert!(Tracking::new(Dpa::constant(ab, 0), 1).is_err());
    }
}
