//! Finite-state delay strategies read off a positional strategy of the
//! abstraction game.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::arena::{AbstractionGame, Player, Solution, Vertex};
use crate::bitset::BitSet;
use crate::error::{Error, Result, Stage};
use crate::logic::Letter;
use crate::tracking::Abstraction;

/// State of a [`MealyStrategy`]: either nothing read yet, or the behavior
/// of the last input block together with that block, whose output is
/// still owed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MealyState {
    Start,
    Running { r: usize, block: Vec<Letter> },
}

/// Block-synchronous transducer: it reads input blocks of length `d` and,
/// from the second block on, answers each with the output block for the
/// previous input block.
#[derive(Debug, Clone)]
pub struct MealyStrategy {
    abstraction: Arc<Abstraction>,
    /// Player O's pick from the domain of each behavior
    pick: Vec<Option<u32>>,
    block_length: usize,
    stripped: bool,
    flip: u32,
}

impl MealyStrategy {
    pub fn abstraction(&self) -> &Abstraction {
        &self.abstraction
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn is_stripped(&self) -> bool {
        self.stripped
    }

    /// The tracking state chosen for behavior `r`, where the game strategy
    /// is defined.
    pub fn pick(&self, r: usize) -> Option<u32> {
        self.pick[r]
    }

    pub fn initial(&self) -> MealyState {
        MealyState::Start
    }

    /// Number of input letters (input blocks are words over `0..n`).
    pub fn input_letters(&self) -> u32 {
        self.abstraction.tracking().input_letters()
    }

    /// Number of output letters, counting the coloring proposition unless
    /// stripped.
    pub fn output_letters(&self) -> u32 {
        let t = self.abstraction.tracking();
        if self.stripped {
            t.output_letters() / 2
        } else {
            t.output_letters()
        }
    }

    /// The same machine with the coloring proposition removed from every
    /// output letter.
    pub fn strip(&self) -> MealyStrategy {
        MealyStrategy {
            stripped: true,
            ..self.clone()
        }
    }

    /// The same machine with `mask` XORed into every output letter. Used
    /// to build deliberately wrong strategies.
    pub fn with_flipped_outputs(&self, mask: u32) -> Result<MealyStrategy> {
        if mask >= self.abstraction.tracking().output_letters() {
            return Err(Error::Invalid(format!("flip mask {mask} exceeds the output letters")));
        }
        Ok(MealyStrategy {
            flip: mask,
            ..self.clone()
        })
    }

    fn check_block(&self, block: &[Letter]) -> Result<()> {
        if block.len() != self.block_length {
            return Err(Error::Invalid(format!(
                "input block has length {}, expected {}",
                block.len(),
                self.block_length
            )));
        }
        let letters = self.input_letters();
        if let Some(a) = block.iter().find(|a| a.0 >= letters) {
            return Err(Error::LetterOutOfRange {
                letter: a.0,
                aps: self.abstraction.tracking().inputs(),
            });
        }
        Ok(())
    }

    fn picked(&self, r: usize) -> Result<u32> {
        self.pick[r]
            .ok_or_else(|| Error::internal(Stage::Extraction, format!("no strategy move at behavior {r}")))
    }

    /// The behavior reached after `r` when Player I plays `block`.
    pub fn successor(&self, r: usize, block: &[Letter]) -> Result<usize> {
        let domain = self.abstraction.image_domain(r, self.picked(r)?);
        self.abstraction
            .behavior_of(domain, block)
            .ok_or_else(|| Error::internal(Stage::Extraction, "input block witnesses no pumpable behavior"))
    }

    /// Reads one input block; returns the next state and, except for the
    /// first block, an output block.
    pub fn step(&self, state: &MealyState, block: &[Letter]) -> Result<(MealyState, Option<Vec<Letter>>)> {
        self.check_block(block)?;
        match state {
            MealyState::Start => {
                let r = self
                    .abstraction
                    .behavior_of(0, block)
                    .ok_or_else(|| Error::internal(Stage::Extraction, "first block witnesses no pumpable behavior"))?;
                Ok((
                    MealyState::Running {
                        r,
                        block: block.to_vec(),
                    },
                    None,
                ))
            }
            MealyState::Running { r, block: owed } => {
                let next = self.successor(*r, block)?;
                let out = self.respond(self.picked(*r)?, owed, self.picked(next)?)?;
                Ok((
                    MealyState::Running {
                        r: next,
                        block: block.to_vec(),
                    },
                    Some(out),
                ))
            }
        }
    }

    /// The lexicographically least output block that, together with
    /// `inputs`, leads the tracking automaton from the reset copy of `from`
    /// exactly to `to`.
    pub fn respond(&self, from: u32, inputs: &[Letter], to: u32) -> Result<Vec<Letter>> {
        let t = self.abstraction.tracking();
        let n = t.len();
        let outs = t.output_letters();
        let start = t.reset(from);
        let mut layers = vec![BitSet::singleton(n, start as usize)];
        for &a in inputs {
            let next = t.project_step(layers.last().expect("nonempty"), a);
            layers.push(next);
        }
        // keep only states from which `to` is still reachable in time
        let mut live = BitSet::new(n);
        if layers[inputs.len()].contains(to as usize) {
            live.insert(to as usize);
        }
        let mut feasible = vec![BitSet::new(n); inputs.len() + 1];
        feasible[inputs.len()] = live;
        for i in (0..inputs.len()).rev() {
            let mut keep = BitSet::new(n);
            for x in layers[i].iter() {
                if (0..outs).any(|b| feasible[i + 1].contains(t.step(x as u32, t.combine(inputs[i], Letter(b))) as usize)) {
                    keep.insert(x);
                }
            }
            feasible[i] = keep;
        }
        if !feasible[0].contains(start as usize) {
            return Err(Error::internal(
                Stage::Extraction,
                format!("no output block steers tracking state {from} to {to}"),
            ));
        }
        let mut x = start;
        let mut out = Vec::with_capacity(inputs.len());
        for (i, &a) in inputs.iter().enumerate() {
            let b = (0..outs)
                .find(|&b| feasible[i + 1].contains(t.step(x, t.combine(a, Letter(b))) as usize))
                .expect("feasible layer has a continuation");
            x = t.step(x, t.combine(a, Letter(b)));
            out.push(Letter(b ^ self.flip));
        }
        if self.stripped {
            let mask = !(1u32 << t.output_color_bit());
            for b in out.iter_mut() {
                b.0 &= mask;
            }
        }
        Ok(out)
    }

    /// All input blocks of length `d`, in lexicographic order.
    pub fn blocks(&self) -> impl Iterator<Item = Vec<Letter>> + '_ {
        let letters = self.input_letters() as u64;
        let d = self.block_length;
        let total = letters.pow(d as u32);
        (0..total).map(move |mut code| {
            let mut block = vec![Letter(0); d];
            for slot in block.iter_mut().rev() {
                *slot = Letter((code % letters) as u32);
                code /= letters;
            }
            block
        })
    }

    /// The explicit transition table over the reachable states, or `None`
    /// if it would have more than `cap` transitions.
    pub fn table(&self, cap: usize) -> Result<Option<MealyTable>> {
        let per_state = (self.input_letters() as usize).checked_pow(self.block_length as u32);
        let Some(per_state) = per_state.filter(|&p| p <= cap) else {
            return Ok(None);
        };
        let mut ids: HashMap<MealyState, usize> = HashMap::new();
        let mut states = vec![MealyState::Start];
        ids.insert(MealyState::Start, 0);
        let mut transitions = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            if transitions.len() + per_state > cap {
                return Ok(None);
            }
            for block in self.blocks() {
                let (next, output) = self.step(&states[s], &block)?;
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        states.push(next.clone());
                        ids.insert(next, states.len() - 1);
                        queue.push_back(states.len() - 1);
                        states.len() - 1
                    }
                };
                transitions.push(MealyTransition {
                    from: s,
                    input: block.iter().map(|a| a.0).collect(),
                    to: id,
                    output: output.map(|b| b.iter().map(|l| l.0).collect()),
                });
            }
        }
        Ok(Some(MealyTable {
            block_length: self.block_length,
            states,
            transitions,
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MealyTransition {
    pub from: usize,
    pub input: Vec<u32>,
    pub to: usize,
    /// absent on the first block
    pub output: Option<Vec<u32>>,
}

/// Reachable part of a strategy as an explicit table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MealyTable {
    pub block_length: usize,
    pub states: Vec<MealyState>,
    pub transitions: Vec<MealyTransition>,
}

/// Turns Player O's winning positional strategy in the abstraction game
/// into a delay strategy with block length `d`.
pub fn extract(solution: &Solution, game: &AbstractionGame, abstraction: Arc<Abstraction>, d: usize) -> Result<MealyStrategy> {
    if solution.winner(game.game.initial()) != Player::O {
        return Err(Error::Invalid("Player O does not win the abstraction game".into()));
    }
    if d < abstraction.block_length() || d == 0 {
        return Err(Error::Invalid(format!(
            "block length {d} is below the abstraction's {}",
            abstraction.block_length()
        )));
    }
    let sigma = solution.strategy(Player::O);
    let pick = (0..abstraction.behavior_count())
        .map(|r| {
            sigma.choice(game.behavior_vertex(r)).map(|v| match game.vertex(v) {
                Vertex::Choice { q, .. } => Ok(q),
                other => Err(Error::internal(Stage::Extraction, format!("strategy leads to {other:?}"))),
            })
        })
        .map(Option::transpose)
        .collect::<Result<Vec<_>>>()?;
    Ok(MealyStrategy {
        abstraction,
        pick,
        block_length: d,
        stripped: false,
        flip: 0,
    })
}
