//! Explicit reference solver for games with a constant lookahead.
//!
//! Player I opens by choosing `f0` input letters; afterwards the players
//! alternate, O answering the oldest unanswered input and I appending one
//! new input. Positions carry the parity automaton's state and the queue of
//! unanswered inputs, so the game is finite and solved by the same parity
//! game solver as the main pipeline. Prompt conditions are handled by
//! unrolling every `FP ψ` into `ψ ∨ Xψ ∨ … ∨ X^k ψ`.

use std::collections::HashMap;

use serde::Serialize;

use crate::arena::{solve, ParityGame, Player, Solution};
use crate::automata::{determinize_capped, ltl_to_nba_capped, Dpa, DEFAULT_DPA_CAP, DEFAULT_NBA_CAP};
use crate::error::{Error, Result, Stage};
use crate::logic::{Formula, Letter, Partition};

pub const DEFAULT_ORACLE_BUDGET: usize = 4_000_000;

/// A position of the buffered game.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BufferedVertex {
    pub state: usize,
    /// Unanswered input letters, oldest first.
    pub queue: Vec<u32>,
    pub turn: Player,
}

/// The finite game in which O answers with a fixed lookahead of `f0`.
#[derive(Debug, Clone)]
pub struct BufferedGame {
    dpa: Dpa,
    inputs: usize,
    f0: usize,
    vertices: Vec<BufferedVertex>,
    game: ParityGame,
}

impl BufferedGame {
    /// Builds the game for `dpa`, whose first `inputs` propositions belong
    /// to I. Fails once more than `budget` positions are reachable.
    pub fn build(dpa: &Dpa, inputs: usize, f0: usize, budget: usize) -> Result<Self> {
        let aps = dpa.alphabet().len();
        if inputs > aps {
            return Err(Error::Invalid(format!("{inputs} inputs declared for {aps} propositions")));
        }
        if f0 == 0 {
            return Err(Error::Invalid("the lookahead must be at least 1".into()));
        }
        let input_letters = 1u32 << inputs;
        let output_letters = 1u32 << (aps - inputs);

        let mut index: HashMap<(usize, Vec<u32>), usize> = HashMap::new();
        let mut vertices: Vec<BufferedVertex> = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut intern = |state: usize, queue: Vec<u32>, vertices: &mut Vec<BufferedVertex>| -> Result<usize> {
            if let Some(&v) = index.get(&(state, queue.clone())) {
                return Ok(v);
            }
            if vertices.len() >= budget {
                return Err(Error::Capacity {
                    stage: Stage::Oracle,
                    what: "buffered game positions",
                    limit: budget,
                });
            }
            let turn = if queue.len() == f0 { Player::O } else { Player::I };
            index.insert((state, queue.clone()), vertices.len());
            vertices.push(BufferedVertex { state, queue, turn });
            Ok(vertices.len() - 1)
        };

        intern(dpa.initial(), Vec::new(), &mut vertices)?;
        let mut next = 0;
        while next < vertices.len() {
            let BufferedVertex { state, queue, turn } = vertices[next].clone();
            let mut out = Vec::new();
            if turn == Player::I {
                for a in 0..input_letters {
                    let mut q = queue.clone();
                    q.push(a);
                    out.push(intern(state, q, &mut vertices)?);
                }
            } else {
                for b in 0..output_letters {
                    let letter = Letter(queue[0] | b << inputs);
                    out.push(intern(dpa.step(state, letter), queue[1..].to_vec(), &mut vertices)?);
                }
            }
            succ.push(out);
            next += 1;
        }

        // every automaton state of the run is current at exactly one O position
        let owner = vertices.iter().map(|v| v.turn).collect();
        let priority = vertices
            .iter()
            .map(|v| if v.turn == Player::O { dpa.color(v.state) } else { 0 })
            .collect();
        let game = ParityGame::new(owner, priority, succ, 0)?;
        Ok(BufferedGame {
            dpa: dpa.clone(),
            inputs,
            f0,
            vertices,
            game,
        })
    }

    pub fn dpa(&self) -> &Dpa {
        &self.dpa
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn lookahead(&self) -> usize {
        self.f0
    }

    pub fn vertex(&self, v: usize) -> &BufferedVertex {
        &self.vertices[v]
    }

    pub fn game(&self) -> &ParityGame {
        &self.game
    }
}

/// Result of an explicit solve.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub winner: Player,
    pub game: BufferedGame,
    pub solution: Solution,
}

impl OracleOutcome {
    pub fn positions(&self) -> usize {
        self.game.game.len()
    }
}

/// Solves the game with constant lookahead `f0` for a parity condition
/// whose first `inputs` propositions are inputs.
pub fn solve_explicit(dpa: &Dpa, inputs: usize, f0: usize) -> Result<OracleOutcome> {
    solve_explicit_capped(dpa, inputs, f0, DEFAULT_ORACLE_BUDGET)
}

pub fn solve_explicit_capped(dpa: &Dpa, inputs: usize, f0: usize, budget: usize) -> Result<OracleOutcome> {
    let game = BufferedGame::build(dpa, inputs, f0, budget)?;
    let solution = solve(&game.game);
    let winner = solution.winner(game.game.initial());
    log::debug!("oracle f0 = {f0}: {} positions, winner {winner}", game.game.len());
    Ok(OracleOutcome { winner, game, solution })
}

/// Replaces every `FP ψ` by `ψ ∨ Xψ ∨ … ∨ X^k ψ`.
pub fn unroll_prompt(formula: &Formula, k: usize) -> Formula {
    formula.map_bottom_up(&mut |f| match f {
        Formula::PromptFinally(psi) => {
            let mut shifted = *psi;
            let mut disjuncts = Vec::with_capacity(k + 1);
            for _ in 0..k {
                disjuncts.push(shifted.clone());
                shifted = Formula::next(shifted);
            }
            disjuncts.push(shifted);
            Formula::or_all(disjuncts).expect("at least one disjunct")
        }
        other => other,
    })
}

/// Solves the game for `formula` with prompt bound `k` and lookahead `f0`.
/// For an LTL formula `k` has no effect.
pub fn solve_prompt_explicit(formula: &Formula, part: &Partition, k: usize, f0: usize) -> Result<OracleOutcome> {
    let ltl = unroll_prompt(formula, k);
    let nba = ltl_to_nba_capped(&ltl, &part.alphabet(), DEFAULT_NBA_CAP)?;
    let dpa = determinize_capped(&nba, DEFAULT_DPA_CAP)?;
    solve_explicit(&dpa, part.inputs().len(), f0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Alphabet};

    fn part(i: &[&str], o: &[&str]) -> Partition {
        Partition::new(i.iter().copied(), o.iter().copied()).unwrap()
    }

    #[test]
    fn unrolling_shape() {
        let p = part(&["q"], &["r"]);
        let f = parse_formula("FP r", &p).unwrap();
        assert_eq!(unroll_prompt(&f, 0), Formula::atom("r"));
        let two = unroll_prompt(&f, 2);
        assert!(two.is_ltl());
        assert_eq!(two, parse_formula("r | X r | X X r", &p).unwrap());
    }

    #[test]
    fn positions_count() {
        // one state, one input, one output: queues of length 0..=f0
        let dpa = Dpa::constant(Alphabet::new(["a", "b"]).unwrap(), 0);
        let out = solve_explicit(&dpa, 1, 2).unwrap();
        assert_eq!(out.positions(), 1 + 2 + 4);
        assert_eq!(out.winner, Player::O);
        assert_eq!(out.game.vertex(0).turn, Player::I);
    }

    #[test]
    fn output_predicts_next_input() {
        let p = part(&["a"], &["b"]);
        let f = parse_formula("G (b <-> X a)", &p).unwrap();
        assert_eq!(solve_prompt_explicit(&f, &p, 0, 1).unwrap().winner, Player::I);
        assert_eq!(solve_prompt_explicit(&f, &p, 0, 2).unwrap().winner, Player::O);
    }

    #[test]
    fn prompt_examples() {
        let p = part(&["q"], &["r"]);
        let f = parse_formula("G (q -> FP r)", &p).unwrap();
        assert_eq!(solve_prompt_explicit(&f, &p, 0, 1).unwrap().winner, Player::O);
        let p = part(&["a"], &["b"]);
        let f = parse_formula("FP a", &p).unwrap();
        for k in 0..3 {
            assert_eq!(solve_prompt_explicit(&f, &p, k, 2).unwrap().winner, Player::I);
        }
    }

    #[test]
    fn more_lookahead_never_hurts_o() {
        let p = part(&["a"], &["b"]);
        for text in ["G (b <-> X X a)", "G (b <-> a)", "F G b", "G (a -> F b)", "G (b -> X !a)"] {
            let f = parse_formula(text, &p).unwrap();
            let wins: Vec<bool> = (1..=3)
                .map(|f0| solve_prompt_explicit(&f, &p, 0, f0).unwrap().winner == Player::O)
                .collect();
            assert!(wins.windows(2).all(|w| !w[0] || w[1]), "{text}: {wins:?}");
        }
    }
}
