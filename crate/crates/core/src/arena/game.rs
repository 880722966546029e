use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Player {
    I,
    O,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::I => Player::O,
            Player::O => Player::I,
        }
    }

    /// The player who wins when `priority` is the maximum seen infinitely
    /// often.
    pub fn of_priority(priority: u32) -> Player {
        if priority % 2 == 0 {
            Player::O
        } else {
            Player::I
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Player::I => 0,
            Player::O => 1,
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Player::I => "I",
            Player::O => "O",
        })
    }
}

/// Max-parity game with vertex priorities: Player O wins a play iff the
/// largest priority seen infinitely often is even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGame {
    owner: Vec<Player>,
    priority: Vec<u32>,
    succ: Vec<Vec<usize>>,
    initial: usize,
}

impl ParityGame {
    /// Checks that edges stay in range and that no vertex is terminal.
    /// Successor lists are sorted and duplicate edges dropped.
    pub fn new(owner: Vec<Player>, priority: Vec<u32>, mut succ: Vec<Vec<usize>>, initial: usize) -> Result<Self> {
        let n = owner.len();
        if priority.len() != n || succ.len() != n {
            return Err(Error::Invalid("owner, priority and edge lists differ in length".into()));
        }
        if initial >= n {
            return Err(Error::Invalid(format!("initial vertex {initial} out of range")));
        }
        for (v, row) in succ.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::Invalid(format!("vertex {v} has no successor")));
            }
            if let Some(&t) = row.iter().find(|&&t| t >= n) {
                return Err(Error::Invalid(format!("edge {v} -> {t} leaves the game")));
            }
        }
        for row in succ.iter_mut() {
            row.sort_unstable();
            row.dedup();
        }
        Ok(ParityGame {
            owner,
            priority,
            succ,
            initial,
        })
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn priority(&self, v: usize) -> u32 {
        self.priority[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn dump(&self) -> GameDump {
        GameDump {
            initial: self.initial,
            vertices: (0..self.len())
                .map(|v| DumpVertex {
                    id: v,
                    owner: self.owner[v],
                    priority: self.priority[v],
                })
                .collect(),
            edges: (0..self.len())
                .flat_map(|v| self.succ[v].iter().map(move |&t| [v, t]))
                .collect(),
        }
    }

    /// Whether every play that starts in `roots` and follows `strategy` on
    /// the vertices of its owner is won by that owner. Checked by looking
    /// for a reachable cycle of the opponent's parity.
    pub fn strategy_wins(&self, strategy: &PositionalStrategy, roots: &[usize]) -> bool {
        let me = strategy.owner;
        let succ = |v: usize| -> Vec<(usize, u32)> {
            // the odd-cycle search is phrased for Player O; shift
            // priorities by one to ask the question for Player I
            let color = self.priority[v] + u32::from(me == Player::I);
            if self.owner[v] == me {
                match strategy.choice(v) {
                    Some(t) => vec![(t, color)],
                    None => Vec::new(),
                }
            } else {
                self.succ[v].iter().map(|&t| (t, color)).collect()
            }
        };
        // a strategy must be defined wherever the play can go
        let seen = graph::reachable(self.len(), roots, |v| succ(v).into_iter().map(|(t, _)| t).collect::<Vec<_>>());
        if (0..self.len()).any(|v| seen[v] && self.owner[v] == me && strategy.choice(v).is_none()) {
            return false;
        }
        graph::odd_cycle(self.len(), roots, succ).is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DumpVertex {
    pub id: usize,
    pub owner: Player,
    pub priority: u32,
}

/// Diagnostic listing of a game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameDump {
    pub initial: usize,
    pub vertices: Vec<DumpVertex>,
    pub edges: Vec<[usize; 2]>,
}

/// Successor choices of one player on (part of) its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionalStrategy {
    pub owner: Player,
    choice: Vec<Option<usize>>,
}

impl PositionalStrategy {
    pub fn new(owner: Player, vertices: usize) -> Self {
        PositionalStrategy {
            owner,
            choice: vec![None; vertices],
        }
    }

    pub fn choice(&self, v: usize) -> Option<usize> {
        self.choice.get(v).copied().flatten()
    }

    pub fn set(&mut self, v: usize, target: usize) {
        self.choice[v] = Some(target);
    }

    /// `(vertex, successor)` pairs in vertex order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.choice.iter().enumerate().filter_map(|(v, c)| c.map(|t| (v, t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_vertices_are_rejected() {
        assert!(ParityGame::new(vec![Player::O], vec![0], vec![vec![]], 0).is_err());
        assert!(ParityGame::new(vec![Player::O], vec![0], vec![vec![1]], 0).is_err());
        assert!(ParityGame::new(vec![Player::O], vec![0], vec![vec![0]], 0).is_ok());
    }

    #[test]
    fn strategy_check_sees_opponent_moves() {
        // I at 0 may go to 1 (priority 1, loops) or 2 (priority 2, loops)
        let g = ParityGame::new(
            vec![Player::I, Player::O, Player::O],
            vec![0, 1, 2],
            vec![vec![1, 2], vec![1], vec![2]],
            0,
        )
        .unwrap();
        let mut o = PositionalStrategy::new(Player::O, 3);
        o.set(1, 1);
        o.set(2, 2);
        assert!(!g.strategy_wins(&o, &[0]));
        assert!(g.strategy_wins(&o, &[2]));
        let mut i = PositionalStrategy::new(Player::I, 3);
        i.set(0, 1);
        assert!(g.strategy_wins(&i, &[0]));
    }
}
