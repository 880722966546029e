//! The game on behaviors: Player I opens with a behavior over the initial
//! domain, Player O answers with a state of its domain, Player I picks a
//! behavior over that state's image, and so on.

use serde::Serialize;

use super::game::{ParityGame, Player};
use crate::error::{Error, Result, Stage};
use crate::tracking::Abstraction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Vertex {
    Initial,
    /// a pumpable behavior, by global index
    Behavior(usize),
    /// a behavior together with Player O's pick from its domain
    Choice { r: usize, q: u32 },
}

#[derive(Debug, Clone)]
pub struct AbstractionGame {
    pub game: ParityGame,
    vertices: Vec<Vertex>,
    /// first choice vertex of each behavior; its choices follow in the
    /// order of the domain's states
    choice_base: Vec<usize>,
}

impl AbstractionGame {
    pub fn vertex(&self, v: usize) -> Vertex {
        self.vertices[v]
    }

    pub fn behavior_vertex(&self, r: usize) -> usize {
        1 + r
    }

    pub fn choice_vertex(&self, abstraction: &Abstraction, r: usize, q: u32) -> Option<usize> {
        let dom = abstraction.domain(abstraction.domain_of(r));
        dom.position(q).map(|i| self.choice_base[r] + i)
    }
}

/// Builds the game over all behaviors of the abstraction. Vertex 0 is the
/// initial vertex, vertices `1..=B` are the behaviors in index order, the
/// choice vertices follow grouped by behavior.
pub fn build_game(abstraction: &Abstraction) -> Result<AbstractionGame> {
    let b = abstraction.behavior_count();
    let domains = abstraction.domains();
    let mut over: Vec<Vec<usize>> = vec![Vec::new(); domains.len()];
    for (d, dom) in domains.iter().enumerate() {
        for &node in &dom.behaviors {
            let r = abstraction
                .behavior_id(d, node)
                .ok_or_else(|| Error::internal(Stage::Game, format!("behavior node {node} of domain {d} unindexed")))?;
            over[d].push(1 + r);
        }
        if over[d].is_empty() {
            return Err(Error::internal(Stage::Game, format!("domain {d} has no pumpable behavior")));
        }
    }

    let mut vertices = vec![Vertex::Initial];
    vertices.extend((0..b).map(Vertex::Behavior));
    let mut choice_base = Vec::with_capacity(b);
    for r in 0..b {
        choice_base.push(vertices.len());
        for &q in &domains[abstraction.domain_of(r)].states {
            vertices.push(Vertex::Choice { r, q });
        }
    }

    let tracking = abstraction.tracking();
    let mut owner = Vec::with_capacity(vertices.len());
    let mut priority = Vec::with_capacity(vertices.len());
    let mut succ = Vec::with_capacity(vertices.len());
    for (v, vertex) in vertices.iter().enumerate() {
        match *vertex {
            Vertex::Initial => {
                owner.push(Player::I);
                priority.push(0);
                succ.push(over[0].clone());
            }
            Vertex::Behavior(r) => {
                let n = domains[abstraction.domain_of(r)].states.len();
                owner.push(Player::O);
                priority.push(0);
                succ.push((choice_base[r]..choice_base[r] + n).collect());
            }
            Vertex::Choice { r, q } => {
                let image = abstraction.image_domain(r, q);
                if abstraction.image(r, q).is_empty() {
                    return Err(Error::internal(Stage::Game, format!("empty image at vertex {v}")));
                }
                owner.push(Player::I);
                priority.push(tracking.state(q).m);
                succ.push(over[image].clone());
            }
        }
    }
    let game = ParityGame::new(owner, priority, succ, 0)?;
    Ok(AbstractionGame {
        game,
        vertices,
        choice_base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::solve;
    use crate::automata::Dpa;
    use crate::logic::Alphabet;
    use crate::tracking::{Tracking, DEFAULT_BUDGET};

    fn abstraction(color: u32) -> Abstraction {
        let ab = Alphabet::new(["a", "b", "p"]).unwrap();
        Abstraction::build(Tracking::new(Dpa::constant(ab, color), 1).unwrap(), DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn accepting_everything_is_won_by_o() {
        let a = abstraction(0);
        let g = build_game(&a).unwrap();
        assert_eq!(g.game.successors(0).len(), a.domain(0).behaviors.len());
        for v in 0..g.game.len() {
            if let Vertex::Choice { r, q } = g.vertex(v) {
                assert_eq!(g.game.priority(v), 0);
                assert!(a.domain(a.domain_of(r)).position(q).is_some());
                assert_eq!(g.choice_vertex(&a, r, q), Some(v));
            }
        }
        assert_eq!(solve(&g.game).winner(0), Player::O);
    }

    #[test]
    fn rejecting_everything_is_won_by_i() {
        let a = abstraction(1);
        let g = build_game(&a).unwrap();
        let s = solve(&g.game);
        assert_eq!(s.winner(0), Player::I);
        assert!(g.game.strategy_wins(s.strategy(Player::I), &[0]));
    }
}
