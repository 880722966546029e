//! Recursive attractor decomposition.

use super::game::{ParityGame, Player, PositionalStrategy};

/// Winning regions and positional winning strategies of both players.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    winner: Vec<Player>,
    strategies: [PositionalStrategy; 2],
}

impl Solution {
    pub fn winner(&self, v: usize) -> Player {
        self.winner[v]
    }

    pub fn region(&self, player: Player) -> Vec<usize> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == player).collect()
    }

    /// The strategy of `player`, defined on its vertices inside its
    /// winning region.
    pub fn strategy(&self, player: Player) -> &PositionalStrategy {
        &self.strategies[player.index()]
    }
}

struct Solver<'a> {
    game: &'a ParityGame,
    priority: Vec<u32>,
    pred: Vec<Vec<usize>>,
    /// depth of the innermost active subgame containing each vertex
    mark: Vec<u32>,
    /// attractor bookkeeping, valid where `stamp` equals the current run
    stamp: Vec<u32>,
    inside: Vec<u32>,
    count: Vec<u32>,
    run: u32,
    choice: Vec<usize>,
}

/// Priorities mapped to a dense range with the same order and parities.
fn compress(priorities: &[u32]) -> Vec<u32> {
    let mut used: Vec<u32> = priorities.to_vec();
    used.sort_unstable();
    used.dedup();
    let mut map = Vec::with_capacity(used.len());
    let mut value = used.first().map_or(0, |p| p % 2);
    for (i, &p) in used.iter().enumerate() {
        if i > 0 && p % 2 != used[i - 1] % 2 {
            value += 1;
        }
        map.push((p, value));
    }
    priorities
        .iter()
        .map(|p| map[map.binary_search_by_key(p, |&(k, _)| k).expect("priority listed")].1)
        .collect()
}

impl Solver<'_> {
    /// Attractor of `player` to `target` inside the subgame at `depth`.
    /// Records attractor moves for `player`'s vertices outside `target`.
    fn attract(&mut self, depth: u32, player: Player, target: &[usize]) -> Vec<usize> {
        self.run += 1;
        let run = self.run;
        let mut out: Vec<usize> = target.to_vec();
        for &v in target {
            self.inside[v] = run;
        }
        let mut at = 0;
        while at < out.len() {
            let u = out[at];
            at += 1;
            for i in 0..self.pred[u].len() {
                let v = self.pred[u][i];
                if self.mark[v] != depth || self.inside[v] == run {
                    continue;
                }
                let join = if self.game.owner(v) == player {
                    true
                } else {
                    if self.stamp[v] != run {
                        self.stamp[v] = run;
                        self.count[v] = self
                            .game
                            .successors(v)
                            .iter()
                            .filter(|&&t| self.mark[t] == depth)
                            .count() as u32;
                    }
                    self.count[v] -= 1;
                    self.count[v] == 0
                };
                if join {
                    // choose among the earlier members, before `v` itself
                    // counts as inside
                    if self.game.owner(v) == player {
                        self.choice[v] = *self
                            .game
                            .successors(v)
                            .iter()
                            .filter(|&&t| self.inside[t] == run && self.mark[t] == depth)
                            .min()
                            .expect("attracting successor");
                    }
                    self.inside[v] = run;
                    out.push(v);
                }
            }
        }
        out
    }

    fn enter(&mut self, depth: u32, vertices: &[usize]) {
        for &v in vertices {
            self.mark[v] = depth;
        }
    }

    fn leave(&mut self, depth: u32, vertices: &[usize]) {
        for &v in vertices {
            self.mark[v] = depth - 1;
        }
    }

    fn minus(&self, vertices: &[usize], remove: &[usize]) -> Vec<usize> {
        let run = self.inside_run(remove);
        vertices.iter().copied().filter(|&v| self.inside[v] != run).collect()
    }

    fn inside_run(&self, set: &[usize]) -> u32 {
        // callers pass the latest attractor, whose members carry `run`
        debug_assert!(set.iter().all(|&v| self.inside[v] == self.run));
        self.run
    }

    /// Winning regions of the subgame on `vertices`, indexed by player.
    fn solve(&mut self, depth: u32, vertices: Vec<usize>) -> [Vec<usize>; 2] {
        if vertices.is_empty() {
            return [Vec::new(), Vec::new()];
        }
        self.enter(depth, &vertices);
        let top = vertices.iter().map(|&v| self.priority[v]).max().expect("nonempty");
        let alpha = Player::of_priority(top);
        let beta = alpha.opponent();
        let heads: Vec<usize> = vertices.iter().copied().filter(|&v| self.priority[v] == top).collect();
        let attr = self.attract(depth, alpha, &heads);
        let rest = self.minus(&vertices, &attr);
        let sub = self.solve(depth + 1, rest);
        let result = if sub[beta.index()].is_empty() {
            for &v in &heads {
                if self.game.owner(v) == alpha {
                    self.choice[v] = *self
                        .game
                        .successors(v)
                        .iter()
                        .filter(|&&t| self.mark[t] == depth)
                        .min()
                        .expect("subgames have no dead ends");
                }
            }
            let mut regions = [Vec::new(), Vec::new()];
            regions[alpha.index()] = vertices.clone();
            regions
        } else {
            let lost = self.attract(depth, beta, &sub[beta.index()]);
            let rest = self.minus(&vertices, &lost);
            let mut regions = self.solve(depth + 1, rest);
            regions[beta.index()].extend(lost);
            regions
        };
        self.leave(depth, &vertices);
        result
    }
}

/// Solves `game` with recursive attractor decomposition. Ties between
/// equally good successors go to the lowest vertex index.
pub fn solve(game: &ParityGame) -> Solution {
    let n = game.len();
    let mut pred = vec![Vec::new(); n];
    for v in 0..n {
        for &t in game.successors(v) {
            pred[t].push(v);
        }
    }
    for p in pred.iter_mut() {
        p.sort_unstable();
        p.dedup();
    }
    let mut solver = Solver {
        game,
        priority: compress(&(0..n).map(|v| game.priority(v)).collect::<Vec<_>>()),
        pred,
        mark: vec![0; n],
        stamp: vec![0; n],
        inside: vec![0; n],
        count: vec![0; n],
        run: 0,
        choice: vec![usize::MAX; n],
    };
    // the recursion can get deep on large games
    let regions = std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(1 << 30)
            .spawn_scoped(s, || {
                let regions = solver.solve(1, (0..n).collect());
                (regions, solver.choice)
            })
            .expect("spawn solver thread")
            .join()
            .expect("solver thread")
    });
    let (regions, choice) = regions;
    let mut winner = vec![Player::I; n];
    for &v in &regions[Player::O.index()] {
        winner[v] = Player::O;
    }
    let mut strategies = [PositionalStrategy::new(Player::I, n), PositionalStrategy::new(Player::O, n)];
    for v in 0..n {
        let owner = game.owner(v);
        if winner[v] == owner {
            strategies[owner.index()].set(v, choice[v]);
        }
    }
    Solution { winner, strategies }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(priority: u32) -> ParityGame {
        ParityGame::new(vec![Player::O], vec![priority], vec![vec![0]], 0).unwrap()
    }

    #[test]
    fn self_loops() {
        let won = solve(&single(0));
        assert_eq!(won.winner(0), Player::O);
        assert_eq!(won.strategy(Player::O).choice(0), Some(0));
        assert_eq!(solve(&single(1)).winner(0), Player::I);
        assert_eq!(solve(&single(7)).winner(0), Player::I);
    }

    #[test]
    fn escape_to_even_loop() {
        // O at 0 picks between an odd sink 1 and an even sink 2; I at 3
        // can only go to 0
        let g = ParityGame::new(
            vec![Player::O, Player::O, Player::O, Player::I],
            vec![3, 5, 4, 0],
            vec![vec![1, 2], vec![1], vec![2], vec![0]],
            3,
        )
        .unwrap();
        let s = solve(&g);
        assert!((0..4).all(|v| s.winner(v) == Player::O || v == 1));
        assert_eq!(s.winner(1), Player::I);
        assert_eq!(s.strategy(Player::O).choice(0), Some(2));
        assert!(g.strategy_wins(s.strategy(Player::O), &s.region(Player::O)));
        assert!(g.strategy_wins(s.strategy(Player::I), &s.region(Player::I)));
    }

    #[test]
    fn parallel_edges_count_once() {
        // I at 0 has two edges to the odd sink 1; O at 2 may enter 0 or stay even
        let g = ParityGame::new(
            vec![Player::I, Player::I, Player::O],
            vec![0, 1, 2],
            vec![vec![1, 1], vec![1], vec![0, 2]],
            2,
        )
        .unwrap();
        let s = solve(&g);
        assert_eq!([s.winner(0), s.winner(1), s.winner(2)], [Player::I, Player::I, Player::O]);
        assert_eq!(s.strategy(Player::O).choice(2), Some(2));
    }

    #[test]
    fn attractor_moves_leave_self_loops() {
        // 1 must move to the even sink 2 rather than stay on its odd loop
        let g = ParityGame::new(
            vec![Player::O, Player::O, Player::O, Player::I],
            vec![2, 3, 4, 0],
            vec![vec![0, 3], vec![1, 2], vec![2, 3], vec![0]],
            0,
        )
        .unwrap();
        let s = solve(&g);
        assert_eq!(s.region(Player::O), vec![0, 1, 2, 3]);
        assert_eq!(s.strategy(Player::O).choice(1), Some(2));
        assert!(g.strategy_wins(s.strategy(Player::O), &s.region(Player::O)));
    }

    #[test]
    fn compression_keeps_order_and_parity() {
        assert_eq!(compress(&[7, 2, 4, 9, 2]), vec![1, 0, 0, 1, 0]);
        assert_eq!(compress(&[3, 6]), vec![1, 2]);
    }
}
