//! Small explicit-graph helpers shared by the automata, game and
//! verification code.

use std::collections::VecDeque;

/// Strongly connected components of the graph on `0..n` reachable from
/// `roots`, via an iterative Tarjan. Returns `comp[v]` (`usize::MAX` for
/// unreached vertices) and the component count. Components are numbered in
/// reverse topological order (sinks first).
pub fn sccs<F, I>(n: usize, roots: &[usize], mut succ: F) -> (Vec<usize>, usize)
where
    F: FnMut(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut comp = vec![UNSEEN; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut count = 0;
    // explicit call stack of (vertex, successor list, cursor)
    let mut frames: Vec<(usize, Vec<usize>, usize)> = Vec::new();

    for &root in roots {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        frames.push((root, succ(root).into_iter().collect(), 0));

        while let Some((v, succs, cursor)) = frames.last_mut() {
            let v = *v;
            if *cursor < succs.len() {
                let w = succs[*cursor];
                *cursor += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, succ(w).into_iter().collect(), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some((parent, _, _)) = frames.last() {
                    let parent = *parent;
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = count;
                        if w == v {
                            break;
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    (comp, count)
}

/// Vertices reachable from `roots` (including the roots).
pub fn reachable<F, I>(n: usize, roots: &[usize], mut succ: F) -> Vec<bool>
where
    F: FnMut(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &r in roots {
        if !seen[r] {
            seen[r] = true;
            queue.push_back(r);
        }
    }
    while let Some(v) = queue.pop_front() {
        for w in succ(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Shortest path from any root to a vertex satisfying `goal`, as the list
/// of vertices (root first). Successors are explored in the given order,
/// so the result is deterministic.
pub fn shortest_path<F, I>(
    n: usize,
    roots: &[usize],
    mut succ: F,
    goal: impl Fn(usize) -> bool,
) -> Option<Vec<usize>>
where
    F: FnMut(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &r in roots {
        if !seen[r] {
            seen[r] = true;
            queue.push_back(r);
        }
    }
    while let Some(v) = queue.pop_front() {
        if goal(v) {
            let mut path = vec![v];
            let mut cur = v;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for w in succ(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// A lasso-shaped witness in an edge-colored graph: `stem` leads from a
/// root to the first vertex of `cycle`. Both are lists of
/// `(vertex, edge index)` pairs, the edge index referring to the position
/// in the vertex's successor list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleWitness {
    pub stem: Vec<(usize, usize)>,
    pub cycle: Vec<(usize, usize)>,
}

/// Searches the part reachable from `roots` for a cycle whose maximal edge
/// color is odd.
pub fn odd_cycle<F>(n: usize, roots: &[usize], succ: F) -> Option<CycleWitness>
where
    F: Fn(usize) -> Vec<(usize, u32)>,
{
    let seen = reachable(n, roots, |v| succ(v).into_iter().map(|(w, _)| w).collect::<Vec<_>>());
    let verts: Vec<usize> = (0..n).filter(|&v| seen[v]).collect();
    let mut odd: Vec<u32> = verts
        .iter()
        .flat_map(|&v| succ(v).into_iter().map(|(_, c)| c))
        .filter(|c| c % 2 == 1)
        .collect();
    odd.sort_unstable();
    odd.dedup();
    for &c in odd.iter().rev() {
        let low = |v: usize| {
            succ(v)
                .into_iter()
                .filter(|&(_, col)| col <= c)
                .map(|(w, _)| w)
                .collect::<Vec<_>>()
        };
        let (comp, _) = sccs(n, &verts, low);
        for &u in &verts {
            for (idx, (w, col)) in succ(u).into_iter().enumerate() {
                if col != c || comp[u] != comp[w] {
                    continue;
                }
                // close the cycle from w back to u inside the component
                let back = shortest_path(
                    n,
                    &[w],
                    |v| {
                        succ(v)
                            .into_iter()
                            .filter(|&(x, col)| col <= c && comp[x] == comp[u])
                            .map(|(x, _)| x)
                            .collect::<Vec<_>>()
                    },
                    |v| v == u,
                )
                .expect("same component");
                let mut cycle = vec![(u, idx)];
                for pair in back.windows(2) {
                    let e = succ(pair[0])
                        .into_iter()
                        .position(|(x, col)| x == pair[1] && col <= c && comp[x] == comp[u])
                        .expect("edge on path");
                    cycle.push((pair[0], e));
                }
                let to_u = shortest_path(n, roots, |v| succ(v).into_iter().map(|(x, _)| x).collect::<Vec<_>>(), |v| v == u)
                    .expect("reachable");
                let stem = to_u
                    .windows(2)
                    .map(|pair| {
                        let e = succ(pair[0]).into_iter().position(|(x, _)| x == pair[1]).expect("edge");
                        (pair[0], e)
                    })
                    .collect();
                return Some(CycleWitness { stem, cycle });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_of_small_graph() {
        // 0 -> 1 -> 2 -> 1, 2 -> 3, 4 unreachable
        let adj: Vec<Vec<usize>> = vec![vec![1], vec![2], vec![1, 3], vec![], vec![0]];
        let (comp, count) = sccs(5, &[0], |v| adj[v].clone());
        assert_eq!(count, 3);
        assert_eq!(comp[1], comp[2]);
        assert_ne!(comp[0], comp[1]);
        assert_eq!(comp[4], usize::MAX);
        // sinks first
        assert!(comp[3] < comp[1] && comp[1] < comp[0]);
    }

    #[test]
    fn bfs_path() {
        let adj: Vec<Vec<usize>> = vec![vec![1, 2], vec![3], vec![3], vec![]];
        assert_eq!(shortest_path(4, &[0], |v| adj[v].clone(), |v| v == 3), Some(vec![0, 1, 3]));
        assert_eq!(shortest_path(4, &[3], |v| adj[v].clone(), |v| v == 0), None);
        let seen = reachable(4, &[1], |v| adj[v].clone());
        assert_eq!(seen, vec![false, true, false, true]);
    }

    #[test]
    fn odd_cycles() {
        // 0 -(0)-> 1 -(1)-> 2 -(2)-> 1, and 2 -(0)-> 2 self-loop
        let adj: Vec<Vec<(usize, u32)>> = vec![vec![(1, 0)], vec![(2, 1)], vec![(1, 2), (2, 0)]];
        assert_eq!(odd_cycle(3, &[0], |v| adj[v].clone()), None);
        // make the back edge color 0 so the 1 dominates the cycle
        let adj: Vec<Vec<(usize, u32)>> = vec![vec![(1, 0)], vec![(2, 1)], vec![(1, 0)]];
        let w = odd_cycle(3, &[0], |v| adj[v].clone()).unwrap();
        assert_eq!(w.stem, vec![(0, 0)]);
        assert_eq!(w.cycle, vec![(1, 0), (2, 0)]);
    }
}
