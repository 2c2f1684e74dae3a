//! Seeded random instance generators.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{MultiGraph, Vertex};

/// Attempts made by [`ktrees`] before giving up.
pub const KTREES_MAX_ATTEMPTS: usize = 64;

/// `m` edges drawn independently and uniformly from all vertex pairs.
/// Parallel edges are kept and self-loops are redrawn.
pub fn gnm(n: usize, m: usize, seed: u64) -> Result<MultiGraph> {
    if m > 0 && n < 2 {
        return Err(Error::input(
            "gnm needs at least two vertices to place an edge",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = MultiGraph::new(n);
    while g.edge_count() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

/// Union of `k` edge-disjoint random spanning trees on `n` vertices, so the
/// optimum is exactly `k(n-1)`. Each tree is a uniform spanning tree of the
/// complete graph minus the edges used by earlier trees (Wilson's algorithm).
pub fn ktrees(n: usize, k: usize, seed: u64) -> Result<MultiGraph> {
    if k < 1 {
        return Err(Error::input("k must be at least 1"));
    }
    if n >= 2 && k * (n - 1) > n * (n - 1) / 2 {
        return Err(Error::input(format!(
            "{k} edge-disjoint spanning trees do not fit in the complete graph on {n} vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..KTREES_MAX_ATTEMPTS {
        if let Some(mut edges) = try_ktrees(n, k, &mut rng) {
            edges.shuffle(&mut rng);
            for e in edges.iter_mut() {
                if rng.gen_bool(0.5) {
                    *e = (e.1, e.0);
                }
            }
            return MultiGraph::from_edges(n, &edges);
        }
    }
    Err(Error::input(format!(
        "could not pack {k} edge-disjoint spanning trees on {n} vertices after {KTREES_MAX_ATTEMPTS} attempts"
    )))
}

fn try_ktrees(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(Vertex, Vertex)>> {
    let mut used: HashSet<(Vertex, Vertex)> = HashSet::new();
    let mut edges = Vec::with_capacity(k * n.saturating_sub(1));
    for _ in 0..k {
        let adjacency: Vec<Vec<Vertex>> = (0..n)
            .map(|u| {
                (0..n)
                    .filter(|&v| v != u && !used.contains(&(u.min(v), u.max(v))))
                    .collect()
            })
            .collect();
        if !connected(&adjacency) {
            return None;
        }
        for (u, v) in wilson(&adjacency, rng) {
            used.insert((u.min(v), u.max(v)));
            edges.push((u, v));
        }
    }
    Some(edges)
}

fn connected(adjacency: &[Vec<Vertex>]) -> bool {
    if adjacency.is_empty() {
        return true;
    }
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == adjacency.len()
}

/// Uniform spanning tree of a connected graph via loop-erased random walks.
fn wilson(adjacency: &[Vec<Vertex>], rng: &mut ChaCha8Rng) -> Vec<(Vertex, Vertex)> {
    let n = adjacency.len();
    if n == 0 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut next = vec![0; n];
    in_tree[rng.gen_range(0..n)] = true;
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    let mut tree = Vec::with_capacity(n - 1);
    for &start in &order {
        let mut u = start;
        while !in_tree[u] {
            next[u] = *adjacency[u]
                .choose(rng)
                .expect("connected graph has no isolated vertex");
            u = next[u];
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            tree.push((u, next[u]));
            u = next[u];
        }
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::spanning_rank;

    #[test]
    fn gnm_is_deterministic() {
        let a = gnm(4, 6, 7).unwrap();
        let b = gnm(4, 6, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edge_count(), 6);
        assert_eq!(a.self_loops_dropped(), 0);
        assert_eq!(gnm(1, 0, 3).unwrap().edge_count(), 0);
        assert!(gnm(1, 1, 3).is_err());
    }

    #[test]
    fn ktrees_are_spanning_and_disjoint() {
        let g = ktrees(30, 4, 11).unwrap();
        assert_eq!(g.edge_count(), 4 * 29);
        let mut pairs: Vec<_> = g.edges().map(|(_, u, v)| (u.min(v), u.max(v))).collect();
        pairs.sort_unstable();
        pairs.dedup();
        assert_eq!(pairs.len(), 4 * 29);
        let ids: Vec<_> = g.edge_ids().collect();
        assert_eq!(spanning_rank(&g, &ids).unwrap(), 29);
    }

    #[test]
    fn ktrees_tight_and_impossible() {
        // K4 holds exactly two edge-disjoint spanning trees.
        assert_eq!(ktrees(4, 2, 5).unwrap().edge_count(), 6);
        assert!(ktrees(4, 3, 5).is_err());
        assert_eq!(ktrees(1, 3, 5).unwrap().edge_count(), 0);
    }
}
