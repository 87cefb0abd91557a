#![allow(dead_code)]

use std::collections::VecDeque;

use hamcover::graph::{Edge, Graph};
use hamcover::random::{sample_gnp, RngSeed};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    sample_gnp(n, p, RngSeed::new(seed, 77)).unwrap()
}

/// Arbitrary simple graphs with up to `max_n` vertices.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..=3 * n).prop_map(move |pairs| {
            Graph::new(n, pairs.into_iter().filter(|(u, v)| u != v)).unwrap()
        })
    })
}

/// All-pairs distances by Floyd-Warshall; `None` for disconnected graphs.
pub fn floyd_warshall_diameter(g: &Graph) -> Option<usize> {
    let n = g.n();
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = 0;
        for &w in g.neighbors(u) {
            row[w] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let max = d.iter().flatten().copied().max().unwrap_or(0);
    (max < INF).then_some(max)
}

/// A random matching of at most `max` edges of `g`.
pub fn random_matching<R: Rng>(g: &Graph, max: usize, rng: &mut R) -> Vec<Edge> {
    let mut edges: Vec<Edge> = g.edges().collect();
    edges.shuffle(rng);
    let target = rng.gen_range(0..=max);
    let mut used = vec![false; g.n()];
    let mut out = Vec::new();
    for e in edges {
        if out.len() == target {
            break;
        }
        if !used[e.0] && !used[e.1] {
            used[e.0] = true;
            used[e.1] = true;
            out.push(e);
        }
    }
    out
}

/// Vertex-disjoint random walks of length >= 1, grown from random starts.
pub fn random_path_family<R: Rng>(g: &Graph, count: usize, max_len: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut used = vec![false; n];
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for start in order {
        if out.len() == count {
            break;
        }
        if used[start] {
            continue;
        }
        let len = rng.gen_range(1..=max_len);
        let mut path = vec![start];
        used[start] = true;
        while path.len() <= len {
            let last = *path.last().unwrap();
            let free: Vec<usize> = g.neighbors(last).iter().copied().filter(|&w| !used[w]).collect();
            let Some(&w) = free.choose(rng) else { break };
            used[w] = true;
            path.push(w);
        }
        if path.len() >= 2 {
            out.push(path);
        } else {
            used[start] = false;
        }
    }
    out
}

/// BFS distances computed without the library.
pub fn distances_from(g: &Graph, s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(dist[u].unwrap() + 1);
                q.push_back(w);
            }
        }
    }
    dist
}
