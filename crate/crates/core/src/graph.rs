//! Simple undirected graphs on the dense vertex range `0..n`.
//!
//! A [`Graph`] is immutable once built. Adjacency is kept twice: as sorted
//! neighbor lists for iteration, and (for `n <= BITSET_LIMIT`) as one bitset
//! row per vertex for constant-time membership tests.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest vertex count for which per-vertex adjacency bitsets are stored.
pub const BITSET_LIMIT: usize = 8192;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An unordered vertex pair, stored with the smaller endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(pub usize, pub usize);

impl Edge {
    pub fn new(u: usize, v: usize) -> Self {
        if u <= v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint other than `v`. `v` must be an endpoint.
    pub fn other(&self, v: usize) -> usize {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// A subset of `0..n` with constant-time membership.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexSet {
    bits: FixedBitSet,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        VertexSet { bits }
    }

    /// Builds a set from vertices; panics if a vertex is `>= n`.
    pub fn from_vertices<I: IntoIterator<Item = usize>>(n: usize, vertices: I) -> Self {
        let mut set = VertexSet::new(n);
        for v in vertices {
            set.insert(v);
        }
        set
    }

    /// Size of the ambient vertex range.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.bits.len(), "vertex {v} outside 0..{}", self.bits.len());
        !self.bits.put(v)
    }

    pub fn remove(&mut self, v: usize) {
        self.bits.set(v, false);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.bits.contains(v)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> VertexSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        VertexSet { bits }
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Result of a diameter computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diameter {
    Finite(usize),
    Infinite,
}

impl Diameter {
    pub fn finite(self) -> Option<usize> {
        match self {
            Diameter::Finite(d) => Some(d),
            Diameter::Infinite => None,
        }
    }
}

impl fmt::Display for Diameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diameter::Finite(d) => write!(f, "{d}"),
            Diameter::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Clone)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    rows: Option<Vec<FixedBitSet>>,
    m: usize,
}

impl Graph {
    /// Builds a graph on `0..n` from unordered pairs. Duplicate pairs collapse.
    pub fn new<I>(n: usize, edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Graph::from_adjacency(adj))
    }

    /// Builds a graph from already-validated adjacency lists (symmetric, loop-free).
    pub(crate) fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Graph {
        let n = adj.len();
        let mut twice_m = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            twice_m += list.len();
        }
        let rows = (n <= BITSET_LIMIT).then(|| {
            adj.iter()
                .map(|list| {
                    let mut row = FixedBitSet::with_capacity(n);
                    for &v in list {
                        row.insert(v);
                    }
                    row
                })
                .collect()
        });
        Graph {
            adj,
            rows,
            m: twice_m / 2,
        }
    }

    pub fn empty(n: usize) -> Graph {
        Graph::from_adjacency(vec![Vec::new(); n])
    }

    pub fn complete(n: usize) -> Graph {
        let adj = (0..n)
            .map(|u| (0..n).filter(|&v| v != u).collect())
            .collect();
        Graph::from_adjacency(adj)
    }

    /// The cycle `0-1-...-(n-1)-0`, `n >= 3`.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// The path `0-1-...-(n-1)`.
    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::new(10, edges).unwrap()
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Neighbors of `v` in increasing order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match &self.rows {
            Some(rows) => rows[u].contains(v),
            None => self.adj[u].binary_search(&v).is_ok(),
        }
    }

    /// All edges `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| Edge(u, v))
        })
    }

    /// Vertices outside `set` with at least one neighbor in `set`.
    pub fn neighborhood_of_set(&self, set: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.n());
        for u in set.iter() {
            for &v in &self.adj[u] {
                if !set.contains(v) {
                    out.insert(v);
                }
            }
        }
        out
    }

    pub fn neighborhood_size(&self, set: &VertexSet) -> usize {
        self.neighborhood_of_set(set).len()
    }

    /// Shortest-path distances from `source`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn eccentricity(&self, source: usize) -> Diameter {
        let mut ecc = 0;
        for d in self.bfs_distances(source) {
            match d {
                Some(d) => ecc = ecc.max(d),
                None => return Diameter::Infinite,
            }
        }
        Diameter::Finite(ecc)
    }

    /// Exact diameter by a BFS from every vertex. The empty graph has diameter 0.
    pub fn diameter(&self) -> Diameter {
        let mut best = 0;
        for v in 0..self.n() {
            match self.eccentricity(v) {
                Diameter::Finite(e) => best = best.max(e),
                Diameter::Infinite => return Diameter::Infinite,
            }
        }
        Diameter::Finite(best)
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// The subgraph induced by `keep`, relabeled to `0..|keep|` in increasing order.
    pub fn induced_subgraph(&self, keep: &VertexSet) -> InducedSubgraph {
        let mut to_child = vec![None; self.n()];
        let to_parent: Vec<usize> = keep.iter().collect();
        for (i, &v) in to_parent.iter().enumerate() {
            to_child[v] = Some(i);
        }
        let adj = to_parent
            .iter()
            .map(|&v| self.adj[v].iter().filter_map(|&w| to_child[w]).collect())
            .collect();
        InducedSubgraph {
            graph: Graph::from_adjacency(adj),
            to_parent,
            to_child,
        }
    }

    /// A copy of this graph without the given edges. Pairs that are not edges are ignored.
    pub fn without_edges<'a, I>(&self, removed: I) -> Graph
    where
        I: IntoIterator<Item = &'a Edge>,
    {
        let mut adj = self.adj.clone();
        for e in removed {
            if let Ok(i) = adj[e.0].binary_search(&e.1) {
                adj[e.0].remove(i);
            }
            if let Ok(i) = adj[e.1].binary_search(&e.0) {
                adj[e.1].remove(i);
            }
        }
        Graph::from_adjacency(adj)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n());
        Graph::new(self.n(), self.edges().map(|e| (perm[e.0], perm[e.1]))).unwrap()
    }

    /// Reads the edge-list format: a header line `n m`, then `m` lines `u v`.
    ///
    /// Blank lines and lines starting with `#` are skipped.
    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let pair = parse_pair(trimmed).map_err(|msg| GraphError::Parse { line: lineno, msg })?;
            match header {
                None => header = Some(pair),
                Some((n, _)) => {
                    let (u, v) = pair;
                    if u >= n || v >= n {
                        return Err(GraphError::Parse {
                            line: lineno,
                            msg: format!("vertex out of range 0..{n} in edge {u} {v}"),
                        });
                    }
                    if u == v {
                        return Err(GraphError::Parse {
                            line: lineno,
                            msg: format!("self-loop at vertex {u}"),
                        });
                    }
                    edges.push(pair);
                }
            }
        }
        let (n, m) = header.ok_or_else(|| GraphError::Parse {
            line: 1,
            msg: "missing header line \"n m\"".into(),
        })?;
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 1,
                msg: format!("header declares {m} edges but {} were read", edges.len()),
            });
        }
        Graph::new(n, edges)
    }

    /// Writes the edge-list format with edges sorted lexicographically, `u < v`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.n(), self.m())?;
        for e in self.edges() {
            writeln!(out, "{} {}", e.0, e.1)?;
        }
        Ok(())
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.m)
            .finish()
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize), String> {
    let mut it = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize, String> {
        let tok = it.next().ok_or_else(|| format!("expected two integers, missing {what}"))?;
        tok.parse::<usize>()
            .map_err(|_| format!("invalid integer {tok:?}"))
    };
    let a = next("first")?;
    let b = next("second")?;
    if let Some(extra) = it.next() {
        return Err(format!("unexpected trailing token {extra:?}"));
    }
    Ok((a, b))
}

/// An induced subgraph together with the vertex maps in both directions.
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `to_parent[i]` is the original label of child vertex `i`.
    pub to_parent: Vec<usize>,
    /// `to_child[v]` is the child label of original vertex `v`, if kept.
    pub to_child: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("vertex {0} is out of range")]
    OutOfRange(usize),
    #[error("vertex {0} appears more than once")]
    Repeated(usize),
    #[error("consecutive vertices {0} are not adjacent")]
    MissingEdge(Edge),
    #[error("cycle visits {visited} of {n} vertices")]
    NotSpanning { visited: usize, n: usize },
    #[error("a Hamilton cycle needs at least 3 vertices")]
    TooShort,
}

/// A sequence of distinct vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn new(vertices: Vec<usize>) -> Self {
        Path(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// At least one edge.
    pub fn is_nontrivial(&self) -> bool {
        self.0.len() >= 2
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.0.windows(2).map(|w| Edge::new(w[0], w[1]))
    }

    pub fn reversed(&self) -> Path {
        Path(self.0.iter().rev().copied().collect())
    }

    /// Checks distinctness and, against `g`, that consecutive vertices are adjacent.
    pub fn validate(&self, g: &Graph) -> Result<(), WalkError> {
        let mut seen = vec![false; g.n()];
        for &v in &self.0 {
            if v >= g.n() {
                return Err(WalkError::OutOfRange(v));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(WalkError::Repeated(v));
            }
        }
        for e in self.edges() {
            if !g.has_edge(e.0, e.1) {
                return Err(WalkError::MissingEdge(e));
            }
        }
        Ok(())
    }
}

/// A cyclic ordering of all vertices of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HamiltonCycle(pub Vec<usize>);

impl HamiltonCycle {
    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cyclically consecutive pairs, including the closing pair.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let k = self.0.len();
        (0..k).map(move |i| Edge::new(self.0[i], self.0[(i + 1) % k]))
    }

    pub fn validate(&self, g: &Graph) -> Result<(), WalkError> {
        if self.0.len() < 3 {
            return Err(WalkError::TooShort);
        }
        Path(self.0.clone()).validate(g)?;
        if self.0.len() != g.n() {
            return Err(WalkError::NotSpanning {
                visited: self.0.len(),
                n: g.n(),
            });
        }
        let e = Edge::new(self.0[0], self.0[self.0.len() - 1]);
        if !g.has_edge(e.0, e.1) {
            return Err(WalkError::MissingEdge(e));
        }
        Ok(())
    }
}
