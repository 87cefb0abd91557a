//! Brute-force oracles and certificate validators.
//!
//! Nothing here calls into the heuristic modules; these functions are the
//! ground truth the rest of the crate is tested against.

use serde::{Deserialize, Serialize};

use crate::graph::{Edge, Graph, HamiltonCycle, Path};

pub const HELD_KARP_MAX_N: usize = 20;
pub const EXHAUSTIVE_MAX_N: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVerdict {
    Yes(HamiltonCycle),
    No,
    Undecided(String),
}

impl OracleVerdict {
    pub fn decided(&self) -> bool {
        !matches!(self, OracleVerdict::Undecided(_))
    }

    /// `Some(true)` for yes, `Some(false)` for no.
    pub fn value(&self) -> Option<bool> {
        match self {
            OracleVerdict::Yes(_) => Some(true),
            OracleVerdict::No => Some(false),
            OracleVerdict::Undecided(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&HamiltonCycle> {
        match self {
            OracleVerdict::Yes(c) => Some(c),
            _ => None,
        }
    }
}

fn adjacency_masks(g: &Graph) -> Vec<u32> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect()
}

fn too_large(n: usize, max: usize) -> OracleVerdict {
    OracleVerdict::Undecided(format!("n = {n} exceeds the oracle limit {max}"))
}

/// Exact Hamiltonicity by dynamic programming over vertex subsets containing 0.
///
/// `reach[mask]` is the set of vertices `v` such that some path from 0 visits
/// exactly `mask` and ends at `v`. Refuses graphs with more than 20 vertices.
pub fn held_karp_hamiltonian(g: &Graph) -> OracleVerdict {
    let n = g.n();
    if n > HELD_KARP_MAX_N {
        return too_large(n, HELD_KARP_MAX_N);
    }
    if n < 3 {
        return OracleVerdict::No;
    }
    let adj = adjacency_masks(g);
    let full = (1u32 << n) - 1;
    let mut reach = vec![0u32; 1 << n];
    reach[1] = 1;
    for mask in (1..=full).step_by(2) {
        let ends = reach[mask as usize];
        if ends == 0 {
            continue;
        }
        let mut e = ends;
        while e != 0 {
            let v = e.trailing_zeros() as usize;
            e &= e - 1;
            let mut out = adj[v] & !mask;
            while out != 0 {
                let w = out.trailing_zeros();
                out &= out - 1;
                reach[(mask | (1 << w)) as usize] |= 1 << w;
            }
        }
    }
    let closing = reach[full as usize] & adj[0] & !1;
    if closing == 0 {
        return OracleVerdict::No;
    }
    // walk back from the lowest closing endpoint
    let mut cur = closing.trailing_zeros() as usize;
    let mut mask = full;
    let mut cycle = vec![cur];
    while mask != 1 {
        let prev_mask = mask & !(1 << cur);
        let options = reach[prev_mask as usize] & adj[cur];
        let prev = options.trailing_zeros() as usize;
        cycle.push(prev);
        mask = prev_mask;
        cur = prev;
    }
    cycle.reverse();
    OracleVerdict::Yes(HamiltonCycle(cycle))
}

/// Exact Hamiltonicity by depth-first enumeration of paths from vertex 0.
pub fn backtrack_hamiltonian(g: &Graph) -> OracleVerdict {
    let n = g.n();
    if n > HELD_KARP_MAX_N {
        return too_large(n, HELD_KARP_MAX_N);
    }
    if n < 3 {
        return OracleVerdict::No;
    }
    fn extend(g: &Graph, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let n = g.n();
        let last = *path.last().unwrap();
        if path.len() == n {
            return g.neighbors(last).contains(&path[0]);
        }
        for &w in g.neighbors(last) {
            if !used[w] {
                used[w] = true;
                path.push(w);
                if extend(g, path, used) {
                    return true;
                }
                path.pop();
                used[w] = false;
            }
        }
        false
    }
    let mut used = vec![false; n];
    used[0] = true;
    let mut path = vec![0];
    if extend(g, &mut path, &mut used) {
        OracleVerdict::Yes(HamiltonCycle(path))
    } else {
        OracleVerdict::No
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveExpansion {
    pub small_holds: bool,
    /// Smallest violating set, lexicographically first among those.
    pub small_witness: Option<Vec<usize>>,
    pub large_holds: bool,
    /// Lexicographically first `A` and the first `⌈l⌉` vertices of `V \ (A ∪ N(A))`.
    pub large_witness: Option<(Vec<usize>, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("n = {n} exceeds the exhaustive limit {max}")]
pub struct TooLarge {
    pub n: usize,
    pub max: usize,
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order until it returns true.
fn for_each_subset<F: FnMut(&[usize]) -> bool>(n: usize, k: usize, mut f: F) -> bool {
    if k > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn bits(set: &[usize]) -> u32 {
    set.iter().fold(0, |m, &v| m | (1 << v))
}

fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|&v| mask & (1 << v) != 0).collect()
}

/// Decides `S(s, g)` and `L(l)` by enumerating all relevant subsets.
///
/// `S` examines every `A` with `1 <= |A| <= ⌊g⌋`; `L` examines every
/// `⌈l⌉`-set `A` (larger sets cannot do better) and looks for `⌈l⌉` vertices
/// outside `A ∪ N(A)`.
pub fn exhaustive_expansion_check(
    g: &Graph,
    s: f64,
    bound: f64,
    l: f64,
) -> Result<ExhaustiveExpansion, TooLarge> {
    let n = g.n();
    if n > EXHAUSTIVE_MAX_N {
        return Err(TooLarge {
            n,
            max: EXHAUSTIVE_MAX_N,
        });
    }
    let adj = adjacency_masks(g);
    let full: u32 = (1u32 << n) - 1;
    let nbhd = |a: &[usize]| {
        let m = bits(a);
        a.iter().fold(0u32, |acc, &v| acc | adj[v]) & !m
    };

    let max_size = if bound.is_finite() && bound >= 0.0 {
        (bound.floor() as usize).min(n)
    } else {
        n
    };
    let mut small_witness = None;
    for k in 1..=max_size {
        let found = for_each_subset(n, k, |a| {
            if (nbhd(a).count_ones() as f64) < s * k as f64 {
                small_witness = Some(a.to_vec());
                true
            } else {
                false
            }
        });
        if found {
            break;
        }
    }

    let k = (l.ceil() as usize).max(1);
    let mut large_witness = None;
    if 2 * k <= n {
        for_each_subset(n, k, |a| {
            let rest = full & !bits(a) & !nbhd(a);
            if rest.count_ones() as usize >= k {
                large_witness = Some((a.to_vec(), members(rest)[..k].to_vec()));
                true
            } else {
                false
            }
        });
    }
    Ok(ExhaustiveExpansion {
        small_holds: small_witness.is_none(),
        small_witness,
        large_holds: large_witness.is_none(),
        large_witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverReport {
    pub ok: bool,
    /// Index and reason for each cycle that is not a Hamilton cycle of the graph.
    pub cycle_errors: Vec<(usize, String)>,
    /// Number of valid cycles through each edge, in lexicographic edge order.
    pub coverage: Vec<usize>,
    pub uncovered: Vec<Edge>,
}

fn cycle_error(g: &Graph, c: &[usize]) -> Option<String> {
    let n = g.n();
    if c.len() != n || n < 3 {
        return Some(format!("has {} vertices, graph has {n}", c.len()));
    }
    let mut seen = vec![false; n];
    for &v in c {
        if v >= n {
            return Some(format!("vertex {v} out of range"));
        }
        if seen[v] {
            return Some(format!("vertex {v} repeats"));
        }
        seen[v] = true;
    }
    for i in 0..n {
        let (u, v) = (c[i], c[(i + 1) % n]);
        if g.neighbors(u).binary_search(&v).is_err() {
            return Some(format!("edge {u}-{v} is not in the graph"));
        }
    }
    None
}

/// Checks that every cycle is a Hamilton cycle of `g` and every edge of `g`
/// lies on at least one of them.
pub fn validate_cover(g: &Graph, cycles: &[HamiltonCycle]) -> CoverReport {
    let edges: Vec<Edge> = g.edges().collect();
    let mut coverage = vec![0usize; edges.len()];
    let mut cycle_errors = Vec::new();
    for (i, c) in cycles.iter().enumerate() {
        let vs = c.vertices();
        if let Some(err) = cycle_error(g, vs) {
            cycle_errors.push((i, err));
            continue;
        }
        for j in 0..vs.len() {
            let e = Edge::new(vs[j], vs[(j + 1) % vs.len()]);
            let at = edges.binary_search(&e).expect("edge checked above");
            coverage[at] += 1;
        }
    }
    let uncovered: Vec<Edge> = edges
        .iter()
        .zip(&coverage)
        .filter(|(_, &c)| c == 0)
        .map(|(&e, _)| e)
        .collect();
    CoverReport {
        ok: cycle_errors.is_empty() && uncovered.is_empty(),
        cycle_errors,
        coverage,
        uncovered,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    MissingEdge(Edge),
    SharedVertex(usize),
    Trivial(usize),
    OutOfRange(usize),
}

pub enum FamilyInput<'a> {
    Paths(&'a [Path]),
    Matching(&'a [Edge]),
}

/// Returns the first violation: an edge missing from `g`, a vertex used twice,
/// or a path without edges.
pub fn validate_family(g: &Graph, input: FamilyInput<'_>) -> Result<(), Violation> {
    let n = g.n();
    let mut used = vec![false; n];
    let mut take = |v: usize| {
        if v >= n {
            return Err(Violation::OutOfRange(v));
        }
        if std::mem::replace(&mut used[v], true) {
            return Err(Violation::SharedVertex(v));
        }
        Ok(())
    };
    let check_edge = |u: usize, v: usize| {
        if g.neighbors(u).binary_search(&v).is_err() {
            Err(Violation::MissingEdge(Edge::new(u, v)))
        } else {
            Ok(())
        }
    };
    match input {
        FamilyInput::Matching(edges) => {
            for e in edges {
                take(e.0)?;
                take(e.1)?;
                check_edge(e.0, e.1)?;
            }
        }
        FamilyInput::Paths(paths) => {
            for (i, p) in paths.iter().enumerate() {
                let vs = p.vertices();
                if vs.len() < 2 {
                    return Err(Violation::Trivial(i));
                }
                for &v in vs {
                    take(v)?;
                }
                for w in vs.windows(2) {
                    check_edge(w[0], w[1])?;
                }
            }
        }
    }
    Ok(())
}
