//! Merging vertex-disjoint paths into fewer, longer ones through short
//! connectors, with exact accounting of lost and gained edges.
//!
//! A `(d, k)`-extension of a family replaces it by a family with `mu` fewer
//! paths while losing at most `2(k-1) mu` of its edges and gaining at most
//! `(d+2) mu` new ones. Two moves produce such extensions:
//!
//! 1. delete a path with fewer than `2k - 1` edges;
//! 2. join two paths: cut each at a vertex of its `k`-end and connect the cut
//!    points `x`, `y` by `x, a, ..., b, y` where the `a..b` part has at most `d`
//!    edges and avoids the family.
//!
//! Optionally the cut points may also be joined by a direct edge `x y`
//! (see [`Extender::with_direct_joins`]).

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::Matching;
use crate::graph::{Edge, Graph, Path, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("path {0} is trivial")]
    Trivial(usize),
    #[error("vertex {0} is shared by two paths")]
    SharedVertex(usize),
    #[error("vertex {0} repeats within a path")]
    Repeated(usize),
    #[error("edge {0} is not in the graph")]
    MissingEdge(Edge),
    #[error("vertex {vertex} out of range for {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("budget violated: lost {lost} > 2(k-1)mu = {bound} (k = {k}, mu = {mu})")]
    Lost { lost: usize, bound: usize, k: usize, mu: usize },
    #[error("budget violated: gained {gained} > (d+2)mu = {bound} (d = {d}, mu = {mu})")]
    Gained { gained: usize, bound: usize, d: usize, mu: usize },
    #[error("family invariant broken: {0}")]
    Family(#[from] FamilyError),
    #[error("cannot merge an empty matching")]
    EmptyMatching,
}

/// The vertices at path distance at most `k - 1` from an endpoint, sorted.
pub fn k_end(p: &Path, k: usize) -> Vec<usize> {
    let vs = p.vertices();
    let q = vs.len();
    let take = k.max(1).min(q);
    let mut out: Vec<usize> = vs[..take].iter().chain(&vs[q - take..]).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Non-trivial, pairwise vertex-disjoint paths together with the edge set of
/// the family they were derived from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFamily {
    paths: Vec<Path>,
    origin_edges: BTreeSet<Edge>,
}

impl PathFamily {
    pub fn new(paths: Vec<Path>) -> Result<Self, FamilyError> {
        check_paths(&paths)?;
        let origin_edges = paths.iter().flat_map(|p| p.edges()).collect();
        Ok(PathFamily {
            paths,
            origin_edges,
        })
    }

    /// Each matching edge as a path of length one.
    pub fn from_matching(m: &Matching) -> Self {
        Self::new(m.edges().iter().map(|e| Path::new(vec![e.0, e.1])).collect())
            .expect("matching edges are disjoint")
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn origin_edges(&self) -> &BTreeSet<Edge> {
        &self.origin_edges
    }

    pub fn edges(&self) -> BTreeSet<Edge> {
        self.paths.iter().flat_map(|p| p.edges()).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.paths.iter().map(|p| p.vertices().len()).sum()
    }

    /// Origin edges no longer in the family.
    pub fn lost_edges(&self) -> BTreeSet<Edge> {
        let now = self.edges();
        self.origin_edges.difference(&now).copied().collect()
    }

    /// Family edges not in the origin.
    pub fn gained_edges(&self) -> BTreeSet<Edge> {
        let now = self.edges();
        now.difference(&self.origin_edges).copied().collect()
    }

    /// Checks disjointness, non-triviality and that every edge is in `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), FamilyError> {
        check_paths(&self.paths)?;
        for p in &self.paths {
            for &v in p.vertices() {
                if v >= g.n() {
                    return Err(FamilyError::OutOfRange { vertex: v, n: g.n() });
                }
            }
            if let Some(e) = p.edges().find(|e| !g.has_edge(e.0, e.1)) {
                return Err(FamilyError::MissingEdge(e));
            }
        }
        Ok(())
    }
}

fn check_paths(paths: &[Path]) -> Result<(), FamilyError> {
    let mut seen = BTreeSet::new();
    for (i, p) in paths.iter().enumerate() {
        if !p.is_nontrivial() {
            return Err(FamilyError::Trivial(i));
        }
        let mut own = BTreeSet::new();
        for &v in p.vertices() {
            if !own.insert(v) {
                return Err(FamilyError::Repeated(v));
            }
            if !seen.insert(v) {
                return Err(FamilyError::SharedVertex(v));
            }
        }
    }
    Ok(())
}

/// Accounting for one `(d, k)`-extension run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionBudget {
    pub d: usize,
    pub k: usize,
    pub mu: usize,
    pub lost: usize,
    pub gained: usize,
}

impl ExtensionBudget {
    pub fn new(d: usize, k: usize) -> Self {
        ExtensionBudget {
            d,
            k: k.max(1),
            ..Default::default()
        }
    }

    pub fn check(&self) -> Result<(), ExtensionError> {
        let lost_bound = 2 * (self.k - 1) * self.mu;
        if self.lost > lost_bound {
            return Err(ExtensionError::Lost {
                lost: self.lost,
                bound: lost_bound,
                k: self.k,
                mu: self.mu,
            });
        }
        let gained_bound = (self.d + 2) * self.mu;
        if self.gained > gained_bound {
            return Err(ExtensionError::Gained {
                gained: self.gained,
                bound: gained_bound,
                d: self.d,
                mu: self.mu,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    /// A path shorter than `2k - 1` was removed.
    Deleted { path: Path },
    /// Two paths were cut at `x` and `y` and joined through `connector`
    /// (the full `x .. y` walk, endpoints included).
    Merged {
        connector: Vec<usize>,
        lost: usize,
        gained: usize,
    },
}

/// Which `k`-end vertices may serve as cut points, tried in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CutPolicy {
    EndpointsOnly,
    /// The trimmed tail contains no origin edge.
    KeepOrigin,
    Any,
}

#[derive(Clone, Copy, Debug)]
struct Cut {
    path: usize,
    /// Number of tail edges removed.
    trim: usize,
    /// The tail is at the front of the path.
    front: bool,
}

/// Applies extension moves one at a time, checking the budget after each.
pub struct Extender<'g> {
    g: &'g Graph,
    family: PathFamily,
    budget: ExtensionBudget,
    start_edges: BTreeSet<Edge>,
    direct_joins: bool,
}

impl<'g> Extender<'g> {
    pub fn new(g: &'g Graph, family: PathFamily, d: usize, k: usize) -> Self {
        let start_edges = family.edges();
        Extender {
            g,
            family,
            budget: ExtensionBudget::new(d, k),
            start_edges,
            direct_joins: false,
        }
    }

    /// Also allow joining two cut points by a single edge.
    pub fn with_direct_joins(mut self, yes: bool) -> Self {
        self.direct_joins = yes;
        self
    }

    pub fn family(&self) -> &PathFamily {
        &self.family
    }

    pub fn budget(&self) -> ExtensionBudget {
        self.budget
    }

    pub fn into_parts(self) -> (PathFamily, ExtensionBudget) {
        (self.family, self.budget)
    }

    /// Applies one move, or returns `None` at a fixpoint.
    pub fn step(&mut self) -> Result<Option<Move>, ExtensionError> {
        let mv = match self.delete_short() {
            Some(mv) => Some(mv),
            None => self.merge_once(),
        };
        if mv.is_some() {
            self.verify()?;
        }
        Ok(mv)
    }

    /// Applies moves until none applies.
    pub fn run(&mut self) -> Result<usize, ExtensionError> {
        let mut moves = 0;
        while self.step()?.is_some() {
            moves += 1;
        }
        Ok(moves)
    }

    fn verify(&self) -> Result<(), ExtensionError> {
        self.budget.check()?;
        self.family.validate(self.g)?;
        let now = self.family.edges();
        let lost = self.start_edges.difference(&now).count();
        let gained = now.difference(&self.start_edges).count();
        debug_assert!(lost <= self.budget.lost && gained <= self.budget.gained);
        if lost > self.budget.lost {
            return Err(ExtensionError::Lost {
                lost,
                bound: self.budget.lost,
                k: self.budget.k,
                mu: self.budget.mu,
            });
        }
        if gained > self.budget.gained {
            return Err(ExtensionError::Gained {
                gained,
                bound: self.budget.gained,
                d: self.budget.d,
                mu: self.budget.mu,
            });
        }
        Ok(())
    }

    fn delete_short(&mut self) -> Option<Move> {
        let min_len = 2 * self.budget.k - 1;
        let (i, _) = self
            .family
            .paths
            .iter()
            .enumerate()
            .filter(|(_, p)| p.len() < min_len)
            .min_by_key(|(_, p)| (p.len(), p.vertices()[0]))?;
        let path = self.family.paths.remove(i);
        self.budget.lost += path.len();
        self.budget.mu += 1;
        Some(Move::Deleted { path })
    }

    fn merge_once(&mut self) -> Option<Move> {
        if self.family.len() < 2 {
            return None;
        }
        let mut policies = vec![CutPolicy::EndpointsOnly];
        if self.budget.k > 1 {
            policies.extend([CutPolicy::KeepOrigin, CutPolicy::Any]);
        }
        for policy in policies {
            if let Some(walk) = self.find_connector(policy) {
                return Some(self.apply_merge(walk));
            }
        }
        None
    }

    fn cuts(&self, policy: CutPolicy) -> Vec<Option<Cut>> {
        let mut cuts = vec![None; self.g.n()];
        let max_trim = self.budget.k - 1;
        for (pi, p) in self.family.paths.iter().enumerate() {
            let vs = p.vertices();
            let q = vs.len();
            for trim in 0..=max_trim.min(q - 2) {
                for front in [true, false] {
                    let (v, tail) = if front {
                        (vs[trim], &vs[..=trim])
                    } else {
                        (vs[q - 1 - trim], &vs[q - 1 - trim..])
                    };
                    let allowed = match policy {
                        CutPolicy::EndpointsOnly => trim == 0,
                        CutPolicy::KeepOrigin => tail
                            .windows(2)
                            .all(|w| !self.family.origin_edges.contains(&Edge::new(w[0], w[1]))),
                        CutPolicy::Any => true,
                    };
                    if allowed && cuts[v].is_none() {
                        cuts[v] = Some(Cut {
                            path: pi,
                            trim,
                            front,
                        });
                    }
                }
            }
        }
        cuts
    }

    /// Shortest connector between cut points of two different paths, found by
    /// a multi-source search from all cut points through vertices outside the
    /// family. Ties go to the lexicographically smallest `(length, x, y)`.
    fn find_connector(&self, policy: CutPolicy) -> Option<(Vec<usize>, Cut, Cut)> {
        let g = self.g;
        let n = g.n();
        let cuts = self.cuts(policy);
        let mut in_family = VertexSet::new(n);
        for p in &self.family.paths {
            for &v in p.vertices() {
                in_family.insert(v);
            }
        }
        const NONE: usize = usize::MAX;
        let mut dist = vec![NONE; n];
        let mut parent = vec![NONE; n];
        let mut label = vec![NONE; n];
        let mut queue = VecDeque::new();
        for v in 0..n {
            if let Some(c) = cuts[v] {
                dist[v] = 0;
                label[v] = c.path;
                queue.push_back(v);
            }
        }
        // outside vertices may sit at distance up to d + 1 from their source
        let max_dist = self.budget.d + 1;
        while let Some(u) = queue.pop_front() {
            if dist[u] >= max_dist {
                continue;
            }
            for &w in g.neighbors(u) {
                if dist[w] == NONE && !in_family.contains(w) {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    label[w] = label[u];
                    queue.push_back(w);
                }
            }
        }
        let root = |mut v: usize| {
            while parent[v] != NONE {
                v = parent[v];
            }
            v
        };
        let mut best: Option<(usize, usize, usize, usize, usize)> = None;
        for u in 0..n {
            if dist[u] == NONE {
                continue;
            }
            for &w in g.neighbors(u) {
                if w <= u || dist[w] == NONE || label[w] == label[u] {
                    continue;
                }
                let len = dist[u] + dist[w] + 1;
                if len > self.budget.d + 2 || (len == 1 && !self.direct_joins) {
                    continue;
                }
                let (x, y) = (root(u), root(w));
                let key = (len, x.min(y), x.max(y), u, w);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let (_, _, _, u, w) = best?;
        let (mut a, mut b) = (u, w);
        if root(a) > root(b) {
            std::mem::swap(&mut a, &mut b);
        }
        let mut walk = Vec::new();
        let mut v = a;
        while v != NONE {
            walk.push(v);
            v = parent[v];
        }
        walk.reverse();
        let mut v = b;
        while v != NONE {
            walk.push(v);
            v = parent[v];
        }
        let x = walk[0];
        let y = *walk.last().unwrap();
        Some((walk, cuts[x].unwrap(), cuts[y].unwrap()))
    }

    fn apply_merge(&mut self, (walk, cx, cy): (Vec<usize>, Cut, Cut)) -> Move {
        // left part ends at x, right part starts at y
        let trimmed = |p: &Path, c: Cut, end_at_cut: bool| -> Vec<usize> {
            let vs = p.vertices();
            let q = vs.len();
            let mut kept: Vec<usize> = if c.front {
                vs[c.trim..].to_vec()
            } else {
                vs[..q - c.trim].to_vec()
            };
            // `kept` starts at the cut when the tail was at the front
            if c.front == end_at_cut {
                kept.reverse();
            }
            kept
        };
        let left = trimmed(&self.family.paths[cx.path], cx, true);
        let right = trimmed(&self.family.paths[cy.path], cy, false);
        let mut merged = left;
        merged.extend_from_slice(&walk[1..walk.len() - 1]);
        merged.extend(right);
        let lost = cx.trim + cy.trim;
        let gained = walk.len() - 1;
        let (hi, lo) = (cx.path.max(cy.path), cx.path.min(cy.path));
        self.family.paths.remove(hi);
        self.family.paths[lo] = Path::new(merged);
        self.budget.lost += lost;
        self.budget.gained += gained;
        self.budget.mu += 1;
        Move::Merged {
            connector: walk,
            lost,
            gained,
        }
    }
}

/// Applies both moves to a fixpoint (connectors only, no direct joins).
pub fn reduce_family(
    g: &Graph,
    family: PathFamily,
    d: usize,
    k: usize,
) -> Result<(PathFamily, ExtensionBudget), ExtensionError> {
    let mut ext = Extender::new(g, family, d, k);
    ext.run()?;
    Ok(ext.into_parts())
}

/// Summary of [`merge_into_single_path`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeStats {
    pub d: usize,
    /// `k` used in each round.
    pub k_schedule: Vec<usize>,
    /// Rounds in which `k` was capped by the shortest path.
    pub k_cap_binding: usize,
    pub mu: usize,
    pub lost_edges: usize,
    pub gained_edges: usize,
    pub paths_dissolved: usize,
    pub rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeResult {
    pub path: Path,
    /// Matching edges not on `path`.
    pub lost_matching_edges: Vec<Edge>,
    pub stats: MergeStats,
}

/// Connector length bound `⌈6 / alpha⌉`.
pub fn connector_length(alpha: f64) -> usize {
    (6.0 / alpha).ceil() as usize
}

/// End depth for round `i >= 1`: `1`, then `⌈n^((i-1) alpha / 2)⌉`.
pub fn scheduled_k(n: usize, alpha: f64, round: usize) -> usize {
    if round <= 1 {
        1
    } else {
        ((n as f64).powf((round - 1) as f64 * alpha / 2.0).ceil() as usize).max(1)
    }
}

/// Merges the matching's edges into one path by repeated extensions with
/// `d = ⌈6/alpha⌉` and a growing `k`, capped so that no path is short enough to
/// be deleted. Paths left over at the fixpoint are dropped except the one with
/// the most edges; their matching edges are reported as lost.
pub fn merge_into_single_path(
    g: &Graph,
    m: &Matching,
    alpha: f64,
) -> Result<MergeResult, ExtensionError> {
    if m.is_empty() {
        return Err(ExtensionError::EmptyMatching);
    }
    let n = g.n();
    let d = connector_length(alpha);
    let mut family = PathFamily::from_matching(m);
    family.validate(g)?;
    let mut stats = MergeStats {
        d,
        ..Default::default()
    };
    let mut prev_k = 0;
    for round in 1..=n.max(1) {
        if family.len() <= 1 {
            break;
        }
        let shortest = family.paths.iter().map(Path::len).min().unwrap();
        let cap = shortest.div_ceil(2);
        let want = scheduled_k(n, alpha, round);
        let k = want.min(cap).max(1);
        if want > k {
            stats.k_cap_binding += 1;
            log::debug!("k capped at {k} (scheduled {want}, shortest path {shortest})");
        }
        let mut ext = Extender::new(g, family, d, k).with_direct_joins(true);
        let moves = ext.run()?;
        let (next, budget) = ext.into_parts();
        family = next;
        stats.k_schedule.push(k);
        stats.rounds += 1;
        stats.mu += budget.mu;
        stats.lost_edges += budget.lost;
        stats.gained_edges += budget.gained;
        if moves == 0 && k == prev_k {
            break;
        }
        prev_k = k;
    }
    let keep = family
        .paths
        .iter()
        .enumerate()
        .max_by_key(|(_, p)| (p.len(), std::cmp::Reverse(p.vertices()[0])))
        .map(|(i, _)| i);
    let path = match keep {
        Some(i) => {
            stats.paths_dissolved = family.len() - 1;
            family.paths.swap_remove(i)
        }
        // every path was deleted; fall back to the lowest matching edge
        None => {
            let e = m.edges()[0];
            Path::new(vec![e.0, e.1])
        }
    };
    let on_path: BTreeSet<Edge> = path.edges().collect();
    let lost_matching_edges: Vec<Edge> = m
        .edges()
        .iter()
        .copied()
        .filter(|e| !on_path.contains(e))
        .collect();
    Ok(MergeResult {
        path,
        lost_matching_edges,
        stats,
    })
}
