//! Sampled falsification of the small and large expansion properties.
//!
//! `S(s, g)`: every vertex set `A` with `|A| <= g` has `|N(A)| >= s |A|`.
//! `L(l)`: any two disjoint vertex sets of size at least `l` span an edge.
//!
//! Deciding either property exactly is exponential, so the searches here only
//! look for counterexamples. A `Violated` verdict always carries a witness that
//! can be rechecked from scratch; `Holds` is reported only when the search was
//! exhaustive for the instance (singletons when `g < 2`, vacuous frames) or a
//! degree argument settles it.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Diameter, Graph, VertexSet};
use crate::random::RngSeed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("expansion factor must be > 1 for the diameter bound, got {0}")]
    Expansion(f64),
    #[error("parameter {name} must be >= 1, got {value}")]
    Parameter { name: &'static str, value: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "S")]
    Small,
    #[serde(rename = "L")]
    Large,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// `A` with `|N(A)| < s |A|`.
    Set(Vec<usize>),
    /// Disjoint `A`, `B` with no edge between them.
    Pair(Vec<usize>, Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub property: Property,
    pub params: CheckParams,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Default falsification budget: ten trials per vertex.
pub fn default_trials(n: usize) -> usize {
    10 * n
}

/// Whether `set` violates `S(s, ·)`: `|N(set)| < s |set|`.
pub fn violates_small(g: &Graph, set: &VertexSet, s: f64) -> bool {
    !set.is_empty() && (g.neighborhood_size(set) as f64) < s * set.len() as f64
}

/// Whether two disjoint sets span no edge.
pub fn spans_no_edge(g: &Graph, a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|&u| b.iter().all(|&v| !g.has_edge(u, v)))
}

/// Rechecks a witness from scratch against the report's parameters.
pub fn witness_is_valid(g: &Graph, report: &ExpansionReport) -> bool {
    match (&report.witness, report.property) {
        (Some(Witness::Set(a)), Property::Small) => {
            let (Some(s), Some(bound)) = (report.params.s, report.params.g) else {
                return false;
            };
            a.len() as f64 <= bound
                && violates_small(g, &VertexSet::from_vertices(g.n(), a.iter().copied()), s)
        }
        (Some(Witness::Pair(a, b)), Property::Large) => {
            let Some(l) = report.params.l else { return false };
            let k = frame_size(l);
            let sa = VertexSet::from_vertices(g.n(), a.iter().copied());
            let sb = VertexSet::from_vertices(g.n(), b.iter().copied());
            sa.len() == a.len()
                && sb.len() == b.len()
                && a.len() >= k
                && b.len() >= k
                && sa.is_disjoint(&sb)
                && spans_no_edge(g, a, b)
        }
        _ => false,
    }
}

pub(crate) fn frame_size(l: f64) -> usize {
    (l.ceil() as usize).max(1)
}

/// Searches for a set `A`, `|A| <= g`, with `|N(A)| < s |A|`.
///
/// All singletons are checked exactly. Larger candidates come from BFS balls
/// around low-degree vertices, prefixes of the low-degree vertices, greedy
/// growth that adds the vertex enlarging `N(A)` least, and `trials` random
/// sets (half uniform, half grown as connected sets).
pub fn small_expansion_witness_search(
    g: &Graph,
    s: f64,
    bound: f64,
    trials: usize,
    seed: RngSeed,
) -> Result<ExpansionReport, CheckError> {
    if !(s >= 1.0) {
        return Err(CheckError::Parameter { name: "s", value: s });
    }
    if !(bound >= 1.0) {
        return Err(CheckError::Parameter { name: "g", value: bound });
    }
    let n = g.n();
    let max_size = (bound.floor() as usize).min(n);
    let report = |verdict, witness, note: Option<String>| ExpansionReport {
        property: Property::Small,
        params: CheckParams {
            s: Some(s),
            g: Some(bound),
            l: None,
        },
        verdict,
        witness,
        trials,
        note,
    };

    for v in 0..n {
        if (g.degree(v) as f64) < s {
            return Ok(report(Verdict::Violated, Some(Witness::Set(vec![v])), None));
        }
    }
    if max_size <= 1 {
        return Ok(report(
            Verdict::Holds,
            None,
            Some("exact: only singletons are constrained".into()),
        ));
    }

    let mut search = SetSearch::new(g, s, max_size);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (g.degree(v), v));

    // Unions of the lowest-degree vertices.
    search.try_prefixes(&by_degree);
    // BFS balls and greedy growth around the lowest-degree vertices.
    for &v in by_degree.iter().take(n.min(64)) {
        if search.found.is_some() {
            break;
        }
        let ball = bfs_order(g, v, max_size);
        search.try_prefixes(&ball);
        search.greedy_from(v);
    }

    let mut rng = seed.rng();
    let mut pool: Vec<usize> = (0..n).collect();
    for t in 0..trials {
        if search.found.is_some() {
            break;
        }
        let size = rng.gen_range(2..=max_size);
        let candidate: Vec<usize> = if t % 2 == 0 {
            let (chosen, _) = pool.partial_shuffle(&mut rng, size);
            chosen.to_vec()
        } else {
            random_connected_set(g, &mut rng, size)
        };
        search.try_prefixes(&candidate);
    }

    Ok(match search.found {
        Some(w) => report(Verdict::Violated, Some(Witness::Set(w)), None),
        None => report(Verdict::Inconclusive, None, None),
    })
}

struct SetSearch<'a> {
    g: &'a Graph,
    s: f64,
    max_size: usize,
    found: Option<Vec<usize>>,
}

impl<'a> SetSearch<'a> {
    fn new(g: &'a Graph, s: f64, max_size: usize) -> Self {
        SetSearch {
            g,
            s,
            max_size,
            found: None,
        }
    }

    /// Tests every prefix of `order` (up to `max_size`) incrementally.
    fn try_prefixes(&mut self, order: &[usize]) {
        if self.found.is_some() {
            return;
        }
        let n = self.g.n();
        let mut inside = VertexSet::new(n);
        // count[v] = number of neighbors of v in the current set
        let mut hits = vec![0u32; n];
        let mut nbhd = 0usize;
        for (i, &v) in order.iter().take(self.max_size).enumerate() {
            if !inside.insert(v) {
                continue;
            }
            if hits[v] > 0 {
                nbhd -= 1;
            }
            for &w in self.g.neighbors(v) {
                if hits[w] == 0 && !inside.contains(w) {
                    nbhd += 1;
                }
                hits[w] += 1;
            }
            let size = inside.len();
            if size >= 2 && (nbhd as f64) < self.s * size as f64 {
                let set: Vec<usize> = order[..=i].to_vec();
                self.found = Some(shrink(self.g, set, self.s));
                return;
            }
        }
    }

    /// Grows a set from `start`, each time adding the outside neighbor that
    /// enlarges the neighborhood least.
    fn greedy_from(&mut self, start: usize) {
        if self.found.is_some() {
            return;
        }
        let g = self.g;
        let mut set = VertexSet::from_vertices(g.n(), [start]);
        let mut order = vec![start];
        while order.len() < self.max_size {
            let boundary = g.neighborhood_of_set(&set);
            let best = boundary.iter().min_by_key(|&w| {
                let gain = g
                    .neighbors(w)
                    .iter()
                    .filter(|&&x| !set.contains(x) && !boundary.contains(x))
                    .count();
                (gain, w)
            });
            let Some(w) = best else { break };
            set.insert(w);
            order.push(w);
        }
        self.try_prefixes(&order);
    }
}

/// Drops vertices while the set keeps violating, for a smaller witness.
fn shrink(g: &Graph, mut set: Vec<usize>, s: f64) -> Vec<usize> {
    let n = g.n();
    let mut i = 0;
    while i < set.len() && set.len() > 1 {
        let trial: Vec<usize> = set
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        if violates_small(g, &VertexSet::from_vertices(n, trial.iter().copied()), s) {
            set = trial;
        } else {
            i += 1;
        }
    }
    set.sort_unstable();
    set
}

fn bfs_order(g: &Graph, source: usize, limit: usize) -> Vec<usize> {
    let mut seen = VertexSet::from_vertices(g.n(), [source]);
    let mut order = vec![source];
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if order.len() >= limit {
                return order;
            }
            if seen.insert(v) {
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    order
}

fn random_connected_set<R: Rng>(g: &Graph, rng: &mut R, size: usize) -> Vec<usize> {
    let n = g.n();
    let start = rng.gen_range(0..n);
    let mut set = VertexSet::from_vertices(n, [start]);
    let mut order = vec![start];
    let mut frontier: Vec<usize> = g.neighbors(start).to_vec();
    while order.len() < size && !frontier.is_empty() {
        let i = rng.gen_range(0..frontier.len());
        let v = frontier.swap_remove(i);
        if set.insert(v) {
            order.push(v);
            frontier.extend(g.neighbors(v).iter().copied().filter(|&w| !set.contains(w)));
        }
    }
    order
}

/// Searches for two disjoint `⌈l⌉`-sets with no edge between them.
///
/// Each candidate `A` (BFS balls, low-degree prefixes, random sets) is tested
/// exactly: a partner `B` exists iff `V \ (A ∪ N(A))` has at least `⌈l⌉`
/// vertices.
pub fn large_expansion_witness_search(
    g: &Graph,
    l: f64,
    trials: usize,
    seed: RngSeed,
) -> Result<ExpansionReport, CheckError> {
    if !(l >= 1.0) {
        return Err(CheckError::Parameter { name: "l", value: l });
    }
    let n = g.n();
    let k = frame_size(l);
    let report = |verdict, witness, note: Option<String>| ExpansionReport {
        property: Property::Large,
        params: CheckParams {
            s: None,
            g: None,
            l: Some(l),
        },
        verdict,
        witness,
        trials,
        note,
    };
    if 2 * k > n {
        return Ok(report(
            Verdict::Holds,
            None,
            Some(format!("vacuous: no two disjoint sets of size {k} exist on {n} vertices")),
        ));
    }
    // Every vertex misses at most k-1 others, so any k-set hits every disjoint k-set.
    if g.min_degree() + k >= n {
        return Ok(report(
            Verdict::Holds,
            None,
            Some(format!("exact: minimum degree {} >= n - {k}", g.min_degree())),
        ));
    }

    let partner = |a: &[usize]| -> Option<Vec<usize>> {
        let set = VertexSet::from_vertices(n, a.iter().copied());
        let mut closed = g.neighborhood_of_set(&set);
        closed.union_with(&set);
        let rest: Vec<usize> = closed.complement().iter().take(k).collect();
        (rest.len() == k).then_some(rest)
    };
    let finish = |a: Vec<usize>, b: Vec<usize>| {
        let mut a = a;
        a.sort_unstable();
        report(Verdict::Violated, Some(Witness::Pair(a, b)), None)
    };

    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (g.degree(v), v));
    let prefix = by_degree[..k].to_vec();
    if let Some(b) = partner(&prefix) {
        return Ok(finish(prefix, b));
    }
    for &v in by_degree.iter().take(n.min(64)) {
        let ball = bfs_order(g, v, k);
        if ball.len() == k {
            if let Some(b) = partner(&ball) {
                return Ok(finish(ball, b));
            }
        }
    }
    let mut rng = seed.rng();
    let mut pool: Vec<usize> = (0..n).collect();
    for t in 0..trials {
        let a = if t % 2 == 0 {
            pool.partial_shuffle(&mut rng, k).0.to_vec()
        } else {
            random_connected_set(g, &mut rng, k)
        };
        if a.len() < k {
            continue;
        }
        if let Some(b) = partner(&a) {
            return Ok(finish(a, b));
        }
    }
    Ok(report(Verdict::Inconclusive, None, None))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterCheck {
    pub diameter: Diameter,
    /// `2 ln n / ln s + 3`.
    pub bound: f64,
    pub ok: bool,
}

/// Exact diameter against the bound `2 ln n / ln s + 3`; disconnected graphs fail.
pub fn diameter_bound_check(g: &Graph, s: f64) -> Result<DiameterCheck, CheckError> {
    if !(s > 1.0) {
        return Err(CheckError::Expansion(s));
    }
    let bound = diameter_bound(g.n(), s);
    let diameter = g.diameter();
    let ok = match diameter {
        Diameter::Finite(d) => d as f64 <= bound,
        Diameter::Infinite => false,
    };
    Ok(DiameterCheck { diameter, bound, ok })
}

pub fn diameter_bound(n: usize, s: f64) -> f64 {
    if n <= 1 {
        return 3.0;
    }
    2.0 * (n as f64).ln() / s.ln() + 3.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeelResult {
    /// Vertices removed by peeling.
    pub peeled: VertexSet,
    /// The surviving part `V \ (D ∪ Z)`.
    pub remainder: VertexSet,
    /// Whether `|Z| <= 2|D|/s`.
    pub within_bound: bool,
}

/// Removes, until none is left, any vertex whose degree inside `V \ (D ∪ Z)` is
/// below `s/2`, adding it to `Z`.
///
/// This degree-peeling stands in for choosing `Z` as a largest non-expanding
/// set, which is not computable at scale. It only guarantees the singleton
/// case of `S(s/2, ·)` on the remainder.
pub fn peel_non_expanding(g: &Graph, removed: &VertexSet, s: f64) -> PeelResult {
    let n = g.n();
    let threshold = s / 2.0;
    let mut alive = removed.complement();
    let mut deg: Vec<usize> = (0..n)
        .map(|v| g.neighbors(v).iter().filter(|&&w| alive.contains(w)).count())
        .collect();
    let mut peeled = VertexSet::new(n);
    let mut queue: VecDeque<usize> = alive
        .iter()
        .filter(|&v| (deg[v] as f64) < threshold)
        .collect();
    while let Some(v) = queue.pop_front() {
        if !alive.contains(v) {
            continue;
        }
        alive.remove(v);
        peeled.insert(v);
        for &w in g.neighbors(v) {
            if alive.contains(w) {
                deg[w] -= 1;
                if (deg[w] as f64) < threshold && (deg[w] as f64) + 1.0 >= threshold {
                    queue.push_back(w);
                }
            }
        }
    }
    let within_bound = peeled.len() as f64 <= 2.0 * removed.len() as f64 / s;
    PeelResult {
        peeled,
        remainder: alive,
        within_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::sample_gnp;

    fn two_triangles() -> Graph {
        Graph::new(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap()
    }

    #[test]
    fn small_search_examples() {
        let seed = RngSeed::new(1, 0);
        let c5 = Graph::cycle(5);
        let r = small_expansion_witness_search(&c5, 2.0, 1.0, 50, seed).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);

        let r = small_expansion_witness_search(&c5, 2.0, 2.0, 50, seed).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(witness_is_valid(&c5, &r));
        let Some(Witness::Set(w)) = &r.witness else { panic!() };
        assert_eq!(w.len(), 2);

        let k6 = Graph::complete(6);
        let r = small_expansion_witness_search(&k6, 3.0, 1.0, 50, seed).unwrap();
        assert_ne!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn small_search_never_claims_unproven_holds() {
        let g = Graph::complete(8);
        let r = small_expansion_witness_search(&g, 1.0, 3.0, 100, RngSeed::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn large_search_examples() {
        let seed = RngSeed::new(2, 0);
        let r = large_expansion_witness_search(&Graph::complete(6), 2.0, 20, seed).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);

        let g = two_triangles();
        let r = large_expansion_witness_search(&g, 3.0, 20, seed).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(witness_is_valid(&g, &r));
        assert_eq!(r.witness, Some(Witness::Pair(vec![0, 1, 2], vec![3, 4, 5])));

        let r = large_expansion_witness_search(&Graph::cycle(5), 3.0, 20, seed).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.note.unwrap().starts_with("vacuous"));
    }

    #[test]
    fn diameter_examples() {
        let d = diameter_bound_check(&Graph::complete(8), 2.0).unwrap();
        assert_eq!(d.diameter, Diameter::Finite(1));
        assert!((d.bound - 9.0).abs() < 1e-12);
        assert!(d.ok);

        let d = diameter_bound_check(&Graph::cycle(5), 2.0).unwrap();
        assert_eq!(d.diameter, Diameter::Finite(2));
        assert!((d.bound - (2.0 * 5f64.ln() / 2f64.ln() + 3.0)).abs() < 1e-12);
        assert!((d.bound - 7.643_856).abs() < 1e-6);
        assert!(d.ok);

        let d = diameter_bound_check(&two_triangles(), 3.0).unwrap();
        assert!(!d.ok);
        assert_eq!(d.diameter, Diameter::Infinite);
        assert!(diameter_bound_check(&two_triangles(), 1.0).is_err());
    }

    #[test]
    fn peel_examples() {
        let k8 = Graph::complete(8);
        let r = peel_non_expanding(&k8, &VertexSet::new(8), 4.0);
        assert!(r.peeled.is_empty());
        assert_eq!(r.remainder.len(), 8);
        assert!(r.within_bound);

        // star centered at 0 with leaves 1..=5, plus triangle 6,7,8
        let g = Graph::new(
            9,
            [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (6, 7), (7, 8), (8, 6)],
        )
        .unwrap();
        let r = peel_non_expanding(&g, &VertexSet::from_vertices(9, [0]), 4.0);
        assert_eq!(r.peeled.to_vec(), vec![1, 2, 3, 4, 5]);
        assert_eq!(r.remainder.to_vec(), vec![6, 7, 8]);
        assert!(!r.within_bound);
    }

    #[test]
    fn peel_dense_sample_keeps_everything() {
        let g = sample_gnp(64, 0.5, RngSeed::new(5, 0)).unwrap();
        let d = VertexSet::from_vertices(64, [3, 17, 22, 40, 61]);
        // every vertex keeps far more than 2 neighbors outside D
        let min_outside = (0..64)
            .filter(|&v| !d.contains(v))
            .map(|v| g.neighbors(v).iter().filter(|&&w| !d.contains(w)).count())
            .min()
            .unwrap();
        assert!(min_outside >= 2);
        let r = peel_non_expanding(&g, &d, 4.0);
        assert!(r.peeled.is_empty());
        assert_eq!(r.remainder.len(), 59);
    }

    #[test]
    fn peeling_cascades() {
        // path 0-1-2-3-4: with s = 4 every vertex needs 2 neighbors; ends go first, then the rest
        let r = peel_non_expanding(&Graph::path(5), &VertexSet::new(5), 4.0);
        assert_eq!(r.peeled.len(), 5);
        assert!(r.remainder.is_empty());
    }
}
