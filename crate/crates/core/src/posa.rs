//! Pósa rotation-extension with protected edges.
//!
//! Given a path `(v1, ..., vq)` and an edge `(vq, vi)` with `i <= q - 2`, the
//! rotation with fixed endpoint `v1` and pivot `vi` yields
//! `(v1, ..., vi, vq, v(q-1), ..., v(i+1))`; the edge `(vi, v(i+1))` is broken.
//!
//! Two edge sets constrain every operation here:
//!
//! * hard edges are never broken, and any Hamilton cycle returned contains all
//!   of them. They must form a linear forest (vertex-disjoint paths).
//! * soft edges are kept when possible. The rotation search first treats them
//!   as hard and only falls back to breaking them when that search is stuck;
//!   every broken soft edge is counted in [`RotationConstraints::broken_soft`].
//!
//! Both sets also act as glue while a path grows: after a vertex is appended,
//! its off-path hard partner (and then, when possible, its soft partner) is
//! appended right behind it.

use std::collections::{HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, Graph, HamiltonCycle, Path};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RotationError {
    #[error("pivot {pivot} is not adjacent to the rotating endpoint {endpoint}")]
    NotAdjacent { pivot: usize, endpoint: usize },
    #[error("rotation would break the protected edge {0}")]
    Forbidden(Edge),
    #[error("vertex {0} is not a valid pivot position on the path")]
    PivotOutOfRange(usize),
    #[error("vertex {0} is not an endpoint of the path")]
    NotAnEndpoint(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbsorbError {
    #[error("both cycle edges at {0} are protected")]
    BothProtected(usize),
    #[error("{0} is not on the cycle")]
    NotOnCycle(usize),
    #[error("{0} is already on the cycle")]
    AlreadyOnCycle(usize),
    #[error("{0} is not an edge of the graph")]
    MissingEdge(Edge),
}

/// Hard (never broken) and soft (kept when possible) edge sets.
#[derive(Clone, Debug, Default)]
pub struct RotationConstraints {
    hard: HashSet<Edge>,
    soft: HashSet<Edge>,
    hard_partners: HashMap<usize, Vec<usize>>,
    soft_partners: HashMap<usize, Vec<usize>>,
    broken_soft: usize,
    broken: Vec<Edge>,
}

impl RotationConstraints {
    /// The soft set is extended to contain every hard edge.
    pub fn new<H, S>(hard: H, soft: S) -> Self
    where
        H: IntoIterator<Item = Edge>,
        S: IntoIterator<Item = Edge>,
    {
        let hard: HashSet<Edge> = hard.into_iter().collect();
        let mut soft: HashSet<Edge> = soft.into_iter().collect();
        soft.extend(hard.iter().copied());
        let hard_partners = partner_map(&hard);
        let soft_partners = partner_map(&soft);
        RotationConstraints {
            hard,
            soft,
            hard_partners,
            soft_partners,
            broken_soft: 0,
            broken: Vec::new(),
        }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn hard_only<H: IntoIterator<Item = Edge>>(hard: H) -> Self {
        Self::new(hard, [])
    }

    pub fn is_hard(&self, e: Edge) -> bool {
        self.hard.contains(&e)
    }

    pub fn is_soft(&self, e: Edge) -> bool {
        self.soft.contains(&e)
    }

    /// Hard edges, sorted.
    pub fn hard_edges(&self) -> Vec<Edge> {
        sorted(&self.hard)
    }

    /// Soft edges (including hard ones), sorted.
    pub fn soft_edges(&self) -> Vec<Edge> {
        sorted(&self.soft)
    }

    /// Number of soft edges broken so far by applied operations.
    pub fn broken_soft(&self) -> usize {
        self.broken_soft
    }

    /// Every edge broken or removed by applied operations, in order.
    pub fn broken_edges(&self) -> &[Edge] {
        &self.broken
    }

    fn hard_degree(&self, v: usize) -> usize {
        self.hard_partners.get(&v).map_or(0, Vec::len)
    }

    fn hard_partners(&self, v: usize) -> &[usize] {
        self.hard_partners.get(&v).map_or(&[], Vec::as_slice)
    }

    fn soft_partners(&self, v: usize) -> &[usize] {
        self.soft_partners.get(&v).map_or(&[], Vec::as_slice)
    }

    /// A vertex off the current path may be appended only if it is not in the
    /// middle of a hard chain.
    fn can_enter(&self, v: usize) -> bool {
        self.hard_degree(v) <= 1
    }

    fn record_break(&mut self, e: Edge) -> Result<(), RotationError> {
        if self.hard.contains(&e) {
            return Err(RotationError::Forbidden(e));
        }
        if self.soft.contains(&e) {
            self.broken_soft += 1;
        }
        self.broken.push(e);
        Ok(())
    }

    /// Checks that the hard set is a linear forest. Returns an offending vertex otherwise.
    fn hard_linear_forest_violation(&self) -> Option<usize> {
        let mut keys: Vec<usize> = self.hard_partners.keys().copied().collect();
        keys.sort_unstable();
        if let Some(&v) = keys.iter().find(|&&v| self.hard_degree(v) > 2) {
            return Some(v);
        }
        // a forest with max degree 2 has |E| = |V| - #components
        let mut seen = HashSet::new();
        for &start in &keys {
            if seen.contains(&start) {
                continue;
            }
            let (mut vs, mut es) = (0usize, 0usize);
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(v) = stack.pop() {
                vs += 1;
                for &w in self.hard_partners(v) {
                    es += 1;
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            if es / 2 >= vs {
                return Some(start);
            }
        }
        None
    }
}

fn partner_map(edges: &HashSet<Edge>) -> HashMap<usize, Vec<usize>> {
    let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in edges {
        map.entry(e.0).or_default().push(e.1);
        map.entry(e.1).or_default().push(e.0);
    }
    for list in map.values_mut() {
        list.sort_unstable();
    }
    map
}

fn sorted(set: &HashSet<Edge>) -> Vec<Edge> {
    let mut v: Vec<Edge> = set.iter().copied().collect();
    v.sort_unstable();
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationStep {
    pub pivot: usize,
    pub broken: Edge,
}

/// A path being rotated around its first vertex, which stays fixed.
#[derive(Clone, Debug)]
pub struct RotationState {
    path: Vec<usize>,
    pos: Vec<usize>,
    rotation_count: usize,
    history: Vec<RotationStep>,
}

const ABSENT: usize = usize::MAX;

impl RotationState {
    /// `fixed` must be an endpoint of `path`; the path is oriented to start there.
    pub fn new(g: &Graph, path: &Path, fixed: usize) -> Result<Self, RotationError> {
        let mut vertices = path.vertices().to_vec();
        if vertices.first() != Some(&fixed) {
            if vertices.last() == Some(&fixed) {
                vertices.reverse();
            } else {
                return Err(RotationError::NotAnEndpoint(fixed));
            }
        }
        let mut pos = vec![ABSENT; g.n()];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        Ok(RotationState {
            path: vertices,
            pos,
            rotation_count: 0,
            history: Vec::new(),
        })
    }

    pub fn path(&self) -> Path {
        Path(self.path.clone())
    }

    pub fn vertices(&self) -> &[usize] {
        &self.path
    }

    pub fn fixed_endpoint(&self) -> usize {
        self.path[0]
    }

    pub fn endpoint(&self) -> usize {
        *self.path.last().unwrap()
    }

    pub fn rotation_count(&self) -> usize {
        self.rotation_count
    }

    pub fn history(&self) -> &[RotationStep] {
        &self.history
    }

    /// Rotates at `pivot`, reversing the segment after it. Returns the new endpoint.
    pub fn rotate(
        &mut self,
        g: &Graph,
        pivot: usize,
        constraints: &mut RotationConstraints,
    ) -> Result<usize, RotationError> {
        let q = self.path.len();
        let end = self.endpoint();
        let i = match self.pos.get(pivot) {
            Some(&i) if i != ABSENT && i + 2 < q => i,
            _ => return Err(RotationError::PivotOutOfRange(pivot)),
        };
        if !g.has_edge(end, pivot) {
            return Err(RotationError::NotAdjacent {
                pivot,
                endpoint: end,
            });
        }
        let broken = Edge::new(self.path[i], self.path[i + 1]);
        constraints.record_break(broken)?;
        self.path[i + 1..].reverse();
        for j in i + 1..q {
            self.pos[self.path[j]] = j;
        }
        self.rotation_count += 1;
        self.history.push(RotationStep { pivot, broken });
        debug_assert_eq!(self.path.len(), q);
        Ok(self.endpoint())
    }
}

/// Rotation depth and total state caps for one search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub max_depth: usize,
    pub max_states: usize,
}

impl SearchLimits {
    /// Depth `⌈3 ln n / ln s⌉` when `s >= 21`; otherwise depth is capped only by `n`.
    pub fn for_graph(n: usize, s: Option<f64>) -> Self {
        SearchLimits {
            max_depth: default_max_depth(n, s),
            max_states: (n * n).max(256),
        }
    }
}

/// The smallest expansion factor for which the logarithmic depth bound is used.
pub const DEPTH_BOUND_MIN_EXPANSION: f64 = 21.0;

pub fn default_max_depth(n: usize, s: Option<f64>) -> usize {
    match s {
        Some(s) if s >= DEPTH_BOUND_MIN_EXPANSION && n > 1 => {
            (3.0 * (n as f64).ln() / s.ln()).ceil() as usize
        }
        _ => n.max(1),
    }
}

/// Endpoints reachable by rotations with a fixed endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndpointSet {
    /// Sorted; includes the starting endpoint.
    pub endpoints: Vec<usize>,
    /// Pivot sequence that produces a path ending at each endpoint.
    pub witness: HashMap<usize, Vec<usize>>,
    /// An endpoint with a neighbor off the path, if one was found.
    pub extendable: Option<usize>,
    /// Whether the search stopped because `|endpoints| >= n/3`.
    pub reached_third: bool,
    pub depth_reached: usize,
}

/// Breadth-first search over rotations with `fixed` kept as an endpoint, never
/// breaking a hard edge.
///
/// Stops after the first depth level at which an endpoint with an outside
/// neighbor was found or at least `n/3` endpoints are known.
pub fn endpoint_set(
    g: &Graph,
    p0: &Path,
    fixed: usize,
    constraints: &RotationConstraints,
    max_depth: usize,
) -> Result<EndpointSet, RotationError> {
    let root = RotationState::new(g, p0, fixed)?;
    let n = g.n();
    let on_path = membership(n, &root.path);
    let mut paths = vec![root.path.clone()];
    let mut pivots: Vec<Vec<usize>> = vec![Vec::new()];
    let mut seen = FixedBitSet::with_capacity(n);
    seen.insert(root.endpoint());
    let mut frontier = vec![0usize];
    let mut scratch = vec![ABSENT; n];
    let mut result = EndpointSet {
        endpoints: vec![root.endpoint()],
        witness: HashMap::from([(root.endpoint(), Vec::new())]),
        extendable: None,
        reached_third: false,
        depth_reached: 0,
    };
    let check = |v: usize, res: &mut EndpointSet| {
        if res.extendable.is_none() && g.neighbors(v).iter().any(|&w| !on_path[w]) {
            res.extendable = Some(v);
        }
    };
    check(root.endpoint(), &mut result);
    let third = n as f64 / 3.0;
    while !frontier.is_empty()
        && result.depth_reached < max_depth
        && result.extendable.is_none()
        && (result.endpoints.len() as f64) < third
    {
        result.depth_reached += 1;
        let mut next = Vec::new();
        for idx in frontier {
            let children = rotation_children(g, &paths[idx], &mut scratch, |e| constraints.is_hard(e));
            for (pivot, child) in children {
                let end = *child.last().unwrap();
                if !seen.put(end) {
                    let mut seq = pivots[idx].clone();
                    seq.push(pivot);
                    result.endpoints.push(end);
                    result.witness.insert(end, seq.clone());
                    check(end, &mut result);
                    paths.push(child);
                    pivots.push(seq);
                    next.push(paths.len() - 1);
                }
            }
        }
        frontier = next;
    }
    result.reached_third = result.endpoints.len() as f64 >= third;
    result.endpoints.sort_unstable();
    Ok(result)
}

impl EndpointSet {
    /// Replays the witness for `endpoint`, returning the resulting path.
    pub fn replay(
        &self,
        g: &Graph,
        p0: &Path,
        fixed: usize,
        endpoint: usize,
        constraints: &RotationConstraints,
    ) -> Result<Path, RotationError> {
        let mut state = RotationState::new(g, p0, fixed)?;
        let mut scratch = constraints.clone();
        for &pivot in self.witness.get(&endpoint).into_iter().flatten() {
            state.rotate(g, pivot, &mut scratch)?;
        }
        Ok(state.path())
    }
}

fn membership(n: usize, vertices: &[usize]) -> FixedBitSet {
    let mut bits = FixedBitSet::with_capacity(n);
    for &v in vertices {
        bits.insert(v);
    }
    bits
}

/// All single rotations of `path` at its last vertex, in ascending pivot order,
/// skipping rotations whose broken edge is rejected by `forbidden`.
fn rotation_children<F>(
    g: &Graph,
    path: &[usize],
    pos: &mut [usize],
    forbidden: F,
) -> Vec<(usize, Vec<usize>)>
where
    F: Fn(Edge) -> bool,
{
    let q = path.len();
    for (i, &v) in path.iter().enumerate() {
        pos[v] = i;
    }
    let end = path[q - 1];
    let mut out = Vec::new();
    for &w in g.neighbors(end) {
        let i = pos[w];
        if i == ABSENT || i + 2 >= q {
            continue;
        }
        if forbidden(Edge::new(path[i], path[i + 1])) {
            continue;
        }
        let mut child = path.to_vec();
        child[i + 1..].reverse();
        out.push((w, child));
    }
    for &v in path {
        pos[v] = ABSENT;
    }
    out
}

/// Diagnostics for a rotation search that found neither an extension nor a chord.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StuckReport {
    pub path_len: usize,
    pub first_level_endpoints: usize,
    pub second_level_endpoints_max: usize,
    pub states_explored: usize,
    pub state_cap_hit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtendOutcome {
    /// `path` ends at `endpoint`, which is adjacent to `external`, a vertex off the path.
    ExtendAt {
        path: Path,
        endpoint: usize,
        external: usize,
    },
    /// The endpoints `x` (first) and `y` (last) of `path` are adjacent.
    Chord { path: Path, x: usize, y: usize },
    Stuck(StuckReport),
}

struct Node {
    path: Vec<usize>,
    parent: Option<usize>,
    step: Option<RotationStep>,
}

/// Two-level rotation search for a path on `V(p0)` that can be extended or closed.
///
/// Level one rotates the last endpoint with the first fixed; level two takes
/// every level-one path and rotates its other end. The first path found with
/// an endpoint adjacent to an admissible vertex off the path is returned as
/// `ExtendAt`. A path with adjacent endpoints is returned as `Chord`: after
/// level one if no extension was found there, or as soon as it appears in level
/// two. Hard edges are never broken. Soft edges are first treated as hard; the
/// search is repeated without that restriction only if the first pass is stuck.
///
/// The applied rotations are charged to `constraints`.
pub fn rotate_until_extendable(
    g: &Graph,
    p0: &Path,
    constraints: &mut RotationConstraints,
    limits: SearchLimits,
) -> ExtendOutcome {
    let n = g.n();
    if p0.vertices().is_empty() {
        return ExtendOutcome::Stuck(StuckReport {
            path_len: 0,
            first_level_endpoints: 0,
            second_level_endpoints_max: 0,
            states_explored: 0,
            state_cap_hit: false,
        });
    }
    let on_path = membership(n, p0.vertices());
    let spanning = p0.vertices().len() == n;

    let first = p0.first().unwrap();
    let last = p0.last().unwrap();
    if let Some(ext) = admissible_outside(g, constraints, &on_path, last) {
        return ExtendOutcome::ExtendAt {
            path: p0.clone(),
            endpoint: last,
            external: ext,
        };
    }
    if let Some(ext) = admissible_outside(g, constraints, &on_path, first) {
        return ExtendOutcome::ExtendAt {
            path: p0.reversed(),
            endpoint: first,
            external: ext,
        };
    }
    if p0.len() >= 2 && g.has_edge(first, last) && spanning {
        return ExtendOutcome::Chord {
            path: p0.clone(),
            x: first,
            y: last,
        };
    }

    let soft_on_path = p0.edges().any(|e| constraints.is_soft(e) && !constraints.is_hard(e));
    let mut report = None;
    for keep_soft in [true, false] {
        if keep_soft && !soft_on_path {
            continue;
        }
        let search = TwoLevelSearch {
            g,
            constraints,
            on_path: &on_path,
            spanning,
            keep_soft,
            limits,
        };
        match search.run(p0.vertices()) {
            Ok((outcome, steps)) => {
                for step in steps {
                    constraints
                        .record_break(step.broken)
                        .expect("search never breaks hard edges");
                }
                return outcome;
            }
            Err(stuck) => report = Some(stuck),
        }
    }
    ExtendOutcome::Stuck(report.unwrap())
}

fn admissible_outside(
    g: &Graph,
    constraints: &RotationConstraints,
    on_path: &FixedBitSet,
    v: usize,
) -> Option<usize> {
    g.neighbors(v)
        .iter()
        .copied()
        .find(|&w| !on_path[w] && constraints.can_enter(w))
}

struct TwoLevelSearch<'a> {
    g: &'a Graph,
    constraints: &'a RotationConstraints,
    on_path: &'a FixedBitSet,
    spanning: bool,
    keep_soft: bool,
    limits: SearchLimits,
}

impl TwoLevelSearch<'_> {
    fn forbidden(&self, e: Edge) -> bool {
        self.constraints.is_hard(e) || (self.keep_soft && self.constraints.is_soft(e))
    }

    fn outside(&self, v: usize) -> Option<usize> {
        if self.spanning {
            return None;
        }
        admissible_outside(self.g, self.constraints, self.on_path, v)
    }

    fn run(&self, root: &[usize]) -> Result<(ExtendOutcome, Vec<RotationStep>), StuckReport> {
        let g = self.g;
        let n = g.n();
        let mut scratch = vec![ABSENT; n];
        let mut states = 0usize;
        let mut cap_hit = false;

        // level one: first vertex fixed
        let mut level1 = vec![Node {
            path: root.to_vec(),
            parent: None,
            step: None,
        }];
        let mut seen = FixedBitSet::with_capacity(n);
        seen.insert(*root.last().unwrap());
        let mut chord: Option<usize> = None;
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        'level1: while let Some((idx, depth)) = queue.pop_front() {
            if depth >= self.limits.max_depth {
                continue;
            }
            let children =
                rotation_children(g, &level1[idx].path, &mut scratch, |e| self.forbidden(e));
            for (pivot, child) in children {
                let end = *child.last().unwrap();
                if seen.put(end) {
                    continue;
                }
                states += 1;
                let broken_at = level1[idx].path.iter().position(|&v| v == pivot).unwrap();
                let step = RotationStep {
                    pivot,
                    broken: Edge::new(pivot, level1[idx].path[broken_at + 1]),
                };
                let first = child[0];
                level1.push(Node {
                    path: child,
                    parent: Some(idx),
                    step: Some(step),
                });
                let at = level1.len() - 1;
                if let Some(ext) = self.outside(end) {
                    let steps = history(&level1, at);
                    let path = Path(level1.swap_remove(at).path);
                    return Ok((
                        ExtendOutcome::ExtendAt {
                            path,
                            endpoint: end,
                            external: ext,
                        },
                        steps,
                    ));
                }
                if chord.is_none() && g.has_edge(first, end) {
                    chord = Some(at);
                    if self.spanning {
                        break 'level1;
                    }
                }
                if states >= self.limits.max_states {
                    cap_hit = true;
                    break 'level1;
                }
                queue.push_back((at, depth + 1));
            }
        }
        if let Some(at) = chord {
            let steps = history(&level1, at);
            let path = Path(level1[at].path.clone());
            let (x, y) = (path.first().unwrap(), path.last().unwrap());
            return Ok((ExtendOutcome::Chord { path, x, y }, steps));
        }

        // level two: the level-one endpoint is fixed, the original first vertex rotates
        let mut second_max = 0usize;
        if !cap_hit {
            'level2: for origin in 0..level1.len() {
                let mut start = level1[origin].path.clone();
                start.reverse();
                let fixed = start[0];
                let mut nodes = vec![Node {
                    path: start,
                    parent: None,
                    step: None,
                }];
                let mut seen2 = FixedBitSet::with_capacity(n);
                seen2.insert(*nodes[0].path.last().unwrap());
                let mut queue = VecDeque::from([(0usize, 0usize)]);
                while let Some((idx, depth)) = queue.pop_front() {
                    if depth >= self.limits.max_depth {
                        continue;
                    }
                    let children =
                        rotation_children(g, &nodes[idx].path, &mut scratch, |e| self.forbidden(e));
                    for (pivot, child) in children {
                        let end = *child.last().unwrap();
                        if seen2.put(end) {
                            continue;
                        }
                        states += 1;
                        let broken_at = nodes[idx].path.iter().position(|&v| v == pivot).unwrap();
                        let step = RotationStep {
                            pivot,
                            broken: Edge::new(pivot, nodes[idx].path[broken_at + 1]),
                        };
                        nodes.push(Node {
                            path: child,
                            parent: Some(idx),
                            step: Some(step),
                        });
                        let at = nodes.len() - 1;
                        let ext = self.outside(end);
                        if ext.is_some() || g.has_edge(fixed, end) {
                            let mut steps = history(&level1, origin);
                            steps.extend(history(&nodes, at));
                            let path = Path(nodes.swap_remove(at).path);
                            let outcome = match ext {
                                Some(external) => ExtendOutcome::ExtendAt {
                                    path,
                                    endpoint: end,
                                    external,
                                },
                                None => ExtendOutcome::Chord {
                                    x: fixed,
                                    y: end,
                                    path,
                                },
                            };
                            return Ok((outcome, steps));
                        }
                        if states >= self.limits.max_states {
                            cap_hit = true;
                            second_max = second_max.max(nodes.len());
                            break 'level2;
                        }
                        queue.push_back((at, depth + 1));
                    }
                }
                second_max = second_max.max(nodes.len());
            }
        }
        Err(StuckReport {
            path_len: root.len().saturating_sub(1),
            first_level_endpoints: level1.len(),
            second_level_endpoints_max: second_max,
            states_explored: states,
            state_cap_hit: cap_hit,
        })
    }
}

fn history(nodes: &[Node], mut at: usize) -> Vec<RotationStep> {
    let mut steps = Vec::new();
    while let Some(step) = nodes[at].step {
        steps.push(step);
        at = nodes[at].parent.unwrap();
    }
    steps.reverse();
    steps
}

/// Opens the cycle at `w` and attaches the off-cycle vertex `a`.
///
/// One of the two cycle edges at `w` is removed: never a hard edge, a soft
/// edge only if both are soft, otherwise the one toward the lower-numbered
/// neighbor. The result runs around the cycle, ends at `w`, then `a`.
pub fn absorb_external_vertex(
    g: &Graph,
    cycle: &[usize],
    w: usize,
    a: usize,
    constraints: &mut RotationConstraints,
) -> Result<Path, AbsorbError> {
    let k = cycle.len();
    let at = cycle
        .iter()
        .position(|&v| v == w)
        .ok_or(AbsorbError::NotOnCycle(w))?;
    if cycle.contains(&a) {
        return Err(AbsorbError::AlreadyOnCycle(a));
    }
    if !g.has_edge(a, w) {
        return Err(AbsorbError::MissingEdge(Edge::new(a, w)));
    }
    let next = cycle[(at + 1) % k];
    let prev = cycle[(at + k - 1) % k];
    let rank = |u: usize| {
        let e = Edge::new(w, u);
        (constraints.is_hard(e), constraints.is_soft(e), u)
    };
    let mut options = [next, prev];
    options.sort_by_key(|&u| rank(u));
    let cut = options[0];
    if constraints.is_hard(Edge::new(w, cut)) {
        return Err(AbsorbError::BothProtected(w));
    }
    constraints
        .record_break(Edge::new(w, cut))
        .expect("hard edges are filtered above");
    let mut path = Vec::with_capacity(k + 1);
    if cut == next {
        // next, next+1, ..., prev, w
        for j in 1..=k {
            path.push(cycle[(at + j) % k]);
        }
    } else {
        // prev, prev-1, ..., next, w
        for j in 1..=k {
            path.push(cycle[(at + k - j) % k]);
        }
    }
    path.push(a);
    Ok(Path(path))
}

/// Budget and search limits for [`find_hamilton_cycle`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonConfig {
    /// Maximum number of extend / rotate / absorb iterations.
    pub budget: usize,
    pub limits: SearchLimits,
}

impl HamiltonConfig {
    /// Budget `10 n`; see [`SearchLimits::for_graph`].
    pub fn for_graph(n: usize, s: Option<f64>) -> Self {
        HamiltonConfig {
            budget: 10 * n.max(1),
            limits: SearchLimits::for_graph(n, s),
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }
}

/// Largest number of hard edges for which a cycle through them is guaranteed
/// in an `s`-expander: `s/24 - 1/2`. Below 1 for every `s < 36`.
pub fn hard_edge_limit(s: f64) -> f64 {
    s / 24.0 - 0.5
}

/// Where the search starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedPath {
    /// Greedy depth-first path from `start` (default: a maximum-degree vertex).
    Greedy { start: Option<usize> },
    Given(Path),
}

impl Default for SeedPath {
    fn default() -> Self {
        SeedPath::Greedy { start: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonSuccess {
    pub cycle: HamiltonCycle,
    pub iterations: usize,
    pub rotations: usize,
    /// Soft edges broken during this search.
    pub broken_soft: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    TooFewVertices,
    ProtectedNotInGraph(Edge),
    ProtectedNotLinearForest(usize),
    SeedConflict,
    Stuck,
    NoAbsorption,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Error)]
#[error("no Hamilton cycle found ({reason:?}) after {iterations} iterations; longest path had {best_path_vertices} vertices")]
pub struct HamiltonFailure {
    pub reason: FailureReason,
    pub iterations: usize,
    pub best_path_vertices: usize,
    pub stuck: Option<StuckReport>,
}

/// Searches for a Hamilton cycle containing every hard edge.
///
/// Alternates rotation search with extension by one vertex (plus any glued
/// chain) and, when a non-spanning cycle closes, opens it at a vertex with an
/// off-cycle neighbor. Fails with a report instead of guessing; it never
/// returns an invalid cycle.
pub fn find_hamilton_cycle(
    g: &Graph,
    constraints: &mut RotationConstraints,
    config: &HamiltonConfig,
    seed: SeedPath,
) -> Result<HamiltonSuccess, HamiltonFailure> {
    let n = g.n();
    let fail = |reason, iterations, best, stuck| HamiltonFailure {
        reason,
        iterations,
        best_path_vertices: best,
        stuck,
    };
    if n < 3 {
        return Err(fail(FailureReason::TooFewVertices, 0, n.min(1), None));
    }
    for e in constraints.hard_edges() {
        if e.1 >= n || !g.has_edge(e.0, e.1) {
            return Err(fail(FailureReason::ProtectedNotInGraph(e), 0, 0, None));
        }
    }
    if let Some(v) = constraints.hard_linear_forest_violation() {
        return Err(fail(FailureReason::ProtectedNotLinearForest(v), 0, 0, None));
    }
    let soft_before = constraints.broken_soft();
    let rotations_before = constraints.broken_edges().len();

    let mut path = match seed {
        SeedPath::Given(p) => {
            if p.validate(g).is_err() || !seed_respects_hard(&p, constraints, n) {
                return Err(fail(FailureReason::SeedConflict, 0, p.vertices().len(), None));
            }
            if p.is_empty() {
                greedy_path(g, constraints, None)
            } else {
                p.0
            }
        }
        SeedPath::Greedy { start } => greedy_path(g, constraints, start),
    };
    let mut on_path = membership(n, &path);
    let mut best = path.len();

    for iteration in 1..=config.budget {
        best = best.max(path.len());
        if path.len() == n && g.has_edge(path[0], path[n - 1]) {
            return Ok(success(path, iteration - 1, constraints, soft_before, rotations_before));
        }
        let outcome = rotate_until_extendable(g, &Path(path.clone()), constraints, config.limits);
        match outcome {
            ExtendOutcome::ExtendAt { path: p, external, .. } => {
                path = p.0;
                append_glued(&mut path, &mut on_path, g, constraints, external);
            }
            ExtendOutcome::Chord { path: p, .. } => {
                if p.vertices().len() == n {
                    return Ok(success(p.0, iteration, constraints, soft_before, rotations_before));
                }
                let cycle = p.0;
                let Some((w, a)) = absorption_site(g, &cycle, &on_path, constraints) else {
                    return Err(fail(FailureReason::NoAbsorption, iteration, best, None));
                };
                path = absorb_external_vertex(g, &cycle, w, a, constraints)
                    .expect("absorption site has an unprotected cycle edge")
                    .0;
                path.pop();
                append_glued(&mut path, &mut on_path, g, constraints, a);
            }
            ExtendOutcome::Stuck(report) => {
                return Err(fail(FailureReason::Stuck, iteration, best, Some(report)));
            }
        }
    }
    best = best.max(path.len());
    if path.len() == n && g.has_edge(path[0], path[n - 1]) {
        return Ok(success(path, config.budget, constraints, soft_before, rotations_before));
    }
    Err(fail(FailureReason::BudgetExhausted, config.budget, best, None))
}

fn success(
    path: Vec<usize>,
    iterations: usize,
    constraints: &RotationConstraints,
    soft_before: usize,
    broken_before: usize,
) -> HamiltonSuccess {
    HamiltonSuccess {
        cycle: HamiltonCycle(path),
        iterations,
        rotations: constraints.broken_edges().len() - broken_before,
        broken_soft: constraints.broken_soft() - soft_before,
    }
}

/// Every hard edge is either a path edge or has both endpoints off the path.
fn seed_respects_hard(p: &Path, constraints: &RotationConstraints, n: usize) -> bool {
    let on = membership(n, p.vertices());
    let path_edges: HashSet<Edge> = p.edges().collect();
    constraints.hard_edges().into_iter().all(|e| {
        if on[e.0] && on[e.1] {
            path_edges.contains(&e)
        } else {
            !on[e.0] && !on[e.1]
        }
    })
}

/// A cycle vertex `w` and an admissible off-cycle neighbor `a`, preferring a
/// `w` whose removable cycle edge is not soft; lowest indices first.
fn absorption_site(
    g: &Graph,
    cycle: &[usize],
    on_path: &FixedBitSet,
    constraints: &RotationConstraints,
) -> Option<(usize, usize)> {
    let k = cycle.len();
    let mut order: Vec<(usize, usize)> = cycle.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    order.sort_unstable();
    let mut fallback = None;
    for (w, i) in order {
        let Some(a) = admissible_outside(g, constraints, on_path, w) else {
            continue;
        };
        let edges = [
            Edge::new(w, cycle[(i + 1) % k]),
            Edge::new(w, cycle[(i + k - 1) % k]),
        ];
        if edges.iter().any(|&e| !constraints.is_soft(e)) {
            return Some((w, a));
        }
        if fallback.is_none() && edges.iter().any(|&e| !constraints.is_hard(e)) {
            fallback = Some((w, a));
        }
    }
    fallback
}

/// Appends `v`, then follows glue: the off-path hard partner first, else an
/// admissible off-path soft partner.
fn append_glued(
    path: &mut Vec<usize>,
    on_path: &mut FixedBitSet,
    g: &Graph,
    constraints: &RotationConstraints,
    v: usize,
) {
    let mut cur = v;
    loop {
        path.push(cur);
        on_path.insert(cur);
        let hard_next = constraints
            .hard_partners(cur)
            .iter()
            .copied()
            .find(|&w| !on_path[w]);
        let next = hard_next.or_else(|| {
            constraints
                .soft_partners(cur)
                .iter()
                .copied()
                .find(|&w| !on_path[w] && constraints.can_enter(w) && g.has_edge(cur, w))
        });
        match next {
            Some(w) => cur = w,
            None => break,
        }
    }
}

/// Greedy depth-first path: from the start, repeatedly move to the admissible
/// unvisited neighbor with the fewest unvisited neighbors (lowest index on ties),
/// following glued chains.
fn greedy_path(g: &Graph, constraints: &RotationConstraints, start: Option<usize>) -> Vec<usize> {
    let n = g.n();
    let mut start = start.unwrap_or_else(|| {
        (0..n)
            .max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)))
            .unwrap_or(0)
    });
    // never start inside a hard chain
    if !constraints.can_enter(start) {
        let mut prev = start;
        let mut cur = constraints.hard_partners(start)[0];
        while constraints.hard_degree(cur) == 2 {
            let nxt = constraints
                .hard_partners(cur)
                .iter()
                .copied()
                .find(|&w| w != prev)
                .unwrap();
            prev = cur;
            cur = nxt;
        }
        start = cur;
    }
    let mut on_path = FixedBitSet::with_capacity(n);
    let mut path = Vec::with_capacity(n);
    let mut free_deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let visit = |path: &mut Vec<usize>, on_path: &mut FixedBitSet, v: usize, free_deg: &mut Vec<usize>| {
        let before = path.len();
        append_glued(path, on_path, g, constraints, v);
        for &u in &path[before..] {
            for &w in g.neighbors(u) {
                free_deg[w] -= 1;
            }
        }
    };
    visit(&mut path, &mut on_path, start, &mut free_deg);
    loop {
        let end = *path.last().unwrap();
        let next = g
            .neighbors(end)
            .iter()
            .copied()
            .filter(|&w| !on_path[w] && constraints.can_enter(w))
            .min_by_key(|&w| (free_deg[w], w));
        match next {
            Some(w) => visit(&mut path, &mut on_path, w, &mut free_deg),
            None => break,
        }
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_edge_limit_values() {
        assert_eq!(hard_edge_limit(36.0), 1.0);
        assert!(hard_edge_limit(21.0) < 1.0);
    }

    /// Vertices 1..=5 form the path 1-2-3-4-5 with the chord 5-2; vertex 0 is isolated.
    fn c5_with_chord() -> Graph {
        Graph::new(6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (5, 2)]).unwrap()
    }

    #[test]
    fn rotate_examples() {
        let g = c5_with_chord();
        let p = Path::new(vec![1, 2, 3, 4, 5]);
        let mut c = RotationConstraints::none();
        let mut st = RotationState::new(&g, &p, 1).unwrap();
        assert_eq!(st.rotate(&g, 2, &mut c).unwrap(), 3);
        assert_eq!(st.vertices(), &[1, 2, 5, 4, 3]);
        assert_eq!(st.history(), &[RotationStep { pivot: 2, broken: Edge(2, 3) }]);
        assert_eq!(st.rotation_count(), 1);

        let mut c = RotationConstraints::hard_only([Edge(2, 3)]);
        let mut st = RotationState::new(&g, &p, 1).unwrap();
        assert_eq!(st.rotate(&g, 2, &mut c), Err(RotationError::Forbidden(Edge(2, 3))));
        assert_eq!(st.vertices(), &[1, 2, 3, 4, 5]);

        let c5 = Graph::cycle(5);
        let mut c = RotationConstraints::none();
        let mut st = RotationState::new(&c5, &Path::new(vec![0, 1, 2, 3, 4]), 0).unwrap();
        st.rotate(&c5, 0, &mut c).unwrap();
        assert_eq!(st.vertices(), &[0, 4, 3, 2, 1]);
        assert_eq!(st.history()[0].broken, Edge(0, 1));
    }

    #[test]
    fn rotate_errors() {
        let g = c5_with_chord();
        let p = Path::new(vec![1, 2, 3, 4, 5]);
        let mut c = RotationConstraints::none();
        let mut st = RotationState::new(&g, &p, 1).unwrap();
        assert_eq!(
            st.rotate(&g, 3, &mut c),
            Err(RotationError::NotAdjacent { pivot: 3, endpoint: 5 })
        );
        // the endpoint's predecessor is not a pivot
        assert_eq!(st.rotate(&g, 4, &mut c), Err(RotationError::PivotOutOfRange(4)));
        assert_eq!(st.rotate(&g, 0, &mut c), Err(RotationError::PivotOutOfRange(0)));
        assert!(RotationState::new(&g, &p, 3).is_err());
    }

    #[test]
    fn soft_breaks_are_counted() {
        let g = c5_with_chord();
        let mut c = RotationConstraints::new([], [Edge(2, 3)]);
        let mut st = RotationState::new(&g, &Path::new(vec![1, 2, 3, 4, 5]), 1).unwrap();
        st.rotate(&g, 2, &mut c).unwrap();
        assert_eq!(c.broken_soft(), 1);
    }

    #[test]
    fn endpoint_set_examples() {
        let c5 = Graph::cycle(5);
        let p = Path::new(vec![0, 1, 2, 3, 4]);
        let es = endpoint_set(&c5, &p, 0, &RotationConstraints::none(), 5).unwrap();
        assert!(es.endpoints.contains(&4) && es.endpoints.contains(&1));

        let es = endpoint_set(&c5, &p, 0, &RotationConstraints::hard_only([Edge(0, 1)]), 5).unwrap();
        assert_eq!(es.endpoints, vec![4]);

        let k5 = Graph::complete(5);
        let es = endpoint_set(&k5, &p, 0, &RotationConstraints::none(), 2).unwrap();
        assert_eq!(es.endpoints, vec![1, 2, 3, 4]);
        for &e in &es.endpoints {
            let replayed = es.replay(&k5, &p, 0, e, &RotationConstraints::none()).unwrap();
            assert_eq!(replayed.first(), Some(0));
            assert_eq!(replayed.last(), Some(e));
        }
    }

    #[test]
    fn endpoint_set_flags_extension() {
        let k5 = Graph::complete(5);
        let es = endpoint_set(&k5, &Path::new(vec![0, 1, 2]), 0, &RotationConstraints::none(), 3)
            .unwrap();
        assert_eq!(es.extendable, Some(2));
        assert_eq!(es.depth_reached, 0);
    }

    #[test]
    fn until_extendable_examples() {
        let limits = SearchLimits::for_graph(5, None);
        let c5 = Graph::cycle(5);
        let mut c = RotationConstraints::none();
        match rotate_until_extendable(&c5, &Path::new(vec![0, 1, 2, 3, 4]), &mut c, limits) {
            ExtendOutcome::Chord { x, y, .. } => assert_eq!((x, y), (0, 4)),
            other => panic!("{other:?}"),
        }

        let k4 = Graph::complete(4);
        match rotate_until_extendable(&k4, &Path::new(vec![0, 1]), &mut c, limits) {
            ExtendOutcome::ExtendAt { endpoint, external, .. } => {
                assert_eq!((endpoint, external), (1, 2))
            }
            other => panic!("{other:?}"),
        }

        let p5 = Graph::path(5);
        assert!(matches!(
            rotate_until_extendable(&p5, &Path::new(vec![0, 1, 2, 3, 4]), &mut c, limits),
            ExtendOutcome::Stuck(_)
        ));
    }

    #[test]
    fn until_extendable_rotates_when_needed() {
        // path 0-1-2-3 with 3 adjacent to 1, and 2 adjacent to the outside vertex 4
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 1), (2, 4)]).unwrap();
        let mut c = RotationConstraints::none();
        let out = rotate_until_extendable(
            &g,
            &Path::new(vec![0, 1, 2, 3]),
            &mut c,
            SearchLimits::for_graph(5, None),
        );
        match out {
            ExtendOutcome::ExtendAt { path, endpoint, external } => {
                assert_eq!(path.vertices(), &[0, 1, 3, 2]);
                assert_eq!((endpoint, external), (2, 4));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(c.broken_edges(), &[Edge(1, 2)]);
    }

    #[test]
    fn absorb_examples() {
        let k4 = Graph::complete(4);
        let mut c = RotationConstraints::none();
        let p = absorb_external_vertex(&k4, &[0, 1, 2], 0, 3, &mut c).unwrap();
        assert!(p.vertices() == [1, 2, 0, 3] || p.vertices() == [2, 1, 0, 3]);
        assert_eq!(c.broken_soft(), 0);

        let mut c = RotationConstraints::new([], [Edge(0, 1)]);
        let p = absorb_external_vertex(&k4, &[0, 1, 2], 0, 3, &mut c).unwrap();
        assert_eq!(p.vertices(), &[2, 1, 0, 3]);
        assert_eq!(c.broken_soft(), 0);

        let mut c = RotationConstraints::new([], [Edge(0, 1), Edge(0, 2)]);
        let p = absorb_external_vertex(&k4, &[0, 1, 2], 0, 3, &mut c).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(c.broken_soft(), 1);

        let mut c = RotationConstraints::hard_only([Edge(0, 1), Edge(0, 2)]);
        assert_eq!(
            absorb_external_vertex(&k4, &[0, 1, 2], 0, 3, &mut c),
            Err(AbsorbError::BothProtected(0))
        );
    }

    #[test]
    fn hamilton_examples() {
        let k5 = Graph::complete(5);
        let mut c = RotationConstraints::none();
        let ok = find_hamilton_cycle(&k5, &mut c, &HamiltonConfig::for_graph(5, None), SeedPath::default())
            .unwrap();
        assert!(ok.cycle.validate(&k5).is_ok());

        let pet = Graph::petersen();
        let mut c = RotationConstraints::none();
        assert!(find_hamilton_cycle(&pet, &mut c, &HamiltonConfig::for_graph(10, None), SeedPath::default())
            .is_err());

        let k6 = Graph::complete(6);
        let f = [Edge(0, 1), Edge(2, 3), Edge(4, 5)];
        let mut c = RotationConstraints::hard_only(f);
        let ok = find_hamilton_cycle(&k6, &mut c, &HamiltonConfig::for_graph(6, None), SeedPath::default())
            .unwrap();
        assert!(ok.cycle.validate(&k6).is_ok());
        let edges: HashSet<Edge> = ok.cycle.edges().collect();
        assert!(f.iter().all(|e| edges.contains(e)));
    }

    #[test]
    fn hamilton_rejects_bad_protection() {
        let k5 = Graph::complete(5);
        let cfg = HamiltonConfig::for_graph(5, None);
        let mut c = RotationConstraints::hard_only([Edge(0, 1), Edge(0, 2), Edge(0, 3)]);
        let err = find_hamilton_cycle(&k5, &mut c, &cfg, SeedPath::default()).unwrap_err();
        assert_eq!(err.reason, FailureReason::ProtectedNotLinearForest(0));

        let mut c = RotationConstraints::hard_only([Edge(0, 1), Edge(1, 2), Edge(0, 2)]);
        let err = find_hamilton_cycle(&k5, &mut c, &cfg, SeedPath::default()).unwrap_err();
        assert!(matches!(err.reason, FailureReason::ProtectedNotLinearForest(_)));

        let c5 = Graph::cycle(5);
        let mut c = RotationConstraints::hard_only([Edge(0, 2)]);
        let err = find_hamilton_cycle(&c5, &mut c, &cfg, SeedPath::default()).unwrap_err();
        assert_eq!(err.reason, FailureReason::ProtectedNotInGraph(Edge(0, 2)));
    }

    #[test]
    fn hamilton_with_chain_protection() {
        let k7 = Graph::complete(7);
        let f = [Edge(0, 1), Edge(1, 2), Edge(2, 3), Edge(5, 6)];
        let mut c = RotationConstraints::hard_only(f);
        let ok = find_hamilton_cycle(&k7, &mut c, &HamiltonConfig::for_graph(7, None), SeedPath::Greedy {
            start: Some(1),
        })
        .unwrap();
        let edges: HashSet<Edge> = ok.cycle.edges().collect();
        assert!(f.iter().all(|e| edges.contains(e)));
    }

    #[test]
    fn disconnected_graph_fails() {
        let g = Graph::new(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let mut c = RotationConstraints::none();
        let err = find_hamilton_cycle(&g, &mut c, &HamiltonConfig::for_graph(6, None), SeedPath::default())
            .unwrap_err();
        assert_eq!(err.reason, FailureReason::NoAbsorption);
    }

    #[test]
    fn seed_path_conflicts_are_rejected() {
        let k5 = Graph::complete(5);
        let mut c = RotationConstraints::hard_only([Edge(1, 3)]);
        let err = find_hamilton_cycle(
            &k5,
            &mut c,
            &HamiltonConfig::for_graph(5, None),
            SeedPath::Given(Path::new(vec![0, 1, 2])),
        )
        .unwrap_err();
        assert_eq!(err.reason, FailureReason::SeedConflict);
    }

    #[test]
    fn depth_rule() {
        assert_eq!(default_max_depth(1000, Some(10.0)), 1000);
        assert_eq!(
            default_max_depth(1000, Some(25.0)),
            (3.0 * 1000f64.ln() / 25f64.ln()).ceil() as usize
        );
    }
}
