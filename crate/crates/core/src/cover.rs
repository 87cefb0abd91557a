//! Covering matchings and whole graphs by Hamilton cycles.
//!
//! The full pipeline: greedily pack edge-disjoint Hamilton cycles, color the
//! remaining edges into matchings, then cover each matching by a few Hamilton
//! cycles of the whole graph.

use std::collections::HashSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concatenate::{merge_into_single_path, ExtensionError, MergeStats};
use crate::expansion::{large_expansion_witness_search, small_expansion_witness_search, Verdict};
use crate::graph::{Edge, Graph, HamiltonCycle, Path};
use crate::posa::{
    find_hamilton_cycle, HamiltonConfig, HamiltonFailure, RotationConstraints, SeedPath,
};
use crate::random::{expander_params_for_gnp, sample_gnp, RngSeed};
use crate::verify::validate_cover;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("vertex {0} is covered twice")]
    SharedVertex(usize),
    #[error("edge {0} is not in the graph")]
    MissingEdge(Edge),
}

/// Vertex-disjoint edges, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    edges: Vec<Edge>,
}

impl Matching {
    pub fn new<I: IntoIterator<Item = Edge>>(edges: I) -> Result<Self, MatchingError> {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort_unstable();
        edges.dedup();
        let mut seen = HashSet::new();
        for e in &edges {
            for v in [e.0, e.1] {
                if !seen.insert(v) {
                    return Err(MatchingError::SharedVertex(v));
                }
            }
        }
        Ok(Matching { edges })
    }

    /// Lexicographic first-fit maximal matching.
    pub fn greedy_maximal(g: &Graph) -> Self {
        let mut used = vec![false; g.n()];
        let mut edges = Vec::new();
        for e in g.edges() {
            if !used[e.0] && !used[e.1] {
                used[e.0] = true;
                used[e.1] = true;
                edges.push(e);
            }
        }
        Matching { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn validate_in(&self, g: &Graph) -> Result<(), MatchingError> {
        match self.edges.iter().find(|e| e.1 >= g.n() || !g.has_edge(e.0, e.1)) {
            Some(&e) => Err(MatchingError::MissingEdge(e)),
            None => Ok(()),
        }
    }

    /// The edges not on `cycle`.
    pub fn minus_cycle(&self, cycle: &HamiltonCycle) -> Matching {
        let on: HashSet<Edge> = cycle.edges().collect();
        Matching {
            edges: self.edges.iter().copied().filter(|e| !on.contains(e)).collect(),
        }
    }
}

/// How a matching is split before covering.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChunkRule {
    /// The whole matching at once.
    #[default]
    Whole,
    /// Chunks of `max(1, ⌊alpha^3 n / 9200⌋)` edges.
    Formula,
    Fixed(usize),
}

impl ChunkRule {
    pub fn chunk_size(self, n: usize, alpha: f64, len: usize) -> usize {
        match self {
            ChunkRule::Whole => len.max(1),
            ChunkRule::Formula => ((alpha.powi(3) * n as f64 / 9200.0).floor() as usize).max(1),
            ChunkRule::Fixed(k) => k.max(1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverOptions {
    /// Iteration budget for each Hamilton cycle search (default `10 n`).
    pub budget: Option<usize>,
    /// Expansion factor used to pick the rotation depth.
    pub s: Option<f64>,
    pub chunk: ChunkRule,
    /// Packing size to aim for (default `⌊δ/2⌋`).
    pub packing_target: Option<usize>,
    /// Consecutive failed searches that end the packing phase.
    pub packing_failures: usize,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            budget: None,
            s: None,
            chunk: ChunkRule::Whole,
            packing_target: None,
            packing_failures: 3,
        }
    }
}

impl CoverOptions {
    pub fn hamilton_config(&self, n: usize) -> HamiltonConfig {
        let cfg = HamiltonConfig::for_graph(n, self.s);
        match self.budget {
            Some(b) => cfg.with_budget(b),
            None => cfg,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Packing,
    Coloring,
    Covering,
    Validation,
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub enum CoverError {
    #[error("invalid matching: {0}")]
    Matching(String),
    #[error("merging the matching failed: {0}")]
    Merge(String),
    #[error("{phase:?} phase: {failure} ({cycles_so_far} cycles found before)")]
    Hamilton {
        phase: Phase,
        failure: HamiltonFailure,
        cycles_so_far: usize,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal validation failed: {0}")]
    Invalid(String),
}

impl From<MatchingError> for CoverError {
    fn from(e: MatchingError) -> Self {
        CoverError::Matching(e.to_string())
    }
}

impl From<ExtensionError> for CoverError {
    fn from(e: ExtensionError) -> Self {
        CoverError::Merge(e.to_string())
    }
}

/// Matchings smaller than `alpha^3 n^(alpha/2) / 136` are protected as hard
/// edges; larger ones only as soft edges.
pub fn hard_protection_threshold(n: usize, alpha: f64) -> f64 {
    alpha.powi(3) * (n as f64).powf(alpha / 2.0) / 136.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnceReport {
    pub cycle: HamiltonCycle,
    pub uncovered: Matching,
    /// Matching edges protected as hard edges.
    pub hard_edges: usize,
    pub broken_soft: usize,
    pub merge: Option<MergeStats>,
    /// Matching edges dropped while merging into the seed path.
    pub merge_lost: usize,
    /// Whether the search had to fall back to a greedy seed path.
    pub reseeded: bool,
}

/// One Hamilton cycle that covers most of `m`.
///
/// The matching is merged into one path `R`, which seeds the cycle search.
/// Small matchings are protected as hard edges (those consistent with `R`),
/// larger ones as soft edges. Returns the cycle and the edges of `m` it misses.
pub fn cover_matching_once(
    g: &Graph,
    m: &Matching,
    alpha: f64,
    opts: &CoverOptions,
) -> Result<OnceReport, CoverError> {
    let cfg = opts.hamilton_config(g.n());
    let fail = |failure| CoverError::Hamilton {
        phase: Phase::Covering,
        failure,
        cycles_so_far: 0,
    };
    if m.is_empty() {
        let mut c = RotationConstraints::none();
        let ok = find_hamilton_cycle(g, &mut c, &cfg, SeedPath::default()).map_err(fail)?;
        return Ok(OnceReport {
            cycle: ok.cycle,
            uncovered: Matching::default(),
            hard_edges: 0,
            broken_soft: 0,
            merge: None,
            merge_lost: 0,
            reseeded: false,
        });
    }
    m.validate_in(g)?;
    let merged = merge_into_single_path(g, m, alpha)?;
    let r = &merged.path;
    let hard: Vec<Edge> = if (m.len() as f64) < hard_protection_threshold(g.n(), alpha) {
        consistent_with_path(m, r, g.n())
    } else {
        Vec::new()
    };
    let constraints = RotationConstraints::new(hard.iter().copied(), m.edges().iter().copied());
    let mut c = constraints.clone();
    let mut reseeded = false;
    let ok = match find_hamilton_cycle(g, &mut c, &cfg, SeedPath::Given(r.clone())) {
        Ok(ok) => ok,
        Err(first) => {
            log::debug!("seeded search failed ({:?}); retrying from a greedy path", first.reason);
            reseeded = true;
            c = constraints;
            find_hamilton_cycle(g, &mut c, &cfg, SeedPath::default()).map_err(fail)?
        }
    };
    Ok(OnceReport {
        uncovered: m.minus_cycle(&ok.cycle),
        cycle: ok.cycle,
        hard_edges: hard.len(),
        broken_soft: ok.broken_soft,
        merge_lost: merged.lost_matching_edges.len(),
        merge: Some(merged.stats),
        reseeded,
    })
}

/// Matching edges that are edges of `r` or have both endpoints off `r`.
fn consistent_with_path(m: &Matching, r: &Path, n: usize) -> Vec<Edge> {
    let mut on = vec![false; n];
    for &v in r.vertices() {
        on[v] = true;
    }
    let path_edges: HashSet<Edge> = r.edges().collect();
    m.edges()
        .iter()
        .copied()
        .filter(|e| path_edges.contains(e) || (!on[e.0] && !on[e.1]))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchingCover {
    pub cycles: Vec<HamiltonCycle>,
    /// Calls to [`cover_matching_once`].
    pub rounds: usize,
    /// Rounds that made no progress and were redone with one hard edge.
    pub fallback_rounds: usize,
    pub merge_lost: usize,
    pub broken_soft: usize,
}

/// Cycles whose union contains every edge of `m`.
///
/// `m` is split according to `opts.chunk`; each chunk is covered by repeated
/// [`cover_matching_once`] calls on what is still uncovered. A round that
/// covers nothing is replaced by a search with the lowest uncovered edge as a
/// hard edge.
pub fn cover_matching(
    g: &Graph,
    m: &Matching,
    alpha: f64,
    opts: &CoverOptions,
) -> Result<MatchingCover, CoverError> {
    let mut out = MatchingCover::default();
    if m.is_empty() {
        return Ok(out);
    }
    m.validate_in(g)?;
    let size = opts.chunk.chunk_size(g.n(), alpha, m.len());
    let cfg = opts.hamilton_config(g.n());
    for chunk in m.edges().chunks(size) {
        let mut residual = Matching {
            edges: chunk.to_vec(),
        };
        while !residual.is_empty() {
            out.rounds += 1;
            let once = cover_matching_once(g, &residual, alpha, opts).map_err(|e| match e {
                CoverError::Hamilton { phase, failure, .. } => CoverError::Hamilton {
                    phase,
                    failure,
                    cycles_so_far: out.cycles.len(),
                },
                other => other,
            })?;
            out.merge_lost += once.merge_lost;
            out.broken_soft += once.broken_soft;
            if once.uncovered.len() < residual.len() {
                residual = once.uncovered;
                out.cycles.push(once.cycle);
                continue;
            }
            out.fallback_rounds += 1;
            let mut c = RotationConstraints::hard_only([residual.edges[0]]);
            let ok = find_hamilton_cycle(g, &mut c, &cfg, SeedPath::default()).map_err(|failure| {
                CoverError::Hamilton {
                    phase: Phase::Covering,
                    failure,
                    cycles_so_far: out.cycles.len(),
                }
            })?;
            residual = residual.minus_cycle(&ok.cycle);
            out.cycles.push(ok.cycle);
        }
    }
    Ok(out)
}

/// Proper edge coloring by first fit over edges in lexicographic order.
/// Uses at most `2Δ - 1` colors; classes are returned in color order.
pub fn greedy_edge_coloring(h: &Graph) -> Vec<Matching> {
    let mut used: Vec<Vec<bool>> = vec![Vec::new(); h.n()];
    let mut classes: Vec<Vec<Edge>> = Vec::new();
    for e in h.edges() {
        let color = (0..)
            .find(|&c| {
                !used[e.0].get(c).copied().unwrap_or(false)
                    && !used[e.1].get(c).copied().unwrap_or(false)
            })
            .unwrap();
        for v in [e.0, e.1] {
            if used[v].len() <= color {
                used[v].resize(color + 1, false);
            }
            used[v][color] = true;
        }
        if classes.len() <= color {
            classes.resize(color + 1, Vec::new());
        }
        classes[color].push(e);
    }
    classes.into_iter().map(|edges| Matching { edges }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Packing {
    pub cycles: Vec<HamiltonCycle>,
    pub residual: Graph,
    pub target: usize,
    /// `target - cycles.len()`.
    pub shortfall: usize,
    pub failed_searches: usize,
}

/// Repeatedly removes a Hamilton cycle of what remains of `g`.
///
/// Stops at `target` cycles, when the remaining minimum degree drops below 2,
/// or after `opts.packing_failures` consecutive failed searches (each retry
/// starts the greedy seed path elsewhere).
pub fn extract_packing(g: &Graph, target: usize, opts: &CoverOptions) -> Packing {
    let n = g.n();
    let cfg = opts.hamilton_config(n);
    let mut residual = g.clone();
    let mut cycles = Vec::new();
    let mut streak = 0usize;
    let mut failed = 0usize;
    while cycles.len() < target && n >= 3 && residual.min_degree() >= 2 {
        let start = match streak {
            0 => None,
            s => Some((s * (n / 3 + 1) + cycles.len()) % n),
        };
        let mut c = RotationConstraints::none();
        match find_hamilton_cycle(&residual, &mut c, &cfg, SeedPath::Greedy { start }) {
            Ok(ok) => {
                residual = residual.without_edges(ok.cycle.edges().collect::<Vec<_>>().iter());
                cycles.push(ok.cycle);
                streak = 0;
            }
            Err(e) => {
                log::debug!("packing search failed: {e}");
                failed += 1;
                streak += 1;
                if streak >= opts.packing_failures.max(1) {
                    break;
                }
            }
        }
    }
    Packing {
        shortfall: target.saturating_sub(cycles.len()),
        cycles,
        residual,
        target,
        failed_searches: failed,
    }
}

/// A verified cover: every edge of the graph lies on at least one cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub cycles: Vec<HamiltonCycle>,
    /// Cycles through each edge, in lexicographic edge order.
    pub coverage: Vec<usize>,
    /// The first `h` cycles form the packing.
    pub h: usize,
    pub cover_size: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub packing: f64,
    pub coloring: f64,
    pub covering: f64,
    pub validation: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverStats {
    pub delta_max: usize,
    pub delta_min: usize,
    pub packing_target: usize,
    pub packing_failures: usize,
    pub residual_edges: usize,
    pub colors: usize,
    /// Residual edges not already covered when their color class came up.
    pub edges_to_cover: usize,
    pub rounds: usize,
    pub fallback_rounds: usize,
    pub merge_lost: usize,
    pub broken_soft: usize,
    pub timings_ms: PhaseTimings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverRun {
    pub certificate: CoverCertificate,
    pub stats: CoverStats,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Covers every edge of `g` by Hamilton cycles: a greedy packing, then the
/// residual colored into matchings, each covered by [`cover_matching`]. Edges
/// already on an earlier cycle are skipped. The result is validated before it
/// is returned.
pub fn cover_graph(g: &Graph, alpha: f64, opts: &CoverOptions) -> Result<CoverRun, CoverError> {
    let n = g.n();
    if n < 3 {
        return Err(CoverError::Precondition(format!("{n} vertices")));
    }
    if !g.is_connected() {
        return Err(CoverError::Precondition("graph is disconnected".into()));
    }
    if g.min_degree() < 2 {
        return Err(CoverError::Precondition(format!(
            "minimum degree {} < 2",
            g.min_degree()
        )));
    }
    let mut stats = CoverStats {
        delta_max: g.max_degree(),
        delta_min: g.min_degree(),
        ..Default::default()
    };
    stats.packing_target = opts.packing_target.unwrap_or(g.min_degree() / 2);

    let t = Instant::now();
    let packing = extract_packing(g, stats.packing_target, opts);
    stats.timings_ms.packing = ms(t);
    stats.packing_failures = packing.failed_searches;
    stats.residual_edges = packing.residual.m();
    let h = packing.cycles.len();

    let t = Instant::now();
    let classes = greedy_edge_coloring(&packing.residual);
    stats.timings_ms.coloring = ms(t);
    stats.colors = classes.len();

    let t = Instant::now();
    let mut cycles = packing.cycles;
    let mut covered: HashSet<Edge> = HashSet::new();
    for class in classes {
        let todo = Matching {
            edges: class.edges.into_iter().filter(|e| !covered.contains(e)).collect(),
        };
        if todo.is_empty() {
            continue;
        }
        stats.edges_to_cover += todo.len();
        let part = cover_matching(g, &todo, alpha, opts).map_err(|e| match e {
            CoverError::Hamilton {
                phase,
                failure,
                cycles_so_far,
            } => CoverError::Hamilton {
                phase,
                failure,
                cycles_so_far: cycles.len() + cycles_so_far,
            },
            other => other,
        })?;
        stats.rounds += part.rounds;
        stats.fallback_rounds += part.fallback_rounds;
        stats.merge_lost += part.merge_lost;
        stats.broken_soft += part.broken_soft;
        for c in part.cycles {
            covered.extend(c.edges());
            cycles.push(c);
        }
    }
    stats.timings_ms.covering = ms(t);

    let t = Instant::now();
    let report = validate_cover(g, &cycles);
    stats.timings_ms.validation = ms(t);
    if !report.ok {
        return Err(CoverError::Invalid(format!(
            "{} bad cycles, {} uncovered edges",
            report.cycle_errors.len(),
            report.uncovered.len()
        )));
    }
    let cover_size = cycles.len();
    if cover_size < stats.delta_max.div_ceil(2) {
        return Err(CoverError::Invalid(format!(
            "{cover_size} cycles cannot cover a vertex of degree {}",
            stats.delta_max
        )));
    }
    Ok(CoverRun {
        certificate: CoverCertificate {
            cycles,
            coverage: report.coverage,
            h,
            cover_size,
        },
        stats,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionSummary {
    pub s: f64,
    pub g: f64,
    pub l: f64,
    pub alpha: f64,
    pub small: Verdict,
    pub large: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub stream: u64,
    pub m: usize,
    pub delta_max: usize,
    pub delta_min: usize,
    pub alpha: f64,
    pub h: usize,
    pub cover_size: usize,
    /// `cover_size / (n p / 2)`.
    pub ratio: f64,
    pub merge_lost: usize,
    pub broken_soft: usize,
    pub fallback_rounds: usize,
    pub valid: bool,
    pub error: Option<String>,
    pub expansion: Option<ExpansionSummary>,
    pub phase_timings_ms: PhaseTimings,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    /// Overrides the alpha derived from the sample's expansion factor.
    pub alpha: Option<f64>,
    /// Random trials per expansion property; 0 skips the checks.
    pub check_trials: usize,
    /// Worker threads (default: all cores).
    pub jobs: Option<usize>,
    pub cover: CoverOptions,
}

/// Samples G(n, p) once per stream (seed `(base, stream)`), covers each sample
/// and reports the cover size against `np/2`. Samples run in parallel; reports
/// come back in stream order and failures are recorded, not raised.
pub fn run_gnp_experiment(
    n: usize,
    p: f64,
    base: u64,
    streams: &[u64],
    opts: &ExperimentOptions,
) -> Vec<ExperimentReport> {
    if (n as f64) * p < 20.0 {
        log::warn!("np = {} is small; samples may not be Hamiltonian", n as f64 * p);
    }
    let work = || {
        streams
            .par_iter()
            .map(|&stream| run_one(n, p, RngSeed::new(base, stream), opts))
            .collect()
    };
    match opts
        .jobs
        .and_then(|j| rayon::ThreadPoolBuilder::new().num_threads(j).build().ok())
    {
        Some(pool) => pool.install(work),
        None => work(),
    }
}

fn run_one(n: usize, p: f64, seed: RngSeed, opts: &ExperimentOptions) -> ExperimentReport {
    let mut report = ExperimentReport {
        n,
        p,
        seed: seed.base,
        stream: seed.stream,
        m: 0,
        delta_max: 0,
        delta_min: 0,
        alpha: opts.alpha.unwrap_or(f64::NAN),
        h: 0,
        cover_size: 0,
        ratio: f64::NAN,
        merge_lost: 0,
        broken_soft: 0,
        fallback_rounds: 0,
        valid: false,
        error: None,
        expansion: None,
        phase_timings_ms: PhaseTimings::default(),
    };
    let g = match sample_gnp(n, p, seed) {
        Ok(g) => g,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.m = g.m();
    report.delta_max = g.max_degree();
    report.delta_min = g.min_degree();
    let params = expander_params_for_gnp(n, p);
    let mut cover_opts = opts.cover;
    match &params {
        Ok(prm) => {
            if opts.alpha.is_none() {
                report.alpha = prm.alpha;
            }
            cover_opts.s = cover_opts.s.or(Some(prm.s));
            if opts.check_trials > 0 {
                let small = small_expansion_witness_search(
                    &g,
                    prm.s,
                    prm.g,
                    opts.check_trials,
                    seed.fork(1),
                )
                .map(|r| r.verdict)
                .unwrap_or(Verdict::Inconclusive);
                let large =
                    large_expansion_witness_search(&g, prm.l, opts.check_trials, seed.fork(2))
                        .map(|r| r.verdict)
                        .unwrap_or(Verdict::Inconclusive);
                report.expansion = Some(ExpansionSummary {
                    s: prm.s,
                    g: prm.g,
                    l: prm.l,
                    alpha: prm.alpha,
                    small,
                    large,
                });
            }
        }
        Err(e) if opts.alpha.is_none() => {
            report.error = Some(e.to_string());
            return report;
        }
        Err(_) => {}
    }
    match cover_graph(&g, report.alpha, &cover_opts) {
        Ok(run) => {
            report.h = run.certificate.h;
            report.cover_size = run.certificate.cover_size;
            report.ratio = run.certificate.cover_size as f64 / (n as f64 * p / 2.0);
            report.merge_lost = run.stats.merge_lost;
            report.broken_soft = run.stats.broken_soft;
            report.fallback_rounds = run.stats.fallback_rounds;
            report.phase_timings_ms = run.stats.timings_ms;
            report.valid = validate_cover(&g, &run.certificate.cycles).ok;
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}
