//! The `hamcover` command line: gen, check, hamilton, pack, cover, experiment, verify.
//!
//! Exit codes: 0 success, 1 validation or search failure, 2 usage or input error.
//! Data goes to standard output or `--out`; diagnostics go to standard error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hamcover::cover::{
    cover_graph, extract_packing, run_gnp_experiment, ChunkRule, CoverOptions, ExperimentOptions,
    ExperimentReport,
};
use hamcover::expansion::{
    default_trials, diameter_bound_check, large_expansion_witness_search,
    small_expansion_witness_search,
};
use hamcover::graph::{Edge, Graph, HamiltonCycle};
use hamcover::posa::{find_hamilton_cycle, hard_edge_limit, HamiltonConfig, RotationConstraints, SeedPath};
use hamcover::random::{sample_gnp, ExpanderParams, RngSeed};
use hamcover::verify::{exhaustive_expansion_check, validate_cover, EXHAUSTIVE_MAX_N};

#[derive(Parser, Debug)]
#[command(
    name = "hamcover",
    version,
    about = "Hamilton cycle packing and covering of graphs",
    after_help = "Any subcommand accepts --config FILE: a file of key=value lines applied \
                  as flags before those given on the command line."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// The full, reproducible description of a run. Embedded in every JSON report.
#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Command {
    /// Sample G(n, p) and write it as an edge list
    Gen(GenArgs),
    /// Search for violations of the expansion properties
    Check(CheckArgs),
    /// Find a Hamilton cycle containing the protected edges
    Hamilton(HamiltonArgs),
    /// Greedily extract edge-disjoint Hamilton cycles
    Pack(PackArgs),
    /// Cover every edge by Hamilton cycles
    Cover(CoverArgs),
    /// Cover many G(n, p) samples and report cover sizes
    Experiment(ExperimentArgs),
    /// Check a cover file against a graph
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Output file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct CheckArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Expansion factor
    #[arg(long)]
    pub s: f64,
    /// Size bound for the small-set property (default 4 n ln s / (s ln n))
    #[arg(long)]
    pub g: Option<f64>,
    /// Frame for the large-set property (default max(1, n ln s / (3000 ln n)))
    #[arg(long)]
    pub l: Option<f64>,
    /// Random trials per property (default 10 n)
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also decide both properties exactly (at most 16 vertices)
    #[arg(long)]
    pub exhaustive: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TextOrJson {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct HamiltonArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Edge list of edges that must lie on the cycle
    #[arg(long)]
    pub forbid: Option<PathBuf>,
    /// Edge list of edges to keep when possible
    #[arg(long)]
    pub soft: Option<PathBuf>,
    /// Iteration budget (default 10 n)
    #[arg(long)]
    pub budget: Option<usize>,
    /// Expansion factor, used to bound the rotation depth
    #[arg(long)]
    pub s: Option<f64>,
    /// First vertex of the greedy seed path
    #[arg(long)]
    pub start: Option<usize>,
    #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
    pub format: TextOrJson,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct PackArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Number of cycles to aim for (default: half the minimum degree)
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Consecutive failed searches that end the packing
    #[arg(long, default_value_t = 3)]
    pub failures: usize,
    /// Write the cycles here, one per line
    #[arg(long)]
    pub cycles: Option<PathBuf>,
    /// JSON report file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct CoverArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    /// Packing size to aim for (default: half the minimum degree)
    #[arg(long)]
    pub pack: Option<usize>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Matching split: whole, formula, or a chunk size
    #[arg(long, value_parser = parse_chunk, default_value = "whole")]
    pub chunk: ChunkRule,
    #[arg(long, default_value_t = 3)]
    pub failures: usize,
    /// JSON report file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the cycles here, one per line
    #[arg(long)]
    pub cycles: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    /// Number of samples; sample i uses stream i
    #[arg(long)]
    pub seeds: u64,
    /// Base seed shared by all samples
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Default: derived from the expansion factor (np)^(1/5)
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, value_parser = parse_chunk, default_value = "whole")]
    pub chunk: ChunkRule,
    /// Random trials per expansion property; 0 skips the checks
    #[arg(long, default_value_t = 0)]
    pub check_trials: usize,
    /// Worker threads (default: all cores)
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Output file; a .csv extension selects CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// One cycle per line, vertices separated by spaces
    #[arg(long)]
    pub cover: PathBuf,
    /// Print a JSON report instead of one line
    #[arg(long)]
    pub json: bool,
}

fn parse_chunk(s: &str) -> Result<ChunkRule, String> {
    match s {
        "whole" => Ok(ChunkRule::Whole),
        "formula" => Ok(ChunkRule::Formula),
        other => other
            .parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .map(ChunkRule::Fixed)
            .ok_or_else(|| format!("expected whole, formula or a positive size, got {other:?}")),
    }
}

/// An input or usage problem (exit code 2).
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Outcome = Result<i32, UsageError>;

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<String> = argv
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            }
        }
    };
    match dispatch(&cli.command, out) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

/// Splices the `key=value` lines of a `--config` file in as flags right after
/// the subcommand, so later command-line flags override them.
fn expand_config(mut args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(i) = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(args);
    };
    let path = if let Some(p) = args[i].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(i);
        p
    } else {
        if i + 1 >= args.len() {
            return Err("--config needs a file".into());
        }
        let p = args.remove(i + 1);
        args.remove(i);
        p
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let mut flags = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = match line.split_once('=') {
            Some((k, v)) => (k.trim(), Some(v.trim())),
            None => (line, None),
        };
        let key = key.trim_start_matches("--");
        if key.is_empty() {
            return Err(format!("{path}: line {}: missing key", no + 1));
        }
        match value {
            None | Some("true") => flags.push(format!("--{key}")),
            Some("false") => {}
            Some(v) => {
                flags.push(format!("--{key}"));
                flags.push(v.to_string());
            }
        }
    }
    let sub = args
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|p| p + 1)
        .ok_or("--config given without a subcommand")?;
    args.splice(sub + 1..sub + 1, flags);
    Ok(args)
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Gen(a) => gen(a, out),
        Command::Check(a) => check(cmd, a, out),
        Command::Hamilton(a) => hamilton(cmd, a, out),
        Command::Pack(a) => pack(cmd, a, out),
        Command::Cover(a) => cover(cmd, a, out),
        Command::Experiment(a) => experiment(cmd, a, out),
        Command::Verify(a) => verify(cmd, a, out),
    }
}

fn load_graph(path: &FsPath) -> Result<Graph, UsageError> {
    let f = File::open(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    Graph::read_edge_list(BufReader::new(f))
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load_edges(path: &FsPath, n: usize) -> Result<Vec<Edge>, UsageError> {
    let g = load_graph(path)?;
    if g.n() > n {
        return Err(UsageError(format!(
            "{}: has {} vertices, graph has {n}",
            path.display(),
            g.n()
        )));
    }
    Ok(g.edges().collect())
}

/// Reads one cycle per line; blank lines and `#` comments are skipped.
pub fn read_cycles<R: BufRead>(reader: R) -> Result<Vec<HamiltonCycle>, String> {
    let mut cycles = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vs = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("line {}: {e}", no + 1))?;
        cycles.push(HamiltonCycle(vs));
    }
    Ok(cycles)
}

pub fn write_cycles<W: Write>(mut w: W, cycles: &[HamiltonCycle]) -> io::Result<()> {
    for c in cycles {
        let line: Vec<String> = c.vertices().iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()
}

/// Writes to `path`, or to `out` when no path is given.
fn emit(path: Option<&FsPath>, out: &mut dyn Write, bytes: &[u8]) -> Result<(), UsageError> {
    match path {
        Some(p) => fs::write(p, bytes)
            .map_err(|e| UsageError(format!("cannot write {}: {e}", p.display()))),
        None => out.write_all(bytes).map_err(UsageError::from),
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, UsageError> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a Command,
    #[serde(flatten)]
    body: T,
}

fn gen(a: &GenArgs, out: &mut dyn Write) -> Outcome {
    let g = sample_gnp(a.n, a.p, RngSeed::new(a.seed, a.stream))?;
    let mut buf = Vec::new();
    g.write_edge_list(&mut buf)?;
    emit(a.out.as_deref(), out, &buf)?;
    log::info!("sampled {} vertices, {} edges", g.n(), g.m());
    Ok(0)
}

fn check(cmd: &Command, a: &CheckArgs, out: &mut dyn Write) -> Outcome {
    let g = load_graph(&a.graph)?;
    let n = g.n();
    let defaults = ExpanderParams::for_expansion(n, a.s).ok();
    let bound = a
        .g
        .or(defaults.map(|p| p.g))
        .ok_or_else(|| UsageError("--g is required when s <= 1 or n < 2".into()))?;
    let l = a.l.or(defaults.map(|p| p.l)).unwrap_or(1.0);
    let trials = a.trials.unwrap_or_else(|| default_trials(n));
    let seed = RngSeed::new(a.seed, 0);
    let small = small_expansion_witness_search(&g, a.s, bound, trials, seed.fork(1))?;
    let large = large_expansion_witness_search(&g, l, trials, seed.fork(2))?;
    let diameter = diameter_bound_check(&g, a.s).ok();
    let exhaustive = if a.exhaustive {
        if n > EXHAUSTIVE_MAX_N {
            return Err(UsageError(format!(
                "--exhaustive supports at most {EXHAUSTIVE_MAX_N} vertices, graph has {n}"
            )));
        }
        Some(exhaustive_expansion_check(&g, a.s, bound, l)?)
    } else {
        None
    };
    #[derive(Serialize)]
    struct Body<T, U, V> {
        small: T,
        large: T,
        diameter: U,
        exhaustive: V,
    }
    let bytes = json_bytes(&Report {
        config: cmd,
        body: Body {
            small,
            large,
            diameter,
            exhaustive,
        },
    })?;
    out.write_all(&bytes)?;
    Ok(0)
}

fn hamilton(cmd: &Command, a: &HamiltonArgs, out: &mut dyn Write) -> Outcome {
    let g = load_graph(&a.graph)?;
    let n = g.n();
    let hard = match &a.forbid {
        Some(p) => load_edges(p, n)?,
        None => Vec::new(),
    };
    let soft = match &a.soft {
        Some(p) => load_edges(p, n)?,
        None => Vec::new(),
    };
    if let Some(s) = a.start.filter(|&s| s >= n) {
        return Err(UsageError(format!("--start {s} out of range for {n} vertices")));
    }
    if let Some(s) = a.s {
        if hard.len() as f64 > hard_edge_limit(s) {
            log::warn!(
                "{} protected edges exceed the guaranteed limit {:.2} for s = {s}; searching anyway",
                hard.len(),
                hard_edge_limit(s)
            );
        }
    }
    let mut cfg = HamiltonConfig::for_graph(n, a.s);
    if let Some(b) = a.budget {
        cfg = cfg.with_budget(b);
    }
    let mut constraints = RotationConstraints::new(hard, soft);
    let result = find_hamilton_cycle(&g, &mut constraints, &cfg, SeedPath::Greedy { start: a.start });
    match result {
        Ok(ok) => {
            match a.format {
                TextOrJson::Text => {
                    let line: Vec<String> = ok.cycle.vertices().iter().map(|v| v.to_string()).collect();
                    writeln!(out, "{}", line.join(" "))?;
                }
                TextOrJson::Json => out.write_all(&json_bytes(&Report { config: cmd, body: &ok })?)?,
            }
            Ok(0)
        }
        Err(failure) => {
            out.write_all(&json_bytes(&Report {
                config: cmd,
                body: &failure,
            })?)?;
            Ok(1)
        }
    }
}

fn pack(cmd: &Command, a: &PackArgs, out: &mut dyn Write) -> Outcome {
    let g = load_graph(&a.graph)?;
    let opts = CoverOptions {
        budget: a.budget,
        packing_failures: a.failures,
        ..Default::default()
    };
    let target = a.target.unwrap_or(g.min_degree() / 2);
    let packing = extract_packing(&g, target, &opts);
    if let Some(p) = &a.cycles {
        let f = File::create(p).map_err(|e| UsageError(format!("cannot write {}: {e}", p.display())))?;
        write_cycles(BufWriter::new(f), &packing.cycles)?;
    }
    #[derive(Serialize)]
    struct Body {
        n: usize,
        m: usize,
        target: usize,
        h: usize,
        shortfall: usize,
        failed_searches: usize,
        residual_edges: usize,
    }
    let bytes = json_bytes(&Report {
        config: cmd,
        body: Body {
            n: g.n(),
            m: g.m(),
            target,
            h: packing.cycles.len(),
            shortfall: packing.shortfall,
            failed_searches: packing.failed_searches,
            residual_edges: packing.residual.m(),
        },
    })?;
    emit(a.out.as_deref(), out, &bytes)?;
    Ok(0)
}

#[derive(Serialize)]
struct Losses {
    merge_lost: usize,
    broken_soft: usize,
    fallback_rounds: usize,
}

fn cover(cmd: &Command, a: &CoverArgs, out: &mut dyn Write) -> Outcome {
    let g = load_graph(&a.graph)?;
    let opts = CoverOptions {
        budget: a.budget,
        s: a.s,
        chunk: a.chunk,
        packing_target: a.pack,
        packing_failures: a.failures,
    };
    // n p / 2 with p the edge density
    let half_np = if g.n() > 1 { g.m() as f64 / (g.n() - 1) as f64 } else { 0.0 };
    match cover_graph(&g, a.alpha, &opts) {
        Ok(run) => {
            if let Some(p) = &a.cycles {
                let f = File::create(p)
                    .map_err(|e| UsageError(format!("cannot write {}: {e}", p.display())))?;
                write_cycles(BufWriter::new(f), &run.certificate.cycles)?;
            }
            let valid = validate_cover(&g, &run.certificate.cycles).ok;
            #[derive(Serialize)]
            struct Body<'a> {
                n: usize,
                m: usize,
                delta_max: usize,
                lower_bound: usize,
                h: usize,
                cover_size: usize,
                ratio: f64,
                losses: Losses,
                stats: &'a hamcover::cover::CoverStats,
                phase_timings_ms: hamcover::cover::PhaseTimings,
                valid: bool,
            }
            let s = &run.stats;
            let bytes = json_bytes(&Report {
                config: cmd,
                body: Body {
                    n: g.n(),
                    m: g.m(),
                    delta_max: g.max_degree(),
                    lower_bound: g.max_degree().div_ceil(2),
                    h: run.certificate.h,
                    cover_size: run.certificate.cover_size,
                    ratio: run.certificate.cover_size as f64 / half_np,
                    losses: Losses {
                        merge_lost: s.merge_lost,
                        broken_soft: s.broken_soft,
                        fallback_rounds: s.fallback_rounds,
                    },
                    stats: s,
                    phase_timings_ms: s.timings_ms,
                    valid,
                },
            })?;
            emit(a.out.as_deref(), out, &bytes)?;
            Ok(if valid { 0 } else { 1 })
        }
        Err(e) => {
            #[derive(Serialize)]
            struct Body<'a> {
                n: usize,
                m: usize,
                delta_max: usize,
                valid: bool,
                error: String,
                failure: &'a hamcover::cover::CoverError,
            }
            let bytes = json_bytes(&Report {
                config: cmd,
                body: Body {
                    n: g.n(),
                    m: g.m(),
                    delta_max: g.max_degree(),
                    valid: false,
                    error: e.to_string(),
                    failure: &e,
                },
            })?;
            emit(a.out.as_deref(), out, &bytes)?;
            Ok(1)
        }
    }
}

/// One CSV row per sample.
#[derive(Serialize)]
struct CsvRow<'a> {
    n: usize,
    p: f64,
    seed: u64,
    stream: u64,
    m: usize,
    delta_max: usize,
    delta_min: usize,
    alpha: f64,
    h: usize,
    cover_size: usize,
    ratio: f64,
    merge_lost: usize,
    broken_soft: usize,
    fallback_rounds: usize,
    valid: bool,
    error: &'a str,
    packing_ms: f64,
    coloring_ms: f64,
    covering_ms: f64,
    validation_ms: f64,
}

impl<'a> From<&'a ExperimentReport> for CsvRow<'a> {
    fn from(r: &'a ExperimentReport) -> Self {
        CsvRow {
            n: r.n,
            p: r.p,
            seed: r.seed,
            stream: r.stream,
            m: r.m,
            delta_max: r.delta_max,
            delta_min: r.delta_min,
            alpha: r.alpha,
            h: r.h,
            cover_size: r.cover_size,
            ratio: r.ratio,
            merge_lost: r.merge_lost,
            broken_soft: r.broken_soft,
            fallback_rounds: r.fallback_rounds,
            valid: r.valid,
            error: r.error.as_deref().unwrap_or(""),
            packing_ms: r.phase_timings_ms.packing,
            coloring_ms: r.phase_timings_ms.coloring,
            covering_ms: r.phase_timings_ms.covering,
            validation_ms: r.phase_timings_ms.validation,
        }
    }
}

fn experiment(cmd: &Command, a: &ExperimentArgs, out: &mut dyn Write) -> Outcome {
    if !(0.0..=1.0).contains(&a.p) {
        return Err(UsageError(format!("--p {} outside [0, 1]", a.p)));
    }
    let opts = ExperimentOptions {
        alpha: a.alpha,
        check_trials: a.check_trials,
        jobs: a.jobs,
        cover: CoverOptions {
            budget: a.budget,
            chunk: a.chunk,
            ..Default::default()
        },
    };
    let streams: Vec<u64> = (0..a.seeds).collect();
    let reports = run_gnp_experiment(a.n, a.p, a.seed, &streams, &opts);
    let csv_out = match a.format {
        Some(f) => f == TableFormat::Csv,
        None => a
            .out
            .as_deref()
            .and_then(FsPath::extension)
            .is_some_and(|e| e.eq_ignore_ascii_case("csv")),
    };
    let bytes = if csv_out {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &reports {
            w.serialize(CsvRow::from(r))?;
        }
        w.into_inner().map_err(|e| UsageError(e.to_string()))?
    } else {
        #[derive(Serialize)]
        struct Body<'a> {
            reports: &'a [ExperimentReport],
        }
        json_bytes(&Report {
            config: cmd,
            body: Body { reports: &reports },
        })?
    };
    emit(a.out.as_deref(), out, &bytes)?;
    for r in &reports {
        match &r.error {
            Some(e) => log::warn!("stream {}: {e}", r.stream),
            None => log::info!("stream {}: cover size {} (ratio {:.3})", r.stream, r.cover_size, r.ratio),
        }
    }
    Ok(if reports.iter().all(|r| r.valid) { 0 } else { 1 })
}

fn verify(cmd: &Command, a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let g = load_graph(&a.graph)?;
    let f = File::open(&a.cover)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", a.cover.display())))?;
    let cycles = read_cycles(BufReader::new(f))
        .map_err(|e| UsageError(format!("{}: {e}", a.cover.display())))?;
    let report = validate_cover(&g, &cycles);
    if a.json {
        out.write_all(&json_bytes(&Report {
            config: cmd,
            body: &report,
        })?)?;
    } else if report.ok {
        writeln!(out, "valid: {} cycles cover all {} edges", cycles.len(), g.m())?;
    } else {
        writeln!(
            out,
            "invalid: {} bad cycles, {} uncovered edges",
            report.cycle_errors.len(),
            report.uncovered.len()
        )?;
    }
    Ok(if report.ok { 0 } else { 1 })
}
