//! Command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | every hard assertion in the report passed |
//! | 1 | a hard assertion failed (the report is still written) |
//! | 2 | usage error: bad grammar, ring descriptor, set literal or `VALRING_THREADS` |
//! | 3 | computational error raised by a module (caps, arity, non-units, ...) |
//! | 4 | the report could not be written |
//!
//! Codes 2 to 4 (except grammar errors, which print clap's usage text) emit
//! `{"schema": 1, "error": {"kind": ..., "message": ...}}` in place of the report.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Caps, Tolerances};
use crate::error::Error;
use crate::field::prime_power;
use crate::graph::{class_count, degree_formula, random_vertex_subset, GraphHeader, Lambda3, OrthGraph};
use crate::ring::{Family, Filter, Ring, RingParams};
use crate::seed::trial_rng;
use crate::setops::ElementSet;
use crate::verifier::{
    bound_ratio_scan, classify_regime, extremal_search, verify_hpv, Constants, RegimeVerdict, Verifier,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Parses `z:<p>:<r>` or `f:<q>:<r>`.
pub fn parse_ring(spec: &str) -> Result<RingParams, Error> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let [family, base, r] = parts[..] else {
        return Err(Error::Parse(format!("ring descriptor {spec:?} is not of the form z:<p>:<r> or f:<q>:<r>")));
    };
    let num = |s: &str, what: &str| {
        s.parse::<u64>().map_err(|_| Error::Parse(format!("{what} {s:?} in {spec:?} is not a non-negative integer")))
    };
    let (base, r) = (num(base, "base")?, num(r, "exponent")?);
    if r == 0 || r > u32::MAX as u64 {
        return Err(Error::Parse(format!("exponent in {spec:?} must be a positive integer")));
    }
    let small = |v: u64| u32::try_from(v).map_err(|_| Error::Parse(format!("{v} in {spec:?} is too large")));
    match family {
        "z" => {
            if base % 2 == 0 {
                return Err(Error::EvenCharacteristic(base));
            }
            if !crate::field::is_prime(base) {
                return Err(Error::NonPrime(base));
            }
            Ok(RingParams { p: small(base)?, s: 1, r: r as u32, family: Family::Zpr })
        }
        "f" => {
            let (p, s) = prime_power(base).ok_or(Error::NotPrimePower(base))?;
            if p == 2 {
                return Err(Error::EvenCharacteristic(base));
            }
            Ok(RingParams { p: small(p)?, s, r: r as u32, family: Family::Fqtr })
        }
        other => Err(Error::Parse(format!("unknown ring family {other:?}; expected z or f"))),
    }
}

fn parse_constants(s: &str) -> Result<Constants, String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match values[..] {
        [c1, c2, c3] if values.iter().all(|v| v.is_finite() && *v > 0.0) => Ok(Constants { c1, c2, c3 }),
        [_, _, _] => Err("constants must be finite and positive".into()),
        _ => Err("expected three comma-separated constants c1,c2,c3".into()),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("{s:?} is not a finite positive number")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "valring", version, about = "Exact arithmetic and sum-product verification over finite valuation rings")]
struct Cli {
    #[command(subcommand)]
    command: Group,
}

#[derive(Subcommand, Debug)]
enum Group {
    /// Ring cardinalities.
    #[command(subcommand)]
    Ring(RingCmd),
    /// The orthogonality graph E_{q,d}.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Counting pipelines and the product-set specialization.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Randomized ratio scans.
    #[command(subcommand)]
    Scan(ScanCmd),
    /// Regime classification for one set.
    Classify(ClassifyArgs),
    /// Searches for sets with small sum and square sumsets.
    #[command(subcommand)]
    Search(SearchCmd),
}

#[derive(Subcommand, Debug)]
enum RingCmd {
    Info(CommonArgs),
}

#[derive(Subcommand, Debug)]
enum GraphCmd {
    Build(GraphArgs),
    Spectrum(GraphArgs),
    Mixing(MixingArgs),
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    Thm1(PipelineArgs),
    Thm2(PipelineArgs),
    Hpv(HpvArgs),
}

#[derive(Subcommand, Debug)]
enum ScanCmd {
    Ratios(ScanArgs),
}

#[derive(Subcommand, Debug)]
enum SearchCmd {
    Extremal(SearchArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// `z:<p>:<r>` for Z/p^r or `f:<q>:<r>` for F_q[t]/(t^r).
    #[arg(long)]
    ring: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest graph part whose singular values are computed.
    #[arg(long, default_value_t = Caps::default().spectral_cap as u64, value_parser = clap::value_parser!(u64).range(1..))]
    spectral_cap: u64,
    #[arg(long, default_value_t = Caps::default().max_ring_size, value_parser = clap::value_parser!(u64).range(1..))]
    max_ring_size: u64,
    #[arg(long, default_value_t = Caps::default().max_graph_vertices as u64, value_parser = clap::value_parser!(u64).range(1..))]
    max_graph_vertices: u64,
    /// Absolute slack on spectral and mixing comparisons.
    #[arg(long, default_value_t = Tolerances::default().spectral, value_parser = positive_f64)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=64))]
    d: u64,
}

#[derive(Args, Debug)]
struct MixingArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=64))]
    d: u64,
    /// Random (X, Y) pairs to test.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Set literal: `1,2,4`, `units`, `all`, `ideal`, `empty` or `random:<size>:<seed>`.
    #[arg(long)]
    set: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
}

#[derive(Args, Debug)]
struct HpvArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// One literal (used for A, B and C) or three, in the order A, B, C.
    #[arg(long, required = true, num_args = 1)]
    set: Vec<String>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, required = true, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, value_parser = parse_constants)]
    constants: Option<Constants>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    set: String,
    #[arg(long, value_parser = parse_constants)]
    constants: Option<Constants>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    RingInfo,
    GraphBuild,
    GraphSpectrum,
    GraphMixing,
    VerifyThm1,
    VerifyThm2,
    VerifyHpv,
    ScanRatios,
    Classify,
    SearchExtremal,
}

impl Command {
    pub fn words(self) -> &'static [&'static str] {
        match self {
            Command::RingInfo => &["ring", "info"],
            Command::GraphBuild => &["graph", "build"],
            Command::GraphSpectrum => &["graph", "spectrum"],
            Command::GraphMixing => &["graph", "mixing"],
            Command::VerifyThm1 => &["verify", "thm1"],
            Command::VerifyThm2 => &["verify", "thm2"],
            Command::VerifyHpv => &["verify", "hpv"],
            Command::ScanRatios => &["scan", "ratios"],
            Command::Classify => &["classify"],
            Command::SearchExtremal => &["search", "extremal"],
        }
    }
}

/// A fully resolved invocation: defaults filled in, fields not used by the
/// command left empty.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub ring: String,
    pub sets: Vec<String>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub seed: u64,
    pub trials: Option<usize>,
    pub sizes: Vec<usize>,
    pub iters: Option<usize>,
    pub constants: Option<Constants>,
    pub caps: Caps,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    fn base(command: Command, common: CommonArgs) -> Self {
        RunConfig {
            command,
            ring: common.ring,
            sets: Vec::new(),
            n: None,
            d: None,
            k: None,
            seed: common.seed,
            trials: None,
            sizes: Vec::new(),
            iters: None,
            constants: None,
            caps: Caps {
                max_ring_size: common.max_ring_size,
                max_graph_vertices: common.max_graph_vertices as usize,
                spectral_cap: common.spectral_cap as usize,
                ..Caps::default()
            },
            tolerances: Tolerances { spectral: common.tolerance },
            out: common.out,
            format: common.format,
        }
    }

    fn from_cli(cli: Cli) -> Self {
        match cli.command {
            Group::Ring(RingCmd::Info(c)) => Self::base(Command::RingInfo, c),
            Group::Graph(GraphCmd::Build(g)) => Self { d: Some(g.d as usize), ..Self::base(Command::GraphBuild, g.common) },
            Group::Graph(GraphCmd::Spectrum(g)) => {
                Self { d: Some(g.d as usize), ..Self::base(Command::GraphSpectrum, g.common) }
            }
            Group::Graph(GraphCmd::Mixing(m)) => Self {
                d: Some(m.d as usize),
                trials: Some(m.trials),
                ..Self::base(Command::GraphMixing, m.common)
            },
            Group::Verify(VerifyCmd::Thm1(p)) => {
                Self { sets: vec![p.set], n: Some(p.n), ..Self::base(Command::VerifyThm1, p.common) }
            }
            Group::Verify(VerifyCmd::Thm2(p)) => {
                Self { sets: vec![p.set], n: Some(p.n), ..Self::base(Command::VerifyThm2, p.common) }
            }
            Group::Verify(VerifyCmd::Hpv(h)) => Self { sets: h.set, ..Self::base(Command::VerifyHpv, h.common) },
            Group::Scan(ScanCmd::Ratios(s)) => Self {
                sizes: s.sizes,
                trials: Some(s.trials),
                constants: Some(s.constants.unwrap_or_default()),
                ..Self::base(Command::ScanRatios, s.common)
            },
            Group::Classify(c) => Self {
                sets: vec![c.set],
                constants: Some(c.constants.unwrap_or_default()),
                ..Self::base(Command::Classify, c.common)
            },
            Group::Search(SearchCmd::Extremal(s)) => {
                Self { k: Some(s.k), iters: Some(s.iters), ..Self::base(Command::SearchExtremal, s.common) }
            }
        }
    }

    /// Parses an argument vector (without the program name).
    pub fn parse_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let argv = std::iter::once(OsString::from("valring")).chain(args.into_iter().map(Into::into));
        Cli::try_parse_from(argv).map(Self::from_cli)
    }

    /// Arguments in canonical order, every resolved value spelled out.
    pub fn to_args(&self) -> Vec<String> {
        let mut args: Vec<String> = self.command.words().iter().map(|w| w.to_string()).collect();
        let mut push = |flag: &str, value: String| {
            args.push(format!("--{flag}"));
            args.push(value);
        };
        push("ring", self.ring.clone());
        for set in &self.sets {
            push("set", set.clone());
        }
        if let Some(n) = self.n {
            push("n", n.to_string());
        }
        if let Some(d) = self.d {
            push("d", d.to_string());
        }
        if let Some(k) = self.k {
            push("k", k.to_string());
        }
        push("seed", self.seed.to_string());
        if let Some(t) = self.trials {
            push("trials", t.to_string());
        }
        if !self.sizes.is_empty() {
            push("sizes", self.sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","));
        }
        if let Some(i) = self.iters {
            push("iters", i.to_string());
        }
        if let Some(c) = self.constants {
            push("constants", format!("{},{},{}", c.c1, c.c2, c.c3));
        }
        push("spectral-cap", self.caps.spectral_cap.to_string());
        push("max-ring-size", self.caps.max_ring_size.to_string());
        push("max-graph-vertices", self.caps.max_graph_vertices.to_string());
        push("tolerance", self.tolerances.spectral.to_string());
        if let Some(out) = &self.out {
            push("out", out.to_string_lossy().into_owned());
        }
        push("format", self.format.name().to_string());
        args
    }

    /// Shell-quoted canonical string; [`RunConfig::from_canonical`] inverts it.
    pub fn canonical(&self) -> String {
        let args = self.to_args();
        shlex::try_join(args.iter().map(String::as_str)).expect("arguments contain no NUL bytes")
    }

    pub fn from_canonical(s: &str) -> Result<Self, Error> {
        let args = shlex::split(s).ok_or_else(|| Error::Parse(format!("unbalanced quoting in {s:?}")))?;
        Self::parse_args(args).map_err(|e| Error::Parse(e.to_string()))
    }
}

enum Failure {
    Usage(Error),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

struct Outcome {
    body: String,
    pass: bool,
}

fn error_object(kind: &str, message: &str) -> String {
    let v = json!({ "schema": 1, "error": { "kind": kind, "message": message } });
    format!("{}\n", serde_json::to_string_pretty(&v).expect("static shape"))
}

/// Runs the CLI on `argv` (including the program name), writing reports to
/// stdout or `--out` and diagnostics to stderr. Returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let cfg = RunConfig::from_cli(cli);

    let threads = match std::env::var("VALRING_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => {
                let msg = format!("VALRING_THREADS={v:?} is not a positive integer");
                return emit_error(&cfg, out, err, EXIT_USAGE, "ParseError", &msg);
            }
        },
        Err(_) => None,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| execute(&cfg)),
        Err(e) => return emit_error(&cfg, out, err, EXIT_COMPUTE, "ThreadPool", &e.to_string()),
    };

    match result {
        Ok(outcome) => match write_report(&cfg, out, &outcome.body) {
            Ok(()) => {
                if outcome.pass {
                    EXIT_OK
                } else {
                    let _ = writeln!(err, "valring: a hard assertion failed; see the report");
                    EXIT_ASSERTION
                }
            }
            Err(e) => {
                let _ = writeln!(err, "valring: cannot write report: {e}");
                EXIT_IO
            }
        },
        Err(Failure::Usage(e)) => emit_error(&cfg, out, err, EXIT_USAGE, e.kind(), &e.to_string()),
        Err(Failure::Compute(e)) => emit_error(&cfg, out, err, EXIT_COMPUTE, e.kind(), &e.to_string()),
    }
}

fn emit_error(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write, code: i32, kind: &str, message: &str) -> i32 {
    let _ = writeln!(err, "valring: {kind}: {message}");
    match write_report(cfg, out, &error_object(kind, message)) {
        Ok(()) => code,
        Err(e) => {
            let _ = writeln!(err, "valring: cannot write report: {e}");
            EXIT_IO
        }
    }
}

fn write_report(cfg: &RunConfig, out: &mut dyn Write, body: &str) -> std::io::Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body),
        None => out.write_all(body.as_bytes()),
    }
}

/// JSON with the canonical config attached under `config`.
fn render_json<T: Serialize>(cfg: &RunConfig, report: &T) -> String {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    if let Value::Object(map) = &mut v {
        map.insert("config".into(), Value::String(cfg.canonical()));
    }
    format!("{}\n", serde_json::to_string_pretty(&v).expect("reports serialize"))
}

/// `key,value` rows for every scalar leaf, keys as dotted paths.
fn flatten_csv(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, child, out);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), child, out);
                }
            }
            Value::String(s) if s.contains([',', '"', '\n']) => {
                out.push_str(&format!("{prefix},\"{}\"\n", s.replace('"', "\"\"")))
            }
            Value::String(s) => out.push_str(&format!("{prefix},{s}\n")),
            Value::Null => out.push_str(&format!("{prefix},\n")),
            other => out.push_str(&format!("{prefix},{other}\n")),
        }
    }
    let mut out = String::from("key,value\n");
    walk("", v, &mut out);
    out
}

fn render<T: Serialize>(cfg: &RunConfig, report: &T) -> String {
    match cfg.format {
        Format::Json => render_json(cfg, report),
        Format::Csv => flatten_csv(&serde_json::to_value(report).expect("reports serialize")),
    }
}

fn open_ring(cfg: &RunConfig) -> Result<Arc<Ring>, Failure> {
    let params = parse_ring(&cfg.ring).map_err(Failure::Usage)?;
    Ring::with_cap(params, cfg.caps.max_ring_size).map_err(|e| match e {
        Error::RingTooLarge { .. } => Failure::Compute(e),
        other => Failure::Usage(other),
    })
}

fn parse_set(ring: &Arc<Ring>, literal: &str) -> Result<ElementSet, Failure> {
    ElementSet::parse_literal(ring, literal).map_err(Failure::Usage)
}

fn execute(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let ring = open_ring(cfg)?;
    match cfg.command {
        Command::RingInfo => ring_info(cfg, &ring),
        Command::GraphBuild => graph_build(cfg, &ring),
        Command::GraphSpectrum => graph_spectrum(cfg, &ring),
        Command::GraphMixing => graph_mixing(cfg, &ring),
        Command::VerifyThm1 | Command::VerifyThm2 => {
            let a = parse_set(&ring, &cfg.sets[0])?;
            let n = cfg.n.expect("pipeline commands carry n");
            let verifier = Verifier::new(Arc::clone(&ring), cfg.caps, cfg.tolerances);
            let report = if cfg.command == Command::VerifyThm1 {
                verifier.verify_thm1_pipeline(&a, n)?
            } else {
                verifier.verify_thm2_pipeline(&a, n)?
            };
            Ok(Outcome { body: render(cfg, &report), pass: report.all_hard_passed })
        }
        Command::VerifyHpv => {
            let sets: Vec<ElementSet> = cfg.sets.iter().map(|s| parse_set(&ring, s)).collect::<Result<_, _>>()?;
            let (a, b, c) = match &sets[..] {
                [a] => (a, a, a),
                [a, b, c] => (a, b, c),
                _ => {
                    return Err(Failure::Usage(Error::Parse(format!(
                        "verify hpv takes one or three --set literals, got {}",
                        sets.len()
                    ))))
                }
            };
            Ok(Outcome { body: render(cfg, &verify_hpv(a, b, c)?), pass: true })
        }
        Command::ScanRatios => {
            let trials = cfg.trials.expect("scan carries trials");
            let table = bound_ratio_scan(&ring, &cfg.sizes, trials, cfg.seed, cfg.constants.unwrap_or_default())?;
            let body = match cfg.format {
                Format::Json => render_json(cfg, &table),
                Format::Csv => table.to_csv(),
            };
            Ok(Outcome { body, pass: true })
        }
        Command::Classify => {
            let a = parse_set(&ring, &cfg.sets[0])?;
            #[derive(Serialize)]
            struct ClassifyReport {
                schema: u32,
                ring: String,
                #[serde(flatten)]
                verdict: RegimeVerdict,
            }
            let report = ClassifyReport {
                schema: 1,
                ring: ring.to_string(),
                verdict: classify_regime(&a, cfg.constants.unwrap_or_default()),
            };
            Ok(Outcome { body: render(cfg, &report), pass: true })
        }
        Command::SearchExtremal => {
            let res = extremal_search(&ring, cfg.k.expect("search carries k"), cfg.iters.expect("search carries iters"), cfg.seed)?;
            let pass = res.trace.windows(2).all(|w| w[1] <= w[0]) && res.best_objective <= res.start_objective;
            Ok(Outcome { body: render(cfg, &res), pass })
        }
    }
}

#[derive(Serialize)]
struct RingInfoReport {
    schema: u32,
    ring: String,
    family: Family,
    p: u32,
    s: u32,
    q: u32,
    r: u32,
    /// Residue-field modulus coefficients, low degree first, when `s > 1`.
    modulus: Option<Vec<u32>>,
    size: u64,
    units: u64,
    ideal: u64,
    /// Counted `|(z^k)|` for `k = 0..=r`.
    ideal_sizes: Vec<u64>,
    pass: bool,
}

fn ring_info(cfg: &RunConfig, ring: &Arc<Ring>) -> Result<Outcome, Failure> {
    let r = ring.r();
    let mut by_valuation = vec![0u64; r as usize + 1];
    for a in ring.enumerate(Filter::All) {
        by_valuation[ring.valuation(a) as usize] += 1;
    }
    // |(z^k)| counts elements of valuation >= k
    let ideal_sizes: Vec<u64> = (0..=r as usize).map(|k| by_valuation[k..].iter().sum()).collect();
    let size = ideal_sizes[0];
    let units = ring.enumerate(Filter::Units).count() as u64;
    let ideal = ring.enumerate(Filter::MaximalIdeal).count() as u64;
    let q = ring.q() as u64;
    let pass = size == q.pow(r)
        && units == q.pow(r) - q.pow(r - 1)
        && ideal == q.pow(r - 1)
        && ideal_sizes.iter().enumerate().all(|(k, &n)| n == q.pow(r - k as u32));
    let report = RingInfoReport {
        schema: 1,
        ring: ring.to_string(),
        family: ring.family(),
        p: ring.p(),
        s: ring.s(),
        q: ring.q(),
        r,
        modulus: ring.modulus().map(<[u32]>::to_vec),
        size,
        units,
        ideal,
        ideal_sizes,
        pass,
    };
    Ok(Outcome { body: render(cfg, &report), pass })
}

fn build_graph(cfg: &RunConfig, ring: &Arc<Ring>) -> Result<OrthGraph, Failure> {
    Ok(OrthGraph::build(ring, cfg.d.expect("graph commands carry d"), &cfg.caps)?)
}

#[derive(Serialize)]
struct GraphReport {
    #[serde(flatten)]
    header: GraphHeader,
    classes_formula: u128,
    degree_formula: u128,
    sigma1_matches_degree: Option<bool>,
    sigma2_within_bound: Option<bool>,
    pass: bool,
}

fn graph_report(cfg: &RunConfig, graph: &OrthGraph) -> GraphReport {
    let header = graph.header(cfg.caps.spectral_cap);
    let (q, r, d) = (graph.ring().q() as u64, graph.ring().r(), graph.dim());
    let classes_formula = class_count(q, r, d);
    let degree_formula = degree_formula(q, r, d);
    let tol = cfg.tolerances.spectral;
    let sigma1_matches_degree = header.sigma1.map(|s| (s - header.degree as f64).abs() <= tol * header.degree as f64);
    let sigma2_within_bound = header.sigma2.map(|s| s <= header.bound + tol);
    let pass = header.classes as u128 == classes_formula
        && header.degree as u128 == degree_formula
        && sigma1_matches_degree != Some(false)
        && sigma2_within_bound != Some(false);
    GraphReport { header, classes_formula, degree_formula, sigma1_matches_degree, sigma2_within_bound, pass }
}

fn graph_build(cfg: &RunConfig, ring: &Arc<Ring>) -> Result<Outcome, Failure> {
    let graph = build_graph(cfg, ring)?;
    let report = graph_report(cfg, &graph);
    let body = match cfg.format {
        Format::Json => render_json(cfg, &report),
        Format::Csv => {
            let mut buf = Vec::new();
            graph.write_edges_csv(&mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("ascii")
        }
    };
    Ok(Outcome { body, pass: report.pass })
}

fn graph_spectrum(cfg: &RunConfig, ring: &Arc<Ring>) -> Result<Outcome, Failure> {
    let graph = build_graph(cfg, ring)?;
    graph.singular_values(cfg.caps.spectral_cap)?;
    let report = graph_report(cfg, &graph);
    Ok(Outcome { body: render(cfg, &report), pass: report.pass })
}

#[derive(Serialize)]
struct MixingSummary {
    schema: u32,
    ring: String,
    d: usize,
    classes: usize,
    degree: u64,
    seed: u64,
    trials: usize,
    lambda3: Lambda3,
    tolerance: f64,
    violations: usize,
    /// Largest `|e(X,Y) - main term| / (λ₃ sqrt(|X||Y|))` over the trials.
    worst_ratio: f64,
    pass: bool,
}

fn graph_mixing(cfg: &RunConfig, ring: &Arc<Ring>) -> Result<Outcome, Failure> {
    let graph = build_graph(cfg, ring)?;
    let lambda3 = graph.lambda3(cfg.caps.spectral_cap);
    let trials = cfg.trials.expect("mixing carries trials");
    let n = graph.vertex_count();
    let reports = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, &[t as u64]);
            let xs = random_vertex_subset(n, &mut rng);
            let ys = random_vertex_subset(n, &mut rng);
            graph.mixing_check(&xs, &ys, lambda3, &cfg.tolerances)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let violations = reports.iter().filter(|r| !r.pass).count();
    let worst_ratio = reports.iter().map(|r| if r.bound > 0.0 { r.residual / r.bound } else { 0.0 }).fold(0.0, f64::max);
    let summary = MixingSummary {
        schema: 1,
        ring: ring.to_string(),
        d: graph.dim(),
        classes: n,
        degree: graph.degree(),
        seed: cfg.seed,
        trials,
        lambda3,
        tolerance: cfg.tolerances.spectral,
        violations,
        worst_ratio,
        pass: violations == 0,
    };
    Ok(Outcome { body: render(cfg, &summary), pass: summary.pass })
}
