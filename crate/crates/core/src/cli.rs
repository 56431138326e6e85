//! Command implementations behind the `gbs` binary.
//!
//! Each command reads and writes the stable file formats of [`crate::io`]
//! and [`crate::sampler`]; every write is atomic and every output is a pure
//! function of the inputs and seeds.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bench::{
    advantage_csv, advantage_study, correlation_csv, correlation_study, noise_csv, noise_sweep, AdvantageConfig,
    NoiseSweepConfig,
};
use crate::encoding::{choose_scale, encode_graph};
use crate::error::{Error, Result};
use crate::gaussian::NoiseConfig;
use crate::graph::Graph;
use crate::instances::{planted_clique, random_complex, zero_one, InstanceKind};
use crate::io::{load_device, load_graph, read_json, save_device, save_graph, write_atomic, write_json, FORMAT_VERSION};
use crate::sampler::{load_pool, postselect, sample, save_pool};
use crate::solvers::{greedy_peel, random_search, simulated_annealing, Objective, ObjectiveKind, ProposalSource, RunTrace, Schedule};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "gbs", version, about = "Gaussian boson sampling simulator and GBS-enhanced graph search")]
pub struct Cli {
    /// Worker thread cap; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph instance.
    Gen(GenArgs),
    /// Encode a graph into device parameters.
    Encode(EncodeArgs),
    /// Draw click patterns from a device.
    Sample(SampleArgs),
    /// Search for a dense or high-hafnian subgraph.
    Solve(SolveArgs),
    /// Run a benchmark study from a JSON config.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = parse_kind)]
    pub kind: InstanceKind,
    #[arg(long)]
    pub n: usize,
    /// planted-clique: clique size.
    #[arg(long)]
    pub clique_size: Option<usize>,
    /// planted-clique: probability of each non-clique edge.
    #[arg(long)]
    pub noise_prob: Option<f64>,
    /// zero-one: edge probability.
    #[arg(long)]
    pub edge_prob: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// planted-clique: also write the clique vertices as JSON here.
    #[arg(long)]
    pub record: Option<PathBuf>,
}

fn parse_kind(s: &str) -> std::result::Result<InstanceKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["mean_clicks", "scale"])))]
pub struct EncodeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Choose the scale so the lossless device clicks this often on average.
    #[arg(long)]
    pub mean_clicks: Option<f64>,
    /// Use this scale directly.
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub device: PathBuf,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Rs,
    Sa,
    Greedy,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_parser = parse_objective)]
    pub objective: ObjectiveKind,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Sample file; post-selected to `k` clicks before use.
    #[arg(long)]
    pub pool: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 0.995)]
    pub alpha: f64,
    /// Probability of proposing the next pool pattern (sa with a pool only).
    #[arg(long, default_value_t = 0.0)]
    pub jump_prob: f64,
    /// Trace CSV; the JSON summary goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_objective(s: &str) -> std::result::Result<ObjectiveKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Torontonian vs |Haf|² and density over random 4-mode matrices.
    Correlate(BenchArgs),
    /// Score and speed advantage of pool-fed over uniform random search.
    Advantage(BenchArgs),
    /// Steps-to-target over a loss/thermal-noise grid.
    NoiseSweep(BenchArgs),
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub config: PathBuf,
    pub out_dir: PathBuf,
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        // a pool may already exist when called repeatedly in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Encode(a) => cmd_encode(&a),
        Command::Sample(a) => cmd_sample(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Bench(BenchCommand::Correlate(a)) => cmd_bench_correlate(&a),
        Command::Bench(BenchCommand::Advantage(a)) => cmd_bench_advantage(&a),
        Command::Bench(BenchCommand::NoiseSweep(a)) => cmd_bench_noise_sweep(&a),
    }
}

fn require<T>(value: Option<T>, flag: &str, kind: InstanceKind) -> Result<T> {
    value.ok_or_else(|| Error::InvalidArgument(format!("{kind} needs --{flag}")))
}

#[derive(Debug, Serialize)]
struct CliqueRecord<'a> {
    format_version: u32,
    clique: &'a [usize],
}

pub fn cmd_gen(a: &GenArgs) -> Result<()> {
    match a.kind {
        InstanceKind::RandomComplex => save_graph(&random_complex(a.n, a.seed)?, &a.out),
        InstanceKind::ZeroOne => save_graph(&zero_one(a.n, require(a.edge_prob, "edge-prob", a.kind)?, a.seed)?, &a.out),
        InstanceKind::PlantedClique => {
            let size = require(a.clique_size, "clique-size", a.kind)?;
            let noise = require(a.noise_prob, "noise-prob", a.kind)?;
            let inst = planted_clique(a.n, size, noise, a.seed)?;
            save_graph(&inst.graph, &a.out)?;
            if let Some(rec) = &a.record {
                write_json(rec, &CliqueRecord { format_version: FORMAT_VERSION, clique: &inst.clique })?;
            }
            Ok(())
        }
    }
}

pub fn cmd_encode(a: &EncodeArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let c = match (a.mean_clicks, a.scale) {
        (Some(t), None) => choose_scale(&g, t)?,
        (None, Some(c)) => c,
        _ => return Err(Error::InvalidArgument("pass exactly one of --mean-clicks and --scale".into())),
    };
    save_device(&encode_graph(&g, c)?, &a.out)
}

pub fn cmd_sample(a: &SampleArgs) -> Result<()> {
    let device = load_device(&a.device)?;
    let state = NoiseConfig::new(a.eta, a.epsilon)?.apply(&device.state()?)?;
    let mut pool = sample(&state, a.count, a.seed)?;
    pool.provenance = format!(
        "simulated modes={} count={} eta={} epsilon={} scale={}",
        device.modes(),
        a.count,
        a.eta,
        a.epsilon,
        device.scale
    );
    save_pool(&pool, &a.out)
}

#[derive(Debug, Serialize)]
struct SolveSummary<'a> {
    format_version: u32,
    tool_version: &'a str,
    objective: ObjectiveKind,
    k: usize,
    algo: Algo,
    steps: usize,
    seed: u64,
    pool_patterns: Option<usize>,
    t0: Option<f64>,
    alpha: Option<f64>,
    jump_prob: Option<f64>,
    best_subset: &'a [usize],
    best_value: f64,
    steps_used: usize,
    pool_wrapped: bool,
}

pub fn trace_csv(trace: &RunTrace) -> String {
    let mut out = String::from("step,best_value\n");
    for (s, v) in &trace.best_value_at_step {
        out.push_str(&format!("{s},{v}\n"));
    }
    out
}

fn load_source(path: Option<&Path>, g: &Graph, k: usize) -> Result<ProposalSource> {
    let Some(path) = path else {
        return Ok(ProposalSource::Uniform);
    };
    let pool = load_pool(path)?;
    if pool.modes != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "pool patterns have {} modes, graph has {} vertices",
            pool.modes,
            g.n()
        )));
    }
    ProposalSource::pool(postselect(&pool, k)?, k)
}

pub fn cmd_solve(a: &SolveArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let obj = Objective::new(a.objective, g.clone(), a.k)?;
    let source = load_source(a.pool.as_deref(), &g, a.k)?;
    let pool_patterns = match &source {
        ProposalSource::Pool(p) => Some(p.len()),
        ProposalSource::Uniform => None,
    };
    let is_sa = a.algo == Algo::Sa;
    let trace = match a.algo {
        Algo::Rs => random_search(&obj, &source, a.steps, a.seed)?,
        Algo::Sa => simulated_annealing(&obj, &source, a.steps, Schedule::new(a.t0, a.alpha)?, a.jump_prob, a.seed)?,
        Algo::Greedy => {
            let subset = greedy_peel(&g, a.k)?;
            let value = obj.value(&subset)?;
            RunTrace { best_value_at_step: vec![(1, value)], best_subset: subset, steps_used: 1, seed: a.seed, pool_wrapped: false }
        }
    };
    write_atomic(&a.out, trace_csv(&trace).as_bytes())?;
    let summary = SolveSummary {
        format_version: FORMAT_VERSION,
        tool_version: TOOL_VERSION,
        objective: a.objective,
        k: a.k,
        algo: a.algo,
        steps: a.steps,
        seed: a.seed,
        pool_patterns,
        t0: is_sa.then_some(a.t0),
        alpha: is_sa.then_some(a.alpha),
        jump_prob: is_sa.then_some(a.jump_prob),
        best_subset: &trace.best_subset,
        best_value: trace.best_value(),
        steps_used: trace.steps_used,
        pool_wrapped: trace.pool_wrapped,
    };
    write_json(&a.out.with_extension("json"), &summary)
}

/// Where a bench config gets its graph: a graph file (relative paths resolve
/// against the config's directory) or a generator recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub kind: Option<InstanceKind>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub clique_size: Option<usize>,
    #[serde(default)]
    pub noise_prob: Option<f64>,
    #[serde(default)]
    pub edge_prob: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl GraphSpec {
    pub fn resolve(&self, base: &Path) -> Result<Graph> {
        let field = |name: &str| Error::Config(format!("graph.{name} is required"));
        match (&self.path, self.kind) {
            (Some(p), None) => load_graph(&base.join(p)),
            (None, Some(kind)) => {
                let n = self.n.ok_or_else(|| field("n"))?;
                match kind {
                    InstanceKind::RandomComplex => random_complex(n, self.seed),
                    InstanceKind::ZeroOne => zero_one(n, self.edge_prob.ok_or_else(|| field("edge_prob"))?, self.seed),
                    InstanceKind::PlantedClique => Ok(planted_clique(
                        n,
                        self.clique_size.ok_or_else(|| field("clique_size"))?,
                        self.noise_prob.ok_or_else(|| field("noise_prob"))?,
                        self.seed,
                    )?
                    .graph),
                }
            }
            _ => Err(Error::Config("graph needs exactly one of graph.path and graph.kind".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelateConfig {
    pub format_version: u32,
    pub n_matrices: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdvantageBenchConfig {
    pub format_version: u32,
    pub graph: GraphSpec,
    pub study: AdvantageConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBenchConfig {
    pub format_version: u32,
    pub graph: GraphSpec,
    pub study: NoiseSweepConfig,
}

#[derive(Debug, Serialize)]
struct Manifest<'a, C: Serialize> {
    format_version: u32,
    tool: &'a str,
    tool_version: &'a str,
    command: &'a str,
    config: &'a C,
    outputs: &'a [&'a str],
}

fn load_config<C: for<'de> Deserialize<'de>>(path: &Path) -> Result<(C, PathBuf)> {
    let text = std::fs::read_to_string(path)?;
    let cfg = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

fn check_format(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Config(format!("format_version: unsupported value {v}")));
    }
    Ok(())
}

fn write_report<C: Serialize>(dir: &Path, command: &str, config: &C, files: &[(&str, Vec<u8>)]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, bytes) in files {
        write_atomic(&dir.join(name), bytes)?;
    }
    let outputs: Vec<&str> = files.iter().map(|(n, _)| *n).collect();
    let manifest =
        Manifest { format_version: FORMAT_VERSION, tool: "gbs", tool_version: TOOL_VERSION, command, config, outputs: &outputs };
    write_json(&dir.join("manifest.json"), &manifest)
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

pub fn cmd_bench_correlate(a: &BenchArgs) -> Result<()> {
    let (cfg, _): (CorrelateConfig, _) = load_config(&a.config)?;
    check_format(cfg.format_version)?;
    let report = correlation_study(cfg.n_matrices, cfg.seed)?;
    let files = [
        ("correlation.csv", correlation_csv(&report.rows).into_bytes()),
        ("correlation.json", json_bytes(&report)?),
    ];
    write_report(&a.out_dir, "bench correlate", &cfg, &files)
}

pub fn cmd_bench_advantage(a: &BenchArgs) -> Result<()> {
    let (cfg, base): (AdvantageBenchConfig, _) = load_config(&a.config)?;
    check_format(cfg.format_version)?;
    let g = cfg.graph.resolve(&base)?;
    let reports = advantage_study(&g, &cfg.study)?;
    let files = [("advantage.csv", advantage_csv(&reports).into_bytes()), ("advantage.json", json_bytes(&reports)?)];
    write_report(&a.out_dir, "bench advantage", &cfg, &files)
}

pub fn cmd_bench_noise_sweep(a: &BenchArgs) -> Result<()> {
    let (cfg, base): (NoiseBenchConfig, _) = load_config(&a.config)?;
    check_format(cfg.format_version)?;
    let g = cfg.graph.resolve(&base)?;
    let report = noise_sweep(&g, &cfg.study)?;
    let files = [("noise_sweep.csv", noise_csv(&report.points).into_bytes()), ("noise_sweep.json", json_bytes(&report)?)];
    write_report(&a.out_dir, "bench noise-sweep", &cfg, &files)
}

/// Loads a JSON config of any bench kind, for callers outside the CLI.
pub fn read_config<C: for<'de> Deserialize<'de>>(path: &Path) -> Result<C> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        main_with_args(std::iter::once("gbs").chain(args.iter().copied()))
    }

    #[test]
    fn encode_needs_exactly_one_target() {
        let dir = tempfile::tempdir().unwrap();
        let g = dir.path().join("g.json");
        let d = dir.path().join("d.json");
        save_graph(&Graph::from_edges(2, &[(0, 1)]).unwrap(), &g).unwrap();
        let (gs, ds) = (g.to_str().unwrap(), d.to_str().unwrap());
        assert_eq!(run_args(&["encode", "--graph", gs, "--out", ds]), 2);
        assert_eq!(run_args(&["encode", "--graph", gs, "--scale", "0.5", "--mean-clicks", "1", "--out", ds]), 2);
        assert_eq!(run_args(&["encode", "--graph", gs, "--scale", "0.5", "--out", ds]), 0);
        let dev = load_device(&d).unwrap();
        assert!((dev.squeezing[0] - 0.5f64.atanh()).abs() < 1e-12);
        assert_eq!(run_args(&["encode", "--graph", gs, "--mean-clicks", "5", "--out", ds]), 2);
    }

    #[test]
    fn solve_rejects_odd_maxhaf() {
        let dir = tempfile::tempdir().unwrap();
        let g = dir.path().join("g.json");
        save_graph(&Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap(), &g).unwrap();
        let out = dir.path().join("t.csv");
        let code = run_args(&[
            "solve", "--graph", g.to_str().unwrap(), "--objective", "max-haf", "--k", "3", "--algo", "rs",
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code, 2);
        assert!(!out.exists());
    }

    #[test]
    fn config_errors_name_the_field() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        std::fs::write(&cfg, r#"{"format_version": 1, "n_matrices": 3, "seed": 1, "sed": 2}"#).unwrap();
        let args = BenchArgs { config: cfg.clone(), out_dir: dir.path().join("out") };
        let msg = cmd_bench_correlate(&args).unwrap_err().to_string();
        assert!(msg.contains("sed"), "{msg}");
        std::fs::write(&cfg, r#"{"format_version": 1, "seed": 1}"#).unwrap();
        let msg = cmd_bench_correlate(&args).unwrap_err().to_string();
        assert!(msg.contains("n_matrices"), "{msg}");
    }

    #[test]
    fn graph_spec_needs_one_source() {
        let spec = GraphSpec { path: None, kind: None, n: None, clique_size: None, noise_prob: None, edge_prob: None, seed: 0 };
        assert!(spec.resolve(Path::new(".")).is_err());
        let spec = GraphSpec { kind: Some(InstanceKind::ZeroOne), n: Some(4), ..spec };
        assert!(spec.resolve(Path::new(".")).unwrap_err().to_string().contains("edge_prob"));
    }
}
