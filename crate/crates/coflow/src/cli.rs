//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 failed invariant or bound,
//! 4 I/O or parse error. Setting `COFLOW_LOG` to a directory makes `solve`
//! write the simplex pivot log, the cuts and the orientation edge list there.

use std::ffi::OsString;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use coflow_core::graph::{SimpleGraph, NAMED_GRAPHS};
use coflow_core::hyper::{HyperError, DEFAULT_EXPANSION_CAP};
use coflow_core::instance::{
    gen_bipartite, gen_coloring, gen_fig4, gen_random, gen_triangle, reduce_node_to_edge, BipartiteParams,
    RandomParams,
};
use coflow_core::oracle::{exact_optimum, OracleError, OracleOptions};
use coflow_core::pipeline::{run_pipeline, PipelineConfig, PipelineError, RunMode};
use coflow_core::relaxation::{DeadlineMode, RelaxError};
use coflow_core::scheduler::validate_schedule;
use coflow_core::Instance;
use serde::Serialize;

use crate::certify::{certify, CertifyConfig, Profile};
use crate::format::{self, FormatError};
use crate::report::{OracleReport, SolveReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const LOG_ENV: &str = "COFLOW_LOG";

#[derive(Parser, Debug)]
#[command(name = "coflow", version, about = "Coflow scheduling: LP bound, approximation, oracle and certification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run the LP relaxation and the scheduler on an instance.
    Solve(SolveArgs),
    /// Validate an instance and optionally a schedule for it.
    Validate(ValidateArgs),
    /// Compute an exact optimum of a small instance.
    Oracle(OracleArgs),
    /// Run the pipeline over many generated instances and tally checks.
    Certify(CertifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Triangle,
    Fig4,
    Coloring,
    Random,
    Bipartite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Unit,
    Capacities,
    Bipartite,
}

impl From<ModeArg> for RunMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Unit => RunMode::Unit,
            ModeArg::Capacities => RunMode::Capacities,
            ModeArg::Bipartite => RunMode::Bipartite,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DeadlineArg {
    Standard,
    Improved,
}

impl From<DeadlineArg> for DeadlineMode {
    fn from(d: DeadlineArg) -> Self {
        match d {
            DeadlineArg::Standard => DeadlineMode::Standard,
            DeadlineArg::Improved => DeadlineMode::Improved,
        }
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Graph for `--kind coloring`: k3, k4, c5 or petersen.
    #[arg(long, required_if_eq("kind", "coloring"))]
    pub graph: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub coflows: usize,
    #[arg(long, default_value_t = 6)]
    pub nodes: usize,
    #[arg(long, default_value_t = 3)]
    pub max_flows: usize,
    #[arg(long, default_value_t = 3)]
    pub max_path: usize,
    #[arg(long, default_value_t = 2)]
    pub max_demand: u32,
    #[arg(long, default_value_t = 0)]
    pub max_release: u32,
    #[arg(long, default_value_t = 1)]
    pub max_capacity: u32,
    /// Ports per side for `--kind bipartite`.
    #[arg(long, default_value_t = 3)]
    pub ports: usize,
    #[arg(long, default_value_t = 0.4)]
    pub density: f64,
    /// Write the edge-capacitated form of the instance instead.
    #[arg(long)]
    pub edges: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RunOpts {
    /// Algorithm family; detected from the capacities when omitted.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value_t = DeadlineArg::Standard)]
    pub deadlines: DeadlineArg,
    /// Also compute the exact optimum when the instance is small enough.
    #[arg(long)]
    pub oracle: bool,
    /// Largest number of demand units the oracle accepts.
    #[arg(long, default_value_t = 12)]
    pub oracle_units: u64,
    #[arg(long, default_value_t = DEFAULT_EXPANSION_CAP)]
    pub expansion_cap: u64,
    /// Cutting-plane round cap.
    #[arg(long, default_value_t = 1000)]
    pub max_rounds: usize,
    /// Relative tolerance of the separation step.
    #[arg(long, default_value_t = coflow_core::tol::SEPARATION_REL)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub run: RunOpts,
    /// Write the schedule document here.
    #[arg(long)]
    pub schedule_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 12)]
    pub oracle_units: u64,
    #[arg(long)]
    pub json: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub schedule_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Inclusive seed range `a..b` (or a single seed).
    #[arg(long, value_parser = parse_seeds, default_value = "1..50")]
    pub seeds: RangeInclusive<u64>,
    #[arg(long, value_enum, default_value_t = Profile::Small)]
    pub profile: Profile,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Deadline rule; both rules run when omitted.
    #[arg(long, value_enum)]
    pub deadlines: Option<DeadlineArg>,
    #[arg(long, default_value_t = 12)]
    pub oracle_units: u64,
    #[arg(long)]
    pub json: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn parse_seeds(s: &str) -> Result<RangeInclusive<u64>, String> {
    let parse = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("bad seed {x:?}: {e}"));
    let range = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            parse(a)?..=parse(b)?
        }
        None => {
            let x = parse(s)?;
            x..=x
        }
    };
    if range.is_empty() {
        return Err(format!("empty seed range {s:?}"));
    }
    Ok(range)
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(FormatError),
    Check,
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Io(e)
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(p) => format::write_file(p, text).map_err(CliError::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializes");
    s.push('\n');
    s
}

fn usage_if(cond: bool, msg: impl Into<String>) -> Result<(), CliError> {
    if cond {
        Err(CliError::Usage(msg.into()))
    } else {
        Ok(())
    }
}

fn cmd_gen(a: &GenArgs) -> Result<(), CliError> {
    usage_if(a.graph.is_some() && a.kind != Kind::Coloring, "--graph only applies to --kind coloring")?;
    let inst = match a.kind {
        Kind::Triangle => gen_triangle(),
        Kind::Fig4 => gen_fig4(),
        Kind::Coloring => {
            let name = a.graph.as_deref().unwrap_or_default();
            let g = SimpleGraph::named(name).ok_or_else(|| {
                CliError::Usage(format!("unknown graph {name:?}; known: {}", NAMED_GRAPHS.join(", ")))
            })?;
            gen_coloring(&g).map_err(|e| CliError::Usage(e.to_string()))?
        }
        Kind::Random => {
            let p = RandomParams::new(
                a.coflows,
                a.nodes,
                a.max_flows,
                a.max_path,
                a.max_demand,
                a.max_release,
                a.max_capacity,
            );
            gen_random(&p, a.seed).map_err(|e| CliError::Usage(e.to_string()))?
        }
        Kind::Bipartite => {
            let p = BipartiteParams {
                ports: a.ports,
                coflows: a.coflows,
                density: a.density,
                max_demand: a.max_demand,
                max_release: a.max_release,
            };
            gen_bipartite(&p, a.seed).map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    let text = if a.edges {
        let e = reduce_node_to_edge(&inst).map_err(|e| CliError::Usage(e.to_string()))?;
        format::save_edge_instance_string(&e)
    } else {
        format::save_instance_string(&inst)
    };
    emit(&text, a.output.as_deref())
}

fn pipeline_config(run: &RunOpts, inst: &Instance) -> Result<PipelineConfig, CliError> {
    usage_if(!(run.tol.is_finite() && run.tol > 0.0), "--tol must be a positive number")?;
    usage_if(run.max_rounds == 0, "--max-rounds must be positive")?;
    let mode = run.mode.map(RunMode::from).unwrap_or_else(|| RunMode::detect(inst));
    let mut cfg = PipelineConfig::new(mode).with_deadlines(run.deadlines.into());
    cfg.expansion_cap = run.expansion_cap;
    cfg.relax.max_rounds = run.max_rounds;
    cfg.relax.separation_rel = run.tol;
    if run.oracle {
        cfg.oracle = Some(OracleOptions { unit_cap: run.oracle_units, ..OracleOptions::default() });
    }
    Ok(cfg)
}

fn log_dir() -> Option<PathBuf> {
    std::env::var_os(LOG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn pipeline_error(e: PipelineError) -> CliError {
    match e {
        PipelineError::NotUnitCapacity
        | PipelineError::Relax(RelaxError::NotBipartite(_))
        | PipelineError::Hyper(HyperError::ExpansionCapExceeded { .. }) => CliError::Usage(e.to_string()),
        PipelineError::Invalid(m) => CliError::Io(FormatError::Invalid(m)),
        other => {
            eprintln!("error: {other}");
            CliError::Check
        }
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<(), CliError> {
    let (inst, _) = format::load_any(&a.input)?;
    let mut cfg = pipeline_config(&a.run, &inst)?;
    let log = log_dir();
    cfg.relax.lp.trace = log.is_some();
    let out = run_pipeline(&inst, &cfg).map_err(pipeline_error)?;
    if let Some(dir) = log {
        std::fs::create_dir_all(&dir)
            .map_err(|source| CliError::Io(FormatError::Io { path: dir.clone(), source }))?;
        format::write_file(&dir.join("lp_trace.txt"), out.lp.trace.as_deref().unwrap_or_default())?;
        let cuts: String = out
            .lp
            .cuts
            .iter()
            .map(|c| format!("machine {} jobs {:?} lhs {} rhs {}\n", c.machine, c.jobs, c.lhs, c.rhs))
            .collect();
        format::write_file(&dir.join("cuts.txt"), &cuts)?;
        format::write_file(&dir.join("orientation.txt"), &out.orientation.to_edge_list())?;
    }
    if let Some(p) = &a.schedule_out {
        format::write_file(p, &format::save_schedule_string(&out.schedule))?;
    }
    let report = SolveReport::new(&inst, &out);
    let text = if a.run.json { report.to_json() } else { report.to_text() };
    emit(&text, a.run.output.as_deref())?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Check)
    }
}

#[derive(Serialize)]
struct ValidateReport {
    instance_ok: bool,
    instance_errors: Vec<String>,
    schedule_ok: Option<bool>,
    schedule_errors: Vec<String>,
}

fn cmd_validate(a: &ValidateArgs) -> Result<(), CliError> {
    let text = format::read_file(&a.input)?;
    let inst = format::parse_instance(&text)?;
    let inst_report = inst.validate();
    let mut report = ValidateReport {
        instance_ok: inst_report.is_ok(),
        instance_errors: inst_report.violations.iter().map(ToString::to_string).collect(),
        schedule_ok: None,
        schedule_errors: Vec::new(),
    };
    if let Some(p) = &a.schedule {
        usage_if(!report.instance_ok, "cannot check a schedule against an invalid instance")?;
        let s = format::parse_schedule(&format::read_file(p)?)?;
        let r = validate_schedule(&inst, &s);
        report.schedule_ok = Some(r.is_ok());
        report.schedule_errors = r.violations.iter().map(ToString::to_string).collect();
    }
    let out = if a.json {
        json(&report)
    } else {
        let mut s = String::new();
        let mut line = |label: &str, ok: bool, errs: &[String]| {
            s.push_str(&format!("{label}: {}\n", if ok { "ok" } else { "INVALID" }));
            for e in errs {
                s.push_str(&format!("  {e}\n"));
            }
        };
        line("instance", report.instance_ok, &report.instance_errors);
        if let Some(ok) = report.schedule_ok {
            line("schedule", ok, &report.schedule_errors);
        }
        s
    };
    emit(&out, a.output.as_deref())?;
    if report.instance_ok && report.schedule_ok != Some(false) {
        Ok(())
    } else {
        Err(CliError::Check)
    }
}

fn cmd_oracle(a: &OracleArgs) -> Result<(), CliError> {
    let (inst, _) = format::load_any(&a.input)?;
    let opts = OracleOptions { unit_cap: a.oracle_units, ..OracleOptions::default() };
    let r = exact_optimum(&inst, &opts).map_err(|e| match e {
        OracleError::InvalidInstance => CliError::Io(FormatError::Invalid(e.to_string())),
        _ => CliError::Usage(e.to_string()),
    })?;
    if let Some(p) = &a.schedule_out {
        format::write_file(p, &format::save_schedule_string(&r.schedule))?;
    }
    let report = OracleReport::new(&inst, &r);
    let text = if a.json { json(&report) } else { report.to_text() };
    emit(&text, a.output.as_deref())?;
    if report.proven_optimal && report.feasible {
        Ok(())
    } else {
        Err(CliError::Check)
    }
}

fn cmd_certify(a: &CertifyArgs) -> Result<(), CliError> {
    usage_if(
        a.profile == Profile::Capacities && a.mode == Some(ModeArg::Unit),
        "profile capacities cannot run in unit mode",
    )?;
    let mut base = PipelineConfig::new(RunMode::Unit);
    base.oracle = Some(OracleOptions { unit_cap: a.oracle_units, ..OracleOptions::default() });
    let cfg = CertifyConfig {
        profile: a.profile,
        seeds: a.seeds.clone(),
        mode: a.mode.map(RunMode::from),
        deadlines: a.deadlines.map(|d| vec![d.into()]).unwrap_or_default(),
        base,
    };
    let report = certify(&cfg);
    let text = if a.json { report.to_json() } else { report.to_text() };
    emit(&text, a.output.as_deref())?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Check)
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Certify(a) => cmd_certify(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_IO
        }
        Err(CliError::Check) => EXIT_CHECK,
    }
}
