//! Batch runs over generated instances with per-invariant tallies.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use coflow_core::graph::SimpleGraph;
use coflow_core::instance::{gen_bipartite, gen_coloring, gen_fig4, gen_random, gen_triangle, BipartiteParams, RandomParams};
use coflow_core::oracle::{chromatic_number, exact_optimum, OracleOptions, DEFAULT_VERTEX_CAP};
use coflow_core::pipeline::{run_pipeline, PipelineConfig, RunMode};
use coflow_core::relaxation::DeadlineMode;
use coflow_core::Instance;
use serde::Serialize;

use crate::report::deadline_name;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Profile {
    /// Random instances small enough for the exact oracle most of the time.
    Small,
    /// The triangle, the four-flow figure and the colouring reductions.
    PaperFigures,
    /// Like `small`, with node capacities in 1..=3.
    Capacities,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Small => "small",
            Profile::PaperFigures => "paper-figures",
            Profile::Capacities => "capacities",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyConfig {
    pub profile: Profile,
    pub seeds: std::ops::RangeInclusive<u64>,
    pub mode: Option<RunMode>,
    /// Both deadline rules when empty.
    pub deadlines: Vec<DeadlineMode>,
    pub base: PipelineConfig,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Failure {
    pub seed: Option<u64>,
    pub label: String,
    pub check: String,
    pub detail: String,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct CertifyReport {
    pub profile: String,
    pub seeds: Option<(u64, u64)>,
    pub runs: usize,
    pub oracle_runs: usize,
    pub invariants: Vec<Tally>,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

impl CertifyReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "profile {}", self.profile);
        if let Some((a, b)) = self.seeds {
            let _ = write!(s, ", seeds {a}..{b}");
        }
        let _ = writeln!(s, ": {} runs, {} with oracle", self.runs, self.oracle_runs);
        for t in &self.invariants {
            let mark = if t.failed == 0 { "ok  " } else { "FAIL" };
            let _ = writeln!(s, "{mark} {:<18} {} passed, {} failed", t.name, t.passed, t.failed);
        }
        for f in &self.failures {
            let seed = f.seed.map(|x| format!("seed {x} ")).unwrap_or_default();
            let _ = writeln!(s, "  {seed}{} {}: {}", f.label, f.check, f.detail);
        }
        let _ = writeln!(s, "{}", if self.passed { "certified" } else { "CERTIFICATION FAILED" });
        s
    }
}

#[derive(Default)]
struct Collector {
    tallies: BTreeMap<String, (usize, usize)>,
    failures: Vec<Failure>,
    runs: usize,
    oracle_runs: usize,
}

impl Collector {
    fn record(&mut self, seed: Option<u64>, label: &str, check: &str, passed: bool, detail: String) {
        let t = self.tallies.entry(check.to_string()).or_default();
        if passed {
            t.0 += 1;
        } else {
            t.1 += 1;
            self.failures.push(Failure { seed, label: label.to_string(), check: check.to_string(), detail });
        }
    }

    fn run(&mut self, seed: Option<u64>, label: &str, inst: &Instance, cfg: &PipelineConfig) -> Option<f64> {
        self.runs += 1;
        match run_pipeline(inst, cfg) {
            Ok(out) => {
                if out.oracle.is_some() {
                    self.oracle_runs += 1;
                }
                for c in &out.checks {
                    self.record(seed, label, c.name, c.passed, c.detail.clone());
                }
                Some(out.lp.lp_objective)
            }
            Err(e) => {
                self.record(seed, label, "pipeline", false, e.to_string());
                None
            }
        }
    }

    fn finish(self, profile: Profile, seeds: Option<(u64, u64)>) -> CertifyReport {
        let invariants: Vec<Tally> =
            self.tallies.into_iter().map(|(name, (passed, failed))| Tally { name, passed, failed }).collect();
        let passed = self.failures.is_empty();
        CertifyReport {
            profile: profile.name().to_string(),
            seeds,
            runs: self.runs,
            oracle_runs: self.oracle_runs,
            invariants,
            failures: self.failures,
            passed,
        }
    }
}

/// Instance for one seed of a random profile.
pub fn profile_instance(profile: Profile, mode: RunMode, seed: u64) -> Instance {
    // even seeds carry zero releases
    let max_release = if seed % 2 == 0 { 0 } else { 3 };
    if mode == RunMode::Bipartite {
        let p = BipartiteParams { ports: 3, coflows: 3, density: 0.35, max_demand: 2, max_release };
        return gen_bipartite(&p, seed).expect("bipartite profile parameters are valid");
    }
    let cap = if profile == Profile::Capacities || mode == RunMode::Capacities { 3 } else { 1 };
    let p = RandomParams::new(3, 6, 3, 3, 2, max_release, cap);
    gen_random(&p, seed).expect("profile parameters are valid")
}

fn modes(cfg: &CertifyConfig) -> Vec<DeadlineMode> {
    if cfg.deadlines.is_empty() {
        vec![DeadlineMode::Standard, DeadlineMode::Improved]
    } else {
        cfg.deadlines.clone()
    }
}

pub fn certify(cfg: &CertifyConfig) -> CertifyReport {
    let mut c = Collector::default();
    let oracle = cfg.base.oracle.unwrap_or_default();
    if cfg.profile == Profile::PaperFigures {
        paper_figures(&mut c, cfg, oracle);
        return c.finish(cfg.profile, None);
    }
    let mode = cfg.mode.unwrap_or(if cfg.profile == Profile::Capacities { RunMode::Capacities } else { RunMode::Unit });
    for seed in cfg.seeds.clone() {
        let inst = profile_instance(cfg.profile, mode, seed);
        let run_mode = if mode == RunMode::Unit && !inst.unit_capacities() { RunMode::Capacities } else { mode };
        for d in modes(cfg) {
            let mut pc = cfg.base;
            pc.mode = run_mode;
            pc.deadlines = d;
            pc.oracle = Some(oracle);
            c.run(Some(seed), deadline_name(d), &inst, &pc);
        }
    }
    c.finish(cfg.profile, Some((*cfg.seeds.start(), *cfg.seeds.end())))
}

fn paper_figures(c: &mut Collector, cfg: &CertifyConfig, oracle: OracleOptions) {
    let figures = [("triangle", gen_triangle(), 2.0, 3.0), ("fig4", gen_fig4(), 3.0, 4.0)];
    for (label, inst, lp_expected, opt_expected) in figures {
        for d in modes(cfg) {
            let mut pc = cfg.base;
            pc.mode = RunMode::Unit;
            pc.deadlines = d;
            pc.oracle = Some(oracle);
            if let Some(lp) = c.run(None, label, &inst, &pc) {
                c.record(None, label, "figure-lp", (lp - lp_expected).abs() <= 1e-6, format!("lp {lp}, expected {lp_expected}"));
            }
        }
        match exact_optimum(&inst, &oracle) {
            Ok(r) => c.record(
                None,
                label,
                "figure-opt",
                r.proven_optimal && r.objective == opt_expected,
                format!("optimum {}, expected {opt_expected}", r.objective),
            ),
            Err(e) => c.record(None, label, "figure-opt", false, e.to_string()),
        }
    }
    for (name, chi) in [("k3", 3), ("k4", 4), ("c5", 3), ("petersen", 3)] {
        let g = SimpleGraph::named(name).expect("built-in graph");
        let inst = gen_coloring(&g).expect("built-in graphs have edges");
        let computed = chromatic_number(&g, DEFAULT_VERTEX_CAP);
        let opt = exact_optimum(&inst, &oracle);
        let (passed, detail) = match (computed, opt) {
            (Ok(k), Ok(r)) => (
                r.proven_optimal && k == chi && r.objective == chi as f64,
                format!("chromatic number {k}, schedule optimum {}, expected {chi}", r.objective),
            ),
            (Err(e), _) => (false, e.to_string()),
            (_, Err(e)) => (false, e.to_string()),
        };
        c.record(None, name, "coloring-opt", passed, detail);
    }
}
