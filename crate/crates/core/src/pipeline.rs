//! End-to-end run: relaxation, deadlines, hypergraph, orientation,
//! scheduling, optional exact reference, and every invariant check along
//! the way.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::hyper::{
    build_hypergraph, build_line_adjacency, check_outdegree_bound, orient, HyperError, Hypergraph, Orientation,
    OutDegreeReport, DEFAULT_EXPANSION_CAP,
};
use crate::instance::Instance;
use crate::oracle::{exact_optimum, OracleError, OracleOptions, OracleResult};
use crate::relaxation::{
    check_bipartite, check_deadline_cover, check_lemma1, deadlines, solve_relaxation, DeadlineMode, DeadlineSet,
    LemmaReport, LpMode, LpSolution, RelaxError, RelaxOptions,
};
use crate::scheduler::{
    check_finish_bounds, evaluate, schedule_general_capacity, schedule_unit_capacity, validate_schedule, FinishBound,
    FinishReport, RatioReport, Schedule, ScheduleError, ScheduleReport,
};
use crate::tol;

/// Which algorithm family runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    /// Every finite capacity is 1.
    Unit,
    /// Arbitrary capacities, kernel loop per slot.
    Capacities,
    /// Bipartite paths; scheduler chosen by the capacities present.
    Bipartite,
}

impl RunMode {
    pub fn detect(inst: &Instance) -> Self {
        if inst.unit_capacities() {
            RunMode::Unit
        } else {
            RunMode::Capacities
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RunMode::Unit => "unit",
            RunMode::Capacities => "capacities",
            RunMode::Bipartite => "bipartite",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    pub mode: RunMode,
    pub deadlines: DeadlineMode,
    pub relax: RelaxOptions,
    pub expansion_cap: u64,
    /// Run the exact oracle when set and the instance is within its caps.
    pub oracle: Option<OracleOptions>,
}

impl PipelineConfig {
    pub fn new(mode: RunMode) -> Self {
        Self {
            mode,
            deadlines: DeadlineMode::Standard,
            relax: RelaxOptions::default(),
            expansion_cap: DEFAULT_EXPANSION_CAP,
            oracle: None,
        }
    }

    pub fn with_deadlines(mut self, d: DeadlineMode) -> Self {
        self.deadlines = d;
        self
    }

    pub fn with_oracle(mut self, o: OracleOptions) -> Self {
        self.oracle = Some(o);
        self
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("unit mode needs every finite capacity to be 1")]
    NotUnitCapacity,
    #[error(transparent)]
    Relax(#[from] RelaxError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "ok  " } else { "FAIL" };
        write!(f, "{mark} {:<16} {}", self.name, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub mode: RunMode,
    pub lp: LpSolution,
    pub deadlines: DeadlineSet,
    pub hypergraph: Hypergraph,
    pub orientation: Orientation,
    pub schedule: Schedule,
    pub feasibility: ScheduleReport,
    pub lemma1: LemmaReport,
    pub deadline_cover: LemmaReport,
    pub outdegree: OutDegreeReport,
    pub finish: Vec<(FinishBound, FinishReport)>,
    pub oracle: Option<OracleResult>,
    pub oracle_skipped: Option<OracleError>,
    pub ratio: RatioReport,
    pub checks: Vec<Check>,
}

impl PipelineOutcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn count_check(name: &'static str, checked: usize, violations: usize) -> Check {
    Check { name, passed: violations == 0, detail: format!("{checked} checked, {violations} violations") }
}

fn le(a: f64, b: f64) -> bool {
    a <= b + tol::scaled(tol::BOUND_SLACK, b)
}

pub fn run_pipeline(inst: &Instance, cfg: &PipelineConfig) -> Result<PipelineOutcome, PipelineError> {
    let report = inst.validate();
    if !report.is_ok() {
        let msgs: Vec<String> = report.violations.iter().map(|v| format!("{v}")).collect();
        return Err(PipelineError::Invalid(msgs.join("; ")));
    }
    let unit = inst.unit_capacities();
    if cfg.mode == RunMode::Unit && !unit {
        return Err(PipelineError::NotUnitCapacity);
    }
    let lp_mode = if cfg.mode == RunMode::Bipartite {
        check_bipartite(inst)?;
        LpMode::Bipartite
    } else {
        LpMode::General
    };
    let lp = solve_relaxation(inst, lp_mode, &cfg.relax)?;
    let dl = deadlines(&lp, cfg.deadlines);
    let h = build_hypergraph(inst, &dl, cfg.expansion_cap)?;
    let adj = build_line_adjacency(&h);
    let o = orient(&h, &adj);
    let general = cfg.mode == RunMode::Capacities || !unit;
    let schedule = if general { schedule_general_capacity(&h, &o)? } else { schedule_unit_capacity(&h, &o)? };

    let mut checks = Vec::new();
    let lemma1 = check_lemma1(inst, &lp);
    checks.push(count_check("prefix-bound", lemma1.checked, lemma1.violations.len()));
    let cover = check_deadline_cover(inst, &lp, &dl);
    checks.push(count_check("deadline-cover", cover.checked, cover.violations.len()));
    let acyclic = o.is_acyclic();
    checks.push(Check { name: "acyclic", passed: acyclic, detail: format!("{} arcs", o.arcs().count()) });
    let outdegree = check_outdegree_bound(&o, &h);
    checks.push(count_check("out-degree", outdegree.checked, outdegree.violations.len()));
    let kinds: &[FinishBound] = match (general, cfg.deadlines) {
        (false, _) => &[FinishBound::Unit, FinishBound::UnitSharp],
        (true, DeadlineMode::Standard) => &[FinishBound::General],
        (true, DeadlineMode::Improved) => &[FinishBound::GeneralRounded],
    };
    let mut finish = Vec::new();
    for &kind in kinds {
        let r = check_finish_bounds(&h, &schedule, kind);
        let name = match kind {
            FinishBound::Unit => "finish-unit",
            FinishBound::UnitSharp => "finish-sharp",
            FinishBound::General => "finish-general",
            FinishBound::GeneralRounded => "finish-rounded",
        };
        checks.push(count_check(name, r.checked, r.violations.len()));
        finish.push((kind, r));
    }
    let feasibility = validate_schedule(inst, &schedule);
    checks.push(Check {
        name: "feasible",
        passed: feasibility.is_ok(),
        detail: match feasibility.violations.first() {
            None => format!("{} units", schedule.units.len()),
            Some(v) => format!("{} violations, first: {v}", feasibility.violations.len()),
        },
    });

    let (oracle, oracle_skipped) = match cfg.oracle {
        None => (None, None),
        Some(opts) => match exact_optimum(inst, &opts) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e)),
        },
    };
    let opt = oracle.as_ref().filter(|r| r.proven_optimal).map(|r| r.objective);
    let ratio = evaluate(inst, &lp, &schedule, cfg.deadlines, opt);
    checks.push(Check {
        name: "bound-vs-lp",
        passed: le(ratio.alg_objective, ratio.bound_used * ratio.lp_objective),
        detail: format!(
            "alg {} <= {} * lp {} ({})",
            ratio.alg_objective, ratio.bound_used, ratio.lp_objective, ratio.guarantee
        ),
    });
    if let Some(r) = &oracle {
        checks.push(Check {
            name: "oracle-proven",
            passed: r.proven_optimal,
            detail: format!("{} search nodes", r.nodes_explored),
        });
        checks.push(Check {
            name: "oracle-feasible",
            passed: validate_schedule(inst, &r.schedule).is_ok(),
            detail: format!("objective {}", r.objective),
        });
    }
    if let Some(opt) = opt {
        checks.push(Check {
            name: "lp-le-opt",
            passed: le(ratio.lp_objective, opt),
            detail: format!("lp {} <= opt {opt}", ratio.lp_objective),
        });
        checks.push(Check {
            name: "opt-le-alg",
            passed: le(opt, ratio.alg_objective),
            detail: format!("opt {opt} <= alg {}", ratio.alg_objective),
        });
        checks.push(Check {
            name: "bound-vs-opt",
            passed: le(ratio.alg_objective, ratio.bound_used * opt),
            detail: format!("alg {} <= {} * opt {opt}", ratio.alg_objective, ratio.bound_used),
        });
    }

    Ok(PipelineOutcome {
        mode: cfg.mode,
        lp,
        deadlines: dl,
        hypergraph: h,
        orientation: o,
        schedule,
        feasibility,
        lemma1,
        deadline_cover: cover,
        outdegree,
        finish,
        oracle,
        oracle_skipped,
        ratio,
        checks,
    })
}
