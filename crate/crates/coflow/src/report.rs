//! Human- and machine-readable run reports.

use std::fmt::Write as _;

use coflow_core::instance::path_lambda;
use coflow_core::oracle::OracleResult;
use coflow_core::pipeline::PipelineOutcome;
use coflow_core::rational::approximate;
use coflow_core::relaxation::DeadlineMode;
use coflow_core::scheduler::validate_schedule;
use coflow_core::tol::REPORT_DENOMINATOR;
use coflow_core::Instance;
use serde::Serialize;

use crate::format::ScheduleDoc;

pub fn deadline_name(d: DeadlineMode) -> &'static str {
    match d {
        DeadlineMode::Standard => "standard",
        DeadlineMode::Improved => "improved",
    }
}

fn pretty(x: f64) -> String {
    approximate(x, REPORT_DENOMINATOR).to_string()
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct LpSummary {
    pub objective: f64,
    pub objective_rational: String,
    pub c_star: Vec<f64>,
    pub order: Vec<usize>,
    pub deadlines: Vec<f64>,
    pub rounds: usize,
    pub cuts: usize,
    pub pivots: usize,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct RatioSummary {
    pub lp_objective: f64,
    pub alg_objective: f64,
    pub oracle_objective: Option<f64>,
    pub lambda: usize,
    pub lambda_finite: usize,
    pub delta: u32,
    pub guarantee: String,
    pub bound_used: String,
    pub ratio_vs_lp: f64,
    pub ratio_vs_opt: Option<f64>,
    pub bound_satisfied: bool,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub instance: Option<String>,
    pub mode: String,
    pub deadlines: String,
    pub units: usize,
    pub arcs: usize,
    pub lp: LpSummary,
    pub schedule: ScheduleDoc,
    pub ratio: RatioSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_note: Option<String>,
    pub checks: Vec<CheckSummary>,
    pub passed: bool,
}

impl SolveReport {
    pub fn new(inst: &Instance, out: &PipelineOutcome) -> Self {
        let r = &out.ratio;
        SolveReport {
            instance: inst.name.clone(),
            mode: out.mode.name().to_string(),
            deadlines: deadline_name(out.deadlines.mode).to_string(),
            units: out.hypergraph.total_units(),
            arcs: out.orientation.arcs().count(),
            lp: LpSummary {
                objective: out.lp.lp_objective,
                objective_rational: pretty(out.lp.lp_objective),
                c_star: out.lp.c_star.clone(),
                order: out.lp.order.clone(),
                deadlines: out.deadlines.d.clone(),
                rounds: out.lp.iterations,
                cuts: out.lp.cuts_added,
                pivots: out.lp.simplex_pivots,
            },
            schedule: ScheduleDoc::from(&out.schedule),
            ratio: RatioSummary {
                lp_objective: r.lp_objective,
                alg_objective: r.alg_objective,
                oracle_objective: r.oracle_objective,
                lambda: r.lambda,
                lambda_finite: path_lambda(inst).lambda_finite,
                delta: r.delta,
                guarantee: r.guarantee.formula().to_string(),
                bound_used: r.bound_exact.to_string(),
                ratio_vs_lp: r.ratio_vs_lp,
                ratio_vs_opt: r.ratio_vs_opt,
                bound_satisfied: r.bound_satisfied,
            },
            oracle_note: out.oracle_skipped.as_ref().map(|e| format!("oracle skipped: {e}")),
            checks: out
                .checks
                .iter()
                .map(|c| CheckSummary { name: c.name.to_string(), passed: c.passed, detail: c.detail.clone() })
                .collect(),
            passed: out.all_passed(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let r = &self.ratio;
        let _ = writeln!(s, "instance      {}", self.instance.as_deref().unwrap_or("-"));
        let _ = writeln!(s, "mode          {} ({} deadlines)", self.mode, self.deadlines);
        let _ = writeln!(s, "lambda        {} (finite {}), delta {}", r.lambda, r.lambda_finite, r.delta);
        let _ = writeln!(
            s,
            "lp            {} after {} rounds, {} cuts, {} pivots",
            self.lp.objective_rational, self.lp.rounds, self.lp.cuts, self.lp.pivots
        );
        let _ = writeln!(s, "schedule      objective {}, {} units, {} slots", r.alg_objective, self.units, self.schedule.slots.len());
        if let Some(opt) = r.oracle_objective {
            let _ = writeln!(s, "oracle        optimum {opt}");
        }
        if let Some(note) = &self.oracle_note {
            let _ = writeln!(s, "oracle        {note}");
        }
        let _ = writeln!(
            s,
            "guarantee     {} = {} (ratio vs lp {:.4}{})",
            r.guarantee,
            r.bound_used,
            r.ratio_vs_lp,
            r.ratio_vs_opt.map(|x| format!(", vs opt {x:.4}")).unwrap_or_default()
        );
        for c in &self.checks {
            let _ = writeln!(s, "{} {:<16} {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
        let _ = writeln!(s, "{}", if self.passed { "all checks passed" } else { "CHECKS FAILED" });
        s
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub instance: Option<String>,
    pub objective: f64,
    pub proven_optimal: bool,
    pub nodes_explored: u64,
    pub feasible: bool,
    pub schedule: ScheduleDoc,
}

impl OracleReport {
    pub fn new(inst: &Instance, r: &OracleResult) -> Self {
        OracleReport {
            instance: inst.name.clone(),
            objective: r.objective,
            proven_optimal: r.proven_optimal,
            nodes_explored: r.nodes_explored,
            feasible: validate_schedule(inst, &r.schedule).is_ok(),
            schedule: ScheduleDoc::from(&r.schedule),
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "optimum {} ({}, {} search nodes, {} slots)\n",
            self.objective,
            if self.proven_optimal { "proven" } else { "not proven" },
            self.nodes_explored,
            self.schedule.slots.len()
        )
    }
}
