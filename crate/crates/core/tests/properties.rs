mod common;

use coflow_core::hyper::{build_hypergraph, build_line_adjacency, find_kernel, orient, Orientation};
use coflow_core::instance::{gen_random, loads, reduce_edge_capacities, reduce_node_to_edge, RandomParams};
use coflow_core::lp::{solve_lp, LinearProgram, LpOptions, LpStatus};
use coflow_core::oracle::{exact_optimum, greedy_baseline, OracleOptions};
use coflow_core::pipeline::{run_pipeline, PipelineConfig, RunMode};
use coflow_core::relaxation::{
    deadlines, separate, solve_relaxation, subset_rhs, DeadlineMode, LpMode, RelaxOptions,
};
use coflow_core::scheduler::validate_schedule;
use coflow_core::{Capacity, Instance};
use proptest::prelude::*;

use common::*;

fn instance(
    coflows: std::ops::RangeInclusive<usize>,
    nodes: std::ops::RangeInclusive<usize>,
    flows: std::ops::RangeInclusive<usize>,
    path: std::ops::RangeInclusive<usize>,
    demand: std::ops::RangeInclusive<u32>,
    release: std::ops::RangeInclusive<u32>,
    cap: std::ops::RangeInclusive<u32>,
) -> impl Strategy<Value = Instance> {
    (any::<u64>(), coflows, nodes, flows, path, demand, release, cap).prop_map(|(seed, c, n, f, p, d, r, u)| {
        gen_random(&RandomParams::new(c, n, f, p, d, r, u), seed).unwrap()
    })
}

fn tiny() -> impl Strategy<Value = Instance> {
    instance(1..=3, 2..=4, 1..=2, 1..=3, 1..=2, 0..=2, 1..=2)
}

fn medium() -> impl Strategy<Value = Instance> {
    instance(1..=5, 2..=10, 1..=6, 1..=4, 1..=3, 0..=3, 1..=3)
}

fn small_lp() -> impl Strategy<Value = LinearProgram> {
    (1usize..=3, 1usize..=4).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(0i32..=4, n),
            prop::collection::vec((prop::collection::vec(-3i32..=3, n), -4i32..=6), m),
        )
            .prop_map(|(c, rows)| {
                let mut lp = LinearProgram::new(c.into_iter().map(f64::from).collect());
                for (a, b) in rows {
                    lp.push(a.into_iter().map(f64::from).collect(), f64::from(b));
                }
                lp
            })
    })
}

fn random_dag(max_n: usize) -> impl Strategy<Value = (Orientation, Vec<bool>)> {
    (1..=max_n).prop_flat_map(|n| {
        (prop::collection::vec(any::<bool>(), n * (n - 1) / 2), prop::collection::vec(prop::bool::weighted(0.8), n))
            .prop_map(move |(bits, active)| {
                let mut arcs = Vec::new();
                let mut it = bits.into_iter();
                for a in 0..n {
                    for b in 0..a {
                        if it.next().unwrap() {
                            arcs.push((a, b));
                        }
                    }
                }
                (Orientation::from_arcs(n, &arcs).unwrap(), active)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn simplex_agrees_with_vertex_enumeration(lp in small_lp()) {
        let r = solve_lp(&lp, &LpOptions::default()).unwrap();
        match lp_by_vertices(&lp) {
            None => prop_assert_eq!(r.status, LpStatus::Infeasible),
            Some(v) => {
                prop_assert_eq!(r.status, LpStatus::Optimal);
                prop_assert!((r.objective_value - v).abs() <= 1e-6 * v.abs().max(1.0), "{} vs {}", r.objective_value, v);
                for c in &lp.constraints {
                    prop_assert!(c.lhs(&r.values) >= c.rhs - 1e-7);
                }
                prop_assert!(r.values.iter().all(|&x| x >= -1e-9));
            }
        }
    }

    #[test]
    fn prefixes_reach_the_most_violated_subset(
        inst in instance(1..=5, 2..=5, 1..=3, 1..=3, 1..=3, 0..=0, 1..=3),
        c in prop::collection::vec(0.0f64..12.0, 5),
    ) {
        let c = &c[..inst.coflows.len()];
        let cuts = separate(&inst, c);
        for (machine, worst) in max_subset_violation(&inst, c) {
            let found = cuts.iter().find(|x| x.machine == machine);
            // well above the separation tolerance for these load sizes
            if worst > 1e-4 {
                let cut = found.expect("violated machine must produce a cut");
                prop_assert!(cut.violation() >= worst - 1e-9, "prefix {} < subset {}", cut.violation(), worst);
            }
            if let Some(cut) = found {
                prop_assert!(cut.violation() <= worst + 1e-9);
                let table = loads(&inst);
                let rhs = subset_rhs(cut.jobs.iter().map(|&k| table.get(machine, k)), match inst.nodes[machine].capacity {
                    Capacity::Finite(u) => f64::from(u),
                    Capacity::Unbounded => unreachable!(),
                });
                prop_assert!((rhs - cut.rhs).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn relaxation_optimum_satisfies_every_subset_constraint(inst in medium()) {
        let sol = solve_relaxation(&inst, LpMode::General, &RelaxOptions::default()).unwrap();
        for (_, worst) in max_subset_violation(&inst, &sol.c_star) {
            let scale: f64 = sol.c_star.iter().sum::<f64>().max(1.0) * 10.0;
            prop_assert!(worst <= 1e-6 * scale, "violation {}", worst);
        }
        for (k, c) in inst.coflows.iter().enumerate() {
            prop_assert!(sol.c_star[k] >= f64::from(c.release) + 1.0 - 1e-9);
        }
        let objective: f64 = inst.coflows.iter().zip(&sol.c_star).map(|(c, x)| c.weight * x).sum();
        prop_assert!((objective - sol.lp_objective).abs() <= 1e-6 * objective.max(1.0));
    }

    #[test]
    fn oracle_matches_naive_search(inst in tiny()) {
        prop_assume!(inst.total_units() <= 6);
        let r = exact_optimum(&inst, &OracleOptions::default()).unwrap();
        prop_assert!(r.proven_optimal);
        prop_assert!(validate_schedule(&inst, &r.schedule).is_ok());
        prop_assert_eq!(r.objective, naive_optimum(&inst));
        let lp = solve_relaxation(&inst, LpMode::General, &RelaxOptions::default()).unwrap();
        prop_assert!(lp.lp_objective <= r.objective + 1e-6);
    }

    #[test]
    fn oracle_ignores_job_and_flow_order(inst in instance(1..=4, 2..=5, 1..=3, 1..=3, 1..=2, 0..=2, 1..=2)) {
        prop_assume!(inst.total_units() <= 10);
        let mut permuted = inst.clone();
        permuted.coflows.reverse();
        for c in &mut permuted.coflows {
            c.flows.reverse();
        }
        let a = exact_optimum(&inst, &OracleOptions::default()).unwrap();
        let b = exact_optimum(&permuted, &OracleOptions::default()).unwrap();
        prop_assert!(a.proven_optimal && b.proven_optimal);
        prop_assert_eq!(a.objective, b.objective);
        prop_assert!(a.objective <= greedy_baseline(&inst).objective);
    }

    #[test]
    fn node_counts_match_loads(inst in medium(), scale in 1.0f64..5.0) {
        let d: Vec<f64> = (0..inst.coflows.len()).map(|k| scale + k as f64).collect();
        let h = build_hypergraph(&inst, &coflow_core::relaxation::DeadlineSet { mode: DeadlineMode::Standard, d }, 100_000).unwrap();
        let table = loads(&inst);
        let by_node = h.units_by_node();
        let mut pair_total = 0usize;
        for (v, members) in by_node.iter().enumerate() {
            let expected: u64 = if inst.nodes[v].capacity.is_finite() {
                (0..inst.coflows.len()).map(|k| table.get(v, k)).sum()
            } else {
                0
            };
            prop_assert_eq!(members.len() as u64, expected);
            pair_total += members.len() * members.len().saturating_sub(1) / 2;
        }
        let adj = build_line_adjacency(&h);
        let shared_total: usize = adj.shared.values().map(Vec::len).sum();
        prop_assert_eq!(shared_total, pair_total);
        for a in 0..h.units.len() {
            for b in 0..a {
                let meet = h.units[a].finite_nodes.iter().any(|v| h.units[b].finite_nodes.contains(v));
                prop_assert_eq!(adj.adjacent(a, b), meet);
            }
        }
        let o = orient(&h, &adj);
        prop_assert!(o.is_acyclic());
        prop_assert_eq!(o.arcs().count(), adj.edge_count());
    }

    #[test]
    fn pipeline_checks_hold(inst in medium(), improved in any::<bool>()) {
        let mode = if inst.unit_capacities() { RunMode::Unit } else { RunMode::Capacities };
        let d = if improved { DeadlineMode::Improved } else { DeadlineMode::Standard };
        let cfg = PipelineConfig::new(mode).with_deadlines(d);
        let out = run_pipeline(&inst, &cfg).unwrap();
        let failures: Vec<_> = out.failures().collect();
        prop_assert!(failures.is_empty(), "{:?}", failures);
        let again = run_pipeline(&inst, &cfg).unwrap();
        prop_assert_eq!(&out.schedule, &again.schedule);
        prop_assert_eq!(&out.deadlines, &deadlines(&out.lp, d));
    }

    #[test]
    fn kernels_of_acyclic_orientations((o, active) in random_dag(14)) {
        let k = find_kernel(&o, &active);
        prop_assert!(is_kernel(&o, &active, &k));
        prop_assert_eq!(all_kernels(&o, &active), vec![k]);
    }

    #[test]
    fn node_edge_round_trip_keeps_optimum(inst in instance(1..=3, 2..=3, 1..=2, 1..=3, 1..=2, 0..=1, 1..=2)) {
        prop_assume!(inst.total_units() <= 8);
        let back = reduce_edge_capacities(&reduce_node_to_edge(&inst).unwrap()).unwrap();
        let a = exact_optimum(&inst, &OracleOptions::default()).unwrap();
        let b = exact_optimum(&back, &OracleOptions::default()).unwrap();
        prop_assert_eq!(a.objective, b.objective);
    }
}
