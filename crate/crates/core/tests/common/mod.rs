//! Brute-force references shared by the integration tests. Everything here
//! is written independently of the library algorithms it checks.
#![allow(dead_code)]

use coflow_core::hyper::Orientation;
use coflow_core::lp::LinearProgram;
use coflow_core::{Capacity, Instance};

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum of `c·x` over `{A x ≥ b, x ≥ 0}` by trying every basis of tight
/// rows. Only meaningful when the objective is bounded below on the
/// region (e.g. `c ≥ 0`). `None` when no vertex is feasible.
pub fn lp_by_vertices(lp: &LinearProgram) -> Option<f64> {
    let n = lp.n_vars;
    let mut rows: Vec<(Vec<f64>, f64)> = lp.constraints.iter().map(|c| (c.coeffs.clone(), c.rhs)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e, 0.0));
    }
    let mut best: Option<f64> = None;
    let mut pick = Vec::new();
    subsets(rows.len(), n, 0, &mut pick, &mut |idx| {
        let a = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let b = idx.iter().map(|&i| rows[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            let feasible = rows.iter().all(|(r, rhs)| {
                let lhs: f64 = r.iter().zip(&x).map(|(a, b)| a * b).sum();
                lhs >= rhs - 1e-7 * rhs.abs().max(1.0)
            });
            if feasible {
                let v: f64 = lp.objective.iter().zip(&x).map(|(a, b)| a * b).sum();
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
    });
    best
}

fn subsets(n: usize, k: usize, start: usize, pick: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in start..n {
        pick.push(i);
        subsets(n, k, i + 1, pick, f);
        pick.pop();
    }
}

/// Per finite machine, the largest violation `f(S)/u − Σ_S L C` over all
/// nonempty subsets of jobs with positive load there, by enumeration.
pub fn max_subset_violation(inst: &Instance, c: &[f64]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for (i, node) in inst.nodes.iter().enumerate() {
        let Capacity::Finite(u) = node.capacity else { continue };
        let load: Vec<f64> = inst
            .coflows
            .iter()
            .map(|cf| cf.flows.iter().filter(|f| f.path.contains(&i)).map(|f| f64::from(f.demand)).sum())
            .collect();
        let jobs: Vec<usize> = (0..load.len()).filter(|&k| load[k] > 0.0).collect();
        if jobs.is_empty() {
            continue;
        }
        let mut best = f64::NEG_INFINITY;
        for mask in 1u32..(1 << jobs.len()) {
            let members: Vec<usize> = (0..jobs.len()).filter(|b| mask >> b & 1 == 1).map(|b| jobs[b]).collect();
            let sq: f64 = members.iter().map(|&k| load[k] * load[k]).sum();
            let s: f64 = members.iter().map(|&k| load[k]).sum();
            let lhs: f64 = members.iter().map(|&k| load[k] * c[k]).sum();
            best = best.max(0.5 * (sq + s * s) / f64::from(u) - lhs);
        }
        out.push((i, best));
    }
    out
}

/// Exhaustive schedule search: every unit tries every slot up to
/// `units + max release`. Returns the optimal weighted completion time.
pub fn naive_optimum(inst: &Instance) -> f64 {
    let mut units = Vec::new();
    for (k, c) in inst.coflows.iter().enumerate() {
        for f in &c.flows {
            for _ in 0..f.demand {
                units.push((k, f.path.clone()));
            }
        }
    }
    let horizon = units.len() as u32 + inst.coflows.iter().map(|c| c.release).max().unwrap_or(0);
    let mut load = vec![vec![0u32; inst.nodes.len()]; horizon as usize + 1];
    let mut completion = vec![0u32; inst.coflows.len()];
    let mut best = f64::INFINITY;
    fn go(
        inst: &Instance,
        units: &[(usize, Vec<usize>)],
        i: usize,
        horizon: u32,
        load: &mut Vec<Vec<u32>>,
        completion: &mut Vec<u32>,
        best: &mut f64,
    ) {
        if i == units.len() {
            let obj: f64 = inst.coflows.iter().zip(completion.iter()).map(|(c, &t)| c.weight * f64::from(t)).sum();
            *best = best.min(obj);
            return;
        }
        let (k, path) = &units[i];
        for t in inst.coflows[*k].release + 1..=horizon {
            let fits = path.iter().all(|&v| match inst.nodes[v].capacity {
                Capacity::Finite(u) => load[t as usize][v] < u,
                Capacity::Unbounded => true,
            });
            if !fits {
                continue;
            }
            for &v in path {
                load[t as usize][v] += 1;
            }
            let old = completion[*k];
            completion[*k] = old.max(t);
            go(inst, units, i + 1, horizon, load, completion, best);
            completion[*k] = old;
            for &v in path {
                load[t as usize][v] -= 1;
            }
        }
    }
    go(inst, &units, 0, horizon, &mut load, &mut completion, &mut best);
    best
}

/// Independence and absorption of `kernel` within the active vertices,
/// checked arc by arc.
pub fn is_kernel(o: &Orientation, active: &[bool], kernel: &[usize]) -> bool {
    let n = o.vertex_count();
    let mut inside = vec![false; n];
    for &v in kernel {
        if !active[v] || inside[v] {
            return false;
        }
        inside[v] = true;
    }
    for (a, b) in o.arcs() {
        if inside[a] && inside[b] {
            return false;
        }
    }
    (0..n).filter(|&v| active[v] && !inside[v]).all(|v| o.arcs().any(|(a, b)| a == v && inside[b]))
}

/// All kernels of the active subgraph, by enumerating vertex subsets.
pub fn all_kernels(o: &Orientation, active: &[bool]) -> Vec<Vec<usize>> {
    let vs: Vec<usize> = (0..o.vertex_count()).filter(|&v| active[v]).collect();
    assert!(vs.len() <= 16);
    let mut out = Vec::new();
    for mask in 0u32..(1 << vs.len()) {
        let k: Vec<usize> = (0..vs.len()).filter(|b| mask >> b & 1 == 1).map(|b| vs[b]).collect();
        if is_kernel(o, active, &k) {
            out.push(k);
        }
    }
    out
}
