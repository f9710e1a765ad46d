//! Exact Wasserstein-1 distances between discrete distributions: the
//! merged-CDF integral on the line, and a transportation simplex for weighted
//! point clouds in the plane under the L1 ground metric.

use crate::coupling::JointLaw;
use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;

/// W1 between two atomic measures of equal mass on the line: the integral of
/// |F1 - F2| over the merged breakpoints.
pub fn w1_line(a: &AtomicMeasure, b: &AtomicMeasure) -> Result<f64> {
    let (ma, mb) = (a.total_mass(), b.total_mass());
    if (ma - mb).abs() > 1e-9 {
        return Err(Error::UnbalancedTransport(ma, mb));
    }
    let mut xs: Vec<f64> = a
        .atoms()
        .iter()
        .chain(b.atoms().iter())
        .map(|at| at.position)
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut dist = 0.0;
    for w in xs.windows(2) {
        dist += (a.cdf(w[0]) - b.cdf(w[0])).abs() * (w[1] - w[0]);
    }
    Ok(dist)
}

/// W1 between two joint laws with the |dx| + |dy| ground metric, solved
/// exactly by the transportation simplex.
pub fn w1_joint(a: &JointLaw, b: &JointLaw) -> Result<f64> {
    let supplies: Vec<f64> = a.atoms.iter().map(|at| at.mass).collect();
    let demands: Vec<f64> = b.atoms.iter().map(|at| at.mass).collect();
    let cost = |i: usize, j: usize| {
        (a.atoms[i].x - b.atoms[j].x).abs() + (a.atoms[i].y - b.atoms[j].y).abs()
    };
    transport_cost_exact(&supplies, &demands, cost)
}

/// Minimum-cost transport between a supply and a demand vector of equal total
/// mass. Transportation simplex: northwest-corner start, potentials by
/// breadth-first search over the basis tree, most-negative-reduced-cost
/// pricing, and a supply perturbation that keeps pivots nondegenerate.
pub fn transport_cost_exact(
    supplies: &[f64],
    demands: &[f64],
    cost: impl Fn(usize, usize) -> f64,
) -> Result<f64> {
    let m = supplies.len();
    let n = demands.len();
    let total_s: f64 = supplies.iter().sum();
    let total_d: f64 = demands.iter().sum();
    if (total_s - total_d).abs() > 1e-9 {
        return Err(Error::UnbalancedTransport(total_s, total_d));
    }
    // Perturbed, exactly balanced copy of the problem. The perturbation is
    // orders of magnitude below the mass scale and breaks degenerate ties.
    let delta = 1e-11 * (total_s / m as f64).max(f64::MIN_POSITIVE);
    let mut supply: Vec<f64> = supplies
        .iter()
        .enumerate()
        .map(|(i, s)| s + (i + 1) as f64 * delta)
        .collect();
    let bump: f64 = (m * (m + 1) / 2) as f64 * delta;
    let scale = (total_s + bump) / total_d;
    let mut demand: Vec<f64> = demands.iter().map(|d| d * scale).collect();

    // Northwest-corner initial spanning tree.
    let mut arcs: Vec<(usize, usize, f64)> = Vec::with_capacity(m + n);
    let (mut i, mut j) = (0usize, 0usize);
    while i < m && j < n {
        let q = supply[i].min(demand[j]);
        arcs.push((i, j, q));
        supply[i] -= q;
        demand[j] -= q;
        if i + 1 == m && j + 1 == n {
            break;
        }
        if supply[i] <= demand[j] && i + 1 < m {
            i += 1;
        } else {
            j += 1;
        }
    }

    // Nodes 0..m are rows, m..m+n are columns.
    let nodes = m + n;
    let max_pivots = 200 * nodes + 20_000;
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for _ in 0..max_pivots {
        for list in &mut adjacency {
            list.clear();
        }
        for (idx, &(ai, aj, _)) in arcs.iter().enumerate() {
            adjacency[ai].push(idx);
            adjacency[m + aj].push(idx);
        }

        // Potentials over the basis tree from node 0.
        let mut potential = vec![f64::NAN; nodes];
        let mut parent_arc = vec![usize::MAX; nodes];
        potential[0] = 0.0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(node) = queue.pop_front() {
            for &idx in &adjacency[node] {
                let (ai, aj, _) = arcs[idx];
                let other = if node < m { m + aj } else { ai };
                if potential[other].is_nan() {
                    potential[other] = cost(ai, aj) - potential[node];
                    parent_arc[other] = idx;
                    queue.push_back(other);
                }
            }
        }

        // Entering arc: the most negative reduced cost.
        let mut entering: Option<(usize, usize, f64)> = None;
        for ei in 0..m {
            let u_i = potential[ei];
            if u_i.is_nan() {
                continue;
            }
            for ej in 0..n {
                let v_j = potential[m + ej];
                if v_j.is_nan() {
                    continue;
                }
                let reduced = cost(ei, ej) - u_i - v_j;
                if reduced < -1e-10 && entering.is_none_or(|(_, _, r)| reduced < r) {
                    entering = Some((ei, ej, reduced));
                }
            }
        }
        let Some((ei, ej, _)) = entering else {
            return Ok(arcs.iter().map(|&(ai, aj, q)| q * cost(ai, aj)).sum());
        };

        // The tree path from row ei to column ej closes the pivot cycle.
        // Parent pointers from a fresh search rooted at ei give the path.
        let mut parent = vec![usize::MAX; nodes];
        let mut via = vec![usize::MAX; nodes];
        let mut seen = vec![false; nodes];
        seen[ei] = true;
        let mut queue = std::collections::VecDeque::from([ei]);
        while let Some(node) = queue.pop_front() {
            if node == m + ej {
                break;
            }
            for &idx in &adjacency[node] {
                let (ai, aj, _) = arcs[idx];
                let other = if node < m { m + aj } else { ai };
                if !seen[other] {
                    seen[other] = true;
                    parent[other] = node;
                    via[other] = idx;
                    queue.push_back(other);
                }
            }
        }
        if !seen[m + ej] {
            return Err(Error::TransportStalled);
        }
        let mut path_arcs = Vec::new();
        let mut node = m + ej;
        while node != ei {
            path_arcs.push(via[node]);
            node = parent[node];
        }
        path_arcs.reverse();

        // Signs alternate around the cycle: the entering arc gains, so the
        // even path positions (starting at the arc sharing its row) lose.
        let mut theta = f64::INFINITY;
        let mut leaving = usize::MAX;
        for (k, &idx) in path_arcs.iter().enumerate() {
            if k % 2 == 0 {
                let q = arcs[idx].2;
                if q < theta {
                    theta = q;
                    leaving = idx;
                }
            }
        }
        for (k, &idx) in path_arcs.iter().enumerate() {
            if k % 2 == 0 {
                arcs[idx].2 -= theta;
            } else {
                arcs[idx].2 += theta;
            }
        }
        arcs[leaving] = (ei, ej, theta);
    }
    Err(Error::TransportStalled)
}
