//! Degree-based seed selection: the dynamic degree discount heuristic for
//! temporal networks and the plain degree discount used for static graphs.

use crate::diffusion::SeedSet;
use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot, TemporalNetwork};

/// Dynamic degree of every node over snapshots `range = [t_a, t_b]`
/// (zero-based, inclusive): for each consecutive pair of snapshots the
/// neighborhood turnover `|N_prev \ N_cur| / |N_prev + N_cur|` weights the
/// current degree `|N_cur|`, and the terms are summed. A pair with two empty
/// neighborhoods contributes zero.
pub fn dynamic_degree(net: &TemporalNetwork, range: (usize, usize)) -> Result<Vec<f64>> {
    let (t_a, t_b) = range;
    if t_a >= t_b {
        return Err(Error::InvalidRange { start: t_a, end: t_b });
    }
    if t_b >= net.len() {
        return Err(Error::SnapshotOutOfRange { index: t_b, len: net.len() });
    }
    let n = net.n();
    let mut degree = vec![0.0; n];
    let mut prev = net.snapshot(t_a).adjacency();
    for t in t_a + 1..=t_b {
        let cur = net.snapshot(t).adjacency();
        for v in 0..n {
            let (diff, union) = diff_and_union(&prev[v], &cur[v]);
            if union > 0 {
                degree[v] += diff as f64 / union as f64 * cur[v].len() as f64;
            }
        }
        prev = cur;
    }
    Ok(degree)
}

/// `(|a \ b|, |a + b|)` for sorted slices.
fn diff_and_union(a: &[NodeId], b: &[NodeId]) -> (usize, usize) {
    let mut diff = 0;
    let mut common = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                diff += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    diff += a.len() - i;
    (diff, a.len() + b.len() - common)
}

/// Dynamic degree discount selection over `range`. Seeds are picked by
/// largest working degree `dd`; each pick increments the selected-neighbor
/// counter `t_u` of its neighbors (union over the range) and rewrites
/// `dd_u = D(u) - 2 t_u - (D(u) - t_u) t_u lambda`. The working degree may go
/// negative; it is not clamped. Ties break toward the lowest node id.
pub fn dyn_deg_discount(
    net: &TemporalNetwork,
    range: (usize, usize),
    k: usize,
    lambda: f64,
) -> Result<SeedSet> {
    let n = net.n();
    if k > n {
        return Err(Error::SeedCountExceedsNodes { k, n });
    }
    if k == 0 {
        return Err(Error::EmptySeedSet);
    }
    let d = dynamic_degree(net, range)?;

    // Neighbor union over the range.
    let mut union_adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for t in range.0..=range.1 {
        for (v, neighbors) in net.snapshot(t).adjacency().into_iter().enumerate() {
            union_adj[v].extend(neighbors);
        }
    }
    for list in &mut union_adj {
        list.sort_unstable();
        list.dedup();
    }

    let mut dd = d.clone();
    let mut t_u = vec![0.0f64; n];
    let mut selected = vec![false; n];
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let v = argmax_unselected(&dd, &selected);
        selected[v] = true;
        chosen.push(v);
        for &u in &union_adj[v] {
            t_u[u] += 1.0;
            dd[u] = d[u] - 2.0 * t_u[u] - (d[u] - t_u[u]) * t_u[u] * lambda;
        }
    }
    SeedSet::new(chosen, n)
}

/// Degree discount on a single static snapshot: repeatedly take the node of
/// maximum remaining degree and decrement each of its neighbors' degrees by
/// one. Ties break toward the lowest node id.
pub fn static_degree_discount(g: &Snapshot, k: usize) -> Result<SeedSet> {
    let n = g.n();
    if k > n {
        return Err(Error::SeedCountExceedsNodes { k, n });
    }
    if k == 0 {
        return Err(Error::EmptySeedSet);
    }
    let adj = g.adjacency();
    let mut degree: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    let mut selected = vec![false; n];
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let v = argmax_unselected(&degree, &selected);
        selected[v] = true;
        chosen.push(v);
        for &u in &adj[v] {
            degree[u] -= 1.0;
        }
    }
    SeedSet::new(chosen, n)
}

fn argmax_unselected(score: &[f64], selected: &[bool]) -> NodeId {
    let mut best: Option<(NodeId, f64)> = None;
    for (v, &s) in score.iter().enumerate() {
        if selected[v] {
            continue;
        }
        if best.map_or(true, |(_, bs)| s > bs) {
            best = Some((v, s));
        }
    }
    best.expect("k <= n leaves an unselected node").0
}
