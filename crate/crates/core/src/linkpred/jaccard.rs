//! Jaccard-coefficient evolution: predict the next snapshot by adding edges
//! for the most similar non-adjacent pairs and randomly dropping a matching
//! share of existing edges, which roughly preserves density.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot};
use crate::rng::stream_rng;

/// Evolve `g` one step. Non-adjacent pairs with a positive Jaccard
/// coefficient `|N_u & N_v| / |N_u + N_v|` are scored; the top
/// `round(add_frac * #scored)` of them (ties by pair order) gain an edge,
/// and `round(remove_frac * |E|)` existing edges are removed uniformly at
/// random. Iterating the map yields multi-step predictions.
pub fn jaccard_evolve(
    g: &Snapshot,
    add_frac: f64,
    remove_frac: f64,
    rng_seed: u64,
) -> Result<Snapshot> {
    for (name, frac) in [("add_frac", add_frac), ("remove_frac", remove_frac)] {
        if !(0.0..=1.0).contains(&frac) {
            return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {frac}")));
        }
    }
    let n = g.n();
    let adj = g.adjacency();

    let mut scored: Vec<(NodeId, NodeId, f64)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if g.has_edge(i, j) {
                continue;
            }
            let (common, union) = intersection_and_union(&adj[i], &adj[j]);
            if common > 0 {
                scored.push((i, j, common as f64 / union as f64));
            }
        }
    }
    scored.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let n_add = (add_frac * scored.len() as f64).round() as usize;

    let n_remove = (remove_frac * g.edge_count() as f64).round() as usize;
    let mut keep: Vec<(NodeId, NodeId)> = g.edges().to_vec();
    let mut rng = stream_rng(rng_seed, 0);
    keep.shuffle(&mut rng);
    keep.truncate(keep.len() - n_remove);

    keep.extend(scored.into_iter().take(n_add).map(|(i, j, _)| (i, j)));
    Snapshot::from_edges(n, keep)
}

fn intersection_and_union(a: &[NodeId], b: &[NodeId]) -> (usize, usize) {
    let mut common = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (common, a.len() + b.len() - common)
}
