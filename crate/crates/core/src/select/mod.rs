//! Seed-selection algorithms: greedy marginal gain, dynamic degree discount,
//! static degree discount, and the link-prediction score-sum heuristic.
//!
//! Every selector returns exactly `k` distinct nodes for any `k <= n` and
//! breaks ties by lowest node id, so selections are reproducible.

mod degree;
mod greedy;
mod score_sum;

pub use degree::{dyn_deg_discount, dynamic_degree, static_degree_discount};
pub use greedy::{greedy_extend, greedy_select, greedy_select_among, ExactSigma, InfluenceEstimator, McSigma};
pub use score_sum::{score_sum_select, top_k_by_score};

use crate::diffusion::SeedSet;
use crate::error::Result;
use crate::graph::{NodeId, Snapshot};

/// Extend `chosen` to `k` nodes by descending degree on `memory` (ties by
/// lowest id), skipping already chosen nodes. Used when a predicted window
/// has fewer than `k` active nodes: the shortfall is filled from observed
/// history instead of from arbitrary tie-breaks on the prediction.
pub fn fill_by_memory_degree(
    chosen: &mut Vec<NodeId>,
    k: usize,
    memory: &Snapshot,
) -> Result<SeedSet> {
    let degrees = memory.degrees();
    let mut order: Vec<NodeId> = (0..memory.n()).collect();
    order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));
    for v in order {
        if chosen.len() == k {
            break;
        }
        if !chosen.contains(&v) {
            chosen.push(v);
        }
    }
    SeedSet::new(chosen.clone(), memory.n())
}
