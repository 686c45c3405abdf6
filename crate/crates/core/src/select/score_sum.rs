//! Score-sum seed selection: rank nodes by the row sums of a link-prediction
//! score matrix and take the top k. Needs no edge threshold and no second
//! influence-maximization pass, so it can always produce k seeds.

use crate::diffusion::SeedSet;
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::linkpred::ScoreMatrix;

/// Top-`k` indices by score, ties toward the lowest index.
pub fn top_k_by_score(theta: &[f64], k: usize) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..theta.len()).collect();
    order.sort_by(|&a, &b| theta[b].total_cmp(&theta[a]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// Select the `k` nodes with the largest score row sums
/// `theta_i = sum_j scores[i, j]`.
pub fn score_sum_select(scores: &ScoreMatrix, k: usize) -> Result<SeedSet> {
    let n = scores.n();
    if k > n {
        return Err(Error::SeedCountExceedsNodes { k, n });
    }
    if k == 0 {
        return Err(Error::EmptySeedSet);
    }
    SeedSet::new(top_k_by_score(&scores.row_sums(), k), n)
}
