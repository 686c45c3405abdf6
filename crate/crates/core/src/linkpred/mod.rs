//! Temporal link prediction: logistic-LASSO and consensus NMF models, the
//! Jaccard evolution heuristic, and density-preserving binarization of
//! continuous scores into predicted snapshots.

mod jaccard;
mod lasso;
mod nmf;

pub use jaccard::jaccard_evolve;
pub use lasso::{fit_lasso_logit, lasso_rollout, rank_auc, LassoLogitModel};
pub use nmf::{fit_consensus_nmf, fit_temporal_nmf, nmf_rollout, nmf_scores, NmfConfig, NmfModel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot, TemporalNetwork};

/// Whether matrix entries are link probabilities or similarity scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScoreKind {
    Probability,
    Similarity,
}

/// Symmetric per-pair scores with a zero diagonal, stored as the strict
/// upper triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    n: usize,
    kind: ScoreKind,
    data: Vec<f64>,
}

impl ScoreMatrix {
    pub fn zeros(n: usize, kind: ScoreKind) -> Self {
        ScoreMatrix { n, kind, data: vec![0.0; n * n.saturating_sub(1) / 2] }
    }

    fn offset(&self, i: NodeId, j: NodeId) -> usize {
        let (i, j) = (i.min(j), i.max(j));
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    pub fn set(&mut self, i: NodeId, j: NodeId, value: f64) -> Result<()> {
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        if i >= self.n || j >= self.n {
            return Err(Error::NodeOutOfRange { node: i.max(j), n: self.n });
        }
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("score for ({i}, {j}) is {value}")));
        }
        if self.kind == ScoreKind::Probability && !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidParameter(format!(
                "probability score for ({i}, {j}) out of [0, 1]: {value}"
            )));
        }
        let idx = self.offset(i, j);
        self.data[idx] = value;
        Ok(())
    }

    /// Score of a pair; the diagonal is zero by definition.
    pub fn get(&self, i: NodeId, j: NodeId) -> f64 {
        if i == j {
            0.0
        } else {
            self.data[self.offset(i, j)]
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    /// `theta_i = sum_j scores[i, j]`.
    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for i in 0..self.n {
            for j in i + 1..self.n {
                let s = self.data[self.offset(i, j)];
                sums[i] += s;
                sums[j] += s;
            }
        }
        sums
    }

    /// All pairs `(i, j, score)` with `i < j` in lexicographic order.
    pub fn iter_pairs(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n).map(move |j| (i, j, self.data[self.offset(i, j)]))
        })
    }
}

/// Deterministically ordered index of the node pairs with at least one edge
/// in an observation window. Statistical link prediction fits one model per
/// such pair and cannot score any other pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairIndex {
    n: usize,
    pairs: Vec<(NodeId, NodeId)>,
}

impl PairIndex {
    /// Pairs with at least one edge in the first `upto` snapshots, in
    /// lexicographic order.
    pub fn from_history(net: &TemporalNetwork, upto: usize) -> Result<Self> {
        let memory = net.memory_graph(upto)?;
        Ok(PairIndex { n: net.n(), pairs: memory.edges().to_vec() })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(NodeId, NodeId)] {
        &self.pairs
    }

    pub fn position(&self, i: NodeId, j: NodeId) -> Option<usize> {
        let key = (i.min(j), i.max(j));
        self.pairs.binary_search(&key).ok()
    }
}

/// Forecast snapshots plus the continuous scores they were thresholded from.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedFuture {
    /// Per-step score matrices, one per forecast step.
    pub scores: Vec<ScoreMatrix>,
    /// Density-preserving binarization of each score matrix.
    pub snapshots: Vec<Snapshot>,
    /// Edge count shared by every binarized snapshot.
    pub edges_per_step: usize,
}

impl PredictedFuture {
    /// Binarize each score matrix at the weighted density `rho_star`.
    pub fn from_scores(scores: Vec<ScoreMatrix>, rho_star: f64) -> Result<Self> {
        let snapshots = scores
            .iter()
            .map(|s| binarize(s, rho_star))
            .collect::<Result<Vec<_>>>()?;
        let edges_per_step = snapshots.first().map_or(0, |s| s.edge_count());
        Ok(PredictedFuture { scores, snapshots, edges_per_step })
    }

    /// The forecast as a standalone temporal network.
    pub fn network(&self) -> Result<TemporalNetwork> {
        TemporalNetwork::new(self.snapshots.clone())
    }
}

/// Keep the `round(C(n, 2) * rho_star)` top-scoring pairs as edges, breaking
/// score ties by lexicographic pair order. Every input yields exactly that
/// edge count, so all prediction methods forecast the same density.
pub fn binarize(scores: &ScoreMatrix, rho_star: f64) -> Result<Snapshot> {
    if !(0.0..=1.0).contains(&rho_star) {
        return Err(Error::InvalidParameter(format!(
            "target density must lie in [0, 1], got {rho_star}"
        )));
    }
    let n = scores.n();
    let total_pairs = n * n.saturating_sub(1) / 2;
    let count = (total_pairs as f64 * rho_star).round() as usize;
    let mut ranked: Vec<(NodeId, NodeId, f64)> = scores.iter_pairs().collect();
    ranked.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    Snapshot::from_edges(n, ranked.into_iter().take(count).map(|(i, j, _)| (i, j)))
}
