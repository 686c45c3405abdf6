//! Per-pair logistic regression with an L1 penalty, fit by cyclic coordinate
//! descent on a quadratic majorization (curvature bound 1/4, soft
//! thresholding, unpenalized intercept).
//!
//! For every node pair `i` with a historical edge, the state of all such
//! pairs at time `t` predicts pair `i`'s state at `t + 1`:
//! `P(x_i(t+1) = 1) = expit(b_i0 + sum_j x_j(t) b_ij)`. The penalty weight is
//! chosen from a grid by validation AUC on the last transitions of the
//! observation window, then the model is refit on the whole window. The loss
//! is the mean negative log-likelihood plus `alpha * sum_j |b_ij|`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::TemporalNetwork;
use crate::linkpred::{PairIndex, ScoreKind, ScoreMatrix};

const CD_TOL: f64 = 1e-6;
const CD_MAX_SWEEPS: usize = 10_000;

pub(crate) fn expit(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn soft_threshold(z: f64, alpha: f64) -> f64 {
    if z > alpha {
        z - alpha
    } else if z < -alpha {
        z + alpha
    } else {
        0.0
    }
}

/// Fitted per-pair L1-logistic models over a shared pair index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LassoLogitModel {
    pair_index: PairIndex,
    /// Unpenalized intercept of each pair's model.
    intercepts: Vec<f64>,
    /// Sparse nonzero coefficients of each pair's model, `(feature, beta)`.
    coefficients: Vec<Vec<(u32, f64)>>,
    /// Penalty weight chosen by validation AUC.
    pub alpha: f64,
    /// Pooled validation AUC at the chosen penalty.
    pub validation_auc: f64,
    /// Pooled AUC on the training transitions at the chosen penalty.
    pub train_auc: f64,
    /// Fraction of exactly-zero coefficients among all M x M slots.
    pub zero_fraction: f64,
    /// `(alpha, validation AUC)` over the whole grid, descending alpha.
    pub alpha_path: Vec<(f64, f64)>,
}

impl LassoLogitModel {
    pub fn pair_index(&self) -> &PairIndex {
        &self.pair_index
    }

    pub fn intercept(&self, pair: usize) -> f64 {
        self.intercepts[pair]
    }

    pub fn coefficients(&self, pair: usize) -> &[(u32, f64)] {
        &self.coefficients[pair]
    }

    /// One-step-ahead probabilities from a continuous pair-state vector.
    pub fn predict(&self, state: &[f64]) -> Vec<f64> {
        self.intercepts
            .iter()
            .zip(&self.coefficients)
            .map(|(&b0, coefs)| {
                let eta: f64 =
                    b0 + coefs.iter().map(|&(j, b)| state[j as usize] * b).sum::<f64>();
                expit(eta)
            })
            .collect()
    }

    /// Spread a per-pair probability vector into a symmetric score matrix;
    /// pairs outside the index stay at zero.
    pub fn score_matrix(&self, probs: &[f64]) -> Result<ScoreMatrix> {
        let mut scores = ScoreMatrix::zeros(self.pair_index.n(), ScoreKind::Probability);
        for (&(i, j), &p) in self.pair_index.pairs().iter().zip(probs) {
            scores.set(i, j, p)?;
        }
        Ok(scores)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Pair states per snapshot: `states[t][j]` is 1 iff pair `j` has an edge in
/// snapshot `t`.
fn pair_states(net: &TemporalNetwork, upto: usize, index: &PairIndex) -> Vec<Vec<bool>> {
    (0..upto)
        .map(|t| {
            let snap = net.snapshot(t);
            index.pairs().iter().map(|&(i, j)| snap.has_edge(i, j)).collect()
        })
        .collect()
}

struct CdProblem<'a> {
    /// Per feature: sorted transition times where the feature is 1.
    supports: &'a [Vec<usize>],
    /// Per feature: support size within the fit window.
    support_in_window: &'a [usize],
    /// Fit window length (transitions `0..window`).
    window: usize,
}

struct CdState {
    intercept: f64,
    beta: Vec<f64>,
    eta: Vec<f64>,
    mu: Vec<f64>,
}

impl CdState {
    fn new(m: usize, window: usize) -> Self {
        CdState {
            intercept: 0.0,
            beta: vec![0.0; m],
            eta: vec![0.0; window],
            mu: vec![0.5; window],
        }
    }

    /// Rebuild eta/mu from the coefficients (after warm-starting).
    fn sync(&mut self, problem: &CdProblem) {
        self.eta.iter_mut().for_each(|e| *e = self.intercept);
        for (j, support) in problem.supports.iter().enumerate() {
            let b = self.beta[j];
            if b != 0.0 {
                for &t in support.iter().take_while(|&&t| t < problem.window) {
                    self.eta[t] += b;
                }
            }
        }
        for (e, m) in self.eta.iter().zip(self.mu.iter_mut()) {
            *m = expit(*e);
        }
    }
}

/// Coordinate descent for one pair at one penalty. `y` holds the targets for
/// transitions `0..window`. Returns early on an all-constant target with an
/// intercept-only fit at the Laplace-smoothed base rate.
fn fit_one(problem: &CdProblem, y: &[f64], alpha: f64, state: &mut CdState) {
    let w = problem.window;
    let wf = w as f64;
    let positives = y.iter().take(w).sum::<f64>();
    if positives == 0.0 || positives == wf {
        let rate = (positives + 1.0) / (wf + 2.0);
        state.intercept = (rate / (1.0 - rate)).ln();
        state.beta.iter_mut().for_each(|b| *b = 0.0);
        state.sync(problem);
        return;
    }
    state.sync(problem);

    for _sweep in 0..CD_MAX_SWEEPS {
        let mut max_delta = 0.0f64;

        // Intercept step: curvature bound 1/4.
        let g0 = state.mu.iter().zip(y).map(|(m, y)| m - y).sum::<f64>() / wf;
        let delta0 = -4.0 * g0;
        if delta0 != 0.0 {
            state.intercept += delta0;
            for (e, m) in state.eta.iter_mut().zip(state.mu.iter_mut()) {
                *e += delta0;
                *m = expit(*e);
            }
            max_delta = delta0.abs();
        }

        for j in 0..state.beta.len() {
            let s = problem.support_in_window[j];
            if s == 0 {
                continue;
            }
            let support = problem.supports[j].iter().take_while(|&&t| t < w);
            let mut g = 0.0;
            for &t in support {
                g += state.mu[t] - y[t];
            }
            g /= wf;
            let b = state.beta[j];
            if b == 0.0 && g.abs() <= alpha {
                continue;
            }
            let h = s as f64 / (4.0 * wf);
            let z = h * b - g;
            let b_new = soft_threshold(z, alpha) / h;
            let delta = b_new - b;
            if delta != 0.0 {
                state.beta[j] = b_new;
                for &t in problem.supports[j].iter().take_while(|&&t| t < w) {
                    state.eta[t] += delta;
                    state.mu[t] = expit(state.eta[t]);
                }
                max_delta = max_delta.max(delta.abs());
            }
        }

        if max_delta <= CD_TOL {
            break;
        }
    }
}

/// Rank-based AUC with average ranks for ties; 0.5 when only one class is
/// present.
pub fn rank_auc(scored: &[(f64, bool)]) -> f64 {
    let n_pos = scored.iter().filter(|(_, y)| *y).count();
    let n_neg = scored.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return 0.5;
    }
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| scored[a].0.total_cmp(&scored[b].0));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scored[order[j]].0 == scored[order[i]].0 {
            j += 1;
        }
        // Ranks are 1-based; tied scores share the average rank.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if scored[idx].1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    (rank_sum_pos - n_pos as f64 * (n_pos as f64 + 1.0) / 2.0) / (n_pos as f64 * n_neg as f64)
}

/// Fit the per-pair L1-logistic link model on the first `p` snapshots.
///
/// The `p - 1` observed transitions split temporally: the first
/// `floor((1 - val_fraction) * (p - 1))` train each candidate penalty, the
/// rest score it by pooled AUC. The best penalty (largest alpha on ties) is
/// refit on all transitions.
pub fn fit_lasso_logit(
    net: &TemporalNetwork,
    p: usize,
    alpha_grid: &[f64],
    val_fraction: f64,
) -> Result<LassoLogitModel> {
    if alpha_grid.is_empty() {
        return Err(Error::EmptyAlphaGrid);
    }
    if alpha_grid.iter().any(|&a| !a.is_finite() || a <= 0.0) {
        return Err(Error::InvalidParameter("alpha grid entries must be positive".into()));
    }
    if p < 3 || p > net.len() {
        return Err(Error::InvalidParameter(format!(
            "need 3 <= p <= T for a temporal train/validation split, got p = {p}"
        )));
    }
    if !(0.0..1.0).contains(&val_fraction) || val_fraction == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "validation fraction must lie in (0, 1), got {val_fraction}"
        )));
    }
    let index = PairIndex::from_history(net, p)?;
    if index.is_empty() {
        return Err(Error::InvalidParameter(
            "no node pair has a historical edge; nothing to fit".into(),
        ));
    }
    let m = index.len();
    let n_trans = p - 1;
    let n_train = (((1.0 - val_fraction) * n_trans as f64).floor() as usize).max(1);
    let n_train = n_train.min(n_trans - 1).max(1);
    if n_trans < 2 {
        return Err(Error::InvalidParameter("need at least 2 transitions".into()));
    }

    let states = pair_states(net, p, &index);
    // Feature supports over transition times 0..n_trans.
    let supports: Vec<Vec<usize>> = (0..m)
        .map(|j| (0..n_trans).filter(|&t| states[t][j]).collect())
        .collect();
    let support_counts = |window: usize| -> Vec<usize> {
        supports.iter().map(|s| s.partition_point(|&t| t < window)).collect()
    };
    let targets: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..n_trans).map(|t| f64::from(u8::from(states[t + 1][i]))).collect())
        .collect();

    let mut alphas: Vec<f64> = alpha_grid.to_vec();
    alphas.sort_by(|a, b| b.total_cmp(a));
    alphas.dedup();

    // Selection pass: fit the penalty path on the training transitions and
    // keep each pair's validation predictions per alpha.
    let train_counts = support_counts(n_train);
    let train_problem = CdProblem {
        supports: &supports,
        support_in_window: &train_counts,
        window: n_train,
    };
    let val_preds: Vec<Vec<Vec<(f64, bool)>>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut state = CdState::new(m, n_train);
            let mut per_alpha = Vec::with_capacity(alphas.len());
            for &alpha in &alphas {
                fit_one(&train_problem, &targets[i], alpha, &mut state);
                let preds: Vec<(f64, bool)> = (n_train..n_trans)
                    .map(|t| {
                        let mut eta = state.intercept;
                        for (j, &b) in state.beta.iter().enumerate() {
                            if b != 0.0 && states[t][j] {
                                eta += b;
                            }
                        }
                        (expit(eta), targets[i][t] == 1.0)
                    })
                    .collect();
                per_alpha.push(preds);
            }
            per_alpha
        })
        .collect();

    let mut alpha_path = Vec::with_capacity(alphas.len());
    let mut best: Option<(f64, f64)> = None;
    for (a_idx, &alpha) in alphas.iter().enumerate() {
        let pooled: Vec<(f64, bool)> =
            val_preds.iter().flat_map(|per_pair| per_pair[a_idx].iter().copied()).collect();
        let auc = rank_auc(&pooled);
        alpha_path.push((alpha, auc));
        if best.map_or(true, |(_, b)| auc > b) {
            best = Some((alpha, auc));
        }
    }
    let (chosen_alpha, validation_auc) = best.expect("grid is nonempty");

    // Refit pass on all transitions at the chosen penalty.
    let full_counts = support_counts(n_trans);
    let full_problem = CdProblem {
        supports: &supports,
        support_in_window: &full_counts,
        window: n_trans,
    };
    let fits: Vec<(f64, Vec<(u32, f64)>, Vec<(f64, bool)>)> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut state = CdState::new(m, n_trans);
            fit_one(&full_problem, &targets[i], chosen_alpha, &mut state);
            let coefs: Vec<(u32, f64)> = state
                .beta
                .iter()
                .enumerate()
                .filter(|(_, &b)| b != 0.0)
                .map(|(j, &b)| (j as u32, b))
                .collect();
            let train_scored: Vec<(f64, bool)> =
                (0..n_train).map(|t| (state.mu[t], targets[i][t] == 1.0)).collect();
            (state.intercept, coefs, train_scored)
        })
        .collect();

    let train_pooled: Vec<(f64, bool)> =
        fits.iter().flat_map(|(_, _, s)| s.iter().copied()).collect();
    let train_auc = rank_auc(&train_pooled);
    let nonzero: usize = fits.iter().map(|(_, c, _)| c.len()).sum();
    let zero_fraction = 1.0 - nonzero as f64 / (m * m) as f64;

    Ok(LassoLogitModel {
        pair_index: index,
        intercepts: fits.iter().map(|(b0, _, _)| *b0).collect(),
        coefficients: fits.into_iter().map(|(_, c, _)| c).collect(),
        alpha: chosen_alpha,
        validation_auc,
        train_auc,
        zero_fraction,
        alpha_path,
    })
}

/// Multi-step rollout. The first step scores from the observed pair states
/// at snapshot `p`; later steps feed the predicted probabilities back
/// through the model, so probabilities (not binarized edges) propagate.
pub fn lasso_rollout(
    model: &LassoLogitModel,
    net: &TemporalNetwork,
    p: usize,
    steps: usize,
) -> Result<Vec<ScoreMatrix>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("rollout needs at least one step".into()));
    }
    if p < 1 || p > net.len() {
        return Err(Error::SnapshotOutOfRange { index: p, len: net.len() });
    }
    let last = net.snapshot(p - 1);
    let mut state: Vec<f64> = model
        .pair_index
        .pairs()
        .iter()
        .map(|&(i, j)| f64::from(u8::from(last.has_edge(i, j))))
        .collect();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let probs = model.predict(&state);
        out.push(model.score_matrix(&probs)?);
        state = probs;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Snapshot;
    use approx::assert_relative_eq;

    /// Alternating pattern: pair (0,1) flips each step, pair (1,2) is its
    /// complement, so each pair's next state is exactly the other's current
    /// state.
    fn alternating_net(p: usize) -> TemporalNetwork {
        let snaps: Vec<Snapshot> = (0..p)
            .map(|t| {
                let edges: Vec<(usize, usize)> =
                    if t % 2 == 0 { vec![(0, 1)] } else { vec![(1, 2)] };
                Snapshot::from_edges(3, edges).unwrap()
            })
            .collect();
        TemporalNetwork::new(snaps).unwrap()
    }

    #[test]
    fn expit_at_zero_is_half() {
        assert_relative_eq!(expit(0.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn separable_pattern_reaches_perfect_validation_auc() {
        let net = alternating_net(9);
        let grid = [10.0, 1.0, 0.1, 0.01, 0.001];
        let model = fit_lasso_logit(&net, 9, &grid, 0.25).unwrap();
        assert_relative_eq!(model.validation_auc, 1.0, epsilon = 1e-12);
        assert!(model.alpha < 10.0, "perfect AUC needs an informative fit");
    }

    #[test]
    fn huge_penalty_shrinks_everything_to_base_rate() {
        let net = alternating_net(8);
        let model = fit_lasso_logit(&net, 8, &[1e6], 0.25).unwrap();
        for pair in 0..model.pair_index().len() {
            assert!(model.coefficients(pair).is_empty());
        }
        assert_relative_eq!(model.zero_fraction, 1.0, epsilon = 1e-15);
        // Intercept-only prediction equals the pair's empirical base rate
        // over all 7 transitions: pair 0 flips to 1 in 3 of 7.
        let probs = model.predict(&vec![0.0; model.pair_index().len()]);
        assert_relative_eq!(probs[0], 3.0 / 7.0, epsilon = 1e-4);
    }

    #[test]
    fn constant_target_gets_intercept_only_fit() {
        // Pair (0,1) is always on; pair (1,2) alternates.
        let snaps: Vec<Snapshot> = (0..6)
            .map(|t| {
                let mut edges = vec![(0, 1)];
                if t % 2 == 0 {
                    edges.push((1, 2));
                }
                Snapshot::from_edges(3, edges).unwrap()
            })
            .collect();
        let net = TemporalNetwork::new(snaps).unwrap();
        let model = fit_lasso_logit(&net, 6, &[0.01], 0.25).unwrap();
        let constant_pair = model.pair_index().position(0, 1).unwrap();
        assert!(model.coefficients(constant_pair).is_empty());
        // Laplace-smoothed rate (5 + 1) / (5 + 2) on the full refit window.
        assert_relative_eq!(expit(model.intercept(constant_pair)), 6.0 / 7.0, epsilon = 1e-9);
    }

    #[test]
    fn rollout_first_step_equals_direct_prediction() {
        let net = alternating_net(9);
        let model = fit_lasso_logit(&net, 9, &[0.01], 0.25).unwrap();
        let scores = lasso_rollout(&model, &net, 9, 1).unwrap();
        let last = net.snapshot(8);
        let state: Vec<f64> = model
            .pair_index()
            .pairs()
            .iter()
            .map(|&(i, j)| f64::from(u8::from(last.has_edge(i, j))))
            .collect();
        let direct = model.predict(&state);
        for (&(i, j), &p) in model.pair_index().pairs().iter().zip(&direct) {
            assert_relative_eq!(scores[0].get(i, j), p, epsilon = 1e-15);
        }
    }

    #[test]
    fn intercept_only_rollout_is_a_fixed_point() {
        let net = alternating_net(8);
        let model = fit_lasso_logit(&net, 8, &[1e6], 0.25).unwrap();
        let scores = lasso_rollout(&model, &net, 8, 3).unwrap();
        for step in 1..scores.len() {
            for (i, j, s) in scores[step].iter_pairs() {
                assert_relative_eq!(s, scores[0].get(i, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn hand_rolled_two_pair_chain_matches() {
        // Hand-set coefficients on the alternating net's two pairs, then an
        // explicit expit chain computed inline for two steps.
        let net = alternating_net(4);
        let mut model = fit_lasso_logit(&net, 4, &[0.5], 0.4).unwrap();
        model.intercepts = vec![0.1, -0.2];
        model.coefficients = vec![vec![(0, 0.5), (1, -0.3)], vec![(0, 0.8), (1, 0.4)]];
        // Snapshot 3 has edge (1,2) only: state = (0, 1).
        let scores = lasso_rollout(&model, &net, 4, 2).unwrap();
        let p_a1 = expit(0.1 + 0.5 * 0.0 - 0.3 * 1.0);
        let p_b1 = expit(-0.2 + 0.8 * 0.0 + 0.4 * 1.0);
        assert_relative_eq!(scores[0].get(0, 1), p_a1, epsilon = 1e-12);
        assert_relative_eq!(scores[0].get(1, 2), p_b1, epsilon = 1e-12);
        let p_a2 = expit(0.1 + 0.5 * p_a1 - 0.3 * p_b1);
        let p_b2 = expit(-0.2 + 0.8 * p_a1 + 0.4 * p_b1);
        assert_relative_eq!(scores[1].get(0, 1), p_a2, epsilon = 1e-12);
        assert_relative_eq!(scores[1].get(1, 2), p_b2, epsilon = 1e-12);
    }

    #[test]
    fn rollout_scores_stay_in_open_unit_interval_and_off_index_pairs_at_zero() {
        let net = alternating_net(9);
        let model = fit_lasso_logit(&net, 9, &[0.1, 0.01], 0.25).unwrap();
        let scores = lasso_rollout(&model, &net, 9, 4).unwrap();
        for m in &scores {
            assert_eq!(m.kind(), ScoreKind::Probability);
            for (i, j, s) in m.iter_pairs() {
                if model.pair_index().position(i, j).is_some() {
                    assert!(s > 0.0 && s < 1.0, "({i},{j}) scored {s}");
                } else {
                    assert_eq!(s, 0.0);
                }
            }
        }
    }

    #[test]
    fn auc_handles_ties_and_degenerate_labels() {
        assert_relative_eq!(
            rank_auc(&[(0.9, true), (0.1, false)]),
            1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            rank_auc(&[(0.5, true), (0.5, false)]),
            0.5,
            epsilon = 1e-15
        );
        assert_relative_eq!(rank_auc(&[(0.4, true), (0.4, true)]), 0.5, epsilon = 1e-15);
        // Mixed ties: positives at {0.8, 0.5}, negatives at {0.5, 0.2}.
        let auc = rank_auc(&[(0.8, true), (0.5, true), (0.5, false), (0.2, false)]);
        assert_relative_eq!(auc, 0.875, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        let net = alternating_net(6);
        assert!(matches!(
            fit_lasso_logit(&net, 6, &[], 0.25),
            Err(Error::EmptyAlphaGrid)
        ));
        assert!(fit_lasso_logit(&net, 2, &[0.1], 0.25).is_err());
        assert!(fit_lasso_logit(&net, 6, &[0.1], 0.0).is_err());
        assert!(fit_lasso_logit(&net, 6, &[-1.0], 0.25).is_err());
    }

    #[test]
    fn sparsity_is_monotone_along_the_penalty_path() {
        use rand::Rng;
        // Random small instances, fixed seed: the number of nonzero
        // coefficients never grows as the penalty grows.
        let mut rng = crate::rng::stream_rng(99, 0);
        for _ in 0..20 {
            let p = rng.gen_range(6..10);
            let snaps: Vec<Snapshot> = (0..p)
                .map(|_| {
                    let mut edges = Vec::new();
                    for i in 0..4usize {
                        for j in i + 1..4 {
                            if rng.gen_bool(0.5) {
                                edges.push((i, j));
                            }
                        }
                    }
                    Snapshot::from_edges(4, edges).unwrap()
                })
                .collect();
            let Ok(net) = TemporalNetwork::new(snaps) else { continue };
            let alphas = [0.3, 0.1, 0.03, 0.01, 0.003];
            let mut prev_nnz: Option<usize> = None;
            for &alpha in &alphas {
                let Ok(model) = fit_lasso_logit(&net, p, &[alpha], 0.25) else { continue };
                let nnz: usize =
                    (0..model.pair_index().len()).map(|i| model.coefficients(i).len()).sum();
                if let Some(prev) = prev_nnz {
                    assert!(
                        nnz >= prev,
                        "nonzeros shrank from {prev} to {nnz} as alpha fell to {alpha}"
                    );
                }
                prev_nnz = Some(nnz);
            }
        }
    }

    #[test]
    fn solver_matches_grid_refinement_oracle_on_small_problems() {
        use rand::Rng;
        // Independent route: brute-force nested grid refinement over
        // (intercept, b1, b2) for a two-feature problem, compared on the
        // penalized objective.
        let mut rng = crate::rng::stream_rng(7, 1);
        for trial in 0..10 {
            let w = 8;
            let x: Vec<[f64; 2]> =
                (0..w).map(|_| [f64::from(rng.gen_bool(0.5)), f64::from(rng.gen_bool(0.5))]).collect();
            let y: Vec<f64> = (0..w).map(|_| f64::from(rng.gen_bool(0.5))).collect();
            if y.iter().sum::<f64>() == 0.0 || y.iter().sum::<f64>() == w as f64 {
                continue;
            }
            let alpha = 0.05;
            let objective = |b0: f64, b: [f64; 2]| -> f64 {
                let nll: f64 = x
                    .iter()
                    .zip(&y)
                    .map(|(xi, &yi)| {
                        let eta = b0 + b[0] * xi[0] + b[1] * xi[1];
                        (1.0 + eta.exp()).ln() - yi * eta
                    })
                    .sum::<f64>()
                    / w as f64;
                nll + alpha * (b[0].abs() + b[1].abs())
            };

            // Nested refinement around the incumbent.
            let mut center = (0.0, [0.0, 0.0]);
            let mut radius = 4.0;
            let mut best = objective(center.0, center.1);
            for _round in 0..6 {
                let steps = 13;
                for a in 0..steps {
                    for b in 0..steps {
                        for c in 0..steps {
                            let scale = |i: usize| (i as f64 / (steps - 1) as f64) * 2.0 - 1.0;
                            let cand = (
                                center.0 + scale(a) * radius,
                                [center.1[0] + scale(b) * radius, center.1[1] + scale(c) * radius],
                            );
                            let val = objective(cand.0, cand.1);
                            if val < best {
                                best = val;
                                center = cand;
                            }
                        }
                    }
                }
                radius /= 4.0;
            }

            // Coordinate-descent route on the same data.
            let supports: Vec<Vec<usize>> = (0..2)
                .map(|j| (0..w).filter(|&t| x[t][j] == 1.0).collect())
                .collect();
            let counts: Vec<usize> = supports.iter().map(Vec::len).collect();
            let problem =
                CdProblem { supports: &supports, support_in_window: &counts, window: w };
            let mut state = CdState::new(2, w);
            fit_one(&problem, &y, alpha, &mut state);
            let cd_obj = objective(state.intercept, [state.beta[0], state.beta[1]]);
            assert!(
                cd_obj <= best + 1e-4,
                "trial {trial}: coordinate descent objective {cd_obj} worse than oracle {best}"
            );
        }
    }

    #[test]
    fn solver_satisfies_kkt_conditions() {
        let net = alternating_net(10);
        for &alpha in &[0.2, 0.02] {
            let model = fit_lasso_logit(&net, 10, &[alpha], 0.25).unwrap();
            let index = model.pair_index().clone();
            let m = index.len();
            let states = pair_states(&net, 10, &index);
            let n_trans = 9;
            for i in 0..m {
                let mut beta = vec![0.0; m];
                for &(j, b) in model.coefficients(i) {
                    beta[j as usize] = b;
                }
                let mut grad = vec![0.0; m];
                let mut grad0 = 0.0;
                for t in 0..n_trans {
                    let mut eta = model.intercept(i);
                    for j in 0..m {
                        if states[t][j] {
                            eta += beta[j];
                        }
                    }
                    let resid = expit(eta) - f64::from(u8::from(states[t + 1][i]));
                    grad0 += resid;
                    for j in 0..m {
                        if states[t][j] {
                            grad[j] += resid;
                        }
                    }
                }
                grad0 /= n_trans as f64;
                assert!(grad0.abs() < 1e-4, "intercept gradient {grad0}");
                for j in 0..m {
                    let g = grad[j] / n_trans as f64;
                    if beta[j] == 0.0 {
                        assert!(g.abs() <= alpha + 1e-4, "zero coef with |g| = {g} > {alpha}");
                    } else {
                        assert!(
                            (g + alpha * beta[j].signum()).abs() < 1e-4,
                            "stationarity violated: g = {g}, beta = {}",
                            beta[j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn model_round_trips_through_json() {
        let net = alternating_net(8);
        let model = fit_lasso_logit(&net, 8, &[0.1, 0.01], 0.25).unwrap();
        let json = model.to_json().unwrap();
        let back = LassoLogitModel::from_json(&json).unwrap();
        assert_eq!(back.pair_index(), model.pair_index());
        assert_eq!(back.alpha, model.alpha);
        let state = vec![1.0, 0.0];
        assert_eq!(back.predict(&state), model.predict(&state));
    }
}
