//! Temporal consensus NMF: factor every snapshot as `A_t ~ U_t V_t` while
//! pulling all factor pairs toward attenuation-weighted consensus matrices.
//! The consensus node embeddings (columns of `V_*`) score pair similarity.
//!
//! The loss is `sum_t w_t (|A_t - U_t V_t|_F^2 + |U_t - U_*|_F^2 +
//! |V_t - V_*|_F^2)` with `w_t = phi^(p - t)`; the consensus matrices are the
//! `w`-weighted means of the per-snapshot factors and are recomputed after
//! every factor update, which makes the procedure block coordinate descent:
//! multiplicative updates and consensus refreshes both lower the loss.

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Snapshot, TemporalNetwork};
use crate::linkpred::{binarize, PredictedFuture, ScoreKind, ScoreMatrix};
use crate::rng::stream_rng;
use rand::Rng;

const EPS: f64 = 1e-9;

/// Fit settings; `rank` is the latent dimension `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NmfConfig {
    pub rank: usize,
    /// Attenuation `phi` in (0, 1]: recent snapshots weigh more.
    pub attenuation: f64,
    /// Random restarts; the lowest-loss fit wins.
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative loss-change convergence threshold.
    pub tol: f64,
    pub seed: u64,
}

impl NmfConfig {
    pub fn new(rank: usize) -> Self {
        NmfConfig { rank, attenuation: 0.9, restarts: 25, max_iters: 500, tol: 1e-4, seed: 0 }
    }
}

/// Fitted factors, consensus matrices, and the loss trace of the kept restart.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NmfModel {
    /// Per-snapshot `(U_t, V_t)` pairs; `U_t` is n x q, `V_t` is q x n.
    pub factors: Vec<(MatrixData, MatrixData)>,
    pub consensus_u: MatrixData,
    pub consensus_v: MatrixData,
    pub attenuation: f64,
    pub rank: usize,
    pub final_loss: f64,
    /// Loss at initialization and after each iteration.
    pub loss_history: Vec<f64>,
    /// False when the kept restart hit `max_iters` before the tolerance.
    pub converged: bool,
}

/// Dense matrix with an explicit shape header; the portable on-disk form of
/// all factor matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl MatrixData {
    fn from_array(a: &Array2<f64>) -> Self {
        MatrixData {
            rows: a.nrows(),
            cols: a.ncols(),
            data: a.iter().copied().collect(),
        }
    }

    pub fn to_array(&self) -> Array2<f64> {
        Array2::from_shape_vec((self.rows, self.cols), self.data.clone())
            .expect("shape header matches data length")
    }
}

impl NmfModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

struct FitState {
    factors: Vec<(Array2<f64>, Array2<f64>)>,
    consensus_u: Array2<f64>,
    consensus_v: Array2<f64>,
}

fn weights(count: usize, phi: f64) -> Vec<f64> {
    (0..count).map(|t| phi.powi((count - 1 - t) as i32)).collect()
}

fn weighted_mean(mats: &[Array2<f64>], w: &[f64]) -> Array2<f64> {
    let norm: f64 = w.iter().sum();
    let mut acc = Array2::<f64>::zeros(mats[0].dim());
    for (m, &wt) in mats.iter().zip(w) {
        acc.scaled_add(wt, m);
    }
    acc / norm
}

fn refresh_consensus(state: &mut FitState, w: &[f64]) {
    let us: Vec<Array2<f64>> = state.factors.iter().map(|(u, _)| u.clone()).collect();
    let vs: Vec<Array2<f64>> = state.factors.iter().map(|(_, v)| v.clone()).collect();
    state.consensus_u = weighted_mean(&us, w);
    state.consensus_v = weighted_mean(&vs, w);
}

fn loss(mats: &[Array2<f64>], state: &FitState, w: &[f64]) -> f64 {
    mats.iter()
        .zip(&state.factors)
        .zip(w)
        .map(|((a, (u, v)), &wt)| {
            let recon = a - &u.dot(v);
            let du = u - &state.consensus_u;
            let dv = v - &state.consensus_v;
            wt * (sq_frob(&recon) + sq_frob(&du) + sq_frob(&dv))
        })
        .sum()
}

fn sq_frob(a: &Array2<f64>) -> f64 {
    a.iter().map(|&x| x * x).sum()
}

/// One block-coordinate pass: multiplicative updates on every factor, with
/// the consensus matrices refreshed after each update.
fn iterate(mats: &[Array2<f64>], state: &mut FitState, w: &[f64]) {
    for t in 0..mats.len() {
        let (u, v) = &state.factors[t];
        let numer = mats[t].dot(&v.t()) + &state.consensus_u;
        let denom = u.dot(&v.dot(&v.t())) + u;
        let mut u_new = u.clone();
        ndarray::Zip::from(&mut u_new).and(&numer).and(&denom).for_each(|x, &n, &d| {
            *x *= n / (d + EPS);
        });
        state.factors[t].0 = u_new;
        refresh_consensus(state, w);
    }
    for t in 0..mats.len() {
        let (u, v) = &state.factors[t];
        let numer = u.t().dot(&mats[t]) + &state.consensus_v;
        let denom = u.t().dot(u).dot(v) + v;
        let mut v_new = v.clone();
        ndarray::Zip::from(&mut v_new).and(&numer).and(&denom).for_each(|x, &n, &d| {
            *x *= n / (d + EPS);
        });
        state.factors[t].1 = v_new;
        refresh_consensus(state, w);
    }
}

fn run_to_convergence(
    mats: &[Array2<f64>],
    mut state: FitState,
    cfg: &NmfConfig,
    w: &[f64],
) -> (FitState, Vec<f64>, bool) {
    let mut history = vec![loss(mats, &state, w)];
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        iterate(mats, &mut state, w);
        let l = loss(mats, &state, w);
        let prev = *history.last().unwrap();
        history.push(l);
        if (prev - l).abs() <= cfg.tol * prev.max(1e-12) {
            converged = true;
            break;
        }
    }
    (state, history, converged)
}

fn random_state(mats: &[Array2<f64>], cfg: &NmfConfig, restart: u64) -> FitState {
    let (rows, cols) = mats[0].dim();
    let total: f64 = mats.iter().map(|m| m.sum()).sum();
    let mean = total / (mats.len() * rows * cols) as f64;
    let scale = (mean / cfg.rank as f64).sqrt();
    let mut rng = stream_rng(cfg.seed, restart);
    let factors: Vec<(Array2<f64>, Array2<f64>)> = (0..mats.len())
        .map(|_| {
            let u = Array2::from_shape_fn((rows, cfg.rank), |_| rng.gen::<f64>() * scale);
            let v = Array2::from_shape_fn((cfg.rank, cols), |_| rng.gen::<f64>() * scale);
            (u, v)
        })
        .collect();
    let w = weights(mats.len(), cfg.attenuation);
    let mut state = FitState {
        factors,
        consensus_u: Array2::zeros((rows, cfg.rank)),
        consensus_v: Array2::zeros((cfg.rank, cols)),
    };
    refresh_consensus(&mut state, &w);
    state
}

fn validate(mats: &[Array2<f64>], cfg: &NmfConfig) -> Result<()> {
    let first = mats.first().ok_or(Error::EmptyNetwork)?;
    let dim = first.dim();
    if mats.iter().any(|m| m.dim() != dim) {
        return Err(Error::InvalidParameter("factorization inputs differ in shape".into()));
    }
    if mats.iter().any(|m| m.iter().any(|&x| !x.is_finite() || x < 0.0)) {
        return Err(Error::InvalidParameter("inputs must be non-negative and finite".into()));
    }
    if cfg.rank < 1 || cfg.rank >= dim.0.min(dim.1) {
        return Err(Error::InvalidParameter(format!(
            "rank must satisfy 1 <= q < n, got q = {} for shape {dim:?}",
            cfg.rank
        )));
    }
    if !(cfg.attenuation > 0.0 && cfg.attenuation <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "attenuation must lie in (0, 1], got {}",
            cfg.attenuation
        )));
    }
    if cfg.restarts < 1 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    Ok(())
}

fn state_to_model(
    state: FitState,
    cfg: &NmfConfig,
    history: Vec<f64>,
    converged: bool,
) -> NmfModel {
    NmfModel {
        factors: state
            .factors
            .iter()
            .map(|(u, v)| (MatrixData::from_array(u), MatrixData::from_array(v)))
            .collect(),
        consensus_u: MatrixData::from_array(&state.consensus_u),
        consensus_v: MatrixData::from_array(&state.consensus_v),
        attenuation: cfg.attenuation,
        rank: cfg.rank,
        final_loss: *history.last().unwrap(),
        loss_history: history,
        converged,
    }
}

/// Factor an arbitrary sequence of non-negative matrices. Restarts run in
/// parallel with per-restart RNG streams; the lowest final loss wins, with
/// ties going to the lowest restart index.
pub fn fit_consensus_nmf(mats: &[Array2<f64>], cfg: &NmfConfig) -> Result<NmfModel> {
    validate(mats, cfg)?;
    let w = weights(mats.len(), cfg.attenuation);
    let runs: Vec<(FitState, Vec<f64>, bool)> = (0..cfg.restarts as u64)
        .into_par_iter()
        .map(|r| run_to_convergence(mats, random_state(mats, cfg, r), cfg, &w))
        .collect();
    let mut best: Option<(FitState, Vec<f64>, bool)> = None;
    for run in runs {
        let l = *run.1.last().unwrap();
        if best.as_ref().map_or(true, |b| l < *b.1.last().unwrap()) {
            best = Some(run);
        }
    }
    let (state, history, converged) = best.expect("at least one restart");
    Ok(state_to_model(state, cfg, history, converged))
}

pub(crate) fn snapshot_to_matrix(s: &Snapshot) -> Array2<f64> {
    let mut a = Array2::<f64>::zeros((s.n(), s.n()));
    for &(i, j) in s.edges() {
        a[(i, j)] = 1.0;
        a[(j, i)] = 1.0;
    }
    a
}

/// Fit the consensus factorization on the first `p` snapshots of a network.
pub fn fit_temporal_nmf(net: &TemporalNetwork, p: usize, cfg: &NmfConfig) -> Result<NmfModel> {
    if p < 1 || p > net.len() {
        return Err(Error::SnapshotOutOfRange { index: p, len: net.len() });
    }
    let mats: Vec<Array2<f64>> =
        net.snapshots()[..p].iter().map(snapshot_to_matrix).collect();
    fit_consensus_nmf(&mats, cfg)
}

/// Pairwise cosine similarity between the consensus node embeddings (the
/// per-node columns of `V_*`); all-zero embeddings score 0 everywhere.
pub fn nmf_scores(model: &NmfModel) -> ScoreMatrix {
    let v = model.consensus_v.to_array();
    let n = v.ncols();
    let norms: Vec<f64> = (0..n).map(|i| v.column(i).dot(&v.column(i)).sqrt()).collect();
    let mut scores = ScoreMatrix::zeros(n, ScoreKind::Similarity);
    for i in 0..n {
        for j in i + 1..n {
            let s = cosine(v.column(i), v.column(j), norms[i], norms[j]);
            scores.set(i, j, s).expect("cosine of non-negative vectors is finite");
        }
    }
    scores
}

fn cosine(a: ArrayView1<f64>, b: ArrayView1<f64>, norm_a: f64, norm_b: f64) -> f64 {
    if norm_a == 0.0 || norm_b == 0.0 {
        0.0
    } else {
        a.dot(&b) / (norm_a * norm_b)
    }
}

/// Multi-step forecast. Each step binarizes the current consensus similarity
/// at `rho_star`; before the next step the predicted snapshot joins the loss
/// (exponents shift by one) and the factorization is refit warm-started from
/// the previous factors, with the new factor pair seeded from the consensus.
pub fn nmf_rollout(
    model: &NmfModel,
    net: &TemporalNetwork,
    p: usize,
    steps: usize,
    rho_star: f64,
    cfg: &NmfConfig,
) -> Result<PredictedFuture> {
    if steps == 0 {
        return Err(Error::InvalidParameter("rollout needs at least one step".into()));
    }
    if p < 1 || p > net.len() {
        return Err(Error::SnapshotOutOfRange { index: p, len: net.len() });
    }
    let mut mats: Vec<Array2<f64>> =
        net.snapshots()[..p].iter().map(snapshot_to_matrix).collect();
    let mut current = model.clone();
    let mut scores_out = Vec::with_capacity(steps);
    let mut snaps_out = Vec::with_capacity(steps);
    for step in 0..steps {
        let scores = nmf_scores(&current);
        let snap = binarize(&scores, rho_star)?;
        scores_out.push(scores);
        snaps_out.push(snap.clone());
        if step + 1 < steps {
            mats.push(snapshot_to_matrix(&snap));
            current = refit_extended(&mats, &current, cfg)?;
        }
    }
    let edges_per_step = snaps_out[0].edge_count();
    Ok(PredictedFuture { scores: scores_out, snapshots: snaps_out, edges_per_step })
}

/// Refit after appending one matrix, warm-starting every factor from the
/// previous fit and the appended pair from the consensus.
fn refit_extended(mats: &[Array2<f64>], previous: &NmfModel, cfg: &NmfConfig) -> Result<NmfModel> {
    validate(mats, cfg)?;
    if mats.len() != previous.factors.len() + 1 {
        return Err(Error::InvalidParameter(
            "extended refit expects exactly one appended matrix".into(),
        ));
    }
    let w = weights(mats.len(), cfg.attenuation);
    let mut factors: Vec<(Array2<f64>, Array2<f64>)> = previous
        .factors
        .iter()
        .map(|(u, v)| (u.to_array(), v.to_array()))
        .collect();
    factors.push((previous.consensus_u.to_array(), previous.consensus_v.to_array()));
    let mut state = FitState {
        factors,
        consensus_u: Array2::zeros((mats[0].nrows(), cfg.rank)),
        consensus_v: Array2::zeros((cfg.rank, mats[0].ncols())),
    };
    refresh_consensus(&mut state, &w);
    let (state, history, converged) = run_to_convergence(mats, state, cfg, &w);
    Ok(state_to_model(state, cfg, history, converged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    fn small_cfg(rank: usize, seed: u64) -> NmfConfig {
        NmfConfig { restarts: 5, max_iters: 300, seed, ..NmfConfig::new(rank) }
    }

    #[test]
    fn loss_history_never_increases() {
        let mut rng = stream_rng(31, 0);
        for trial in 0..8 {
            let n = 6;
            let mats: Vec<Array2<f64>> = (0..3)
                .map(|_| Array2::from_shape_fn((n, n), |_| f64::from(rng.gen_bool(0.3))))
                .collect();
            let model = fit_consensus_nmf(&mats, &small_cfg(2, trial)).unwrap();
            for pair in model.loss_history.windows(2) {
                assert!(
                    pair[1] <= pair[0] + 1e-10,
                    "trial {trial}: loss rose from {} to {}",
                    pair[0],
                    pair[1]
                );
            }
        }
    }

    #[test]
    fn recovers_exact_rank_one_structure() {
        // A = u v^T has an exact rank-1 non-negative factorization.
        let u = array![[1.0], [2.0], [3.0], [0.5]];
        let v = array![[2.0, 1.0, 3.0, 0.2]];
        let a = u.dot(&v);
        let mats = vec![a.clone(), a.clone(), a.clone()];
        let cfg = NmfConfig {
            restarts: 10,
            max_iters: 3000,
            tol: 1e-12,
            seed: 5,
            ..NmfConfig::new(1)
        };
        let model = fit_consensus_nmf(&mats, &cfg).unwrap();
        let recon =
            model.consensus_u.to_array().dot(&model.consensus_v.to_array());
        let err = sq_frob(&(&a - &recon)).sqrt() / sq_frob(&a).sqrt();
        assert!(err <= 1e-3, "relative reconstruction error {err}");
    }

    #[test]
    fn factors_stay_non_negative() {
        let mut rng = stream_rng(8, 0);
        let mats: Vec<Array2<f64>> = (0..4)
            .map(|_| Array2::from_shape_fn((5, 5), |_| f64::from(rng.gen_bool(0.4))))
            .collect();
        let model = fit_consensus_nmf(&mats, &small_cfg(2, 3)).unwrap();
        for (u, v) in &model.factors {
            assert!(u.data.iter().all(|&x| x >= 0.0));
            assert!(v.data.iter().all(|&x| x >= 0.0));
        }
        assert!(model.consensus_u.data.iter().all(|&x| x >= 0.0));
        assert!(model.consensus_v.data.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn unit_attenuation_makes_consensus_the_plain_mean() {
        let mut rng = stream_rng(12, 0);
        let mats: Vec<Array2<f64>> = (0..3)
            .map(|_| Array2::from_shape_fn((4, 4), |_| f64::from(rng.gen_bool(0.5))))
            .collect();
        let cfg = NmfConfig { attenuation: 1.0, ..small_cfg(2, 1) };
        let model = fit_consensus_nmf(&mats, &cfg).unwrap();
        let mean = model
            .factors
            .iter()
            .fold(Array2::<f64>::zeros((4, 2)), |acc, (u, _)| acc + u.to_array())
            / 3.0;
        let consensus = model.consensus_u.to_array();
        for (a, b) in mean.iter().zip(consensus.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn cosine_scores_match_known_geometry() {
        let model = NmfModel {
            factors: vec![],
            consensus_u: MatrixData { rows: 4, cols: 2, data: vec![0.0; 8] },
            // Columns: (1,1), (1,0), (2,2), (0,0).
            consensus_v: MatrixData {
                rows: 2,
                cols: 4,
                data: vec![1.0, 1.0, 2.0, 0.0, 1.0, 0.0, 2.0, 0.0],
            },
            attenuation: 0.9,
            rank: 2,
            final_loss: 0.0,
            loss_history: vec![0.0],
            converged: true,
        };
        let scores = nmf_scores(&model);
        // Parallel non-zero vectors score 1.
        assert_relative_eq!(scores.get(0, 2), 1.0, epsilon = 1e-12);
        // (1,1) vs (1,0): 1/sqrt(2).
        assert_relative_eq!(scores.get(0, 1), 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
        // Zero vector scores 0 against everything.
        assert_eq!(scores.get(0, 3), 0.0);
        assert_eq!(scores.get(2, 3), 0.0);
    }

    #[test]
    fn orthogonal_supports_score_zero() {
        let model = NmfModel {
            factors: vec![],
            consensus_u: MatrixData { rows: 2, cols: 2, data: vec![0.0; 4] },
            consensus_v: MatrixData { rows: 2, cols: 2, data: vec![3.0, 0.0, 0.0, 2.0] },
            attenuation: 0.9,
            rank: 2,
            final_loss: 0.0,
            loss_history: vec![0.0],
            converged: true,
        };
        assert_eq!(nmf_scores(&model).get(0, 1), 0.0);
    }

    #[test]
    fn single_step_rollout_is_binarized_scores() {
        let net = two_clique_net();
        let model = fit_temporal_nmf(&net, 3, &small_cfg(2, 7)).unwrap();
        let rho = 0.3;
        let rolled = nmf_rollout(&model, &net, 3, 1, rho, &small_cfg(2, 7)).unwrap();
        assert_eq!(rolled.snapshots.len(), 1);
        assert_eq!(rolled.snapshots[0], binarize(&nmf_scores(&model), rho).unwrap());
    }

    fn two_clique_net() -> TemporalNetwork {
        // Static network: two disjoint 4-cliques, repeated.
        let mut edges = Vec::new();
        for block in 0..2usize {
            for i in 0..4usize {
                for j in i + 1..4 {
                    edges.push((block * 4 + i, block * 4 + j));
                }
            }
        }
        let snap = Snapshot::from_edges(8, edges).unwrap();
        TemporalNetwork::new(vec![snap.clone(), snap.clone(), snap]).unwrap()
    }

    #[test]
    fn static_structure_is_recovered_by_rollout() {
        let net = two_clique_net();
        let cfg = NmfConfig { restarts: 10, max_iters: 500, seed: 2, ..NmfConfig::new(2) };
        let model = fit_temporal_nmf(&net, 3, &cfg).unwrap();
        // Historical density: 12 edges out of 28 pairs.
        let rho = net.density_profile(3, 0.9).unwrap().weighted;
        let rolled = nmf_rollout(&model, &net, 3, 2, rho, &cfg).unwrap();
        assert_eq!(rolled.edges_per_step, 12);
        for snap in &rolled.snapshots {
            assert_eq!(snap.edges(), net.snapshot(0).edges());
        }
    }

    #[test]
    fn warm_started_refit_descends_from_its_initialization() {
        let net = two_clique_net();
        let cfg = small_cfg(2, 4);
        let model = fit_temporal_nmf(&net, 3, &cfg).unwrap();
        let mut mats: Vec<Array2<f64>> =
            net.snapshots().iter().map(snapshot_to_matrix).collect();
        mats.push(snapshot_to_matrix(net.snapshot(0)));
        let refit = refit_extended(&mats, &model, &cfg).unwrap();
        let warm_start_loss = refit.loss_history[0];
        assert!(refit.final_loss <= warm_start_loss + 1e-10);
    }

    #[test]
    fn rejects_invalid_configs() {
        let mats = vec![Array2::<f64>::zeros((4, 4))];
        assert!(fit_consensus_nmf(&mats, &NmfConfig::new(0)).is_err());
        assert!(fit_consensus_nmf(&mats, &NmfConfig::new(4)).is_err());
        let mut bad = NmfConfig::new(2);
        bad.attenuation = 0.0;
        assert!(fit_consensus_nmf(&mats, &bad).is_err());
        let negative = vec![Array2::from_elem((3, 3), -1.0)];
        assert!(fit_consensus_nmf(&negative, &NmfConfig::new(1)).is_err());
    }

    #[test]
    fn model_round_trips_through_json() {
        let net = two_clique_net();
        let model = fit_temporal_nmf(&net, 2, &small_cfg(2, 9)).unwrap();
        let back = NmfModel::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(back.consensus_v, model.consensus_v);
        assert_eq!(back.final_loss, model.final_loss);
    }
}
