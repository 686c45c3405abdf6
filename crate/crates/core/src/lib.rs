//! Ex ante influence maximization on temporal networks.
//!
//! The crate models a network as an ordered sequence of undirected snapshots
//! over a fixed node set. Given only the first `p` snapshots, link-prediction
//! models forecast the remaining ones, seed-selection algorithms pick `k`
//! seed nodes on the forecast, and an SI Monte Carlo simulator scores the
//! selection on the true future snapshots.
//!
//! Modules:
//! - [`graph`], [`events`], [`io`]: the temporal graph data model, event-log
//!   aggregation, and file formats.
//! - [`diffusion`]: SI spreading (Monte Carlo estimator plus an exact oracle
//!   for tiny instances).
//! - [`select`]: greedy, dynamic degree discount, static degree discount, and
//!   score-sum seed selection.
//! - [`linkpred`]: logistic-LASSO and temporal consensus NMF link prediction,
//!   Jaccard evolution, and density-preserving binarization.

pub mod diffusion;
pub mod error;
pub mod events;
pub mod graph;
pub mod io;
pub mod linkpred;
pub mod rng;
pub mod select;

pub use diffusion::{exact_sigma, simulate_si, DiffusionConfig, DiffusionOutcome, SeedSet};
pub use error::{Error, Result};
pub use events::{BinScheme, RawEventLog};
pub use graph::{DensityProfile, NodeId, Snapshot, TemporalNetwork};
pub use linkpred::{
    binarize, fit_lasso_logit, fit_temporal_nmf, jaccard_evolve, lasso_rollout, nmf_rollout,
    nmf_scores, LassoLogitModel, NmfConfig, NmfModel, PairIndex, PredictedFuture, ScoreKind,
    ScoreMatrix,
};
pub use select::{
    dyn_deg_discount, dynamic_degree, greedy_select, score_sum_select, static_degree_discount,
    ExactSigma, InfluenceEstimator, McSigma,
};
