//! Declarative description of one pipeline run: dataset, observation split,
//! diffusion parameters, method, and hyperparameters.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use exante_core::events::BinScheme;

use crate::synthetic::SyntheticConfig;

/// Seed-selection strategy id, as used on the CLI and in result tables.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Selects on the true future snapshots.
    Oracle,
    /// Replicates the last observed snapshot.
    StaticLast,
    /// Replicates the union of all observed snapshots.
    StaticMem,
    /// Iterated Jaccard-coefficient evolution.
    Jc,
    /// Logistic-LASSO rollout, binarized at the weighted density.
    LogReg,
    /// Score-sum over the one-step logistic-LASSO probabilities.
    LogRegSum,
    /// Temporal consensus NMF rollout, binarized at the weighted density.
    Nmf,
    /// Score-sum over the NMF consensus similarities.
    NmfSum,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Oracle,
        Method::StaticLast,
        Method::StaticMem,
        Method::Jc,
        Method::LogReg,
        Method::LogRegSum,
        Method::Nmf,
        Method::NmfSum,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::StaticLast => "static-last",
            Method::StaticMem => "static-mem",
            Method::Jc => "jc",
            Method::LogReg => "logreg",
            Method::LogRegSum => "logreg-sum",
            Method::Nmf => "nmf",
            Method::NmfSum => "nmf-sum",
        }
    }

    /// Score-sum heuristics skip the prediction-then-IM route entirely.
    pub fn is_score_sum(self) -> bool {
        matches!(self, Method::LogRegSum | Method::NmfSum)
    }

    /// Static methods forecast a single repeated graph.
    pub fn is_static(self) -> bool {
        matches!(self, Method::StaticLast | Method::StaticMem)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Influence-maximization algorithm applied to the predicted window.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum ImAlgorithm {
    Greedy,
    #[clap(name = "dyndeg")]
    #[serde(rename = "dyndeg")]
    DynDeg,
}

impl ImAlgorithm {
    pub fn id(self) -> &'static str {
        match self {
            ImAlgorithm::Greedy => "greedy",
            ImAlgorithm::DynDeg => "dyndeg",
        }
    }
}

impl std::fmt::Display for ImAlgorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Where the temporal network comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DatasetSource {
    /// `timestamp u v` event list, aggregated into `n_bins` snapshots.
    Events { path: String, n_bins: usize, scheme: BinScheme },
    /// Canonical `n T` / `t i j` snapshot file.
    Snapshots { path: String },
    /// Bundled stable-hub generator; runs entirely offline.
    Synthetic(SyntheticConfig),
}

impl DatasetSource {
    /// Short label used in result tables.
    pub fn label(&self) -> String {
        match self {
            DatasetSource::Events { path, .. } | DatasetSource::Snapshots { path } => {
                std::path::Path::new(path)
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.clone())
            }
            DatasetSource::Synthetic(cfg) => format!("synthetic-n{}-t{}", cfg.n, cfg.t),
        }
    }
}

/// Model hyperparameters; defaults follow the experiment protocol (25 NMF
/// restarts, latent dimension 5% of n, 20-point penalty grid).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparameters {
    /// Density recency decay for the binarization threshold.
    pub xi: f64,
    /// NMF attenuation.
    pub phi: f64,
    /// NMF latent dimension; `None` means `max(1, round(0.05 n))`.
    pub nmf_rank: Option<usize>,
    pub nmf_restarts: usize,
    pub nmf_max_iters: usize,
    /// L1 penalty grid for the logistic model.
    pub alpha_grid: Vec<f64>,
    /// Fraction of transitions held out for penalty selection.
    pub val_fraction: f64,
    pub jc_add_frac: f64,
    pub jc_remove_frac: f64,
    /// Monte Carlo runs per sigma evaluation inside greedy selection.
    pub select_mc_runs: usize,
}

pub fn default_alpha_grid() -> Vec<f64> {
    (0..20).map(|i| 10f64.powf(-4.0 + 5.0 * i as f64 / 19.0)).collect()
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            xi: 0.9,
            phi: 0.9,
            nmf_rank: None,
            nmf_restarts: 25,
            nmf_max_iters: 500,
            alpha_grid: default_alpha_grid(),
            val_fraction: 0.25,
            jc_add_frac: 0.05,
            jc_remove_frac: 0.05,
            select_mc_runs: 200,
        }
    }
}

/// One experiment: observe `p` of `t` snapshots, predict, select `k` seeds,
/// evaluate on the true remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub dataset: DatasetSource,
    pub p: usize,
    pub t: usize,
    pub lambda: f64,
    pub k: usize,
    pub method: Method,
    pub im_algorithm: ImAlgorithm,
    pub mc_runs: usize,
    pub rng_seed: u64,
    pub hyper: Hyperparameters,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.p < 1 {
            return Err("p must be at least 1".into());
        }
        if self.p >= self.t {
            return Err(format!("need p < T, got p = {}, T = {}", self.p, self.t));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(format!("lambda must lie in [0, 1], got {}", self.lambda));
        }
        if self.k < 1 {
            return Err("k must be at least 1".into());
        }
        if self.mc_runs < 1 {
            return Err("mc_runs must be at least 1".into());
        }
        if matches!(self.method, Method::LogReg | Method::LogRegSum) && self.p < 3 {
            return Err("logistic-LASSO methods need p >= 3 for the temporal split".into());
        }
        Ok(())
    }

    /// Stable content hash of the full spec; identical specs always share a
    /// fingerprint and any field change produces a new one.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(self).expect("spec serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}

/// Per-dataset defaults from the experiment protocol: `(lambda, p, T)`.
pub fn dataset_preset(name: &str) -> Option<(f64, usize, usize)> {
    match name {
        "reality" => Some((0.10, 20, 24)),
        "email4" => Some((0.05, 30, 39)),
        "hs1" | "highschool1" => Some((0.10, 16, 20)),
        "hospital" => Some((0.10, 12, 16)),
        "office" => Some((0.10, 6, 7)),
        "copenb" | "copenhagen" => Some((0.05, 90, 100)),
        "college" => Some((0.25, 40, 50)),
        _ => None,
    }
}
