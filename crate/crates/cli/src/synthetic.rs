//! Bundled synthetic dataset: a planted stable-hub temporal model. A few
//! fixed hub nodes keep a high degree in every snapshot (with churning
//! partners) on top of a bed of random churning edges, so historical
//! aggregation is informative about future influence.

use rand::Rng;
use serde::{Deserialize, Serialize};

use exante_core::graph::{Snapshot, TemporalNetwork};
use exante_core::rng::{seed_for, stream_rng};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub n: usize,
    pub t: usize,
    /// Number of planted hub nodes (ids `0..hubs`).
    pub hubs: usize,
    /// Edges attached to each hub in every snapshot.
    pub hub_degree: usize,
    /// Random background edges resampled in every snapshot.
    pub churn_edges: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig { n: 100, t: 20, hubs: 5, hub_degree: 12, churn_edges: 60, seed: 1 }
    }
}

pub fn generate(cfg: &SyntheticConfig) -> TemporalNetwork {
    assert!(cfg.hubs < cfg.n, "hub count must be below the node count");
    assert!(cfg.hub_degree < cfg.n, "hub degree must be below the node count");
    assert!(cfg.t >= 1, "need at least one snapshot");
    let base = seed_for(cfg.seed, "synthetic-stable-hub");
    let snapshots: Vec<Snapshot> = (0..cfg.t)
        .map(|t| {
            let mut rng = stream_rng(base, t as u64);
            let mut edges = std::collections::BTreeSet::new();
            for hub in 0..cfg.hubs {
                while edges.iter().filter(|&&(a, b)| a == hub || b == hub).count()
                    < cfg.hub_degree
                {
                    let other = rng.gen_range(0..cfg.n - 1);
                    let other = if other >= hub { other + 1 } else { other };
                    edges.insert((hub.min(other), hub.max(other)));
                }
            }
            let mut churn_added = 0;
            while churn_added < cfg.churn_edges {
                let i = rng.gen_range(0..cfg.n);
                let j = rng.gen_range(0..cfg.n);
                if i != j && edges.insert((i.min(j), i.max(j))) {
                    churn_added += 1;
                }
            }
            Snapshot::from_edges(cfg.n, edges).unwrap()
        })
        .collect();
    TemporalNetwork::new(snapshots).unwrap()
}
