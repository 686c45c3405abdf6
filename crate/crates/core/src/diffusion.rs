//! SI spreading on a temporal network: a Monte Carlo estimator of the
//! expected influence spread and an exact enumeration oracle for tiny
//! instances.
//!
//! Diffusion and graph evolution run in lockstep: at step `t` every
//! susceptible node with at least one infected neighbor in snapshot `t`
//! becomes infected with probability `1 - (1 - lambda)^m` (one independent
//! Bernoulli(lambda) attempt per infected neighbor), and newly infected
//! nodes start transmitting at step `t + 1`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, TemporalNetwork};
use crate::rng::stream_rng;

/// Parameters of one spreading experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionConfig {
    /// Per-contact, per-step infection probability.
    pub lambda: f64,
    /// Zero-based snapshot index at which the seeds are infected.
    pub start_t: usize,
    /// Zero-based index of the last snapshot on which spreading occurs.
    pub end_t: usize,
    /// Number of Monte Carlo runs.
    pub mc_runs: usize,
    /// Master seed; run `r` uses ChaCha stream `r` of this seed.
    pub rng_seed: u64,
}

impl DiffusionConfig {
    /// Spread over every snapshot of a network.
    pub fn full_window(net: &TemporalNetwork, lambda: f64, mc_runs: usize, rng_seed: u64) -> Self {
        DiffusionConfig { lambda, start_t: 0, end_t: net.len() - 1, mc_runs, rng_seed }
    }

    fn validate(&self, net: &TemporalNetwork) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        if self.start_t > self.end_t {
            return Err(Error::InvalidRange { start: self.start_t, end: self.end_t });
        }
        if self.end_t >= net.len() {
            return Err(Error::SnapshotOutOfRange { index: self.end_t, len: net.len() });
        }
        if self.mc_runs == 0 {
            return Err(Error::InvalidParameter("mc_runs must be at least 1".into()));
        }
        Ok(())
    }
}

/// A set of seed nodes, stored sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSet {
    nodes: Vec<NodeId>,
}

impl SeedSet {
    pub fn new(mut nodes: Vec<NodeId>, n: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptySeedSet);
        }
        nodes.sort_unstable();
        for w in nodes.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateSeed(w[0]));
            }
        }
        if let Some(&last) = nodes.last() {
            if last >= n {
                return Err(Error::NodeOutOfRange { node: last, n });
            }
        }
        Ok(SeedSet { nodes })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn k(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }
}

/// Monte Carlo estimate of the influence spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionOutcome {
    /// Mean number of infected nodes after the final step.
    pub mean_spread: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    /// Final infected count of every run, in run order.
    pub per_run_final_counts: Vec<u32>,
}

/// One SI step on a single snapshot: returns the nodes newly infected from
/// `infected` through the adjacency `adj`.
fn si_step<R: Rng>(
    adj: &[Vec<NodeId>],
    infected: &[bool],
    lambda: f64,
    rng: &mut R,
) -> Vec<NodeId> {
    let mut newly = Vec::new();
    for (v, neighbors) in adj.iter().enumerate() {
        if infected[v] {
            continue;
        }
        let m = neighbors.iter().filter(|&&u| infected[u]).count();
        if m == 0 {
            continue;
        }
        let p_infect = 1.0 - (1.0 - lambda).powi(m as i32);
        if rng.gen::<f64>() < p_infect {
            newly.push(v);
        }
    }
    newly
}

fn run_once<R: Rng>(
    adjacencies: &[Vec<Vec<NodeId>>],
    n: usize,
    seeds: &SeedSet,
    lambda: f64,
    rng: &mut R,
) -> u32 {
    let mut infected = vec![false; n];
    let mut count = 0u32;
    for &s in seeds.nodes() {
        infected[s] = true;
        count += 1;
    }
    for adj in adjacencies {
        let newly = si_step(adj, &infected, lambda, rng);
        for v in newly {
            infected[v] = true;
            count += 1;
        }
    }
    count
}

/// Monte Carlo estimate of sigma(S): run the SI process `cfg.mc_runs` times
/// over snapshots `cfg.start_t..=cfg.end_t` and average the final infected
/// counts. Runs are distributed across workers; results are bit-identical
/// for a fixed `rng_seed` regardless of worker count.
pub fn simulate_si(
    net: &TemporalNetwork,
    seeds: &SeedSet,
    cfg: &DiffusionConfig,
) -> Result<DiffusionOutcome> {
    cfg.validate(net)?;
    let n = net.n();
    if let Some(&node) = seeds.nodes().iter().find(|&&v| v >= n) {
        return Err(Error::NodeOutOfRange { node, n });
    }
    let adjacencies: Vec<Vec<Vec<NodeId>>> = net.snapshots()[cfg.start_t..=cfg.end_t]
        .iter()
        .map(|s| s.adjacency())
        .collect();

    let counts: Vec<u32> = (0..cfg.mc_runs as u64)
        .into_par_iter()
        .map(|run| {
            let mut rng = stream_rng(cfg.rng_seed, run);
            run_once(&adjacencies, n, seeds, cfg.lambda, &mut rng)
        })
        .collect();

    let runs = counts.len() as f64;
    let mean = counts.iter().map(|&c| f64::from(c)).sum::<f64>() / runs;
    let stderr = if counts.len() < 2 {
        0.0
    } else {
        let var = counts.iter().map(|&c| (f64::from(c) - mean).powi(2)).sum::<f64>()
            / (runs - 1.0);
        (var / runs).sqrt()
    };
    Ok(DiffusionOutcome { mean_spread: mean, stderr, per_run_final_counts: counts })
}

/// Exact sigma(S) by dynamic programming over the distribution of infected
/// sets. Guarded to tiny instances: `n <= 20` and at most 7 snapshots in the
/// window.
pub fn exact_sigma(
    net: &TemporalNetwork,
    seeds: &SeedSet,
    lambda: f64,
    start_t: usize,
    end_t: usize,
) -> Result<f64> {
    let n = net.n();
    if n > 20 {
        return Err(Error::InstanceTooLarge(format!("{n} nodes (limit 20)")));
    }
    if start_t > end_t {
        return Err(Error::InvalidRange { start: start_t, end: end_t });
    }
    if end_t - start_t > 6 {
        return Err(Error::InstanceTooLarge(format!(
            "{} steps (limit 7)",
            end_t - start_t + 1
        )));
    }
    if end_t >= net.len() {
        return Err(Error::SnapshotOutOfRange { index: end_t, len: net.len() });
    }
    if let Some(&node) = seeds.nodes().iter().find(|&&v| v >= n) {
        return Err(Error::NodeOutOfRange { node, n });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda must lie in [0, 1], got {lambda}")));
    }

    let seed_mask: u32 = seeds.nodes().iter().fold(0, |m, &v| m | (1 << v));
    // BTreeMap keeps the accumulation order fixed, so results are bit-stable.
    let mut dist: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
    dist.insert(seed_mask, 1.0);

    for t in start_t..=end_t {
        let adj = net.snapshot(t).adjacency();
        let mut next: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
        for (&mask, &prob) in &dist {
            // Infection probability for each exposed susceptible node.
            let exposed: Vec<(u32, f64)> = (0..n)
                .filter(|v| mask & (1 << v) == 0)
                .filter_map(|v| {
                    let m = adj[v].iter().filter(|&&u| mask & (1 << u) != 0).count();
                    if m == 0 {
                        None
                    } else {
                        Some((v as u32, 1.0 - (1.0 - lambda).powi(m as i32)))
                    }
                })
                .collect();
            for subset in 0u32..(1 << exposed.len()) {
                let mut p = prob;
                let mut new_mask = mask;
                for (idx, &(v, p_inf)) in exposed.iter().enumerate() {
                    if subset & (1 << idx) != 0 {
                        p *= p_inf;
                        new_mask |= 1 << v;
                    } else {
                        p *= 1.0 - p_inf;
                    }
                }
                if p > 0.0 {
                    *next.entry(new_mask).or_insert(0.0) += p;
                }
            }
        }
        dist = next;
    }

    Ok(dist.iter().map(|(&mask, &p)| p * f64::from(mask.count_ones())).sum())
}
