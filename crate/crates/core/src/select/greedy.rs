//! Greedy influence maximization: repeatedly add the node with the largest
//! marginal gain in estimated spread.

use rayon::prelude::*;

use crate::diffusion::{exact_sigma, simulate_si, DiffusionConfig, SeedSet};
use crate::error::{Error, Result};
use crate::graph::{NodeId, TemporalNetwork};

/// Influence-spread estimator used inside the greedy loop.
pub trait InfluenceEstimator: Sync {
    fn sigma(&self, net: &TemporalNetwork, seeds: &SeedSet, cfg: &DiffusionConfig) -> Result<f64>;
}

/// Monte Carlo estimator. All candidate evaluations within one greedy step
/// reuse the same run streams (common random numbers), which removes
/// between-candidate sampling noise from the argmax.
pub struct McSigma;

impl InfluenceEstimator for McSigma {
    fn sigma(&self, net: &TemporalNetwork, seeds: &SeedSet, cfg: &DiffusionConfig) -> Result<f64> {
        Ok(simulate_si(net, seeds, cfg)?.mean_spread)
    }
}

/// Exact estimator for tiny instances.
pub struct ExactSigma;

impl InfluenceEstimator for ExactSigma {
    fn sigma(&self, net: &TemporalNetwork, seeds: &SeedSet, cfg: &DiffusionConfig) -> Result<f64> {
        exact_sigma(net, seeds, cfg.lambda, cfg.start_t, cfg.end_t)
    }
}

/// Greedy seed selection over the whole node set.
pub fn greedy_select(
    net: &TemporalNetwork,
    k: usize,
    estimator: &dyn InfluenceEstimator,
    cfg: &DiffusionConfig,
) -> Result<SeedSet> {
    let candidates: Vec<NodeId> = (0..net.n()).collect();
    greedy_select_among(net, k, &candidates, estimator, cfg)
}

/// Greedy seed selection restricted to `candidates`. At each of `k` steps the
/// candidate with the largest marginal gain `sigma(S + u) - sigma(S)` joins
/// the seed set; ties break toward the lowest node id. Candidate evaluations
/// run in parallel; the argmax reduction is index-ordered and deterministic.
pub fn greedy_select_among(
    net: &TemporalNetwork,
    k: usize,
    candidates: &[NodeId],
    estimator: &dyn InfluenceEstimator,
    cfg: &DiffusionConfig,
) -> Result<SeedSet> {
    let order = greedy_extend(net, Vec::new(), k, candidates, estimator, cfg)?;
    SeedSet::new(order, net.n())
}

/// Continue a greedy selection from an existing pick order up to `k_target`
/// picks. Greedy is incremental, so the first `k` picks are identical no
/// matter what target they were computed toward; callers sweeping over seed
/// sizes can select once and slice prefixes.
pub fn greedy_extend(
    net: &TemporalNetwork,
    mut chosen: Vec<NodeId>,
    k_target: usize,
    candidates: &[NodeId],
    estimator: &dyn InfluenceEstimator,
    cfg: &DiffusionConfig,
) -> Result<Vec<NodeId>> {
    let n = net.n();
    if k_target > candidates.len() || k_target > n {
        return Err(Error::SeedCountExceedsNodes { k: k_target, n: candidates.len().min(n) });
    }
    if k_target == 0 {
        return Err(Error::EmptySeedSet);
    }
    if let Some(&node) = candidates.iter().find(|&&v| v >= n) {
        return Err(Error::NodeOutOfRange { node, n });
    }

    while chosen.len() < k_target {
        let evals: Vec<(NodeId, f64)> = candidates
            .par_iter()
            .filter(|&&u| !chosen.contains(&u))
            .map(|&u| {
                let mut trial = chosen.clone();
                trial.push(u);
                let seeds = SeedSet::new(trial, n)?;
                Ok((u, estimator.sigma(net, &seeds, cfg)?))
            })
            .collect::<Result<_>>()?;
        // Candidates arrive in ascending id order; strict comparison keeps
        // the lowest id on ties.
        let mut best: Option<(NodeId, f64)> = None;
        for (u, sigma) in evals {
            if best.map_or(true, |(_, s)| sigma > s) {
                best = Some((u, sigma));
            }
        }
        chosen.push(best.expect("at least one unchosen candidate").0);
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Snapshot;

    fn net(n: usize, snaps: &[&[(usize, usize)]]) -> TemporalNetwork {
        TemporalNetwork::new(
            snaps
                .iter()
                .map(|e| Snapshot::from_edges(n, e.iter().copied()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn exact_cfg(net: &TemporalNetwork, lambda: f64) -> DiffusionConfig {
        DiffusionConfig::full_window(net, lambda, 1, 0)
    }

    #[test]
    fn star_center_wins_for_k_one() {
        let g = net(5, &[&[(2, 0), (2, 1), (2, 3), (2, 4)]]);
        let cfg = exact_cfg(&g, 0.3);
        let seeds = greedy_select(&g, 1, &ExactSigma, &cfg).unwrap();
        assert_eq!(seeds.nodes(), &[2]);
    }

    #[test]
    fn zero_lambda_falls_to_tie_break() {
        let g = net(5, &[&[(0, 1), (2, 3)], &[(1, 4)]]);
        let cfg = exact_cfg(&g, 0.0);
        let seeds = greedy_select(&g, 3, &ExactSigma, &cfg).unwrap();
        assert_eq!(seeds.nodes(), &[0, 1, 2]);
    }

    #[test]
    fn spread_non_decreasing_in_k() {
        let g = net(6, &[&[(0, 1), (1, 2), (3, 4)], &[(2, 3), (4, 5)]]);
        let cfg = exact_cfg(&g, 0.5);
        let mut prev = 0.0;
        for k in 1..=4 {
            let seeds = greedy_select(&g, k, &ExactSigma, &cfg).unwrap();
            assert_eq!(seeds.k(), k);
            let sigma = exact_sigma(&g, &seeds, 0.5, 0, 1).unwrap();
            assert!(sigma >= prev - 1e-12, "k={k}: {sigma} < {prev}");
            prev = sigma;
        }
    }

    #[test]
    fn deterministic_with_mc_estimator() {
        let g = net(6, &[&[(0, 1), (1, 2), (2, 3)], &[(3, 4), (4, 5)]]);
        let cfg = DiffusionConfig::full_window(&g, 0.4, 300, 11);
        let a = greedy_select(&g, 2, &McSigma, &cfg).unwrap();
        let b = greedy_select(&g, 2, &McSigma, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_oversized_k() {
        let g = net(3, &[&[(0, 1)]]);
        let cfg = exact_cfg(&g, 0.2);
        assert!(greedy_select(&g, 4, &ExactSigma, &cfg).is_err());
    }
}
