//! Summary statistics and temporal measures for a dataset, mirroring the
//! columns of the datasets table: node count, unique links, mean density,
//! snapshot count, presence fractions, and degree assortativity.

use serde::{Deserialize, Serialize};

use exante_core::graph::TemporalNetwork;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n: usize,
    /// Unique links over all snapshots.
    pub m: usize,
    pub t: usize,
    /// Mean per-snapshot edge density.
    pub mean_density: f64,
    /// Fraction of nodes seen in the first half of the snapshots.
    pub f_nt: f64,
    /// Fraction of unique links seen in the first half of the snapshots.
    pub f_lt: f64,
    /// Fraction of nodes present in both the first and last 5% of snapshots.
    pub f_nt_ends: f64,
    /// Fraction of unique links present in both the first and last 5%.
    pub f_lt_ends: f64,
    /// Degree assortativity of the time-aggregated graph; `None` when it is
    /// undefined (fewer than two edges or zero degree variance).
    pub degree_assortativity: Option<f64>,
}

fn presence(net: &TemporalNetwork, range: std::ops::Range<usize>) -> (Vec<bool>, Vec<(usize, usize)>) {
    let mut nodes = vec![false; net.n()];
    let mut links = std::collections::BTreeSet::new();
    for t in range {
        for &(i, j) in net.snapshot(t).edges() {
            nodes[i] = true;
            nodes[j] = true;
            links.insert((i, j));
        }
    }
    (nodes, links.into_iter().collect())
}

pub fn dataset_stats(net: &TemporalNetwork) -> DatasetStats {
    let t = net.len();
    let n = net.n();
    let aggregated = net.memory_graph(t).expect("t >= 1");
    let m = aggregated.edge_count();
    let mean_density =
        net.snapshots().iter().map(|s| s.density()).sum::<f64>() / t as f64;

    let half = t.div_ceil(2);
    let (half_nodes, half_links) = presence(net, 0..half);
    let active_total = {
        let (all_nodes, _) = presence(net, 0..t);
        all_nodes.iter().filter(|&&x| x).count().max(1)
    };
    let f_nt = half_nodes.iter().filter(|&&x| x).count() as f64 / active_total as f64;
    let f_lt = if m == 0 { 0.0 } else { half_links.len() as f64 / m as f64 };

    let tail = t.div_ceil(20).max(1);
    let (first_nodes, first_links) = presence(net, 0..tail);
    let (last_nodes, last_links) = presence(net, t - tail..t);
    let both_nodes = first_nodes
        .iter()
        .zip(&last_nodes)
        .filter(|(&a, &b)| a && b)
        .count();
    let f_nt_ends = both_nodes as f64 / active_total as f64;
    let last_set: std::collections::BTreeSet<_> = last_links.into_iter().collect();
    let both_links = first_links.iter().filter(|e| last_set.contains(e)).count();
    let f_lt_ends = if m == 0 { 0.0 } else { both_links as f64 / m as f64 };

    let degrees = aggregated.degrees();
    let samples: Vec<(f64, f64)> = aggregated
        .edges()
        .iter()
        .flat_map(|&(u, v)| {
            [
                (degrees[u] as f64, degrees[v] as f64),
                (degrees[v] as f64, degrees[u] as f64),
            ]
        })
        .collect();
    let degree_assortativity = pearson(&samples);

    DatasetStats {
        n,
        m,
        t,
        mean_density,
        f_nt,
        f_lt,
        f_nt_ends,
        f_lt_ends,
        degree_assortativity,
    }
}

fn pearson(samples: &[(f64, f64)]) -> Option<f64> {
    if samples.len() < 2 {
        return None;
    }
    let len = samples.len() as f64;
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / len;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / len;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for &(x, y) in samples {
        cov += (x - mean_x) * (y - mean_y);
        var_x += (x - mean_x).powi(2);
        var_y += (y - mean_y).powi(2);
    }
    if var_x == 0.0 || var_y == 0.0 {
        return None;
    }
    Some(cov / (var_x.sqrt() * var_y.sqrt()))
}
