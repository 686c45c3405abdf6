//! Temporal graph data model: snapshots over a fixed node set plus the
//! density statistics used when thresholding predicted edges.

use crate::error::{Error, Result};

/// Dense node index, stable across every snapshot of one network.
pub type NodeId = usize;

/// One undirected graph snapshot. Edges are stored canonically as `(i, j)`
/// with `i < j`, sorted and deduplicated; no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
}

impl Snapshot {
    /// Empty snapshot on `n` nodes.
    pub fn empty(n: usize) -> Self {
        Snapshot { n, edges: Vec::new() }
    }

    /// Build a snapshot from an edge iterator. Pairs are canonicalized to
    /// `i < j` and deduplicated; self-loops and out-of-range nodes are
    /// rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let node = u.max(v);
            if node >= n {
                return Err(Error::NodeOutOfRange { node, n });
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Snapshot { n, edges: canon })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical sorted edge list.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        if u == v {
            return false;
        }
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// Edge density `|E| / C(n, 2)`; zero for networks too small to have edges.
    pub fn density(&self) -> f64 {
        let pairs = self.n * self.n.saturating_sub(1) / 2;
        if pairs == 0 {
            0.0
        } else {
            self.edges.len() as f64 / pairs as f64
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Sorted neighbor lists for all nodes.
    pub fn adjacency(&self) -> Vec<Vec<NodeId>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }
}

/// Recency-weighted edge density over an observation window.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    /// Per-snapshot density for `t = 1..=upto`.
    pub per_snapshot: Vec<f64>,
    /// Weighted average density: more recent snapshots weigh more.
    pub weighted: f64,
    /// Decay factor used for the weights.
    pub decay: f64,
}

/// An ordered sequence of undirected snapshots over a fixed node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalNetwork {
    snapshots: Vec<Snapshot>,
}

impl TemporalNetwork {
    /// Wrap a nonempty snapshot sequence; all snapshots must share one node count.
    pub fn new(snapshots: Vec<Snapshot>) -> Result<Self> {
        let first = snapshots.first().ok_or(Error::EmptyNetwork)?;
        let n = first.n();
        for s in &snapshots {
            if s.n() != n {
                return Err(Error::NodeCountMismatch(n, s.n()));
            }
        }
        Ok(TemporalNetwork { snapshots })
    }

    pub fn n(&self) -> usize {
        self.snapshots[0].n()
    }

    /// Number of snapshots T.
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor guarantees at least one snapshot
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    /// Zero-based access to one snapshot.
    pub fn snapshot(&self, t: usize) -> &Snapshot {
        &self.snapshots[t]
    }

    /// Copy of the snapshots in `range` as a standalone network.
    pub fn window(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end >= self.len() {
            return Err(Error::InvalidRange { start, end });
        }
        TemporalNetwork::new(self.snapshots[start..=end].to_vec())
    }

    /// Union graph over the first `upto` snapshots: an edge is present iff it
    /// appears in any of them.
    pub fn memory_graph(&self, upto: usize) -> Result<Snapshot> {
        if upto < 1 || upto > self.len() {
            return Err(Error::SnapshotOutOfRange { index: upto, len: self.len() });
        }
        let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
        for s in &self.snapshots[..upto] {
            edges.extend_from_slice(s.edges());
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Snapshot { n: self.n(), edges })
    }

    /// Number of distinct node pairs with at least one edge anywhere in time.
    pub fn unique_links(&self) -> usize {
        self.memory_graph(self.len())
            .map(|g| g.edge_count())
            .unwrap_or(0)
    }

    /// Per-snapshot densities over the first `upto` snapshots plus their
    /// decay-weighted mean. Weight for snapshot `t` (1-based) is
    /// `xi^(upto - t)`, with `0^0 = 1` so `xi = 0` keeps only the last
    /// snapshot and `xi = 1` gives the plain mean.
    pub fn density_profile(&self, upto: usize, xi: f64) -> Result<DensityProfile> {
        if self.n() < 2 {
            return Err(Error::TooFewNodes);
        }
        if upto < 1 || upto > self.len() {
            return Err(Error::SnapshotOutOfRange { index: upto, len: self.len() });
        }
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::InvalidParameter(format!(
                "density decay must lie in [0, 1], got {xi}"
            )));
        }
        let per_snapshot: Vec<f64> = self.snapshots[..upto].iter().map(|s| s.density()).collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for (idx, rho) in per_snapshot.iter().enumerate() {
            let w = xi.powi((upto - 1 - idx) as i32);
            num += w * rho;
            den += w;
        }
        Ok(DensityProfile { per_snapshot, weighted: num / den, decay: xi })
    }
}
