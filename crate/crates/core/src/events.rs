//! Timestamped contact events and their aggregation into snapshot sequences.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Snapshot, TemporalNetwork};

/// One recorded contact between two labeled endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub u: String,
    pub v: String,
}

/// A raw, unaggregated list of contact events with arbitrary node labels.
#[derive(Debug, Clone, Default)]
pub struct RawEventLog {
    pub events: Vec<Event>,
}

/// How event timestamps are divided into snapshot bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinScheme {
    /// Evenly spaced time intervals; half-open bins, final bin closed so the
    /// maximum timestamp is included.
    EqualTime,
    /// Contiguous groups of distinct timestamps with near-equal counts;
    /// events sharing a timestamp always land in the same bin.
    EqualCount,
}

impl RawEventLog {
    pub fn new(events: Vec<Event>) -> Self {
        RawEventLog { events }
    }

    pub fn push(&mut self, time: f64, u: impl Into<String>, v: impl Into<String>) {
        self.events.push(Event { time, u: u.into(), v: v.into() });
    }

    /// Distinct endpoint labels, sorted. Labels sort numerically when every
    /// label parses as an integer, lexicographically otherwise, so the
    /// label-to-index map is deterministic across runs.
    pub fn sorted_labels(&self) -> Vec<String> {
        let mut labels: BTreeSet<&str> = BTreeSet::new();
        for e in &self.events {
            labels.insert(&e.u);
            labels.insert(&e.v);
        }
        let mut labels: Vec<String> = labels.into_iter().map(String::from).collect();
        if labels.iter().all(|l| l.parse::<i64>().is_ok()) {
            labels.sort_by_key(|l| l.parse::<i64>().unwrap());
        }
        labels
    }

    /// Aggregate the log into `n_bins` snapshots. An edge `(u, v)` appears in
    /// snapshot `t` iff at least one event for the pair falls in bin `t`.
    /// Events are treated as undirected and self-contacts are dropped.
    pub fn aggregate(&self, n_bins: usize, scheme: BinScheme) -> Result<TemporalNetwork> {
        if self.events.is_empty() {
            return Err(Error::EmptyEventLog);
        }
        if n_bins < 2 {
            return Err(Error::TooFewBins(n_bins));
        }

        let labels = self.sorted_labels();
        let index: std::collections::BTreeMap<&str, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let n = labels.len();

        let bin_of: Vec<usize> = match scheme {
            BinScheme::EqualTime => {
                let t_min = self.events.iter().map(|e| e.time).fold(f64::INFINITY, f64::min);
                let t_max = self.events.iter().map(|e| e.time).fold(f64::NEG_INFINITY, f64::max);
                let span = t_max - t_min;
                self.events
                    .iter()
                    .map(|e| {
                        if span == 0.0 {
                            0
                        } else {
                            let raw = ((e.time - t_min) / span * n_bins as f64).floor() as usize;
                            raw.min(n_bins - 1)
                        }
                    })
                    .collect()
            }
            BinScheme::EqualCount => {
                let mut stamps: Vec<f64> = self.events.iter().map(|e| e.time).collect();
                stamps.sort_by(f64::total_cmp);
                stamps.dedup();
                if n_bins > stamps.len() {
                    return Err(Error::TooManyBins { requested: n_bins, distinct: stamps.len() });
                }
                // Distinct timestamp with rank r goes to bin floor(r * n_bins / distinct).
                let distinct = stamps.len();
                self.events
                    .iter()
                    .map(|e| {
                        let rank = stamps.partition_point(|&s| s < e.time);
                        rank * n_bins / distinct
                    })
                    .collect()
            }
        };

        let mut per_bin: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); n_bins];
        for (e, &bin) in self.events.iter().zip(&bin_of) {
            let (i, j) = (index[e.u.as_str()], index[e.v.as_str()]);
            if i == j {
                continue; // self-contact carries no edge
            }
            per_bin[bin].insert((i.min(j), i.max(j)));
        }

        let snapshots = per_bin
            .into_iter()
            .map(|edges| Snapshot::from_edges(n, edges))
            .collect::<Result<Vec<_>>>()?;
        TemporalNetwork::new(snapshots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log(events: &[(f64, &str, &str)]) -> RawEventLog {
        let mut l = RawEventLog::default();
        for &(t, u, v) in events {
            l.push(t, u, v);
        }
        l
    }

    #[test]
    fn equal_time_binning_with_closing_bin() {
        // Bin edges [0, 5) and [5, 10]; the t = 5 and t = 10 events both land
        // in the closing bin.
        let l = log(&[(0.0, "a", "b"), (5.0, "a", "b"), (10.0, "b", "c")]);
        let net = l.aggregate(2, BinScheme::EqualTime).unwrap();
        assert_eq!(net.n(), 3);
        assert_eq!(net.snapshot(0).edges(), &[(0, 1)]);
        assert_eq!(net.snapshot(1).edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn single_event_fills_first_bin_only() {
        let l = log(&[(0.0, "a", "b")]);
        let net = l.aggregate(2, BinScheme::EqualTime).unwrap();
        assert_eq!(net.snapshot(0).edges(), &[(0, 1)]);
        assert_eq!(net.snapshot(1).edge_count(), 0);
    }

    #[test]
    fn empty_log_rejected() {
        assert!(matches!(
            RawEventLog::default().aggregate(2, BinScheme::EqualTime),
            Err(Error::EmptyEventLog)
        ));
    }

    #[test]
    fn equal_count_rejects_too_many_bins() {
        let l = log(&[(0.0, "a", "b"), (0.0, "b", "c")]);
        assert!(matches!(
            l.aggregate(2, BinScheme::EqualCount),
            Err(Error::TooManyBins { requested: 2, distinct: 1 })
        ));
    }

    #[test]
    fn equal_count_keeps_shared_timestamps_together() {
        let l = log(&[
            (0.0, "a", "b"),
            (1.0, "b", "c"),
            (1.0, "a", "c"),
            (2.0, "a", "d"),
            (3.0, "c", "d"),
        ]);
        let net = l.aggregate(2, BinScheme::EqualCount).unwrap();
        // Distinct stamps {0, 1, 2, 3}: ranks 0,1 -> bin 0; ranks 2,3 -> bin 1.
        assert_eq!(net.snapshot(0).edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(net.snapshot(1).edges(), &[(0, 3), (2, 3)]);
    }

    #[test]
    fn directed_duplicates_and_self_contacts_collapse() {
        let l = log(&[(0.0, "a", "b"), (0.1, "b", "a"), (0.2, "a", "a"), (9.0, "c", "a")]);
        let net = l.aggregate(2, BinScheme::EqualTime).unwrap();
        assert_eq!(net.snapshot(0).edges(), &[(0, 1)]);
        assert_eq!(net.snapshot(1).edges(), &[(0, 2)]);
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let l = log(&[(0.0, "10", "9"), (1.0, "2", "10")]);
        let labels = l.sorted_labels();
        assert_eq!(labels, vec!["2", "9", "10"]);
    }

    #[test]
    fn every_event_maps_to_exactly_one_bin() {
        // Aggregation partitions the timeline: total (pair, bin) incidences
        // is at least the number of unique links.
        let l = log(&[
            (0.0, "a", "b"),
            (2.5, "b", "c"),
            (5.0, "a", "c"),
            (7.5, "a", "b"),
            (10.0, "c", "d"),
        ]);
        let net = l.aggregate(4, BinScheme::EqualTime).unwrap();
        let incidences: usize = net.snapshots().iter().map(|s| s.edge_count()).sum();
        assert!(incidences >= net.unique_links());
        assert_eq!(net.unique_links(), 4);
    }
}
