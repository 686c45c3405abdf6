//! Result emission: a deterministic CSV table (one row per record, sorted by
//! spec fingerprint) and a JSON sidecar with the full specs, seed sets, and
//! stage timings. Timings stay out of the CSV so identical sweeps produce
//! byte-identical tables.

use serde::Serialize;

use crate::pipeline::ResultRecord;
use crate::spec::{ExperimentSpec, Method};

pub type SweepOutcome = (ExperimentSpec, Result<ResultRecord, String>);

const HEADER: [&str; 18] = [
    "fingerprint",
    "dataset",
    "method",
    "im_algorithm",
    "k",
    "lambda",
    "p",
    "t",
    "mc_runs",
    "rng_seed",
    "n_active",
    "n_filled",
    "seeds",
    "mean_spread",
    "stderr",
    "ratio_to_oracle",
    "status",
    "error",
];

/// Group id shared by rows that differ only in method: the fingerprint the
/// spec would have as an oracle run. The ratio-to-oracle column divides each
/// row's spread by its group's oracle spread.
fn oracle_group(spec: &ExperimentSpec) -> String {
    let mut as_oracle = spec.clone();
    as_oracle.method = Method::Oracle;
    as_oracle.fingerprint()
}

pub fn results_to_csv(outcomes: &[SweepOutcome]) -> String {
    let mut rows: Vec<(String, String, &SweepOutcome)> = outcomes
        .iter()
        .map(|outcome| (outcome.0.fingerprint(), oracle_group(&outcome.0), outcome))
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0));

    let mut oracle_spread: std::collections::BTreeMap<&str, f64> =
        std::collections::BTreeMap::new();
    for (_, group, (spec, result)) in &rows {
        if spec.method == Method::Oracle {
            if let Ok(record) = result {
                oracle_spread.insert(group.as_str(), record.mean_spread);
            }
        }
    }

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(HEADER).expect("in-memory write");
    for (fingerprint, group, (spec, result)) in &rows {
        let row: Vec<String> = match result {
            Ok(record) => {
                let ratio = oracle_spread
                    .get(group.as_str())
                    .map(|oracle| format!("{:.6}", record.mean_spread / oracle))
                    .unwrap_or_default();
                let seeds: Vec<String> =
                    record.seeds.iter().map(|s| s.to_string()).collect();
                vec![
                    fingerprint.clone(),
                    record.dataset.clone(),
                    record.method.id().to_string(),
                    record.im_algorithm.id().to_string(),
                    record.k.to_string(),
                    record.lambda.to_string(),
                    record.p.to_string(),
                    record.t.to_string(),
                    record.mc_runs.to_string(),
                    record.rng_seed.to_string(),
                    record.n_active.to_string(),
                    record.n_filled.to_string(),
                    seeds.join("|"),
                    format!("{:.6}", record.mean_spread),
                    format!("{:.6}", record.stderr),
                    ratio,
                    "ok".to_string(),
                    String::new(),
                ]
            }
            Err(message) => vec![
                fingerprint.clone(),
                spec.dataset.label(),
                spec.method.id().to_string(),
                spec.im_algorithm.id().to_string(),
                spec.k.to_string(),
                spec.lambda.to_string(),
                spec.p.to_string(),
                spec.t.to_string(),
                spec.mc_runs.to_string(),
                spec.rng_seed.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "error".to_string(),
                message.clone(),
            ],
        };
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8")
}

#[derive(Serialize)]
struct SidecarEntry<'a> {
    spec: &'a ExperimentSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    record: Option<&'a ResultRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

/// Full specs plus outcomes (including wall-clock stage timings), pretty
/// JSON, ordered by fingerprint like the CSV.
pub fn results_to_sidecar(outcomes: &[SweepOutcome]) -> String {
    let mut indexed: Vec<(String, &SweepOutcome)> =
        outcomes.iter().map(|o| (o.0.fingerprint(), o)).collect();
    indexed.sort_by(|a, b| a.0.cmp(&b.0));
    let entries: Vec<SidecarEntry> = indexed
        .iter()
        .map(|(_, (spec, result))| SidecarEntry {
            spec,
            record: result.as_ref().ok(),
            error: result.as_ref().err().map(String::as_str),
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("sidecar serializes")
}

/// Short human-readable summary for stdout: per (dataset, k), each method's
/// spread and its ratio to the oracle row when one exists.
pub fn summary_lines(outcomes: &[SweepOutcome]) -> Vec<String> {
    let mut rows: Vec<(String, &SweepOutcome)> =
        outcomes.iter().map(|o| (oracle_group(&o.0), o)).collect();
    rows.sort_by(|a, b| {
        (a.0.as_str(), a.1 .0.k, a.1 .0.method.id()).cmp(&(
            b.0.as_str(),
            b.1 .0.k,
            b.1 .0.method.id(),
        ))
    });
    let oracle: std::collections::BTreeMap<String, f64> = rows
        .iter()
        .filter_map(|(group, (spec, result))| match (spec.method, result) {
            (Method::Oracle, Ok(record)) => Some((group.clone(), record.mean_spread)),
            _ => None,
        })
        .collect();
    rows.iter()
        .map(|(group, (spec, result))| match result {
            Ok(record) => {
                let ratio = oracle
                    .get(group)
                    .map(|o| format!(" ({:.1}% of oracle)", 100.0 * record.mean_spread / o))
                    .unwrap_or_default();
                format!(
                    "{} k={} {}: spread {:.3} +- {:.3}{}",
                    record.dataset, record.k, record.method, record.mean_spread, record.stderr,
                    ratio
                )
            }
            Err(message) => {
                format!("{} k={} {}: ERROR {message}", spec.dataset.label(), spec.k, spec.method)
            }
        })
        .collect()
}
