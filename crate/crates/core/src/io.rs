//! File formats: `timestamp u v` event lists and the canonical snapshot format.
//!
//! The snapshot format is a text header `n T` followed by one line per edge,
//! `t i j`, with 1-based snapshot index `t` and node indices `i < j`, sorted
//! by `(t, i, j)`. Saving a loaded network reproduces the file byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::events::RawEventLog;
use crate::graph::{Snapshot, TemporalNetwork};

/// Parse an event list: one `timestamp u v` triple per line, separated by
/// whitespace or commas. Blank lines and lines starting with `#` are ignored.
pub fn parse_event_log(text: &str) -> Result<RawEventLog> {
    let mut log = RawEventLog::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() < 3 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected `timestamp u v`, got {line:?}"),
            });
        }
        let time: f64 = fields[0].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("bad timestamp {:?}", fields[0]),
        })?;
        log.push(time, fields[1], fields[2]);
    }
    if log.events.is_empty() {
        return Err(Error::EmptyEventLog);
    }
    Ok(log)
}

pub fn load_event_log(path: impl AsRef<Path>) -> Result<RawEventLog> {
    parse_event_log(&fs::read_to_string(path)?)
}

/// Serialize a network in the canonical snapshot format.
pub fn snapshots_to_string(net: &TemporalNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", net.n(), net.len());
    for (t, snap) in net.snapshots().iter().enumerate() {
        for &(i, j) in snap.edges() {
            let _ = writeln!(out, "{} {} {}", t + 1, i, j);
        }
    }
    out
}

/// Parse the canonical snapshot format.
pub fn parse_snapshots(text: &str) -> Result<TemporalNetwork> {
    let mut lines = text.lines().enumerate();
    let (n, t_count) = loop {
        let (lineno, line) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `n T` header".into(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |field: Option<&str>, lineno: usize| {
            field
                .and_then(|f| f.parse::<usize>().ok())
                .ok_or(Error::Parse { line: lineno + 1, msg: "bad `n T` header".into() })
        };
        break (parse(it.next(), lineno)?, parse(it.next(), lineno)?);
    };
    if t_count == 0 {
        return Err(Error::EmptyNetwork);
    }

    let mut per_bin: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t_count];
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<usize> = line
            .split_whitespace()
            .map(|f| f.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("expected `t i j`, got {line:?}"),
            })?;
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected `t i j`, got {line:?}"),
            });
        }
        let (t, i, j) = (fields[0], fields[1], fields[2]);
        if t < 1 || t > t_count {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("snapshot index {t} outside 1..={t_count}"),
            });
        }
        per_bin[t - 1].push((i, j));
    }
    let snapshots = per_bin
        .into_iter()
        .map(|edges| Snapshot::from_edges(n, edges))
        .collect::<Result<Vec<_>>>()?;
    TemporalNetwork::new(snapshots)
}

pub fn save_snapshots(net: &TemporalNetwork, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, snapshots_to_string(net))?)
}

pub fn load_snapshots(path: impl AsRef<Path>) -> Result<TemporalNetwork> {
    parse_snapshots(&fs::read_to_string(path)?)
}
