use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

use super::{BlockAssignment, MultiGraph, PairSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contact {
    pub time: i64,
    /// Indices into [`TemporalContactLog::labels`].
    pub a: usize,
    pub b: usize,
}

/// Time-stamped pairwise contacts, sorted by time.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalContactLog {
    labels: Vec<String>,
    records: Vec<Contact>,
}

impl TemporalContactLog {
    /// Builds a log from labelled records; sorts them by time (stable).
    pub fn from_records<S: AsRef<str>>(records: impl IntoIterator<Item = (i64, S, S)>) -> Result<Self> {
        let mut raw: Vec<(i64, String, String)> =
            records.into_iter().map(|(t, a, b)| (t, a.as_ref().to_owned(), b.as_ref().to_owned())).collect();
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(k) = raw.iter().position(|(_, a, b)| a == b) {
            return Err(Error::Parse { line: k + 1, message: format!("self-contact of {}", raw[k].1) });
        }
        raw.sort_by_key(|r| r.0);
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut intern = |s: String| -> usize {
            if let Some(&k) = index.get(&s) {
                return k;
            }
            labels.push(s.clone());
            index.insert(s, labels.len() - 1);
            labels.len() - 1
        };
        let records = raw
            .into_iter()
            .map(|(time, a, b)| Contact { time, a: intern(a), b: intern(b) })
            .collect();
        Ok(Self { labels, records })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn records(&self) -> &[Contact] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn time_range(&self) -> (i64, i64) {
        (self.records[0].time, self.records[self.records.len() - 1].time)
    }
}

fn maybe_gunzip<'a, R: Read + 'a>(reader: R) -> Result<Box<dyn BufRead + 'a>> {
    let mut buffered = BufReader::new(reader);
    let head = buffered.fill_buf()?;
    if head.len() >= 2 && head[0] == 0x1f && head[1] == 0x8b {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(buffered))))
    } else {
        Ok(Box::new(buffered))
    }
}

fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(k, line)| match line {
        Err(e) => Some(Err(Error::Io(e))),
        Ok(l) => {
            let trimmed = l.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                None
            } else {
                Some(Ok((k + 1, trimmed.to_owned())))
            }
        }
    })
}

/// Parses `t i j` lines (whitespace, tab or comma separated, extra columns
/// ignored, `#` comments skipped). A first line with a non-numeric timestamp
/// is taken as a header. Gzip input is detected from its magic bytes.
pub fn parse_contact_log<R: Read>(reader: R) -> Result<TemporalContactLog> {
    let reader = maybe_gunzip(reader)?;
    let mut records = Vec::new();
    for (k, line) in content_lines(reader).enumerate() {
        let (lineno, text) = line?;
        let fields: Vec<&str> = text.split(|c: char| c.is_whitespace() || c == ',').filter(|f| !f.is_empty()).collect();
        if fields.len() < 3 {
            return Err(Error::Parse { line: lineno, message: format!("expected 't i j', got {} field(s)", fields.len()) });
        }
        let t: i64 = match fields[0].parse() {
            Ok(t) => t,
            Err(_) if k == 0 => continue,
            Err(_) => return Err(Error::Parse { line: lineno, message: format!("bad timestamp {:?}", fields[0]) }),
        };
        if fields[1] == fields[2] {
            return Err(Error::Parse { line: lineno, message: format!("self-contact of {}", fields[1]) });
        }
        records.push((t, fields[1].to_owned(), fields[2].to_owned()));
    }
    TemporalContactLog::from_records(records)
}

pub fn read_contact_log_file(path: &Path) -> Result<TemporalContactLog> {
    parse_contact_log(File::open(path)?)
}

/// Counts contacts per unordered pair into an undirected, loop-free graph.
///
/// The node set is every label of the full log, so windows of the same log
/// share node indices. `window` is the half-open interval `[t0, t1)`.
pub fn aggregate_contacts(log: &TemporalContactLog, window: Option<(i64, i64)>) -> Result<MultiGraph> {
    let space = PairSpace::undirected(log.labels.len());
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for c in &log.records {
        if let Some((t0, t1)) = window {
            if c.time < t0 || c.time >= t1 {
                continue;
            }
        }
        *counts.entry((c.a.min(c.b), c.a.max(c.b))).or_insert(0) += 1;
    }
    if counts.is_empty() {
        let (start, end) = window.unwrap_or((i64::MIN, i64::MAX));
        return Err(Error::EmptyWindow { start, end });
    }
    MultiGraph::from_counts(space, log.labels.clone(), counts.into_iter().map(|((i, j), w)| (i, j, w)))
}

/// Parses `i j w` lines with positive integer weights; duplicate pairs add up.
pub fn parse_weighted_edgelist<R: Read>(reader: R, directed: bool, loops: bool) -> Result<MultiGraph> {
    let reader = maybe_gunzip(reader)?;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut ids: Vec<String> = Vec::new();
    let mut entries = Vec::new();
    for line in content_lines(reader) {
        let (lineno, text) = line?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(Error::Parse { line: lineno, message: "expected 'i j w'".into() });
        }
        let w: u64 = match fields[2].parse::<u64>() {
            Ok(w) if w > 0 => w,
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("weight {:?} is not a positive integer", fields[2]),
                })
            }
        };
        if fields[0] == fields[1] && !loops {
            return Err(Error::Parse { line: lineno, message: format!("self-loop on {} not allowed", fields[0]) });
        }
        let mut node = |s: &str| -> usize {
            if let Some(&k) = index.get(s) {
                return k;
            }
            ids.push(s.to_owned());
            index.insert(s.to_owned(), ids.len() - 1);
            ids.len() - 1
        };
        let (i, j) = (node(fields[0]), node(fields[1]));
        entries.push((i, j, w));
    }
    if ids.is_empty() {
        return Err(Error::EmptyInput);
    }
    let space = PairSpace::new(ids.len(), directed, loops)?;
    MultiGraph::from_counts(space, ids, entries)
}

/// Reads `node label` lines and maps them onto the graph's nodes.
///
/// Block labels are arbitrary strings, numbered in sorted order (numerically
/// when every label is an integer). Every node must be listed.
pub fn read_block_file<R: Read>(reader: R, node_ids: &[String]) -> Result<BlockAssignment> {
    let index: HashMap<&str, usize> = node_ids.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();
    let mut raw: Vec<Option<String>> = vec![None; node_ids.len()];
    for line in content_lines(BufReader::new(reader)) {
        let (lineno, text) = line?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() < 2 {
            return Err(Error::Parse { line: lineno, message: "expected 'node label'".into() });
        }
        let node = *index
            .get(fields[0])
            .ok_or_else(|| Error::Parse { line: lineno, message: format!("unknown node {:?}", fields[0]) })?;
        raw[node] = Some(fields[1].to_owned());
    }
    let raw: Vec<String> = raw
        .into_iter()
        .enumerate()
        .map(|(k, r)| r.ok_or_else(|| Error::InvalidArgument(format!("node {} has no block", node_ids[k]))))
        .collect::<Result<_>>()?;
    let mut distinct: Vec<&String> = raw.iter().collect();
    distinct.sort();
    distinct.dedup();
    if distinct.iter().all(|s| s.parse::<i64>().is_ok()) {
        distinct.sort_by_key(|s| s.parse::<i64>().unwrap_or_default());
    }
    let map: HashMap<&String, usize> = distinct.iter().enumerate().map(|(k, s)| (*s, k)).collect();
    BlockAssignment::new(raw.iter().map(|s| map[s]).collect(), distinct.len())
}

pub fn write_block_file<W: Write>(mut out: W, node_ids: &[String], blocks: &BlockAssignment) -> Result<()> {
    for (id, b) in node_ids.iter().zip(blocks.labels()) {
        writeln!(out, "{id} {b}")?;
    }
    Ok(())
}

/// JSON form of a [`MultiGraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n_nodes: usize,
    pub directed: bool,
    pub loops: bool,
    pub node_ids: Vec<String>,
    pub edges: Vec<[u64; 3]>,
}

impl From<&MultiGraph> for GraphFile {
    fn from(g: &MultiGraph) -> Self {
        Self {
            n_nodes: g.n_nodes(),
            directed: g.space.directed,
            loops: g.space.loops,
            node_ids: g.node_ids.clone(),
            edges: g.edges().map(|(i, j, w)| [i as u64, j as u64, w]).collect(),
        }
    }
}

impl TryFrom<GraphFile> for MultiGraph {
    type Error = Error;

    fn try_from(f: GraphFile) -> Result<Self> {
        let space = PairSpace::new(f.n_nodes, f.directed, f.loops)?;
        MultiGraph::from_counts(space, f.node_ids, f.edges.iter().map(|e| (e[0] as usize, e[1] as usize, e[2])))
    }
}

impl MultiGraph {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&GraphFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<GraphFile>(text)?.try_into()
    }
}
