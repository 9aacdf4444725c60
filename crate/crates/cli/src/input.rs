//! Resolving `--input` into a multigraph.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use zinet::multigraph::{aggregate_contacts, parse_contact_log, parse_weighted_edgelist, read_block_file};
use zinet::{BlockAssignment, MultiGraph, TemporalContactLog};

use crate::error::{CliError, Result};
use crate::fetch::{fetch_dataset, resolve_cache_dir};
use crate::registry::{DataFormat, Registry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    /// `.json` files are graph files, anything else a contact log.
    #[default]
    Auto,
    ContactLog,
    Edgelist,
    Graph,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "contact-log" => Ok(Self::ContactLog),
            "edgelist" | "weighted-edgelist" => Ok(Self::Edgelist),
            "graph" | "json" => Ok(Self::Graph),
            other => Err(format!("unknown format {other:?} (auto, contact-log, edgelist, graph)")),
        }
    }
}

/// Where datasets named `dataset:NAME` are looked up and cached.
#[derive(Debug, Clone, Default)]
pub struct DataContext {
    pub registry: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct GraphSource {
    /// A path, or `dataset:NAME` for a registry entry.
    pub input: String,
    pub format: InputFormat,
    pub directed: bool,
    pub loops: bool,
    /// Half-open time window applied to contact logs.
    pub window: Option<(i64, i64)>,
}

impl GraphSource {
    pub fn path(input: impl Into<String>) -> Self {
        Self { input: input.into(), ..Self::default() }
    }

    fn resolve(&self, ctx: &DataContext) -> Result<(PathBuf, InputFormat)> {
        if let Some(name) = self.input.strip_prefix("dataset:") {
            let registry = Registry::load(ctx.registry.as_deref())?;
            let desc = registry.get(name)?;
            let path = fetch_dataset(desc, &resolve_cache_dir(ctx.cache_dir.as_deref()))?;
            let format = match desc.format {
                DataFormat::ContactLog => InputFormat::ContactLog,
                DataFormat::WeightedEdgelist => InputFormat::Edgelist,
            };
            return Ok((path, format));
        }
        let path = PathBuf::from(&self.input);
        let format = match self.format {
            InputFormat::Auto if path.extension().is_some_and(|e| e == "json") => InputFormat::Graph,
            InputFormat::Auto => InputFormat::ContactLog,
            f => f,
        };
        Ok((path, format))
    }

    pub fn load_log(&self, ctx: &DataContext) -> Result<TemporalContactLog> {
        let (path, format) = self.resolve(ctx)?;
        if format != InputFormat::ContactLog {
            return Err(CliError::Usage(format!("{} is not a contact log", self.input)));
        }
        Ok(parse_contact_log(open(&path)?)?)
    }

    pub fn load(&self, ctx: &DataContext) -> Result<MultiGraph> {
        let (path, format) = self.resolve(ctx)?;
        if format != InputFormat::ContactLog && self.window.is_some() {
            return Err(CliError::Usage("--window applies to contact logs only".into()));
        }
        match format {
            InputFormat::ContactLog => {
                if self.directed || self.loops {
                    return Err(CliError::Usage("contact logs aggregate to undirected loop-free graphs".into()));
                }
                let log = parse_contact_log(open(&path)?)?;
                Ok(aggregate_contacts(&log, self.window)?)
            }
            InputFormat::Edgelist => Ok(parse_weighted_edgelist(open(&path)?, self.directed, self.loops)?),
            InputFormat::Graph => {
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::file(&path, e))?;
                Ok(MultiGraph::from_json(&text)?)
            }
            InputFormat::Auto => unreachable!("resolved above"),
        }
    }
}

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::file(path, e))
}

/// `--blocks` values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlocksSource {
    Single,
    Detect,
    File(PathBuf),
}

impl FromStr for BlocksSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "single" => Self::Single,
            "detect" => Self::Detect,
            "" => return Err("empty --blocks value".into()),
            path => Self::File(PathBuf::from(path)),
        })
    }
}

pub fn read_blocks(path: &Path, g: &MultiGraph) -> Result<BlockAssignment> {
    Ok(read_block_file(open(path)?, g.node_ids())?)
}

/// `t0:t1` or `t0,t1`.
pub fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once([':', ',']).ok_or("expected t0:t1")?;
    let t0: i64 = a.trim().parse().map_err(|_| format!("bad window start {a:?}"))?;
    let t1: i64 = b.trim().parse().map_err(|_| format!("bad window end {b:?}"))?;
    if t1 <= t0 {
        return Err("window end must exceed its start".into());
    }
    Ok((t0, t1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        assert_eq!("graph".parse::<InputFormat>().unwrap(), InputFormat::Graph);
        assert!("xml".parse::<InputFormat>().is_err());
        assert_eq!("detect".parse::<BlocksSource>().unwrap(), BlocksSource::Detect);
        assert_eq!("b.txt".parse::<BlocksSource>().unwrap(), BlocksSource::File("b.txt".into()));
        assert_eq!(parse_window("0:20").unwrap(), (0, 20));
        assert!(parse_window("5:5").is_err());
    }

    #[test]
    fn loads_each_format() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("log.dat");
        std::fs::write(&log, "0 a b\n20 a b\n40 b c\n").unwrap();
        let ctx = DataContext::default();
        let g = GraphSource::path(log.to_str().unwrap()).load(&ctx).unwrap();
        assert_eq!((g.multi_edges(), g.links()), (3, 2));
        let json = dir.path().join("g.json");
        std::fs::write(&json, g.to_json().unwrap()).unwrap();
        assert_eq!(GraphSource::path(json.to_str().unwrap()).load(&ctx).unwrap(), g);
        let el = dir.path().join("g.txt");
        std::fs::write(&el, "a b 2\nb a 1\n").unwrap();
        let src = GraphSource { format: InputFormat::Edgelist, directed: true, ..GraphSource::path(el.to_str().unwrap()) };
        let d = src.load(&ctx).unwrap();
        assert_eq!((d.count(0, 1), d.count(1, 0)), (2, 1));
        let bad = GraphSource { directed: true, ..GraphSource::path(log.to_str().unwrap()) };
        assert!(matches!(bad.load(&ctx), Err(CliError::Usage(_))));
        let missing = GraphSource::path(dir.path().join("nope").to_str().unwrap());
        assert!(matches!(missing.load(&ctx), Err(CliError::File { .. })));
    }
}
