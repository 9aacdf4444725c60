//! The subcommands as library functions; `main` only parses flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use zinet::blocks::{detect_communities, modularity};
use zinet::metrics::{
    chi_squared_gof, cumulative_error, edge_count_histogram, ensemble_capture, model_histogram, Bin, Binning,
    CaptureMetric, CaptureReport, CountHistogram,
};
use zinet::models::{fit, sample, splitmix64, ModelFamily};
use zinet::multigraph::{prefix_series, summary_stats, write_block_file};
use zinet::{BlockAssignment, FittedModel64, GraphSummary64, MultiGraph};

use crate::error::{CliError, Result};
use crate::fetch::sha256_bytes;
use crate::input::{read_blocks, BlocksSource, DataContext, GraphSource};

pub(crate) fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::file(path, e))
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::file(dir, e))
}

fn json_pretty<S: Serialize>(value: &S) -> Result<String> {
    Ok(zinet::json::to_string_pretty(value)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryJson {
    pub n_nodes: usize,
    pub directed: bool,
    pub loops: bool,
    pub pairs: u64,
    pub links: u64,
    pub multi_edges: u64,
    pub density: f64,
    pub rho: f64,
    pub excess_kurtosis: Option<f64>,
}

impl SummaryJson {
    pub fn of(g: &MultiGraph) -> Self {
        let s: GraphSummary64 = summary_stats(g);
        let space = g.space();
        Self {
            n_nodes: s.n_nodes,
            directed: space.directed,
            loops: space.loops,
            pairs: space.size(),
            links: s.links,
            multi_edges: s.multi_edges,
            density: s.density,
            rho: s.rho,
            excess_kurtosis: s.excess_kurtosis,
        }
    }
}

// ---- aggregate -------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AggregateConfig {
    pub source: GraphSource,
    /// Number of equally spaced time prefixes to tabulate (0 = none).
    pub prefix_points: usize,
    pub out: PathBuf,
}

/// Writes `graph.json`, `summary.json` and, with prefixes, `prefix.csv`
/// (`time,multi_edges,links,rho,density,density_gnp`).
pub fn cmd_aggregate(cfg: &AggregateConfig, ctx: &DataContext) -> Result<SummaryJson> {
    let g = cfg.source.load(ctx)?;
    ensure_dir(&cfg.out)?;
    write_file(&cfg.out.join("graph.json"), g.to_json()?)?;
    let summary = SummaryJson::of(&g);
    write_file(&cfg.out.join("summary.json"), json_pretty(&summary)?)?;
    if cfg.prefix_points > 0 {
        let log = cfg.source.load_log(ctx)?;
        let series = prefix_series::<f64>(&log, cfg.prefix_points)?;
        let mut csv = String::from("time,multi_edges,links,rho,density,density_gnp\n");
        for p in series {
            let gnp = -(-p.rho).exp_m1();
            let _ = writeln!(csv, "{},{},{},{},{},{}", p.time, p.multi_edges, p.links, p.rho, p.density, gnp);
        }
        write_file(&cfg.out.join("prefix.csv"), csv)?;
    }
    Ok(summary)
}

// ---- detect-blocks ---------------------------------------------------------

pub fn detect_blocks(g: &MultiGraph, seed: u64, resolution: f64) -> Result<(BlockAssignment, f64)> {
    let blocks = detect_communities(g, seed, resolution)?;
    let q = modularity::<f64>(g, &blocks)?.q_value;
    Ok((blocks, q))
}

pub fn write_blocks(path: &Path, g: &MultiGraph, blocks: &BlockAssignment) -> Result<()> {
    let mut buf = Vec::new();
    write_block_file(&mut buf, g.node_ids(), blocks)?;
    write_file(path, buf)
}

/// Writes `blocks.txt`; returns the partition and its modularity.
pub fn cmd_detect_blocks(
    source: &GraphSource,
    seed: u64,
    resolution: f64,
    out: &Path,
    ctx: &DataContext,
) -> Result<(BlockAssignment, f64)> {
    let g = source.load(ctx)?;
    let (blocks, q) = detect_blocks(&g, seed, resolution)?;
    ensure_dir(out)?;
    write_blocks(&out.join("blocks.txt"), &g, &blocks)?;
    Ok((blocks, q))
}

// ---- fit -------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub source: GraphSource,
    pub family: ModelFamily,
    pub blocks: Option<BlocksSource>,
    pub seed: u64,
    pub resolution: f64,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: FittedModel64,
    pub model_path: PathBuf,
    /// Present when blocks were detected.
    pub blocks_path: Option<PathBuf>,
    pub summary: String,
}

pub fn model_file_name(family: ModelFamily) -> String {
    format!("model_{}.json", family.name().to_ascii_lowercase())
}

pub fn cmd_fit(cfg: &FitConfig, ctx: &DataContext) -> Result<FitOutcome> {
    if cfg.family.requires_blocks() && cfg.blocks.is_none() {
        return Err(CliError::Usage(format!("family {} needs --blocks <file|detect|single>", cfg.family)));
    }
    let g = cfg.source.load(ctx)?;
    ensure_dir(&cfg.out)?;
    let mut blocks_path = None;
    let blocks = match &cfg.blocks {
        None => None,
        Some(BlocksSource::Single) => Some(BlockAssignment::single(g.n_nodes())),
        Some(BlocksSource::File(p)) => Some(read_blocks(p, &g)?),
        Some(BlocksSource::Detect) => {
            let (b, _) = detect_blocks(&g, cfg.seed, cfg.resolution)?;
            let path = cfg.out.join("blocks.txt");
            write_blocks(&path, &g, &b)?;
            blocks_path = Some(path);
            Some(b)
        }
    };
    let model = fit::<f64>(&g, cfg.family, blocks.as_ref())?;
    let model_path = cfg.out.join(model_file_name(cfg.family));
    model.save(&model_path)?;
    let summary = fit_summary(&model, &model_path, blocks_path.as_deref());
    Ok(FitOutcome { model, model_path, blocks_path, summary })
}

fn fit_summary(model: &FittedModel64, path: &Path, blocks: Option<&Path>) -> String {
    let d = &model.diagnostics;
    let qs: Vec<f64> = model.pair_laws().map(|(_, _, law)| law.q).collect();
    let (lo, hi) = qs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &q| (a.min(q), b.max(q)));
    let mean = qs.iter().sum::<f64>() / qs.len().max(1) as f64;
    let mut s = String::new();
    let _ = writeln!(s, "family          {}", model.family);
    let _ = writeln!(s, "pair space      {}", model.space.describe());
    if model.blocks.is_some() {
        let _ = writeln!(s, "blocks          {}", model.n_blocks());
    }
    let _ = writeln!(s, "log-likelihood  {:.10e}", d.log_likelihood);
    let _ = writeln!(s, "converged       {}", d.converged);
    let _ = writeln!(s, "iterations      {}", d.iterations);
    if d.optimization_problems > 0 {
        let _ = writeln!(s, "subproblems     {}", d.optimization_problems);
    }
    if d.binary_fallback {
        let _ = writeln!(s, "note            q = 1 boundary fallback used");
    }
    let _ = writeln!(s, "q over pairs    min {lo:.6} mean {mean:.6} max {hi:.6}");
    let _ = writeln!(s, "model           {}", path.display());
    if let Some(b) = blocks {
        let _ = writeln!(s, "blocks file     {}", b.display());
    }
    s
}

// ---- sample ----------------------------------------------------------------

pub const MANIFEST: &str = "manifest.sha256";

pub fn sample_file_name(k: usize) -> String {
    format!("sample_{k:05}.json")
}

/// Seed of realization `k`.
pub fn realization_seed(seed: u64, k: usize) -> u64 {
    splitmix64(seed, k as u64)
}

/// Writes `n` graph files and a `sha256sum`-style manifest; returns the
/// manifest path.
pub fn cmd_sample(model_path: &Path, n: usize, seed: u64, out: &Path) -> Result<PathBuf> {
    if n == 0 {
        return Err(CliError::Usage("--realizations must be at least 1".into()));
    }
    let model = FittedModel64::load(model_path)?;
    ensure_dir(out)?;
    let mut manifest = String::new();
    for k in 0..n {
        let g = sample(&model, realization_seed(seed, k));
        let text = g.to_json()?;
        let name = sample_file_name(k);
        write_file(&out.join(&name), &text)?;
        let _ = writeln!(manifest, "{}  {}", sha256_bytes(text.as_bytes()), name);
    }
    let path = out.join(MANIFEST);
    write_file(&path, manifest)?;
    Ok(path)
}

// ---- report ----------------------------------------------------------------

/// `--bins` values: `default`, `unit`, or comma-separated lower edges
/// starting at 0, e.g. `0,1,2,5,10` (the last bin is open).
pub fn parse_binning(s: &str) -> Result<Binning, String> {
    match s {
        "default" => Ok(Binning::Default),
        "unit" => Ok(Binning::Unit),
        list => {
            let los: Vec<u64> = list
                .split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|_| format!("bad bin edge {x:?}")))
                .collect::<Result<_, _>>()?;
            if los.len() < 2 || los[0] != 0 || los[1] != 1 || los.windows(2).any(|w| w[1] <= w[0]) {
                return Err("bin edges must start 0,1 and increase".into());
            }
            let mut bins: Vec<Bin> = los.windows(2).map(|w| Bin { lo: w[0], hi: Some(w[1] - 1) }).collect();
            bins.push(Bin { lo: los[los.len() - 1], hi: None });
            Ok(Binning::Explicit(bins))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub source: GraphSource,
    pub model_a: PathBuf,
    pub model_b: Option<PathBuf>,
    pub seed: u64,
    pub realizations: usize,
    /// As given on the command line; parsed with [`parse_binning`].
    pub bins: String,
    pub out: PathBuf,
}

#[derive(Serialize)]
struct VersionJson {
    zinet: &'static str,
    cli: &'static str,
}

#[derive(Serialize)]
struct ConfigJson<'a> {
    input: &'a str,
    model_a: String,
    model_b: Option<String>,
    seed: u64,
    realizations: usize,
    bins: &'a str,
}

#[derive(Serialize)]
struct ChiJson {
    statistic: Option<f64>,
    bins_used: Option<usize>,
    error: Option<String>,
}

#[derive(Serialize)]
struct ModelSectionJson {
    label: &'static str,
    family: &'static str,
    log_likelihood: Option<f64>,
    chi_squared: ChiJson,
    cumulative_error: Vec<f64>,
}

#[derive(Serialize)]
struct EnsembleJson {
    mean: f64,
    sd: f64,
    n: usize,
    skipped: usize,
    capture_pct: f64,
}

impl From<&CaptureReport<f64>> for EnsembleJson {
    fn from(r: &CaptureReport<f64>) -> Self {
        Self { mean: r.model_mean, sd: r.model_sd, n: r.n_realizations, skipped: r.skipped, capture_pct: r.capture_pct }
    }
}

#[derive(Serialize)]
struct WelchJson {
    t: f64,
    dof: f64,
    p: f64,
}

#[derive(Serialize)]
struct CaptureJson {
    metric: &'static str,
    empirical: Option<f64>,
    model_a: Option<EnsembleJson>,
    model_b: Option<EnsembleJson>,
    t_test: Option<WelchJson>,
    error: Option<String>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    version: VersionJson,
    config: ConfigJson<'a>,
    summary: SummaryJson,
    bins: Vec<[Option<u64>; 2]>,
    empirical_mass: Vec<f64>,
    models: Vec<ModelSectionJson>,
    capture: Vec<CaptureJson>,
}

#[derive(Debug, Clone)]
pub struct ReportOutcome {
    pub report_path: PathBuf,
    pub csv_path: PathBuf,
    pub text: String,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn check_compatible(g: &MultiGraph, model: &FittedModel64) -> Result<()> {
    if model.space != g.space() || model.node_ids != g.node_ids() {
        return Err(zinet::Error::PairSpaceMismatch {
            model: format!("{} ({} nodes)", model.space.describe(), model.node_ids.len()),
            graph: format!("{} ({} nodes)", g.space().describe(), g.n_nodes()),
        }
        .into());
    }
    Ok(())
}

fn model_section(
    label: &'static str,
    g: &MultiGraph,
    model: &FittedModel64,
    binning: &Binning,
    empirical: &CountHistogram<f64>,
) -> Result<(ModelSectionJson, CountHistogram<f64>)> {
    let hist = model_histogram(model, &empirical.bins)?;
    let chi = match chi_squared_gof(g, model, binning) {
        Ok(c) => ChiJson { statistic: finite(c.statistic), bins_used: Some(c.bins_used), error: None },
        Err(e) => ChiJson { statistic: None, bins_used: None, error: Some(e.to_string()) },
    };
    let section = ModelSectionJson {
        label,
        family: model.family.name(),
        log_likelihood: finite(model.log_likelihood(g)?),
        chi_squared: chi,
        cumulative_error: cumulative_error(empirical, &hist)?,
    };
    Ok((section, hist))
}

/// Writes `report.json` and `histogram.csv`. The JSON embeds the
/// configuration and versions; with a fixed seed it is byte-reproducible.
pub fn cmd_report(cfg: &ReportConfig, ctx: &DataContext) -> Result<ReportOutcome> {
    let binning = parse_binning(&cfg.bins).map_err(CliError::Usage)?;
    let g = cfg.source.load(ctx)?;
    let a = FittedModel64::load(&cfg.model_a)?;
    check_compatible(&g, &a)?;
    let b = cfg.model_b.as_ref().map(FittedModel64::load).transpose()?;
    if let Some(b) = &b {
        check_compatible(&g, b)?;
    }
    let empirical = edge_count_histogram::<f64>(&g, &binning)?;
    let mut sections = Vec::new();
    let mut hists = Vec::new();
    for (label, model) in [("a", Some(&a)), ("b", b.as_ref())] {
        if let Some(m) = model {
            let (s, h) = model_section(label, &g, m, &binning, &empirical)?;
            sections.push(s);
            hists.push(h);
        }
    }
    let mut capture = Vec::new();
    for metric in CaptureMetric::ALL {
        capture.push(match ensemble_capture::<f64, _, FittedModel64>(&a, b.as_ref(), &g, metric, cfg.realizations, cfg.seed) {
            Ok((ra, rb)) => CaptureJson {
                metric: metric.name(),
                empirical: finite(ra.empirical_value),
                model_a: Some((&ra).into()),
                model_b: rb.as_ref().map(Into::into),
                t_test: ra.t_test.map(|t| WelchJson { t: t.t_statistic, dof: t.degrees_of_freedom, p: t.p_value }),
                error: None,
            },
            Err(e) => CaptureJson {
                metric: metric.name(),
                empirical: None,
                model_a: None,
                model_b: None,
                t_test: None,
                error: Some(e.to_string()),
            },
        });
    }
    let report = ReportJson {
        version: VersionJson { zinet: zinet::VERSION, cli: env!("CARGO_PKG_VERSION") },
        config: ConfigJson {
            input: &cfg.source.input,
            model_a: cfg.model_a.display().to_string(),
            model_b: cfg.model_b.as_ref().map(|p| p.display().to_string()),
            seed: cfg.seed,
            realizations: cfg.realizations,
            bins: &cfg.bins,
        },
        summary: SummaryJson::of(&g),
        bins: empirical.bins.iter().map(|b| [Some(b.lo), b.hi]).collect(),
        empirical_mass: empirical.mass.clone(),
        models: sections,
        capture,
    };
    ensure_dir(&cfg.out)?;
    let report_path = cfg.out.join("report.json");
    write_file(&report_path, json_pretty(&report)?)?;
    let csv_path = cfg.out.join("histogram.csv");
    write_file(&csv_path, histogram_table(&empirical, &hists, &report.models))?;
    let text = report_text(&report);
    Ok(ReportOutcome { report_path, csv_path, text })
}

fn histogram_table(empirical: &CountHistogram<f64>, models: &[CountHistogram<f64>], sections: &[ModelSectionJson]) -> String {
    let mut csv = String::from("bin_lo,bin_hi,empirical_mass");
    for s in sections {
        let _ = write!(csv, ",{}_mass", s.family.to_ascii_lowercase());
    }
    csv.push('\n');
    for (k, bin) in empirical.bins.iter().enumerate() {
        let hi = bin.hi.map_or_else(|| "inf".to_owned(), |h| h.to_string());
        let _ = write!(csv, "{},{},{:e}", bin.lo, hi, empirical.mass[k]);
        for h in models {
            let _ = write!(csv, ",{:e}", h.mass[k]);
        }
        csv.push('\n');
    }
    csv
}

fn report_text(r: &ReportJson) -> String {
    let mut s = String::new();
    let sm = &r.summary;
    let _ = writeln!(s, "N {}  M {}  m {}  d {:.4}  rho {:.4}", sm.n_nodes, sm.links, sm.multi_edges, sm.density, sm.rho);
    for m in &r.models {
        match m.chi_squared.statistic {
            Some(x) => {
                let _ = writeln!(s, "{:<14} chi2 {:>14.4} ({} bins)", m.family, x, m.chi_squared.bins_used.unwrap_or(0));
            }
            None => {
                let _ = writeln!(s, "{:<14} chi2 n/a ({})", m.family, m.chi_squared.error.as_deref().unwrap_or("non-finite"));
            }
        }
    }
    for c in &r.capture {
        let _ = write!(s, "{:<16}", c.metric);
        match (&c.model_a, c.empirical) {
            (Some(a), Some(e)) => {
                let _ = write!(s, " empirical {e:.6}  a {:.6} ({:.1}%)", a.mean, a.capture_pct);
                if let Some(b) = &c.model_b {
                    let _ = write!(s, "  b {:.6} ({:.1}%)", b.mean, b.capture_pct);
                }
                if let Some(t) = &c.t_test {
                    let _ = write!(s, "  p {:.3e}", t.p);
                }
            }
            _ => {
                let _ = write!(s, " {}", c.error.as_deref().unwrap_or("n/a"));
            }
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_bins() {
        match parse_binning("0,1,3,10").unwrap() {
            Binning::Explicit(b) => {
                assert_eq!(b.len(), 4);
                assert_eq!(b[2], Bin { lo: 3, hi: Some(9) });
                assert_eq!(b[3], Bin { lo: 10, hi: None });
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_binning("1,2").is_err());
        assert!(parse_binning("0,1,1").is_err());
        assert_eq!(parse_binning("unit").unwrap(), Binning::Unit);
    }

    #[test]
    fn realization_seeds_differ() {
        assert_ne!(realization_seed(7, 0), realization_seed(7, 1));
        assert_eq!(realization_seed(7, 3), realization_seed(7, 3));
    }
}
