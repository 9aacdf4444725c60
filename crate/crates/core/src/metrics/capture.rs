//! Ensemble estimates of structural statistics and their share of the
//! observed value.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{sample, FittedModel};
use crate::multigraph::{pair_count_kurtosis, MultiGraph};
use crate::numerics::{welch_t_test, TTestResult};
use crate::scalar::Real;

use super::structure::{avg_clustering, avg_path_length, spectral_gap};

/// Anything that can produce graph realizations from a seed.
pub trait GraphSampler: Sync {
    fn draw(&self, seed: u64) -> MultiGraph;
}

impl<T: Real> GraphSampler for FittedModel<T> {
    fn draw(&self, seed: u64) -> MultiGraph {
        sample(self, seed)
    }
}

/// Returns the same graph for every seed.
#[derive(Debug, Clone, Copy)]
pub struct FixedGraph<'a>(pub &'a MultiGraph);

impl GraphSampler for FixedGraph<'_> {
    fn draw(&self, _seed: u64) -> MultiGraph {
        self.0.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaptureMetric {
    SpectralGap,
    AvgClustering,
    AvgPathLength,
    ExcessKurtosis,
}

impl CaptureMetric {
    pub const ALL: [CaptureMetric; 4] = [
        CaptureMetric::SpectralGap,
        CaptureMetric::AvgClustering,
        CaptureMetric::AvgPathLength,
        CaptureMetric::ExcessKurtosis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaptureMetric::SpectralGap => "spectral_gap",
            CaptureMetric::AvgClustering => "avg_clustering",
            CaptureMetric::AvgPathLength => "avg_path_length",
            CaptureMetric::ExcessKurtosis => "excess_kurtosis",
        }
    }

    pub fn evaluate<T: Real>(self, g: &MultiGraph) -> Result<T> {
        match self {
            CaptureMetric::SpectralGap => spectral_gap(g),
            CaptureMetric::AvgClustering => avg_clustering(g),
            CaptureMetric::AvgPathLength => avg_path_length(g),
            CaptureMetric::ExcessKurtosis => pair_count_kurtosis(g),
        }
    }
}

impl fmt::Display for CaptureMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaptureMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        CaptureMetric::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown metric {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaptureReport<T> {
    pub metric: CaptureMetric,
    pub empirical_value: T,
    pub model_mean: T,
    pub model_sd: T,
    /// Realizations that produced a value.
    pub n_realizations: usize,
    pub skipped: usize,
    /// `100 * model_mean / empirical_value`.
    pub capture_pct: T,
    /// Welch test against the other model's ensemble, when one was given.
    pub t_test: Option<TTestResult<T>>,
    pub values: Vec<T>,
}

#[derive(Serialize)]
struct ModelJson {
    mean: f64,
    sd: f64,
    n: usize,
    skipped: usize,
}

#[derive(Serialize)]
struct TTestJson {
    t: f64,
    dof: f64,
    p: f64,
}

#[derive(Serialize)]
struct ReportJson {
    metric: &'static str,
    empirical: f64,
    model: ModelJson,
    capture_pct: f64,
    t_test: Option<TTestJson>,
}

impl<T: Real> CaptureReport<T> {
    /// `{metric, empirical, model:{mean,sd,n}, capture_pct, t_test:{t,dof,p}}`.
    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string_pretty(&ReportJson {
            metric: self.metric.name(),
            empirical: self.empirical_value.as_f64(),
            model: ModelJson {
                mean: self.model_mean.as_f64(),
                sd: self.model_sd.as_f64(),
                n: self.n_realizations,
                skipped: self.skipped,
            },
            capture_pct: self.capture_pct.as_f64(),
            t_test: self.t_test.map(|t| TTestJson {
                t: t.t_statistic.as_f64(),
                dof: t.degrees_of_freedom.as_f64(),
                p: t.p_value.as_f64(),
            }),
        })
    }
}

fn realization_seed(seed: u64, stream: u64, k: u64) -> u64 {
    crate::models::splitmix64(crate::models::splitmix64(seed, stream), k)
}

/// Metric values over `n` realizations (in realization order) and the number
/// skipped because the metric failed. More than 20% skipped is an error.
pub fn ensemble_values<T: Real, S: GraphSampler + ?Sized>(
    sampler: &S,
    metric: CaptureMetric,
    n: usize,
    seed: u64,
) -> Result<(Vec<T>, usize)> {
    ensemble_stream(sampler, metric, n, seed, 0)
}

fn ensemble_stream<T: Real, S: GraphSampler + ?Sized>(
    sampler: &S,
    metric: CaptureMetric,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<(Vec<T>, usize)> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 realizations".into()));
    }
    let raw: Vec<Option<T>> = (0..n as u64)
        .into_par_iter()
        .map(|k| metric.evaluate::<T>(&sampler.draw(realization_seed(seed, stream, k))).ok())
        .collect();
    let values: Vec<T> = raw.iter().flatten().copied().collect();
    let skipped = n - values.len();
    if skipped * 5 > n || values.len() < 2 {
        return Err(Error::TooManySkipped { skipped, total: n });
    }
    Ok((values, skipped))
}

fn report<T: Real>(metric: CaptureMetric, empirical: T, values: Vec<T>, skipped: usize) -> CaptureReport<T> {
    let (mean, var) = crate::numerics::ttest::mean_and_variance(&values);
    CaptureReport {
        metric,
        empirical_value: empirical,
        model_mean: mean,
        model_sd: var.sqrt(),
        n_realizations: values.len(),
        skipped,
        capture_pct: T::lit(100.0) * mean / empirical,
        t_test: None,
        values,
    }
}

/// Ensemble capture of `metric` for one or two samplers. Each sampler draws
/// `n` realizations with seeds derived from `(seed, sampler, index)`; with two
/// samplers both reports carry the Welch test between the ensembles (absent
/// when both ensembles are constant).
pub fn ensemble_capture<T, A, B>(
    model_a: &A,
    model_b: Option<&B>,
    g: &MultiGraph,
    metric: CaptureMetric,
    n: usize,
    seed: u64,
) -> Result<(CaptureReport<T>, Option<CaptureReport<T>>)>
where
    T: Real,
    A: GraphSampler + ?Sized,
    B: GraphSampler + ?Sized,
{
    let empirical = metric.evaluate::<T>(g)?;
    let (va, sa) = ensemble_stream::<T, A>(model_a, metric, n, seed, 0)?;
    let mut ra = report(metric, empirical, va, sa);
    let Some(b) = model_b else { return Ok((ra, None)) };
    let (vb, sb) = ensemble_stream::<T, B>(b, metric, n, seed, 1)?;
    let mut rb = report(metric, empirical, vb, sb);
    let test = match welch_t_test(&ra.values, &rb.values) {
        Ok(t) => Some(t),
        Err(Error::ZeroVariance) => None,
        Err(e) => return Err(e),
    };
    ra.t_test = test;
    rb.t_test = test;
    Ok((ra, Some(rb)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::PairSpace;

    #[test]
    fn fixed_graph_captures_everything() {
        let g = MultiGraph::with_index_labels(
            PairSpace::undirected(5),
            [(0, 1, 2), (1, 2, 1), (0, 2, 3), (2, 3, 1), (3, 4, 5)],
        )
        .unwrap();
        for metric in CaptureMetric::ALL {
            let (r, other) =
                ensemble_capture::<f64, _, FixedGraph>(&FixedGraph(&g), None, &g, metric, 4, 1).unwrap();
            assert!(other.is_none());
            assert_eq!(r.capture_pct, 100.0, "{metric}");
            assert_eq!(r.model_sd, 0.0);
            assert_eq!(r.n_realizations, 4);
        }
    }

    #[test]
    fn failing_metric_counts_as_skipped() {
        let empty = MultiGraph::empty(PairSpace::undirected(3));
        let r = ensemble_values::<f64, _>(&FixedGraph(&empty), CaptureMetric::AvgPathLength, 5, 0);
        assert!(matches!(r, Err(Error::TooManySkipped { skipped: 5, total: 5 })));
    }

    #[test]
    fn metric_names_parse() {
        for m in CaptureMetric::ALL {
            assert_eq!(m.name().parse::<CaptureMetric>().unwrap(), m);
        }
    }
}
