//! Edge-count histograms over all admissible pairs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::FittedModel;
use crate::multigraph::MultiGraph;
use crate::scalar::Real;

/// Inclusive count range; `hi = None` is the open tail `[lo, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bin {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl Bin {
    pub fn contains(&self, n: u64) -> bool {
        n >= self.lo && self.hi.is_none_or(|h| n <= h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramSource {
    Empirical,
    ModelExpected,
    EnsembleMean,
}

/// How counts are grouped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Binning {
    /// `{0}`, unit bins up to 9, then doubling bins `[10,19]`, `[20,39]`, ...
    #[default]
    Default,
    /// One bin per count up to the largest observed count.
    Unit,
    Explicit(Vec<Bin>),
}

impl Binning {
    pub fn bins(&self, max_count: u64) -> Result<Vec<Bin>> {
        match self {
            Binning::Default => Ok(default_bins(max_count)),
            Binning::Unit => {
                let top = max_count.max(1);
                let mut bins: Vec<Bin> = (0..top).map(|n| Bin { lo: n, hi: Some(n) }).collect();
                bins.push(Bin { lo: top, hi: None });
                Ok(bins)
            }
            Binning::Explicit(bins) => {
                check_bins(bins)?;
                Ok(bins.clone())
            }
        }
    }
}

fn check_bins(bins: &[Bin]) -> Result<()> {
    let ok = bins.len() >= 2
        && bins[0] == Bin { lo: 0, hi: Some(0) }
        && bins.last().is_some_and(|b| b.hi.is_none())
        && bins.windows(2).all(|w| w[0].hi.is_some_and(|h| h >= w[0].lo && w[1].lo == h + 1));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument("bins must start with {0}, be contiguous and end open".into()))
    }
}

/// The default bins covering counts up to `max_count`; the last bin is open.
pub fn default_bins(max_count: u64) -> Vec<Bin> {
    let mut bins = vec![Bin { lo: 0, hi: Some(0) }];
    let mut lo = 1u64;
    loop {
        let hi = if lo < 10 { lo } else { 2 * lo - 1 };
        if hi >= max_count {
            bins.push(Bin { lo, hi: None });
            return bins;
        }
        bins.push(Bin { lo, hi: Some(hi) });
        lo = hi + 1;
    }
}

/// Fractions of pairs per bin.
#[derive(Debug, Clone, PartialEq)]
pub struct CountHistogram<T> {
    pub bins: Vec<Bin>,
    pub mass: Vec<T>,
    pub source: HistogramSource,
}

impl<T: Real> CountHistogram<T> {
    pub fn bin_of(&self, n: u64) -> usize {
        self.bins.partition_point(|b| b.hi.is_some_and(|h| h < n))
    }

    pub fn total(&self) -> T {
        self.mass.iter().copied().sum()
    }

    /// Regroups onto coarser `bins`, each of which must be a union of
    /// current bins.
    pub fn regroup(&self, bins: &[Bin]) -> Result<Self> {
        check_bins(bins)?;
        let mut mass = vec![T::zero(); bins.len()];
        let mut k = 0;
        for (b, m) in self.bins.iter().zip(&self.mass) {
            while !bins[k].contains(b.lo) {
                k += 1;
            }
            let fits = match (b.hi, bins[k].hi) {
                (_, None) => true,
                (Some(h), Some(kh)) => h <= kh,
                (None, Some(_)) => false,
            };
            if !fits {
                return Err(Error::BinMismatch);
            }
            mass[k] += *m;
        }
        Ok(Self { bins: bins.to_vec(), mass, source: self.source })
    }
}

pub fn edge_count_histogram<T: Real>(g: &MultiGraph, binning: &Binning) -> Result<CountHistogram<T>> {
    let max = g.edges().map(|(_, _, a)| a).max().unwrap_or(0);
    let bins = binning.bins(max)?;
    let p = g.space().size();
    let mut tally = vec![0u64; bins.len()];
    let mut positive = 0u64;
    let hist = CountHistogram { bins, mass: Vec::<T>::new(), source: HistogramSource::Empirical };
    for (_, _, a) in g.edges() {
        tally[hist.bin_of(a)] += 1;
        positive += 1;
    }
    tally[0] += p - positive;
    let denom = T::count(p.max(1));
    let mass = tally.into_iter().map(|c| T::count(c) / denom).collect();
    Ok(CountHistogram { mass, ..hist })
}

/// Model-expected masses on the given bins (the open bin takes the tail).
pub fn model_histogram<T: Real>(model: &FittedModel<T>, bins: &[Bin]) -> Result<CountHistogram<T>> {
    check_bins(bins)?;
    let last_lo = bins.last().expect("checked").lo;
    let fine = model.expected_count_distribution(last_lo.saturating_sub(1).max(1))?;
    fine.regroup(bins)
}

/// CSV with columns `bin_lo,bin_hi,empirical_mass,model_mass`; the open bin
/// has `bin_hi = inf`.
pub fn histogram_csv<T: Real>(empirical: &CountHistogram<T>, model: &CountHistogram<T>) -> Result<String> {
    if empirical.bins != model.bins {
        return Err(Error::BinMismatch);
    }
    let mut out = String::from("bin_lo,bin_hi,empirical_mass,model_mass\n");
    for ((b, e), m) in empirical.bins.iter().zip(&empirical.mass).zip(&model.mass) {
        let hi = b.hi.map_or("inf".to_string(), |h| h.to_string());
        writeln!(out, "{},{},{:.16e},{:.16e}", b.lo, hi, e.as_f64(), m.as_f64()).expect("write to String");
    }
    Ok(out)
}
