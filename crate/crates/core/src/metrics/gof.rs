//! Cumulative error and chi-squared goodness of fit of count histograms.

use crate::error::{Error, Result};
use crate::models::FittedModel;
use crate::multigraph::MultiGraph;
use crate::scalar::Real;

use super::histogram::{edge_count_histogram, model_histogram, Binning, CountHistogram};

/// Running sum of `|f_emp - f_model|` over bins.
pub fn cumulative_error<T: Real>(empirical: &CountHistogram<T>, model: &CountHistogram<T>) -> Result<Vec<T>> {
    if empirical.bins != model.bins || empirical.mass.len() != model.mass.len() {
        return Err(Error::BinMismatch);
    }
    let mut acc = T::zero();
    Ok(empirical
        .mass
        .iter()
        .zip(&model.mass)
        .map(|(e, m)| {
            acc += (*e - *m).abs();
            acc
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquared<T> {
    pub statistic: T,
    /// Bins left after merging.
    pub bins_used: usize,
}

/// Pearson statistic on `n_pairs` pairs with bins merged left to right until
/// every expected count reaches 5. A short remainder joins the last group.
pub fn chi_squared_statistic<T: Real>(
    observed: &CountHistogram<T>,
    expected: &CountHistogram<T>,
    n_pairs: u64,
) -> Result<ChiSquared<T>> {
    if observed.bins != expected.bins || observed.mass.len() != expected.mass.len() {
        return Err(Error::BinMismatch);
    }
    let p = T::count(n_pairs);
    let five = T::lit(5.0);
    let mut groups: Vec<(T, T)> = Vec::new();
    let (mut o, mut e) = (T::zero(), T::zero());
    for (fo, fe) in observed.mass.iter().zip(&expected.mass) {
        o += *fo * p;
        e += *fe * p;
        if e >= five {
            groups.push((o, e));
            o = T::zero();
            e = T::zero();
        }
    }
    if e > T::zero() || o > T::zero() {
        match groups.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => groups.push((o, e)),
        }
    }
    if groups.len() < 2 {
        return Err(Error::TooFewBins(groups.len()));
    }
    let statistic = groups.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    Ok(ChiSquared { statistic, bins_used: groups.len() })
}

/// Chi-squared statistic of the observed edge-count histogram against the
/// model's expected one.
pub fn chi_squared_gof<T: Real>(g: &MultiGraph, model: &FittedModel<T>, binning: &Binning) -> Result<ChiSquared<T>> {
    if model.space != g.space() {
        return Err(Error::PairSpaceMismatch { model: model.space.describe(), graph: g.space().describe() });
    }
    let observed = edge_count_histogram::<T>(g, binning)?;
    let expected = model_histogram(model, &observed.bins)?;
    chi_squared_statistic(&observed, &expected, g.space().size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{Bin, HistogramSource};

    fn hist(mass: Vec<f64>) -> CountHistogram<f64> {
        let n = mass.len() as u64;
        let mut bins: Vec<Bin> = (0..n - 1).map(|k| Bin { lo: k, hi: Some(k) }).collect();
        bins.push(Bin { lo: n - 1, hi: None });
        CountHistogram { bins, mass, source: HistogramSource::Empirical }
    }

    #[test]
    fn cumulative_error_hand_case() {
        let a = hist(vec![0.5, 0.3, 0.2]);
        let b = hist(vec![0.4, 0.4, 0.2]);
        let ce = cumulative_error(&a, &b).unwrap();
        let expect = [0.1, 0.2, 0.2];
        for (c, e) in ce.iter().zip(expect) {
            assert!((c - e).abs() < 1e-15);
        }
        let ce = cumulative_error(&hist(vec![1.0, 0.0]), &hist(vec![0.0, 1.0])).unwrap();
        assert_eq!(*ce.last().unwrap(), 2.0);
        assert!(cumulative_error(&hist(vec![1.0, 0.0]), &hist(vec![1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn chi_squared_merging() {
        // expected counts 50, 30, 16, 2, 2 -> the last two merge into the 16 bin
        let e = hist(vec![0.5, 0.3, 0.16, 0.02, 0.02]);
        let o = hist(vec![0.45, 0.35, 0.1, 0.05, 0.05]);
        let c = chi_squared_statistic(&o, &e, 100).unwrap();
        assert_eq!(c.bins_used, 3);
        let expect = 25.0 / 50.0 + 25.0 / 30.0 + 0.0 / 20.0;
        assert!((c.statistic - expect).abs() < 1e-12);
        assert_eq!(chi_squared_statistic(&e, &e, 100).unwrap().statistic, 0.0);
        assert!(matches!(chi_squared_statistic(&o, &e, 5), Err(Error::TooFewBins(1))));
    }
}
