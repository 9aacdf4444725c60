use crate::error::{Error, Result};
use crate::numerics::special::student_t_two_sided;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult<T> {
    pub t_statistic: T,
    pub degrees_of_freedom: T,
    pub p_value: T,
}

pub(crate) fn mean_and_variance<T: Real>(xs: &[T]) -> (T, T) {
    let n = T::count(xs.len() as u64);
    let mean = xs.iter().copied().sum::<T>() / n;
    let ss: T = xs.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (mean, ss / (n - T::one()))
}

/// Welch's unequal-variance t-test with a two-sided p-value.
pub fn welch_t_test<T: Real>(sample_a: &[T], sample_b: &[T]) -> Result<TTestResult<T>> {
    if sample_a.len() < 2 || sample_b.len() < 2 {
        return Err(Error::InvalidArgument("each sample needs at least two values".into()));
    }
    if sample_a.iter().chain(sample_b).any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("samples contain non-finite values".into()));
    }
    let (ma, va) = mean_and_variance(sample_a);
    let (mb, vb) = mean_and_variance(sample_b);
    let sa = va / T::count(sample_a.len() as u64);
    let sb = vb / T::count(sample_b.len() as u64);
    let se2 = sa + sb;
    if !(se2 > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    let t = (ma - mb) / se2.sqrt();
    let na1 = T::count(sample_a.len() as u64 - 1);
    let nb1 = T::count(sample_b.len() as u64 - 1);
    let dof = se2 * se2 / (sa * sa / na1 + sb * sb / nb1);
    let p = student_t_two_sided(t, dof)?;
    Ok(TTestResult { t_statistic: t, degrees_of_freedom: dof, p_value: p })
}
