//! Derivative-free bounded maximization.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig<T> {
    /// Absolute tolerance on the argument.
    pub abs_tolerance: T,
    /// Relative tolerance on the objective between coordinate sweeps.
    pub rel_ll_tolerance: T,
    pub max_iterations: usize,
}

impl<T: Real> OptimizerConfig<T> {
    pub fn scalar() -> Self {
        Self {
            abs_tolerance: T::resolvable(1e-10, 4.0),
            rel_ll_tolerance: T::resolvable(1e-8, 16.0),
            max_iterations: 200,
        }
    }

    pub fn multivariate() -> Self {
        Self { max_iterations: 2000, ..Self::scalar() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tolerance > T::zero()) || !(self.rel_ll_tolerance > T::zero()) {
            return Err(Error::InvalidArgument("optimizer tolerances must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

impl<T: Real> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self::scalar()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarOptimum<T> {
    pub argmax: T,
    pub value: T,
    pub evaluations: usize,
    /// False when the iteration budget ran out before the bracket closed.
    pub converged: bool,
}

/// Maximizes `objective` on `[lo, hi]`.
///
/// Golden-section search with parabolic steps (Brent's `fmin`). Both endpoints
/// and the midpoint are evaluated as well, so the result is never worse than
/// any of them.
pub fn maximize_scalar_bounded<T, F>(
    mut objective: F,
    lo: T,
    hi: T,
    cfg: &OptimizerConfig<T>,
) -> Result<ScalarOptimum<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    cfg.validate()?;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
    }
    let mut evaluations = 0usize;
    let mut eval = |x: T| -> Result<T> {
        evaluations += 1;
        let v = objective(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { probe: vec![x.as_f64()] })
        }
    };

    let half = T::lit(0.5);
    let golden = T::lit(0.5 * (3.0 - 5.0f64.sqrt()));
    let eps2 = T::epsilon() * T::lit(2.0);
    let tol3 = cfg.abs_tolerance / T::lit(3.0);

    // minimize g = -f
    let (mut a, mut b) = (lo, hi);
    let mut x = a + golden * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = -eval(x)?;
    let mut fw = fx;
    let mut fv = fx;
    let mut d = T::zero();
    let mut e = T::zero();
    let mut converged = false;

    for _ in 0..cfg.max_iterations {
        let xm = half * (a + b);
        let tol1 = eps2 * x.abs() + tol3;
        let tol2 = tol1 * T::lit(2.0);
        if (x - xm).abs() <= tol2 - half * (b - a) {
            converged = true;
            break;
        }
        let mut take_golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = (q - r) * T::lit(2.0);
            if q > T::zero() {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (half * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                take_golden = false;
            }
        }
        if take_golden {
            e = if x >= xm { a - x } else { b - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > T::zero() {
            x + tol1
        } else {
            x - tol1
        };
        let fu = -eval(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    let mut best = (x, -fx);
    for probe in [lo, hi, half * (lo + hi)] {
        let f = eval(probe)?;
        if f > best.1 {
            best = (probe, f);
        }
    }
    Ok(ScalarOptimum { argmax: best.0, value: best.1, evaluations, converged })
}

/// Objective for [`maximize_box_constrained`].
///
/// `partial` may drop terms that do not depend on coordinate `k`; only its
/// differences along `k` are used. The default evaluates the full objective.
pub trait BoxObjective<T> {
    fn value(&self, x: &[T]) -> T;

    fn partial(&self, x: &[T], k: usize) -> T {
        let _ = k;
        self.value(x)
    }
}

impl<T, F> BoxObjective<T> for F
where
    F: Fn(&[T]) -> T,
{
    fn value(&self, x: &[T]) -> T {
        self(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxOptimum<T> {
    pub argmax: Vec<T>,
    pub value: T,
    pub sweeps: usize,
    pub converged: bool,
}

/// Maximizes over the box `lower <= x <= upper` by cyclic coordinate ascent.
///
/// Each coordinate is solved with [`maximize_scalar_bounded`] while the others
/// are held fixed; a coordinate update is kept only if it does not lower the
/// objective, so the objective is non-decreasing across sweeps. Stops once a
/// full sweep changes the objective by less than `rel_ll_tolerance`
/// (relative), or after `max_iterations` sweeps.
pub fn maximize_box_constrained<T, O>(
    objective: &O,
    x0: &[T],
    lower: &[T],
    upper: &[T],
    cfg: &OptimizerConfig<T>,
) -> Result<BoxOptimum<T>>
where
    T: Real,
    O: BoxObjective<T> + ?Sized,
{
    cfg.validate()?;
    let n = x0.len();
    if lower.len() != n || upper.len() != n {
        return Err(Error::InvalidArgument("bound vectors must match the start point".into()));
    }
    for k in 0..n {
        if !(lower[k] <= x0[k] && x0[k] <= upper[k]) {
            return Err(Error::Infeasible(k));
        }
    }
    let mut x = x0.to_vec();
    let mut value = objective.value(&x);
    if !value.is_finite() {
        return Err(Error::NonFinite { probe: x.iter().map(|v| v.as_f64()).collect() });
    }
    let scalar_cfg = OptimizerConfig { max_iterations: 200, ..*cfg };
    let mut sweeps = 0;
    let mut converged = n == 0;
    while !converged && sweeps < cfg.max_iterations {
        sweeps += 1;
        let before = value;
        for k in 0..n {
            if lower[k] == upper[k] {
                continue;
            }
            let current = x[k];
            let base = objective.partial(&x, k);
            let mut probe = x.clone();
            let found = maximize_scalar_bounded(
                |t| {
                    probe[k] = t;
                    objective.partial(&probe, k)
                },
                lower[k],
                upper[k],
                &scalar_cfg,
            );
            let found = match found {
                Ok(found) => found,
                Err(Error::NonFinite { probe: p }) => {
                    let mut full: Vec<f64> = x.iter().map(|v| v.as_f64()).collect();
                    full[k] = p[0];
                    return Err(Error::NonFinite { probe: full });
                }
                Err(e) => return Err(e),
            };
            x[k] = if found.value >= base { found.argmax } else { current };
        }
        value = objective.value(&x);
        if !value.is_finite() {
            return Err(Error::NonFinite { probe: x.iter().map(|v| v.as_f64()).collect() });
        }
        let scale = value.abs().max(T::one());
        converged = (value - before).abs() <= cfg.rel_ll_tolerance * scale;
    }
    Ok(BoxOptimum { argmax: x, value, sweeps, converged })
}
