//! Maximum-likelihood fitting of the plain and zero-inflated families.
//!
//! Every zero-inflated fit starts from the plain Poisson fit of the same
//! family. Its expected counts `omega_ij` are kept and the rate becomes
//! `lambda_ij = omega_ij / q_ij`, so expected degrees and block tallies are
//! the observed ones for any `q`. The mixture weights are then chosen by
//! profile likelihood.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multigraph::{block_tallies, BlockAssignment, MultiGraph};
use crate::numerics::{lambert_w0, ln_factorial, maximize_scalar_bounded, OptimizerConfig};
use crate::scalar::Real;

use super::node_level::{fit_zi_node_level, NodeLevelOptions};
use super::rates::{block_rates, degree_corrected, RateStructure};
use super::{ln_zero_probability, Constraint, FittedModel, ModelFamily};

/// Per-block normalizations `sum_{i in b} theta_i^out = out[b]` (and `in_`).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockConstants<T> {
    pub out: Vec<T>,
    pub in_: Vec<T>,
}

impl<T: Real> BlockConstants<T> {
    pub fn ones(n_blocks: usize) -> Self {
        Self { out: vec![T::one(); n_blocks], in_: vec![T::one(); n_blocks] }
    }

    pub(crate) fn check(&self, n_blocks: usize, directed: bool) -> Result<()> {
        if self.out.len() != n_blocks || self.in_.len() != n_blocks {
            return Err(Error::InvalidArgument(format!("expected {n_blocks} block constants per side")));
        }
        if self.out.iter().chain(&self.in_).any(|c| !(*c > T::zero() && c.is_finite())) {
            return Err(Error::InvalidArgument("block constants must be positive and finite".into()));
        }
        if !directed && self.out != self.in_ {
            return Err(Error::InvalidArgument("undirected graphs need equal in and out constants".into()));
        }
        Ok(())
    }
}

/// Closed-form zero-inflated G(N,p) estimate for one set of pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZiGnpSolution<T> {
    pub q: T,
    pub lambda: T,
    /// `q` was set to 1 because the counts show no over-dispersion.
    pub fallback: bool,
}

/// Maximum-likelihood `(q, lambda)` from `m` multi-edges on `links` connected
/// pairs out of `pairs`.
///
/// `lambda` solves `lambda / (1 - e^-lambda) = m / M`, i.e.
/// `lambda = m/M + W0(-(m/M) e^(-m/M))`, and `q = m / (P lambda)`.
/// With `m/M <= 1 + 1e-9` (binary counts) or an estimate above one the
/// plain Poisson answer `q = 1, lambda = m / P` is returned instead.
/// No pairs or no edges give `(0, 0)`.
pub fn zi_gnp_closed_form<T: Real>(m: u64, links: u64, pairs: u64) -> Result<ZiGnpSolution<T>> {
    if links > pairs || links > m || (m > 0 && links == 0) {
        return Err(Error::InvalidArgument(format!("inconsistent tallies m={m} M={links} P={pairs}")));
    }
    if pairs == 0 || m == 0 {
        return Ok(ZiGnpSolution { q: T::zero(), lambda: T::zero(), fallback: false });
    }
    let plain = ZiGnpSolution { q: T::one(), lambda: T::count(m) / T::count(pairs), fallback: true };
    let r = T::count(m) / T::count(links);
    if r <= T::one() + T::lit(1e-9) {
        return Ok(plain);
    }
    let w = lambert_w0(-r * (-r).exp())?;
    let lambda = r + w;
    let q = T::count(m) / (T::count(pairs) * lambda);
    if !(q > T::zero()) || !lambda.is_finite() {
        return Err(Error::Consistency(format!("zero-inflated estimate q={q} for m={m} M={links} P={pairs}")));
    }
    if q > T::one() {
        return Ok(plain);
    }
    Ok(ZiGnpSolution { q, lambda, fallback: false })
}

/// Profile log-likelihood of one mixture weight given fixed expected counts.
///
/// Positive-count pairs collapse into sufficient statistics, so only the
/// zero pairs are visited per evaluation.
#[derive(Debug, Clone)]
pub(crate) struct Profile<T> {
    pub zeros: Vec<T>,
    pub links: u64,
    pub edges: u64,
    pub pairs: u64,
    pub omega_positive: T,
    pub constant: T,
}

impl<T: Real> Profile<T> {
    pub fn new() -> Self {
        Self {
            zeros: Vec::new(),
            links: 0,
            edges: 0,
            pairs: 0,
            omega_positive: T::zero(),
            constant: T::zero(),
        }
    }

    pub fn push(&mut self, omega: T, a: u64) {
        self.pairs += 1;
        if a == 0 {
            if omega > T::zero() {
                self.zeros.push(omega);
            }
        } else {
            self.links += 1;
            self.edges += a;
            self.omega_positive += omega;
            self.constant += T::count(a) * omega.ln() - ln_factorial::<T>(a);
        }
    }

    pub fn value(&self, q: T) -> T {
        let mut s = T::zero();
        for &w in &self.zeros {
            s += ln_zero_probability(q, w / q);
        }
        let lnq = q.ln();
        s + (T::count(self.links) - T::count(self.edges)) * lnq - self.omega_positive / q + self.constant
    }

    /// Maximizes over `(M/P + 1e-12, 1]`; returns `(q, evaluations, converged)`.
    pub fn solve(&self) -> Result<(T, usize, bool)> {
        if self.edges == 0 {
            return Ok((T::zero(), 0, true));
        }
        let lo = T::count(self.links) / T::count(self.pairs) + T::lit(1e-12);
        if lo >= T::one() {
            return Ok((T::one(), 0, true));
        }
        let cfg = OptimizerConfig { abs_tolerance: T::resolvable(1e-12, 16.0), ..OptimizerConfig::scalar() };
        let opt = maximize_scalar_bounded(|q| self.value(q), lo, T::one(), &cfg)?;
        Ok((opt.argmax, opt.evaluations, opt.converged))
    }
}

/// Profile log-likelihood `l(q)` of a shared mixture weight for pairs with
/// expected counts `omega` and observed counts `a`, where each pair has rate
/// `omega / q`.
pub fn zip_profile_log_likelihood<T: Real>(q: T, omega: &[T], a: &[u64]) -> T {
    let mut p = Profile::new();
    for (w, c) in omega.iter().zip(a) {
        p.push(*w, *c);
    }
    p.value(q)
}

fn require_blocks<'a>(family: ModelFamily, blocks: Option<&'a BlockAssignment>) -> Result<&'a BlockAssignment> {
    blocks.ok_or(Error::BlocksRequired(family.name()))
}

fn block_sums<T: Real>(theta: &[T], labels: &[usize], nb: usize) -> Vec<T> {
    let mut s = vec![T::zero(); nb];
    for (v, &b) in theta.iter().zip(labels) {
        s[b] += *v;
    }
    s
}

/// Matrix slots a canonical block pair fills: itself, plus its mirror when
/// undirected.
fn mirrored(directed: bool, nb: usize, b: usize, d: usize) -> impl Iterator<Item = usize> {
    let second = (!directed && b != d).then_some(d * nb + b);
    std::iter::once(b * nb + d).chain(second)
}

fn finish<T: Real>(mut model: FittedModel<T>, g: &MultiGraph) -> Result<FittedModel<T>> {
    model.diagnostics.log_likelihood = model.log_likelihood(g)?;
    Ok(model)
}

/// Fits any family. Families without blocks ignore `blocks`.
pub fn fit<T: Real>(g: &MultiGraph, family: ModelFamily, blocks: Option<&BlockAssignment>) -> Result<FittedModel<T>> {
    match family {
        ModelFamily::Gnp | ModelFamily::Sbm | ModelFamily::Clcm | ModelFamily::Dcsbm => fit_poisson(g, family, blocks),
        ModelFamily::ZiGnp => fit_zi_gnp(g),
        ModelFamily::ZiSbm => fit_zi_sbm(g, require_blocks(family, blocks)?),
        ModelFamily::ZiClcm => fit_zi_clcm(g),
        ModelFamily::ZiDcsbm => fit_zi_dcsbm(g, require_blocks(family, blocks)?),
        ModelFamily::ZiClcmNode | ModelFamily::ZiDcsbmNode => {
            fit_zi_node_level(g, family, blocks, &NodeLevelOptions::default())
        }
    }
}

/// Fits a plain Poisson family.
pub fn fit_poisson<T: Real>(
    g: &MultiGraph,
    family: ModelFamily,
    blocks: Option<&BlockAssignment>,
) -> Result<FittedModel<T>> {
    if g.multi_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut model = FittedModel::bare(family, g);
    match family {
        ModelFamily::Gnp => {
            model.p = Some(T::count(g.multi_edges()) / T::count(g.space().size()));
        }
        ModelFamily::Sbm => {
            let blocks = require_blocks(family, blocks)?;
            let t = block_tallies(g, blocks)?;
            model.lambda_blocks = Some(block_rates(&t));
            model.blocks = Some(blocks.clone());
        }
        ModelFamily::Clcm => {
            let single = BlockAssignment::single(g.n_nodes());
            let (rs, _) = degree_corrected::<T>(g, &single, &BlockConstants::ones(1))?;
            let scale = rs.rates[0].sqrt();
            set_clcm_thetas(&mut model, &rs, |_| scale);
            model.diagnostics.iterations = rs.sweeps;
            model.diagnostics.converged = rs.converged;
        }
        ModelFamily::Dcsbm => {
            let blocks = require_blocks(family, blocks)?;
            let nb = blocks.n_blocks();
            let (rs, _) = degree_corrected::<T>(g, blocks, &BlockConstants::ones(nb))?;
            model.diagnostics.iterations = rs.sweeps;
            model.diagnostics.converged = rs.converged;
            model.theta_out = Some(rs.theta_out);
            model.theta_in = Some(rs.theta_in);
            model.lambda_blocks = Some(rs.rates);
            model.blocks = Some(blocks.clone());
            model.constraint = Constraint::BlockTotals { out: vec![T::one(); nb], in_: vec![T::one(); nb] };
        }
        other => return Err(Error::FamilyMismatch(other.name())),
    }
    finish(model, g)
}

/// Chung-Lu parametrization: `theta_i = theta_i^rate * scale(i)`, where
/// `scale` folds the single block rate (and any mixture weight) into theta.
pub(crate) fn set_clcm_thetas<T: Real>(model: &mut FittedModel<T>, rs: &RateStructure<T>, scale: impl Fn(usize) -> T) {
    let t_out: Vec<T> = rs.theta_out.iter().enumerate().map(|(i, v)| *v * scale(i)).collect();
    let t_in: Vec<T> = rs.theta_in.iter().enumerate().map(|(i, v)| *v * scale(i)).collect();
    model.constraint = Constraint::Total { out: t_out.iter().copied().sum(), in_: t_in.iter().copied().sum() };
    model.theta_out = Some(t_out);
    model.theta_in = Some(t_in);
}

/// Zero-inflated G(N,p): closed form, one global mixture weight.
pub fn fit_zi_gnp<T: Real>(g: &MultiGraph) -> Result<FittedModel<T>> {
    if g.multi_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let sol = zi_gnp_closed_form::<T>(g.multi_edges(), g.links(), g.space().size())?;
    let mut model = FittedModel::bare(ModelFamily::ZiGnp, g);
    model.q_global = Some(sol.q);
    model.p = Some(sol.lambda);
    model.diagnostics.binary_fallback = sol.fallback;
    model.diagnostics.optimization_problems = 1;
    finish(model, g)
}

/// Zero-inflated SBM: the G(N,p) closed form within every block pair.
/// Block pairs without edges get `q = lambda = 0`.
pub fn fit_zi_sbm<T: Real>(g: &MultiGraph, blocks: &BlockAssignment) -> Result<FittedModel<T>> {
    if g.multi_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let t = block_tallies(g, blocks)?;
    let nb = t.n_blocks;
    let mut q = vec![T::zero(); nb * nb];
    let mut lambda = vec![T::zero(); nb * nb];
    let mut fallback = false;
    let block_pairs = t.block_pairs();
    for &(b, d) in &block_pairs {
        let k = t.idx(b, d);
        let sol = zi_gnp_closed_form::<T>(t.multi_edges[k], t.links[k], t.pairs[k])?;
        fallback |= sol.fallback;
        for k in mirrored(t.directed, nb, b, d) {
            q[k] = sol.q;
            lambda[k] = sol.lambda;
        }
    }
    let mut model = FittedModel::bare(ModelFamily::ZiSbm, g);
    model.blocks = Some(blocks.clone());
    model.q_blocks = Some(q);
    model.lambda_blocks = Some(lambda);
    model.diagnostics.binary_fallback = fallback;
    model.diagnostics.optimization_problems = block_pairs.len();
    finish(model, g)
}

/// Zero-inflated Chung-Lu model with one global mixture weight.
///
/// `lambda_ij = theta_i^out theta_j^in` with `theta = theta^plain / sqrt(q)`;
/// the resulting totals are recorded in the constraint.
pub fn fit_zi_clcm<T: Real>(g: &MultiGraph) -> Result<FittedModel<T>> {
    let single = BlockAssignment::single(g.n_nodes());
    let (rs, _) = degree_corrected::<T>(g, &single, &BlockConstants::ones(1))?;
    let mut profile = Profile::new();
    for (i, j, a) in g.pair_counts() {
        profile.push(rs.omega(i, j), a);
    }
    let (q, evals, converged) = profile.solve()?;
    let mut model = FittedModel::bare(ModelFamily::ZiClcm, g);
    let scale = (rs.rates[0] / q).sqrt();
    set_clcm_thetas(&mut model, &rs, |_| scale);
    model.q_global = Some(q);
    model.diagnostics.iterations = rs.sweeps + evals;
    model.diagnostics.converged = rs.converged && converged;
    model.diagnostics.binary_fallback = q == T::one();
    model.diagnostics.optimization_problems = 1;
    finish(model, g)
}

/// Zero-inflated DCSBM with `sum_{i in b} theta_i = 1` per block and side.
pub fn fit_zi_dcsbm<T: Real>(g: &MultiGraph, blocks: &BlockAssignment) -> Result<FittedModel<T>> {
    fit_zi_dcsbm_constrained(g, blocks, &BlockConstants::ones(blocks.n_blocks()))
}

/// Zero-inflated DCSBM under arbitrary positive block constants.
///
/// The node parameters follow in closed form from the plain fit; what is left
/// are `B^2` (directed) or `B(B+1)/2` (undirected) independent one-dimensional
/// problems for the block mixture weights, solved in parallel. The constants
/// only rescale `theta` against `lambda_bd`; the pair laws do not change.
pub fn fit_zi_dcsbm_constrained<T: Real>(
    g: &MultiGraph,
    blocks: &BlockAssignment,
    constants: &BlockConstants<T>,
) -> Result<FittedModel<T>> {
    let (rs, t) = degree_corrected::<T>(g, blocks, constants)?;
    let nb = t.n_blocks;
    let mut profiles: Vec<Profile<T>> = (0..nb * nb).map(|_| Profile::new()).collect();
    for (i, j, a) in g.pair_counts() {
        let (b, d) = t.canonical(blocks.block_of(i), blocks.block_of(j));
        profiles[t.idx(b, d)].push(rs.omega(i, j), a);
    }
    let block_pairs = t.block_pairs();
    let solved: Vec<(T, usize, bool)> = block_pairs
        .par_iter()
        .map(|&(b, d)| profiles[t.idx(b, d)].solve())
        .collect::<Result<_>>()?;

    let mut q = vec![T::zero(); nb * nb];
    let mut lambda = vec![T::zero(); nb * nb];
    let mut evals = 0;
    let mut converged = rs.converged;
    let mut fallback = false;
    for (&(b, d), &(qbd, e, c)) in block_pairs.iter().zip(&solved) {
        evals += e;
        converged &= c;
        fallback |= qbd == T::one();
        let l = if qbd > T::zero() { rs.rate(b, d) / qbd } else { T::zero() };
        for k in mirrored(t.directed, nb, b, d) {
            q[k] = qbd;
            lambda[k] = l;
        }
    }
    let mut model = FittedModel::bare(ModelFamily::ZiDcsbm, g);
    debug_assert!({
        let s = block_sums(&rs.theta_out, &rs.labels, nb);
        s.iter().zip(&constants.out).all(|(a, c)| (*a - *c).abs() <= T::lit(1e-6) * *c)
    });
    model.theta_out = Some(rs.theta_out);
    model.theta_in = Some(rs.theta_in);
    model.blocks = Some(blocks.clone());
    model.q_blocks = Some(q);
    model.lambda_blocks = Some(lambda);
    model.constraint = Constraint::BlockTotals { out: constants.out.clone(), in_: constants.in_.clone() };
    model.diagnostics.iterations = rs.sweeps + evals;
    model.diagnostics.converged = converged;
    model.diagnostics.binary_fallback = fallback;
    model.diagnostics.optimization_problems = block_pairs.len();
    finish(model, g)
}
