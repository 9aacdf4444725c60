//! Plain and zero-inflated Poisson network models: pair laws, likelihood,
//! maximum-likelihood fitting and sampling.

mod fit;
mod node_level;
mod persist;
mod rates;
mod sample;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::{Bin, CountHistogram, HistogramSource};
use crate::multigraph::{BlockAssignment, MultiGraph, PairSpace};
use crate::numerics::ln_factorial;
use crate::scalar::Real;

pub use fit::{
    fit, fit_poisson, fit_zi_clcm, fit_zi_dcsbm, fit_zi_dcsbm_constrained, fit_zi_gnp, fit_zi_sbm, zi_gnp_closed_form,
    zip_profile_log_likelihood, BlockConstants, ZiGnpSolution,
};
pub use node_level::{fit_zi_node_level, NodeBlockMixing, NodeLevelOptions};
pub use persist::ModelFile;
pub use sample::{sample, sample_poisson};
pub use sample::splitmix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelFamily {
    Gnp,
    Sbm,
    Clcm,
    Dcsbm,
    ZiGnp,
    ZiSbm,
    ZiClcm,
    ZiDcsbm,
    ZiClcmNode,
    ZiDcsbmNode,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 10] = [
        ModelFamily::Gnp,
        ModelFamily::Sbm,
        ModelFamily::Clcm,
        ModelFamily::Dcsbm,
        ModelFamily::ZiGnp,
        ModelFamily::ZiSbm,
        ModelFamily::ZiClcm,
        ModelFamily::ZiDcsbm,
        ModelFamily::ZiClcmNode,
        ModelFamily::ZiDcsbmNode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Gnp => "GNP",
            ModelFamily::Sbm => "SBM",
            ModelFamily::Clcm => "CLCM",
            ModelFamily::Dcsbm => "DCSBM",
            ModelFamily::ZiGnp => "ZI_GNP",
            ModelFamily::ZiSbm => "ZI_SBM",
            ModelFamily::ZiClcm => "ZI_CLCM",
            ModelFamily::ZiDcsbm => "ZI_DCSBM",
            ModelFamily::ZiClcmNode => "ZI_CLCM_NODE",
            ModelFamily::ZiDcsbmNode => "ZI_DCSBM_NODE",
        }
    }

    pub fn requires_blocks(self) -> bool {
        matches!(
            self,
            ModelFamily::Sbm | ModelFamily::Dcsbm | ModelFamily::ZiSbm | ModelFamily::ZiDcsbm | ModelFamily::ZiDcsbmNode
        )
    }

    pub fn is_zero_inflated(self) -> bool {
        !matches!(self, ModelFamily::Gnp | ModelFamily::Sbm | ModelFamily::Clcm | ModelFamily::Dcsbm)
    }

    pub fn has_node_parameters(self) -> bool {
        matches!(
            self,
            ModelFamily::Clcm
                | ModelFamily::Dcsbm
                | ModelFamily::ZiClcm
                | ModelFamily::ZiDcsbm
                | ModelFamily::ZiClcmNode
                | ModelFamily::ZiDcsbmNode
        )
    }

    /// The Poisson family the zero-inflated one extends.
    pub fn plain(self) -> ModelFamily {
        match self {
            ModelFamily::ZiGnp => ModelFamily::Gnp,
            ModelFamily::ZiSbm => ModelFamily::Sbm,
            ModelFamily::ZiClcm | ModelFamily::ZiClcmNode => ModelFamily::Clcm,
            ModelFamily::ZiDcsbm | ModelFamily::ZiDcsbmNode => ModelFamily::Dcsbm,
            plain => plain,
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        let norm = norm.replace("G(N,P)", "GNP");
        ModelFamily::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model family {s:?}")))
    }
}

/// The law of one pair: `(1 - q) delta_0 + q Poisson(lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairLaw<T> {
    pub q: T,
    pub lambda: T,
}

impl<T: Real> PairLaw<T> {
    pub fn poisson(lambda: T) -> Self {
        Self { q: T::one(), lambda }
    }

    pub fn mean(&self) -> T {
        self.q * self.lambda
    }

    /// `P(A = 0) = (1 - q) + q e^-lambda`.
    pub fn zero_probability(&self) -> T {
        T::one() - self.link_probability()
    }

    /// `P(A > 0) = q (1 - e^-lambda)`.
    pub fn link_probability(&self) -> T {
        self.q * -(-self.lambda).exp_m1()
    }
}

/// `ln((1 - q) + q e^-lambda)`, switching to a log-sum-exp once the zero
/// probability is small so that `q` near 1 with large `lambda` stays finite.
pub fn ln_zero_probability<T: Real>(q: T, lambda: T) -> T {
    let link = q * -(-lambda).exp_m1();
    if link < T::lit(0.5) {
        return (-link).ln_1p();
    }
    let a = (-q).ln_1p();
    let b = q.ln() - lambda;
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln P(A = n)` under the pair law; `-inf` for impossible counts.
pub fn zip_log_pmf<T: Real>(n: u64, law: PairLaw<T>) -> T {
    if n == 0 {
        return ln_zero_probability(law.q, law.lambda);
    }
    if law.q <= T::zero() || law.lambda <= T::zero() {
        return T::neg_infinity();
    }
    law.q.ln() + T::count(n) * law.lambda.ln() - law.lambda - ln_factorial::<T>(n)
}

pub fn zip_pmf<T: Real>(n: u64, law: PairLaw<T>) -> T {
    if n == 0 {
        law.zero_probability()
    } else {
        zip_log_pmf(n, law).exp()
    }
}

/// Adds `weight * Pois(n; lambda)` to `out[n]` for `n < out.len()`, skipping
/// terms below `1e-300`. Returns the mass added.
pub(crate) fn add_poisson_pmf<T: Real>(lambda: T, weight: T, out: &mut [T]) -> T {
    let max = out.len().saturating_sub(1);
    if out.is_empty() || weight == T::zero() {
        return T::zero();
    }
    if lambda <= T::zero() {
        out[0] += weight;
        return weight;
    }
    let floor = T::lit(1e-300).max(T::min_positive_value());
    let start = lambda.floor().to_usize().unwrap_or(usize::MAX).min(max);
    let peak = (T::count(start as u64) * lambda.ln() - lambda - ln_factorial::<T>(start as u64)).exp();
    let mut added = T::zero();
    out[start] += weight * peak;
    added += weight * peak;
    let mut p = peak;
    for n in (0..start).rev() {
        p = p * T::count(n as u64 + 1) / lambda;
        if p < floor {
            break;
        }
        out[n] += weight * p;
        added += weight * p;
    }
    p = peak;
    for n in start + 1..=max {
        p = p * lambda / T::count(n as u64);
        if p < floor {
            break;
        }
        out[n] += weight * p;
        added += weight * p;
    }
    added
}

/// Identifiability constraint recorded with a fit.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint<T> {
    None,
    /// `sum_i theta_i^out = out`, `sum_i theta_i^in = in_` (configuration model).
    Total { out: T, in_: T },
    /// Per-block totals `C_b^out`, `C_b^in` (degree-corrected block model).
    BlockTotals { out: Vec<T>, in_: Vec<T> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitDiagnostics<T> {
    pub log_likelihood: T,
    /// Sweeps of the rate fitting plus the mixture optimization.
    pub iterations: usize,
    pub converged: bool,
    /// Set when a mixture weight fell back to 1 (counts are binary or
    /// under-dispersed, so no inflation improves the fit).
    pub binary_fallback: bool,
    /// Independent mixture-weight problems solved (one per block pair).
    pub optimization_problems: usize,
}

impl<T: Real> Default for FitDiagnostics<T> {
    fn default() -> Self {
        Self {
            log_likelihood: T::nan(),
            iterations: 0,
            converged: true,
            binary_fallback: false,
            optimization_problems: 0,
        }
    }
}

/// A fitted model. Exactly the parameters of `family` are present.
///
/// Block matrices are row-major `B x B` and symmetric for undirected graphs.
/// The pair rate is `lambda_ij = p * theta_i^out theta_j^in * lambda_{b_i b_j}`
/// with absent factors equal to one; the mixture weight is
/// `q_ij = q * q_{b_i b_j} * q_i^out q_j^in` likewise.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel<T> {
    pub family: ModelFamily,
    pub space: PairSpace,
    pub node_ids: Vec<String>,
    pub blocks: Option<BlockAssignment>,
    pub p: Option<T>,
    pub lambda_blocks: Option<Vec<T>>,
    pub theta_out: Option<Vec<T>>,
    pub theta_in: Option<Vec<T>>,
    pub q_global: Option<T>,
    pub q_blocks: Option<Vec<T>>,
    pub q_nodes_out: Option<Vec<T>>,
    pub q_nodes_in: Option<Vec<T>>,
    pub node_mixing: Option<NodeBlockMixing>,
    pub constraint: Constraint<T>,
    pub diagnostics: FitDiagnostics<T>,
}

impl<T: Real> FittedModel<T> {
    pub(crate) fn bare(family: ModelFamily, g: &MultiGraph) -> Self {
        Self {
            family,
            space: g.space(),
            node_ids: g.node_ids().to_vec(),
            blocks: None,
            p: None,
            lambda_blocks: None,
            theta_out: None,
            theta_in: None,
            q_global: None,
            q_blocks: None,
            q_nodes_out: None,
            q_nodes_in: None,
            node_mixing: None,
            constraint: Constraint::None,
            diagnostics: FitDiagnostics::default(),
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.as_ref().map_or(1, |b| b.n_blocks())
    }

    #[inline]
    fn law_unchecked(&self, i: usize, j: usize) -> PairLaw<T> {
        let one = T::one();
        let nb = self.n_blocks();
        let bpair = self.blocks.as_ref().map(|b| b.block_of(i) * nb + b.block_of(j));
        let mut lambda = self.p.unwrap_or(one);
        if let (Some(t_out), Some(t_in)) = (&self.theta_out, &self.theta_in) {
            lambda *= t_out[i] * t_in[j];
        }
        if let (Some(lb), Some(k)) = (&self.lambda_blocks, bpair) {
            lambda *= lb[k];
        }
        let mut q = self.q_global.unwrap_or(one);
        if let (Some(qb), Some(k)) = (&self.q_blocks, bpair) {
            q *= qb[k];
        }
        if let (Some(q_out), Some(q_in)) = (&self.q_nodes_out, &self.q_nodes_in) {
            q *= q_out[i] * q_in[j];
        }
        PairLaw { q, lambda }
    }

    /// The law of pair `(i, j)`; undirected pairs may be given in either order.
    pub fn pair_law(&self, i: usize, j: usize) -> Result<PairLaw<T>> {
        let (a, b) = self.space.canonical(i, j).ok_or(Error::InadmissiblePair(i, j))?;
        Ok(self.law_unchecked(a, b))
    }

    /// Laws of every admissible pair in pair order.
    pub fn pair_laws(&self) -> impl Iterator<Item = (usize, usize, PairLaw<T>)> + '_ {
        self.space.pairs().map(move |(i, j)| (i, j, self.law_unchecked(i, j)))
    }

    fn check_space(&self, g: &MultiGraph) -> Result<()> {
        if self.space != g.space() {
            return Err(Error::PairSpaceMismatch { model: self.space.describe(), graph: g.space().describe() });
        }
        Ok(())
    }

    /// Sum of `ln P(A_ij)` over admissible pairs; `-inf` when some observed
    /// count has zero probability.
    pub fn log_likelihood(&self, g: &MultiGraph) -> Result<T> {
        self.check_space(g)?;
        let mut total = T::zero();
        for (i, j, a) in g.pair_counts() {
            total += zip_log_pmf(a, self.law_unchecked(i, j));
        }
        Ok(total)
    }

    /// `(E[m], E[M]) = (sum q lambda, sum q (1 - e^-lambda))`.
    pub fn expected_edges_links(&self) -> (T, T) {
        let mut em = T::zero();
        let mut e_links = T::zero();
        for (_, _, law) in self.pair_laws() {
            em += law.mean();
            e_links += law.link_probability();
        }
        (em, e_links)
    }

    /// Expected out- and in-degrees. Undirected pairs count at both endpoints.
    pub fn expected_degrees(&self) -> Result<(Vec<T>, Vec<T>)> {
        if !self.family.has_node_parameters() {
            return Err(Error::FamilyMismatch(self.family.name()));
        }
        let n = self.space.n;
        let mut k_out = vec![T::zero(); n];
        let mut k_in = vec![T::zero(); n];
        for (i, j, law) in self.pair_laws() {
            let mu = law.mean();
            k_out[i] += mu;
            k_in[j] += mu;
            if !self.space.directed {
                k_out[j] += mu;
                k_in[i] += mu;
            }
        }
        Ok((k_out, k_in))
    }

    /// Expected block tallies `E[m_bd]` (canonical block pairs only when undirected).
    pub fn expected_block_edges(&self) -> Vec<T> {
        let nb = self.n_blocks();
        let mut out = vec![T::zero(); nb * nb];
        for (i, j, law) in self.pair_laws() {
            let (mut b, mut d) = match &self.blocks {
                Some(bl) => (bl.block_of(i), bl.block_of(j)),
                None => (0, 0),
            };
            if !self.space.directed && b > d {
                std::mem::swap(&mut b, &mut d);
            }
            out[b * nb + d] += law.mean();
        }
        out
    }

    /// Pair-averaged edge-count distribution: unit bins `0..=max_count` and
    /// an open tail bin.
    pub fn expected_count_distribution(&self, max_count: u64) -> Result<CountHistogram<T>> {
        if max_count < 1 {
            return Err(Error::InvalidArgument("max_count must be at least 1".into()));
        }
        let size = max_count as usize + 1;
        let mut mass = vec![T::zero(); size + 1];
        let mut buf = vec![T::zero(); size];
        let p = T::count(self.space.size());
        for (_, _, law) in self.pair_laws() {
            for v in buf.iter_mut() {
                *v = T::zero();
            }
            let within = add_poisson_pmf(law.lambda, law.q, &mut buf);
            buf[0] += T::one() - law.q;
            for (m, b) in mass.iter_mut().zip(&buf) {
                *m += *b;
            }
            mass[size] += (law.q - within).max(T::zero());
        }
        for m in mass.iter_mut() {
            *m /= p;
        }
        let mut bins: Vec<Bin> = (0..=max_count).map(|n| Bin { lo: n, hi: Some(n) }).collect();
        bins.push(Bin { lo: max_count + 1, hi: None });
        Ok(CountHistogram { bins, mass, source: HistogramSource::ModelExpected })
    }

    /// Expected count matrix entries `E[A_ij] = q_ij lambda_ij` in pair order.
    pub fn expected_counts(&self) -> Vec<T> {
        self.pair_laws().map(|(_, _, law)| law.mean()).collect()
    }
}
