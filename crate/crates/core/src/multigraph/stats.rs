use std::collections::HashSet;

use super::{BlockAssignment, MultiGraph, TemporalContactLog};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// The descriptive columns of a dataset summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphSummary<T> {
    pub n_nodes: usize,
    /// Connected pairs `M`.
    pub links: u64,
    /// Multi-edges `m`.
    pub multi_edges: u64,
    /// `M / P`.
    pub density: T,
    /// `m / P`.
    pub rho: T,
    /// Excess kurtosis of the pair-count distribution, zeros included;
    /// `None` when every pair has the same count.
    pub excess_kurtosis: Option<T>,
}

pub fn summary_stats<T: Real>(g: &MultiGraph) -> GraphSummary<T> {
    let p = T::count(g.space().size());
    let (links, m) = (g.links(), g.multi_edges());
    let ratio = |x: u64| if p > T::zero() { T::count(x) / p } else { T::zero() };
    GraphSummary {
        n_nodes: g.n_nodes(),
        links,
        multi_edges: m,
        density: ratio(links),
        rho: ratio(m),
        excess_kurtosis: pair_count_kurtosis(g).ok(),
    }
}

/// Population excess kurtosis `m4 / m2^2 - 3` using uncorrected central moments.
pub fn excess_kurtosis<T: Real>(values: &[T]) -> Result<T> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument("kurtosis needs at least two values".into()));
    }
    let n = T::count(values.len() as u64);
    let mean = values.iter().copied().sum::<T>() / n;
    let (mut m2, mut m4) = (T::zero(), T::zero());
    for &v in values {
        let d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    if !(m2 > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    Ok(m4 / (m2 * m2) - T::lit(3.0))
}

/// Excess kurtosis over all `P` pair counts without materializing the zeros.
pub fn pair_count_kurtosis<T: Real>(g: &MultiGraph) -> Result<T> {
    let total = g.space().size();
    if total < 2 {
        return Err(Error::InvalidArgument("kurtosis needs at least two pairs".into()));
    }
    let p = T::count(total);
    let mean = T::count(g.multi_edges()) / p;
    let zeros = T::count(total - g.links());
    let mean2 = mean * mean;
    let (mut m2, mut m4) = (zeros * mean2, zeros * mean2 * mean2);
    for (_, _, w) in g.edges() {
        let d = T::count(w) - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= p;
    m4 /= p;
    if !(m2 > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    Ok(m4 / (m2 * m2) - T::lit(3.0))
}

/// Per-block-pair counts. Undirected graphs populate only `b <= d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTallies {
    pub n_blocks: usize,
    pub directed: bool,
    /// Multi-edges `m_bd`, row-major `B x B`.
    pub multi_edges: Vec<u64>,
    /// Connected pairs `M_bd`.
    pub links: Vec<u64>,
    /// Admissible pairs `P_bd`.
    pub pairs: Vec<u64>,
    pub sizes: Vec<usize>,
    /// Block degrees; for undirected graphs both hold `sum_{i in b} k_i`.
    pub kappa_out: Vec<u64>,
    pub kappa_in: Vec<u64>,
}

impl BlockTallies {
    #[inline]
    pub fn idx(&self, b: usize, d: usize) -> usize {
        b * self.n_blocks + d
    }

    /// Canonical block pairs: all ordered pairs, or `b <= d` when undirected.
    pub fn block_pairs(&self) -> Vec<(usize, usize)> {
        let b = self.n_blocks;
        (0..b)
            .flat_map(|x| (0..b).map(move |y| (x, y)))
            .filter(|&(x, y)| self.directed || x <= y)
            .collect()
    }

    pub fn canonical(&self, b: usize, d: usize) -> (usize, usize) {
        if self.directed || b <= d {
            (b, d)
        } else {
            (d, b)
        }
    }
}

pub fn block_tallies(g: &MultiGraph, blocks: &BlockAssignment) -> Result<BlockTallies> {
    blocks.check_nodes(g.n_nodes())?;
    let space = g.space();
    let nb = blocks.n_blocks();
    let sizes = blocks.sizes();
    let mut t = BlockTallies {
        n_blocks: nb,
        directed: space.directed,
        multi_edges: vec![0; nb * nb],
        links: vec![0; nb * nb],
        pairs: vec![0; nb * nb],
        sizes: sizes.clone(),
        kappa_out: vec![0; nb],
        kappa_in: vec![0; nb],
    };
    for (i, j, w) in g.edges() {
        let (b, d) = t.canonical(blocks.block_of(i), blocks.block_of(j));
        let k = t.idx(b, d);
        t.multi_edges[k] += w;
        t.links[k] += 1;
    }
    for b in 0..nb {
        for d in 0..nb {
            let (nbs, nds) = (sizes[b] as u64, sizes[d] as u64);
            let count = match (space.directed, space.loops) {
                (true, true) => nbs * nds,
                (true, false) => nbs * nds - if b == d { nbs } else { 0 },
                _ if b < d => nbs * nds,
                _ if b == d => nbs * nbs.saturating_sub(1) / 2,
                _ => 0,
            };
            let k = t.idx(b, d);
            t.pairs[k] = count;
        }
    }
    let (k_out, k_in) = g.degrees();
    for i in 0..g.n_nodes() {
        let b = blocks.block_of(i);
        t.kappa_out[b] += k_out[i];
        t.kappa_in[b] += k_in[i];
    }
    Ok(t)
}

/// Statistics of the aggregate graph of a growing time prefix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrefixPoint<T> {
    /// Records with timestamp `<= time` are included.
    pub time: i64,
    pub multi_edges: u64,
    pub links: u64,
    pub rho: T,
    pub density: T,
}

/// Summary of the aggregation of `n_points` equally spaced prefixes of the log,
/// the last one being the whole log. All prefixes share the full node set.
pub fn prefix_series<T: Real>(log: &TemporalContactLog, n_points: usize) -> Result<Vec<PrefixPoint<T>>> {
    if n_points < 2 {
        return Err(Error::InvalidArgument("prefix series needs at least two points".into()));
    }
    if log.is_empty() {
        return Err(Error::EmptyInput);
    }
    let p = T::count(super::PairSpace::undirected(log.labels().len()).size());
    let (t0, t1) = log.time_range();
    let span = (t1 - t0) as i128;
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut m = 0u64;
    let mut cursor = 0;
    let records = log.records();
    let mut out = Vec::with_capacity(n_points);
    for k in 0..n_points {
        let time = if k + 1 == n_points { t1 } else { t0 + (span * k as i128 / (n_points as i128 - 1)) as i64 };
        while cursor < records.len() && records[cursor].time <= time {
            let c = records[cursor];
            seen.insert((c.a.min(c.b), c.a.max(c.b)));
            m += 1;
            cursor += 1;
        }
        let links = seen.len() as u64;
        out.push(PrefixPoint { time, multi_edges: m, links, rho: T::count(m) / p, density: T::count(links) / p });
    }
    Ok(out)
}
