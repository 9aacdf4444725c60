//! Poisson rate structures `omega_ij = theta_i^out theta_j^in Lambda_{b_i b_j}`.
//!
//! With self-loops on a directed graph the likelihood equations have a closed
//! form. Without loops (and for undirected graphs) they are solved by
//! iterative proportional fitting: alternately matching every node degree and
//! every block tally, which is coordinate ascent on the Poisson likelihood.

use crate::error::{Error, Result};
use crate::multigraph::{block_tallies, BlockAssignment, BlockTallies, MultiGraph};
use crate::scalar::Real;

use super::fit::BlockConstants;

const MAX_SWEEPS: usize = 20_000;

#[derive(Debug, Clone)]
pub(crate) struct RateStructure<T> {
    pub theta_out: Vec<T>,
    pub theta_in: Vec<T>,
    /// Full `B x B`, symmetric when undirected.
    pub rates: Vec<T>,
    pub labels: Vec<usize>,
    pub n_blocks: usize,
    pub sweeps: usize,
    pub converged: bool,
}

impl<T: Real> RateStructure<T> {
    #[inline]
    pub fn omega(&self, i: usize, j: usize) -> T {
        let k = self.labels[i] * self.n_blocks + self.labels[j];
        self.theta_out[i] * self.theta_in[j] * self.rates[k]
    }

    #[inline]
    pub fn rate(&self, b: usize, d: usize) -> T {
        self.rates[b * self.n_blocks + d]
    }
}

fn mirror<T: Real>(t: &BlockTallies, values: &mut [T]) {
    if t.directed {
        return;
    }
    for b in 0..t.n_blocks {
        for d in 0..b {
            values[t.idx(b, d)] = values[t.idx(d, b)];
        }
    }
}

fn ratio<T: Real>(num: u64, den: T) -> T {
    if num == 0 {
        T::zero()
    } else {
        T::count(num) / den
    }
}

/// Stochastic block model rates `m_bd / P_bd`.
pub(crate) fn block_rates<T: Real>(t: &BlockTallies) -> Vec<T> {
    let mut rates = vec![T::zero(); t.n_blocks * t.n_blocks];
    for (b, d) in t.block_pairs() {
        let k = t.idx(b, d);
        if t.pairs[k] > 0 {
            rates[k] = ratio(t.multi_edges[k], T::count(t.pairs[k]));
        }
    }
    mirror(t, &mut rates);
    rates
}

/// Degree-corrected rates with `sum_{i in b} theta_i = C_b` on each side.
pub(crate) fn degree_corrected<T: Real>(
    g: &MultiGraph,
    blocks: &BlockAssignment,
    constants: &BlockConstants<T>,
) -> Result<(RateStructure<T>, BlockTallies)> {
    let t = block_tallies(g, blocks)?;
    if g.multi_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    constants.check(blocks.n_blocks(), g.is_directed())?;
    for b in 0..t.n_blocks {
        if t.kappa_out[b] == 0 {
            return Err(Error::ZeroDegreeBlock { block: b, direction: "out" });
        }
        if t.directed && t.kappa_in[b] == 0 {
            return Err(Error::ZeroDegreeBlock { block: b, direction: "in" });
        }
    }
    let (k_out, k_in) = g.degrees();
    let labels = blocks.labels().to_vec();
    let nb = t.n_blocks;
    let theta_out: Vec<T> = (0..g.n_nodes())
        .map(|i| ratio(k_out[i], T::count(t.kappa_out[labels[i]])))
        .collect();
    let theta_in: Vec<T> = if t.directed {
        (0..g.n_nodes()).map(|i| ratio(k_in[i], T::count(t.kappa_in[labels[i]]))).collect()
    } else {
        theta_out.clone()
    };
    let mut rs = RateStructure {
        theta_out,
        theta_in,
        rates: vec![T::zero(); nb * nb],
        labels,
        n_blocks: nb,
        sweeps: 0,
        converged: true,
    };
    let space = g.space();
    if space.directed && space.loops {
        for (b, d) in t.block_pairs() {
            let k = t.idx(b, d);
            rs.rates[k] = T::count(t.multi_edges[k]);
        }
    } else if space.directed {
        ipf_directed(&mut rs, &t, &k_out, &k_in);
    } else {
        ipf_undirected(&mut rs, &t, &k_out);
    }
    normalize(&mut rs, constants);
    Ok((rs, t))
}

fn block_sums<T: Real>(theta: &[T], labels: &[usize], nb: usize) -> Vec<T> {
    let mut s = vec![T::zero(); nb];
    for (v, &b) in theta.iter().zip(labels) {
        s[b] += *v;
    }
    s
}

fn tolerance<T: Real>() -> T {
    T::resolvable(1e-13, 64.0)
}

fn relative_gap<T: Real>(expected: T, target: u64) -> T {
    (expected - T::count(target)).abs() / T::count(target.max(1))
}

fn ipf_undirected<T: Real>(rs: &mut RateStructure<T>, t: &BlockTallies, k: &[u64]) {
    let nb = rs.n_blocks;
    let n = rs.theta_out.len();
    let tol = tolerance::<T>();
    let half = T::lit(0.5);
    rs.converged = false;
    for sweep in 1..=MAX_SWEEPS {
        rs.sweeps = sweep;
        let tot = block_sums(&rs.theta_out, &rs.labels, nb);
        let mut sq = vec![T::zero(); nb];
        for i in 0..n {
            sq[rs.labels[i]] += rs.theta_out[i] * rs.theta_out[i];
        }
        for (b, d) in t.block_pairs() {
            let s = if b == d { half * (tot[b] * tot[b] - sq[b]) } else { tot[b] * tot[d] };
            rs.rates[t.idx(b, d)] = ratio(t.multi_edges[t.idx(b, d)], s);
        }
        mirror(t, &mut rs.rates);

        let reach = |rs: &RateStructure<T>, tot: &[T], i: usize| -> T {
            let b = rs.labels[i];
            let mut s = T::zero();
            for d in 0..nb {
                s += rs.rates[b * nb + d] * tot[d];
            }
            s - rs.theta_out[i] * rs.rates[b * nb + b]
        };
        let mut worst = T::zero();
        for i in 0..n {
            worst = worst.max(relative_gap(rs.theta_out[i] * reach(rs, &tot, i), k[i]));
        }
        if worst < tol {
            rs.converged = true;
            break;
        }
        let mut tot = tot;
        for i in 0..n {
            if k[i] == 0 {
                continue;
            }
            let den = reach(rs, &tot, i);
            if den > T::zero() {
                let new = T::count(k[i]) / den;
                tot[rs.labels[i]] += new - rs.theta_out[i];
                rs.theta_out[i] = new;
            }
        }
        let tot = block_sums(&rs.theta_out, &rs.labels, nb);
        for i in 0..n {
            rs.theta_out[i] /= tot[rs.labels[i]];
        }
    }
    rs.theta_in = rs.theta_out.clone();
}

fn ipf_directed<T: Real>(rs: &mut RateStructure<T>, t: &BlockTallies, k_out: &[u64], k_in: &[u64]) {
    let nb = rs.n_blocks;
    let n = rs.theta_out.len();
    let tol = tolerance::<T>();
    rs.converged = false;
    let diag = |rs: &RateStructure<T>| {
        let mut dsum = vec![T::zero(); nb];
        for i in 0..n {
            dsum[rs.labels[i]] += rs.theta_out[i] * rs.theta_in[i];
        }
        dsum
    };
    // sum_j theta_j^in Lambda_{b_i b_j} over j != i
    let reach_out = |rs: &RateStructure<T>, tin: &[T], i: usize| -> T {
        let b = rs.labels[i];
        let mut s = T::zero();
        for d in 0..nb {
            s += rs.rates[b * nb + d] * tin[d];
        }
        s - rs.theta_in[i] * rs.rates[b * nb + b]
    };
    let reach_in = |rs: &RateStructure<T>, tout: &[T], j: usize| -> T {
        let d = rs.labels[j];
        let mut s = T::zero();
        for b in 0..nb {
            s += rs.rates[b * nb + d] * tout[b];
        }
        s - rs.theta_out[j] * rs.rates[d * nb + d]
    };
    for sweep in 1..=MAX_SWEEPS {
        rs.sweeps = sweep;
        let tout = block_sums(&rs.theta_out, &rs.labels, nb);
        let tin = block_sums(&rs.theta_in, &rs.labels, nb);
        let dsum = diag(rs);
        for (b, d) in t.block_pairs() {
            let s = tout[b] * tin[d] - if b == d { dsum[b] } else { T::zero() };
            rs.rates[t.idx(b, d)] = ratio(t.multi_edges[t.idx(b, d)], s);
        }
        let mut worst = T::zero();
        for i in 0..n {
            worst = worst.max(relative_gap(rs.theta_out[i] * reach_out(rs, &tin, i), k_out[i]));
            worst = worst.max(relative_gap(rs.theta_in[i] * reach_in(rs, &tout, i), k_in[i]));
        }
        if worst < tol {
            rs.converged = true;
            break;
        }
        for i in 0..n {
            if k_out[i] > 0 {
                let den = reach_out(rs, &tin, i);
                if den > T::zero() {
                    rs.theta_out[i] = T::count(k_out[i]) / den;
                }
            }
        }
        let tout = block_sums(&rs.theta_out, &rs.labels, nb);
        for j in 0..n {
            if k_in[j] > 0 {
                let den = reach_in(rs, &tout, j);
                if den > T::zero() {
                    rs.theta_in[j] = T::count(k_in[j]) / den;
                }
            }
        }
        let tout = block_sums(&rs.theta_out, &rs.labels, nb);
        let tin = block_sums(&rs.theta_in, &rs.labels, nb);
        for i in 0..n {
            rs.theta_out[i] /= tout[rs.labels[i]];
            rs.theta_in[i] /= tin[rs.labels[i]];
        }
    }
}

fn normalize<T: Real>(rs: &mut RateStructure<T>, c: &BlockConstants<T>) {
    let nb = rs.n_blocks;
    let s_out = block_sums(&rs.theta_out, &rs.labels, nb);
    let s_in = block_sums(&rs.theta_in, &rs.labels, nb);
    for i in 0..rs.theta_out.len() {
        let b = rs.labels[i];
        rs.theta_out[i] = rs.theta_out[i] * c.out[b] / s_out[b];
        rs.theta_in[i] = rs.theta_in[i] * c.in_[b] / s_in[b];
    }
    for b in 0..nb {
        for d in 0..nb {
            rs.rates[b * nb + d] = rs.rates[b * nb + d] * s_out[b] * s_in[d] / (c.out[b] * c.in_[d]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::PairSpace;

    fn degrees_match(g: &MultiGraph, rs: &RateStructure<f64>, tol: f64) {
        let (k_out, k_in) = g.degrees();
        let mut e_out = vec![0.0; g.n_nodes()];
        let mut e_in = vec![0.0; g.n_nodes()];
        for (i, j) in g.space().pairs() {
            let w = rs.omega(i, j);
            e_out[i] += w;
            e_in[j] += w;
            if !g.is_directed() {
                e_out[j] += w;
                e_in[i] += w;
            }
        }
        for i in 0..g.n_nodes() {
            assert!((e_out[i] - k_out[i] as f64).abs() < tol * (1.0 + k_out[i] as f64), "out {i}");
            assert!((e_in[i] - k_in[i] as f64).abs() < tol * (1.0 + k_in[i] as f64), "in {i}");
        }
    }

    #[test]
    fn undirected_ipf_matches_degrees_and_tallies() {
        let space = PairSpace::undirected(6);
        let g = MultiGraph::with_index_labels(
            space,
            [(0, 1, 3), (0, 2, 1), (1, 2, 2), (2, 3, 1), (3, 4, 4), (4, 5, 2), (3, 5, 1), (1, 4, 1)],
        )
        .unwrap();
        let blocks = BlockAssignment::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let (rs, t) = degree_corrected::<f64>(&g, &blocks, &BlockConstants::ones(2)).unwrap();
        assert!(rs.converged);
        degrees_match(&g, &rs, 1e-11);
        let mut tally = [0.0; 4];
        for (i, j) in space.pairs() {
            let (b, d) = t.canonical(blocks.block_of(i), blocks.block_of(j));
            tally[b * 2 + d] += rs.omega(i, j);
        }
        for (b, d) in t.block_pairs() {
            assert!((tally[b * 2 + d] - t.multi_edges[t.idx(b, d)] as f64).abs() < 1e-10);
        }
        for b in 0..2 {
            let s: f64 = (0..6).filter(|&i| blocks.block_of(i) == b).map(|i| rs.theta_out[i]).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn directed_without_loops_matches_degrees() {
        let space = PairSpace::new(5, true, false).unwrap();
        let g = MultiGraph::with_index_labels(
            space,
            [(0, 1, 2), (1, 0, 1), (1, 2, 3), (2, 3, 1), (3, 4, 2), (4, 0, 5), (2, 0, 1), (3, 1, 1)],
        )
        .unwrap();
        let blocks = BlockAssignment::new(vec![0, 0, 1, 1, 1], 2).unwrap();
        let (rs, _) = degree_corrected::<f64>(&g, &blocks, &BlockConstants::ones(2)).unwrap();
        assert!(rs.converged);
        degrees_match(&g, &rs, 1e-11);
    }

    #[test]
    fn directed_loopy_closed_form() {
        let g = MultiGraph::with_index_labels(PairSpace::directed_loopy(3), [(0, 1, 2), (1, 1, 1), (2, 0, 3)])
            .unwrap();
        let blocks = BlockAssignment::single(3);
        let (rs, _) = degree_corrected::<f64>(&g, &blocks, &BlockConstants::ones(1)).unwrap();
        assert_eq!(rs.sweeps, 0);
        for (i, j) in g.space().pairs() {
            let (ko, ki) = g.degrees();
            let expect = ko[i] as f64 * ki[j] as f64 / 6.0;
            assert!((rs.omega(i, j) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_degree_block_rejected() {
        let g = MultiGraph::with_index_labels(PairSpace::undirected(4), [(0, 1, 1)]).unwrap();
        let blocks = BlockAssignment::new(vec![0, 0, 1, 1], 2).unwrap();
        assert!(matches!(
            degree_corrected::<f64>(&g, &blocks, &BlockConstants::ones(2)),
            Err(Error::ZeroDegreeBlock { block: 1, .. })
        ));
    }
}
