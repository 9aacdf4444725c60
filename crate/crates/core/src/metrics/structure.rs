//! Structural statistics on the symmetrized, and where stated binarized,
//! projection of a multigraph.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::multigraph::MultiGraph;
use crate::numerics::{second_smallest_eigenvalue, DenseMatrix};
use crate::scalar::Real;

/// A statistic computed on part of the graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covered<T> {
    pub value: T,
    /// Fraction of nodes (spectral gap) or node pairs (path length) used.
    pub coverage: T,
}

fn components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut k = 0;
        while k < comp.len() {
            for &v in &adj[comp[k]] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                }
            }
            k += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Second-smallest eigenvalue of `I - D^-1 W` on the giant component, where
/// `W` holds the multi-edge counts (`(A + A^T)/2` for directed graphs).
pub fn spectral_gap_detail<T: Real>(g: &MultiGraph) -> Result<Covered<T>> {
    if g.multi_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let adj = g.neighbour_sets();
    let giant = components(&adj).into_iter().max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0]))).unwrap();
    if giant.len() < 2 {
        return Err(Error::InvalidArgument("giant component has a single node".into()));
    }
    let n = giant.len();
    let mut pos = vec![usize::MAX; g.n_nodes()];
    for (k, &v) in giant.iter().enumerate() {
        pos[v] = k;
    }
    let mut w = DenseMatrix::<T>::zeros(n);
    for ((i, j), x) in g.symmetric_weights() {
        if pos[i] != usize::MAX {
            w[(pos[i], pos[j])] += T::lit(x);
        }
    }
    let deg: Vec<T> = (0..n).map(|i| (0..n).map(|j| w[(i, j)]).sum()).collect();
    // I - D^-1/2 W D^-1/2 is similar to I - D^-1 W
    let mut s = DenseMatrix::<T>::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let v = w[(i, j)] / (deg[i] * deg[j]).sqrt();
            s[(i, j)] = if i == j { T::one() - v } else { -v };
        }
    }
    let value = second_smallest_eigenvalue(&s, true)?;
    Ok(Covered { value, coverage: T::count(n as u64) / T::count(g.n_nodes() as u64) })
}

pub fn spectral_gap<T: Real>(g: &MultiGraph) -> Result<T> {
    spectral_gap_detail(g).map(|c| c.value)
}

/// Mean local clustering coefficient of the binarized undirected projection;
/// nodes of degree below 2 count as 0.
pub fn avg_clustering<T: Real>(g: &MultiGraph) -> Result<T> {
    let n = g.n_nodes();
    if n == 0 {
        return Err(Error::InvalidArgument("graph has no nodes".into()));
    }
    let adj = g.neighbour_sets();
    let mut total = T::zero();
    for nb in &adj {
        let k = nb.len();
        if k < 2 {
            continue;
        }
        let mut closed = 0u64;
        for (a, &u) in nb.iter().enumerate() {
            for &v in &nb[a + 1..] {
                if adj[u].binary_search(&v).is_ok() {
                    closed += 1;
                }
            }
        }
        total += T::count(closed) / T::count((k * (k - 1) / 2) as u64);
    }
    Ok(total / T::count(n as u64))
}

/// Mean hop distance over mutually reachable node pairs of the binarized
/// undirected projection; coverage is the reachable share of all pairs.
pub fn path_length_detail<T: Real>(g: &MultiGraph) -> Result<Covered<T>> {
    let n = g.n_nodes();
    if g.links() == 0 || n < 2 {
        return Err(Error::EmptyGraph);
    }
    let adj = g.neighbour_sets();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let (mut sum, mut pairs) = (0u64, 0u64);
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    if v > s {
                        sum += dist[v] as u64;
                        pairs += 1;
                    }
                    queue.push_back(v);
                }
            }
        }
    }
    if pairs == 0 {
        return Err(Error::EmptyGraph);
    }
    let all = (n * (n - 1) / 2) as u64;
    Ok(Covered { value: T::count(sum) / T::count(pairs), coverage: T::count(pairs) / T::count(all) })
}

pub fn avg_path_length<T: Real>(g: &MultiGraph) -> Result<T> {
    path_length_detail(g).map(|c| c.value)
}

/// Observed density against the plain G(N,p) prediction at the same `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationPoint<T> {
    pub multi_edges: u64,
    pub density: T,
    pub density_gnp: T,
}

/// `d_emp = M/P` and `d_gnp = 1 - e^(-m/P)` for each `(m, M)`.
pub fn saturation_curve<T: Real>(series: &[(u64, u64)], pairs: u64) -> Result<Vec<SaturationPoint<T>>> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("pair count must be positive".into()));
    }
    let p = T::count(pairs);
    Ok(series
        .iter()
        .map(|&(m, links)| SaturationPoint {
            multi_edges: m,
            density: T::count(links) / p,
            density_gnp: -(-T::count(m) / p).exp_m1(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::PairSpace;

    fn und(n: usize, edges: &[(usize, usize, u64)]) -> MultiGraph {
        MultiGraph::with_index_labels(PairSpace::undirected(n), edges.iter().copied()).unwrap()
    }

    #[test]
    fn gap_examples() {
        let k3 = und(3, &[(0, 1, 1), (0, 2, 1), (1, 2, 1)]);
        assert!((spectral_gap::<f64>(&k3).unwrap() - 1.5).abs() < 1e-12);
        let p3 = und(3, &[(0, 1, 1), (1, 2, 1)]);
        assert!((spectral_gap::<f64>(&p3).unwrap() - 1.0).abs() < 1e-12);
        let p3x = und(3, &[(0, 1, 10), (1, 2, 10)]);
        assert!((spectral_gap::<f64>(&p3x).unwrap() - 1.0).abs() < 1e-12);
        let split = und(5, &[(0, 1, 1), (0, 2, 1), (1, 2, 1), (3, 4, 2)]);
        let d = spectral_gap_detail::<f64>(&split).unwrap();
        assert!((d.value - 1.5).abs() < 1e-12);
        assert!((d.coverage - 0.6).abs() < 1e-15);
    }

    #[test]
    fn clustering_examples() {
        let tri = und(3, &[(0, 1, 1), (0, 2, 4), (1, 2, 1)]);
        assert_eq!(avg_clustering::<f64>(&tri).unwrap(), 1.0);
        let star = und(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]);
        assert_eq!(avg_clustering::<f64>(&star).unwrap(), 0.0);
        let k4e = und(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1)]);
        assert!((avg_clustering::<f64>(&k4e).unwrap() - (2.0 / 3.0 + 2.0 / 3.0 + 1.0 + 1.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn path_examples() {
        let tri = und(3, &[(0, 1, 1), (0, 2, 1), (1, 2, 1)]);
        assert_eq!(avg_path_length::<f64>(&tri).unwrap(), 1.0);
        let p3 = und(3, &[(0, 1, 1), (1, 2, 1)]);
        assert!((avg_path_length::<f64>(&p3).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        let two = und(4, &[(0, 1, 1), (2, 3, 1)]);
        let d = path_length_detail::<f64>(&two).unwrap();
        assert_eq!(d.value, 1.0);
        assert!((d.coverage - 2.0 / 6.0).abs() < 1e-15);
        assert!(avg_path_length::<f64>(&und(3, &[])).is_err());
    }

    #[test]
    fn saturation_examples() {
        let s = saturation_curve::<f64>(&[(0, 0), (10, 4), (50, 5)], 10).unwrap();
        assert_eq!(s[0].density_gnp, 0.0);
        assert!((s[1].density_gnp - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!(s[2].density_gnp > 0.993);
        assert_eq!(s[1].density, 0.4);
    }
}
