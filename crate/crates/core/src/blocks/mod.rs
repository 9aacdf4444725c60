//! Modularity and modularity-maximizing community detection.

mod louvain;

use crate::error::{Error, Result};
use crate::multigraph::{BlockAssignment, MultiGraph};
use crate::scalar::Real;

pub use louvain::detect_communities;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularityScore<T> {
    pub q_value: T,
    pub resolution: T,
}

/// Modularity at resolution 1.
pub fn modularity<T: Real>(g: &MultiGraph, assignment: &BlockAssignment) -> Result<ModularityScore<T>> {
    modularity_with_resolution(g, assignment, T::one())
}

/// `Q = (1/m) sum_ij [A_ij - gamma k_i^out k_j^in / m] delta(c_i, c_j)`.
///
/// Undirected graphs are read as their symmetric directed expansion, so every
/// count appears in both directions and `m` doubles.
pub fn modularity_with_resolution<T: Real>(
    g: &MultiGraph,
    assignment: &BlockAssignment,
    resolution: T,
) -> Result<ModularityScore<T>> {
    assignment.check_nodes(g.n_nodes())?;
    if g.multi_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let nb = assignment.n_blocks();
    let mut inner = vec![T::zero(); nb];
    let mut k_out = vec![T::zero(); nb];
    let mut k_in = vec![T::zero(); nb];
    let two_way = if g.is_directed() { T::one() } else { T::lit(2.0) };
    for (i, j, a) in g.edges() {
        let (bi, bj) = (assignment.block_of(i), assignment.block_of(j));
        let w = T::count(a);
        if bi == bj {
            inner[bi] += w * two_way;
        }
        if g.is_directed() {
            k_out[bi] += w;
            k_in[bj] += w;
        } else {
            for b in [bi, bj] {
                k_out[b] += w;
                k_in[b] += w;
            }
        }
    }
    let m = T::count(g.multi_edges()) * two_way;
    let mut q = T::zero();
    for b in 0..nb {
        q += inner[b] / m - resolution * k_out[b] * k_in[b] / (m * m);
    }
    Ok(ModularityScore { q_value: q, resolution })
}
