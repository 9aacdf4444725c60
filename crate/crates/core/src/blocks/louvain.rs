//! Louvain local moving and aggregation, followed by one node-level
//! refinement pass on the original graph.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::multigraph::{BlockAssignment, MultiGraph};

use super::modularity_with_resolution;

const EPS: f64 = 1e-12;

/// Directed weighted graph; undirected inputs are stored symmetrically.
struct Level {
    out_adj: Vec<Vec<(usize, f64)>>,
    in_adj: Vec<Vec<(usize, f64)>>,
    k_out: Vec<f64>,
    k_in: Vec<f64>,
    m: f64,
}

impl Level {
    fn from_graph(g: &MultiGraph) -> Self {
        let n = g.n_nodes();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut k_out = vec![0.0; n];
        let mut k_in = vec![0.0; n];
        let mut add = |i: usize, j: usize, w: f64| {
            if i != j {
                out_adj[i].push((j, w));
                in_adj[j].push((i, w));
            }
            k_out[i] += w;
            k_in[j] += w;
        };
        let mut m = 0.0;
        for (i, j, a) in g.edges() {
            let w = a as f64;
            add(i, j, w);
            m += w;
            if !g.is_directed() {
                add(j, i, w);
                m += w;
            }
        }
        Level { out_adj, in_adj, k_out, k_in, m }
    }

    fn n(&self) -> usize {
        self.k_out.len()
    }

    fn aggregate(&self, comm: &[usize], n_comm: usize) -> Level {
        let mut out_map = vec![std::collections::BTreeMap::<usize, f64>::new(); n_comm];
        let mut k_out = vec![0.0; n_comm];
        let mut k_in = vec![0.0; n_comm];
        for i in 0..self.n() {
            k_out[comm[i]] += self.k_out[i];
            k_in[comm[i]] += self.k_in[i];
            for &(j, w) in &self.out_adj[i] {
                if comm[i] != comm[j] {
                    *out_map[comm[i]].entry(comm[j]).or_insert(0.0) += w;
                }
            }
        }
        let mut out_adj = vec![Vec::new(); n_comm];
        let mut in_adj = vec![Vec::new(); n_comm];
        for (c, map) in out_map.into_iter().enumerate() {
            for (d, w) in map {
                out_adj[c].push((d, w));
                in_adj[d].push((c, w));
            }
        }
        Level { out_adj, in_adj, k_out, k_in, m: self.m }
    }

    /// Moves nodes until no single move raises modularity; returns whether
    /// anything moved.
    fn local_moving(&self, comm: &mut [usize], gamma: f64, order: &[usize]) -> bool {
        let n_c = comm.iter().max().map_or(0, |c| c + 1).max(self.n());
        let mut tot_out = vec![0.0; n_c];
        let mut tot_in = vec![0.0; n_c];
        for i in 0..self.n() {
            tot_out[comm[i]] += self.k_out[i];
            tot_in[comm[i]] += self.k_in[i];
        }
        let mut link = vec![0.0; n_c];
        let mut touched: Vec<usize> = Vec::new();
        let mut marked = vec![false; n_c];
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &i in order {
                let own = comm[i];
                tot_out[own] -= self.k_out[i];
                tot_in[own] -= self.k_in[i];
                for &(j, w) in self.out_adj[i].iter().chain(&self.in_adj[i]) {
                    let c = comm[j];
                    if !marked[c] {
                        marked[c] = true;
                        touched.push(c);
                    }
                    link[c] += w;
                }
                if !marked[own] {
                    marked[own] = true;
                    touched.push(own);
                }
                let gain = |c: usize, link: &[f64]| {
                    link[c] - gamma * (self.k_out[i] * tot_in[c] + self.k_in[i] * tot_out[c]) / self.m
                };
                let own_gain = gain(own, &link);
                let best = touched.iter().map(|&c| gain(c, &link)).fold(f64::NEG_INFINITY, f64::max);
                let mut target = own;
                if best > own_gain + EPS {
                    target = touched
                        .iter()
                        .copied()
                        .filter(|&c| gain(c, &link) >= best - EPS)
                        .min()
                        .expect("best is attained");
                }
                for &c in &touched {
                    link[c] = 0.0;
                    marked[c] = false;
                }
                touched.clear();
                comm[i] = target;
                tot_out[target] += self.k_out[i];
                tot_in[target] += self.k_in[i];
                if target != own {
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                return moved_any;
            }
        }
    }
}

/// Relabels to `0..k` in order of first appearance.
fn compact(comm: &mut [usize]) -> usize {
    let mut map = std::collections::HashMap::new();
    for c in comm.iter_mut() {
        let next = map.len();
        *c = *map.entry(*c).or_insert(next);
    }
    map.len()
}

/// Modularity-maximizing partition, deterministic for a fixed `seed`.
///
/// Never worse than the all-singletons or the single-community partition.
pub fn detect_communities(g: &MultiGraph, seed: u64, resolution: f64) -> Result<BlockAssignment> {
    if g.multi_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let n = g.n_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = Level::from_graph(g);
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level = Level::from_graph(g);
    loop {
        let mut comm: Vec<usize> = (0..level.n()).collect();
        let mut order: Vec<usize> = (0..level.n()).collect();
        order.shuffle(&mut rng);
        if !level.local_moving(&mut comm, resolution, &order) {
            break;
        }
        let k = compact(&mut comm);
        for c in membership.iter_mut() {
            *c = comm[*c];
        }
        if k == level.n() {
            break;
        }
        level = level.aggregate(&comm, k);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    base.local_moving(&mut membership, resolution, &order);
    let k = compact(&mut membership);
    let found = BlockAssignment::new(membership, k)?;

    let singletons = BlockAssignment::new((0..n).collect(), n)?;
    let single = BlockAssignment::single(n);
    let q = |a: &BlockAssignment| modularity_with_resolution::<f64>(g, a, resolution).map(|s| s.q_value);
    let (qf, qs, q1) = (q(&found)?, q(&singletons)?, q(&single)?);
    Ok(if qf >= qs && qf >= q1 {
        found
    } else if qs >= q1 {
        singletons
    } else {
        single
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::PairSpace;

    fn two_cliques() -> MultiGraph {
        let mut e = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    e.push((base + i, base + j, 1 + ((i + j) % 3) as u64));
                }
            }
        }
        MultiGraph::with_index_labels(PairSpace::undirected(10), e).unwrap()
    }

    #[test]
    fn recovers_components() {
        let g = two_cliques();
        for seed in 0..5 {
            let a = detect_communities(&g, seed, 1.0).unwrap();
            assert_eq!(a.n_blocks(), 2);
            assert!(a.labels()[..5].iter().all(|&c| c == a.labels()[0]));
            assert!(a.labels()[5..].iter().all(|&c| c == a.labels()[5]));
            assert_ne!(a.labels()[0], a.labels()[5]);
        }
    }

    #[test]
    fn single_edge_merges() {
        let g = MultiGraph::with_index_labels(PairSpace::undirected(2), [(0, 1, 3)]).unwrap();
        let a = detect_communities(&g, 7, 1.0).unwrap();
        assert_eq!(a.labels(), &[0, 0]);
    }

    #[test]
    fn deterministic_for_seed() {
        let g = two_cliques();
        assert_eq!(detect_communities(&g, 3, 1.0).unwrap(), detect_communities(&g, 3, 1.0).unwrap());
    }
}
