//! Multi-edge graphs, their ingestion and descriptive statistics.

mod io;
mod stats;

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub use io::{
    aggregate_contacts, parse_contact_log, parse_weighted_edgelist, read_block_file, read_contact_log_file,
    write_block_file, Contact, GraphFile, TemporalContactLog,
};
pub use stats::{
    block_tallies, excess_kurtosis, pair_count_kurtosis, prefix_series, summary_stats, BlockTallies,
    GraphSummary, PrefixPoint,
};

/// Admissible ordered or unordered node pairs of a graph.
///
/// Undirected pairs are stored canonically as `(i, j)` with `i < j`.
/// Undirected graphs with self-loops are not supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairSpace {
    pub n: usize,
    pub directed: bool,
    pub loops: bool,
}

impl PairSpace {
    pub fn new(n: usize, directed: bool, loops: bool) -> Result<Self> {
        if !directed && loops {
            return Err(Error::UnsupportedPairSpace);
        }
        Ok(Self { n, directed, loops })
    }

    pub fn directed_loopy(n: usize) -> Self {
        Self { n, directed: true, loops: true }
    }

    pub fn undirected(n: usize) -> Self {
        Self { n, directed: false, loops: false }
    }

    /// Number of admissible pairs `P`.
    pub fn size(&self) -> u64 {
        let n = self.n as u64;
        match (self.directed, self.loops) {
            (true, true) => n * n,
            (true, false) => n * n.saturating_sub(1),
            _ => n * n.saturating_sub(1) / 2,
        }
    }

    pub fn is_admissible(&self, i: usize, j: usize) -> bool {
        if i >= self.n || j >= self.n {
            return false;
        }
        if i == j {
            return self.loops;
        }
        self.directed || i < j
    }

    /// Canonical key of the pair `{i, j}`; `None` when inadmissible.
    pub fn canonical(&self, i: usize, j: usize) -> Option<(usize, usize)> {
        let (a, b) = if self.directed || i <= j { (i, j) } else { (j, i) };
        self.is_admissible(a, b).then_some((a, b))
    }

    /// All admissible pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let space = *self;
        (0..space.n).flat_map(move |i| {
            let start = if space.directed { 0 } else { i + 1 };
            (start..space.n).filter(move |&j| j != i || space.loops).map(move |j| (i, j))
        })
    }

    /// Position of an admissible pair in [`PairSpace::pairs`] order.
    pub fn pair_index(&self, i: usize, j: usize) -> u64 {
        let (n, i64_, j64) = (self.n as u64, i as u64, j as u64);
        match (self.directed, self.loops) {
            (true, true) => i64_ * n + j64,
            (true, false) => i64_ * (n - 1) + if j64 > i64_ { j64 - 1 } else { j64 },
            _ => i64_ * (2 * n - i64_ - 1) / 2 + (j64 - i64_ - 1),
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "n={} {} {}",
            self.n,
            if self.directed { "directed" } else { "undirected" },
            if self.loops { "loops" } else { "no-loops" }
        )
    }
}

/// Observed multi-edge counts `A_ij` over a pair space. Zero pairs are implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGraph {
    space: PairSpace,
    node_ids: Vec<String>,
    counts: BTreeMap<(usize, usize), u64>,
}

impl MultiGraph {
    /// Builds a graph from `(i, j, w)` triples, summing duplicates.
    ///
    /// Undirected pairs may be given in either orientation. Zero weights are
    /// dropped; self-loops in a loop-free space are rejected.
    pub fn from_counts<I>(space: PairSpace, node_ids: Vec<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        if node_ids.len() != space.n {
            return Err(Error::InvalidArgument(format!(
                "{} node ids for {} nodes",
                node_ids.len(),
                space.n
            )));
        }
        let mut counts = BTreeMap::new();
        for (i, j, w) in entries {
            let key = space.canonical(i, j).ok_or(Error::InadmissiblePair(i, j))?;
            if w > 0 {
                *counts.entry(key).or_insert(0) += w;
            }
        }
        Ok(Self { space, node_ids, counts })
    }

    /// Graph with nodes labelled `0..n`.
    pub fn with_index_labels<I>(space: PairSpace, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        Self::from_counts(space, (0..space.n).map(|i| i.to_string()).collect(), entries)
    }

    pub fn empty(space: PairSpace) -> Self {
        Self { space, node_ids: (0..space.n).map(|i| i.to_string()).collect(), counts: BTreeMap::new() }
    }

    pub fn space(&self) -> PairSpace {
        self.space
    }

    pub fn n_nodes(&self) -> usize {
        self.space.n
    }

    pub fn is_directed(&self) -> bool {
        self.space.directed
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    /// `A_ij`, looked up in either orientation for undirected graphs.
    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.space.canonical(i, j).and_then(|k| self.counts.get(&k).copied()).unwrap_or(0)
    }

    /// Non-zero entries in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.counts.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    /// Every admissible pair with its count (zeros included), in pair order.
    pub fn pair_counts(&self) -> PairCounts<'_> {
        PairCounts {
            pairs: Box::new(self.space.pairs()),
            edges: self.counts.iter().peekable(),
        }
    }

    /// Number of multi-edges `m`.
    pub fn multi_edges(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Number of connected pairs `M`.
    pub fn links(&self) -> u64 {
        self.counts.len() as u64
    }

    /// Out- and in-degrees counted in multi-edges. Undirected edges count at
    /// both endpoints, so both vectors hold the same degree sequence.
    pub fn degrees(&self) -> (Vec<u64>, Vec<u64>) {
        let n = self.space.n;
        let mut k_out = vec![0u64; n];
        let mut k_in = vec![0u64; n];
        for (&(i, j), &w) in &self.counts {
            k_out[i] += w;
            k_in[j] += w;
            if !self.space.directed {
                k_out[j] += w;
                k_in[i] += w;
            }
        }
        (k_out, k_in)
    }

    /// Same counts with the multi-edge weights replaced by presence (0/1).
    pub fn binarized(&self) -> MultiGraph {
        MultiGraph {
            space: self.space,
            node_ids: self.node_ids.clone(),
            counts: self.counts.keys().map(|&k| (k, 1)).collect(),
        }
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<MultiGraph> {
        let n = self.space.n;
        if perm.len() != n {
            return Err(Error::InvalidArgument("permutation length differs from node count".into()));
        }
        let mut ids = vec![String::new(); n];
        for (i, &p) in perm.iter().enumerate() {
            ids[p] = self.node_ids[i].clone();
        }
        MultiGraph::from_counts(self.space, ids, self.edges().map(|(i, j, w)| (perm[i], perm[j], w)))
    }

    /// Symmetric weights `W_ij` over all ordered pairs: `A_ij` for undirected
    /// graphs, `(A_ij + A_ji) / 2` for directed ones.
    pub(crate) fn symmetric_weights(&self) -> BTreeMap<(usize, usize), f64> {
        let mut w = BTreeMap::new();
        let half = if self.space.directed { 0.5 } else { 1.0 };
        for (&(i, j), &a) in &self.counts {
            *w.entry((i, j)).or_insert(0.0) += half * a as f64;
            *w.entry((j, i)).or_insert(0.0) += half * a as f64;
        }
        w
    }

    /// Undirected simple neighbour sets (loops dropped).
    pub(crate) fn neighbour_sets(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.space.n];
        for &(i, j) in self.counts.keys() {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

pub struct PairCounts<'a> {
    pairs: Box<dyn Iterator<Item = (usize, usize)> + 'a>,
    edges: std::iter::Peekable<std::collections::btree_map::Iter<'a, (usize, usize), u64>>,
}

impl Iterator for PairCounts<'_> {
    type Item = (usize, usize, u64);

    fn next(&mut self) -> Option<Self::Item> {
        let pair = self.pairs.next()?;
        let w = match self.edges.peek() {
            Some((&key, &w)) if key == pair => {
                self.edges.next();
                w
            }
            _ => 0,
        };
        Some((pair.0, pair.1, w))
    }
}

/// Node-to-block labels `b_i` in `[0, B)`, every block non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockAssignment {
    labels: Vec<usize>,
    n_blocks: usize,
}

impl BlockAssignment {
    pub fn new(labels: Vec<usize>, n_blocks: usize) -> Result<Self> {
        let mut seen = vec![false; n_blocks];
        for (node, &label) in labels.iter().enumerate() {
            if label >= n_blocks {
                return Err(Error::LabelOutOfRange { node, label, blocks: n_blocks });
            }
            seen[label] = true;
        }
        if let Some(b) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyBlock(b));
        }
        Ok(Self { labels, n_blocks })
    }

    /// Relabels arbitrary integer labels densely in order of first appearance.
    pub fn from_raw_labels(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|&r| {
                let next = map.len();
                *map.entry(r).or_insert(next)
            })
            .collect();
        Self { labels, n_blocks: map.len() }
    }

    pub fn single(n: usize) -> Self {
        Self { labels: vec![0; n], n_blocks: usize::from(n > 0) }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn block_of(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_blocks];
        for &b in &self.labels {
            sizes[b] += 1;
        }
        sizes
    }

    pub fn check_nodes(&self, n: usize) -> Result<()> {
        if self.labels.len() == n {
            Ok(())
        } else {
            Err(Error::AssignmentLength { expected: n, got: self.labels.len() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_space_sizes() {
        assert_eq!(PairSpace::directed_loopy(5).size(), 25);
        assert_eq!(PairSpace::new(5, true, false).unwrap().size(), 20);
        assert_eq!(PairSpace::undirected(5).size(), 10);
        assert!(PairSpace::new(5, false, true).is_err());
        for space in [PairSpace::directed_loopy(4), PairSpace::new(4, true, false).unwrap(), PairSpace::undirected(4)] {
            let pairs: Vec<_> = space.pairs().collect();
            assert_eq!(pairs.len() as u64, space.size());
            for (k, &(i, j)) in pairs.iter().enumerate() {
                assert_eq!(space.pair_index(i, j), k as u64);
            }
        }
    }

    #[test]
    fn undirected_canonicalization_and_merge() {
        let g = MultiGraph::with_index_labels(PairSpace::undirected(3), [(1, 0, 2), (0, 1, 3)]).unwrap();
        assert_eq!(g.count(0, 1), 5);
        assert_eq!(g.count(1, 0), 5);
        assert_eq!(g.links(), 1);
        assert!(MultiGraph::with_index_labels(PairSpace::undirected(3), [(1, 1, 1)]).is_err());
    }

    #[test]
    fn degrees_examples() {
        let g = MultiGraph::with_index_labels(PairSpace::undirected(3), [(0, 1, 2), (1, 2, 1)]).unwrap();
        assert_eq!(g.degrees().0, vec![2, 3, 1]);
        let d = MultiGraph::with_index_labels(PairSpace::new(2, true, false).unwrap(), [(0, 1, 4)]).unwrap();
        assert_eq!(d.degrees(), (vec![4, 0], vec![0, 4]));
        let e = MultiGraph::empty(PairSpace::undirected(4));
        assert_eq!(e.degrees(), (vec![0; 4], vec![0; 4]));
    }

    #[test]
    fn pair_counts_cover_every_pair() {
        let g = MultiGraph::with_index_labels(PairSpace::directed_loopy(3), [(2, 2, 1), (0, 1, 3)]).unwrap();
        let all: Vec<_> = g.pair_counts().collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all.iter().map(|p| p.2).sum::<u64>(), 4);
        assert_eq!(all[1], (0, 1, 3));
        assert_eq!(all[8], (2, 2, 1));
    }

    #[test]
    fn block_assignment_validation() {
        assert!(BlockAssignment::new(vec![0, 1, 1], 2).is_ok());
        assert!(matches!(BlockAssignment::new(vec![0, 2], 2), Err(Error::LabelOutOfRange { .. })));
        assert!(matches!(BlockAssignment::new(vec![0, 0], 2), Err(Error::EmptyBlock(1))));
        let b = BlockAssignment::from_raw_labels(&[7, 3, 7]);
        assert_eq!(b.labels(), &[0, 1, 0]);
        assert_eq!(b.n_blocks(), 2);
    }
}
