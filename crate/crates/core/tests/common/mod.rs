#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zinet::{BlockAssignment, MultiGraph, PairSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random sparse multigraph where roughly `fill` of the pairs carry a
/// geometric-ish count, plus a spanning path so no node has zero degree.
pub fn random_graph(rng: &mut ChaCha8Rng, space: PairSpace, fill: f64, max_count: u64) -> MultiGraph {
    let mut entries = Vec::new();
    for (i, j) in space.pairs() {
        let forced = (j == i + 1) || (space.directed && i == j + 1);
        if forced || rng.random::<f64>() < fill {
            let mut c = 1;
            while c < max_count && rng.random::<f64>() < 0.6 {
                c += 1;
            }
            entries.push((i, j, c));
        }
    }
    MultiGraph::with_index_labels(space, entries).unwrap()
}

pub fn random_space(rng: &mut ChaCha8Rng, n: usize) -> PairSpace {
    match rng.random_range(0..3) {
        0 => PairSpace::directed_loopy(n),
        1 => PairSpace::new(n, true, false).unwrap(),
        _ => PairSpace::undirected(n),
    }
}

pub fn contiguous_blocks(n: usize, b: usize) -> BlockAssignment {
    BlockAssignment::new((0..n).map(|i| i * b / n).collect(), b).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300) || (a - b).abs() <= tol * 1e-3
}

/// `ln P(A = n)` for the zero-inflated Poisson law, written out directly.
pub fn zip_log_pmf_direct(n: u64, q: f64, lambda: f64) -> f64 {
    if n == 0 {
        return (1.0 - q + q * (-lambda).exp()).ln();
    }
    let mut ln_fact = 0.0;
    for k in 2..=n {
        ln_fact += (k as f64).ln();
    }
    q.ln() + n as f64 * lambda.ln() - lambda - ln_fact
}

/// Average ranks (ties share their mean rank).
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let mut r = vec![0.0; x.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut e = k;
        while e + 1 < idx.len() && x[idx[e + 1]] == x[idx[k]] {
            e += 1;
        }
        let mean = (k + e) as f64 / 2.0 + 1.0;
        for &i in &idx[k..=e] {
            r[i] = mean;
        }
        k = e + 1;
    }
    r
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
