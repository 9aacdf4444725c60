//! Fit-time measurements on random block-structured multigraphs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zinet::models::{fit, sample_poisson, splitmix64, ModelFamily};
use zinet::{BlockAssignment, MultiGraph, PairSpace};

use crate::commands::{ensure_dir, write_file};
use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub family: ModelFamily,
    pub sizes: Vec<usize>,
    pub blocks: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub directed: bool,
    pub loops: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub family: ModelFamily,
    pub n: usize,
    pub b: usize,
    pub reps: usize,
    /// Wall time in seconds.
    pub mean: f64,
    pub iqr: f64,
    pub q025: f64,
    pub q975: f64,
    /// Independent subproblems the fit solved, as reported by the fit.
    pub optimization_problems: usize,
}

/// Random graph with `b` blocks on `n` nodes.
///
/// Nodes `0..b` seed one block each, the rest are assigned uniformly. Each
/// block pair gets a mixture weight in `[0.3, 0.9]`; active pairs draw
/// `Pois(2 theta_i theta_j)` with `theta` uniform on `[0.5, 1.5]`. A cycle of
/// single edges guarantees every node and block positive degree.
pub fn random_instance(n: usize, b: usize, space: PairSpace, seed: u64) -> (MultiGraph, BlockAssignment) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..n).map(|i| if i < b { i } else { rng.random_range(0..b) }).collect();
    let theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
    let q: Vec<f64> = (0..b * b).map(|_| rng.random_range(0.3..0.9)).collect();
    let mut entries = Vec::new();
    for (i, j) in space.pairs() {
        let (bi, bj) = (labels[i].min(labels[j]), labels[i].max(labels[j]));
        let qk = if space.directed { q[labels[i] * b + labels[j]] } else { q[bi * b + bj] };
        let mut a = if rng.random::<f64>() < qk { sample_poisson(&mut rng, 2.0 * theta[i] * theta[j]) } else { 0 };
        let next = (i + 1) % n;
        if n > 1 && (j == next || (!space.directed && i == (j + 1) % n)) {
            a = a.max(1);
        }
        if a > 0 {
            entries.push((i, j, a));
        }
    }
    let g = MultiGraph::with_index_labels(space, entries).expect("generated pairs are admissible");
    let blocks = BlockAssignment::new(labels, b).expect("every block is seeded");
    (g, blocks)
}

/// Linear interpolation between order statistics.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.sizes.is_empty() || cfg.blocks.is_empty() || cfg.reps == 0 {
        return Err(CliError::Usage("bench needs non-empty --sizes, --block-counts and --reps >= 1".into()));
    }
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        for &b in &cfg.blocks {
            if b == 0 || b > n {
                return Err(CliError::Usage(format!("block count {b} must lie in [1, {n}]")));
            }
            let space = PairSpace::new(n, cfg.directed, cfg.loops)?;
            let mut times = Vec::with_capacity(cfg.reps);
            let mut problems = None;
            for r in 0..cfg.reps {
                let key = splitmix64(splitmix64(splitmix64(cfg.seed, n as u64), b as u64), r as u64);
                let (g, blocks) = random_instance(n, b, space, key);
                let start = Instant::now();
                let model = fit::<f64>(&g, cfg.family, Some(&blocks))?;
                times.push(start.elapsed().as_secs_f64());
                let count = model.diagnostics.optimization_problems;
                if problems.is_some_and(|p| p != count) {
                    return Err(CliError::Core(zinet::Error::Consistency(format!(
                        "subproblem count changed between repetitions at N={n}, B={b}"
                    ))));
                }
                problems = Some(count);
            }
            times.sort_by(f64::total_cmp);
            rows.push(BenchRow {
                family: cfg.family,
                n,
                b,
                reps: cfg.reps,
                mean: times.iter().sum::<f64>() / times.len() as f64,
                iqr: quantile(&times, 0.75) - quantile(&times, 0.25),
                q025: quantile(&times, 0.025),
                q975: quantile(&times, 0.975),
                optimization_problems: problems.unwrap_or(0),
            });
        }
    }
    Ok(rows)
}

/// Runs the bench and writes `bench.csv` into `out`.
pub fn cmd_bench(cfg: &BenchConfig, out: &Path) -> Result<(Vec<BenchRow>, PathBuf)> {
    let rows = run_bench(cfg)?;
    ensure_dir(out)?;
    let path = out.join("bench.csv");
    write_file(&path, bench_csv(&rows))?;
    Ok((rows, path))
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut csv = String::from("family,n,b,reps,mean_s,iqr_s,q025_s,q975_s,optimization_problems\n");
    for r in rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{:e},{:e},{:e},{:e},{}",
            r.family, r.n, r.b, r.reps, r.mean, r.iqr, r.q025, r.q975, r.optimization_problems
        );
    }
    csv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.75), 4.0);
        assert!((quantile(&v, 0.025) - 1.1).abs() < 1e-12);
    }

    #[test]
    fn instances_are_reproducible_and_fit() {
        let space = PairSpace::new(20, true, false).unwrap();
        let (g, b) = random_instance(20, 3, space, 5);
        assert_eq!(random_instance(20, 3, space, 5).0, g);
        assert_eq!(b.sizes().len(), 3);
        let (out, inn) = g.degrees();
        assert!(out.iter().chain(&inn).all(|&k| k > 0));
        let und = random_instance(15, 2, PairSpace::undirected(15), 9).0;
        assert!(und.degrees().0.iter().all(|&k| k > 0));
    }

    #[test]
    fn zi_dcsbm_rows_count_block_pairs() {
        let cfg = BenchConfig {
            family: ModelFamily::ZiDcsbm,
            sizes: vec![12],
            blocks: vec![1, 2, 3],
            reps: 2,
            seed: 1,
            directed: true,
            loops: false,
        };
        let rows = run_bench(&cfg).unwrap();
        let counts: Vec<usize> = rows.iter().map(|r| r.optimization_problems).collect();
        assert_eq!(counts, [1, 4, 9]);
        assert_eq!(bench_csv(&rows).lines().count(), 4);
        assert!(run_bench(&BenchConfig { blocks: vec![13], ..cfg }).is_err());
    }
}
