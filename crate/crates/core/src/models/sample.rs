//! Drawing multigraphs from a fitted model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::multigraph::MultiGraph;
use crate::scalar::Real;

use super::FittedModel;

/// Draws `Poisson(lambda)`.
///
/// Inversion by sequential search below `lambda = 10`, otherwise Hormann's
/// transformed rejection with squeeze (PTRS).
pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> u64 {
    if !(lambda > 0.0) {
        return 0;
    }
    if lambda < 10.0 {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        while u > cdf && k < 1000 {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
            if p == 0.0 && cdf < u {
                break;
            }
        }
        return k;
    }
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = (v * inv_alpha / (a / (us * us) + b)).ln();
        let rhs = -lambda + k * loglam - crate::numerics::ln_gamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

/// 64-bit mix used to derive independent seeds.
pub fn splitmix64(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws one multigraph: per pair a Bernoulli(q) gate, then Poisson(lambda).
///
/// Every pair has its own ChaCha stream keyed by its pair index, so a draw
/// depends only on `seed` and the pair, never on iteration order.
pub fn sample<T: Real>(model: &FittedModel<T>, seed: u64) -> MultiGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for (idx, (i, j, law)) in model.pair_laws().enumerate() {
        let q = law.q.as_f64();
        if q <= 0.0 {
            continue;
        }
        rng.set_stream(idx as u64);
        rng.set_word_pos(0);
        if q < 1.0 && rng.random::<f64>() >= q {
            continue;
        }
        let a = sample_poisson(&mut rng, law.lambda.as_f64());
        if a > 0 {
            entries.push(((i, j), a));
        }
    }
    MultiGraph::from_counts(model.space, model.node_ids.clone(), entries.into_iter().map(|((i, j), a)| (i, j, a)))
        .expect("sampled pairs are admissible")
}
