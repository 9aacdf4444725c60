mod common;

use common::*;
use zinet::models::*;
use zinet::numerics::ln_gamma;
use zinet::{BlockAssignment, MultiGraph, PairSpace};

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `E[m] = q p P`, `E[M] = q P (1 - e^-p)` for `(q, p)`.
fn moment_oracle(m: f64, links: f64, pairs: f64) -> (f64, f64) {
    let r = m / links;
    let p = bisect(1e-12, 1e4, |p| p / (1.0 - (-p).exp()) - r);
    (m / (p * pairs), p)
}

#[test]
fn gnp_pair_laws_are_uniform() {
    let g = MultiGraph::with_index_labels(PairSpace::directed_loopy(5), [(0, 1, 4), (2, 2, 3), (4, 0, 3)]).unwrap();
    let m = fit_poisson::<f64>(&g, ModelFamily::Gnp, None).unwrap();
    for (_, _, law) in m.pair_laws() {
        assert_eq!(law, PairLaw { q: 1.0, lambda: 0.4 });
    }
    assert!(m.pair_law(0, 5).is_err());
}

#[test]
fn gnp_two_node_example() {
    let g = MultiGraph::with_index_labels(PairSpace::directed_loopy(2), [(0, 0, 3), (1, 0, 1)]).unwrap();
    let m = fit_poisson::<f64>(&g, ModelFamily::Gnp, None).unwrap();
    assert_eq!(m.p, Some(1.0));
}

#[test]
fn plain_dcsbm_reproduces_degrees_in_every_pair_space() {
    let mut r = rng(11);
    for n in [12, 18, 25] {
        for _ in 0..3 {
            let space = random_space(&mut r, n);
            let g = random_graph(&mut r, space, 0.4, 6);
            let blocks = contiguous_blocks(n, 3);
            let m = fit_poisson::<f64>(&g, ModelFamily::Dcsbm, Some(&blocks)).unwrap();
            assert!(m.diagnostics.converged);
            let (eo, ei) = m.expected_degrees().unwrap();
            let (ko, ki) = g.degrees();
            for i in 0..n {
                assert!(rel_close(eo[i], ko[i] as f64, 1e-9), "{} out {i}", space.describe());
                assert!(rel_close(ei[i], ki[i] as f64, 1e-9), "{} in {i}", space.describe());
            }
        }
    }
}

#[test]
fn boundary_optimum_is_flagged_unconverged() {
    // node 5 only meets node 4, the other member of its block, so matching
    // its degree needs theta_5 -> 0: the likelihood has no maximizer
    let g = MultiGraph::with_index_labels(
        PairSpace::undirected(6),
        [(0, 1, 3), (0, 2, 1), (0, 4, 1), (1, 2, 1), (1, 3, 3), (1, 4, 2), (2, 3, 4), (3, 4, 1), (4, 5, 2)],
    )
    .unwrap();
    let blocks = BlockAssignment::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap();
    let m = fit_poisson::<f64>(&g, ModelFamily::Dcsbm, Some(&blocks)).unwrap();
    assert!(!m.diagnostics.converged);
    let (eo, _) = m.expected_degrees().unwrap();
    assert!((eo[5] - 2.0).abs() < 1e-3);
}

#[test]
fn plain_fits_are_local_maxima() {
    let mut r = rng(5);
    let g = random_graph(&mut r, PairSpace::undirected(15), 0.35, 5);
    let blocks = contiguous_blocks(15, 3);
    for family in [ModelFamily::Gnp, ModelFamily::Sbm, ModelFamily::Clcm, ModelFamily::Dcsbm] {
        let fit = fit_poisson::<f64>(&g, family, Some(&blocks)).unwrap();
        let best = fit.log_likelihood(&g).unwrap();
        let mut probes: Vec<FittedModel<f64>> = Vec::new();
        for s in [0.99, 1.01] {
            if let Some(p) = fit.p {
                let mut m = fit.clone();
                m.p = Some(p * s);
                probes.push(m);
            }
            if let Some(l) = &fit.lambda_blocks {
                for k in 0..l.len() {
                    let (b, d) = (k / 3, k % 3);
                    let mut m = fit.clone();
                    let lb = m.lambda_blocks.as_mut().unwrap();
                    lb[b * 3 + d] *= s;
                    if b != d {
                        lb[d * 3 + b] *= s;
                    }
                    probes.push(m);
                }
            }
            if fit.theta_out.is_some() {
                for i in 0..15 {
                    let mut m = fit.clone();
                    m.theta_out.as_mut().unwrap()[i] *= s;
                    m.theta_in.as_mut().unwrap()[i] *= s;
                    probes.push(m);
                }
            }
        }
        assert!(!probes.is_empty());
        for m in probes {
            assert!(m.log_likelihood(&g).unwrap() < best, "{family}");
        }
    }
}

#[test]
fn zi_gnp_matches_moment_bisection() {
    for &(m, links, pairs) in &[(4u64, 2u64, 4u64), (50, 12, 100), (1000, 37, 45), (7, 6, 9)] {
        let sol = zi_gnp_closed_form::<f64>(m, links, pairs).unwrap();
        let (q, p) = moment_oracle(m as f64, links as f64, pairs as f64);
        if q <= 1.0 {
            assert!((sol.q - q).abs() < 1e-9 && (sol.lambda - p).abs() < 1e-9 * p.max(1.0), "{m} {links} {pairs}");
        } else {
            assert!(sol.fallback && sol.q == 1.0);
        }
    }
    let g = MultiGraph::with_index_labels(PairSpace::directed_loopy(2), [(0, 1, 1), (1, 0, 3)]).unwrap();
    let model = fit_zi_gnp::<f64>(&g).unwrap();
    assert!((model.q_global.unwrap() - 0.6275).abs() < 5e-5);
    assert!((model.p.unwrap() - 1.5936).abs() < 5e-5);
    let (em, e_links) = model.expected_edges_links();
    assert!(rel_close(em, 4.0, 1e-9) && rel_close(e_links, 2.0, 1e-9));
}

#[test]
fn zi_gnp_on_poisson_consistent_tallies() {
    // P(1 - e^-0.5) = 393.47 for P = 1000, m = 500
    let at_boundary = zi_gnp_closed_form::<f64>(500, 394, 1000).unwrap();
    assert!(at_boundary.fallback);
    assert_eq!((at_boundary.q, at_boundary.lambda), (1.0, 0.5));
    let near = zi_gnp_closed_form::<f64>(500, 393, 1000).unwrap();
    assert!((near.q - 1.0).abs() < 0.01 && (near.lambda - 0.5).abs() < 0.01);
    let binary = zi_gnp_closed_form::<f64>(30, 30, 100).unwrap();
    assert!(binary.fallback && binary.q == 1.0 && binary.lambda == 0.3);
}

#[test]
fn zi_sbm_reductions_and_block_oracle() {
    let mut r = rng(21);
    let g = random_graph(&mut r, PairSpace::undirected(20), 0.25, 8);
    let one = BlockAssignment::single(20);
    let sbm = fit_zi_sbm::<f64>(&g, &one).unwrap();
    let gnp = fit_zi_gnp::<f64>(&g).unwrap();
    assert_eq!(sbm.q_blocks.as_ref().unwrap()[0], gnp.q_global.unwrap());
    assert_eq!(sbm.lambda_blocks.as_ref().unwrap()[0], gnp.p.unwrap());

    let blocks = contiguous_blocks(20, 2);
    let fit = fit_zi_sbm::<f64>(&g, &blocks).unwrap();
    let t = zinet::multigraph::block_tallies(&g, &blocks).unwrap();
    for (b, d) in t.block_pairs() {
        let k = t.idx(b, d);
        let (q, p) = moment_oracle(t.multi_edges[k] as f64, t.links[k] as f64, t.pairs[k] as f64);
        let got_q = fit.q_blocks.as_ref().unwrap()[k];
        let got_l = fit.lambda_blocks.as_ref().unwrap()[k];
        if q <= 1.0 {
            assert!((got_q - q).abs() < 1e-8, "block ({b},{d}) q {got_q} vs {q}");
            assert!((got_l - p).abs() < 1e-8 * p.max(1.0));
        } else {
            assert_eq!(got_q, 1.0);
        }
    }

    // an edgeless block pair
    let g2 = MultiGraph::with_index_labels(PairSpace::undirected(4), [(0, 1, 3), (2, 3, 2)]).unwrap();
    let b2 = BlockAssignment::new(vec![0, 0, 1, 1], 2).unwrap();
    let fit2 = fit_zi_sbm::<f64>(&g2, &b2).unwrap();
    assert_eq!(fit2.q_blocks.as_ref().unwrap()[1], 0.0);
    assert_eq!(fit2.lambda_blocks.as_ref().unwrap()[1], 0.0);
    assert!(fit2.log_likelihood(&g2).unwrap().is_finite());
}

#[test]
fn zi_clcm_equal_degrees_matches_zi_gnp() {
    let g = MultiGraph::with_index_labels(PairSpace::directed_loopy(2), [(0, 0, 2), (1, 1, 2)]).unwrap();
    let clcm = fit_zi_clcm::<f64>(&g).unwrap();
    let gnp = fit_zi_gnp::<f64>(&g).unwrap();
    assert!((clcm.q_global.unwrap() - 0.6275).abs() < 5e-5);
    assert!((clcm.q_global.unwrap() - gnp.q_global.unwrap()).abs() < 1e-8);
    // C = sqrt(m / q)
    let c = (4.0 / clcm.q_global.unwrap()).sqrt();
    let s: f64 = clcm.theta_out.as_ref().unwrap().iter().sum();
    assert!((s - c).abs() < 1e-12);
}

#[test]
fn zi_clcm_at_unit_weight_is_plain_clcm() {
    let mut r = rng(8);
    let g = random_graph(&mut r, PairSpace::directed_loopy(12), 0.3, 6);
    let plain = fit_poisson::<f64>(&g, ModelFamily::Clcm, None).unwrap();
    let zi = fit_zi_clcm::<f64>(&g).unwrap();
    let mut collapsed = zi.clone();
    let root = zi.q_global.unwrap().sqrt();
    collapsed.q_global = Some(1.0);
    for t in [collapsed.theta_out.as_mut().unwrap(), collapsed.theta_in.as_mut().unwrap()] {
        t.iter_mut().for_each(|x| *x *= root);
    }
    let a = collapsed.log_likelihood(&g).unwrap();
    let b = plain.log_likelihood(&g).unwrap();
    assert!((a - b).abs() < 1e-10 * b.abs());
    assert!(zi.diagnostics.log_likelihood >= b - 1e-9);
}

#[test]
fn zi_clcm_matches_profile_grid_scan() {
    let mut r = rng(30);
    let g = random_graph(&mut r, PairSpace::directed_loopy(30), 0.2, 12);
    let (ko, ki) = g.degrees();
    let m = g.multi_edges() as f64;
    let pairs: Vec<(f64, u64)> =
        g.pair_counts().map(|(i, j, a)| (ko[i] as f64 * ki[j] as f64 / m, a)).collect();
    let profile = |q: f64| -> f64 {
        pairs.iter().filter(|(w, _)| *w > 0.0).map(|&(w, a)| zip_log_pmf_direct(a, q, w / q)).sum()
    };
    let lo = g.links() as f64 / g.space().size() as f64;
    let steps = 100_000;
    let (mut best_q, mut best) = (1.0, f64::NEG_INFINITY);
    for k in 1..=steps {
        let q = lo + (1.0 - lo) * k as f64 / steps as f64;
        let v = profile(q);
        if v > best {
            best = v;
            best_q = q;
        }
    }
    let fit = fit_zi_clcm::<f64>(&g).unwrap();
    assert!(best_q < 0.99, "graph should be zero-inflated, grid optimum {best_q}");
    assert!((fit.q_global.unwrap() - best_q).abs() < 1e-4, "{} vs {best_q}", fit.q_global.unwrap());
}

#[test]
fn zi_dcsbm_single_block_matches_zi_clcm() {
    let mut r = rng(44);
    for _ in 0..6 {
        let space = random_space(&mut r, 14);
        let g = random_graph(&mut r, space, 0.3, 7);
        let a = fit_zi_dcsbm::<f64>(&g, &BlockAssignment::single(14)).unwrap();
        let b = fit_zi_clcm::<f64>(&g).unwrap();
        for ((_, _, la), (_, _, lb)) in a.pair_laws().zip(b.pair_laws()) {
            assert!(rel_close(la.lambda, lb.lambda, 1e-8), "{}", space.describe());
            assert!((la.q - lb.q).abs() < 1e-8);
        }
    }
}

#[test]
fn zi_dcsbm_on_dense_poisson_data_collapses() {
    let mut r = rng(3);
    let n = 16;
    let blocks = contiguous_blocks(n, 2);
    let plant = FittedModel::<f64> {
        theta_out: Some(vec![1.0 / 8.0; n]),
        theta_in: Some(vec![1.0 / 8.0; n]),
        lambda_blocks: Some(vec![2500.0, 1600.0, 1600.0, 3000.0]),
        blocks: Some(blocks.clone()),
        ..fit_poisson::<f64>(
            &random_graph(&mut r, PairSpace::directed_loopy(n), 0.5, 3),
            ModelFamily::Dcsbm,
            Some(&blocks),
        )
        .unwrap()
    };
    let g = sample(&plant, 17);
    assert_eq!(g.links(), g.space().size(), "every pair should be connected");
    let zi = fit_zi_dcsbm::<f64>(&g, &blocks).unwrap();
    assert!(zi.q_blocks.as_ref().unwrap().iter().all(|&q| q == 1.0));
    let plain = fit_poisson::<f64>(&g, ModelFamily::Dcsbm, Some(&blocks)).unwrap();
    let (a, b) = (zi.diagnostics.log_likelihood, plain.diagnostics.log_likelihood);
    assert!((a - b).abs() < 1e-12 * b.abs(), "{a} vs {b}");
}

#[test]
fn zi_dcsbm_constraint_constants_do_not_change_pair_laws() {
    let mut r = rng(9);
    for _ in 0..4 {
        let space = random_space(&mut r, 18);
        let g = random_graph(&mut r, space, 0.25, 9);
        let blocks = contiguous_blocks(18, 3);
        let base = fit_zi_dcsbm::<f64>(&g, &blocks).unwrap();
        let twos = BlockConstants { out: vec![2.0; 3], in_: vec![2.0; 3] };
        let other = fit_zi_dcsbm_constrained::<f64>(&g, &blocks, &twos).unwrap();
        for b in 0..3 {
            let s: f64 = (0..18).filter(|&i| blocks.block_of(i) == b).map(|i| other.theta_out.as_ref().unwrap()[i]).sum();
            assert!((s - 2.0).abs() < 1e-9);
        }
        for ((_, _, la), (_, _, lb)) in base.pair_laws().zip(other.pair_laws()) {
            assert!(rel_close(la.lambda, lb.lambda, 1e-8));
            assert_eq!(la.q, lb.q);
        }
    }
}

#[test]
fn log_likelihood_examples() {
    // term-by-term sum for a 3-node undirected zi-GNP
    let g = MultiGraph::with_index_labels(PairSpace::undirected(3), [(0, 1, 4), (1, 2, 1)]).unwrap();
    let m = fit_zi_gnp::<f64>(&g).unwrap();
    let (q, p) = (m.q_global.unwrap(), m.p.unwrap());
    let direct = zip_log_pmf_direct(4, q, p) + zip_log_pmf_direct(1, q, p) + zip_log_pmf_direct(0, q, p);
    assert!((m.log_likelihood(&g).unwrap() - direct).abs() < 1e-13);

    let empty = MultiGraph::empty(PairSpace::undirected(3));
    let mut none = m.clone();
    none.q_global = Some(0.0);
    assert_eq!(none.log_likelihood(&empty).unwrap(), 0.0);
    assert_eq!(none.log_likelihood(&g).unwrap(), f64::NEG_INFINITY);

    let other = MultiGraph::empty(PairSpace::undirected(4));
    assert!(m.log_likelihood(&other).is_err());
}

#[test]
fn expected_edges_links_examples() {
    let g = MultiGraph::with_index_labels(PairSpace::undirected(6), [(0, 1, 3), (2, 3, 1), (4, 5, 6)]).unwrap();
    let plain = fit_poisson::<f64>(&g, ModelFamily::Gnp, None).unwrap();
    let (em, e_links) = plain.expected_edges_links();
    assert!((em - 10.0).abs() < 1e-12);
    assert!((e_links - 15.0 * (1.0 - (-10.0f64 / 15.0).exp())).abs() < 1e-12);
    let mut off = fit_zi_gnp::<f64>(&g).unwrap();
    off.q_global = Some(0.0);
    assert_eq!(off.expected_edges_links(), (0.0, 0.0));
}

#[test]
fn expected_degrees_invariant_under_rescaling() {
    let mut r = rng(2);
    let g = random_graph(&mut r, PairSpace::new(10, true, false).unwrap(), 0.3, 5);
    let fit = fit_poisson::<f64>(&g, ModelFamily::Dcsbm, Some(&BlockAssignment::single(10))).unwrap();
    let mut scaled = fit.clone();
    scaled.theta_out.as_mut().unwrap().iter_mut().for_each(|t| *t *= 2.0);
    scaled.theta_in.as_mut().unwrap().iter_mut().for_each(|t| *t *= 2.0);
    scaled.lambda_blocks.as_mut().unwrap()[0] /= 4.0;
    let (a, b) = (fit.expected_degrees().unwrap(), scaled.expected_degrees().unwrap());
    for i in 0..10 {
        assert!(rel_close(a.0[i], b.0[i], 1e-13) && rel_close(a.1[i], b.1[i], 1e-13));
    }
    let gnp = fit_poisson::<f64>(&g, ModelFamily::Gnp, None).unwrap();
    assert!(gnp.expected_degrees().is_err());
}

#[test]
fn expected_count_distribution_examples() {
    let g = MultiGraph::with_index_labels(PairSpace::undirected(5), [(0, 1, 4), (1, 2, 1), (2, 3, 9), (0, 4, 2)])
        .unwrap();
    let gnp = fit_zi_gnp::<f64>(&g).unwrap();
    let (q, p) = (gnp.q_global.unwrap(), gnp.p.unwrap());
    let h = gnp.expected_count_distribution(12).unwrap();
    for n in 0..=12u64 {
        assert!((h.mass[n as usize] - zip_log_pmf_direct(n, q, p).exp()).abs() < 1e-14);
    }
    assert!((h.total() - 1.0).abs() < 1e-12);
    let (_, e_links) = gnp.expected_edges_links();
    assert!((h.mass[0] - (1.0 - e_links / 10.0)).abs() < 1e-14);

    // ten heterogeneous pairs
    let zi = fit_zi_dcsbm::<f64>(&g, &BlockAssignment::new(vec![0, 0, 1, 1, 1], 2).unwrap()).unwrap();
    let h = zi.expected_count_distribution(6).unwrap();
    let laws: Vec<PairLaw<f64>> = zi.pair_laws().map(|(_, _, l)| l).collect();
    assert_eq!(laws.len(), 10);
    for n in 0..=6u64 {
        let avg: f64 = laws.iter().map(|l| zip_log_pmf_direct(n, l.q, l.lambda).exp()).sum::<f64>() / 10.0;
        assert!((h.mass[n as usize] - avg).abs() < 1e-14, "n={n}");
    }
    let tail: f64 = 1.0 - (0..=6u64).map(|n| h.mass[n as usize]).sum::<f64>();
    assert!((h.mass[7] - tail).abs() < 1e-12);
}

/// Survival function of the chi-squared distribution via the regularized
/// lower incomplete gamma series.
fn chi2_sf(x: f64, dof: f64) -> f64 {
    let (a, z) = (dof / 2.0, x / 2.0);
    let mut term = 1.0 / a;
    let mut sum = term;
    for n in 1..10_000 {
        term *= z / (a + n as f64);
        sum += term;
        if term < sum * 1e-16 {
            break;
        }
    }
    1.0 - (a * z.ln() - z - ln_gamma(a)).exp() * sum
}

#[test]
fn single_pair_sampling_matches_law() {
    let g = MultiGraph::with_index_labels(PairSpace::undirected(2), [(0, 1, 1)]).unwrap();
    let mut model = fit_zi_gnp::<f64>(&g).unwrap();
    model.q_global = Some(0.5);
    model.p = Some(2.0);
    let draws = 100_000u64;
    let mut hist = vec![0u64; 12];
    for k in 0..draws {
        let s = sample(&model, k);
        hist[(s.count(0, 1) as usize).min(11)] += 1;
    }
    let mut stat = 0.0;
    let mut cells = 0;
    let mut tail = 1.0;
    for n in 0..11u64 {
        let p = zip_log_pmf_direct(n, 0.5, 2.0).exp();
        tail -= p;
        let e = p * draws as f64;
        stat += (hist[n as usize] as f64 - e).powi(2) / e;
        cells += 1;
    }
    let e = tail * draws as f64;
    if e >= 5.0 {
        stat += (hist[11] as f64 - e).powi(2) / e;
        cells += 1;
    }
    assert!(chi2_sf(stat, (cells - 1) as f64) > 0.001, "chi2 {stat}");
}

#[test]
fn sampling_contracts() {
    let g = MultiGraph::with_index_labels(PairSpace::undirected(8), [(0, 1, 2), (3, 4, 5), (6, 7, 1)]).unwrap();
    let mut model = fit_zi_gnp::<f64>(&g).unwrap();
    assert_eq!(sample(&model, 5), sample(&model, 5));
    assert_ne!(sample(&model, 5), sample(&model, 6));
    model.q_global = Some(0.0);
    assert_eq!(sample(&model, 5).multi_edges(), 0);
}

#[test]
fn node_level_directed_cycle_is_symmetric() {
    let n = 6;
    let g = MultiGraph::with_index_labels(
        PairSpace::new(n, true, false).unwrap(),
        (0..n).map(|i| (i, (i + 1) % n, 3u64)),
    )
    .unwrap();
    let fit = fit_zi_node_level::<f64>(&g, ModelFamily::ZiClcmNode, None, &NodeLevelOptions::default()).unwrap();
    let qo = fit.q_nodes_out.as_ref().unwrap();
    let qi = fit.q_nodes_in.as_ref().unwrap();
    for i in 1..n {
        assert!((qo[i] - qo[0]).abs() < 1e-4, "{qo:?}");
        assert!((qi[i] - qi[0]).abs() < 1e-4, "{qi:?}");
    }
}

#[test]
fn node_level_with_unit_weights_is_plain() {
    let mut r = rng(77);
    let g = random_graph(&mut r, PairSpace::undirected(12), 0.3, 5);
    let plain = fit_poisson::<f64>(&g, ModelFamily::Clcm, None).unwrap();
    let mut node = plain.clone();
    node.family = ModelFamily::ZiClcmNode;
    node.q_nodes_out = Some(vec![1.0; 12]);
    node.q_nodes_in = Some(vec![1.0; 12]);
    assert_eq!(node.log_likelihood(&g).unwrap(), plain.log_likelihood(&g).unwrap());

    let fit = fit_zi_node_level::<f64>(&g, ModelFamily::ZiClcmNode, None, &NodeLevelOptions::default()).unwrap();
    let zi = fit_zi_clcm::<f64>(&g).unwrap();
    assert!(fit.diagnostics.log_likelihood >= zi.diagnostics.log_likelihood - 1e-9);
    let (eo, _) = fit.expected_degrees().unwrap();
    let (ko, _) = g.degrees();
    for i in 0..12 {
        assert!(rel_close(eo[i], ko[i] as f64, 1e-8));
    }
}

#[test]
fn node_level_dcsbm_variants() {
    let mut r = rng(12);
    let g = random_graph(&mut r, PairSpace::new(15, true, false).unwrap(), 0.3, 6);
    let blocks = contiguous_blocks(15, 3);
    let zi = fit_zi_dcsbm::<f64>(&g, &blocks).unwrap();
    for mixing in [NodeBlockMixing::PerBlockPair, NodeBlockMixing::PerBlock] {
        let opts = NodeLevelOptions { mixing, ..NodeLevelOptions::default() };
        let fit = fit_zi_node_level::<f64>(&g, ModelFamily::ZiDcsbmNode, Some(&blocks), &opts).unwrap();
        assert_eq!(fit.node_mixing, Some(mixing));
        if mixing == NodeBlockMixing::PerBlockPair {
            assert!(fit.diagnostics.log_likelihood >= zi.diagnostics.log_likelihood - 1e-9);
        }
        for b in 0..3 {
            let s: f64 = (0..15).filter(|&i| blocks.block_of(i) == b).map(|i| fit.theta_out.as_ref().unwrap()[i]).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
        let (eo, ei) = fit.expected_degrees().unwrap();
        let (ko, ki) = g.degrees();
        for i in 0..15 {
            assert!(rel_close(eo[i], ko[i] as f64, 1e-8) && rel_close(ei[i], ki[i] as f64, 1e-8));
        }
        assert!(fit.q_blocks.as_ref().unwrap().iter().all(|&q| (0.0..=1.0).contains(&q)));
    }
}

#[test]
fn node_level_recovers_planted_weight_ranks() {
    let n = 20;
    let mut r = rng(2024);
    use rand::Rng;
    let q_true: Vec<f64> = (0..n).map(|_| r.random_range(0.2..1.0)).collect();
    let theta: Vec<f64> = (0..n).map(|_| r.random_range(1.0..3.0)).collect();
    let seed_graph = random_graph(&mut r, PairSpace::undirected(n), 0.5, 3);
    let mut plant = fit_poisson::<f64>(&seed_graph, ModelFamily::Clcm, None).unwrap();
    plant.family = ModelFamily::ZiClcmNode;
    plant.theta_out = Some(theta.iter().map(|t| t * 2.0).collect());
    plant.theta_in = plant.theta_out.clone();
    plant.q_nodes_out = Some(q_true.clone());
    plant.q_nodes_in = Some(q_true.clone());
    let mut mean = vec![0.0; n];
    for rep in 0..20 {
        let g = sample(&plant, 1000 + rep);
        let fit = fit_zi_node_level::<f64>(&g, ModelFamily::ZiClcmNode, None, &NodeLevelOptions::default()).unwrap();
        for (m, q) in mean.iter_mut().zip(fit.q_nodes_out.as_ref().unwrap()) {
            *m += q / 20.0;
        }
    }
    let rho = spearman(&q_true, &mean);
    assert!(rho > 0.8, "rank correlation {rho}");
}
