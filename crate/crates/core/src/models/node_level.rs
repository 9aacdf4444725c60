//! Zero-inflated models with node-level mixture weights
//! `q_ij = q_{b_i b_j} q_i^out q_j^in`.
//!
//! Rates stay tied to the plain fit (`lambda_ij = omega_ij / q_ij`) and the
//! weights are found by box-constrained coordinate ascent. Without blocks, or
//! with per-block-pair weights, the search starts at the matching
//! zero-inflated fit, so the result never has lower likelihood than it.

use crate::error::{Error, Result};
use crate::multigraph::{BlockAssignment, MultiGraph};
use crate::numerics::{maximize_box_constrained, BoxObjective, OptimizerConfig};
use crate::scalar::Real;

use super::fit::{fit_zi_clcm, fit_zi_dcsbm, set_clcm_thetas, BlockConstants};
use super::rates::degree_corrected;
use super::{ln_zero_probability, Constraint, FittedModel, ModelFamily};

/// How the block factor `q_{bd}` of the node-level DCSBM is parametrized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeBlockMixing {
    /// One free weight per (canonical) block pair.
    #[default]
    PerBlockPair,
    /// One weight per block, `q_bd = sqrt(q_b q_d)`.
    PerBlock,
}

impl NodeBlockMixing {
    pub fn name(self) -> &'static str {
        match self {
            NodeBlockMixing::PerBlockPair => "per_block_pair",
            NodeBlockMixing::PerBlock => "per_block",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeLevelOptions<T> {
    pub mixing: NodeBlockMixing,
    pub optimizer: OptimizerConfig<T>,
    /// Lower bound of every weight; the upper bound is 1.
    pub q_floor: T,
}

impl<T: Real> Default for NodeLevelOptions<T> {
    fn default() -> Self {
        Self {
            mixing: NodeBlockMixing::PerBlockPair,
            optimizer: OptimizerConfig::multivariate(),
            q_floor: T::lit(1e-6),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Term<T> {
    omega: T,
    a: u64,
    /// coordinate indices; `usize::MAX` marks a missing factor
    block: [usize; 2],
    src: usize,
    dst: usize,
}

struct Objective<T> {
    terms: Vec<Term<T>>,
    incidence: Vec<Vec<u32>>,
}

impl<T: Real> Objective<T> {
    #[inline]
    fn weight(&self, t: &Term<T>, x: &[T]) -> T {
        let mut q = x[t.src] * x[t.dst];
        match t.block {
            [usize::MAX, _] => {}
            [b, usize::MAX] => q *= x[b],
            [b, d] => q *= (x[b] * x[d]).sqrt(),
        }
        q
    }

    #[inline]
    fn term(&self, t: &Term<T>, x: &[T]) -> T {
        let q = self.weight(t, x);
        if t.a == 0 {
            ln_zero_probability(q, t.omega / q)
        } else {
            (T::one() - T::count(t.a)) * q.ln() - t.omega / q
        }
    }
}

impl<T: Real> BoxObjective<T> for Objective<T> {
    fn value(&self, x: &[T]) -> T {
        self.terms.iter().map(|t| self.term(t, x)).sum()
    }

    fn partial(&self, x: &[T], k: usize) -> T {
        self.incidence[k].iter().map(|&p| self.term(&self.terms[p as usize], x)).sum()
    }
}

/// Fits `ZI_CLCM_NODE` (no blocks) or `ZI_DCSBM_NODE`.
///
/// Nodes of zero degree on a side get `q_i = 0` and `theta_i = 0` there and
/// are left out of the search.
pub fn fit_zi_node_level<T: Real>(
    g: &MultiGraph,
    family: ModelFamily,
    blocks: Option<&BlockAssignment>,
    options: &NodeLevelOptions<T>,
) -> Result<FittedModel<T>> {
    options.optimizer.validate()?;
    if !(options.q_floor > T::zero() && options.q_floor < T::one()) {
        return Err(Error::InvalidArgument("q_floor must lie in (0, 1)".into()));
    }
    let (blocks, start) = match family {
        ModelFamily::ZiClcmNode => (BlockAssignment::single(g.n_nodes()), fit_zi_clcm::<T>(g)?),
        ModelFamily::ZiDcsbmNode => {
            let b = blocks.ok_or(Error::BlocksRequired(family.name()))?.clone();
            let start = fit_zi_dcsbm::<T>(g, &b)?;
            (b, start)
        }
        other => return Err(Error::FamilyMismatch(other.name())),
    };
    let with_blocks = family == ModelFamily::ZiDcsbmNode;
    let nb = blocks.n_blocks();
    let (rs, tallies) = degree_corrected::<T>(g, &blocks, &BlockConstants::ones(nb))?;
    let directed = g.is_directed();
    let n = g.n_nodes();
    let floor = options.q_floor;
    let clamp = |v: T| v.max(floor).min(T::one());

    // coordinate layout: [block weights][out weights][in weights]
    let mut x0 = Vec::new();
    let mut block_coord = vec![usize::MAX; nb * nb];
    if with_blocks {
        let qb = start.q_blocks.as_ref().expect("zi-DCSBM has block weights");
        match options.mixing {
            NodeBlockMixing::PerBlockPair => {
                for (b, d) in tallies.block_pairs() {
                    if tallies.multi_edges[tallies.idx(b, d)] > 0 {
                        block_coord[b * nb + d] = x0.len();
                        block_coord[d * nb + b] = x0.len();
                        x0.push(clamp(qb[b * nb + d]));
                    }
                }
            }
            NodeBlockMixing::PerBlock => {
                for b in 0..nb {
                    block_coord[b] = x0.len();
                    x0.push(clamp(qb[b * nb + b].max(floor)));
                }
            }
        }
    }
    let node_start = if with_blocks {
        T::one()
    } else {
        clamp(start.q_global.expect("zi-CLCM has a global weight").sqrt())
    };
    let (k_out, k_in) = g.degrees();
    let mut out_coord = vec![usize::MAX; n];
    for i in 0..n {
        if k_out[i] > 0 {
            out_coord[i] = x0.len();
            x0.push(node_start);
        }
    }
    let mut in_coord = out_coord.clone();
    if directed {
        for i in 0..n {
            in_coord[i] = usize::MAX;
            if k_in[i] > 0 {
                in_coord[i] = x0.len();
                x0.push(node_start);
            }
        }
    }

    let mut terms = Vec::new();
    let mut incidence: Vec<Vec<u32>> = vec![Vec::new(); x0.len()];
    for (i, j, a) in g.pair_counts() {
        let omega = rs.omega(i, j);
        if omega <= T::zero() {
            continue;
        }
        let (bi, bj) = (blocks.block_of(i), blocks.block_of(j));
        let block = if !with_blocks {
            [usize::MAX, usize::MAX]
        } else {
            match options.mixing {
                NodeBlockMixing::PerBlockPair => [block_coord[bi * nb + bj], usize::MAX],
                NodeBlockMixing::PerBlock => [block_coord[bi], block_coord[bj]],
            }
        };
        let term = Term { omega, a, block, src: out_coord[i], dst: in_coord[j] };
        let id = terms.len() as u32;
        let mut touched = vec![term.src, term.dst];
        touched.extend(block.iter().copied().filter(|&c| c != usize::MAX));
        touched.sort_unstable();
        touched.dedup();
        for c in touched {
            incidence[c].push(id);
        }
        terms.push(term);
    }
    let objective = Objective { terms, incidence };
    let lower = vec![floor; x0.len()];
    let upper = vec![T::one(); x0.len()];
    let opt = maximize_box_constrained(&objective, &x0, &lower, &upper, &options.optimizer)?;
    let x = opt.argmax;

    let pick = |coords: &[usize]| -> Vec<T> {
        coords.iter().map(|&c| if c == usize::MAX { T::zero() } else { x[c] }).collect()
    };
    let q_out = pick(&out_coord);
    let q_in = pick(&in_coord);
    let divide = |theta: &[T], q: &[T]| -> Vec<T> {
        theta.iter().zip(q).map(|(t, q)| if *q > T::zero() { *t / *q } else { T::zero() }).collect()
    };

    let mut model = FittedModel::bare(family, g);
    if with_blocks {
        let mut qb = vec![T::zero(); nb * nb];
        let mut lambda = vec![T::zero(); nb * nb];
        for b in 0..nb {
            for d in 0..nb {
                let (cb, cd) = tallies.canonical(b, d);
                if tallies.multi_edges[tallies.idx(cb, cd)] == 0 {
                    continue;
                }
                let q = match options.mixing {
                    NodeBlockMixing::PerBlockPair => x[block_coord[b * nb + d]],
                    NodeBlockMixing::PerBlock => (x[block_coord[b]] * x[block_coord[d]]).sqrt(),
                };
                qb[b * nb + d] = q;
                lambda[b * nb + d] = rs.rate(b, d) / q;
            }
        }
        // renormalize theta to unit block sums, moving the scale into lambda
        let mut t_out = divide(&rs.theta_out, &q_out);
        let mut t_in = divide(&rs.theta_in, &q_in);
        let labels = blocks.labels();
        let mut s_out = vec![T::zero(); nb];
        let mut s_in = vec![T::zero(); nb];
        for i in 0..n {
            s_out[labels[i]] += t_out[i];
            s_in[labels[i]] += t_in[i];
        }
        for i in 0..n {
            t_out[i] /= s_out[labels[i]];
            t_in[i] /= s_in[labels[i]];
        }
        for b in 0..nb {
            for d in 0..nb {
                lambda[b * nb + d] *= s_out[b] * s_in[d];
            }
        }
        model.theta_out = Some(t_out);
        model.theta_in = Some(t_in);
        model.blocks = Some(blocks);
        model.q_blocks = Some(qb);
        model.lambda_blocks = Some(lambda);
        model.node_mixing = Some(options.mixing);
        model.constraint = Constraint::BlockTotals { out: vec![T::one(); nb], in_: vec![T::one(); nb] };
    } else {
        let scale = rs.rates[0].sqrt();
        set_clcm_thetas(&mut model, &rs, |_| scale);
        let t_out = divide(model.theta_out.as_ref().unwrap(), &q_out);
        let t_in = divide(model.theta_in.as_ref().unwrap(), &q_in);
        model.constraint = Constraint::Total { out: t_out.iter().copied().sum(), in_: t_in.iter().copied().sum() };
        model.theta_out = Some(t_out);
        model.theta_in = Some(t_in);
    }
    model.q_nodes_out = Some(q_out);
    model.q_nodes_in = Some(q_in);
    model.diagnostics.iterations = rs.sweeps + opt.sweeps;
    model.diagnostics.converged = rs.converged && opt.converged;
    model.diagnostics.optimization_problems = 1;
    model.diagnostics.log_likelihood = model.log_likelihood(g)?;
    Ok(model)
}
