//! JSON persistence of fitted models.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{BlockAssignment, PairSpace};
use crate::scalar::Real;

use super::{Constraint, FitDiagnostics, FittedModel, ModelFamily, NodeBlockMixing};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSpaceFile {
    pub n: usize,
    pub directed: bool,
    pub loops: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlocksFile {
    pub n_blocks: usize,
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeWeightsFile {
    pub out: Vec<f64>,
    #[serde(rename = "in")]
    pub in_: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintValues {
    pub out: Vec<f64>,
    #[serde(rename = "in")]
    pub in_: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintFile {
    /// `none`, `total` (one value per side) or `block_totals`.
    #[serde(rename = "type")]
    pub kind: String,
    pub values: ConstraintValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsFile {
    /// `null` when the likelihood is not finite.
    pub loglik: Option<f64>,
    pub converged: bool,
    #[serde(default)]
    pub iterations: usize,
    #[serde(default)]
    pub binary_fallback: bool,
    #[serde(default)]
    pub optimization_problems: usize,
}

/// On-disk form of a [`FittedModel`]; absent parameters are omitted.
/// Block matrices are stored as rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub family: String,
    pub pair_space: PairSpaceFile,
    pub node_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlocksFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_out: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_in: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_blocks: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_nodes: Option<NodeWeightsFile>,
    pub constraint: ConstraintFile,
    pub diagnostics: DiagnosticsFile,
}

fn to_f64s<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

fn from_f64s<T: Real>(v: Vec<f64>) -> Vec<T> {
    v.into_iter().map(T::lit).collect()
}

fn rows<T: Real>(v: &Option<Vec<T>>, nb: usize) -> Option<Vec<Vec<f64>>> {
    v.as_ref().map(|v| v.chunks(nb).map(to_f64s).collect())
}

fn flatten<T: Real>(name: &str, v: Option<Vec<Vec<f64>>>, nb: usize) -> Result<Option<Vec<T>>> {
    let Some(v) = v else { return Ok(None) };
    if v.len() != nb || v.iter().any(|r| r.len() != nb) {
        return Err(Error::InvalidArgument(format!("{name} must be a {nb}x{nb} matrix")));
    }
    Ok(Some(v.into_iter().flatten().map(T::lit).collect()))
}

impl<T: Real> From<&FittedModel<T>> for ModelFile {
    fn from(m: &FittedModel<T>) -> Self {
        let nb = m.n_blocks();
        let (kind, out, in_) = match &m.constraint {
            Constraint::None => ("none", vec![], vec![]),
            Constraint::Total { out, in_ } => ("total", vec![out.as_f64()], vec![in_.as_f64()]),
            Constraint::BlockTotals { out, in_ } => ("block_totals", to_f64s(out), to_f64s(in_)),
        };
        ModelFile {
            family: m.family.name().to_string(),
            pair_space: PairSpaceFile { n: m.space.n, directed: m.space.directed, loops: m.space.loops },
            node_ids: m.node_ids.clone(),
            blocks: m.blocks.as_ref().map(|b| BlocksFile { n_blocks: b.n_blocks(), labels: b.labels().to_vec() }),
            p: m.p.map(|x| x.as_f64()),
            lambda: rows(&m.lambda_blocks, nb),
            theta_out: m.theta_out.as_deref().map(to_f64s),
            theta_in: m.theta_in.as_deref().map(to_f64s),
            q: m.q_global.map(|x| x.as_f64()),
            q_blocks: rows(&m.q_blocks, nb),
            q_nodes: match (&m.q_nodes_out, &m.q_nodes_in) {
                (Some(o), Some(i)) => Some(NodeWeightsFile {
                    out: to_f64s(o),
                    in_: to_f64s(i),
                    mixing: m.node_mixing.map(|x| x.name().to_string()),
                }),
                _ => None,
            },
            constraint: ConstraintFile { kind: kind.into(), values: ConstraintValues { out, in_ } },
            diagnostics: DiagnosticsFile {
                loglik: Some(m.diagnostics.log_likelihood.as_f64()).filter(|x| x.is_finite()),
                converged: m.diagnostics.converged,
                iterations: m.diagnostics.iterations,
                binary_fallback: m.diagnostics.binary_fallback,
                optimization_problems: m.diagnostics.optimization_problems,
            },
        }
    }
}

impl<T: Real> TryFrom<ModelFile> for FittedModel<T> {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        let family: ModelFamily = f.family.parse()?;
        let n = f.pair_space.n;
        let space = PairSpace::new(n, f.pair_space.directed, f.pair_space.loops)?;
        if f.node_ids.len() != n {
            return Err(Error::InvalidArgument("node_ids length differs from pair_space.n".into()));
        }
        let blocks = f.blocks.map(|b| BlockAssignment::new(b.labels, b.n_blocks)).transpose()?;
        if let Some(b) = &blocks {
            b.check_nodes(n)?;
        }
        let nb = blocks.as_ref().map_or(1, |b| b.n_blocks());
        if (f.lambda.is_some() || f.q_blocks.is_some()) && blocks.is_none() {
            return Err(Error::BlocksRequired(family.name()));
        }
        let node_vec = |name: &str, v: Option<Vec<f64>>| -> Result<Option<Vec<T>>> {
            match v {
                Some(v) if v.len() != n => {
                    Err(Error::InvalidArgument(format!("{name} has {} entries, expected {n}", v.len())))
                }
                v => Ok(v.map(from_f64s)),
            }
        };
        let (q_out, q_in, node_mixing) = match f.q_nodes {
            None => (None, None, None),
            Some(w) => {
                let mixing = match w.mixing.as_deref() {
                    None => None,
                    Some("per_block_pair") => Some(NodeBlockMixing::PerBlockPair),
                    Some("per_block") => Some(NodeBlockMixing::PerBlock),
                    Some(other) => return Err(Error::InvalidArgument(format!("unknown node mixing {other:?}"))),
                };
                (node_vec("q_nodes.out", Some(w.out))?, node_vec("q_nodes.in", Some(w.in_))?, mixing)
            }
        };
        let values = f.constraint.values;
        let constraint = match f.constraint.kind.as_str() {
            "none" => Constraint::None,
            "total" if values.out.len() == 1 && values.in_.len() == 1 => {
                Constraint::Total { out: T::lit(values.out[0]), in_: T::lit(values.in_[0]) }
            }
            "block_totals" if values.out.len() == nb && values.in_.len() == nb => {
                Constraint::BlockTotals { out: from_f64s(values.out), in_: from_f64s(values.in_) }
            }
            other => return Err(Error::InvalidArgument(format!("malformed constraint {other:?}"))),
        };
        Ok(FittedModel {
            family,
            space,
            node_ids: f.node_ids,
            p: f.p.map(T::lit),
            lambda_blocks: flatten("lambda", f.lambda, nb)?,
            theta_out: node_vec("theta_out", f.theta_out)?,
            theta_in: node_vec("theta_in", f.theta_in)?,
            q_global: f.q.map(T::lit),
            q_blocks: flatten("q_blocks", f.q_blocks, nb)?,
            q_nodes_out: q_out,
            q_nodes_in: q_in,
            node_mixing,
            blocks,
            constraint,
            diagnostics: FitDiagnostics {
                log_likelihood: f.diagnostics.loglik.map_or(T::neg_infinity(), T::lit),
                iterations: f.diagnostics.iterations,
                converged: f.diagnostics.converged,
                binary_fallback: f.diagnostics.binary_fallback,
                optimization_problems: f.diagnostics.optimization_problems,
            },
        })
    }
}

impl<T: Real> FittedModel<T> {
    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string_pretty(&ModelFile::from(self))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ModelFile>(text)?.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
