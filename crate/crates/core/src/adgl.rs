//! Graph convolution over the affinity-enhanced global network.

use serde::{Deserialize, Serialize};

use crate::graphs::GlobalGraph;
use crate::linalg::{ensure_finite, Mat};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Identity,
    Tanh,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Identity => x,
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative evaluated at the pre-activation `x`. ReLU uses 0 at the kink.
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
            Activation::Tanh => 1.0 - x.tanh().powi(2),
        }
    }

    pub fn map(self, m: &Mat) -> Mat {
        m.map(|x| self.apply(x))
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "identity" | "linear" => Ok(Activation::Identity),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::InvalidParameter(format!("unknown activation {other:?}"))),
        }
    }
}

/// Layer weights `W^(l)` (`d_in x d_out`) with one activation per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnParams {
    pub weights: Vec<Mat>,
    pub activations: Vec<Activation>,
}

impl GcnParams {
    pub fn new(weights: Vec<Mat>, activations: Vec<Activation>) -> Result<Self> {
        if weights.len() != activations.len() {
            return Err(Error::Shape(format!(
                "{} weights but {} activations",
                weights.len(),
                activations.len()
            )));
        }
        for (l, pair) in weights.windows(2).enumerate() {
            if pair[0].ncols() != pair[1].nrows() {
                return Err(Error::Shape(format!(
                    "layer {l} outputs {} but layer {} expects {}",
                    pair[0].ncols(),
                    l + 1,
                    pair[1].nrows()
                )));
            }
        }
        Ok(Self {
            weights,
            activations,
        })
    }

    pub fn layers(&self) -> usize {
        self.weights.len()
    }

    pub fn output_dim(&self) -> Option<usize> {
        self.weights.last().map(|w| w.ncols())
    }
}

/// `activation(G_norm * H * W)`.
pub fn gcn_layer(hl: &Mat, g_norm: &Mat, w: &Mat, activation: Activation) -> Result<Mat> {
    let n = g_norm.nrows();
    if !g_norm.is_square() || hl.nrows() != n || hl.ncols() != w.nrows() {
        return Err(Error::Shape(format!(
            "gcn layer: G {}x{}, H {}x{}, W {}x{}",
            g_norm.nrows(),
            g_norm.ncols(),
            hl.nrows(),
            hl.ncols(),
            w.nrows(),
            w.ncols()
        )));
    }
    let out = activation.map(&(g_norm * (hl * w)));
    ensure_finite(&out, "gcn layer output")?;
    Ok(out)
}

/// Applies every layer starting from `H`. With zero layers the input `H`
/// is returned as is.
pub fn adgl_forward(graph: &GlobalGraph, params: &GcnParams) -> Result<Mat> {
    if let Some(w) = params.weights.first() {
        if w.nrows() != graph.n_nodes() {
            return Err(Error::Shape(format!(
                "first gcn layer expects {} inputs, graph has {} nodes",
                w.nrows(),
                graph.n_nodes()
            )));
        }
    }
    let mut h = graph.h.clone();
    for (w, &act) in params.weights.iter().zip(&params.activations) {
        h = gcn_layer(&h, &graph.g_norm, w, act)?;
    }
    Ok(h)
}
