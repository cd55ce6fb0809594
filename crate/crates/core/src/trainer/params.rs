use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Variant;
use crate::adgl::{Activation, GcnParams};
use crate::edgl::{AttentionParams, EdglParams};
use crate::head::HeadParams;
use crate::linalg::{all_finite, Mat};
use crate::{Error, Result};

/// Layer widths and activations for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDims {
    /// `n_d + n_t`.
    pub n_nodes: usize,
    pub gcn_layers: usize,
    pub gcn_hidden: usize,
    /// Embedding width `m`.
    pub embed_dim: usize,
    pub edgl_hidden: usize,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub edgl_activation: Activation,
    pub variant: Variant,
    pub omega: f64,
}

impl ModelDims {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes == 0 || self.embed_dim == 0 || self.gcn_hidden == 0 || self.edgl_hidden == 0 {
            return Err(Error::InvalidParameter("model widths must be positive".to_string()));
        }
        if self.variant.uses_gcn() && self.gcn_layers == 0 {
            return Err(Error::InvalidParameter(format!(
                "variant {} needs at least one gcn layer",
                self.variant
            )));
        }
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(Error::InvalidParameter(format!(
                "fusion weight must lie in [0, 1], got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// `(fan_in, fan_out)` of every GCN layer.
    fn gcn_shapes(&self) -> Vec<(usize, usize)> {
        if !self.variant.uses_gcn() {
            return Vec::new();
        }
        (0..self.gcn_layers)
            .map(|l| {
                let fan_in = if l == 0 { self.n_nodes } else { self.gcn_hidden };
                let fan_out = if l + 1 == self.gcn_layers {
                    self.embed_dim
                } else {
                    self.gcn_hidden
                };
                (fan_in, fan_out)
            })
            .collect()
    }
}

/// Every learnable matrix. Biases are stored as `1 x d` matrices. Gradients
/// use the same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub gcn: GcnParams,
    pub edgl: Option<EdglParams>,
    pub attention: Option<AttentionParams>,
    pub head: HeadParams,
}

impl ModelParams {
    /// Learnable tensors in a fixed order, with stable names.
    pub fn named_tensors(&self) -> Vec<(String, &Mat)> {
        let mut out: Vec<(String, &Mat)> = self
            .gcn
            .weights
            .iter()
            .enumerate()
            .map(|(l, w)| (format!("gcn.{l}"), w))
            .collect();
        if let Some(e) = &self.edgl {
            out.push(("edgl.w0".into(), &e.w0));
            out.push(("edgl.b0".into(), &e.b0));
            out.push(("edgl.w1".into(), &e.w1));
            out.push(("edgl.b1".into(), &e.b1));
        }
        if let Some(a) = &self.attention {
            out.push(("attention.wq".into(), &a.wq));
            out.push(("attention.wk".into(), &a.wk));
            out.push(("attention.wv".into(), &a.wv));
        }
        out.push(("head.wl".into(), &self.head.wl));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Mat> {
        let mut out: Vec<&mut Mat> = self.gcn.weights.iter_mut().collect();
        if let Some(e) = &mut self.edgl {
            out.extend([&mut e.w0, &mut e.b0, &mut e.w1, &mut e.b1]);
        }
        if let Some(a) = &mut self.attention {
            out.extend([&mut a.wq, &mut a.wk, &mut a.wv]);
        }
        out.push(&mut self.head.wl);
        out
    }

    pub fn tensors(&self) -> Vec<&Mat> {
        self.named_tensors().into_iter().map(|(_, m)| m).collect()
    }

    /// Same structure with every tensor zeroed.
    pub fn zeros_like(&self) -> Self {
        let mut out = self.clone();
        for t in out.tensors_mut() {
            t.fill(0.0);
        }
        out
    }

    pub fn n_coordinates(&self) -> usize {
        self.tensors().iter().map(|m| m.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().into_iter().all(all_finite)
    }

    pub fn scale(&mut self, c: f64) {
        for t in self.tensors_mut() {
            *t *= c;
        }
    }
}

fn xavier(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize) -> Mat {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    // fill row by row so the draw order does not depend on storage order
    let mut m = Mat::zeros(fan_in, fan_out);
    for r in 0..fan_in {
        for c in 0..fan_out {
            m[(r, c)] = rng.random_range(-bound..bound);
        }
    }
    m
}

/// Xavier-uniform weights, zero biases; deterministic per seed.
pub fn init_params(dims: &ModelDims, seed: u64) -> Result<ModelParams> {
    dims.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = dims.gcn_shapes();
    let weights: Vec<Mat> = shapes
        .iter()
        .map(|&(i, o)| xavier(&mut rng, i, o))
        .collect();
    let activations = (0..shapes.len())
        .map(|l| {
            if l + 1 == shapes.len() {
                dims.output_activation
            } else {
                dims.hidden_activation
            }
        })
        .collect();
    let gcn = GcnParams::new(weights, activations)?;

    let m = dims.embed_dim;
    let edgl = dims.variant.uses_edgl().then(|| {
        let input = if dims.variant.uses_gcn() { m } else { dims.n_nodes };
        EdglParams {
            w0: xavier(&mut rng, input, dims.edgl_hidden),
            b0: Mat::zeros(1, dims.edgl_hidden),
            w1: xavier(&mut rng, dims.edgl_hidden, m),
            b1: Mat::zeros(1, m),
            activation: dims.edgl_activation,
        }
    });
    let attention = (dims.variant == Variant::Attention).then(|| AttentionParams {
        wq: xavier(&mut rng, m, m),
        wk: xavier(&mut rng, m, m),
        wv: xavier(&mut rng, m, m),
    });
    let head = HeadParams {
        omega: dims.omega,
        wl: xavier(&mut rng, m, m),
    };
    Ok(ModelParams {
        gcn,
        edgl,
        attention,
        head,
    })
}
