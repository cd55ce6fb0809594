//! Parameter initialization, forward composition, exact gradients and the
//! full-batch training loop.

use serde::{Deserialize, Serialize};

use crate::adgl::Activation;
use crate::affinity::AffinityMatrix;
use crate::dataio::{LabeledPair, Pair, Split};
use crate::edgl::{FilterConfig, Parity};
use crate::graphs::{assemble_global, GlobalGraph};
use crate::linalg::Mat;
use crate::losses::LossConfig;
use crate::{Error, Result};

mod checkpoint;
pub(crate) mod model;
mod optim;
mod params;

pub use checkpoint::{read_params, write_params};
pub use model::Compiled;
pub use optim::OptimizerKind;
pub use params::{init_params, ModelDims, ModelParams};

/// Which encoders feed the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Graph convolution fused with the even-polynomial filter.
    Even,
    /// Graph convolution fused with the odd-polynomial filter.
    Odd,
    /// Graph convolution fused with self-attention over its output.
    Attention,
    /// Graph convolution alone.
    AdglOnly,
    /// Even filter over the raw global matrix, no graph convolution.
    EdglOnly,
    /// Convolution then filter in series, no residual fusion.
    NoFusion,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Even,
        Variant::Odd,
        Variant::Attention,
        Variant::AdglOnly,
        Variant::EdglOnly,
        Variant::NoFusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Even => "even",
            Variant::Odd => "odd",
            Variant::Attention => "attention",
            Variant::AdglOnly => "adgl_only",
            Variant::EdglOnly => "edgl_only",
            Variant::NoFusion => "no_fusion",
        }
    }

    pub fn uses_gcn(self) -> bool {
        self != Variant::EdglOnly
    }

    pub fn uses_edgl(self) -> bool {
        matches!(
            self,
            Variant::Even | Variant::Odd | Variant::EdglOnly | Variant::NoFusion
        )
    }

    pub fn filter_parity(self) -> Option<Parity> {
        match self {
            Variant::Odd => Some(Parity::Odd),
            v if v.uses_edgl() => Some(Parity::Even),
            _ => None,
        }
    }

    /// Fusion weight actually applied for this variant.
    pub fn effective_omega(self, omega: f64) -> f64 {
        match self {
            Variant::Even | Variant::Odd | Variant::Attention => omega,
            Variant::AdglOnly => 1.0,
            Variant::EdglOnly | Variant::NoFusion => 0.0,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown variant {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub seed: u64,
    pub loss: LossConfig,
    pub fusion_omega: f64,
    pub filter: FilterConfig,
    pub gcn_layers: usize,
    pub gcn_hidden: usize,
    pub embed_dim: usize,
    pub edgl_hidden: usize,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub edgl_activation: Activation,
    pub variant: Variant,
    /// Stop once the loss has not improved by `min_delta` for this many epochs.
    pub patience: usize,
    pub min_delta: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            learning_rate: 1e-3,
            optimizer: OptimizerKind::Adam,
            seed: 0,
            loss: LossConfig::default(),
            fusion_omega: 0.5,
            filter: FilterConfig::default(),
            gcn_layers: 2,
            gcn_hidden: 512,
            embed_dim: 256,
            edgl_hidden: 512,
            hidden_activation: Activation::Relu,
            output_activation: Activation::Identity,
            edgl_activation: Activation::Relu,
            variant: Variant::Even,
            patience: 20,
            min_delta: 1e-6,
        }
    }
}

impl TrainConfig {
    pub fn dims(&self, n_nodes: usize) -> ModelDims {
        ModelDims {
            n_nodes,
            gcn_layers: self.gcn_layers,
            gcn_hidden: self.gcn_hidden,
            embed_dim: self.embed_dim,
            edgl_hidden: self.edgl_hidden,
            hidden_activation: self.hidden_activation,
            output_activation: self.output_activation,
            edgl_activation: self.edgl_activation,
            variant: self.variant,
            omega: self.fusion_omega,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        self.loss.validate()?;
        if self.variant.uses_edgl() {
            self.filter.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainLog {
    /// Loss before each epoch's update.
    pub losses: Vec<f64>,
    pub stopped_early: bool,
}

/// Global graph whose interaction block holds only the given training
/// positives.
pub fn masked_graph(
    a_dd: &AffinityMatrix,
    a_tt: &AffinityMatrix,
    train: &[LabeledPair],
    threshold: f64,
) -> Result<GlobalGraph> {
    let mut a_dt = Mat::zeros(a_dd.n(), a_tt.n());
    for lp in train.iter().filter(|p| p.positive) {
        let (d, t) = lp.pair;
        if d >= a_dd.n() || t >= a_tt.n() {
            return Err(Error::InvalidParameter(format!("pair ({d}, {t}) out of range")));
        }
        a_dt[(d, t)] = 1.0;
    }
    assemble_global(a_dd, a_tt, &a_dt, threshold)
}

fn split_labels(pairs: &[LabeledPair]) -> (Vec<Pair>, Vec<Pair>) {
    let pos = pairs.iter().filter(|p| p.positive).map(|p| p.pair).collect();
    let neg = pairs.iter().filter(|p| !p.positive).map(|p| p.pair).collect();
    (pos, neg)
}

/// Predicted interaction matrix `H*`, `n_d x n_t`.
pub fn forward(graph: &GlobalGraph, params: &ModelParams, config: &TrainConfig) -> Result<Mat> {
    let compiled = Compiled::new(graph, config.variant, &config.filter)?;
    Ok(model::forward_cached(&compiled, params)?.h_star)
}

/// Loss value and its exact gradient with respect to every tensor in
/// `params`, over the labeled `batch`.
pub fn gradients(
    graph: &GlobalGraph,
    params: &ModelParams,
    batch: &[LabeledPair],
    config: &TrainConfig,
) -> Result<(f64, ModelParams)> {
    config.validate()?;
    let compiled = Compiled::new(graph, config.variant, &config.filter)?;
    let (pos, neg) = split_labels(batch);
    model::loss_and_gradients(&compiled, params, &pos, &neg, &config.loss)
}

/// Test pairs must be invisible: zero in `H` and `G`, absent from training.
fn check_masking(graph: &GlobalGraph, split: &Split) -> Result<()> {
    let n_d = graph.n_d;
    for lp in &split.test {
        let (d, t) = lp.pair;
        let visible = [graph.h[(d, n_d + t)], graph.g[(d, n_d + t)]];
        if visible.iter().any(|&x| x != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "test pair ({d}, {t}) is visible in the training graph"
            )));
        }
    }
    if split.train.iter().any(|p| split.test.iter().any(|q| q.pair == p.pair)) {
        return Err(Error::InvalidParameter("train and test pairs overlap".to_string()));
    }
    Ok(())
}

/// Full-batch training on the split's training pairs.
pub fn fit(graph: &GlobalGraph, split: &Split, config: &TrainConfig) -> Result<(ModelParams, TrainLog)> {
    config.validate()?;
    check_masking(graph, split)?;
    let mut params = init_params(&config.dims(graph.n_nodes()), config.seed)?;
    let mut log = TrainLog::default();
    if config.epochs == 0 {
        return Ok((params, log));
    }
    let compiled = Compiled::new(graph, config.variant, &config.filter)?;
    let (pos, neg) = split_labels(&split.train);
    let mut optimizer = optim::Optimizer::new(config.optimizer, config.learning_rate, &params);
    let mut best = f64::INFINITY;
    let mut stale = 0usize;
    for epoch in 0..config.epochs {
        let (loss, grads) = model::loss_and_gradients(&compiled, &params, &pos, &neg, &config.loss)?;
        log.losses.push(loss);
        if loss < best - config.min_delta {
            best = loss;
            stale = 0;
        } else {
            stale += 1;
            if config.patience > 0 && stale >= config.patience {
                log::debug!("early stop at epoch {epoch}, loss {loss:.6e}");
                log.stopped_early = true;
                break;
            }
        }
        optimizer.step(&mut params, &grads);
        if !params.is_finite() {
            return Err(Error::Divergence(format!("non-finite parameters after epoch {epoch}")));
        }
    }
    Ok((params, log))
}

#[cfg(test)]
mod tests;
