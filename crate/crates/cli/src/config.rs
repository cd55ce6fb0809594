//! Run configuration. Every key is optional; unknown keys are rejected.
//! Sections may be written as tables or as flat dotted keys
//! (`train.epochs = 200`).

use std::path::{Path, PathBuf};

use dtigraph::{
    Activation, AdmmConfig, FilterConfig, LossConfig, LossKind, SplitMode, TrainConfig, Variant,
};
use dtigraph::trainer::OptimizerKind;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads for fold-level parallelism.
    pub jobs: usize,
    pub out_dir: PathBuf,
    /// Binarization threshold for affinity blocks of the adjacency.
    pub threshold: f64,
    pub paths: Paths,
    pub admm: AdmmConfig,
    pub sampling: Sampling,
    pub model: Model,
    pub filter: Filter,
    pub loss: LossConfig,
    pub train: Train,
    pub eval: Eval,
    pub sweep: Sweep,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            jobs: 1,
            out_dir: PathBuf::from("run"),
            threshold: 0.8,
            paths: Paths::default(),
            admm: AdmmConfig::default(),
            sampling: Sampling::default(),
            model: Model::default(),
            filter: Filter::default(),
            loss: LossConfig::default(),
            train: Train::default(),
            eval: Eval::default(),
            sweep: Sweep::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub drug_views: Vec<PathBuf>,
    pub target_views: Vec<PathBuf>,
    pub interactions: Option<PathBuf>,
    /// Precomputed affinities; learned from the views when absent.
    pub drug_affinity: Option<PathBuf>,
    pub target_affinity: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    /// Negatives per positive.
    pub ratio: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self { ratio: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Model {
    pub variant: Variant,
    pub gcn_layers: usize,
    pub gcn_hidden: usize,
    pub embed_dim: usize,
    pub edgl_hidden: usize,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub edgl_activation: Activation,
    pub fusion_omega: f64,
}

impl Default for Model {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            variant: t.variant,
            gcn_layers: t.gcn_layers,
            gcn_hidden: t.gcn_hidden,
            embed_dim: t.embed_dim,
            edgl_hidden: t.edgl_hidden,
            hidden_activation: t.hidden_activation,
            output_activation: t.output_activation,
            edgl_activation: t.edgl_activation,
            fusion_omega: t.fusion_omega,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Filter {
    pub k: usize,
    pub alpha: f64,
}

impl Default for Filter {
    fn default() -> Self {
        let f = FilterConfig::default();
        Self { k: f.k, alpha: f.alpha }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Train {
    pub epochs: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub patience: usize,
    pub min_delta: f64,
}

impl Default for Train {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            epochs: t.epochs,
            learning_rate: t.learning_rate,
            optimizer: t.optimizer,
            patience: t.patience,
            min_delta: t.min_delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Eval {
    pub mode: SplitMode,
    pub folds: usize,
    /// Held-out identifiers for cold-start modes. Empty means every entity
    /// whose labeled pairs include both classes.
    pub holdouts: Vec<String>,
}

impl Default for Eval {
    fn default() -> Self {
        Self {
            mode: SplitMode::Warm,
            folds: 10,
            holdouts: Vec::new(),
        }
    }
}

/// Grid axes; an empty axis keeps the base value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub k: Vec<usize>,
    pub alpha: Vec<f64>,
    pub varpi: Vec<f64>,
    pub omega: Vec<f64>,
    pub gcn_layers: Vec<usize>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub mode: Option<SplitMode>,
    pub variant: Option<Variant>,
    pub loss: Option<LossKind>,
    pub ratio: Option<f64>,
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))
    }

    /// Reads the file (when given), resolving relative paths against its
    /// directory, then applies overrides.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
                let mut cfg = Self::from_toml(&text)?;
                if let Some(base) = p.parent() {
                    cfg.paths.resolve(base);
                }
                cfg
            }
            None => Self::default(),
        };
        cfg.apply(overrides);
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.mode {
            self.eval.mode = v;
        }
        if let Some(v) = o.variant {
            self.model.variant = v;
        }
        if let Some(v) = o.loss {
            self.loss.kind = v;
        }
        if let Some(v) = o.ratio {
            self.sampling.ratio = v;
        }
        if let Some(v) = o.jobs {
            self.jobs = v;
        }
        if let Some(v) = &o.out_dir {
            self.out_dir = v.clone();
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let m = &self.model;
        TrainConfig {
            epochs: self.train.epochs,
            learning_rate: self.train.learning_rate,
            optimizer: self.train.optimizer,
            seed: self.seed,
            loss: self.loss,
            fusion_omega: m.fusion_omega,
            filter: FilterConfig {
                k: self.filter.k,
                alpha: self.filter.alpha,
                ..FilterConfig::default()
            },
            gcn_layers: m.gcn_layers,
            gcn_hidden: m.gcn_hidden,
            embed_dim: m.embed_dim,
            edgl_hidden: m.edgl_hidden,
            hidden_activation: m.hidden_activation,
            output_activation: m.output_activation,
            edgl_activation: m.edgl_activation,
            variant: m.variant,
            patience: self.train.patience,
            min_delta: self.train.min_delta,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

impl Paths {
    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.drug_views.iter_mut().for_each(fix);
        self.target_views.iter_mut().for_each(fix);
        for p in [
            &mut self.interactions,
            &mut self.drug_affinity,
            &mut self.target_affinity,
            &mut self.checkpoint,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }
}
