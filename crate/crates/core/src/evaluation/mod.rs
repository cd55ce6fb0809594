//! Ranking and confusion metrics, per-fold evaluation and mean/std
//! aggregation over warm-start and cold-start plans.

use crate::affinity::AffinityMatrix;
use crate::dataio::{EntitySet, InteractionSet, Split, SplitMode, SplitPlan};
use crate::trainer::{fit, forward, masked_graph, TrainConfig};
use crate::{Error, Result};

mod metrics;
mod report;
mod svg;

pub use metrics::{
    aupr, auroc, pr_curve, roc_curve, thresholded_metrics, Confusion, Thresholded,
};
pub use report::{report_tsv, summary_text};
pub use svg::{pr_svg, roc_svg};

/// Predictions above or at this score are classified positive.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricRecord {
    pub auroc: f64,
    pub aupr: f64,
    pub f1: f64,
    pub acc: f64,
    pub recall: f64,
    pub specificity: f64,
    pub precision: f64,
}

impl MetricRecord {
    pub const NAMES: [&'static str; 7] =
        ["auroc", "aupr", "f1", "acc", "recall", "specificity", "precision"];

    pub fn compute(scores: &[f64], labels: &[bool], threshold: f64) -> Result<Self> {
        let t = thresholded_metrics(scores, labels, threshold)?;
        Ok(Self {
            auroc: auroc(scores, labels)?,
            aupr: aupr(scores, labels)?,
            f1: t.f1,
            acc: t.acc,
            recall: t.recall,
            specificity: t.specificity,
            precision: t.precision,
        })
    }

    pub fn values(&self) -> [f64; 7] {
        [
            self.auroc,
            self.aupr,
            self.f1,
            self.acc,
            self.recall,
            self.specificity,
            self.precision,
        ]
    }

    fn from_values(v: [f64; 7]) -> Self {
        Self {
            auroc: v[0],
            aupr: v[1],
            f1: v[2],
            acc: v[3],
            recall: v[4],
            specificity: v[5],
            precision: v[6],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub index: usize,
    /// Held-out entity index for cold-start folds.
    pub holdout: Option<usize>,
    pub metrics: MetricRecord,
    pub scores: Vec<f64>,
    pub labels: Vec<bool>,
    pub final_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mode: SplitMode,
    pub per_fold: Vec<FoldResult>,
    pub mean: MetricRecord,
    /// Sample standard deviation across folds; 0 for a single fold.
    pub std: MetricRecord,
}

impl EvalReport {
    pub fn aggregate(mode: SplitMode, per_fold: Vec<FoldResult>) -> Result<Self> {
        if per_fold.is_empty() {
            return Err(Error::InvalidParameter("no folds to aggregate".to_string()));
        }
        let n = per_fold.len() as f64;
        let mut mean = [0.0; 7];
        for f in &per_fold {
            for (m, v) in mean.iter_mut().zip(f.metrics.values()) {
                *m += v / n;
            }
        }
        let mut var = [0.0; 7];
        if per_fold.len() > 1 {
            for f in &per_fold {
                for ((s, v), m) in var.iter_mut().zip(f.metrics.values()).zip(mean) {
                    *s += (v - m).powi(2) / (n - 1.0);
                }
            }
        }
        Ok(Self {
            mode,
            per_fold,
            mean: MetricRecord::from_values(mean),
            std: MetricRecord::from_values(var.map(f64::sqrt)),
        })
    }
}

/// Labeled data and learned affinities shared by every fold.
#[derive(Debug, Clone, Copy)]
pub struct ProtocolData<'a> {
    pub entities: &'a EntitySet,
    pub interactions: &'a InteractionSet,
    pub drug_affinity: &'a AffinityMatrix,
    pub target_affinity: &'a AffinityMatrix,
    /// Binarization threshold for the affinity blocks of the adjacency.
    pub threshold: f64,
}

/// Masks the fold's test pairs, trains, and scores the test pairs.
pub fn evaluate_fold(
    data: &ProtocolData<'_>,
    split: &Split,
    index: usize,
    config: &TrainConfig,
) -> Result<FoldResult> {
    let run = || -> Result<FoldResult> {
        let graph = masked_graph(data.drug_affinity, data.target_affinity, &split.train, data.threshold)?;
        let (params, log) = fit(&graph, split, config)?;
        let h_star = forward(&graph, &params, config)?;
        let scores: Vec<f64> = split.test.iter().map(|p| h_star[p.pair]).collect();
        let labels: Vec<bool> = split.test.iter().map(|p| p.positive).collect();
        let metrics = MetricRecord::compute(&scores, &labels, DEFAULT_THRESHOLD)?;
        Ok(FoldResult {
            index,
            holdout: split.holdout,
            metrics,
            scores,
            labels,
            final_loss: log.losses.last().copied(),
        })
    };
    run().map_err(|e| Error::Fold {
        index,
        source: Box::new(e),
    })
}

/// Runs every fold in order and aggregates. Cold-start folds hold out one
/// entity each, so the mean is taken per entity.
pub fn run_protocol(data: &ProtocolData<'_>, plan: &SplitPlan, config: &TrainConfig) -> Result<EvalReport> {
    let folds = plan
        .folds
        .iter()
        .enumerate()
        .map(|(i, s)| evaluate_fold(data, s, i, config))
        .collect::<Result<Vec<_>>>()?;
    EvalReport::aggregate(plan.mode, folds)
}
