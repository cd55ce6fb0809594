//! Entity sets, feature views, interaction sets and their TSV formats,
//! association-based negative sampling, and fold planning.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::Mat;
use crate::{Error, Result};

mod sampling;
mod splits;
mod tsv;

pub use sampling::{negative_candidate_scores, sample_negatives};
pub use splits::{plan_splits, LabeledPair, Split, SplitMode, SplitPlan, SplitRequest};
pub use tsv::{
    parse_affinity, parse_affinity_str, parse_feature_view, parse_feature_view_str, parse_interactions, parse_interactions_str,
    read_header_ids, write_affinity, write_interactions,
};

/// `(drug_index, target_index)`.
pub type Pair = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Drug,
    Target,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityKind::Drug => f.write_str("drug"),
            EntityKind::Target => f.write_str("target"),
        }
    }
}

/// Ordered drug and target identifiers. Index order is the row/column order
/// of every matrix in the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitySet {
    drug_ids: Vec<String>,
    target_ids: Vec<String>,
    drug_index: HashMap<String, usize>,
    target_index: HashMap<String, usize>,
}

fn index_ids(ids: &[String], kind: EntityKind) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if id.is_empty() {
            return Err(Error::InvalidParameter(format!("empty {kind} identifier")));
        }
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::InvalidParameter(format!(
                "duplicate {kind} identifier {id:?}"
            )));
        }
    }
    Ok(index)
}

impl EntitySet {
    pub fn new(drug_ids: Vec<String>, target_ids: Vec<String>) -> Result<Self> {
        let drug_index = index_ids(&drug_ids, EntityKind::Drug)?;
        let target_index = index_ids(&target_ids, EntityKind::Target)?;
        Ok(Self {
            drug_ids,
            target_ids,
            drug_index,
            target_index,
        })
    }

    /// Convenience constructor producing ids `d0.. / t0..`.
    pub fn numbered(n_d: usize, n_t: usize) -> Self {
        let drugs = (0..n_d).map(|i| format!("d{i}")).collect();
        let targets = (0..n_t).map(|i| format!("t{i}")).collect();
        Self::new(drugs, targets).expect("generated ids are unique")
    }

    pub fn n_d(&self) -> usize {
        self.drug_ids.len()
    }

    pub fn n_t(&self) -> usize {
        self.target_ids.len()
    }

    pub fn drug_ids(&self) -> &[String] {
        &self.drug_ids
    }

    pub fn target_ids(&self) -> &[String] {
        &self.target_ids
    }

    pub fn ids(&self, kind: EntityKind) -> &[String] {
        match kind {
            EntityKind::Drug => &self.drug_ids,
            EntityKind::Target => &self.target_ids,
        }
    }

    pub fn count(&self, kind: EntityKind) -> usize {
        self.ids(kind).len()
    }

    pub fn index_of(&self, kind: EntityKind, id: &str) -> Option<usize> {
        match kind {
            EntityKind::Drug => self.drug_index.get(id).copied(),
            EntityKind::Target => self.target_index.get(id).copied(),
        }
    }

    pub fn require_index(&self, kind: EntityKind, id: &str) -> Result<usize> {
        self.index_of(kind, id)
            .ok_or_else(|| Error::UnknownId(format!("{kind} {id}")))
    }
}

/// One descriptor family for one entity kind, laid out `dim x n` (columns are
/// entities in [`EntitySet`] order).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureView {
    pub kind: EntityKind,
    pub values: Mat,
}

impl FeatureView {
    pub fn new(kind: EntityKind, values: Mat) -> Result<Self> {
        if !crate::linalg::all_finite(&values) {
            return Err(Error::InvalidParameter(
                "non-finite feature value".to_string(),
            ));
        }
        Ok(Self { kind, values })
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_entities(&self) -> usize {
        self.values.ncols()
    }
}

/// Labeled drug-target pairs. Lists are kept sorted and disjoint; pairs in
/// neither list are unknown and take no part in losses or metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSet {
    n_d: usize,
    n_t: usize,
    positives: Vec<Pair>,
    negatives: Vec<Pair>,
    matrix: Mat,
}

impl InteractionSet {
    pub fn new(
        n_d: usize,
        n_t: usize,
        mut positives: Vec<Pair>,
        mut negatives: Vec<Pair>,
    ) -> Result<Self> {
        for &(d, t) in positives.iter().chain(negatives.iter()) {
            if d >= n_d || t >= n_t {
                return Err(Error::InvalidParameter(format!(
                    "pair ({d}, {t}) out of range for {n_d}x{n_t}"
                )));
            }
        }
        positives.sort_unstable();
        positives.dedup();
        negatives.sort_unstable();
        negatives.dedup();
        let mut matrix = Mat::zeros(n_d, n_t);
        for &(d, t) in &positives {
            matrix[(d, t)] = 1.0;
        }
        if let Some(&(d, t)) = negatives.iter().find(|&&(d, t)| matrix[(d, t)] != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pair ({d}, {t}) is both positive and negative"
            )));
        }
        Ok(Self {
            n_d,
            n_t,
            positives,
            negatives,
            matrix,
        })
    }

    pub fn n_d(&self) -> usize {
        self.n_d
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn positives(&self) -> &[Pair] {
        &self.positives
    }

    pub fn negatives(&self) -> &[Pair] {
        &self.negatives
    }

    /// Binary `n_d x n_t` matrix with ones exactly at the positives.
    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn label(&self, pair: Pair) -> Option<bool> {
        if self.positives.binary_search(&pair).is_ok() {
            Some(true)
        } else if self.negatives.binary_search(&pair).is_ok() {
            Some(false)
        } else {
            None
        }
    }

    /// Every labeled pair in ascending pair order.
    pub fn labeled_pairs(&self) -> Vec<LabeledPair> {
        let mut out: Vec<LabeledPair> = self
            .positives
            .iter()
            .map(|&pair| LabeledPair::new(pair, true))
            .chain(
                self.negatives
                    .iter()
                    .map(|&pair| LabeledPair::new(pair, false)),
            )
            .collect();
        out.sort_unstable_by_key(|p| p.pair);
        out
    }

    /// Same pairs with their labels replaced. Used for permutation controls.
    pub fn with_labels(&self, pairs: &[LabeledPair]) -> Result<Self> {
        let (pos, neg): (Vec<&LabeledPair>, Vec<&LabeledPair>) = pairs.iter().partition(|p| p.positive);
        Self::new(
            self.n_d,
            self.n_t,
            pos.into_iter().map(|p| p.pair).collect(),
            neg.into_iter().map(|p| p.pair).collect(),
        )
    }
}
