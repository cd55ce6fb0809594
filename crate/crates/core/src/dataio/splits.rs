use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EntityKind, EntitySet, InteractionSet, Pair};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabeledPair {
    pub pair: Pair,
    pub positive: bool,
}

impl LabeledPair {
    pub fn new(pair: Pair, positive: bool) -> Self {
        Self { pair, positive }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    Warm,
    ColdDrug,
    ColdTarget,
}

impl std::fmt::Display for SplitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SplitMode::Warm => "warm",
            SplitMode::ColdDrug => "cold_drug",
            SplitMode::ColdTarget => "cold_target",
        })
    }
}

impl std::str::FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "warm" => Ok(SplitMode::Warm),
            "cold_drug" => Ok(SplitMode::ColdDrug),
            "cold_target" => Ok(SplitMode::ColdTarget),
            other => Err(Error::InvalidParameter(format!("unknown split mode {other:?}"))),
        }
    }
}

/// What to plan: `k` warm folds, or one cold split per held-out identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitRequest {
    Warm { k: usize },
    ColdDrug { holdouts: Vec<String> },
    ColdTarget { holdouts: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<LabeledPair>,
    pub test: Vec<LabeledPair>,
    /// Held-out entity index for cold splits.
    pub holdout: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitPlan {
    pub mode: SplitMode,
    pub folds: Vec<Split>,
    pub seed: u64,
}

pub fn plan_splits(
    interactions: &InteractionSet,
    entities: &EntitySet,
    request: &SplitRequest,
    seed: u64,
) -> Result<SplitPlan> {
    let labeled = interactions.labeled_pairs();
    match request {
        SplitRequest::Warm { k } => {
            let k = *k;
            if k < 2 {
                return Err(Error::InvalidParameter(format!(
                    "warm split needs k >= 2, got {k}"
                )));
            }
            if k > labeled.len() {
                return Err(Error::InvalidParameter(format!(
                    "fold count {k} exceeds pair count {}",
                    labeled.len()
                )));
            }
            let mut order = labeled.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            order.shuffle(&mut rng);

            let (base, extra) = (order.len() / k, order.len() % k);
            let mut folds = Vec::with_capacity(k);
            let mut start = 0;
            for f in 0..k {
                let len = base + usize::from(f < extra);
                let test = order[start..start + len].to_vec();
                let train = order[..start]
                    .iter()
                    .chain(&order[start + len..])
                    .copied()
                    .collect();
                folds.push(Split {
                    train,
                    test,
                    holdout: None,
                });
                start += len;
            }
            Ok(SplitPlan {
                mode: SplitMode::Warm,
                folds,
                seed,
            })
        }
        SplitRequest::ColdDrug { holdouts } => {
            cold(&labeled, entities, EntityKind::Drug, holdouts, seed)
        }
        SplitRequest::ColdTarget { holdouts } => {
            cold(&labeled, entities, EntityKind::Target, holdouts, seed)
        }
    }
}

fn cold(
    labeled: &[LabeledPair],
    entities: &EntitySet,
    kind: EntityKind,
    holdouts: &[String],
    seed: u64,
) -> Result<SplitPlan> {
    if holdouts.is_empty() {
        return Err(Error::InvalidParameter(
            "cold split needs at least one holdout".to_string(),
        ));
    }
    let side = |p: &LabeledPair| match kind {
        EntityKind::Drug => p.pair.0,
        EntityKind::Target => p.pair.1,
    };
    let mut folds = Vec::with_capacity(holdouts.len());
    for id in holdouts {
        let idx = entities.require_index(kind, id)?;
        let (test, train): (Vec<LabeledPair>, Vec<LabeledPair>) =
            labeled.iter().partition(|p| side(p) == idx);
        if test.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "holdout {kind} {id} has no labeled pairs"
            )));
        }
        folds.push(Split {
            train,
            test,
            holdout: Some(idx),
        });
    }
    Ok(SplitPlan {
        mode: match kind {
            EntityKind::Drug => SplitMode::ColdDrug,
            EntityKind::Target => SplitMode::ColdTarget,
        },
        folds,
        seed,
    })
}
