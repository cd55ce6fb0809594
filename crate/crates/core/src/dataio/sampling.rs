use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{InteractionSet, Pair};
use crate::affinity::AffinityMatrix;
use crate::{Error, Result};

/// Scores every unknown pair `(d, t)` by the highest affinity between `d` and
/// any drug already known to hit `t` (0 when `t` has no positives). Pairs
/// come back in ascending pair order.
pub fn negative_candidate_scores(
    interactions: &InteractionSet,
    drug_affinity: &AffinityMatrix,
) -> Result<Vec<(Pair, f64)>> {
    let (n_d, n_t) = (interactions.n_d(), interactions.n_t());
    let aff = drug_affinity.values();
    if aff.nrows() != n_d || aff.ncols() != n_d {
        return Err(Error::Shape(format!(
            "drug affinity is {}x{}, expected {n_d}x{n_d}",
            aff.nrows(),
            aff.ncols()
        )));
    }
    let mut positives_by_target: Vec<Vec<usize>> = vec![Vec::new(); n_t];
    for &(d, t) in interactions.positives() {
        positives_by_target[t].push(d);
    }
    let mut out = Vec::new();
    for d in 0..n_d {
        for (t, hitters) in positives_by_target.iter().enumerate() {
            if interactions.label((d, t)).is_some() {
                continue;
            }
            let score = hitters
                .iter()
                .map(|&other| aff[(d, other)])
                .fold(0.0, f64::max);
            out.push(((d, t), score));
        }
    }
    Ok(out)
}

/// Extends the negatives to `floor(ratio * |positives|)` pairs, drawing the
/// lowest-scoring unknown pairs first. Explicit negatives already present are
/// kept and count toward the total.
pub fn sample_negatives(
    interactions: &InteractionSet,
    drug_affinity: &AffinityMatrix,
    ratio: f64,
    seed: u64,
) -> Result<InteractionSet> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "negative ratio must be positive, got {ratio}"
        )));
    }
    let wanted = (ratio * interactions.positives().len() as f64).floor() as usize;
    if wanted == 0 {
        return Err(Error::InvalidParameter(
            "ratio yields zero negatives".to_string(),
        ));
    }
    let missing = wanted.saturating_sub(interactions.negatives().len());
    if missing == 0 {
        return Ok(interactions.clone());
    }

    let mut candidates = negative_candidate_scores(interactions, drug_affinity)?;
    if candidates.len() < missing {
        return Err(Error::InsufficientUnknown {
            requested: missing,
            available: candidates.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates.shuffle(&mut rng);
    // stable: equal scores keep their shuffled order
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut negatives = interactions.negatives().to_vec();
    negatives.extend(candidates.into_iter().take(missing).map(|(p, _)| p));
    InteractionSet::new(
        interactions.n_d(),
        interactions.n_t(),
        interactions.positives().to_vec(),
        negatives,
    )
}
