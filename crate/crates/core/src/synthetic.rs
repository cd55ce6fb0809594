//! Seeded synthetic datasets for tests, benches and demos.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataio::{EntityKind, EntitySet, FeatureView, InteractionSet, LabeledPair, Pair};
use crate::linalg::Mat;
use crate::{Error, Result};

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    let mut m = Mat::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = StandardNormal.sample(rng);
        }
    }
    m
}

#[derive(Debug, Clone)]
pub struct SyntheticDti {
    pub entities: EntitySet,
    /// Positives only; negatives are left to sampling.
    pub interactions: InteractionSet,
    pub drug_views: Vec<FeatureView>,
    pub target_views: Vec<FeatureView>,
    /// Latent factors, `n x rank`.
    pub drug_latent: Mat,
    pub target_latent: Mat,
}

/// Noisy linear views `W_i Z^T + noise` of latent factors `Z`.
fn views_of(rng: &mut ChaCha8Rng, kind: EntityKind, latent: &Mat, dims: &[usize], noise: f64) -> Result<Vec<FeatureView>> {
    dims.iter()
        .map(|&d| {
            let w = gaussian(rng, d, latent.ncols());
            let e = gaussian(rng, d, latent.nrows()) * noise;
            FeatureView::new(kind, w * latent.transpose() + e)
        })
        .collect()
}

/// Rank-`rank` interaction data: the top `positive_fraction` of the scores
/// `U V^T` are positives. Each entity kind gets three feature views derived
/// from its latent factors.
pub fn low_rank_dti(
    n_d: usize,
    n_t: usize,
    rank: usize,
    positive_fraction: f64,
    seed: u64,
) -> Result<SyntheticDti> {
    if rank == 0 || !(0.0..1.0).contains(&positive_fraction) {
        return Err(Error::InvalidParameter(
            "rank must be positive and positive_fraction in [0, 1)".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = gaussian(&mut rng, n_d, rank);
    let v = gaussian(&mut rng, n_t, rank);
    let scores = &u * v.transpose();
    let mut pairs: Vec<Pair> = (0..n_d).flat_map(|d| (0..n_t).map(move |t| (d, t))).collect();
    pairs.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let n_pos = (positive_fraction * (n_d * n_t) as f64).round() as usize;
    pairs.truncate(n_pos);
    let interactions = InteractionSet::new(n_d, n_t, pairs, Vec::new())?;
    let drug_views = views_of(&mut rng, EntityKind::Drug, &u, &[16, 12, 8], 0.1)?;
    let target_views = views_of(&mut rng, EntityKind::Target, &v, &[16, 12, 8], 0.1)?;
    Ok(SyntheticDti {
        entities: EntitySet::numbered(n_d, n_t),
        interactions,
        drug_views,
        target_views,
        drug_latent: u,
        target_latent: v,
    })
}

/// `n_views` views of `n` entities split into `blocks` contiguous groups.
/// Each group spans its own random `rank`-dimensional subspace of a shared
/// latent space; every view is a random linear map of the latent points to
/// `dim` features plus Gaussian noise. Returns the views and each entity's
/// block.
#[allow(clippy::too_many_arguments)]
pub fn block_views(
    kind: EntityKind,
    n: usize,
    blocks: usize,
    n_views: usize,
    dim: usize,
    rank: usize,
    noise: f64,
    seed: u64,
) -> Result<(Vec<FeatureView>, Vec<usize>)> {
    if blocks == 0 || blocks > n || rank == 0 {
        return Err(Error::InvalidParameter(format!(
            "cannot split {n} entities into {blocks} blocks of rank {rank}"
        )));
    }
    let membership: Vec<usize> = (0..n).map(|j| j * blocks / n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let latent_dim = blocks * rank;
    let bases: Vec<Mat> = (0..blocks).map(|_| gaussian(&mut rng, latent_dim, rank)).collect();
    let coefficients = gaussian(&mut rng, rank, n);
    let mut latent = Mat::zeros(latent_dim, n);
    for (j, &b) in membership.iter().enumerate() {
        latent.set_column(j, &(&bases[b] * coefficients.column(j)));
    }
    let mut views = Vec::with_capacity(n_views);
    for _ in 0..n_views {
        let map = gaussian(&mut rng, dim, latent_dim);
        let values = map * &latent + gaussian(&mut rng, dim, n) * noise;
        views.push(FeatureView::new(kind, values)?);
    }
    Ok((views, membership))
}

/// Same labeled pairs with their labels randomly permuted.
pub fn shuffled_labels(interactions: &InteractionSet, seed: u64) -> Result<InteractionSet> {
    let pairs = interactions.labeled_pairs();
    let mut labels: Vec<bool> = pairs.iter().map(|p| p.positive).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let relabeled: Vec<LabeledPair> = pairs
        .iter()
        .zip(labels)
        .map(|(p, l)| LabeledPair::new(p.pair, l))
        .collect();
    interactions.with_labels(&relabeled)
}
