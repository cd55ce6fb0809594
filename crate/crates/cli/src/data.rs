use std::path::PathBuf;

use dtigraph::dataio::{parse_affinity, read_header_ids};
use dtigraph::{
    parse_feature_view, parse_interactions, run_multiview, sample_negatives, AffinityMatrix,
    EntityKind, EntitySet, FeatureView, InteractionSet, MultiviewOutcome,
};

use crate::{CliError, RunConfig};

pub struct Affinities {
    pub drug: AffinityMatrix,
    pub target: AffinityMatrix,
    /// Present for each kind learned from views in this run.
    pub learned: Vec<(EntityKind, MultiviewOutcome)>,
}

fn sources(cfg: &RunConfig, kind: EntityKind) -> (&[PathBuf], Option<&PathBuf>) {
    match kind {
        EntityKind::Drug => (&cfg.paths.drug_views, cfg.paths.drug_affinity.as_ref()),
        EntityKind::Target => (&cfg.paths.target_views, cfg.paths.target_affinity.as_ref()),
    }
}

/// Identifiers come from the first view header, or from the affinity file
/// when no views are configured.
pub fn entities(cfg: &RunConfig) -> Result<EntitySet, CliError> {
    let ids = |kind: EntityKind| -> Result<Vec<String>, CliError> {
        let (views, affinity) = sources(cfg, kind);
        let path = views.first().or(affinity).ok_or_else(|| {
            CliError::Input(format!("no {kind} views or {kind} affinity configured"))
        })?;
        Ok(read_header_ids(path)?)
    };
    Ok(EntitySet::new(ids(EntityKind::Drug)?, ids(EntityKind::Target)?)?)
}

pub fn views(cfg: &RunConfig, kind: EntityKind, entities: &EntitySet) -> Result<Vec<FeatureView>, CliError> {
    let (paths, _) = sources(cfg, kind);
    if paths.is_empty() {
        return Err(CliError::Input(format!("at least one {kind} view is required")));
    }
    paths
        .iter()
        .map(|p| parse_feature_view(p, kind, entities).map_err(CliError::from))
        .collect()
}

/// Reads configured affinity files and learns the rest from the views.
pub fn affinities(cfg: &RunConfig, entities: &EntitySet, force_learn: bool) -> Result<Affinities, CliError> {
    let mut learned = Vec::new();
    let mut get = |kind: EntityKind| -> Result<AffinityMatrix, CliError> {
        match sources(cfg, kind) {
            (_, Some(path)) if !force_learn => Ok(parse_affinity(path, kind, entities)?),
            _ => {
                let views = views(cfg, kind, entities)?;
                let outcome = run_multiview(&views, &cfg.admm)?;
                if !outcome.converged {
                    log::warn!(
                        "{kind} affinity did not converge in {} iterations; errors {:?}",
                        outcome.iterations,
                        outcome.errors
                    );
                }
                let a = outcome.affinity.clone();
                learned.push((kind, outcome));
                Ok(a)
            }
        }
    };
    let drug = get(EntityKind::Drug)?;
    let target = get(EntityKind::Target)?;
    Ok(Affinities { drug, target, learned })
}

/// Labeled pairs, extended with sampled negatives when `sampling.ratio > 0`.
pub fn interactions(
    cfg: &RunConfig,
    entities: &EntitySet,
    drug_affinity: &AffinityMatrix,
) -> Result<InteractionSet, CliError> {
    let path = cfg
        .paths
        .interactions
        .as_ref()
        .ok_or_else(|| CliError::Input("paths.interactions is required".to_string()))?;
    let set = parse_interactions(path, entities)?;
    if set.positives().is_empty() {
        return Err(CliError::Input(format!("{} has no positive pairs", path.display())));
    }
    if cfg.sampling.ratio > 0.0 {
        Ok(sample_negatives(&set, drug_affinity, cfg.sampling.ratio, cfg.seed)?)
    } else {
        Ok(set)
    }
}
