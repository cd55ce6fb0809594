//! Shared fixtures for the criterion benches.

use dtigraph::synthetic::low_rank_dti;
use dtigraph::trainer::masked_graph;
use dtigraph::{run_multiview, AdmmConfig, GlobalGraph, InteractionSet};

/// Global graph over a seeded low-rank dataset with learned affinities.
pub fn fixture_graph(n_d: usize, n_t: usize, seed: u64) -> (GlobalGraph, InteractionSet) {
    let data = low_rank_dti(n_d, n_t, 3, 0.2, seed).expect("synthetic data");
    let cfg = AdmmConfig::default();
    let a_dd = run_multiview(&data.drug_views, &cfg).expect("drug affinity").affinity;
    let a_tt = run_multiview(&data.target_views, &cfg).expect("target affinity").affinity;
    let train = data.interactions.labeled_pairs();
    let graph = masked_graph(&a_dd, &a_tt, &train, 0.8).expect("graph");
    (graph, data.interactions)
}
