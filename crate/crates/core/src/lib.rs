//! Dual graph learning for drug-target interaction (DTI) prediction.
//!
//! The pipeline, end to end:
//!
//! 1. [`affinity`] learns a drug affinity matrix and a target affinity matrix
//!    from several numeric feature views with a low-rank + sparse ADMM scheme.
//! 2. [`graphs`] assembles the affinity-enhanced global network `H`, the
//!    binarized adjacency `G`, its normalization and the bipartite
//!    propagation matrix `P`.
//! 3. [`adgl`] runs graph convolution over `(H, G_norm)`.
//! 4. [`edgl`] applies two affine layers and the even-polynomial filter in
//!    `P` (with odd-filter and self-attention variants).
//! 5. [`head`] fuses both embeddings and decodes scores with a bilinear
//!    sigmoid decoder.
//! 6. [`losses`] provides the imbalance-aware objectives, [`trainer`] the
//!    exact gradients and the optimizer loop, and [`evaluation`] the metrics
//!    and warm/cold-start protocols.
//!
//! All numerics are dense `f64` ([`Mat`]) and deterministic for a given seed.

pub mod adgl;
pub mod affinity;
pub mod dataio;
pub mod edgl;
pub mod error;
pub mod evaluation;
pub mod graphs;
pub mod head;
pub mod linalg;
pub mod losses;
pub mod synthetic;
pub mod trainer;

pub use adgl::{adgl_forward, gcn_layer, Activation, GcnParams};
pub use affinity::{run_multiview, AdmmConfig, AdmmState, AffinityMatrix, MultiviewOutcome};
pub use dataio::{
    parse_feature_view, parse_interactions, plan_splits, sample_negatives, EntityKind,
    EntitySet, FeatureView, InteractionSet, Pair, SplitMode, SplitPlan, Split,
};
pub use edgl::{even_filter, mlp2, odd_filter, self_attention, AttentionParams, EdglParams, FilterConfig, Parity};
pub use error::{Error, Result};
pub use evaluation::{
    aupr, auroc, run_protocol, thresholded_metrics, EvalReport, FoldResult, MetricRecord,
};
pub use graphs::{assemble_global, binarize_affinity, build_propagation, sym_normalize, GlobalGraph};
pub use head::{decode, fuse, HeadParams};
pub use linalg::Mat;
pub use losses::{compute_loss, LossConfig, LossKind};
pub use trainer::{
    fit, forward, gradients, init_params, ModelDims, ModelParams, TrainConfig, TrainLog, Variant,
};
