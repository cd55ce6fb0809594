//! Central finite differences against the analytic reverse pass.
#![allow(dead_code, clippy::needless_range_loop)]

use dtigraph::dataio::{EntityKind, LabeledPair};
use dtigraph::trainer::masked_graph;
use dtigraph::{
    compute_loss, forward, gradients, init_params, AffinityMatrix, FilterConfig, GlobalGraph,
    LossKind, Mat, ModelParams, TrainConfig, Variant,
};

pub const STEP: f64 = 1e-5;
/// Denominator floor: below this magnitude the central difference is
/// dominated by rounding in the loss (about 1e-16 / STEP).
pub const FLOOR: f64 = 1e-6;

fn affinity(kind: EntityKind, n: usize, seed: u64) -> AffinityMatrix {
    let mut s = super::oracle::Stream::new(seed);
    let mut v = Mat::identity(n, n);
    for i in 0..n {
        for j in 0..i {
            let x = 0.5 + 0.5 * s.unit();
            v[(i, j)] = x;
            v[(j, i)] = x;
        }
    }
    AffinityMatrix::new(kind, v).unwrap()
}

pub struct Problem {
    pub graph: GlobalGraph,
    pub batch: Vec<LabeledPair>,
}

/// `n_d = 4`, `n_t = 3` with a mix of positive and negative training pairs.
pub fn small_problem(seed: u64) -> Problem {
    let lp = LabeledPair::new;
    let batch = vec![
        lp((0, 0), true),
        lp((1, 2), true),
        lp((3, 1), true),
        lp((0, 1), false),
        lp((2, 0), false),
        lp((2, 2), false),
        lp((3, 2), false),
    ];
    let graph = masked_graph(
        &affinity(EntityKind::Drug, 4, seed),
        &affinity(EntityKind::Target, 3, seed + 1),
        &batch,
        0.8,
    )
    .unwrap();
    Problem { graph, batch }
}

pub fn config(variant: Variant, loss: LossKind) -> TrainConfig {
    let mut cfg = TrainConfig {
        gcn_hidden: 6,
        embed_dim: 5,
        edgl_hidden: 4,
        variant,
        filter: FilterConfig::default(),
        ..TrainConfig::default()
    };
    cfg.loss.kind = loss;
    cfg
}

/// Xavier weights with small random biases so every coordinate is generic.
pub fn generic_params(problem: &Problem, cfg: &TrainConfig, seed: u64) -> ModelParams {
    let mut p = init_params(&cfg.dims(problem.graph.n_nodes()), seed).unwrap();
    let mut s = super::oracle::Stream::new(seed + 100);
    if let Some(e) = &mut p.edgl {
        for b in [&mut e.b0, &mut e.b1] {
            b.iter_mut().for_each(|x| *x = 0.1 * s.signed());
        }
    }
    p
}

fn loss_at(problem: &Problem, params: &ModelParams, cfg: &TrainConfig) -> f64 {
    let h = forward(&problem.graph, params, cfg).unwrap();
    let pos: Vec<_> = problem.batch.iter().filter(|p| p.positive).map(|p| p.pair).collect();
    let neg: Vec<_> = problem.batch.iter().filter(|p| !p.positive).map(|p| p.pair).collect();
    compute_loss(&h, &pos, &neg, &cfg.loss).unwrap()
}

pub struct Check {
    pub coordinates: usize,
    pub worst_relative: f64,
    pub worst_at: String,
}

pub fn check(problem: &Problem, params: &ModelParams, cfg: &TrainConfig) -> Check {
    let (_, analytic) = gradients(&problem.graph, params, &problem.batch, cfg).unwrap();
    let names: Vec<String> = params.named_tensors().into_iter().map(|(n, _)| n).collect();
    let analytic: Vec<Mat> = analytic.tensors().into_iter().cloned().collect();
    let mut out = Check {
        coordinates: 0,
        worst_relative: 0.0,
        worst_at: String::new(),
    };
    for (t, name) in names.iter().enumerate() {
        for idx in 0..analytic[t].len() {
            let mut plus = params.clone();
            plus.tensors_mut()[t][idx] += STEP;
            let mut minus = params.clone();
            minus.tensors_mut()[t][idx] -= STEP;
            let fd = (loss_at(problem, &plus, cfg) - loss_at(problem, &minus, cfg)) / (2.0 * STEP);
            let a = analytic[t][idx];
            let rel = (fd - a).abs() / fd.abs().max(a.abs()).max(FLOOR);
            out.coordinates += 1;
            if rel > out.worst_relative {
                out.worst_relative = rel;
                out.worst_at = format!("{name}[{idx}] analytic {a:.6e} fd {fd:.6e}");
            }
        }
    }
    out
}
