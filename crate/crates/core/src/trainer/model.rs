//! Forward composition with cached intermediates and the matching reverse
//! pass. Every backward step is the transpose of its forward step.

use super::{ModelParams, Variant};
use crate::dataio::Pair;
use crate::edgl::{even_filter, odd_filter, softmax_rows, FilterConfig, Parity};
use crate::graphs::GlobalGraph;
use crate::head::sigmoid;
use crate::linalg::{add_row_broadcast, column_sums, ensure_finite, Mat};
use crate::losses::{compute_loss, loss_gradient, LossConfig};
use crate::{Error, Result};

/// Graph-dependent operators reused across epochs.
pub struct Compiled<'g> {
    pub graph: &'g GlobalGraph,
    /// Dense filter `F` with `H'' = F X_hat`. Built by running the filter on
    /// the identity, so it is the same polynomial the iterative filter applies.
    pub filter: Option<Mat>,
    pub variant: Variant,
}

impl<'g> Compiled<'g> {
    pub fn new(graph: &'g GlobalGraph, variant: Variant, filter: &FilterConfig) -> Result<Self> {
        let filter = match variant.filter_parity() {
            Some(parity) => {
                let cfg = FilterConfig { parity, ..*filter };
                let eye = Mat::identity(graph.n_nodes(), graph.n_nodes());
                Some(match parity {
                    Parity::Even => even_filter(&eye, &graph.p, &cfg)?,
                    Parity::Odd => odd_filter(&eye, &graph.p, &cfg)?,
                })
            }
            None => None,
        };
        Ok(Self {
            graph,
            filter,
            variant,
        })
    }
}

struct GcnCache {
    /// `G_norm H^(l)` per layer.
    aggregated: Vec<Mat>,
    /// Pre-activations per layer.
    pre: Vec<Mat>,
}

struct MlpCache {
    x0: Mat,
    u0: Mat,
    x1: Mat,
    u1: Mat,
}

struct AttentionCache {
    q: Mat,
    k: Mat,
    v: Mat,
    weights: Mat,
}

pub struct ForwardCache {
    gcn: GcnCache,
    mlp: Option<MlpCache>,
    attention: Option<AttentionCache>,
    h_prime: Mat,
    h_hat: Mat,
    pub h_star: Mat,
}

fn check_layout(params: &ModelParams, variant: Variant, graph: &GlobalGraph) -> Result<()> {
    let ok = variant.uses_gcn() == (params.gcn.layers() > 0)
        && variant.uses_edgl() == params.edgl.is_some()
        && (variant == Variant::Attention) == params.attention.is_some();
    if !ok {
        return Err(Error::Shape(format!(
            "parameters do not match variant {variant}"
        )));
    }
    if let Some(w) = params.gcn.weights.first() {
        if w.nrows() != graph.n_nodes() {
            return Err(Error::Shape(format!(
                "first gcn layer expects {} inputs, graph has {} nodes",
                w.nrows(),
                graph.n_nodes()
            )));
        }
    }
    if let Some(e) = &params.edgl {
        e.validate()?;
    }
    Ok(())
}

pub fn forward_cached(compiled: &Compiled<'_>, params: &ModelParams) -> Result<ForwardCache> {
    let graph = compiled.graph;
    let variant = compiled.variant;
    check_layout(params, variant, graph)?;

    let mut aggregated = Vec::with_capacity(params.gcn.layers());
    let mut pre = Vec::with_capacity(params.gcn.layers());
    let mut h = graph.h.clone();
    for (w, &act) in params.gcn.weights.iter().zip(&params.gcn.activations) {
        if h.ncols() != w.nrows() {
            return Err(Error::Shape("gcn layer widths do not chain".to_string()));
        }
        let agg = &graph.g_norm * &h;
        let z = &agg * w;
        h = act.map(&z);
        aggregated.push(agg);
        pre.push(z);
    }
    let h_prime = h;
    ensure_finite(&h_prime, "gcn output")?;

    let mut mlp = None;
    let mut attention = None;
    let h_dprime = if let Some(e) = &params.edgl {
        if h_prime.ncols() != e.w0.nrows() {
            return Err(Error::Shape("edgl input width mismatch".to_string()));
        }
        let x0 = h_prime.clone();
        let mut u0 = &x0 * &e.w0;
        add_row_broadcast(&mut u0, &e.b0);
        let x1 = e.activation.map(&u0);
        let mut u1 = &x1 * &e.w1;
        add_row_broadcast(&mut u1, &e.b1);
        let x_hat = e.activation.map(&u1);
        let filter = compiled
            .filter
            .as_ref()
            .ok_or_else(|| Error::Shape("variant needs a compiled filter".to_string()))?;
        let y = filter * &x_hat;
        mlp = Some(MlpCache { x0, u0, x1, u1 });
        Some(y)
    } else if let Some(a) = &params.attention {
        let q = &h_prime * &a.wq;
        let k = &h_prime * &a.wk;
        let v = &h_prime * &a.wv;
        let scale = 1.0 / (a.wq.ncols() as f64).sqrt();
        let weights = softmax_rows(&(&q * k.transpose() * scale));
        let y = &weights * &v;
        attention = Some(AttentionCache { q, k, v, weights });
        Some(y)
    } else {
        None
    };

    let omega = variant.effective_omega(params.head.omega);
    let h_hat = match &h_dprime {
        // edgl-only feeds raw H into the filter branch, so H' and H'' differ in width
        Some(y) if omega == 0.0 => y.clone(),
        Some(y) => crate::head::fuse(&h_prime, y, omega)?,
        None => h_prime.clone(),
    };
    if h_hat.ncols() != params.head.wl.nrows() {
        return Err(Error::Shape("decoder width mismatch".to_string()));
    }

    let (n_d, n_t) = (graph.n_d, graph.n_t);
    let h_d = h_hat.rows(0, n_d);
    let h_t = h_hat.rows(n_d, n_t);
    let logits = h_d * &params.head.wl * h_t.transpose();
    ensure_finite(&logits, "decoder logits")?;
    let h_star = logits.map(sigmoid);

    Ok(ForwardCache {
        gcn: GcnCache { aggregated, pre },
        mlp,
        attention,
        h_prime,
        h_hat,
        h_star,
    })
}

/// Reverse pass from `d loss / d H*`.
pub fn backward(
    compiled: &Compiled<'_>,
    params: &ModelParams,
    cache: &ForwardCache,
    d_h_star: &Mat,
) -> Result<ModelParams> {
    let graph = compiled.graph;
    let variant = compiled.variant;
    let (n_d, n_t) = (graph.n_d, graph.n_t);
    let mut grads = params.zeros_like();

    // decoder
    let d_logits = d_h_star.zip_map(&cache.h_star, |g, h| g * h * (1.0 - h));
    let h_d = cache.h_hat.rows(0, n_d);
    let h_t = cache.h_hat.rows(n_d, n_t);
    let wl = &params.head.wl;
    grads.head.wl = h_d.transpose() * &d_logits * h_t;
    let mut d_h_hat = Mat::zeros(cache.h_hat.nrows(), cache.h_hat.ncols());
    d_h_hat
        .rows_mut(0, n_d)
        .copy_from(&(&d_logits * h_t * wl.transpose()));
    d_h_hat
        .rows_mut(n_d, n_t)
        .copy_from(&(d_logits.transpose() * h_d * wl));

    // fusion
    let omega = variant.effective_omega(params.head.omega);
    let has_second = params.edgl.is_some() || params.attention.is_some();
    let mut d_h_prime = if has_second {
        &d_h_hat * omega
    } else {
        d_h_hat.clone()
    };
    let d_h_dprime = has_second.then(|| &d_h_hat * (1.0 - omega));

    if let (Some(e), Some(mc), Some(d_y)) = (&params.edgl, &cache.mlp, &d_h_dprime) {
        let filter = compiled.filter.as_ref().expect("filter compiled with edgl");
        let d_x_hat = filter.transpose() * d_y;
        let act = e.activation;
        let d_u1 = d_x_hat.zip_map(&mc.u1, |g, u| g * act.derivative(u));
        let g_e = grads.edgl.as_mut().expect("edgl grads");
        g_e.w1 = mc.x1.transpose() * &d_u1;
        g_e.b1 = column_sums(&d_u1);
        let d_x1 = &d_u1 * e.w1.transpose();
        let d_u0 = d_x1.zip_map(&mc.u0, |g, u| g * act.derivative(u));
        g_e.w0 = mc.x0.transpose() * &d_u0;
        g_e.b0 = column_sums(&d_u0);
        if variant.uses_gcn() {
            d_h_prime += &d_u0 * e.w0.transpose();
        }
    }

    if let (Some(a), Some(ac), Some(d_y)) = (&params.attention, &cache.attention, &d_h_dprime) {
        let scale = 1.0 / (a.wq.ncols() as f64).sqrt();
        let d_weights = d_y * ac.v.transpose();
        let d_v = ac.weights.transpose() * d_y;
        // softmax rows: dS = A .* (dA - rowsum(dA .* A))
        let mut d_scores = Mat::zeros(ac.weights.nrows(), ac.weights.ncols());
        for r in 0..ac.weights.nrows() {
            let row_dot: f64 = ac
                .weights
                .row(r)
                .iter()
                .zip(d_weights.row(r).iter())
                .map(|(w, g)| w * g)
                .sum();
            for c in 0..ac.weights.ncols() {
                d_scores[(r, c)] = ac.weights[(r, c)] * (d_weights[(r, c)] - row_dot);
            }
        }
        d_scores *= scale;
        let d_q = &d_scores * &ac.k;
        let d_k = d_scores.transpose() * &ac.q;
        let g_a = grads.attention.as_mut().expect("attention grads");
        g_a.wq = cache.h_prime.transpose() * &d_q;
        g_a.wk = cache.h_prime.transpose() * &d_k;
        g_a.wv = cache.h_prime.transpose() * &d_v;
        d_h_prime += d_q * a.wq.transpose() + d_k * a.wk.transpose() + d_v * a.wv.transpose();
    }

    // gcn, last layer first
    let mut d_h = d_h_prime;
    for l in (0..params.gcn.layers()).rev() {
        let act = params.gcn.activations[l];
        let d_z = d_h.zip_map(&cache.gcn.pre[l], |g, z| g * act.derivative(z));
        grads.gcn.weights[l] = cache.gcn.aggregated[l].transpose() * &d_z;
        if l > 0 {
            d_h = graph.g_norm.transpose() * (d_z * params.gcn.weights[l].transpose());
        }
    }

    if !grads.is_finite() {
        return Err(Error::Divergence("non-finite gradient".to_string()));
    }
    Ok(grads)
}

/// Loss and gradients for one labeled batch.
pub fn loss_and_gradients(
    compiled: &Compiled<'_>,
    params: &ModelParams,
    positives: &[Pair],
    negatives: &[Pair],
    loss: &LossConfig,
) -> Result<(f64, ModelParams)> {
    let cache = forward_cached(compiled, params)?;
    let value = compute_loss(&cache.h_star, positives, negatives, loss)?;
    if !value.is_finite() {
        return Err(Error::Divergence("non-finite loss".to_string()));
    }
    let d_h_star = loss_gradient(&cache.h_star, positives, negatives, loss)?;
    let grads = backward(compiled, params, &cache, &d_h_star)?;
    Ok((value, grads))
}
