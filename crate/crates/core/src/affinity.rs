//! Pairwise multi-view affinity learning.
//!
//! Every view `Y_i` (`v_i x n`) gets a self-expression matrix `A_i` split
//! across three auxiliary copies: `C1_i` (low rank, via singular value
//! thresholding), `C2_i` (sparse, via soft thresholding) and `C3_i`
//! (consensus with the other views' `C2`). An inexact augmented Lagrangian
//! scheme with a geometrically growing penalty `mu` ties them together. The
//! final affinity is the min-max normalized `|C_avg| + |C_avg^T|` where
//! `C_avg` is the mean `C2` over views.

use nalgebra::{Cholesky, Dyn, SVD};
use serde::{Deserialize, Serialize};

use crate::dataio::{EntityKind, FeatureView};
use crate::linalg::{all_finite, max_abs_diff, Mat};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdmmConfig {
    /// Nuclear-norm weight.
    pub beta1: f64,
    /// L1 weight.
    pub beta2: f64,
    /// Cross-view consensus weight.
    pub lambda: f64,
    /// Penalty growth factor, `> 1`.
    pub rho: f64,
    pub mu0: f64,
    pub mu_max: f64,
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            beta1: 0.1,
            beta2: 0.1,
            lambda: 1.0,
            rho: 1.1,
            mu0: 1e-3,
            mu_max: 1e6,
            epsilon: 1e-6,
            max_iter: 100,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("lambda", self.lambda),
            ("mu0", self.mu0),
            ("mu_max", self.mu_max),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("admm.{name} must be positive, got {v}")));
            }
        }
        if !(self.rho > 1.0 && self.rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("admm.rho must exceed 1, got {}", self.rho)));
        }
        if self.mu0 > self.mu_max {
            return Err(Error::InvalidParameter("admm.mu0 exceeds admm.mu_max".to_string()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("admm.max_iter must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Symmetric, min-max normalized entity similarity.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    kind: EntityKind,
    values: Mat,
}

impl AffinityMatrix {
    pub fn new(kind: EntityKind, values: Mat) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::Shape(format!(
                "affinity must be square, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if !all_finite(&values) || values.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidParameter(
                "affinity entries must lie in [0, 1]".to_string(),
            ));
        }
        if max_abs_diff(&values, &values.transpose()) > 1e-12 {
            return Err(Error::InvalidParameter("affinity must be symmetric".to_string()));
        }
        Ok(Self { kind, values })
    }

    pub fn kind(&self) -> EntityKind {
        self.kind
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn into_values(self) -> Mat {
        self.values
    }
}

/// Elementwise shrinkage toward zero by `tau`.
pub fn soft_threshold(m: &Mat, tau: f64) -> Mat {
    m.map(|x| (x - tau).max(0.0) + (x + tau).min(0.0))
}

/// Singular value thresholding: `U max(S - tau, 0) V^T`.
pub fn svt(m: &Mat, tau: f64) -> Result<Mat> {
    if !all_finite(m) {
        return Err(Error::Svd("non-finite input".to_string()));
    }
    let svd = SVD::try_new(m.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Svd("did not converge".to_string()))?;
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Svd("missing singular vectors".to_string())),
    };
    let mut scaled = u;
    for (j, s) in svd.singular_values.iter().enumerate() {
        let shrunk = (s - tau).max(0.0);
        scaled.column_mut(j).scale_mut(shrunk);
    }
    Ok(scaled * v_t)
}

/// A view with its Gram matrix and the factorization of `K + 3I` cached.
pub struct PreparedView {
    y: Mat,
    k_gram: Mat,
    system: Cholesky<f64, Dyn>,
}

impl PreparedView {
    pub fn new(view: &FeatureView) -> Result<Self> {
        let y = view.values.clone();
        let n = y.ncols();
        let k_gram = y.transpose() * &y;
        let shifted = &k_gram + Mat::identity(n, n) * 3.0;
        // K is PSD so K + 3I is SPD
        let system = Cholesky::new(shifted)
            .ok_or_else(|| Error::Divergence("K + 3I not positive definite".to_string()))?;
        Ok(Self { y, k_gram, system })
    }

    pub fn n(&self) -> usize {
        self.y.ncols()
    }
}

pub fn prepare_views(views: &[FeatureView]) -> Result<Vec<PreparedView>> {
    let first = views
        .first()
        .ok_or_else(|| Error::InvalidParameter("at least one view is required".to_string()))?;
    let n = first.n_entities();
    if n == 0 {
        return Err(Error::InvalidParameter("views have no entities".to_string()));
    }
    if let Some(bad) = views.iter().find(|v| v.n_entities() != n) {
        return Err(Error::Shape(format!(
            "views disagree on entity count: {n} vs {}",
            bad.n_entities()
        )));
    }
    views.iter().map(PreparedView::new).collect()
}

/// Per-view primal and dual variables plus the shared penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub a: Vec<Mat>,
    pub c1: Vec<Mat>,
    pub c2: Vec<Mat>,
    pub c3: Vec<Mat>,
    /// Multiplier of the self-expression constraint `Y_i = Y_i A_i`, `v_i x n`.
    pub lam1: Vec<Mat>,
    pub lam2: Vec<Mat>,
    pub lam3: Vec<Mat>,
    pub lam4: Vec<Mat>,
    pub mu: f64,
    pub iter: usize,
}

impl AdmmState {
    /// All auxiliary and multiplier matrices start at zero.
    pub fn zeros(views: &[PreparedView], mu0: f64) -> Self {
        let n = views.first().map_or(0, PreparedView::n);
        let square = || vec![Mat::zeros(n, n); views.len()];
        Self {
            a: square(),
            c1: square(),
            c2: square(),
            c3: square(),
            lam1: views.iter().map(|v| Mat::zeros(v.y.nrows(), n)).collect(),
            lam2: square(),
            lam3: square(),
            lam4: square(),
            mu: mu0,
            iter: 0,
        }
    }

    pub fn n_views(&self) -> usize {
        self.a.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepReport {
    pub converged: bool,
    /// `max|A-C1|, max|A-C2|, max|A-C3|, max|A_prev-A|` over all views.
    pub errors: [f64; 4],
}

/// One full sweep over the views followed by the convergence test and the
/// penalty update.
pub fn admm_iterate(
    state: &mut AdmmState,
    views: &[PreparedView],
    config: &AdmmConfig,
) -> Result<SweepReport> {
    let v = views.len();
    if state.n_views() != v || v == 0 {
        return Err(Error::Shape(format!(
            "state has {} views, got {v}",
            state.n_views()
        )));
    }
    let mu = state.mu;
    let consensus = 2.0 * config.lambda * (v as f64 - 1.0);
    let mut errors = [0.0f64; 4];

    for (i, view) in views.iter().enumerate() {
        let previous_a = state.a[i].clone();

        // (K + 3I) A = K + C1 + C2 + C3 + (Y^T lam1 - lam2 - lam3 - lam4) / mu
        let mut rhs = &view.k_gram + &state.c1[i] + &state.c2[i] + &state.c3[i];
        let duals = view.y.transpose() * &state.lam1[i] - &state.lam2[i] - &state.lam3[i] - &state.lam4[i];
        rhs += duals / mu;
        let a = view.system.solve(&rhs);

        let c1 = svt(&(&a + &state.lam3[i] / mu), config.beta1 / mu)?;
        let c2 = soft_threshold(&(&a + &state.lam2[i] / mu), config.beta2 / mu);
        state.c2[i] = c2;

        let mut c_sum = Mat::zeros(a.nrows(), a.ncols());
        for (j, other) in state.c2.iter().enumerate() {
            if j != i {
                c_sum += other;
            }
        }
        // minimizer of lambda * sum_j |C3 - C2_j|^2 plus the penalty on A - C3
        let c3 = (c_sum * (2.0 * config.lambda) + &a * mu + &state.lam4[i]) / (consensus + mu);

        state.lam1[i] += (&view.y - &view.y * &a) * mu;
        state.lam2[i] += (&a - &state.c2[i]) * mu;
        state.lam3[i] += (&a - &c1) * mu;
        state.lam4[i] += (&a - &c3) * mu;

        errors[0] = errors[0].max(max_abs_diff(&a, &c1));
        errors[1] = errors[1].max(max_abs_diff(&a, &state.c2[i]));
        errors[2] = errors[2].max(max_abs_diff(&a, &c3));
        errors[3] = errors[3].max(max_abs_diff(&previous_a, &a));

        state.a[i] = a;
        state.c1[i] = c1;
        state.c3[i] = c3;
    }

    if errors.iter().any(|e| !e.is_finite())
        || !state.lam1.iter().chain(&state.a).all(all_finite)
    {
        return Err(Error::Divergence(format!(
            "non-finite ADMM state at iteration {}",
            state.iter + 1
        )));
    }
    state.mu = (config.rho * mu).min(config.mu_max);
    state.iter += 1;
    Ok(SweepReport {
        converged: errors.iter().all(|&e| e < config.epsilon),
        errors,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiviewOutcome {
    pub affinity: AffinityMatrix,
    pub iterations: usize,
    pub converged: bool,
    pub errors: [f64; 4],
    /// Set when every entry of `|C_avg| + |C_avg^T|` was equal, in which case
    /// the affinity is all zeros.
    pub degenerate: bool,
}

/// Runs sweeps until convergence or `max_iter`, then finalizes the affinity.
pub fn run_multiview(views: &[FeatureView], config: &AdmmConfig) -> Result<MultiviewOutcome> {
    config.validate()?;
    let kind = views
        .first()
        .map(|v| v.kind)
        .ok_or_else(|| Error::InvalidParameter("at least one view is required".to_string()))?;
    let prepared = prepare_views(views)?;
    let mut state = AdmmState::zeros(&prepared, config.mu0);
    let mut last = SweepReport {
        converged: false,
        errors: [f64::INFINITY; 4],
    };
    while state.iter < config.max_iter {
        last = admm_iterate(&mut state, &prepared, config)?;
        log::debug!("admm iter {} mu={:.3e} errors={:?}", state.iter, state.mu, last.errors);
        if last.converged {
            break;
        }
    }
    let (values, degenerate) = finalize(&state.c2);
    if degenerate {
        log::warn!("{kind} affinity has zero range; returning all zeros");
    }
    Ok(MultiviewOutcome {
        affinity: AffinityMatrix::new(kind, values)?,
        iterations: state.iter,
        converged: last.converged,
        errors: last.errors,
        degenerate,
    })
}

/// Min-max normalized `|C_avg| + |C_avg^T|`.
fn finalize(c2: &[Mat]) -> (Mat, bool) {
    let n = c2[0].nrows();
    let mut avg = Mat::zeros(n, n);
    for c in c2 {
        avg += c;
    }
    avg /= c2.len() as f64;
    let sym = Mat::from_fn(n, n, |i, j| avg[(i, j)].abs() + avg[(j, i)].abs());
    let lo = sym.min();
    let hi = sym.max();
    let range = hi - lo;
    if range == 0.0 {
        return (Mat::zeros(n, n), true);
    }
    (sym.map(|x| ((x - lo) / range).clamp(0.0, 1.0)), false)
}
