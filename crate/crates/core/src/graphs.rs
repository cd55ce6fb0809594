//! Global drug-target network assembly and the bipartite propagation matrix.

use crate::affinity::AffinityMatrix;
use crate::linalg::{ensure_shape, Mat};
use crate::{Error, Result};

/// Matrices shared by both encoders. Node order: drugs `0..n_d`, then
/// targets `n_d..n_d+n_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalGraph {
    pub n_d: usize,
    pub n_t: usize,
    /// Raw affinities on the diagonal blocks, interactions off-diagonal.
    pub h: Mat,
    /// Binarized affinities on the diagonal blocks, interactions off-diagonal.
    pub g: Mat,
    /// `D^-1/2 G D^-1/2`.
    pub g_norm: Mat,
    /// Even-walk propagation matrix with zero diagonal blocks.
    pub p: Mat,
}

impl GlobalGraph {
    pub fn n_nodes(&self) -> usize {
        self.n_d + self.n_t
    }

    /// Normalized Laplacian of the bipartite part, `I - P`.
    pub fn laplacian(&self) -> Mat {
        Mat::identity(self.n_nodes(), self.n_nodes()) - &self.p
    }
}

/// 1 where `a >= threshold`, else 0.
pub fn binarize_affinity(a: &AffinityMatrix, threshold: f64) -> Mat {
    a.values().map(|x| if x >= threshold { 1.0 } else { 0.0 })
}

pub fn assemble_global(
    a_dd: &AffinityMatrix,
    a_tt: &AffinityMatrix,
    a_dt: &Mat,
    threshold: f64,
) -> Result<GlobalGraph> {
    let (n_d, n_t) = (a_dd.n(), a_tt.n());
    ensure_shape(a_dt, n_d, n_t, "drug-target matrix")?;
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidParameter(format!(
            "binarization threshold must lie in [0, 1], got {threshold}"
        )));
    }
    let h = block(a_dd.values(), a_dt, a_tt.values());
    let g = block(
        &binarize_affinity(a_dd, threshold),
        a_dt,
        &binarize_affinity(a_tt, threshold),
    );
    let g_norm = sym_normalize(&g)?;
    let p = build_propagation(&g_norm, n_d, n_t)?;
    Ok(GlobalGraph {
        n_d,
        n_t,
        h,
        g,
        g_norm,
        p,
    })
}

fn block(dd: &Mat, dt: &Mat, tt: &Mat) -> Mat {
    let (n_d, n_t) = (dd.nrows(), tt.nrows());
    let mut out = Mat::zeros(n_d + n_t, n_d + n_t);
    out.view_mut((0, 0), (n_d, n_d)).copy_from(dd);
    out.view_mut((0, n_d), (n_d, n_t)).copy_from(dt);
    out.view_mut((n_d, 0), (n_t, n_d)).copy_from(&dt.transpose());
    out.view_mut((n_d, n_d), (n_t, n_t)).copy_from(tt);
    out
}

/// `D^-1/2 M D^-1/2` with `D` the row-sum degrees. Zero-degree nodes get a
/// zero scale, leaving their row and column zero.
pub fn sym_normalize(m: &Mat) -> Result<Mat> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "normalization needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidParameter(
            "normalization needs nonnegative finite entries".to_string(),
        ));
    }
    let scale: Vec<f64> = m
        .row_iter()
        .map(|row| {
            let d = row.sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    Ok(Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        scale[i] * m[(i, j)] * scale[j]
    }))
}

/// Zeroes both diagonal blocks of `g_prime` and renormalizes by the degrees
/// of what remains.
pub fn build_propagation(g_prime: &Mat, n_d: usize, n_t: usize) -> Result<Mat> {
    let n = n_d + n_t;
    ensure_shape(g_prime, n, n, "propagation source")?;
    let mut bipartite = g_prime.clone();
    bipartite.view_mut((0, 0), (n_d, n_d)).fill(0.0);
    bipartite.view_mut((n_d, n_d), (n_t, n_t)).fill(0.0);
    sym_normalize(&bipartite)
}
