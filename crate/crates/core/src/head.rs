//! Residual fusion and the tri-factorization decoder.

use crate::linalg::{ensure_finite, Mat};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HeadParams {
    /// Fusion weight on the graph-convolution embedding, in `[0, 1]`.
    pub omega: f64,
    /// Decoder weight `W^L`, `m x m`.
    pub wl: Mat,
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `omega H' + (1 - omega) H''`.
pub fn fuse(h_prime: &Mat, h_dprime: &Mat, omega: f64) -> Result<Mat> {
    if !(0.0..=1.0).contains(&omega) {
        return Err(Error::InvalidParameter(format!(
            "fusion weight must lie in [0, 1], got {omega}"
        )));
    }
    if h_prime.shape() != h_dprime.shape() {
        return Err(Error::Shape(format!(
            "fusion inputs {:?} vs {:?}",
            h_prime.shape(),
            h_dprime.shape()
        )));
    }
    // exact endpoints
    if omega == 1.0 {
        return Ok(h_prime.clone());
    }
    if omega == 0.0 {
        return Ok(h_dprime.clone());
    }
    Ok(h_prime * omega + h_dprime * (1.0 - omega))
}

/// Bilinear logits `H_D W^L H_T^T`.
pub fn decode_logits(h_d: &Mat, h_t: &Mat, wl: &Mat) -> Result<Mat> {
    let m = h_d.ncols();
    if h_t.ncols() != m || wl.nrows() != m || wl.ncols() != m {
        return Err(Error::Shape(format!(
            "decoder: H_D {:?}, H_T {:?}, W^L {:?}",
            h_d.shape(),
            h_t.shape(),
            wl.shape()
        )));
    }
    let logits = h_d * wl * h_t.transpose();
    ensure_finite(&logits, "decoder logits")?;
    Ok(logits)
}

/// `sigmoid(H_D W^L H_T^T)`, `n_d x n_t`.
pub fn decode(h_hat_d: &Mat, h_hat_t: &Mat, wl: &Mat) -> Result<Mat> {
    Ok(decode_logits(h_hat_d, h_hat_t, wl)?.map(sigmoid))
}
