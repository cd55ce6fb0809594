//! Two affine layers followed by a parity-restricted polynomial filter in the
//! propagation matrix `P`, plus the self-attention alternative.
//!
//! With `alpha_k = alpha (1 - alpha)^k` the even filter is
//! `sum_{k=0}^{floor(K/2)} alpha_k P^{2k} X` and the odd filter
//! `sum_{k=0}^{floor(K/2)-1} alpha_k P^{2k+1} X`. Both are accumulated with
//! repeated products against `P`; powers of `P` are never formed.

use serde::{Deserialize, Serialize};

use crate::adgl::Activation;
use crate::linalg::{add_row_broadcast, ensure_finite, Mat};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EdglParams {
    pub w0: Mat,
    /// `1 x h`
    pub b0: Mat,
    pub w1: Mat,
    /// `1 x m`
    pub b1: Mat,
    pub activation: Activation,
}

impl EdglParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.b0.nrows() == 1
            && self.b0.ncols() == self.w0.ncols()
            && self.w1.nrows() == self.w0.ncols()
            && self.b1.nrows() == 1
            && self.b1.ncols() == self.w1.ncols();
        if ok {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "edgl chain W0 {}x{}, b0 {}x{}, W1 {}x{}, b1 {}x{}",
                self.w0.nrows(),
                self.w0.ncols(),
                self.b0.nrows(),
                self.b0.ncols(),
                self.w1.nrows(),
                self.w1.ncols(),
                self.b1.nrows(),
                self.b1.ncols()
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub k: usize,
    pub alpha: f64,
    pub parity: Parity,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            k: 200,
            alpha: 0.2,
            parity: Parity::Even,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "filter.alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.k < 2 {
            return Err(Error::InvalidParameter(format!(
                "filter.k must be >= 2, got {}",
                self.k
            )));
        }
        Ok(())
    }

    /// `alpha (1 - alpha)^k` for the terms the filter keeps.
    pub fn coefficients(&self) -> Vec<f64> {
        let terms = match self.parity {
            Parity::Even => self.k / 2 + 1,
            Parity::Odd => self.k / 2,
        };
        let mut c = self.alpha;
        (0..terms)
            .map(|_| {
                let out = c;
                c *= 1.0 - self.alpha;
                out
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttentionParams {
    pub wq: Mat,
    pub wk: Mat,
    pub wv: Mat,
}

/// `sigma(sigma(X W0 + b0) W1 + b1)`.
pub fn mlp2(x0: &Mat, params: &EdglParams) -> Result<Mat> {
    params.validate()?;
    if x0.ncols() != params.w0.nrows() {
        return Err(Error::Shape(format!(
            "edgl input width {} != W0 rows {}",
            x0.ncols(),
            params.w0.nrows()
        )));
    }
    let act = params.activation;
    let mut u0 = x0 * &params.w0;
    add_row_broadcast(&mut u0, &params.b0);
    let mut u1 = act.map(&u0) * &params.w1;
    add_row_broadcast(&mut u1, &params.b1);
    Ok(act.map(&u1))
}

fn check_filter_inputs(x_hat: &Mat, p: &Mat, config: &FilterConfig) -> Result<()> {
    config.validate()?;
    if !p.is_square() || p.ncols() != x_hat.nrows() {
        return Err(Error::Shape(format!(
            "filter: P {}x{}, X {}x{}",
            p.nrows(),
            p.ncols(),
            x_hat.nrows(),
            x_hat.ncols()
        )));
    }
    Ok(())
}

fn accumulate(start: Mat, p: &Mat, coefficients: &[f64]) -> Result<Mat> {
    let mut out = Mat::zeros(start.nrows(), start.ncols());
    let mut z = start;
    for (k, &c) in coefficients.iter().enumerate() {
        out += &z * c;
        if k + 1 < coefficients.len() {
            z = p * (p * &z);
        }
    }
    ensure_finite(&out, "filter accumulation")?;
    Ok(out)
}

/// `sum_{k=0}^{floor(K/2)} alpha_k P^{2k} X`.
pub fn even_filter(x_hat: &Mat, p: &Mat, config: &FilterConfig) -> Result<Mat> {
    check_filter_inputs(x_hat, p, config)?;
    let config = FilterConfig {
        parity: Parity::Even,
        ..*config
    };
    accumulate(x_hat.clone(), p, &config.coefficients())
}

/// `sum_{k=0}^{floor(K/2)-1} alpha_k P^{2k+1} X`.
pub fn odd_filter(x_hat: &Mat, p: &Mat, config: &FilterConfig) -> Result<Mat> {
    check_filter_inputs(x_hat, p, config)?;
    let config = FilterConfig {
        parity: Parity::Odd,
        ..*config
    };
    accumulate(p * x_hat, p, &config.coefficients())
}

/// Dispatches on `config.parity`.
pub fn polynomial_filter(x_hat: &Mat, p: &Mat, config: &FilterConfig) -> Result<Mat> {
    match config.parity {
        Parity::Even => even_filter(x_hat, p, config),
        Parity::Odd => odd_filter(x_hat, p, config),
    }
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(s: &Mat) -> Mat {
    let mut out = s.clone();
    for mut row in out.row_iter_mut() {
        let max = row.max();
        row.apply(|x| *x = (*x - max).exp());
        let total = row.sum();
        row.apply(|x| *x /= total);
    }
    out
}

/// `softmax(Q K^T / sqrt(m)) V` with `Q, K, V = H' W^{Q,K,V}` and `m` the
/// projection width.
pub fn self_attention(h_prime: &Mat, params: &AttentionParams) -> Result<Mat> {
    let d = h_prime.ncols();
    let dk = params.wq.ncols();
    let ok = [&params.wq, &params.wk, &params.wv]
        .iter()
        .all(|w| w.nrows() == d && w.ncols() == dk);
    if !ok {
        return Err(Error::Shape(format!(
            "attention projections must all be {d}x{dk}"
        )));
    }
    let q = h_prime * &params.wq;
    let k = h_prime * &params.wk;
    let v = h_prime * &params.wv;
    let weights = softmax_rows(&((q * k.transpose()) / (dk as f64).sqrt()));
    let out = weights * v;
    ensure_finite(&out, "attention output")?;
    Ok(out)
}
