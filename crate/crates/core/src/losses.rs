//! Imbalance-aware binary cross-entropy variants over labeled pairs.
//!
//! With `r = |y-| / |y+|` and `N = n_d n_t`:
//!
//! - `Slf`: `-(1/N) [sum_+ log h + sum_- log(1-h)]`
//! - `Wlf`: positive sum weighted by `r`
//! - `Rlf`: positive sum weighted by `varpi r`
//! - `Flf`: `-(1/N) [r sum_+ (1-h)^g log h + sum_- h^g log(1-h)]`
//!
//! Probabilities are clamped to `[eps, 1-eps]` before the logs.

use serde::{Deserialize, Serialize};

use crate::dataio::Pair;
use crate::linalg::Mat;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Slf,
    Flf,
    Wlf,
    Rlf,
}

impl LossKind {
    pub const ALL: [LossKind; 4] = [LossKind::Slf, LossKind::Flf, LossKind::Wlf, LossKind::Rlf];

    pub fn name(self) -> &'static str {
        match self {
            LossKind::Slf => "slf",
            LossKind::Flf => "flf",
            LossKind::Wlf => "wlf",
            LossKind::Rlf => "rlf",
        }
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "slf" => Ok(LossKind::Slf),
            "flf" => Ok(LossKind::Flf),
            "wlf" => Ok(LossKind::Wlf),
            "rlf" => Ok(LossKind::Rlf),
            other => Err(Error::InvalidParameter(format!("unknown loss kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossConfig {
    pub kind: LossKind,
    pub varpi: f64,
    pub gamma: f64,
    pub clamp_eps: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            kind: LossKind::Rlf,
            varpi: 0.2,
            gamma: 2.0,
            clamp_eps: 1e-7,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.varpi > 0.0 && self.varpi.is_finite()) {
            return Err(Error::InvalidParameter(format!("loss.varpi must be positive, got {}", self.varpi)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("loss.gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.clamp_eps > 0.0 && self.clamp_eps < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "loss.clamp_eps must lie in (0, 0.5), got {}",
                self.clamp_eps
            )));
        }
        Ok(())
    }
}

/// Per-sample weights and the shared normalization for one batch.
struct Weights {
    positive: f64,
    norm: f64,
}

fn weights(
    h_star: &Mat,
    positives: &[Pair],
    negatives: &[Pair],
    config: &LossConfig,
) -> Result<Weights> {
    config.validate()?;
    let (n_d, n_t) = h_star.shape();
    for &(d, t) in positives.iter().chain(negatives) {
        if d >= n_d || t >= n_t {
            return Err(Error::InvalidParameter(format!(
                "pair ({d}, {t}) outside {n_d}x{n_t} prediction"
            )));
        }
    }
    if h_star.iter().any(|x| !x.is_finite()) {
        return Err(Error::Divergence("non-finite predictions".to_string()));
    }
    let ratio = || {
        if positives.is_empty() {
            Err(Error::InvalidParameter(format!(
                "{} needs at least one positive pair",
                config.kind.name()
            )))
        } else {
            Ok(negatives.len() as f64 / positives.len() as f64)
        }
    };
    let positive = match config.kind {
        LossKind::Slf => 1.0,
        LossKind::Wlf | LossKind::Flf => ratio()?,
        LossKind::Rlf => config.varpi * ratio()?,
    };
    Ok(Weights {
        positive,
        norm: 1.0 / (n_d * n_t) as f64,
    })
}

fn focusing(config: &LossConfig) -> f64 {
    match config.kind {
        LossKind::Flf => config.gamma,
        _ => 0.0,
    }
}

/// Loss value over the labeled pairs only.
pub fn compute_loss(
    h_star: &Mat,
    positives: &[Pair],
    negatives: &[Pair],
    config: &LossConfig,
) -> Result<f64> {
    let w = weights(h_star, positives, negatives, config)?;
    let gamma = focusing(config);
    let clamp = |h: f64| h.clamp(config.clamp_eps, 1.0 - config.clamp_eps);
    let pos: f64 = positives
        .iter()
        .map(|&p| {
            let h = clamp(h_star[p]);
            (1.0 - h).powf(gamma) * h.ln()
        })
        .sum();
    let neg: f64 = negatives
        .iter()
        .map(|&p| {
            let h = clamp(h_star[p]);
            h.powf(gamma) * (1.0 - h).ln()
        })
        .sum();
    Ok(-w.norm * (w.positive * pos + neg))
}

/// `d loss / d h*` as a dense `n_d x n_t` matrix (zero off the labeled
/// pairs and wherever the clamp is active).
pub fn loss_gradient(
    h_star: &Mat,
    positives: &[Pair],
    negatives: &[Pair],
    config: &LossConfig,
) -> Result<Mat> {
    let w = weights(h_star, positives, negatives, config)?;
    let gamma = focusing(config);
    let (lo, hi) = (config.clamp_eps, 1.0 - config.clamp_eps);
    let mut grad = Mat::zeros(h_star.nrows(), h_star.ncols());
    for &p in positives {
        let h = h_star[p];
        if h < lo || h > hi {
            continue;
        }
        // d/dh (1-h)^g ln h = -g (1-h)^(g-1) ln h + (1-h)^g / h
        let mut d = (1.0 - h).powf(gamma) / h;
        if gamma != 0.0 {
            d -= gamma * (1.0 - h).powf(gamma - 1.0) * h.ln();
        }
        grad[p] += -w.norm * w.positive * d;
    }
    for &p in negatives {
        let h = h_star[p];
        if h < lo || h > hi {
            continue;
        }
        // d/dh h^g ln(1-h) = g h^(g-1) ln(1-h) - h^g / (1-h)
        let mut d = -h.powf(gamma) / (1.0 - h);
        if gamma != 0.0 {
            d += gamma * h.powf(gamma - 1.0) * (1.0 - h).ln();
        }
        grad[p] += -w.norm * d;
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: LossKind) -> LossConfig {
        LossConfig { kind, ..LossConfig::default() }
    }

    #[test]
    fn slf_single_pair() {
        let h = Mat::from_element(1, 1, 0.5);
        let l = compute_loss(&h, &[(0, 0)], &[], &cfg(LossKind::Slf)).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn empty_positives_rejected_for_ratio_losses() {
        let h = Mat::from_element(1, 2, 0.3);
        for kind in [LossKind::Wlf, LossKind::Rlf, LossKind::Flf] {
            assert!(compute_loss(&h, &[], &[(0, 1)], &cfg(kind)).is_err());
        }
        assert!(compute_loss(&h, &[], &[(0, 1)], &cfg(LossKind::Slf)).is_ok());
    }

    #[test]
    fn non_finite_predictions() {
        let h = Mat::from_element(1, 1, f64::NAN);
        assert!(matches!(
            compute_loss(&h, &[(0, 0)], &[], &cfg(LossKind::Slf)),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn clamped_pairs_have_zero_gradient() {
        let h = Mat::from_row_slice(1, 2, &[1.0, 0.0]);
        let g = loss_gradient(&h, &[(0, 0)], &[(0, 1)], &cfg(LossKind::Rlf)).unwrap();
        assert_eq!(g, Mat::zeros(1, 2));
        let l = compute_loss(&h, &[(0, 0)], &[(0, 1)], &cfg(LossKind::Rlf)).unwrap();
        assert!(l > 0.0 && l < 1e-6);
    }

    #[test]
    fn config_validation() {
        let h = Mat::from_element(1, 1, 0.5);
        let bad = LossConfig { varpi: 0.0, ..LossConfig::default() };
        assert!(compute_loss(&h, &[(0, 0)], &[], &bad).is_err());
        let bad = LossConfig { clamp_eps: 0.5, ..LossConfig::default() };
        assert!(compute_loss(&h, &[(0, 0)], &[], &bad).is_err());
    }
}
