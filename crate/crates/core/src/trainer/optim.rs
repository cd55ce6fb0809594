use serde::{Deserialize, Serialize};

use super::ModelParams;
use crate::linalg::Mat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

/// First-order update rule over every tensor of a [`ModelParams`].
pub(crate) enum Optimizer {
    Adam {
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
        step: i32,
        m: Vec<Mat>,
        v: Vec<Mat>,
    },
    Sgd {
        lr: f64,
    },
}

impl Optimizer {
    pub(crate) fn new(kind: OptimizerKind, lr: f64, params: &ModelParams) -> Self {
        match kind {
            OptimizerKind::Adam => {
                let zeros: Vec<Mat> = params
                    .tensors()
                    .iter()
                    .map(|t| Mat::zeros(t.nrows(), t.ncols()))
                    .collect();
                Optimizer::Adam {
                    lr,
                    beta1: 0.9,
                    beta2: 0.999,
                    eps: 1e-8,
                    step: 0,
                    m: zeros.clone(),
                    v: zeros,
                }
            }
            OptimizerKind::Sgd => Optimizer::Sgd { lr },
        }
    }

    pub(crate) fn step(&mut self, params: &mut ModelParams, grads: &ModelParams) {
        let grads = grads.tensors();
        match self {
            Optimizer::Sgd { lr } => {
                for (p, g) in params.tensors_mut().into_iter().zip(grads) {
                    *p -= g * *lr;
                }
            }
            Optimizer::Adam {
                lr,
                beta1,
                beta2,
                eps,
                step,
                m,
                v,
            } => {
                *step += 1;
                let c1 = 1.0 - beta1.powi(*step);
                let c2 = 1.0 - beta2.powi(*step);
                for (((p, g), m), v) in params
                    .tensors_mut()
                    .into_iter()
                    .zip(grads)
                    .zip(m.iter_mut())
                    .zip(v.iter_mut())
                {
                    for i in 0..p.len() {
                        let gi = g[i];
                        m[i] = *beta1 * m[i] + (1.0 - *beta1) * gi;
                        v[i] = *beta2 * v[i] + (1.0 - *beta2) * gi * gi;
                        let m_hat = m[i] / c1;
                        let v_hat = v[i] / c2;
                        p[i] -= *lr * m_hat / (v_hat.sqrt() + *eps);
                    }
                }
            }
        }
    }
}
