//! Reference implementations written independently of the library: plain
//! loops over `Vec<Vec<f64>>`, no shared helpers.
#![allow(dead_code, clippy::needless_range_loop)]

pub type Dense = Vec<Vec<f64>>;

pub fn zeros(r: usize, c: usize) -> Dense {
    vec![vec![0.0; c]; r]
}

pub fn identity(n: usize) -> Dense {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            let mut s = 0.0;
            for l in 0..k {
                s += a[i][l] * b[l][j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn transpose(a: &Dense) -> Dense {
    let mut out = zeros(a[0].len(), a.len());
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            out[j][i] = x;
        }
    }
    out
}

/// Full SVD of a square matrix by one-sided Jacobi rotations:
/// returns `(U, sigma, V)` with `A = U diag(sigma) V^T`.
pub fn jacobi_svd(a: &Dense) -> (Dense, Vec<f64>, Dense) {
    let n = a.len();
    let mut u = a.clone();
    let mut v = identity(n);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for row in &u {
                    alpha += row[p] * row[p];
                    beta += row[q] * row[q];
                    gamma += row[p] * row[q];
                }
                if gamma == 0.0 {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for row in u.iter_mut().chain(v.iter_mut()) {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut sigma = vec![0.0; n];
    for j in 0..n {
        let norm = u.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
        sigma[j] = norm;
        if norm > 0.0 {
            for row in u.iter_mut() {
                row[j] /= norm;
            }
        }
    }
    (u, sigma, v)
}

/// Subtract `tau` from every singular value, clamp at zero, reconstruct.
pub fn svt(a: &Dense, tau: f64) -> Dense {
    let (u, sigma, v) = jacobi_svd(a);
    let n = a.len();
    let mut out = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).map(|k| u[i][k] * (sigma[k] - tau).max(0.0) * v[j][k]).sum();
        }
    }
    out
}

pub fn shrink(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

/// `sum_k alpha (1-alpha)^k P^{e(k)} X` with `e(k) = 2k` (even) or `2k+1`
/// (odd), using explicitly materialized matrix powers.
pub fn power_filter(x: &Dense, p: &Dense, big_k: usize, alpha: f64, odd: bool) -> Dense {
    let terms = if odd { big_k / 2 } else { big_k / 2 + 1 };
    let n = p.len();
    let mut out = zeros(n, x[0].len());
    for k in 0..terms {
        let exponent = if odd { 2 * k + 1 } else { 2 * k };
        let mut power = identity(n);
        for _ in 0..exponent {
            power = matmul(&power, p);
        }
        let term = matmul(&power, x);
        let coeff = alpha * (1.0 - alpha).powi(k as i32);
        for (o, t) in out.iter_mut().zip(&term) {
            for (a, b) in o.iter_mut().zip(t) {
                *a += coeff * b;
            }
        }
    }
    out
}

/// Fraction of positive/negative pairs ordered correctly, ties one half.
pub fn auroc_pairs(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut total = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if labels[i] && !labels[j] {
                total += 1.0;
                if si > sj {
                    wins += 1.0;
                } else if si == sj {
                    wins += 0.5;
                }
            }
        }
    }
    wins / total
}

/// Sample `j` is ranked ahead of `i` when it scores higher, or scores the same
/// with a smaller index.
fn ahead(scores: &[f64], j: usize, i: usize) -> bool {
    scores[j] > scores[i] || (scores[j] == scores[i] && j < i)
}

/// Average precision by counting, for each positive, the samples ranked at or
/// before it.
pub fn average_precision(scores: &[f64], labels: &[bool]) -> f64 {
    let n_pos = labels.iter().filter(|&&l| l).count() as f64;
    let mut sum = 0.0;
    for i in 0..scores.len() {
        if !labels[i] {
            continue;
        }
        let rank = 1 + (0..scores.len()).filter(|&j| j != i && ahead(scores, j, i)).count();
        let hits = 1 + (0..scores.len())
            .filter(|&j| j != i && labels[j] && ahead(scores, j, i))
            .count();
        sum += hits as f64 / rank as f64;
    }
    sum / n_pos
}

/// Deterministic xorshift stream for test inputs.
pub struct Stream(u64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform on `[-1, 1)`.
    pub fn signed(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn dense(&mut self, r: usize, c: usize) -> Dense {
        (0..r).map(|_| (0..c).map(|_| self.signed()).collect()).collect()
    }
}

/// Random bipartite propagation matrix on `n_d + n_t` nodes: symmetric
/// weights on the off-diagonal blocks, degree-normalized.
pub fn bipartite_propagation(s: &mut Stream, n_d: usize, n_t: usize, density: f64) -> Dense {
    let n = n_d + n_t;
    let mut a = zeros(n, n);
    for d in 0..n_d {
        for t in 0..n_t {
            if s.unit() < density {
                let w = 0.1 + s.unit();
                a[d][n_d + t] = w;
                a[n_d + t][d] = w;
            }
        }
    }
    let deg: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let scale = |x: f64| if x > 0.0 { 1.0 / x.sqrt() } else { 0.0 };
    for i in 0..n {
        for j in 0..n {
            a[i][j] *= scale(deg[i]) * scale(deg[j]);
        }
    }
    a
}
