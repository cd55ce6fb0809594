//! Small dense-matrix helpers shared across the pipeline.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Dense, column-major `f64` matrix used for every numeric quantity.
pub type Mat = DMatrix<f64>;

pub fn all_finite(m: &Mat) -> bool {
    m.iter().all(|x| x.is_finite())
}

pub fn ensure_finite(m: &Mat, what: &str) -> Result<()> {
    if all_finite(m) {
        Ok(())
    } else {
        Err(Error::Divergence(format!("non-finite values in {what}")))
    }
}

/// Largest absolute entrywise difference; `f64::INFINITY` on shape mismatch.
pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn ensure_shape(m: &Mat, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(Error::Shape(format!(
            "{what}: expected {rows}x{cols}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Adds a `1 x cols` row vector to every row of `m`.
pub fn add_row_broadcast(m: &mut Mat, row: &Mat) {
    debug_assert_eq!(row.nrows(), 1);
    debug_assert_eq!(row.ncols(), m.ncols());
    for (j, mut col) in m.column_iter_mut().enumerate() {
        let b = row[(0, j)];
        col.iter_mut().for_each(|x| *x += b);
    }
}

/// Column sums as a `1 x cols` row vector.
pub fn column_sums(m: &Mat) -> Mat {
    Mat::from_fn(1, m.ncols(), |_, j| m.column(j).sum())
}

/// Frobenius inner product.
pub fn dot(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}
