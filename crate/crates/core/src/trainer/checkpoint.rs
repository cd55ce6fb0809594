//! Parameter bundles: one TSV per tensor plus an index listing names and
//! shapes. Values use the shortest round-trip decimal form.

use std::io::Write;
use std::path::Path;

use super::{init_params, ModelDims, ModelParams};
use crate::linalg::Mat;
use crate::{Error, Result};

const INDEX: &str = "tensors.tsv";

fn write_matrix(path: &Path, m: &Mat) -> Result<()> {
    let mut out = Vec::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = m.row(r).iter().map(|x| format!("{x:?}")).collect();
        writeln!(out, "{}", row.join("\t")).expect("write to vec");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn read_matrix(path: &Path, rows: usize, cols: usize) -> Result<Mat> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut m = Mat::zeros(rows, cols);
    let mut r = 0;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if r >= rows {
            return Err(Error::parse(path, line_no + 1, "too many rows"));
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != cols {
            return Err(Error::parse(path, line_no + 1, format!("expected {cols} cells")));
        }
        for (c, cell) in cells.iter().enumerate() {
            m[(r, c)] = cell
                .parse()
                .map_err(|_| Error::parse(path, line_no + 1, format!("bad number {cell:?}")))?;
        }
        r += 1;
    }
    if r != rows {
        return Err(Error::parse(path, r, format!("expected {rows} rows, got {r}")));
    }
    Ok(m)
}

pub fn write_params(dir: &Path, params: &ModelParams) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut index = String::from("name\trows\tcols\n");
    for (name, m) in params.named_tensors() {
        index.push_str(&format!("{name}\t{}\t{}\n", m.nrows(), m.ncols()));
        write_matrix(&dir.join(format!("{name}.tsv")), m)?;
    }
    let path = dir.join(INDEX);
    std::fs::write(&path, index).map_err(|e| Error::io(&path, e))
}

/// Reads a bundle written by [`write_params`] for a model of shape `dims`.
pub fn read_params(dir: &Path, dims: &ModelDims) -> Result<ModelParams> {
    let mut params = init_params(dims, 0)?;
    let names: Vec<(String, usize, usize)> = params
        .named_tensors()
        .into_iter()
        .map(|(n, m)| (n, m.nrows(), m.ncols()))
        .collect();
    let index_path = dir.join(INDEX);
    let index = std::fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
    let listed: Vec<&str> = index.lines().skip(1).filter(|l| !l.trim().is_empty()).collect();
    if listed.len() != names.len() {
        return Err(Error::Shape(format!(
            "checkpoint has {} tensors, model expects {}",
            listed.len(),
            names.len()
        )));
    }
    for ((name, rows, cols), (slot, line)) in names.iter().zip(params.tensors_mut().into_iter().zip(listed)) {
        let expected = format!("{name}\t{rows}\t{cols}");
        if line.trim_end() != expected {
            return Err(Error::Shape(format!(
                "checkpoint entry {line:?} does not match {expected:?}"
            )));
        }
        *slot = read_matrix(&dir.join(format!("{name}.tsv")), *rows, *cols)?;
    }
    Ok(params)
}
