#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;

use dtigraph::dataio::write_interactions;
use dtigraph::synthetic::low_rank_dti;
use dtigraph::FeatureView;

fn view_tsv(view: &FeatureView, ids: &[String]) -> String {
    let mut s = ids.join("\t");
    s.push('\n');
    for r in 0..view.values.nrows() {
        let row: Vec<String> = view.values.row(r).iter().map(|x| format!("{x:?}")).collect();
        writeln!(s, "{}", row.join("\t")).unwrap();
    }
    s
}

/// Writes a small synthetic data set and a fast configuration into `dir`.
/// `extra` is appended to the configuration.
pub fn fixture(dir: &Path, n_d: usize, n_t: usize, extra: &str) -> PathBuf {
    let data = low_rank_dti(n_d, n_t, 2, 0.25, 0).unwrap();
    let mut cfg = String::from("seed = 0\nout_dir = \"run\"\n");
    let mut drug_views = Vec::new();
    for (i, v) in data.drug_views.iter().enumerate() {
        let name = format!("drug_view_{i}.tsv");
        std::fs::write(dir.join(&name), view_tsv(v, data.entities.drug_ids())).unwrap();
        drug_views.push(format!("{name:?}"));
    }
    let mut target_views = Vec::new();
    for (i, v) in data.target_views.iter().enumerate() {
        let name = format!("target_view_{i}.tsv");
        std::fs::write(dir.join(&name), view_tsv(v, data.entities.target_ids())).unwrap();
        target_views.push(format!("{name:?}"));
    }
    let mut inter = Vec::new();
    write_interactions(&mut inter, &data.interactions, &data.entities).unwrap();
    std::fs::write(dir.join("interactions.tsv"), inter).unwrap();
    writeln!(cfg, "paths.drug_views = [{}]", drug_views.join(", ")).unwrap();
    writeln!(cfg, "paths.target_views = [{}]", target_views.join(", ")).unwrap();
    cfg.push_str("paths.interactions = \"interactions.tsv\"\n");
    cfg.push_str("admm.max_iter = 40\nadmm.mu0 = 0.1\nadmm.rho = 1.3\nadmm.beta1 = 1.0\nadmm.beta2 = 0.01\n");
    cfg.push_str("train.epochs = 15\ntrain.learning_rate = 0.01\n");
    cfg.push_str("model.gcn_hidden = 8\nmodel.embed_dim = 4\nmodel.edgl_hidden = 8\n");
    cfg.push_str("filter.k = 4\neval.folds = 3\n");
    cfg.push_str(extra);
    let path = dir.join("config.toml");
    std::fs::write(&path, cfg).unwrap();
    path
}

pub struct Outcome {
    pub code: i32,
    pub stderr: String,
}

pub fn dtigraph(args: &[&str], config: &Path, out_dir: &Path) -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_dtigraph"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out-dir")
        .arg(out_dir)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs");
    Outcome {
        code: out.status.code().unwrap_or(-1),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Relative path and contents of every file below `root`, sorted.
pub fn tree(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.push((path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}

pub fn read_tsv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}
