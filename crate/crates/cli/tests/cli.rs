mod common;

use common::{dtigraph, fixture, read_tsv, tree};

#[test]
fn evaluate_is_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(dtigraph(&["evaluate"], &cfg, &a).code, 0);
    assert_eq!(dtigraph(&["evaluate"], &cfg, &b).code, 0);
    let (ta, tb) = (tree(&a), tree(&b));
    assert!(ta.len() > 3);
    assert_eq!(ta, tb);
}

#[test]
fn missing_view_is_an_input_error_with_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "");
    std::fs::remove_file(dir.path().join("drug_view_1.tsv")).unwrap();
    let out = dir.path().join("run");
    for cmd in ["affinity", "evaluate", "train"] {
        let r = dtigraph(&[cmd], &cfg, &out);
        assert_eq!(r.code, 2, "{cmd}: {}", r.stderr);
        assert!(r.stderr.contains("drug_view_1.tsv"));
        assert!(!out.exists());
    }
}

#[test]
fn unknown_config_key_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "train.epoch = 3\n");
    assert_eq!(dtigraph(&["evaluate"], &cfg, &dir.path().join("run")).code, 2);
}

#[test]
fn divergence_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "train.optimizer = \"sgd\"\n");
    let text = std::fs::read_to_string(&cfg).unwrap().replace("learning_rate = 0.01", "learning_rate = 1e300");
    std::fs::write(&cfg, text).unwrap();
    let r = dtigraph(&["train"], &cfg, &dir.path().join("run"));
    assert_eq!(r.code, 3, "{}", r.stderr);
}

#[test]
fn affinity_files_are_symmetric_in_unit_interval() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "");
    let out = dir.path().join("run");
    assert_eq!(dtigraph(&["affinity"], &cfg, &out).code, 0);
    for (file, n) in [("affinity_drug.tsv", 8), ("affinity_target.tsv", 6)] {
        let rows = read_tsv(&out.join(file));
        assert_eq!(rows.len(), n + 1);
        let v: Vec<Vec<f64>> = rows[1..].iter().map(|r| r.iter().map(|c| c.parse().unwrap()).collect()).collect();
        for (i, row) in v.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(x, v[j][i]);
                assert!((0.0..=1.0).contains(&x));
            }
        }
    }
    let log = read_tsv(&out.join("convergence.tsv"));
    assert_eq!(log.len(), 3);
    assert!(out.join("manifest.toml").exists());
}

#[test]
fn warm_report_has_fold_mean_and_std_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "");
    let out = dir.path().join("run");
    assert_eq!(dtigraph(&["evaluate"], &cfg, &out).code, 0);
    let rows = read_tsv(&out.join("report_even.tsv"));
    assert_eq!(rows.len(), 1 + 3 + 2);
    assert_eq!(rows[0][0], "fold");
    assert_eq!(rows[0].len(), 8);
    assert_eq!((rows[4][0].as_str(), rows[5][0].as_str()), ("mean", "std"));
    assert!(out.join("summary_even.txt").exists());
    assert!(out.join("curves/even_0_roc.svg").exists());
    assert!(out.join("curves/even_2_pr.svg").exists());
}

#[test]
fn cold_drug_report_has_one_row_per_holdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "");
    let out = dir.path().join("all");
    let r = dtigraph(&["evaluate", "--mode", "cold_drug"], &cfg, &out);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = read_tsv(&out.join("report_even.tsv"));
    let eligible: Vec<String> = rows[1..rows.len() - 2].iter().map(|r| r[0].clone()).collect();
    assert!(eligible.len() >= 3 && eligible.iter().all(|id| id.starts_with('d')));

    let chosen = &eligible[..3];
    let quoted: Vec<String> = chosen.iter().map(|id| format!("{id:?}")).collect();
    let text = std::fs::read_to_string(&cfg).unwrap();
    std::fs::write(&cfg, format!("{text}eval.holdouts = [{}]\n", quoted.join(", "))).unwrap();
    let out = dir.path().join("three");
    assert_eq!(dtigraph(&["evaluate", "--mode", "cold_drug"], &cfg, &out).code, 0);
    let rows = read_tsv(&out.join("report_even.tsv"));
    let labels: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    let mut want = vec!["fold"];
    want.extend(chosen.iter().map(String::as_str));
    want.extend(["mean", "std"]);
    assert_eq!(labels, want);
}

#[test]
fn each_variant_writes_its_own_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "");
    let out = dir.path().join("run");
    for v in ["odd", "attention", "adgl_only", "edgl_only", "no_fusion"] {
        let r = dtigraph(&["evaluate", "--variant", v], &cfg, &out);
        assert_eq!(r.code, 0, "{v}: {}", r.stderr);
        assert!(out.join(format!("report_{v}.tsv")).exists());
        assert!(out.join(format!("summary_{v}.txt")).exists());
    }
    assert!(!out.join("report_even.tsv").exists());
}

#[test]
fn predictions_exclude_training_positives_and_descend() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "");
    let out = dir.path().join("run");
    let pairs = read_tsv(&dir.path().join("interactions.tsv"));
    let drug = pairs.iter().find(|r| r[2] == "1").unwrap()[0].clone();
    assert_eq!(dtigraph(&["predict", "--drug", &drug, "--top", "100"], &cfg, &out).code, 0);
    let known: Vec<String> = pairs.iter().filter(|r| r[0] == drug && r[2] == "1").map(|r| r[1].clone()).collect();
    let rows = read_tsv(&out.join(format!("predictions_drug_{drug}.tsv")));
    assert_eq!(rows[0], ["rank", "target", "score"]);
    assert_eq!(rows.len() - 1, 6 - known.len());
    let scores: Vec<f64> = rows[1..].iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    assert!(rows[1..].iter().all(|r| !known.contains(&r[1])));
}

#[test]
fn predict_from_checkpoint_matches_on_demand_training() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base");
    std::fs::create_dir(&base).unwrap();
    let cfg = fixture(&base, 8, 6, "");
    let trained = dir.path().join("trained");
    assert_eq!(dtigraph(&["train"], &cfg, &trained).code, 0);
    assert!(trained.join("checkpoint/tensors.tsv").exists());
    assert!(trained.join("loss_trace.tsv").exists());

    let on_demand = dir.path().join("on_demand");
    assert_eq!(dtigraph(&["predict", "--target", "t1", "--top", "3"], &cfg, &on_demand).code, 0);
    let text = std::fs::read_to_string(&cfg).unwrap();
    let with_ckpt = base.join("ckpt.toml");
    std::fs::write(&with_ckpt, format!("{text}paths.checkpoint = {:?}\n", trained.join("checkpoint"))).unwrap();
    let from_ckpt = dir.path().join("from_ckpt");
    assert_eq!(dtigraph(&["predict", "--target", "t1", "--top", "3"], &with_ckpt, &from_ckpt).code, 0);
    let a = std::fs::read(on_demand.join("predictions_target_t1.tsv")).unwrap();
    let b = std::fs::read(from_ckpt.join("predictions_target_t1.tsv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(read_tsv(&from_ckpt.join("predictions_target_t1.tsv")).len(), 4);
}

#[test]
fn predict_unknown_id_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "");
    assert_eq!(dtigraph(&["predict", "--drug", "nope"], &cfg, &dir.path().join("run")).code, 2);
}

#[test]
fn sweep_writes_one_report_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "sweep.k = [2, 4]\nsweep.omega = [0.25, 0.75]\n");
    let out = dir.path().join("run");
    assert_eq!(dtigraph(&["sweep"], &cfg, &out).code, 0);
    let summary = read_tsv(&out.join("sweep/summary.tsv"));
    assert_eq!(summary.len(), 1 + 4);
    for row in &summary[1..] {
        assert!(out.join(format!("sweep/{}.tsv", row[0])).exists());
    }
}

#[test]
fn jobs_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(dtigraph(&["evaluate", "--jobs", "1"], &cfg, &a).code, 0);
    assert_eq!(dtigraph(&["evaluate", "--jobs", "3"], &cfg, &b).code, 0);
    let report = |d: &std::path::Path| std::fs::read(d.join("report_even.tsv")).unwrap();
    assert_eq!(report(&a), report(&b));
}

#[test]
fn cold_mode_without_eligible_holdouts_is_an_input_error() {
    // sampled negatives land on targets without positives, so no target
    // in this fixture has both classes
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path(), 8, 6, "");
    let r = dtigraph(&["evaluate", "--mode", "cold_target"], &cfg, &dir.path().join("run"));
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("no target has both"), "{}", r.stderr);
}
