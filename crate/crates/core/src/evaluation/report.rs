use super::{EvalReport, MetricRecord};

fn row(label: &str, m: &MetricRecord) -> String {
    let cells: Vec<String> = m.values().iter().map(|v| format!("{v:.6}")).collect();
    format!("{label}\t{}\n", cells.join("\t"))
}

/// One row per fold, then `mean` and `std` rows. `fold_labels` names the
/// folds (entity ids in cold-start modes).
pub fn report_tsv(report: &EvalReport, fold_labels: &[String]) -> String {
    let mut out = format!("fold\t{}\n", MetricRecord::NAMES.join("\t"));
    for (i, f) in report.per_fold.iter().enumerate() {
        let label = fold_labels.get(i).cloned().unwrap_or_else(|| f.index.to_string());
        out.push_str(&row(&label, &f.metrics));
    }
    out.push_str(&row("mean", &report.mean));
    out.push_str(&row("std", &report.std));
    out
}

/// Mean ± std table in plain text.
pub fn summary_text(report: &EvalReport, title: &str) -> String {
    let mut out = format!("{title}\nmode: {}\nfolds: {}\n", report.mode, report.per_fold.len());
    for ((name, m), s) in MetricRecord::NAMES
        .iter()
        .zip(report.mean.values())
        .zip(report.std.values())
    {
        out.push_str(&format!("{name:<12} {m:.4} ± {s:.4}\n"));
    }
    out
}
