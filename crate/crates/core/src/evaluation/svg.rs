//! Minimal static line plots of ROC and PR curves.

use super::{pr_curve, roc_curve};
use crate::Result;

const SIZE: f64 = 320.0;
const MARGIN: f64 = 40.0;

fn plot(points: &[(f64, f64)], title: &str, x_label: &str, y_label: &str, diagonal: bool) -> String {
    let span = SIZE - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + x * span;
    let py = |y: f64| SIZE - MARGIN - y * span;
    let path: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    );
    s.push_str(&format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{span}\" height=\"{span}\" fill=\"none\" stroke=\"black\"/>\n"
    ));
    if diagonal {
        s.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n",
            px(0.0),
            py(0.0),
            px(1.0),
            py(1.0)
        ));
    }
    s.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>\n",
        path.join(" ")
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{title}</text>\n",
        SIZE / 2.0,
        MARGIN / 2.0 + 5.0
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{x_label}</text>\n",
        SIZE / 2.0,
        SIZE - 10.0
    ));
    s.push_str(&format!(
        "<text x=\"12\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 12 {})\">{y_label}</text>\n",
        SIZE / 2.0,
        SIZE / 2.0
    ));
    s.push_str("</svg>\n");
    s
}

pub fn roc_svg(scores: &[f64], labels: &[bool], title: &str) -> Result<String> {
    Ok(plot(&roc_curve(scores, labels)?, title, "false positive rate", "true positive rate", true))
}

pub fn pr_svg(scores: &[f64], labels: &[bool], title: &str) -> Result<String> {
    let mut points = vec![(0.0, 1.0)];
    points.extend(pr_curve(scores, labels)?);
    Ok(plot(&points, title, "recall", "precision", false))
}
