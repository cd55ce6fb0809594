//! UTF-8 tab-separated formats.
//!
//! Feature view: a header row of entity identifiers, then one row per
//! feature with one value per entity. Interactions: headerless
//! `drug_id<TAB>target_id<TAB>label` lines with `label` in `{0,1}`.
//! Affinity: a header row of identifiers, then one row per identifier in
//! header order.
//! Trailing whitespace (including `\r`) is trimmed from every line and blank
//! lines are skipped.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use super::{EntityKind, EntitySet, FeatureView, InteractionSet, Pair};
use crate::affinity::AffinityMatrix;
use crate::linalg::Mat;
use crate::{Error, Result};

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Non-blank lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty())
}

/// Identifiers listed in the header row of a feature-view style file.
pub fn read_header_ids(path: &Path) -> Result<Vec<String>> {
    let text = read_to_string(path)?;
    let (_, header) = lines(&text)
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing header row"))?;
    Ok(header.split('\t').map(str::to_string).collect())
}

pub fn parse_feature_view(
    path: &Path,
    entity_kind: EntityKind,
    entities: &EntitySet,
) -> Result<FeatureView> {
    let text = read_to_string(path)?;
    parse_feature_view_str(&text, path, entity_kind, entities)
}

/// Parses feature-view text; `origin` is only used in error messages.
pub fn parse_feature_view_str(
    text: &str,
    origin: &Path,
    entity_kind: EntityKind,
    entities: &EntitySet,
) -> Result<FeatureView> {
    let mut rows = lines(text);
    let (header_line, header) = rows
        .next()
        .ok_or_else(|| Error::parse(origin, 1, "missing header row"))?;
    let n = entities.count(entity_kind);

    // column in file -> column in EntitySet order
    let mut column_target = Vec::new();
    let mut seen = vec![false; n];
    for id in header.split('\t') {
        let idx = entities
            .index_of(entity_kind, id)
            .ok_or_else(|| Error::parse(origin, header_line, format!("unknown identifier {id:?}")))?;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::parse(
                origin,
                header_line,
                format!("duplicate header identifier {id:?}"),
            ));
        }
        column_target.push(idx);
    }
    if column_target.len() != n {
        return Err(Error::parse(
            origin,
            header_line,
            format!("header lists {} identifiers, expected {n}", column_target.len()),
        ));
    }

    let mut data: Vec<Vec<f64>> = Vec::new();
    for (line_no, line) in rows {
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != n {
            return Err(Error::parse(
                origin,
                line_no,
                format!("row has {} cells, expected {n}", cells.len()),
            ));
        }
        let mut row = vec![0.0; n];
        for (cell, &col) in cells.iter().zip(&column_target) {
            let value: f64 = cell.trim().parse().map_err(|_| {
                Error::parse(origin, line_no, format!("non-numeric feature value {cell:?}"))
            })?;
            if !value.is_finite() {
                return Err(Error::parse(origin, line_no, "non-finite feature value"));
            }
            row[col] = value;
        }
        data.push(row);
    }
    let values = Mat::from_fn(data.len(), n, |r, c| data[r][c]);
    FeatureView::new(entity_kind, values)
}

pub fn parse_interactions(path: &Path, entities: &EntitySet) -> Result<InteractionSet> {
    let text = read_to_string(path)?;
    parse_interactions_str(&text, path, entities)
}

pub fn parse_interactions_str(
    text: &str,
    origin: &Path,
    entities: &EntitySet,
) -> Result<InteractionSet> {
    let mut labels: HashMap<Pair, bool> = HashMap::new();
    for (line_no, line) in lines(text) {
        let cells: Vec<&str> = line.split('\t').collect();
        let [drug, target, label] = cells[..] else {
            return Err(Error::parse(
                origin,
                line_no,
                format!("expected 3 fields, got {}", cells.len()),
            ));
        };
        let d = entities
            .index_of(EntityKind::Drug, drug)
            .ok_or_else(|| Error::parse(origin, line_no, format!("unknown identifier {drug:?}")))?;
        let t = entities
            .index_of(EntityKind::Target, target)
            .ok_or_else(|| Error::parse(origin, line_no, format!("unknown identifier {target:?}")))?;
        let positive = match label.trim() {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("label must be 0 or 1, got {other:?}"),
                ))
            }
        };
        if let Some(prev) = labels.insert((d, t), positive) {
            if prev != positive {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("conflicting duplicate pair {drug}\t{target}"),
                ));
            }
        }
    }
    let (pos, neg): (Vec<_>, Vec<_>) = labels.into_iter().partition(|&(_, l)| l);
    InteractionSet::new(
        entities.n_d(),
        entities.n_t(),
        pos.into_iter().map(|(p, _)| p).collect(),
        neg.into_iter().map(|(p, _)| p).collect(),
    )
}

/// Writes every labeled pair in ascending pair order.
pub fn write_interactions<W: Write>(
    out: &mut W,
    interactions: &InteractionSet,
    entities: &EntitySet,
) -> std::io::Result<()> {
    for lp in interactions.labeled_pairs() {
        let (d, t) = lp.pair;
        writeln!(
            out,
            "{}\t{}\t{}",
            entities.drug_ids()[d],
            entities.target_ids()[t],
            u8::from(lp.positive)
        )?;
    }
    Ok(())
}

pub fn parse_affinity(path: &Path, kind: EntityKind, entities: &EntitySet) -> Result<AffinityMatrix> {
    let text = read_to_string(path)?;
    parse_affinity_str(&text, path, kind, entities)
}

/// Square affinity matrix with rows and columns reordered to `entities`.
pub fn parse_affinity_str(
    text: &str,
    origin: &Path,
    kind: EntityKind,
    entities: &EntitySet,
) -> Result<AffinityMatrix> {
    let view = parse_feature_view_str(text, origin, kind, entities)?;
    let n = entities.count(kind);
    if view.dim() != n {
        return Err(Error::parse(
            origin,
            1,
            format!("affinity has {} rows, expected {n}", view.dim()),
        ));
    }
    let (_, header) = lines(text).next().expect("header checked by feature parser");
    let row_of: Vec<usize> = header
        .split('\t')
        .map(|id| entities.require_index(kind, id))
        .collect::<Result<_>>()?;
    let mut values = Mat::zeros(n, n);
    for (file_row, &r) in row_of.iter().enumerate() {
        values.set_row(r, &view.values.row(file_row));
    }
    AffinityMatrix::new(kind, values)
}

/// Header of identifiers, then one row per entity. Values are written in
/// shortest round-trip form.
pub fn write_affinity<W: Write>(out: &mut W, affinity: &AffinityMatrix, ids: &[String]) -> std::io::Result<()> {
    writeln!(out, "{}", ids.join("\t"))?;
    for row in affinity.values().row_iter() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        writeln!(out, "{}", cells.join("\t"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ents(drugs: &[&str], targets: &[&str]) -> EntitySet {
        EntitySet::new(
            drugs.iter().map(|s| s.to_string()).collect(),
            targets.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    fn p() -> &'static Path {
        Path::new("<test>")
    }

    #[test]
    fn feature_view_transcribes() {
        let e = ents(&["d1", "d2"], &["t1"]);
        let v = parse_feature_view_str("d1\td2\n0.1\t0.2\n0.3\t0.4\n", p(), EntityKind::Drug, &e)
            .unwrap();
        assert_eq!(v.values, Mat::from_row_slice(2, 2, &[0.1, 0.2, 0.3, 0.4]));
    }

    #[test]
    fn feature_view_reorders_columns() {
        let e = ents(&["d1", "d2"], &["t1"]);
        let v = parse_feature_view_str("d2\td1\r\n0.1\t0.2\r\n0.3\t0.4\r\n", p(), EntityKind::Drug, &e)
            .unwrap();
        assert_eq!(v.values, Mat::from_row_slice(2, 2, &[0.2, 0.1, 0.4, 0.3]));
    }

    #[test]
    fn feature_view_errors() {
        let e = ents(&["d1", "d2"], &["t1"]);
        let err = parse_feature_view_str("d1\td2\nNaN\t0.2\n", p(), EntityKind::Drug, &e)
            .unwrap_err()
            .to_string();
        assert!(err.contains("non-finite feature value"), "{err}");
        let err = parse_feature_view_str("d1\tdx\n1\t2\n", p(), EntityKind::Drug, &e)
            .unwrap_err()
            .to_string();
        assert!(err.contains("unknown identifier"), "{err}");
        let err = parse_feature_view_str("d1\td1\n1\t2\n", p(), EntityKind::Drug, &e)
            .unwrap_err()
            .to_string();
        assert!(err.contains("duplicate header identifier"), "{err}");
        let err = parse_feature_view_str("d1\td2\n1\n", p(), EntityKind::Drug, &e)
            .unwrap_err()
            .to_string();
        assert!(err.contains("expected 2"), "{err}");
        let err = parse_feature_view_str("d1\td2\n1\tabc\n", p(), EntityKind::Drug, &e)
            .unwrap_err()
            .to_string();
        assert!(err.contains("non-numeric"), "{err}");
    }

    #[test]
    fn interactions_single_positive() {
        let e = ents(&["d1"], &["t1"]);
        let s = parse_interactions_str("d1\tt1\t1\n", p(), &e).unwrap();
        assert_eq!(s.matrix(), &Mat::from_element(1, 1, 1.0));
        assert_eq!(s.positives(), &[(0, 0)]);
        assert!(s.negatives().is_empty());
    }

    #[test]
    fn interactions_conflict() {
        let e = ents(&["d1"], &["t1"]);
        let err = parse_interactions_str("d1\tt1\t1\nd1\tt1\t0\n", p(), &e)
            .unwrap_err()
            .to_string();
        assert!(err.contains("conflicting duplicate pair"), "{err}");
        // consistent duplicates collapse
        let s = parse_interactions_str("d1\tt1\t1\nd1\tt1\t1\n", p(), &e).unwrap();
        assert_eq!(s.positives().len(), 1);
    }

    #[test]
    fn interactions_explicit_negative() {
        let e = ents(&["d1", "d2"], &["t1", "t2"]);
        let s = parse_interactions_str("d1\tt1\t1\nd2\tt2\t0\n", p(), &e).unwrap();
        assert_eq!(s.matrix(), &Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(s.positives().len(), 1);
        assert_eq!(s.negatives().len(), 1);
    }

    #[test]
    fn interactions_bad_fields() {
        let e = ents(&["d1"], &["t1"]);
        assert!(parse_interactions_str("d1\tt1\t2\n", p(), &e).is_err());
        assert!(parse_interactions_str("d1\tt9\t1\n", p(), &e).is_err());
        assert!(parse_interactions_str("d1\tt1\n", p(), &e).is_err());
    }

    #[test]
    fn affinity_round_trip_reorders() {
        let e = ents(&["a", "b", "c"], &["t"]);
        let text = "c\ta\tb\n1\t0.2\t0.3\n0.2\t1\t0.5\n0.3\t0.5\t1\n";
        let aff = parse_affinity_str(text, p(), EntityKind::Drug, &e).unwrap();
        assert_eq!(aff.values()[(0, 1)], 0.5);
        assert_eq!(aff.values()[(2, 0)], 0.2);
        assert_eq!(aff.values()[(2, 2)], 1.0);
        let mut buf = Vec::new();
        write_affinity(&mut buf, &aff, e.drug_ids()).unwrap();
        let back = parse_affinity_str(std::str::from_utf8(&buf).unwrap(), p(), EntityKind::Drug, &e).unwrap();
        assert_eq!(back, aff);
    }
}
