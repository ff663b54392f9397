//! Flat-file inputs: document embeddings, return series and profiles.
//!
//! Embeddings arrive either as JSON lines `{"asset": "...", "vector": [...]}`
//! or as CSV with header `asset,v0,v1,...`. Returns are CSV with header
//! `date,SYM1,SYM2,...` and ISO-8601 dates.

use crate::distances::angular_distance;
use crate::error::{Error, Result};
use crate::grid::{build_grid, SensitivityProfile};
use crate::matrix::DistanceMatrix;
use crate::simulator::ReturnsPanel;
use chrono::NaiveDate;
use nalgebra::DMatrix;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRecord {
    pub asset: String,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssetVector {
    pub asset: String,
    pub mean_vector: Vec<f64>,
    pub doc_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingFormat {
    Jsonl,
    Csv,
}

impl EmbeddingFormat {
    /// Guesses the format from a file extension (`.csv` → CSV, else JSONL).
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => EmbeddingFormat::Csv,
            _ => EmbeddingFormat::Jsonl,
        }
    }
}

#[derive(Deserialize)]
struct JsonRecord {
    asset: String,
    vector: Vec<f64>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn push_record(records: &mut Vec<EmbeddingRecord>, line: usize, asset: String, vector: Vec<f64>) -> Result<()> {
    if vector.is_empty() {
        return Err(parse_err(line, "embedding vector is empty"));
    }
    if vector.iter().any(|v| !v.is_finite()) {
        return Err(parse_err(line, "embedding contains a non-finite value"));
    }
    if let Some(first) = records.first() {
        if first.vector.len() != vector.len() {
            return Err(Error::DimensionMismatch {
                expected: first.vector.len(),
                found: vector.len(),
            });
        }
    }
    records.push(EmbeddingRecord { asset, vector });
    Ok(())
}

/// Reads one embedding record per document. Blank JSONL lines are skipped.
pub fn load_embeddings<R: Read>(source: R, format: EmbeddingFormat) -> Result<Vec<EmbeddingRecord>> {
    let mut records = Vec::new();
    match format {
        EmbeddingFormat::Jsonl => {
            for (idx, line) in BufReader::new(source).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: JsonRecord = serde_json::from_str(&line).map_err(|e| parse_err(idx + 1, e.to_string()))?;
                push_record(&mut records, idx + 1, rec.asset, rec.vector)?;
            }
        }
        EmbeddingFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(source);
            let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
            if header.is_empty() || header.get(0).map(str::trim) != Some("asset") {
                if header.is_empty() {
                    return Err(Error::EmptyInput);
                }
                return Err(Error::ColumnMismatch("embedding CSV must start with an `asset` column".into()));
            }
            for (idx, row) in reader.records().enumerate() {
                let line = idx + 2;
                let row = row.map_err(|e| parse_err(line, e.to_string()))?;
                let asset = row.get(0).unwrap_or("").trim().to_string();
                if asset.is_empty() {
                    return Err(parse_err(line, "missing asset identifier"));
                }
                let vector = row
                    .iter()
                    .skip(1)
                    .map(|c| c.trim().parse::<f64>().map_err(|e| parse_err(line, format!("`{c}`: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                push_record(&mut records, line, asset, vector)?;
            }
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(records)
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Groups records by asset (sorted) with each asset's vectors in a canonical
/// order, so downstream sums do not depend on input line order.
pub fn group_by_asset(records: &[EmbeddingRecord]) -> BTreeMap<String, Vec<Vec<f64>>> {
    let mut groups: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();
    for r in records {
        groups.entry(r.asset.clone()).or_default().push(r.vector.clone());
    }
    for vs in groups.values_mut() {
        vs.sort_by(|a, b| lexicographic(a, b));
    }
    groups
}

/// Mean embedding per asset, sorted by asset identifier.
pub fn aggregate_embeddings(records: &[EmbeddingRecord]) -> Result<Vec<AssetVector>> {
    group_by_asset(records)
        .into_iter()
        .map(|(asset, vectors)| {
            let dim = vectors[0].len();
            let count = vectors.len();
            let mut mean = vec![0.0; dim];
            for v in &vectors {
                for (m, x) in mean.iter_mut().zip(v) {
                    *m += x;
                }
            }
            mean.iter_mut().for_each(|m| *m /= count as f64);
            if mean.iter().all(|&m| m == 0.0) {
                return Err(Error::ZeroNormAggregate(asset));
            }
            Ok(AssetVector {
                asset,
                mean_vector: mean,
                doc_count: count,
            })
        })
        .collect()
}

/// Angular distances between aggregated asset vectors, labels sorted.
pub fn embedding_distance_matrix(assets: &[AssetVector]) -> Result<DistanceMatrix> {
    if assets.len() < 2 {
        return Err(Error::TooFewAssets {
            required: 2,
            found: assets.len(),
        });
    }
    let mut sorted: Vec<&AssetVector> = assets.iter().collect();
    sorted.sort_by(|a, b| a.asset.cmp(&b.asset));
    let dim = sorted[0].mean_vector.len();
    if let Some(bad) = sorted.iter().find(|a| a.mean_vector.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.mean_vector.len(),
        });
    }
    let labels = sorted.iter().map(|a| a.asset.clone()).collect();
    DistanceMatrix::try_from_pairs(labels, |i, j| angular_distance(&sorted[i].mean_vector, &sorted[j].mean_vector))
}

/// Energy distance between per-asset document clouds under the angular
/// ground metric, `2E d(X,Y) − E d(X,X') − E d(Y,Y')` over all ordered pairs.
/// `power = 1` returns `D`, `power = 2` returns `D²`.
pub fn embedding_cloud_energy_matrix(records: &[EmbeddingRecord], power: u8) -> Result<DistanceMatrix> {
    let groups = group_by_asset(records);
    if groups.len() < 2 {
        return Err(Error::TooFewAssets {
            required: 2,
            found: groups.len(),
        });
    }
    let labels: Vec<String> = groups.keys().cloned().collect();
    let clouds: Vec<Vec<Vec<f64>>> = groups
        .into_values()
        .map(|vs| {
            vs.into_iter()
                .map(|v| {
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm == 0.0 {
                        Err(Error::ZeroVector)
                    } else {
                        Ok(v.into_iter().map(|x| x / norm).collect())
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mean_angle = |a: &[Vec<f64>], b: &[Vec<f64>]| -> f64 {
        let mut s = 0.0;
        for x in a {
            for y in b {
                let dot: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
                s += dot.clamp(-1.0, 1.0).acos();
            }
        }
        s / (a.len() * b.len()) as f64 / std::f64::consts::PI
    };
    let within: Vec<f64> = crate::par::map_indexed(clouds.len(), |i| mean_angle(&clouds[i], &clouds[i]));
    DistanceMatrix::from_pairs(labels, |i, j| {
        let d_sq = (2.0 * mean_angle(&clouds[i], &clouds[j]) - within[i] - within[j]).max(0.0);
        if power == 2 {
            d_sq
        } else {
            d_sq.sqrt()
        }
    })
}

fn validate_date(value: &str, line: usize) -> Result<()> {
    let v = value.trim();
    let date_part = v.split(['T', ' ']).next().unwrap_or(v);
    NaiveDate::parse_from_str(date_part, "%Y-%m-%d")
        .map(|_| ())
        .map_err(|e| parse_err(line, format!("invalid ISO-8601 date `{v}`: {e}")))
}

/// Reads a returns CSV. When `risk_free` names a column, that column is
/// subtracted from every asset column and dropped.
pub fn load_returns<R: Read>(source: R, risk_free: Option<&str>) -> Result<ReturnsPanel> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(source);
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.is_empty() {
        return Err(Error::EmptyInput);
    }
    if header.get(0).map(str::trim) != Some("date") {
        return Err(Error::ColumnMismatch("returns CSV must start with a `date` column".into()));
    }
    let names: Vec<String> = header.iter().skip(1).map(|h| h.trim().to_string()).collect();
    let rf_idx = match risk_free {
        Some(rf) => Some(
            names
                .iter()
                .position(|n| n == rf)
                .ok_or_else(|| Error::ColumnMismatch(format!("risk-free column `{rf}` not found")))?,
        ),
        None => None,
    };
    let asset_idx: Vec<usize> = (0..names.len()).filter(|&i| Some(i) != rf_idx).collect();
    if asset_idx.is_empty() {
        return Err(Error::ColumnMismatch("no asset columns".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &i in &asset_idx {
        if !seen.insert(&names[i]) {
            return Err(Error::ColumnMismatch(format!("duplicate column `{}`", names[i])));
        }
    }

    let mut dates = Vec::new();
    let mut rows: Vec<f64> = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2;
        let row = row.map_err(|e| parse_err(line, e.to_string()))?;
        if row.len() != header.len() {
            return Err(Error::ColumnMismatch(format!(
                "line {line} has {} fields, header has {}",
                row.len(),
                header.len()
            )));
        }
        let date = row.get(0).unwrap_or("");
        validate_date(date, line)?;
        let mut parsed = Vec::with_capacity(names.len());
        for (c, name) in names.iter().enumerate() {
            let cell = row.get(c + 1).unwrap_or("").trim();
            if cell.is_empty() {
                return Err(Error::MissingValues {
                    row: line,
                    column: name.clone(),
                });
            }
            let v: f64 = cell.parse().map_err(|e| parse_err(line, format!("`{cell}` in `{name}`: {e}")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite value in `{name}`")));
            }
            parsed.push(v);
        }
        let rf = rf_idx.map_or(0.0, |i| parsed[i]);
        rows.extend(asset_idx.iter().map(|&i| parsed[i] - rf));
        dates.push(date.trim().to_string());
    }
    if dates.is_empty() {
        return Err(Error::EmptyInput);
    }
    let labels: Vec<String> = asset_idx.iter().map(|&i| names[i].clone()).collect();
    let values = DMatrix::from_row_slice(dates.len(), labels.len(), &rows);
    ReturnsPanel::new(labels, values)?.with_dates(dates)
}

/// Writes a returns panel as CSV; periods without dates are numbered.
pub fn returns_to_csv(panel: &ReturnsPanel) -> String {
    let mut out = String::from("date");
    for l in panel.labels() {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    let v = panel.values();
    for t in 0..panel.periods() {
        match panel.dates() {
            Some(d) => out.push_str(&d[t]),
            None => out.push_str(&t.to_string()),
        }
        for j in 0..panel.assets() {
            out.push(',');
            out.push_str(&format!("{}", v[(t, j)]));
        }
        out.push('\n');
    }
    out
}

/// Profiles CSV: header `omega,ASSET1,...`, one row per grid node.
pub fn profiles_to_csv(labels: &[String], profiles: &[SensitivityProfile]) -> String {
    let mut out = String::from("omega");
    for l in labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    if let Some(first) = profiles.first() {
        let g = first.grid();
        for k in 0..g.points() {
            out.push_str(&format!("{}", g.node(k)));
            for p in profiles {
                out.push(',');
                out.push_str(&format!("{}", p.density()[k]));
            }
            out.push('\n');
        }
    }
    out
}

/// Reads a profiles CSV written by [`profiles_to_csv`]. Nodes must be
/// uniformly spaced; each column is renormalized to unit mass.
pub fn load_profiles<R: Read>(source: R) -> Result<(Vec<String>, Vec<SensitivityProfile>)> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.get(0).map(str::trim) != Some("omega") {
        return Err(Error::ColumnMismatch("profiles CSV must start with an `omega` column".into()));
    }
    let labels: Vec<String> = header.iter().skip(1).map(|h| h.trim().to_string()).collect();
    if labels.is_empty() {
        return Err(Error::ColumnMismatch("no profile columns".into()));
    }
    let mut nodes = Vec::new();
    let mut columns = vec![Vec::new(); labels.len()];
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2;
        let row = row.map_err(|e| parse_err(line, e.to_string()))?;
        let parse = |c: usize| -> Result<f64> {
            let cell = row.get(c).unwrap_or("").trim();
            cell.parse::<f64>().map_err(|e| parse_err(line, format!("`{cell}`: {e}")))
        };
        nodes.push(parse(0)?);
        for (c, col) in columns.iter_mut().enumerate() {
            col.push(parse(c + 1)?);
        }
    }
    if nodes.len() < 2 {
        return Err(Error::TooFewPoints(nodes.len()));
    }
    let grid = build_grid(nodes[0], nodes[nodes.len() - 1], nodes.len())?;
    for (k, &x) in nodes.iter().enumerate() {
        if (x - grid.node(k)).abs() > 1e-9 * (1.0 + x.abs()) {
            return Err(parse_err(k + 2, format!("node {x} breaks uniform spacing")));
        }
    }
    let profiles = columns
        .into_iter()
        .map(|c| SensitivityProfile::normalized(grid, c))
        .collect::<Result<Vec<_>>>()?;
    Ok((labels, profiles))
}

/// Reads `asset,label` rows (header required) into a map.
pub fn load_labels<R: Read>(source: R) -> Result<BTreeMap<String, String>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let mut out = BTreeMap::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2;
        let row = row.map_err(|e| parse_err(line, e.to_string()))?;
        let asset = row.get(0).unwrap_or("").trim();
        let label = row.get(1).unwrap_or("").trim();
        if asset.is_empty() || label.is_empty() {
            return Err(parse_err(line, "expected `asset,label`"));
        }
        out.insert(asset.to_string(), label.to_string());
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(asset: &str, v: &[f64]) -> EmbeddingRecord {
        EmbeddingRecord {
            asset: asset.into(),
            vector: v.to_vec(),
        }
    }

    #[test]
    fn jsonl_records() {
        let src = "{\"asset\":\"AAA\",\"vector\":[1,2,3,4]}\n\n{\"asset\":\"AAA\",\"vector\":[0,1,0,1]}\n";
        let r = load_embeddings(src.as_bytes(), EmbeddingFormat::Jsonl).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[1].vector, vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn embedding_errors() {
        let src = "{\"asset\":\"A\",\"vector\":[1,2,3,4]}\n{\"asset\":\"B\",\"vector\":[1,2,3,4,5]}\n";
        assert!(matches!(
            load_embeddings(src.as_bytes(), EmbeddingFormat::Jsonl),
            Err(Error::DimensionMismatch { expected: 4, found: 5 })
        ));
        assert_eq!(load_embeddings("".as_bytes(), EmbeddingFormat::Jsonl), Err(Error::EmptyInput));
        assert_eq!(load_embeddings("".as_bytes(), EmbeddingFormat::Csv), Err(Error::EmptyInput));
        let bad = "{\"asset\":\"A\",\"vector\":[1,2]}\nnot json\n";
        assert!(matches!(
            load_embeddings(bad.as_bytes(), EmbeddingFormat::Jsonl),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn csv_records() {
        let src = "asset,v0,v1\nA,1,0\nB,0,1\n";
        let r = load_embeddings(src.as_bytes(), EmbeddingFormat::Csv).unwrap();
        assert_eq!(r, vec![rec("A", &[1.0, 0.0]), rec("B", &[0.0, 1.0])]);
        let bad = "asset,v0,v1\nA,1,x\n";
        assert!(matches!(
            load_embeddings(bad.as_bytes(), EmbeddingFormat::Csv),
            Err(Error::Parse { line: 2, .. })
        ));
        let mismatch = "asset,v0,v1\nA,1,0\nB,1\n";
        assert!(matches!(
            load_embeddings(mismatch.as_bytes(), EmbeddingFormat::Csv),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn aggregation() {
        let one = aggregate_embeddings(&[rec("A", &[0.5, -1.0])]).unwrap();
        assert_eq!(one[0].mean_vector, vec![0.5, -1.0]);
        assert_eq!(one[0].doc_count, 1);

        let three = aggregate_embeddings(&[rec("A", &[1.0, 2.0]), rec("A", &[3.0, -1.0]), rec("A", &[0.5, 0.5])]).unwrap();
        assert!((three[0].mean_vector[0] - 1.5).abs() < 1e-12);
        assert!((three[0].mean_vector[1] - 0.5).abs() < 1e-12);

        assert_eq!(
            aggregate_embeddings(&[rec("Z", &[1.0, -2.0]), rec("Z", &[-1.0, 2.0])]),
            Err(Error::ZeroNormAggregate("Z".into()))
        );
    }

    #[test]
    fn distance_matrix_from_vectors() {
        let assets = aggregate_embeddings(&[rec("B", &[0.0, 1.0]), rec("A", &[1.0, 0.0]), rec("C", &[2.0, 0.0])]).unwrap();
        let d = embedding_distance_matrix(&assets).unwrap();
        assert_eq!(d.labels(), &["A", "B", "C"]);
        assert!((d.get(0, 1) - 0.5).abs() < 1e-15);
        assert_eq!(d.get(0, 2), 0.0);
        assert!(matches!(embedding_distance_matrix(&assets[..1]), Err(Error::TooFewAssets { .. })));
    }

    #[test]
    fn returns_loading() {
        let src = "date,AAA,BBB,CCC\n2024-01-02,0.01,0.02,0.03\n2024-01-03,0.00,-0.01,0.02\n2024-01-04,0.01,0.01,0.01\n2024-01-05,-0.02,0.00,0.01\n";
        let p = load_returns(src.as_bytes(), None).unwrap();
        assert_eq!((p.periods(), p.assets()), (4, 3));

        let src = "date,AAA,RF,BBB\n2024-01-02,0.05,0.01,0.03\n2024-01-03,0.02,0.01,0.00\n";
        let p = load_returns(src.as_bytes(), Some("RF")).unwrap();
        assert_eq!(p.labels(), &["AAA", "BBB"]);
        assert!((p.values()[(0, 0)] - 0.04).abs() < 1e-15);
        assert!((p.values()[(1, 1)] + 0.01).abs() < 1e-15);
    }

    #[test]
    fn returns_errors() {
        let blank = "date,AAA,BBB\n2024-01-02,0.01,\n";
        assert_eq!(
            load_returns(blank.as_bytes(), None),
            Err(Error::MissingValues {
                row: 2,
                column: "BBB".into()
            })
        );
        let bad_date = "date,AAA\n02/01/2024,0.01\n";
        assert!(matches!(load_returns(bad_date.as_bytes(), None), Err(Error::Parse { line: 2, .. })));
        let short = "date,AAA,BBB\n2024-01-02,0.01\n";
        assert!(matches!(load_returns(short.as_bytes(), None), Err(Error::ColumnMismatch(_))));
        let no_rf = "date,AAA\n2024-01-02,0.01\n";
        assert!(matches!(load_returns(no_rf.as_bytes(), Some("RF")), Err(Error::ColumnMismatch(_))));
    }

    #[test]
    fn profiles_round_trip() {
        let g = build_grid(0.0, 1.0, 11).unwrap();
        let p = crate::grid::mixture_profile(g, &[crate::grid::MixtureComponent::new(1.0, 0.4, 0.2)]).unwrap();
        let csv = profiles_to_csv(&["X".to_string()], std::slice::from_ref(&p));
        let (labels, loaded) = load_profiles(csv.as_bytes()).unwrap();
        assert_eq!(labels, vec!["X"]);
        assert_eq!(loaded[0].grid(), p.grid());
        for (a, b) in loaded[0].density().iter().zip(p.density()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn labels_file() {
        let m = load_labels("asset,label\nA,tech\nB,energy\n".as_bytes()).unwrap();
        assert_eq!(m["B"], "energy");
        assert_eq!(load_labels("asset,label\n".as_bytes()), Err(Error::EmptyInput));
    }
}
