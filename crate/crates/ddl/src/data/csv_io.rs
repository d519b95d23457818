//! Numeric CSV ingestion and emission.
//!
//! Layout convention: the first record is a header, each subsequent record
//! is one sample, and the loaded feature matrix is the transpose (columns
//! are samples). An optional label column, selected by header name, is
//! split out as integer class ids. Values are written with 17 significant
//! digits so a write/read round trip reproduces every `f64` exactly.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::train::TrainTrace;
use std::path::Path;

fn data_err(path: &Path, detail: String) -> Error {
    Error::Data {
        path: path.display().to_string(),
        detail,
    }
}

/// Reads a headered numeric CSV into `(features, labels)`.
///
/// File rows are samples and come back as matrix columns. When
/// `label_column` names a header, that column is parsed as integer labels;
/// ragged records and non-numeric cells are rejected with their position.
pub fn read_csv_matrix(path: &Path, label_column: Option<&str>) -> Result<(Mat, Option<Vec<usize>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| data_err(path, format!("cannot open: {}", e)))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| data_err(path, format!("bad header: {}", e)))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let n_cols = headers.len();
    if n_cols == 0 {
        return Err(data_err(path, "empty header".into()));
    }

    let label_idx = match label_column {
        Some(name) => Some(headers.iter().position(|h| h == name).ok_or_else(|| {
            data_err(
                path,
                format!("label column '{}' not found in header {:?}", name, headers),
            )
        })?),
        None => None,
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for (rec_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| data_err(path, format!("row {}: {}", rec_idx + 2, e)))?;
        if record.len() != n_cols {
            return Err(data_err(
                path,
                format!(
                    "ragged row {}: {} fields, header has {}",
                    rec_idx + 2,
                    record.len(),
                    n_cols
                ),
            ));
        }
        let mut row = Vec::with_capacity(n_cols - label_idx.map_or(0, |_| 1));
        for (col_idx, field) in record.iter().enumerate() {
            let field = field.trim();
            if Some(col_idx) == label_idx {
                let label: usize = field.parse().map_err(|_| {
                    data_err(
                        path,
                        format!(
                            "non-integer label '{}' at row {}, column {} ('{}')",
                            field,
                            rec_idx + 2,
                            col_idx + 1,
                            headers[col_idx]
                        ),
                    )
                })?;
                labels.push(label);
            } else {
                let value: f64 = field.parse().map_err(|_| {
                    data_err(
                        path,
                        format!(
                            "non-numeric cell '{}' at row {}, column {} ('{}')",
                            field,
                            rec_idx + 2,
                            col_idx + 1,
                            headers[col_idx]
                        ),
                    )
                })?;
                row.push(value);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(data_err(path, "no data rows".into()));
    }

    // Transpose: samples become columns.
    let dim = rows[0].len();
    let n = rows.len();
    let features = Mat::from_fn(dim, n, |i, j| rows[j][i]);
    Ok((features, label_idx.map(|_| labels)))
}

/// Formats one value with 17 significant digits (exact f64 round trip).
fn fmt_value(v: f64) -> String {
    format!("{:.16e}", v)
}

/// Writes a feature matrix as a headered CSV, one sample per row, with an
/// optional integer label column appended.
pub fn write_csv_matrix(path: &Path, features: &Mat, labels: Option<(&str, &[usize])>) -> Result<()> {
    if let Some((_, lbls)) = labels {
        if lbls.len() != features.cols() {
            return Err(Error::DimMismatch {
                op: "write_csv_matrix",
                detail: format!("{} labels for {} samples", lbls.len(), features.cols()),
            });
        }
    }
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| data_err(path, format!("cannot create: {}", e)))?;

    let mut header: Vec<String> = (0..features.rows()).map(|i| format!("f{}", i)).collect();
    if let Some((name, _)) = labels {
        header.push(name.to_string());
    }
    writer
        .write_record(&header)
        .map_err(|e| data_err(path, e.to_string()))?;

    for j in 0..features.cols() {
        let mut record: Vec<String> = (0..features.rows())
            .map(|i| fmt_value(features[(i, j)]))
            .collect();
        if let Some((_, lbls)) = labels {
            record.push(lbls[j].to_string());
        }
        writer
            .write_record(&record)
            .map_err(|e| data_err(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Writes a training trace as `outer_iter,objective,seconds`, one row per
/// recorded outer iteration (seconds are cumulative).
pub fn write_trace_csv(path: &Path, trace: &TrainTrace) -> Result<()> {
    let mut out = String::from("outer_iter,objective,seconds\n");
    for (i, (j, secs)) in trace
        .objective_per_outer
        .iter()
        .zip(&trace.elapsed_per_outer)
        .enumerate()
    {
        out.push_str(&format!("{},{},{:.6}\n", i + 1, fmt_value(*j), secs));
    }
    std::fs::write(path, out).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use tempfile::tempdir;

    #[test]
    fn three_samples_two_features() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "a,b\n1,2\n3,4\n5,6\n").unwrap();
        let (m, labels) = read_csv_matrix(&path, None).unwrap();
        assert!(labels.is_none());
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 3);
        assert_eq!(m[(0, 0)], 1.0);
        assert_eq!(m[(1, 2)], 6.0);
    }

    #[test]
    fn label_column_is_extracted() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "x,y,label\n0.5,1.5,0\n2.5,3.5,1\n").unwrap();
        let (m, labels) = read_csv_matrix(&path, Some("label")).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 2);
        assert_eq!(labels.unwrap(), vec![0, 1]);
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        let mut rng = Rng::new(77);
        let m = Mat::from_fn(5, 9, |_, _| rng.gaussian() * 1e3);
        write_csv_matrix(&path, &m, None).unwrap();
        let (back, _) = read_csv_matrix(&path, None).unwrap();
        assert!(back.same_shape(&m));
        assert_eq!(back, m, "17 significant digits must round-trip exactly");
    }

    #[test]
    fn labeled_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("lab.csv");
        let m = Mat::from_fn(3, 4, |i, j| (i * 4 + j) as f64 / 7.0);
        let labels = vec![1, 0, 2, 1];
        write_csv_matrix(&path, &m, Some(("label", &labels))).unwrap();
        let (back, back_labels) = read_csv_matrix(&path, Some("label")).unwrap();
        assert_eq!(back, m);
        assert_eq!(back_labels.unwrap(), labels);
    }

    #[test]
    fn ragged_row_is_reported() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rag.csv");
        std::fs::write(&path, "a,b\n1,2\n3\n").unwrap();
        match read_csv_matrix(&path, None) {
            Err(Error::Data { detail, .. }) => {
                assert!(detail.contains("ragged row 3"), "detail: {}", detail)
            }
            other => panic!("expected Data error, got {:?}", other),
        }
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "a,b\n1,2\n3,oops\n").unwrap();
        match read_csv_matrix(&path, None) {
            Err(Error::Data { detail, .. }) => {
                assert!(detail.contains("row 3"), "detail: {}", detail);
                assert!(detail.contains("column 2"), "detail: {}", detail);
            }
            other => panic!("expected Data error, got {:?}", other),
        }
    }

    #[test]
    fn missing_label_column_is_an_error() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("nolab.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_csv_matrix(&path, Some("class")).is_err());
    }
}
