//! Dataset ingestion, synthetic generation, and model persistence.
//!
//! CLI-facing dataset strings name a source plus options:
//!
//! ```text
//! idx:<images-path>:<labels-path>[?opts]     MNIST-style IDX pair
//! csv:<path>[?opts]                          headered numeric CSV
//! <path ending in .csv>                      shorthand for csv:<path>
//! synth:<inline JSON SyntheticSpec>          generated on the fly
//! ```
//!
//! Options after `?`, separated by `&`: `label=<column-name>` (CSV only),
//! `limit=<n>` caps the sample count, `scale=none` disables the default
//! [0, 1] pixel scaling (IDX only).

pub mod csv_io;
pub mod idx;
pub mod model_file;
pub mod synth;

pub use csv_io::{read_csv_matrix, write_csv_matrix};
pub use idx::{read_idx, write_idx, Normalization};
pub use model_file::{load_model, save_model};
pub use synth::{gen_synthetic, SyntheticSpec};

use crate::error::{Error, Result};
use crate::knn::LabeledSet;
use crate::mat::Mat;
use std::path::PathBuf;

/// Loaded samples, with labels when the source provides them.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub features: Mat,
    pub labels: Option<Vec<usize>>,
}

impl Dataset {
    /// Converts into a [`LabeledSet`], failing when no labels are present.
    pub fn into_labeled(self) -> Result<LabeledSet> {
        match self.labels {
            Some(labels) => LabeledSet::new(self.features, labels),
            None => Err(Error::InvalidArg {
                op: "Dataset::into_labeled",
                detail: "this dataset has no labels (CSV needs ?label=<column>)".into(),
            }),
        }
    }
}

#[derive(Debug, Clone)]
enum Source {
    Idx { images: PathBuf, labels: PathBuf },
    Csv { path: PathBuf, label_column: Option<String> },
    Synthetic(SyntheticSpec),
}

/// A parsed dataset reference: source plus load-time options.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    source: Source,
    limit: Option<usize>,
    normalization: Normalization,
}

impl DatasetSpec {
    /// Parses a CLI dataset string (see the module docs for the grammar).
    pub fn parse(text: &str) -> Result<Self> {
        let usage = |detail: String| Error::InvalidArg {
            op: "DatasetSpec::parse",
            detail,
        };

        let (body, opts) = match text.split_once('?') {
            Some((b, o)) => (b, Some(o)),
            None => (text, None),
        };

        let mut limit = None;
        let mut normalization = Normalization::UnitInterval;
        let mut label_column = None;
        if let Some(opts) = opts {
            for pair in opts.split('&').filter(|p| !p.is_empty()) {
                match pair.split_once('=') {
                    Some(("limit", v)) => {
                        let n: usize = v
                            .parse()
                            .map_err(|_| usage(format!("bad limit '{}'", v)))?;
                        if n == 0 {
                            return Err(usage("limit must be at least 1".into()));
                        }
                        limit = Some(n);
                    }
                    Some(("label", v)) => label_column = Some(v.to_string()),
                    Some(("scale", "none")) => normalization = Normalization::None,
                    Some(("scale", "unit")) => normalization = Normalization::UnitInterval,
                    _ => return Err(usage(format!("unknown dataset option '{}'", pair))),
                }
            }
        }

        let source = if let Some(rest) = body.strip_prefix("idx:") {
            let (images, labels) = rest.split_once(':').ok_or_else(|| {
                usage("idx source needs two paths: idx:<images>:<labels>".into())
            })?;
            Source::Idx {
                images: PathBuf::from(images),
                labels: PathBuf::from(labels),
            }
        } else if let Some(rest) = body.strip_prefix("csv:") {
            Source::Csv {
                path: PathBuf::from(rest),
                label_column,
            }
        } else if let Some(json) = body.strip_prefix("synth:") {
            let spec: SyntheticSpec = serde_json::from_str(json)
                .map_err(|e| usage(format!("bad synthetic spec JSON: {}", e)))?;
            Source::Synthetic(spec)
        } else if body.ends_with(".csv") {
            Source::Csv {
                path: PathBuf::from(body),
                label_column,
            }
        } else {
            return Err(usage(format!(
                "cannot interpret dataset '{}' (expected idx:, csv:, synth:, or a .csv path)",
                body
            )));
        };

        Ok(DatasetSpec {
            source,
            limit,
            normalization,
        })
    }

    /// Loads (or generates) the referenced samples.
    pub fn load(&self) -> Result<Dataset> {
        let mut ds = match &self.source {
            Source::Idx { images, labels } => {
                let (features, labels) = read_idx(images, labels, self.normalization)?;
                Dataset {
                    features,
                    labels: Some(labels),
                }
            }
            Source::Csv { path, label_column } => {
                let (features, labels) = read_csv_matrix(path, label_column.as_deref())?;
                Dataset { features, labels }
            }
            Source::Synthetic(spec) => {
                let (features, _, _) = gen_synthetic(spec)?;
                Dataset {
                    features,
                    labels: None,
                }
            }
        };
        if let Some(limit) = self.limit {
            if limit < ds.features.cols() {
                ds.features = ds.features.columns(0, limit);
                ds.labels = ds.labels.map(|l| l[..limit].to_vec());
            }
        }
        Ok(ds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn parses_and_loads_csv_shorthand() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "a,b\n1,2\n3,4\n5,6\n").unwrap();
        let spec = DatasetSpec::parse(path.to_str().unwrap()).unwrap();
        let ds = spec.load().unwrap();
        assert_eq!(ds.features.cols(), 3);
        assert!(ds.labels.is_none());
    }

    #[test]
    fn csv_with_label_and_limit() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "x,cls\n1,0\n2,1\n3,0\n4,1\n").unwrap();
        let text = format!("csv:{}?label=cls&limit=2", path.display());
        let ds = DatasetSpec::parse(&text).unwrap().load().unwrap();
        assert_eq!(ds.features.cols(), 2);
        assert_eq!(ds.labels.unwrap(), vec![0, 1]);
    }

    #[test]
    fn idx_spec_loads_fixture() {
        let dir = tempdir().unwrap();
        let img = dir.path().join("i.idx");
        let lbl = dir.path().join("l.idx");
        write_idx(&img, &lbl, &[vec![255, 0, 0, 0], vec![0, 0, 0, 255]], 2, 2, &[1, 2]).unwrap();
        let text = format!("idx:{}:{}", img.display(), lbl.display());
        let ds = DatasetSpec::parse(&text).unwrap().load().unwrap();
        assert_eq!(ds.features.rows(), 4);
        assert_eq!(ds.labels.as_deref(), Some(&[1usize, 2][..]));
        assert_eq!(ds.features[(0, 0)], 1.0);

        let raw = format!("idx:{}:{}?scale=none", img.display(), lbl.display());
        let ds_raw = DatasetSpec::parse(&raw).unwrap().load().unwrap();
        assert_eq!(ds_raw.features[(0, 0)], 255.0);
    }

    #[test]
    fn synth_inline_json() {
        let text = r#"synth:{"input_dim":6,"layer_atoms":[3],"n_samples":10,"activation":"tanh","coef_scale":0.5,"noise_sigma":0.0,"seed":3}"#;
        let ds = DatasetSpec::parse(text).unwrap().load().unwrap();
        assert_eq!(ds.features.rows(), 6);
        assert_eq!(ds.features.cols(), 10);
    }

    #[test]
    fn bad_specs_are_usage_errors() {
        for bad in ["nope", "idx:only_one_path", "csv:x.csv?limit=0", "csv:x.csv?what=1"] {
            match DatasetSpec::parse(bad) {
                Err(e) => assert_eq!(e.exit_code(), 1, "{} should be a usage error", bad),
                Ok(_) => panic!("{} should not parse", bad),
            }
        }
    }
}
