//! Exact nearest-neighbor classification over extracted deep features.
//!
//! The search is exhaustive: every test column is compared against every
//! training column under Euclidean distance. Tie-breaking is fully
//! deterministic — distance ties go to the lowest training index, vote ties
//! to the smallest class id — so predictions are reproducible and match a
//! brute-force oracle exactly.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::model::DdlModel;
use crate::rng::Rng;

/// Feature matrix (dim x samples) paired with integer class labels.
#[derive(Debug, Clone)]
pub struct LabeledSet {
    pub features: Mat,
    pub labels: Vec<usize>,
}

impl LabeledSet {
    pub fn new(features: Mat, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != features.cols() {
            return Err(Error::DimMismatch {
                op: "LabeledSet::new",
                detail: format!(
                    "{} labels for {} samples",
                    labels.len(),
                    features.cols()
                ),
            });
        }
        Ok(LabeledSet { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Seeded class-balanced subsample of `n_total` points (rounded down to
    /// a multiple of the class count when necessary). Within each class the
    /// selection order is a deterministic shuffle of that class's indices.
    pub fn balanced_subset(&self, n_total: usize, seed: u64) -> Result<LabeledSet> {
        if self.is_empty() {
            return Err(Error::InvalidArg {
                op: "balanced_subset",
                detail: "empty set".into(),
            });
        }
        let n_classes = self.labels.iter().max().unwrap() + 1;
        let per_class = n_total / n_classes;
        if per_class == 0 {
            return Err(Error::InvalidArg {
                op: "balanced_subset",
                detail: format!("{} samples cannot cover {} classes", n_total, n_classes),
            });
        }
        let mut rng = Rng::new(seed);
        let mut chosen: Vec<usize> = Vec::with_capacity(per_class * n_classes);
        for c in 0..n_classes {
            let mut idx: Vec<usize> = (0..self.len()).filter(|&i| self.labels[i] == c).collect();
            if idx.len() < per_class {
                return Err(Error::InvalidArg {
                    op: "balanced_subset",
                    detail: format!(
                        "class {} has only {} samples, need {}",
                        c,
                        idx.len(),
                        per_class
                    ),
                });
            }
            // Fisher-Yates on the class's index list.
            for i in (1..idx.len()).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                idx.swap(i, j);
            }
            chosen.extend_from_slice(&idx[..per_class]);
        }
        let features = Mat::from_fn(self.features.rows(), chosen.len(), |i, j| {
            self.features[(i, chosen[j])]
        });
        let labels = chosen.iter().map(|&i| self.labels[i]).collect();
        LabeledSet::new(features, labels)
    }
}

/// Classification report: accuracy plus the full confusion matrix
/// (`confusion[true][predicted]`).
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub accuracy: f64,
    pub n_test: usize,
    pub confusion: Vec<Vec<usize>>,
}

impl EvalReport {
    fn from_predictions(truth: &[usize], predicted: &[usize]) -> EvalReport {
        let n_classes = truth
            .iter()
            .chain(predicted.iter())
            .max()
            .map_or(0, |m| m + 1);
        let mut confusion = vec![vec![0usize; n_classes]; n_classes];
        let mut correct = 0usize;
        for (&t, &p) in truth.iter().zip(predicted) {
            confusion[t][p] += 1;
            if t == p {
                correct += 1;
            }
        }
        EvalReport {
            accuracy: correct as f64 / truth.len() as f64,
            n_test: truth.len(),
            confusion,
        }
    }
}

/// Predicts a label for every test column by majority vote among its `k`
/// nearest training columns under Euclidean distance.
///
/// Distance ties resolve toward the lowest training index; vote ties toward
/// the smallest class id.
pub fn knn_predict(train: &LabeledSet, test_features: &Mat, k: usize) -> Result<Vec<usize>> {
    train.features.check_finite("knn_predict")?;
    test_features.check_finite("knn_predict")?;
    if train.is_empty() {
        return Err(Error::InvalidArg {
            op: "knn_predict",
            detail: "empty training set".into(),
        });
    }
    if train.features.rows() != test_features.rows() {
        return Err(Error::DimMismatch {
            op: "knn_predict",
            detail: format!(
                "train has {} feature rows, test has {}",
                train.features.rows(),
                test_features.rows()
            ),
        });
    }
    if k < 1 || k > train.len() {
        return Err(Error::InvalidArg {
            op: "knn_predict",
            detail: format!("k = {} out of range [1, {}]", k, train.len()),
        });
    }

    let dim = train.features.rows();
    let n_train = train.len();
    let mut predictions = Vec::with_capacity(test_features.cols());
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(n_train);
    for t in 0..test_features.cols() {
        dists.clear();
        for j in 0..n_train {
            let mut d2 = 0.0;
            for i in 0..dim {
                let diff = test_features[(i, t)] - train.features[(i, j)];
                d2 += diff * diff;
            }
            dists.push((d2, j));
        }
        // (distance, training index) lexicographic order makes the k-subset
        // unique even with duplicated points.
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        let max_label = dists[..k]
            .iter()
            .map(|&(_, j)| train.labels[j])
            .max()
            .unwrap();
        let mut votes = vec![0usize; max_label + 1];
        for &(_, j) in &dists[..k] {
            votes[train.labels[j]] += 1;
        }
        let best = votes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(label, _)| label)
            .unwrap();
        predictions.push(best);
    }
    Ok(predictions)
}

/// Full evaluation protocol: extract deepest-level features for both raw
/// splits with the same frozen model, then classify the test split by k-NN
/// in feature space. Training labels are used only by the classifier.
pub fn evaluate(
    model: &DdlModel,
    train: &LabeledSet,
    test: &LabeledSet,
    k: usize,
) -> Result<EvalReport> {
    let extractor = model.extractor()?;
    let train_feats = extractor.extract(&train.features)?;
    let test_feats = extractor.extract(&test.features)?;
    let train_set = LabeledSet::new(train_feats.z, train.labels.clone())?;
    let predicted = knn_predict(&train_set, &test_feats.z, k)?;
    Ok(EvalReport::from_predictions(&test.labels, &predicted))
}
