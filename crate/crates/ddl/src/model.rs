//! The learned artifact: a stack of dictionaries with an activation between
//! levels, plus forward synthesis, the reconstruction objective, and the
//! non-iterative test-phase feature extractor.
//!
//! A model with dictionaries `D_1..D_N` synthesizes data as
//! `X = D_1 phi(D_2 phi(... phi(D_N Z)))` — the activation sits after every
//! level's product except the outermost one, which stays linear. Feature
//! extraction runs the cascade backwards with precomputed pseudoinverses:
//! `z_1 = D_1+ x`, then `z_i = D_i+ phi^-1(z_{i-1})` down to the deepest
//! level. No iteration is involved, just one matrix product per level.

use crate::activation::{self, ActivationKind};
use crate::error::{Error, Result};
use crate::mat::{self, Mat};

/// An ordered dictionary stack `D_1..D_N` plus the activation kind.
///
/// Immutable once built; all methods take `&self`, so a model can be shared
/// across threads freely.
#[derive(Debug, Clone, PartialEq)]
pub struct DdlModel {
    dicts: Vec<Mat>,
    activation: ActivationKind,
}

impl DdlModel {
    /// Validates chain compatibility (`D_i.cols == D_{i+1}.rows`) and
    /// finiteness, then assembles the model.
    pub fn new(dicts: Vec<Mat>, activation: ActivationKind) -> Result<Self> {
        if dicts.is_empty() {
            return Err(Error::InvalidArg {
                op: "DdlModel::new",
                detail: "a model needs at least one dictionary level".into(),
            });
        }
        for (i, d) in dicts.iter().enumerate() {
            d.check_finite("DdlModel::new")?;
            if d.is_empty() {
                return Err(Error::InvalidArg {
                    op: "DdlModel::new",
                    detail: format!("dictionary {} is empty", i + 1),
                });
            }
        }
        for i in 0..dicts.len() - 1 {
            if dicts[i].cols() != dicts[i + 1].rows() {
                return Err(Error::DimMismatch {
                    op: "DdlModel::new",
                    detail: format!(
                        "level {} has {} atoms but level {} has {} rows",
                        i + 1,
                        dicts[i].cols(),
                        i + 2,
                        dicts[i + 1].rows()
                    ),
                });
            }
        }
        Ok(DdlModel { dicts, activation })
    }

    pub fn dicts(&self) -> &[Mat] {
        &self.dicts
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    /// Number of dictionary levels N.
    pub fn n_levels(&self) -> usize {
        self.dicts.len()
    }

    /// Dimension of the data this model synthesizes (rows of `D_1`).
    pub fn input_dim(&self) -> usize {
        self.dicts[0].rows()
    }

    /// Width of the deepest level (rows of the coefficient matrix).
    pub fn feature_dim(&self) -> usize {
        self.dicts[self.dicts.len() - 1].cols()
    }

    /// Freezes the model for inference, precomputing every level's
    /// pseudoinverse once.
    pub fn extractor(&self) -> Result<FeatureExtractor> {
        FeatureExtractor::new(self)
    }
}

/// Deepest-level coefficients: one feature column per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub z: Mat,
}

/// Computes `phi(D_i phi(... phi(D_N z)))` over a suffix of the stack.
/// An empty suffix returns `z` unchanged.
pub(crate) fn forward_tail(dicts: &[Mat], z: &Mat, activation: ActivationKind) -> Result<Mat> {
    let mut cur = z.clone();
    for d in dicts.iter().rev() {
        if d.cols() != cur.rows() {
            return Err(Error::DimMismatch {
                op: "synthesize",
                detail: format!(
                    "dictionary has {} atoms but coefficients have {} rows",
                    d.cols(),
                    cur.rows()
                ),
            });
        }
        cur = activation::apply(activation, &d.matmul(&cur))?;
    }
    Ok(cur)
}

/// Forward synthesis `X = D_1 phi(D_2 phi(... phi(D_N Z)))`.
///
/// The outermost product is linear; phi wraps every deeper level.
pub fn synthesize(model: &DdlModel, z: &Mat) -> Result<Mat> {
    z.check_finite("synthesize")?;
    let deepest = &model.dicts[model.n_levels() - 1];
    if z.rows() != deepest.cols() {
        return Err(Error::DimMismatch {
            op: "synthesize",
            detail: format!(
                "coefficients have {} rows but the deepest level has {} atoms",
                z.rows(),
                deepest.cols()
            ),
        });
    }
    let inner = forward_tail(&model.dicts[1..], z, model.activation)?;
    Ok(model.dicts[0].matmul(&inner))
}

/// Reconstruction objective `J = ||X - synthesize(model, Z)||_F^2`.
pub fn objective(model: &DdlModel, z: &Mat, x: &Mat) -> Result<f64> {
    x.check_finite("objective")?;
    let xhat = synthesize(model, z)?;
    if !x.same_shape(&xhat) {
        return Err(Error::DimMismatch {
            op: "objective",
            detail: format!(
                "data is {}x{} but the model synthesizes {}x{}",
                x.rows(),
                x.cols(),
                xhat.rows(),
                xhat.cols()
            ),
        });
    }
    Ok(x.sub(&xhat).frob_norm_sq())
}

/// Inference handle with all pseudoinverse dictionaries precomputed.
///
/// Extraction is pure and per-column independent: extracting sample blocks
/// separately gives results identical to one batched call.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    pinvs: Vec<Mat>,
    activation: ActivationKind,
    input_dim: usize,
}

impl FeatureExtractor {
    pub fn new(model: &DdlModel) -> Result<Self> {
        let pinvs = model
            .dicts
            .iter()
            .map(mat::pinv)
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureExtractor {
            pinvs,
            activation: model.activation,
            input_dim: model.input_dim(),
        })
    }

    /// Pseudoinverse cascade: `z_1 = D_1+ x`, then
    /// `z_i = D_i+ phi^-1(z_{i-1})` for each deeper level. Exactly one
    /// matrix product per level; out-of-range intermediates are clamped by
    /// the activation's inverse rather than rejected.
    pub fn extract(&self, x: &Mat) -> Result<FeatureSet> {
        x.check_finite("extract_features")?;
        if x.rows() != self.input_dim {
            return Err(Error::DimMismatch {
                op: "extract_features",
                detail: format!(
                    "samples have {} rows but the model expects {}",
                    x.rows(),
                    self.input_dim
                ),
            });
        }
        let mut z = self.pinvs[0].matmul(x);
        for p in &self.pinvs[1..] {
            z = p.matmul(&activation::invert(self.activation, &z)?);
        }
        Ok(FeatureSet { z })
    }
}

/// One-shot convenience: builds the extractor and runs it.
///
/// When extracting repeatedly from the same model, build the
/// [`FeatureExtractor`] once instead.
pub fn extract_features(model: &DdlModel, x_test: &Mat) -> Result<FeatureSet> {
    model.extractor()?.extract(x_test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::normalize_columns;
    use crate::rng::Rng;

    fn random_mat(rng: &mut Rng, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(rows, cols, |_, _| rng.uniform_sym())
    }

    fn two_level_model(rng: &mut Rng, d0: usize, k1: usize, k2: usize, act: ActivationKind) -> DdlModel {
        let d1 = normalize_columns(&random_mat(rng, d0, k1)).unwrap();
        let d2 = normalize_columns(&random_mat(rng, k1, k2)).unwrap();
        DdlModel::new(vec![d1, d2], act).unwrap()
    }

    #[test]
    fn single_identity_level_passes_through() {
        let model = DdlModel::new(vec![Mat::identity(4)], ActivationKind::Tanh).unwrap();
        let z = Mat::from_fn(4, 3, |i, j| (i + j) as f64 - 2.0);
        let xhat = synthesize(&model, &z).unwrap();
        assert!(xhat.sub(&z).max_abs() == 0.0);
    }

    #[test]
    fn identity_activation_collapses_to_product() {
        let mut rng = Rng::new(3);
        let d1 = random_mat(&mut rng, 6, 4);
        let d2 = random_mat(&mut rng, 4, 2);
        let z = random_mat(&mut rng, 2, 5);
        let model = DdlModel::new(vec![d1.clone(), d2.clone()], ActivationKind::Identity).unwrap();
        let xhat = synthesize(&model, &z).unwrap();
        let direct = d1.matmul(&d2).matmul(&z);
        assert!(xhat.sub(&direct).max_abs() <= 1e-12);
    }

    /// Scalar-by-scalar brute-force evaluation of the two-level forward map.
    #[test]
    fn synthesize_matches_elementwise_oracle() {
        let mut rng = Rng::new(5);
        let model = two_level_model(&mut rng, 5, 3, 2, ActivationKind::Tanh);
        let z = random_mat(&mut rng, 2, 4);
        let xhat = synthesize(&model, &z).unwrap();

        let d1 = &model.dicts()[0];
        let d2 = &model.dicts()[1];
        for i in 0..5 {
            for j in 0..4 {
                let mut want = 0.0;
                for a in 0..3 {
                    let mut inner = 0.0;
                    for b in 0..2 {
                        inner += d2[(a, b)] * z[(b, j)];
                    }
                    want += d1[(i, a)] * inner.tanh();
                }
                assert!(
                    (xhat[(i, j)] - want).abs() <= 1e-12,
                    "entry ({}, {})",
                    i,
                    j
                );
            }
        }
    }

    #[test]
    fn objective_zero_at_perfect_reconstruction() {
        let mut rng = Rng::new(7);
        let model = two_level_model(&mut rng, 6, 4, 3, ActivationKind::Tanh);
        let z = random_mat(&mut rng, 3, 8);
        let x = synthesize(&model, &z).unwrap();
        assert_eq!(objective(&model, &z, &x).unwrap(), 0.0);
    }

    #[test]
    fn objective_of_null_model_is_data_energy() {
        let model = DdlModel::new(
            vec![Mat::zeros(3, 2).add(&Mat::from_fn(3, 2, |_, _| 0.0))],
            ActivationKind::Identity,
        );
        // Zero dictionaries are rejected as empty only when dims are zero;
        // an all-zero dictionary is legal.
        let model = model.unwrap();
        let mut rng = Rng::new(9);
        let z = random_mat(&mut rng, 2, 4);
        let x = random_mat(&mut rng, 3, 4);
        let j = objective(&model, &z, &x).unwrap();
        assert!((j - x.frob_norm_sq()).abs() <= 1e-12);
    }

    /// Naive double-loop residual oracle.
    #[test]
    fn objective_matches_naive_sum() {
        let mut rng = Rng::new(11);
        let model = two_level_model(&mut rng, 5, 3, 2, ActivationKind::Sigmoid);
        let z = random_mat(&mut rng, 2, 6);
        let x = random_mat(&mut rng, 5, 6);
        let j = objective(&model, &z, &x).unwrap();
        let xhat = synthesize(&model, &z).unwrap();
        let mut want = 0.0;
        for i in 0..5 {
            for jj in 0..6 {
                let r = x[(i, jj)] - xhat[(i, jj)];
                want += r * r;
            }
        }
        assert!((j - want).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn extract_orthonormal_single_level_is_transpose() {
        // 4x2 column-orthonormal dictionary.
        let d = Mat::from_rows(&[
            vec![1.0, 0.0],
            vec![0.0, 0.6],
            vec![0.0, 0.8],
            vec![0.0, 0.0],
        ])
        .unwrap();
        let model = DdlModel::new(vec![d.clone()], ActivationKind::Tanh).unwrap();
        let mut rng = Rng::new(13);
        let x = random_mat(&mut rng, 4, 5);
        let feats = extract_features(&model, &x).unwrap();
        let want = d.transpose().matmul(&x);
        assert!(feats.z.sub(&want).max_abs() <= 1e-12);
    }

    /// Linear two-level recovery of planted coefficients.
    #[test]
    fn extract_recovers_planted_linear() {
        let mut rng = Rng::new(17);
        let model = two_level_model(&mut rng, 10, 6, 3, ActivationKind::Identity);
        let z0 = random_mat(&mut rng, 3, 12);
        let x = synthesize(&model, &z0).unwrap();
        let feats = extract_features(&model, &x).unwrap();
        assert!(feats.z.sub(&z0).max_abs() <= 1e-8);
    }

    /// Forward-synthesis round trip through tanh in the unclamped regime.
    #[test]
    fn extract_recovers_planted_tanh() {
        let mut rng = Rng::new(19);
        let model = two_level_model(&mut rng, 10, 6, 3, ActivationKind::Tanh);
        // Small coefficients keep every intermediate well inside (-1, 1).
        let z0 = random_mat(&mut rng, 3, 12).scale(0.3);
        let x = synthesize(&model, &z0).unwrap();
        let feats = extract_features(&model, &x).unwrap();
        assert!(
            feats.z.sub(&z0).max_abs() <= 1e-6,
            "max err {:.3e}",
            feats.z.sub(&z0).max_abs()
        );
    }

    #[test]
    fn extraction_is_deterministic() {
        let mut rng = Rng::new(23);
        let model = two_level_model(&mut rng, 8, 5, 3, ActivationKind::Tanh);
        let x = random_mat(&mut rng, 8, 7);
        let a = extract_features(&model, &x).unwrap();
        let b = extract_features(&model, &x).unwrap();
        assert_eq!(a.z, b.z);
    }

    /// Column-by-column extraction equals the batched call exactly.
    #[test]
    fn extraction_per_sample_independence() {
        let mut rng = Rng::new(29);
        let model = two_level_model(&mut rng, 8, 5, 3, ActivationKind::Tanh);
        let x = random_mat(&mut rng, 8, 6);
        let extractor = model.extractor().unwrap();
        let batched = extractor.extract(&x).unwrap();
        for j in 0..6 {
            let single = extractor.extract(&x.columns(j, 1)).unwrap();
            for i in 0..batched.z.rows() {
                assert_eq!(single.z[(i, 0)], batched.z[(i, j)], "col {}", j);
            }
        }
    }

    #[test]
    fn chain_mismatch_is_rejected() {
        let d1 = Mat::zeros(4, 3);
        let d2 = Mat::zeros(2, 2); // should have 3 rows
        assert!(DdlModel::new(vec![d1, d2], ActivationKind::Tanh).is_err());
    }

    #[test]
    fn extract_rejects_wrong_input_dim() {
        let model = DdlModel::new(vec![Mat::identity(4)], ActivationKind::Tanh).unwrap();
        let x = Mat::zeros(3, 2);
        assert!(extract_features(&model, &x).is_err());
    }
}
