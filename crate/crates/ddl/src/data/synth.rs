//! Seeded synthetic ground-truth generation.
//!
//! Builds a random model with unit-norm dictionary columns, draws
//! coefficients, and synthesizes data (optionally with additive Gaussian
//! noise). Because the generator is the portable [`crate::rng::Rng`], the
//! same spec yields bit-identical output everywhere, which makes planted
//! factors usable as recovery oracles in tests.

use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::mat::{normalize_columns, Mat};
use crate::model::{synthesize, DdlModel};
use crate::rng::Rng;
use serde::{Deserialize, Serialize};

/// Everything needed to generate one synthetic dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub input_dim: usize,
    pub layer_atoms: Vec<usize>,
    pub n_samples: usize,
    #[serde(with = "activation_name")]
    pub activation: ActivationKind,
    /// Standard deviation multiplier on the Gaussian coefficients.
    pub coef_scale: f64,
    /// Standard deviation of the additive observation noise (0 = noiseless).
    pub noise_sigma: f64,
    pub seed: u64,
}

mod activation_name {
    use super::ActivationKind;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(kind: &ActivationKind, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(kind.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ActivationKind, D::Error> {
        let name = String::deserialize(d)?;
        ActivationKind::from_name(&name).map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        if self.layer_atoms.is_empty() {
            return Err(Error::InfeasibleConfig("no layers in synthetic spec".into()));
        }
        let mut rows = self.input_dim;
        for (i, &k) in self.layer_atoms.iter().enumerate() {
            if k < 1 || rows < 1 {
                return Err(Error::InfeasibleConfig(format!(
                    "synthetic level {} is degenerate ({} rows, {} atoms)",
                    i + 1,
                    rows,
                    k
                )));
            }
            rows = k;
        }
        if self.n_samples < 1 {
            return Err(Error::InfeasibleConfig("n_samples must be positive".into()));
        }
        if !(self.coef_scale > 0.0) {
            return Err(Error::InfeasibleConfig(format!(
                "coef_scale = {} must be positive",
                self.coef_scale
            )));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::InfeasibleConfig(format!(
                "noise_sigma = {} must be nonnegative",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Generates `(X, ground-truth model, planted Z)` from a spec.
///
/// Dictionaries are uniform(-1, 1), column-normalized; coefficients are
/// `coef_scale * N(0,1)`; the data is the forward synthesis plus
/// `noise_sigma * N(0,1)`. Deterministic in the seed.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<(Mat, DdlModel, Mat)> {
    spec.validate()?;
    let mut rng = Rng::new(spec.seed);

    let mut dicts = Vec::with_capacity(spec.layer_atoms.len());
    let mut rows = spec.input_dim;
    for &k in &spec.layer_atoms {
        let raw = Mat::from_fn(rows, k, |_, _| rng.uniform_sym());
        dicts.push(normalize_columns(&raw)?);
        rows = k;
    }
    let model = DdlModel::new(dicts, spec.activation)?;

    let deepest = *spec.layer_atoms.last().unwrap();
    let z_true = Mat::from_fn(deepest, spec.n_samples, |_, _| {
        spec.coef_scale * rng.gaussian()
    });

    let mut x = synthesize(&model, &z_true)?;
    if spec.noise_sigma > 0.0 {
        let noise = Mat::from_fn(x.rows(), x.cols(), |_, _| spec.noise_sigma * rng.gaussian());
        x = x.add(&noise);
    }
    Ok((x, model, z_true))
}
