//! Deep dictionary learning.
//!
//! A deep dictionary model represents data as a nested synthesis
//! `X = D_1 phi(D_2 phi(... phi(D_N Z)))`: several levels of dictionaries
//! with an elementwise invertible nonlinearity between them, and a
//! coefficient matrix `Z` at the deepest level that serves as the learned
//! representation. This crate provides:
//!
//! - [`train::train_greedy`] — the layer-wise baseline: each level is fit by
//!   alternating least squares on the inverse-activated coefficients of the
//!   level above, with no feedback from deep to shallow.
//! - [`train::train_mm`] — the jointly optimized trainer: all levels are
//!   updated in one outer loop via a majorization-minimization surrogate, so
//!   reconstruction error at the top propagates into every level.
//! - [`model::FeatureExtractor`] — non-iterative test-phase features via a
//!   precomputed pseudoinverse cascade (one matrix product per level).
//! - [`knn`] — exact nearest-neighbor evaluation over extracted features.
//! - [`data`] — MNIST IDX and numeric CSV ingestion, seeded synthetic
//!   ground-truth generation, and the `.ddlm` model container.
//!
//! Everything is `f64` and deterministic: training draws no randomness, and
//! synthetic data uses a fixed, documented generator ([`rng::Rng`]), so runs
//! are reproducible bit for bit.
//!
//! # Quick start
//!
//! ```
//! use ddl::data::{gen_synthetic, SyntheticSpec};
//! use ddl::train::{train_mm, TrainConfig};
//! use ddl::model::extract_features;
//!
//! # fn main() -> ddl::Result<()> {
//! let spec = SyntheticSpec {
//!     input_dim: 20,
//!     layer_atoms: vec![10, 5],
//!     n_samples: 60,
//!     activation: "tanh".parse()?,
//!     coef_scale: 0.8,
//!     noise_sigma: 0.0,
//!     seed: 7,
//! };
//! let (x, _truth, _z_true) = gen_synthetic(&spec)?;
//!
//! let mut cfg = TrainConfig::new(vec![10, 5]);
//! cfg.outer_iters = 30;
//! let (model, features, trace) = train_mm(&x, &cfg)?;
//! assert_eq!(features.z.rows(), 5);
//! assert!(trace.objective_per_outer.last().unwrap().is_finite());
//!
//! // Non-iterative extraction on fresh samples.
//! let feats = extract_features(&model, &x)?;
//! assert_eq!(feats.z.cols(), 60);
//! # Ok(())
//! # }
//! ```
//!
//! The `examples/` directory has one runnable example per capability; the
//! thin `ddl` binary wraps the same APIs for shell use.

pub mod activation;
pub mod bench;
pub mod data;
pub mod error;
pub mod knn;
pub mod mat;
pub mod model;
pub mod rng;
pub mod train;

pub use activation::ActivationKind;
pub use error::{Error, Result};
pub use knn::{EvalReport, LabeledSet};
pub use mat::{Mat, SvdResult};
pub use model::{DdlModel, FeatureExtractor, FeatureSet};
pub use train::{TrainConfig, TrainTrace};
