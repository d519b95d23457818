//! Elementwise invertible nonlinearities applied between dictionary levels.
//!
//! Only invertible activations are supported: the training recursion and the
//! test-phase cascade both need the exact inverse. Inputs to the inverse are
//! clamped into the open interior of the range first (`EPS_CLAMP` away from
//! each boundary), because least-squares targets are unbounded and the
//! inverse must stay total.

use crate::error::{Error, Result};
use crate::mat::Mat;

/// Clamp margin applied before inversion.
pub const EPS_CLAMP: f64 = 1e-7;

/// The supported elementwise nonlinearities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationKind {
    /// phi(x) = x. Collapses a dictionary stack into a single product.
    Identity,
    /// phi(x) = tanh(x), range (-1, 1). The default everywhere.
    Tanh,
    /// phi(x) = 1 / (1 + e^-x), range (0, 1).
    Sigmoid,
}

impl ActivationKind {
    /// Lowercase name used in model files and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            ActivationKind::Identity => "identity",
            ActivationKind::Tanh => "tanh",
            ActivationKind::Sigmoid => "sigmoid",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(ActivationKind::Identity),
            "tanh" => Ok(ActivationKind::Tanh),
            "sigmoid" => Ok(ActivationKind::Sigmoid),
            other => Err(Error::InvalidArg {
                op: "ActivationKind::from_name",
                detail: format!(
                    "unknown activation '{}' (expected identity, tanh, or sigmoid)",
                    other
                ),
            }),
        }
    }

    #[inline]
    fn forward(&self, x: f64) -> f64 {
        match self {
            ActivationKind::Identity => x,
            ActivationKind::Tanh => x.tanh(),
            ActivationKind::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Inverse after clamping into the safe interior of the range.
    #[inline]
    fn backward(&self, y: f64) -> f64 {
        match self {
            ActivationKind::Identity => y,
            ActivationKind::Tanh => y.clamp(-1.0 + EPS_CLAMP, 1.0 - EPS_CLAMP).atanh(),
            ActivationKind::Sigmoid => {
                let c = y.clamp(EPS_CLAMP, 1.0 - EPS_CLAMP);
                (c / (1.0 - c)).ln()
            }
        }
    }
}

impl std::fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ActivationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ActivationKind::from_name(s)
    }
}

/// Applies phi elementwise. Shape is preserved.
pub fn apply(kind: ActivationKind, m: &Mat) -> Result<Mat> {
    m.check_finite("activation::apply")?;
    Ok(m.map(|x| kind.forward(x)))
}

/// Applies phi^-1 elementwise, after clamping `m` into the interior of the
/// range. Never produces NaN or infinity, whatever the input magnitude.
pub fn invert(kind: ActivationKind, m: &Mat) -> Result<Mat> {
    m.check_finite("activation::invert")?;
    Ok(m.map(|x| kind.backward(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tanh_of_zero_matrix_is_zero() {
        let m = Mat::zeros(3, 2);
        let out = apply(ActivationKind::Tanh, &m).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn identity_passes_through() {
        let m = Mat::from_fn(2, 3, |i, j| (i * 3 + j) as f64 - 2.5);
        let out = apply(ActivationKind::Identity, &m).unwrap();
        assert!(out.sub(&m).max_abs() == 0.0);
    }

    #[test]
    fn sigmoid_of_zero_is_half() {
        let m = Mat::zeros(1, 1);
        let out = apply(ActivationKind::Sigmoid, &m).unwrap();
        assert!((out[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn atanh_of_zero_is_zero() {
        let m = Mat::zeros(1, 1);
        let out = invert(ActivationKind::Tanh, &m).unwrap();
        assert_eq!(out[(0, 0)], 0.0);
    }

    #[test]
    fn atanh_of_half_is_half_ln_three() {
        let m = Mat::from_rows(&[vec![0.5]]).unwrap();
        let out = invert(ActivationKind::Tanh, &m).unwrap();
        let expected = 0.5 * 3.0f64.ln(); // atanh(x) = ln((1+x)/(1-x)) / 2
        assert!((out[(0, 0)] - expected).abs() < 1e-12);
        assert!((out[(0, 0)] - 0.549306).abs() < 1e-6);
    }

    #[test]
    fn out_of_range_input_is_clamped_finite() {
        let m = Mat::from_rows(&[vec![1.7]]).unwrap();
        let out = invert(ActivationKind::Tanh, &m).unwrap();
        let expected = (1.0 - EPS_CLAMP).atanh();
        assert!(out[(0, 0)].is_finite());
        assert!((out[(0, 0)] - expected).abs() < 1e-12);
    }

    #[test]
    fn activation_names_round_trip() {
        for kind in [
            ActivationKind::Identity,
            ActivationKind::Tanh,
            ActivationKind::Sigmoid,
        ] {
            assert_eq!(ActivationKind::from_name(kind.name()).unwrap(), kind);
        }
        assert!(ActivationKind::from_name("relu").is_err());
    }

    proptest! {
        /// invert(apply(m)) = m when the forward image stays clear of the
        /// range boundary.
        #[test]
        fn round_trip_within_safe_region(vals in prop::collection::vec(-5.0f64..5.0, 1..32)) {
            let n = vals.len();
            let m = Mat::new(1, n, vals).unwrap();
            for kind in [ActivationKind::Identity, ActivationKind::Tanh, ActivationKind::Sigmoid] {
                let fwd = apply(kind, &m).unwrap();
                let back = invert(kind, &fwd).unwrap();
                prop_assert!(back.sub(&m).max_abs() <= 1e-9, "{} round trip", kind);
            }
        }

        /// The clamped inverse is total: no NaN or infinity for any input.
        #[test]
        fn invert_total(vals in prop::collection::vec(-1e12f64..1e12, 1..32)) {
            let n = vals.len();
            let m = Mat::new(1, n, vals).unwrap();
            for kind in [ActivationKind::Identity, ActivationKind::Tanh, ActivationKind::Sigmoid] {
                let back = invert(kind, &m).unwrap();
                prop_assert!(back.check_finite("test").is_ok());
            }
        }

        /// phi preserves entrywise ordering.
        #[test]
        fn apply_monotone(a in -20.0f64..20.0, b in -20.0f64..20.0) {
            let lo = a.min(b);
            let hi = a.max(b);
            let m = Mat::new(1, 2, vec![lo, hi]).unwrap();
            for kind in [ActivationKind::Identity, ActivationKind::Tanh, ActivationKind::Sigmoid] {
                let out = apply(kind, &m).unwrap();
                prop_assert!(out[(0, 0)] <= out[(0, 1)], "{} monotone", kind);
            }
        }
    }
}
