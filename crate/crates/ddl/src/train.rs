//! The two trainers: greedy layer-wise alternating least squares, and the
//! jointly optimized majorization-minimization trainer that lets residual
//! information flow from shallow levels back into deep ones.
//!
//! Both trainers are deterministic. Initialization is by SVD level by level,
//! every dictionary column is re-normalized after every update, and
//! coefficients are never rescaled to compensate — the next least-squares
//! refit re-absorbs the scale.
//!
//! The MM trainer's outer sweep, per iteration:
//!
//! 1. refit `D_1` against `Z_1 = phi(D_2 phi(... phi(D_N Z)))` by plain
//!    least squares (no surrogate needed at the top level);
//! 2. for each middle level, build the Landweber-style target
//!    `B = u_k + (1/a) D^T (Y - D u_k)` around the current iterate
//!    `u_k = phi(D_i Z_i)`, pull it through `phi^-1`, and refit `D_i`;
//! 3. at the deepest level run a short alternating-least-squares loop for
//!    `D_N` and `Z` against `phi^-1(B_{N-1})`;
//! 4. record the reconstruction objective.
//!
//! The `a` in the target is the spectral bound of the level above,
//! recomputed from the current iterate every time, which is what makes the
//! surrogate a touching upper bound of the true objective.

use crate::activation::{self, ActivationKind};
use crate::error::{Error, Result};
use crate::mat::{lstsq_coef, lstsq_dict, normalize_columns, spectral_bound, truncated_svd, Mat};
use crate::model::{self, forward_tail, DdlModel, FeatureSet};
use std::time::Instant;

/// Layer widths, iteration schedule, and tolerances for a training run.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Dictionary widths per level, shallow to deep. Halving widths level
    /// over level is the usual choice.
    pub layer_atoms: Vec<usize>,
    pub activation: ActivationKind,
    /// Outer sweeps of the MM trainer.
    pub outer_iters: usize,
    /// ALS passes at the deepest level per outer sweep.
    pub deepest_iters: usize,
    /// Repeats of each middle-level update per outer sweep.
    pub middle_iters: usize,
    /// ALS passes per level for the greedy baseline.
    pub mod_iters: usize,
    /// Early stop when the relative objective change drops below this.
    pub stop_rel_tol: f64,
    /// Carried alongside for synthetic/reference runs; training itself is
    /// deterministic and never draws randomness.
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(layer_atoms: Vec<usize>) -> Self {
        TrainConfig {
            layer_atoms,
            activation: ActivationKind::Tanh,
            outer_iters: 100,
            deepest_iters: 10,
            middle_iters: 1,
            mod_iters: 10,
            stop_rel_tol: 1e-6,
            seed: 0,
        }
    }

    fn validate(&self, x: &Mat) -> Result<()> {
        if self.layer_atoms.is_empty() {
            return Err(Error::InfeasibleConfig("no layers requested".into()));
        }
        let mut rows = x.rows();
        for (i, &k) in self.layer_atoms.iter().enumerate() {
            if k < 1 {
                return Err(Error::InfeasibleConfig(format!(
                    "level {} has zero atoms",
                    i + 1
                )));
            }
            if k > rows.min(x.cols()) {
                return Err(Error::InfeasibleConfig(format!(
                    "level {} wants {} atoms but its input is {}x{}",
                    i + 1,
                    k,
                    rows,
                    x.cols()
                )));
            }
            rows = k;
        }
        Ok(())
    }
}

/// Objective value after each outer iteration, plus wall time.
#[derive(Debug, Clone)]
pub struct TrainTrace {
    pub objective_per_outer: Vec<f64>,
    /// Cumulative seconds elapsed when each objective was recorded.
    pub elapsed_per_outer: Vec<f64>,
    pub wall_seconds: f64,
    pub iters_run: usize,
}

/// Deterministic SVD initialization, level by level.
///
/// `Y_1 = X`; at each level the top-`k_i` left singular vectors become
/// `D_i` (their columns are already unit norm) and `S Vt` becomes the
/// coefficients, which are pulled through the clamped `phi^-1` to form the
/// next level's input. No randomness anywhere.
pub fn init_deterministic(x: &Mat, cfg: &TrainConfig) -> Result<(Vec<Mat>, Mat)> {
    x.check_finite("init_deterministic")?;
    cfg.validate(x)?;
    let n = cfg.layer_atoms.len();
    let mut dicts = Vec::with_capacity(n);
    let mut y = x.clone();
    let mut coeffs = Mat::zeros(0, 0);
    for (i, &k) in cfg.layer_atoms.iter().enumerate() {
        let svd = truncated_svd(&y, k)?;
        let mut c = svd.vt.clone();
        for r in 0..k {
            for col in 0..c.cols() {
                c[(r, col)] *= svd.s[r];
            }
        }
        dicts.push(svd.u);
        if i + 1 < n {
            y = activation::invert(cfg.activation, &c)?;
        }
        coeffs = c;
    }
    Ok((dicts, coeffs))
}

/// Landweber-style majorizer target
/// `B = u_k + (1/a) D^T (Y - D u_k)`.
///
/// `u_k` is the current value of `phi(D Z)` at the level below, `Y` the
/// level's fitting target, and `a` the spectral bound of `D`. Fitting the
/// next level to `B` in least squares minimizes the quadratic surrogate.
pub fn mm_target(y: &Mat, d: &Mat, u_k: &Mat, a: f64) -> Result<Mat> {
    y.check_finite("mm_target")?;
    d.check_finite("mm_target")?;
    u_k.check_finite("mm_target")?;
    if a <= 0.0 {
        return Err(Error::InvalidArg {
            op: "mm_target",
            detail: format!("a = {} must be positive", a),
        });
    }
    if d.rows() != y.rows() || d.cols() != u_k.rows() || y.cols() != u_k.cols() {
        return Err(Error::DimMismatch {
            op: "mm_target",
            detail: format!(
                "y {}x{}, d {}x{}, u_k {}x{}",
                y.rows(),
                y.cols(),
                d.rows(),
                d.cols(),
                u_k.rows(),
                u_k.cols()
            ),
        });
    }
    let resid = y.sub(&d.matmul(u_k));
    Ok(u_k.add(&d.transpose().matmul(&resid).scale(1.0 / a)))
}

/// The quadratic surrogate
/// `G_k(u) = ||Y - D u||_F^2 + sum_cols (u - u_k)^T (aI - D^T D) (u - u_k)`.
///
/// Touches the true objective at `u = u_k` and dominates it everywhere when
/// `a` is at least the largest eigenvalue of `D^T D`. Used by the test
/// suite; the trainer itself only needs [`mm_target`].
pub fn majorizer_value(y: &Mat, d: &Mat, u: &Mat, u_k: &Mat, a: f64) -> Result<f64> {
    y.check_finite("majorizer_value")?;
    d.check_finite("majorizer_value")?;
    u.check_finite("majorizer_value")?;
    u_k.check_finite("majorizer_value")?;
    let smax_sq = spectral_bound(d)? / (1.0 + 1e-6);
    if a < smax_sq * (1.0 - 1e-9) {
        return Err(Error::InvalidArg {
            op: "majorizer_value",
            detail: format!(
                "a = {} is below the spectral bound {:.6e}",
                a, smax_sq
            ),
        });
    }
    if !u.same_shape(u_k) || d.cols() != u.rows() || d.rows() != y.rows() || y.cols() != u.cols() {
        return Err(Error::DimMismatch {
            op: "majorizer_value",
            detail: "u, u_k, d, y shapes are inconsistent".into(),
        });
    }
    let fit = y.sub(&d.matmul(u)).frob_norm_sq();
    let diff = u.sub(u_k);
    let penalty = a * diff.frob_norm_sq() - d.matmul(&diff).frob_norm_sq();
    Ok(fit + penalty)
}

/// One run of alternating least squares against a fixed target `y`.
///
/// The pass order is: solve `Z` from the incoming dictionary, then
/// `iters` times (refit `D`, normalize its columns, resolve `Z`). With
/// `iters = 0` this degenerates to `(normalize_columns(d_init),
/// lstsq_coef(y, d_init))`. Ending each pass on the `Z` solve keeps the
/// returned pair consistent after normalization.
fn als_sweeps(y: &Mat, d_init: Mat, iters: usize) -> Result<(Mat, Mat)> {
    let mut z = lstsq_coef(y, &d_init)?;
    let mut d = if iters == 0 {
        normalize_columns(&d_init)?
    } else {
        d_init
    };
    for _ in 0..iters {
        d = normalize_columns(&lstsq_dict(y, &z)?)?;
        z = lstsq_coef(y, &d)?;
    }
    Ok((d, z))
}

/// Single-level dictionary learning by alternating exact least squares.
///
/// Returns `(D, Z)` with `D` column-normalized; each half-step is an exact
/// least-squares solve, so the level residual never increases across
/// iterations.
pub fn mod_als(y: &Mat, atoms: usize, iters: usize, d_init: Mat) -> Result<(Mat, Mat)> {
    y.check_finite("mod_als")?;
    d_init.check_finite("mod_als")?;
    if atoms > y.rows().min(y.cols()) || atoms < 1 {
        return Err(Error::InfeasibleConfig(format!(
            "{} atoms infeasible for a {}x{} target",
            atoms,
            y.rows(),
            y.cols()
        )));
    }
    if d_init.cols() != atoms || d_init.rows() != y.rows() {
        return Err(Error::DimMismatch {
            op: "mod_als",
            detail: format!(
                "d_init is {}x{}, expected {}x{}",
                d_init.rows(),
                d_init.cols(),
                y.rows(),
                atoms
            ),
        });
    }
    als_sweeps(y, d_init, iters)
}

/// Greedy layer-wise training.
///
/// Level 1 fits the data; each deeper level fits `phi^-1` of the previous
/// level's coefficients. Deeper levels never feed back into shallower ones.
/// The trace records the overall reconstruction objective once per level.
pub fn train_greedy(x: &Mat, cfg: &TrainConfig) -> Result<(DdlModel, FeatureSet, TrainTrace)> {
    x.check_finite("train_greedy")?;
    cfg.validate(x)?;
    let start = Instant::now();
    let n = cfg.layer_atoms.len();
    let mut dicts: Vec<Mat> = Vec::with_capacity(n);
    let mut objectives = Vec::with_capacity(n);
    let mut elapsed = Vec::with_capacity(n);
    let mut y = x.clone();
    let mut z = Mat::zeros(0, 0);
    for (i, &k) in cfg.layer_atoms.iter().enumerate() {
        let d_init = truncated_svd(&y, k)?.u;
        let (d, c) = mod_als(&y, k, cfg.mod_iters, d_init)?;
        d.check_finite("train_greedy").map_err(|_| level_blowup("train_greedy", i + 1, 0))?;
        c.check_finite("train_greedy").map_err(|_| level_blowup("train_greedy", i + 1, 0))?;
        dicts.push(d);
        let partial = DdlModel::new(dicts.clone(), cfg.activation)?;
        objectives.push(model::objective(&partial, &c, x)?);
        elapsed.push(start.elapsed().as_secs_f64());
        if i + 1 < n {
            y = activation::invert(cfg.activation, &c)?;
        }
        z = c;
    }
    let model = DdlModel::new(dicts, cfg.activation)?;
    let trace = TrainTrace {
        objective_per_outer: objectives,
        elapsed_per_outer: elapsed,
        wall_seconds: start.elapsed().as_secs_f64(),
        iters_run: n,
    };
    Ok((model, FeatureSet { z }, trace))
}

fn level_blowup(op: &'static str, level: usize, outer: usize) -> Error {
    Error::Numeric {
        op,
        detail: format!(
            "non-finite intermediate at level {} (outer iteration {})",
            level, outer
        ),
    }
}

/// Jointly optimized training by majorization-minimization.
///
/// All levels are updated inside one outer loop so that residual
/// information reaches the deep levels. Stops early when the relative
/// change of the objective drops below `cfg.stop_rel_tol`, otherwise runs
/// `cfg.outer_iters` sweeps. With a single level this degenerates to
/// [`mod_als`] on the data and produces bit-identical output for the same
/// iteration count.
pub fn train_mm(x: &Mat, cfg: &TrainConfig) -> Result<(DdlModel, FeatureSet, TrainTrace)> {
    x.check_finite("train_mm")?;
    cfg.validate(x)?;
    let start = Instant::now();
    let n = cfg.layer_atoms.len();
    let (mut dicts, mut z) = init_deterministic(x, cfg)?;
    let act = cfg.activation;

    let mut objectives = Vec::with_capacity(cfg.outer_iters);
    let mut elapsed = Vec::with_capacity(cfg.outer_iters);
    let mut j_prev = f64::INFINITY;
    let mut iters_run = 0;
    for outer in 0..cfg.outer_iters {
        if n == 1 {
            let (d, znew) = als_sweeps(x, dicts.remove(0), cfg.deepest_iters)?;
            dicts.push(d);
            z = znew;
        } else {
            // (1) Top level: plain least squares against the synthesized
            // coefficients, no surrogate needed.
            let z1 = forward_tail(&dicts[1..], &z, act)?;
            dicts[0] = normalize_columns(&lstsq_dict(x, &z1)?)?;
            dicts[0]
                .check_finite("train_mm")
                .map_err(|_| level_blowup("train_mm", 1, outer + 1))?;

            // (2)+(3) Walk the stack downward, carrying the level target
            // Y_{i-1} (Y_1 = X, thereafter phi^-1 of the previous B).
            let mut y_level = x.clone();
            for i in 2..=n {
                if i < n {
                    let zi = forward_tail(&dicts[i..], &z, act)?;
                    let mut y_next = y_level.clone();
                    for _ in 0..cfg.middle_iters.max(1) {
                        let a = spectral_bound(&dicts[i - 2])?;
                        let u_k = activation::apply(act, &dicts[i - 1].matmul(&zi))?;
                        let b = mm_target(&y_level, &dicts[i - 2], &u_k, a)?;
                        y_next = activation::invert(act, &b)?;
                        dicts[i - 1] = normalize_columns(&lstsq_dict(&y_next, &zi)?)?;
                        dicts[i - 1]
                            .check_finite("train_mm")
                            .map_err(|_| level_blowup("train_mm", i, outer + 1))?;
                    }
                    y_level = y_next;
                } else {
                    // Deepest level: target through the surrogate, then a
                    // short ALS loop for D_N and Z together.
                    let a = spectral_bound(&dicts[i - 2])?;
                    let u_k = activation::apply(act, &dicts[i - 1].matmul(&z))?;
                    let b = mm_target(&y_level, &dicts[i - 2], &u_k, a)?;
                    let t = activation::invert(act, &b)?;
                    let (d, znew) = als_sweeps(&t, dicts[i - 1].clone(), cfg.deepest_iters)?;
                    d.check_finite("train_mm")
                        .map_err(|_| level_blowup("train_mm", i, outer + 1))?;
                    znew.check_finite("train_mm")
                        .map_err(|_| level_blowup("train_mm", i, outer + 1))?;
                    dicts[i - 1] = d;
                    z = znew;
                }
            }
        }

        let snapshot = DdlModel::new(dicts.clone(), act)?;
        let j = model::objective(&snapshot, &z, x)?;
        if !j.is_finite() {
            return Err(Error::Numeric {
                op: "train_mm",
                detail: format!("objective became non-finite at outer iteration {}", outer + 1),
            });
        }
        objectives.push(j);
        elapsed.push(start.elapsed().as_secs_f64());
        iters_run = outer + 1;
        let rel = (j_prev - j).abs() / j_prev.abs().max(f64::MIN_POSITIVE);
        if rel < cfg.stop_rel_tol {
            break;
        }
        j_prev = j;
    }

    let model = DdlModel::new(dicts, act)?;
    let trace = TrainTrace {
        objective_per_outer: objectives,
        elapsed_per_outer: elapsed,
        wall_seconds: start.elapsed().as_secs_f64(),
        iters_run,
    };
    Ok((model, FeatureSet { z }, trace))
}
