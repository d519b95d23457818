//! Dense matrix kernels: least squares in both orientations, the
//! Moore-Penrose pseudoinverse, truncated SVD, spectral bounds, and column
//! normalization.
//!
//! Everything is `f64`. A [`Mat`] stores its entries row-major; columns are
//! samples (or atoms, or coefficient vectors) throughout the crate. All
//! public operations here are pure functions: they validate that inputs are
//! finite, never mutate their arguments, and are safe to call concurrently.
//!
//! Least squares and the pseudoinverse go through an SVD with a relative
//! singular-value cutoff of `sigma_max * 1e-12`; anything below the cutoff is
//! treated as zero, which yields the minimum-norm solution on rank-deficient
//! inputs instead of amplifying noise.

use crate::error::{Error, Result};

/// Relative singular-value cutoff for rank decisions in `pinv`/`lstsq_*`.
const SV_CUTOFF_REL: f64 = 1e-12;

/// Columns with norm below this are considered dead and replaced.
const DEAD_COL_TOL: f64 = 1e-12;

/// Safety factor on the spectral bound so `aI - D^T D` stays strictly
/// positive definite under floating-point ties.
const SPECTRAL_SAFETY: f64 = 1e-6;

/// Jacobi sweeps before declaring the SVD non-convergent.
const MAX_JACOBI_SWEEPS: usize = 64;

/// Dense real matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    /// Builds a matrix from row-major data. Fails if the length is wrong.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch {
                op: "Mat::new",
                detail: format!(
                    "data length {} does not match {} x {}",
                    data.len(),
                    rows,
                    cols
                ),
            });
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds from a slice of rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimMismatch {
                    op: "Mat::from_rows",
                    detail: format!("row {} has length {}, expected {}", i, row.len(), c),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Mat { rows: r, cols: c, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    /// Copies column `j` into a fresh vector.
    pub fn col(&self, j: usize) -> Vec<f64> {
        assert!(j < self.cols, "column {} out of range", j);
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Builds a matrix from a contiguous range of columns.
    pub fn columns(&self, start: usize, count: usize) -> Mat {
        assert!(start + count <= self.cols, "column range out of bounds");
        Mat::from_fn(self.rows, count, |i, j| self[(i, start + j)])
    }

    pub fn set_col(&mut self, j: usize, col: &[f64]) {
        assert_eq!(col.len(), self.rows, "column length mismatch");
        for i in 0..self.rows {
            self[(i, j)] = col[i];
        }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Matrix product via `matrixmultiply`. Panics on inner-dimension
    /// mismatch; callers on the public boundary validate shapes first.
    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Mat::zeros(self.rows, other.cols);
        if self.rows == 0 || self.cols == 0 || other.cols == 0 {
            return out;
        }
        unsafe {
            matrixmultiply::dgemm(
                self.rows,
                self.cols,
                other.cols,
                1.0,
                self.data.as_ptr(),
                self.cols as isize,
                1,
                other.data.as_ptr(),
                other.cols as isize,
                1,
                0.0,
                out.data.as_mut_ptr(),
                other.cols as isize,
                1,
            );
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert!(self.same_shape(other), "sub: shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert!(self.same_shape(other), "add: shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn same_shape(&self, other: &Mat) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Squared Frobenius norm.
    pub fn frob_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Largest absolute entry (0 for empty matrices).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn col_norm(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self[(i, j)] * self[(i, j)]).sum::<f64>().sqrt()
    }

    /// Verifies every entry is finite; names the first offender.
    pub fn check_finite(&self, op: &'static str) -> Result<()> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        op,
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        Ok(())
    }

}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Singular value decomposition, possibly truncated: `Y ~ U diag(S) Vt`.
///
/// `u` is column-orthonormal, `vt` row-orthonormal, and `s` is sorted
/// descending with no negative values.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Mat,
    pub s: Vec<f64>,
    pub vt: Mat,
}

/// Thin Householder QR of a tall matrix (rows >= cols): `a = Q R` with `Q`
/// column-orthonormal (m x n) and `R` upper triangular (n x n).
fn householder_qr(a: &Mat) -> (Mat, Mat) {
    let m = a.rows();
    let n = a.cols();
    debug_assert!(m >= n);
    let mut r = a.clone();
    // Reflector vectors, one per column, stored dense for the Q rebuild.
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut taus: Vec<f64> = Vec::with_capacity(n);

    for k in 0..n {
        let mut v = vec![0.0; m - k];
        let mut norm_sq = 0.0;
        for i in k..m {
            v[i - k] = r[(i, k)];
            norm_sq += r[(i, k)] * r[(i, k)];
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            vs.push(v);
            taus.push(0.0);
            continue;
        }
        // Sign chosen to avoid cancellation in v[0].
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let v_norm_sq: f64 = v.iter().map(|x| x * x).sum();
        if v_norm_sq == 0.0 {
            vs.push(v);
            taus.push(0.0);
            continue;
        }
        let tau = 2.0 / v_norm_sq;
        // Apply H = I - tau v v^T to the trailing block of R.
        for j in k..n {
            let mut dot = 0.0;
            for i in k..m {
                dot += v[i - k] * r[(i, j)];
            }
            let dot = dot * tau;
            for i in k..m {
                r[(i, j)] -= dot * v[i - k];
            }
        }
        vs.push(v);
        taus.push(tau);
    }

    // Q = H_0 H_1 ... H_{n-1} applied to the thin identity.
    let mut q = Mat::from_fn(m, n, |i, j| if i == j { 1.0 } else { 0.0 });
    for k in (0..n).rev() {
        if taus[k] == 0.0 {
            continue;
        }
        let v = &vs[k];
        for j in 0..n {
            let mut dot = 0.0;
            for i in k..m {
                dot += v[i - k] * q[(i, j)];
            }
            let dot = dot * taus[k];
            for i in k..m {
                q[(i, j)] -= dot * v[i - k];
            }
        }
    }
    // Zero the strictly-lower part left behind by the eliminations.
    for j in 0..n {
        for i in j + 1..m.min(n) {
            r[(i, j)] = 0.0;
        }
    }
    (q, Mat::from_fn(n, n, |i, j| r[(i, j)]))
}

/// One-sided Jacobi SVD of a square matrix: `w = U diag(S) V^T`.
///
/// Works on the columns of `w` (held row-wise for contiguous access),
/// rotating pairs until all are mutually orthogonal. Jacobi is slower than
/// bidiagonalization but computes small singular values to high relative
/// accuracy and has no trouble with exactly rank-deficient inputs.
fn jacobi_svd_square(w: &Mat, op: &'static str) -> Result<(Mat, Vec<f64>, Mat)> {
    let n = w.rows();
    debug_assert_eq!(n, w.cols());
    // Row i of `work` is column i of w; same layout for the accumulated V.
    let mut work = w.transpose();
    let mut vt = Mat::identity(n);

    // Columns below machine epsilon times the matrix scale carry singular
    // values indistinguishable from zero; rotating against them only churns
    // rounding noise and can cycle forever.
    let zero_floor = {
        let scale_sq = work.frob_norm_sq();
        scale_sq * f64::EPSILON * f64::EPSILON
    };

    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..n {
                    let wp = work[(p, i)];
                    let wq = work[(q, i)];
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if alpha <= zero_floor || beta <= zero_floor {
                    continue;
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let wp = work[(p, i)];
                    let wq = work[(q, i)];
                    work[(p, i)] = c * wp - s * wq;
                    work[(q, i)] = s * wp + c * wq;
                    let vp = vt[(p, i)];
                    let vq = vt[(q, i)];
                    vt[(p, i)] = c * vp - s * vq;
                    vt[(q, i)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric {
            op,
            detail: format!("Jacobi SVD did not converge in {} sweeps", MAX_JACOBI_SWEEPS),
        });
    }

    // Singular values are the column norms; normalized columns form U.
    let mut s: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| work[(j, i)] * work[(j, i)]).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap().then(a.cmp(&b)));
    s = order.iter().map(|&k| s[k]).collect();

    let mut u = Mat::zeros(n, n);
    let smax = s.first().copied().unwrap_or(0.0);
    let mut null_cols = Vec::new();
    for (j, &k) in order.iter().enumerate() {
        if s[j] > smax * f64::EPSILON && s[j] > 0.0 {
            let inv = 1.0 / s[j];
            for i in 0..n {
                u[(i, j)] = work[(k, i)] * inv;
            }
        } else {
            null_cols.push(j);
        }
    }
    // Columns for (numerically) zero singular values are arbitrary; fill
    // them with a deterministic orthonormal completion so U^T U = I holds.
    for &j in &null_cols {
        let mut placed = false;
        for cand in 0..n {
            let mut col: Vec<f64> = (0..n).map(|i| if i == cand { 1.0 } else { 0.0 }).collect();
            // Unfilled null columns are still zero, so projecting against
            // them is a no-op; only column j itself must be skipped.
            for jj in 0..n {
                if jj == j {
                    continue;
                }
                let proj: f64 = (0..n).map(|i| col[i] * u[(i, jj)]).sum();
                for i in 0..n {
                    col[i] -= proj * u[(i, jj)];
                }
            }
            let norm: f64 = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.5 {
                for i in 0..n {
                    u[(i, j)] = col[i] / norm;
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Numeric {
                op,
                detail: "failed to complete the null-space basis".into(),
            });
        }
    }

    let vt_sorted = Mat::from_fn(n, n, |i, j| vt[(order[i], j)]);
    Ok((u, s, vt_sorted))
}

/// Full thin SVD with singular triples sorted descending.
///
/// Tall or square inputs go through Householder QR, then a one-sided Jacobi
/// on the square factor; wide inputs are transposed first. Deterministic,
/// and correct on rank-deficient inputs (unlike bidiagonalized
/// implementations with tight deflation thresholds).
fn svd_sorted(m: &Mat, op: &'static str) -> Result<SvdResult> {
    if m.rows() < m.cols() {
        let t = svd_sorted(&m.transpose(), op)?;
        return Ok(SvdResult {
            u: t.vt.transpose(),
            s: t.s,
            vt: t.u.transpose(),
        });
    }
    let (q, r) = householder_qr(m);
    let (u_r, s, vt) = jacobi_svd_square(&r, op)?;
    Ok(SvdResult {
        u: q.matmul(&u_r),
        s,
        vt,
    })
}

/// Top-`k` singular triples of `y`.
///
/// Requires `1 <= k <= min(rows, cols)`. The returned `u` has `k` columns,
/// `s` has `k` values, `vt` has `k` rows, and `U diag(S) Vt` is the best
/// rank-`k` approximation of `y` in the Frobenius norm.
pub fn truncated_svd(y: &Mat, k: usize) -> Result<SvdResult> {
    y.check_finite("truncated_svd")?;
    let max_k = y.rows().min(y.cols());
    if k < 1 || k > max_k {
        return Err(Error::InvalidArg {
            op: "truncated_svd",
            detail: format!("k = {} out of range [1, {}]", k, max_k),
        });
    }
    let full = svd_sorted(y, "truncated_svd")?;
    Ok(SvdResult {
        u: full.u.columns(0, k),
        s: full.s[..k].to_vec(),
        vt: Mat::from_fn(k, y.cols(), |i, j| full.vt[(i, j)]),
    })
}

/// Moore-Penrose pseudoinverse via SVD with relative cutoff.
///
/// The result has shape `(d.cols x d.rows)` and satisfies the four Penrose
/// identities to numerical accuracy; singular values at or below
/// `sigma_max * 1e-12` are dropped, so rank-deficient inputs produce the
/// minimum-norm inverse.
pub fn pinv(d: &Mat) -> Result<Mat> {
    d.check_finite("pinv")?;
    if d.is_empty() {
        return Err(Error::InvalidArg {
            op: "pinv",
            detail: "empty matrix".into(),
        });
    }
    let svd = svd_sorted(d, "pinv")?;
    let cutoff = svd.s[0] * SV_CUTOFF_REL;
    // D+ = V diag(1/s) U^T over the retained spectrum.
    let r = svd.s.len();
    let mut v_scaled = Mat::zeros(d.cols(), r);
    for j in 0..r {
        if svd.s[j] > cutoff {
            let inv = 1.0 / svd.s[j];
            for i in 0..d.cols() {
                v_scaled[(i, j)] = svd.vt[(j, i)] * inv;
            }
        }
    }
    Ok(v_scaled.matmul(&svd.u.transpose()))
}

/// Least squares for the dictionary: minimizes `||Y - D Z||_F` over `D`.
///
/// Returns `D = Y Z+` of shape `(y.rows x z.rows)`. The residual is
/// orthogonal to the row space of `Z`: `(Y - D Z) Z^T ~ 0`.
pub fn lstsq_dict(y: &Mat, z: &Mat) -> Result<Mat> {
    y.check_finite("lstsq_dict")?;
    z.check_finite("lstsq_dict")?;
    if z.is_empty() {
        return Err(Error::InvalidArg {
            op: "lstsq_dict",
            detail: "empty coefficient matrix".into(),
        });
    }
    if y.cols() != z.cols() {
        return Err(Error::DimMismatch {
            op: "lstsq_dict",
            detail: format!(
                "y has {} columns but z has {} columns",
                y.cols(),
                z.cols()
            ),
        });
    }
    Ok(y.matmul(&pinv(z)?))
}

/// Least squares for the coefficients: minimizes `||Y - D Z||_F` over `Z`.
///
/// Returns `Z = D+ Y` of shape `(d.cols x y.cols)`. The residual lies in the
/// orthogonal complement of the column space of `D`: `D^T (Y - D Z) ~ 0`.
pub fn lstsq_coef(y: &Mat, d: &Mat) -> Result<Mat> {
    y.check_finite("lstsq_coef")?;
    d.check_finite("lstsq_coef")?;
    if y.rows() != d.rows() {
        return Err(Error::DimMismatch {
            op: "lstsq_coef",
            detail: format!("y has {} rows but d has {} rows", y.rows(), d.rows()),
        });
    }
    Ok(pinv(d)?.matmul(y))
}

/// Upper bound on the largest eigenvalue of `D^T D`.
///
/// Returns `sigma_max(D)^2 * (1 + 1e-6)`; the small inflation keeps
/// `aI - D^T D` strictly positive definite. An all-zero matrix yields `1e-6`
/// so the bound stays positive.
pub fn spectral_bound(d: &Mat) -> Result<f64> {
    d.check_finite("spectral_bound")?;
    if d.is_empty() {
        return Err(Error::InvalidArg {
            op: "spectral_bound",
            detail: "empty matrix".into(),
        });
    }
    let svd = svd_sorted(d, "spectral_bound")?;
    let smax = svd.s.first().copied().unwrap_or(0.0);
    let a = smax * smax * (1.0 + SPECTRAL_SAFETY);
    Ok(if a > 0.0 { a } else { SPECTRAL_SAFETY })
}

/// Rescales every column to unit l2 norm.
///
/// Columns with norm below `1e-12` are dead and cannot be normalized; they
/// are replaced by the coordinate vector `e_{j mod rows}` so the result is
/// deterministic and repeatable.
pub fn normalize_columns(d: &Mat) -> Result<Mat> {
    d.check_finite("normalize_columns")?;
    let mut out = d.clone();
    for j in 0..d.cols() {
        let norm = d.col_norm(j);
        if norm < DEAD_COL_TOL {
            for i in 0..d.rows() {
                out[(i, j)] = 0.0;
            }
            if d.rows() > 0 {
                out[(j % d.rows(), j)] = 1.0;
            }
        } else {
            let inv = 1.0 / norm;
            for i in 0..d.rows() {
                out[(i, j)] *= inv;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn random_mat(rng: &mut Rng, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(rows, cols, |_, _| rng.uniform_sym())
    }

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!(
            (a - b).abs() <= tol,
            "{}: {} vs {} (diff {:.3e})",
            what,
            a,
            b,
            (a - b).abs()
        );
    }

    #[test]
    fn lstsq_dict_identity_coefficients() {
        let y = Mat::from_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let z = Mat::identity(2);
        let d = lstsq_dict(&y, &z).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_close(d[(i, j)], y[(i, j)], 1e-12, "D entry");
            }
        }
    }

    #[test]
    fn lstsq_dict_zero_coefficients_gives_zero() {
        let z = Mat::zeros(2, 4);
        let y = Mat::from_fn(2, 4, |i, j| (i + j) as f64 + 1.0);
        let d = lstsq_dict(&y, &z).unwrap();
        assert_eq!(d.rows(), 2);
        assert_eq!(d.cols(), 2);
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn lstsq_dict_recovers_planted_factor() {
        let mut rng = Rng::new(11);
        let d0 = random_mat(&mut rng, 8, 4);
        let z = random_mat(&mut rng, 4, 50);
        let y = d0.matmul(&z);
        let d = lstsq_dict(&y, &z).unwrap();
        for i in 0..8 {
            for j in 0..4 {
                assert_close(d[(i, j)], d0[(i, j)], 1e-8, "recovered D");
            }
        }
    }

    #[test]
    fn lstsq_coef_identity_dictionary() {
        let y = Mat::from_fn(3, 5, |i, j| (i * 5 + j) as f64 - 7.0);
        let z = lstsq_coef(&y, &Mat::identity(3)).unwrap();
        for i in 0..3 {
            for j in 0..5 {
                assert_close(z[(i, j)], y[(i, j)], 1e-12, "Z entry");
            }
        }
    }

    #[test]
    fn lstsq_coef_mean_projection() {
        let d = Mat::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let y = Mat::from_rows(&[vec![1.0], vec![3.0]]).unwrap();
        let z = lstsq_coef(&y, &d).unwrap();
        assert_eq!(z.rows(), 1);
        assert_eq!(z.cols(), 1);
        assert_close(z[(0, 0)], 2.0, 1e-12, "mean projection");
    }

    #[test]
    fn lstsq_coef_recovers_planted_coefficients() {
        let mut rng = Rng::new(13);
        let d = random_mat(&mut rng, 10, 4);
        let z0 = random_mat(&mut rng, 4, 30);
        let y = d.matmul(&z0);
        let z = lstsq_coef(&y, &d).unwrap();
        for i in 0..4 {
            for j in 0..30 {
                assert_close(z[(i, j)], z0[(i, j)], 1e-8, "recovered Z");
            }
        }
    }

    #[test]
    fn lstsq_rejects_mismatched_shapes() {
        let y = Mat::zeros(3, 5);
        let z = Mat::zeros(2, 4);
        assert!(lstsq_dict(&y, &z).is_err());
        let d = Mat::zeros(4, 2);
        assert!(lstsq_coef(&y, &d).is_err());
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut y = Mat::zeros(2, 2);
        y[(1, 0)] = f64::NAN;
        match lstsq_dict(&y, &Mat::identity(2)) {
            Err(Error::NonFinite { row: 1, col: 0, .. }) => {}
            other => panic!("expected NonFinite, got {:?}", other),
        }
    }

    #[test]
    fn pinv_diagonal() {
        let d = Mat::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let p = pinv(&d).unwrap();
        assert_close(p[(0, 0)], 0.5, 1e-12, "1/2");
        assert_close(p[(1, 1)], 0.25, 1e-12, "1/4");
        assert_close(p[(0, 1)], 0.0, 1e-12, "off diag");
    }

    #[test]
    fn pinv_orthonormal_is_transpose() {
        // Columns of a 3x2 orthonormal frame.
        let d = Mat::from_rows(&[
            vec![1.0, 0.0],
            vec![0.0, 3.0 / 5.0],
            vec![0.0, 4.0 / 5.0],
        ])
        .unwrap();
        let p = pinv(&d).unwrap();
        let dt = d.transpose();
        for i in 0..2 {
            for j in 0..3 {
                assert_close(p[(i, j)], dt[(i, j)], 1e-12, "pinv = transpose");
            }
        }
    }

    #[test]
    fn pinv_full_rank_left_inverse() {
        let mut rng = Rng::new(17);
        let d = random_mat(&mut rng, 7, 3);
        let p = pinv(&d).unwrap();
        let pd = p.matmul(&d);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_close(pd[(i, j)], want, 1e-10, "D+ D = I");
            }
        }
    }

    /// All four Penrose identities, on full-rank and rank-deficient inputs.
    #[test]
    fn pinv_penrose_identities() {
        let mut rng = Rng::new(23);
        for case in 0..20 {
            let (m, n) = (3 + case % 5, 2 + case % 4);
            let mut d = random_mat(&mut rng, m, n);
            if case % 3 == 0 && n >= 2 {
                // Force rank deficiency: last column = first column.
                let c0 = d.col(0);
                d.set_col(n - 1, &c0);
            }
            let p = pinv(&d).unwrap();
            let dpd = d.matmul(&p).matmul(&d);
            let pdp = p.matmul(&d).matmul(&p);
            let dp = d.matmul(&p);
            let pd = p.matmul(&d);
            assert!(dpd.sub(&d).max_abs() < 1e-9, "D D+ D = D (case {})", case);
            assert!(pdp.sub(&p).max_abs() < 1e-9, "D+ D D+ = D+ (case {})", case);
            assert!(
                dp.sub(&dp.transpose()).max_abs() < 1e-9,
                "(D D+) symmetric (case {})",
                case
            );
            assert!(
                pd.sub(&pd.transpose()).max_abs() < 1e-9,
                "(D+ D) symmetric (case {})",
                case
            );
        }
    }

    #[test]
    fn truncated_svd_diagonal() {
        let y = Mat::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let svd = truncated_svd(&y, 1).unwrap();
        assert_eq!(svd.s.len(), 1);
        assert_close(svd.s[0], 3.0, 1e-12, "top singular value");
        assert_close(svd.u[(0, 0)].abs(), 1.0, 1e-12, "u = +-e1");
        assert_close(svd.u[(1, 0)].abs(), 0.0, 1e-12, "u = +-e1");
    }

    #[test]
    fn truncated_svd_exact_rank_one() {
        let a = [1.0, -2.0, 0.5];
        let b = [3.0, 1.0, -1.0, 2.0];
        let y = Mat::from_fn(3, 4, |i, j| a[i] * b[j]);
        let svd = truncated_svd(&y, 1).unwrap();
        let recon = svd
            .u
            .matmul(&Mat::from_fn(1, 1, |_, _| svd.s[0]))
            .matmul(&svd.vt);
        assert!(y.sub(&recon).frob_norm_sq().sqrt() <= 1e-10);
    }

    #[test]
    fn truncated_svd_orthonormal_factors() {
        let mut rng = Rng::new(31);
        let y = random_mat(&mut rng, 9, 6);
        let svd = truncated_svd(&y, 4).unwrap();
        let utu = svd.u.transpose().matmul(&svd.u);
        let vvt = svd.vt.matmul(&svd.vt.transpose());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_close(utu[(i, j)], want, 1e-10, "U^T U");
                assert_close(vvt[(i, j)], want, 1e-10, "Vt Vt^T");
            }
        }
        for w in svd.s.windows(2) {
            assert!(w[0] >= w[1], "singular values descending");
        }
    }

    #[test]
    fn truncated_svd_k_out_of_range() {
        let y = Mat::zeros(3, 4);
        assert!(truncated_svd(&y, 0).is_err());
        assert!(truncated_svd(&y, 4).is_err());
    }

    #[test]
    fn spectral_bound_identity_and_scaled() {
        let a = spectral_bound(&Mat::identity(3)).unwrap();
        assert_close(a, 1.0, 1e-5, "identity bound");
        let a4 = spectral_bound(&Mat::identity(2).scale(2.0)).unwrap();
        assert_close(a4, 4.0, 1e-4, "scaled identity bound");
    }

    #[test]
    fn spectral_bound_zero_matrix() {
        let a = spectral_bound(&Mat::zeros(3, 2)).unwrap();
        assert!(a > 0.0);
        assert_close(a, 1e-6, 1e-18, "zero matrix fallback");
    }

    /// Dominance: a >= ||Dx||^2 / ||x||^2 for random unit vectors.
    #[test]
    fn spectral_bound_dominates_rayleigh_quotients() {
        let mut rng = Rng::new(37);
        let d = random_mat(&mut rng, 6, 4);
        let a = spectral_bound(&d).unwrap();
        for _ in 0..100 {
            let x = Mat::from_fn(4, 1, |_, _| rng.uniform_sym());
            let num = d.matmul(&x).frob_norm_sq();
            let den = x.frob_norm_sq();
            if den > 0.0 {
                assert!(a >= num / den, "bound must dominate Rayleigh quotient");
            }
        }
    }

    #[test]
    fn normalize_columns_three_four_five() {
        let d = Mat::from_rows(&[vec![3.0, 0.0], vec![4.0, 0.0]]).unwrap();
        let n = normalize_columns(&d).unwrap();
        assert_close(n[(0, 0)], 0.6, 1e-15, "3/5");
        assert_close(n[(1, 0)], 0.8, 1e-15, "4/5");
        // Dead column 1 -> e_{1 mod 2} = e_1 (second coordinate).
        assert_close(n[(0, 1)], 0.0, 0.0, "dead col");
        assert_close(n[(1, 1)], 1.0, 0.0, "dead col replacement");
    }

    #[test]
    fn normalize_columns_idempotent_on_unit_norm() {
        let d = Mat::from_rows(&[vec![0.6, 0.0], vec![0.8, 1.0]]).unwrap();
        let n = normalize_columns(&d).unwrap();
        assert!(n.sub(&d).max_abs() <= 1e-15);
    }

    #[test]
    fn normalize_columns_random_unit_norms() {
        let mut rng = Rng::new(41);
        let d = random_mat(&mut rng, 5, 3);
        let n = normalize_columns(&d).unwrap();
        for j in 0..3 {
            assert_close(n.col_norm(j), 1.0, 1e-12, "unit column");
        }
    }

    /// Residual orthogonality for both least-squares orientations over many
    /// well-conditioned instances.
    #[test]
    fn lstsq_residual_orthogonality() {
        let mut rng = Rng::new(43);
        for case in 0..100 {
            let m = 4 + case % 6;
            let k = 2 + case % 3;
            let n = 8 + case % 9;
            let y = random_mat(&mut rng, m, n);
            let z = random_mat(&mut rng, k, n);
            let d = lstsq_dict(&y, &z).unwrap();
            let resid = y.sub(&d.matmul(&z));
            let lhs = resid.matmul(&z.transpose()).max_abs();
            assert!(
                lhs <= 1e-8 * y.max_abs().max(1.0),
                "dict residual orthogonality (case {}): {:.3e}",
                case,
                lhs
            );

            let dd = random_mat(&mut rng, m, k);
            let zc = lstsq_coef(&y, &dd).unwrap();
            let resid2 = y.sub(&dd.matmul(&zc));
            let lhs2 = dd.transpose().matmul(&resid2).max_abs();
            assert!(
                lhs2 <= 1e-8 * y.max_abs().max(1.0),
                "coef residual orthogonality (case {}): {:.3e}",
                case,
                lhs2
            );
        }
    }

    /// Truncated SVD reconstruction error is non-increasing in k.
    #[test]
    fn truncated_svd_error_monotone_in_k() {
        let mut rng = Rng::new(47);
        let y = random_mat(&mut rng, 8, 10);
        let mut prev = f64::INFINITY;
        for k in 1..=8 {
            let svd = truncated_svd(&y, k).unwrap();
            let mut sm = Mat::zeros(k, k);
            for i in 0..k {
                sm[(i, i)] = svd.s[i];
            }
            let err = y.sub(&svd.u.matmul(&sm).matmul(&svd.vt)).frob_norm_sq();
            assert!(err <= prev + 1e-12, "error must not grow with k");
            prev = err;
        }
    }
}
