//! Dense linear-algebra helpers shared by the vector-space constructions.
//!
//! Every matrix is stored as `DMatrix<Complex64>`. Real-field computations
//! (real embeddings, real beamformers) strip the imaginary part and run in
//! `f64` so that null spaces and eigenvectors come out real.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

/// Full-rank threshold on `sigma_min / sigma_max`.
pub const RANK_TOL: f64 = 1e-8;
/// Relative zero-forcing residual threshold.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Scalar field a construction operates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| c(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest absolute imaginary part relative to the largest entry magnitude.
pub fn imag_fraction(m: &CMat) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / scale
}

/// Singular values in descending order. Empty matrices have none.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// `sigma_min / sigma_max` over all `ncols` singular values; zero when the
/// matrix is wide (it cannot have full column rank).
pub fn column_rank_ratio(m: &CMat) -> f64 {
    if m.ncols() == 0 {
        return 1.0;
    }
    if m.nrows() < m.ncols() {
        return 0.0;
    }
    let s = singular_values(m);
    if s[0] == 0.0 {
        return 0.0;
    }
    s[s.len() - 1] / s[0]
}

/// `sigma_min / sigma_max` of a square matrix, or over `min(rows, cols)` values otherwise.
pub fn sigma_ratio(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        (Some(_), Some(_)) => 0.0,
        _ => 1.0,
    }
}

/// Number of singular values above `tol * sigma_max`.
pub fn numerical_rank(m: &CMat, tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&hi) if hi > 0.0 => s.iter().filter(|&&x| x > tol * hi).count(),
        _ => 0,
    }
}

/// Right singular vectors of `m` ordered by descending singular value, as the
/// columns of an `ncols x ncols` unitary matrix. Wide inputs are zero-padded.
fn right_singular_basis_complex(m: &CMat) -> (CMat, Vec<f64>) {
    let n = m.ncols();
    let rows = m.nrows().max(n);
    let mut padded = CMat::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..n).collect();
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap());
    let mut v = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            v[(r, dst)] = vt[(src, r)].conj();
        }
    }
    let sorted = order.iter().map(|&i| s[i]).collect();
    (v, sorted)
}

fn right_singular_basis_real(m: &RMat) -> (RMat, Vec<f64>) {
    let n = m.ncols();
    let rows = m.nrows().max(n);
    let mut padded = RMat::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap());
    let mut v = RMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            v[(r, dst)] = vt[(src, r)];
        }
    }
    let sorted = order.iter().map(|&i| s[i]).collect();
    (v, sorted)
}

/// Orthonormal basis of `{x : m x = 0}` (plain product, no conjugation).
///
/// With `dim = Some(k)` the `k` right singular vectors of smallest singular
/// value are returned regardless of tolerance; otherwise the numerical kernel
/// at `RANK_TOL` relative to `sigma_max`.
pub fn null_space(m: &CMat, field: Field, dim: Option<usize>) -> CMat {
    let n = m.ncols();
    let (basis, s) = match field {
        Field::Real => {
            let (v, s) = right_singular_basis_real(&real_part(m));
            (to_complex(&v), s)
        }
        Field::Complex => right_singular_basis_complex(m),
    };
    let k = match dim {
        Some(k) => k.min(n),
        None => {
            let hi = s.first().copied().unwrap_or(0.0);
            let rank = if m.nrows() == 0 || hi == 0.0 {
                0
            } else {
                s.iter().take(m.nrows().min(n)).filter(|&&x| x > RANK_TOL * hi).count()
            };
            n - rank
        }
    };
    basis.columns(n - k, k).into_owned()
}

/// Orthonormal basis of the column space of `m` at `RANK_TOL`.
pub fn column_space(m: &CMat, field: Field) -> CMat {
    let r = numerical_rank(m, RANK_TOL);
    if r == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    // Leading right singular vectors of m^H; the padded path avoids left
    // vectors, which nalgebra's complex SVD occasionally gets wrong.
    match field {
        Field::Real => to_complex(&right_singular_basis_real(&real_part(m).transpose()).0.columns(0, r).into_owned()),
        Field::Complex => right_singular_basis_complex(&m.adjoint()).0.columns(0, r).into_owned(),
    }
}

/// Horizontal concatenation; all blocks must share a row count.
pub fn hstack(blocks: &[&CMat]) -> CMat {
    let rows = blocks.first().map(|b| b.nrows()).unwrap_or(0);
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Vertical concatenation; all blocks must share a column count.
pub fn vstack(blocks: &[&CMat]) -> CMat {
    let cols = blocks.first().map(|b| b.ncols()).unwrap_or(0);
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(*b);
        at += b.nrows();
    }
    out
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Solves `a x = b` for square `a`, or `None` if `a` is numerically singular.
pub fn solve(a: &CMat, b: &CMat) -> Option<CMat> {
    if sigma_ratio(a) <= RANK_TOL {
        return None;
    }
    a.clone().lu().solve(b)
}

pub fn inverse(a: &CMat) -> Option<CMat> {
    solve(a, &identity(a.nrows()))
}

/// Scales every nonzero column to unit Euclidean norm.
pub fn normalize_columns(m: &mut CMat) {
    for mut col in m.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col.unscale_mut(n);
        }
    }
}

/// Eigenvalues of a square matrix via the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Unit eigenvector of `m` for eigenvalue `lambda`, taken as the smallest
/// right singular vector of `m - lambda I`. In the real field `lambda` is
/// rounded to its real part first.
pub fn eigenvector(m: &CMat, lambda: Complex64, field: Field) -> CMat {
    let n = m.nrows();
    let shift = match field {
        Field::Real => c(lambda.re, 0.0),
        Field::Complex => lambda,
    };
    let shifted = m - identity(n) * shift;
    null_space(&shifted, field, Some(1))
}

/// Standard normal matrix; complex entries are circularly symmetric with unit variance.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, field: Field) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = random_scalar(rng, field);
        }
    }
    m
}

pub fn random_scalar<R: Rng>(rng: &mut R, field: Field) -> Complex64 {
    match field {
        Field::Real => c(rng.sample(StandardNormal), 0.0),
        Field::Complex => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c(s * re, s * im)
        }
    }
}

/// Row-major serialisable form of a complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMat> for MatrixData {
    fn from(m: &CMat) -> Self {
        let mut re = Vec::with_capacity(m.len());
        let mut im = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        MatrixData { rows: m.nrows(), cols: m.ncols(), re, im }
    }
}

impl MatrixData {
    pub fn to_matrix(&self) -> Option<CMat> {
        if self.re.len() != self.rows * self.cols || self.im.len() != self.re.len() {
            return None;
        }
        Some(CMat::from_fn(self.rows, self.cols, |i, j| {
            let k = i * self.cols + j;
            c(self.re[k], self.im[k])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn null_space_of_wide_matrix_is_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for field in [Field::Real, Field::Complex] {
            let m = random_matrix(&mut rng, 3, 7, field);
            let k = null_space(&m, field, None);
            assert_eq!(k.ncols(), 4);
            assert!((&m * &k).norm() < 1e-12);
            let gram = k.adjoint() * &k;
            assert!((gram - identity(4)).norm() < 1e-12);
            if field == Field::Real {
                assert_eq!(imag_fraction(&k), 0.0);
            }
        }
    }

    #[test]
    fn rank_ratio_detects_dependence() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 5, 2, Field::Complex);
        let dup = hstack(&[&a, &a.columns(0, 1).into_owned()]);
        assert!(column_rank_ratio(&dup) < 1e-12);
        assert!(column_rank_ratio(&a) > RANK_TOL);
        assert_eq!(numerical_rank(&dup, RANK_TOL), 2);
    }

    #[test]
    fn eigenvector_matches_eigenvalue() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_matrix(&mut rng, 4, 4, Field::Complex);
        for lambda in eigenvalues(&m) {
            let v = eigenvector(&m, lambda, Field::Complex);
            let r = &m * &v - &v * lambda;
            assert!(r.norm() < 1e-9 * m.norm());
        }
    }

    #[test]
    fn matrix_data_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_matrix(&mut rng, 2, 3, Field::Complex);
        assert_eq!(MatrixData::from(&m).to_matrix().unwrap(), m);
    }
}
