//! Closed-form 2×2 linear algebra.
//!
//! Everything here is non-iterative: singular values come from the two
//! invariants of the matrix, the polar factor from `F + cof F`, and the
//! symmetric logarithm/exponential from the spectral projector form
//! `f(X) = a·1 + b·(X − ½tr X·1)`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Asymmetry accepted by [`log_spd`] before it refuses the input.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// A real 2×2 matrix stored row-major: `[m00, m01, m10, m11]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2(pub [f64; 4]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([1.0, 0.0, 0.0, 1.0]);
    pub const ZERO: Mat2 = Mat2([0.0; 4]);

    pub const fn new(m00: f64, m01: f64, m10: f64, m11: f64) -> Self {
        Mat2([m00, m01, m10, m11])
    }

    pub const fn diag(d0: f64, d1: f64) -> Self {
        Mat2([d0, 0.0, 0.0, d1])
    }

    /// Counterclockwise rotation by `angle` radians.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Mat2([c, -s, s, c])
    }

    /// Matrix whose columns are `c0` and `c1`.
    pub fn from_cols(c0: [f64; 2], c1: [f64; 2]) -> Self {
        Mat2([c0[0], c1[0], c0[1], c1[1]])
    }

    /// Rank-one matrix `u ⊗ v = u vᵀ`.
    pub fn outer(u: [f64; 2], v: [f64; 2]) -> Self {
        Mat2([u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]])
    }

    pub fn transpose(&self) -> Self {
        let [a, b, c, d] = self.0;
        Mat2([a, c, b, d])
    }

    pub fn det(&self) -> f64 {
        let [a, b, c, d] = self.0;
        a * d - b * c
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[3]
    }

    /// Cofactor matrix, `det(F)·F⁻ᵀ` for invertible `F`.
    pub fn cofactor(&self) -> Self {
        let [a, b, c, d] = self.0;
        Mat2([d, -c, -b, a])
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let [a, b, c, d] = self.0;
        Some(Mat2([d / det, -b / det, -c / det, a / det]))
    }

    /// `F⁻ᵀ`.
    pub fn inverse_transpose(&self) -> Option<Self> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(self.cofactor() * (1.0 / det))
    }

    /// Frobenius inner product `⟨A, B⟩ = tr(AᵀB)`.
    pub fn dot(&self, other: &Mat2) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(x, y)| x * y).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn sym(&self) -> Self {
        let off = 0.5 * (self.0[1] + self.0[2]);
        Mat2([self.0[0], off, off, self.0[3]])
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        let [a, b, c, d] = self.0;
        [a * v[0] + b * v[1], c * v[0] + d * v[1]]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Mat2(self.0.map(f))
    }

    /// Largest absolute entry of `self − other` divided by `1 + max|other|`.
    pub fn rel_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs() / (1.0 + other.max_abs())
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < 2 && j < 2, "Mat2 index ({i}, {j}) out of range");
        &self.0[2 * i + j]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self.0;
        out.iter_mut().zip(rhs.0).for_each(|(x, y)| *x += y);
        Mat2(out)
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, rhs: Mat2) {
        *self = *self + rhs;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = self.0;
        out.iter_mut().zip(rhs.0).for_each(|(x, y)| *x -= y);
        Mat2(out)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.map(|x| -x)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = rhs.0;
        Mat2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.map(|x| x * s)
    }
}

impl Mul<Mat2> for f64 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        m * self
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

/// Ordered singular values with the orthogonal factors of
/// `F = left_rot · diag(lambda1, lambda2) · right_rot`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralData {
    pub lambda1: f64,
    pub lambda2: f64,
    pub left_rot: Mat2,
    pub right_rot: Mat2,
}

impl SpectralData {
    pub fn reconstruct(&self) -> Mat2 {
        self.left_rot * Mat2::diag(self.lambda1, self.lambda2) * self.right_rot
    }

    pub fn singular_values(&self) -> [f64; 2] {
        [self.lambda1, self.lambda2]
    }
}

/// Internal invariants of `F` used by the closed-form SVD:
/// `F = R(φ)·diag(q + r, q − r)·R(θ)` with `q = |conformal part|`,
/// `r = |anticonformal part|`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ConformalSplit {
    pub q: f64,
    pub r: f64,
    pub phi: f64,
    pub theta: f64,
}

pub(crate) fn conformal_split(f: &Mat2) -> ConformalSplit {
    let [a, b, c, d] = f.0;
    let e = 0.5 * (a + d);
    let fm = 0.5 * (a - d);
    let g = 0.5 * (c + b);
    let h = 0.5 * (c - b);
    let q = e.hypot(h);
    let r = fm.hypot(g);
    let a1 = g.atan2(fm);
    let a2 = h.atan2(e);
    ConformalSplit {
        q,
        r,
        phi: 0.5 * (a2 + a1),
        theta: 0.5 * (a2 - a1),
    }
}

/// Closed-form singular value decomposition of a 2×2 matrix.
///
/// `lambda2` is recovered as `|det F| / lambda1`, which keeps full relative
/// accuracy for nearly conformal matrices. When `det F < 0` the reflection
/// is carried by `left_rot`.
pub fn svd2(f: &Mat2) -> SpectralData {
    let split = conformal_split(f);
    let lambda1 = split.q + split.r;
    let det = f.det();
    let lambda2 = if lambda1 > 0.0 {
        det.abs() / lambda1
    } else {
        0.0
    };
    let mut left_rot = Mat2::rotation(split.phi);
    if split.q < split.r {
        // diag(q + r, q − r) has a negative entry; flip the second column.
        left_rot = left_rot * Mat2::diag(1.0, -1.0);
    }
    SpectralData {
        lambda1,
        lambda2,
        left_rot,
        right_rot: Mat2::rotation(split.theta),
    }
}

/// Largest singular value.
pub fn lambda_max(f: &Mat2) -> f64 {
    let split = conformal_split(f);
    split.q + split.r
}

/// Right polar decomposition `F = R·U` with `R ∈ SO(2)` and `U` SPD.
pub fn polar_right(f: &Mat2) -> Result<(Mat2, Mat2)> {
    let rot = polar_rotation(f)?;
    let stretch = (rot.transpose() * *f).sym();
    Ok((rot, stretch))
}

/// Left polar decomposition `F = V·R`, returned as `(V, R)`.
pub fn polar_left(f: &Mat2) -> Result<(Mat2, Mat2)> {
    let rot = polar_rotation(f)?;
    let stretch = (*f * rot.transpose()).sym();
    Ok((stretch, rot))
}

fn polar_rotation(f: &Mat2) -> Result<Mat2> {
    let det = f.det();
    if !(det > 0.0) || !f.is_finite() {
        return Err(Error::NonInvertible { det });
    }
    // F + cof F is a positive multiple of the polar rotation when det F > 0.
    let [a, b, c, d] = f.0;
    let cos = a + d;
    let sin = c - b;
    let n = cos.hypot(sin);
    Ok(Mat2([cos / n, -sin / n, sin / n, cos / n]))
}

/// Eigenpairs of a symmetric 2×2 matrix, largest eigenvalue first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymEigen {
    pub values: [f64; 2],
    /// Columns are the unit eigenvectors matching `values`.
    pub vectors: Mat2,
}

/// Closed-form symmetric eigendecomposition (the upper triangle is used).
/// Equal eigenvalues get the identity basis.
pub fn sym_eigen(x: &Mat2) -> SymEigen {
    let [p, r, _, s] = x.0;
    let mean = 0.5 * (p + s);
    let half_diff = 0.5 * (p - s);
    let rad = half_diff.hypot(r);
    let angle = if rad == 0.0 {
        0.0
    } else {
        0.5 * (2.0 * r).atan2(p - s)
    };
    let (sn, cs) = angle.sin_cos();
    let hi = mean + rad;
    let det = p * s - r * r;
    let lo = if hi != 0.0 && rad > 0.25 * hi.abs() {
        mean - rad
    } else if hi != 0.0 {
        det / hi
    } else {
        mean - rad
    };
    SymEigen {
        values: [hi, lo],
        vectors: Mat2::from_cols([cs, sn], [-sn, cs]),
    }
}

/// Splits a symmetric matrix into `mean·1 + D` with `D` trace free;
/// returns `(mean, rad, D)` where `rad = ‖D‖/√2` is half the eigenvalue gap.
fn spherical_split(x: &Mat2) -> (f64, f64, Mat2) {
    let [p, r, _, s] = x.0;
    let mean = 0.5 * (p + s);
    let half_diff = 0.5 * (p - s);
    let rad = half_diff.hypot(r);
    (mean, rad, Mat2([half_diff, r, r, -half_diff]))
}

/// Logarithm of a symmetric positive definite matrix.
///
/// The input is symmetrized first; asymmetry above [`SYMMETRY_TOL`] (in
/// Frobenius norm) or a nonpositive eigenvalue is rejected.
pub fn log_spd(u: &Mat2) -> Result<Mat2> {
    if !u.is_finite() {
        return Err(Error::NotSpd("non-finite entries".into()));
    }
    let asym = (*u - u.transpose()).norm();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSpd(format!("asymmetry {asym:e}")));
    }
    let us = u.sym();
    let (mean, rad, dev) = spherical_split(&us);
    let det = us.det();
    if !(mean > 0.0) || !(det > 0.0) || rad >= mean {
        return Err(Error::NotSpd(format!(
            "eigenvalues {:e}, {:e}",
            mean + rad,
            mean - rad
        )));
    }
    if rad == 0.0 {
        return Ok(Mat2::diag(mean.ln(), mean.ln()));
    }
    let x = rad / mean;
    let hi = mean + rad;
    let lo = det / hi;
    // (log hi − log lo)/2 = atanh(rad/mean); the atanh form avoids the
    // cancellation of two nearly equal logarithms.
    let half_log_ratio = if x < 0.5 {
        x.atanh()
    } else {
        0.5 * (hi.ln() - lo.ln())
    };
    let half_log_det = 0.5 * (hi.ln() + lo.ln());
    Ok(Mat2::diag(half_log_det, half_log_det) + dev * (half_log_ratio / rad))
}

/// Exponential of a symmetric matrix (the upper triangle is used).
pub fn exp_sym(x: &Mat2) -> Mat2 {
    let xs = Mat2([x.0[0], x.0[1], x.0[1], x.0[3]]);
    let (mean, rad, dev) = spherical_split(&xs);
    let scale = mean.exp();
    let sinhc = if rad == 0.0 { 1.0 } else { rad.sinh() / rad };
    (Mat2::diag(rad.cosh(), rad.cosh()) + dev * sinhc) * scale
}

/// Deviatoric part `X − ½tr(X)·1`; the result has exactly zero trace.
pub fn dev2(x: &Mat2) -> Mat2 {
    let [a, b, c, d] = x.0;
    let h = 0.5 * (a - d);
    Mat2([h, b, c, -h])
}
