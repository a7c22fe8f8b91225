//! The polyconvex representation of the planar energy.
//!
//! The isochoric part is `Y ∘ Z` with `Z(F) = λ_max²/det F ≥ 1`, and
//! `Z(F) = f(λ_max(F), det F)` for `f(a, b) = a²/b`. Replacing `det F` by an
//! independent variable `δ > 0` gives the function `P(F, δ)` whose joint
//! convexity is what the scans probe.

use serde::{Deserialize, Serialize};

use crate::constitutive::MaterialParams;
use crate::error::{Error, Result};
use crate::tensor2::{conformal_split, lambda_max, Mat2};

/// `Z(F) = λ_max²/det F`.
pub fn z_value(f: &Mat2) -> Result<f64> {
    let det = f.det();
    if !(det > 0.0) {
        return Err(Error::NonInvertible { det });
    }
    let split = conformal_split(f);
    let x = split.r / split.q;
    if x < 0.5 {
        // λ₁/λ₂ written without the cancellation in λ₁² − det.
        Ok((split.q + split.r) / (split.q - split.r))
    } else {
        let l1 = split.q + split.r;
        Ok(l1 * l1 / det)
    }
}

/// Hessian of `f(a, b) = aᵖ/b^q` at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PqHessian {
    pub hessian: Mat2,
    pub trace: f64,
    pub det: f64,
    pub min_eigenvalue: f64,
}

pub fn f_pq_hessian(p: f64, q: f64, a: f64, b: f64) -> Result<PqHessian> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("need a, b > 0, got ({a}, {b})")));
    }
    let f_aa = p * (p - 1.0) * a.powf(p - 2.0) * b.powf(-q);
    let f_ab = -p * q * a.powf(p - 1.0) * b.powf(-q - 1.0);
    let f_bb = q * (q + 1.0) * a.powf(p) * b.powf(-q - 2.0);
    // f_aa f_bb − f_ab² = pq (p − 1 − q) a^{2p−2} b^{−2q−2}, exactly zero
    // on the line q = p − 1.
    let det = p * q * (p - 1.0 - q) * a.powf(2.0 * p - 2.0) * b.powf(-2.0 * q - 2.0);
    let trace = f_aa + f_bb;
    let half_gap = (0.5 * (f_aa - f_bb)).hypot(f_ab);
    let hi = 0.5 * trace + half_gap;
    let min_eigenvalue = if det >= 0.0 && hi > 0.0 {
        det / hi
    } else {
        0.5 * trace - half_gap
    };
    Ok(PqHessian {
        hessian: Mat2::new(f_aa, f_ab, f_ab, f_bb),
        trace,
        det,
        min_eigenvalue,
    })
}

/// Smallest Hessian eigenvalue of `aᵖ/b^q` at `(a, b)`.
pub fn f_pq_hessian_psd(p: f64, q: f64, a: f64, b: f64) -> Result<f64> {
    Ok(f_pq_hessian(p, q, a, b)?.min_eigenvalue)
}

fn vol_term(pms: &MaterialParams, delta: f64) -> f64 {
    let l = delta.ln();
    pms.vol_scale() * (pms.k_hat * l * l).exp()
}

fn y_term(pms: &MaterialParams, theta: f64) -> f64 {
    let s = theta.ln();
    pms.iso_scale() * (0.5 * pms.k * s * s).exp()
}

/// `P(F, δ) = μ/k · Y(λ_max(F)²/δ) + κ/(2k̂) · exp(k̂ log²δ)`.
///
/// Defined where `δ > 0` and `λ_max² ≥ δ`; a relative shortfall of up to
/// `1e-12` is absorbed so that conformal `F` with `δ = det F` is accepted.
pub fn polyconvex_witness(pms: &MaterialParams, f: &Mat2, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !f.is_finite() {
        return Err(Error::Domain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let lm = lambda_max(f);
    let theta = lm * lm / delta;
    if theta < 1.0 - 1e-12 {
        return Err(Error::Domain(format!(
            "lambda_max^2 / delta = {theta} < 1 (Y is defined on [1, inf))"
        )));
    }
    Ok(y_term(pms, theta.max(1.0)) + vol_term(pms, delta))
}

/// [`polyconvex_witness`] with `Y` continued by the constant 1 below `θ = 1`.
///
/// The continuation is convex and nondecreasing because `Y'(1) = 0`, so it
/// defines `P` on all of `R^{2×2} × (0, ∞)`, which is where the midpoint
/// scans need it.
pub fn polyconvex_witness_extended(pms: &MaterialParams, f: &Mat2, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !f.is_finite() {
        return Err(Error::Domain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let lm = lambda_max(f);
    Ok(y_term(pms, (lm * lm / delta).max(1.0)) + vol_term(pms, delta))
}

/// `½P(F₁, δ₁) + ½P(F₂, δ₂) − P(midpoint)`, divided by `1 + |P(midpoint)|`.
pub fn witness_midpoint_margin(
    pms: &MaterialParams,
    (f1, d1): (&Mat2, f64),
    (f2, d2): (&Mat2, f64),
) -> Result<f64> {
    let p1 = polyconvex_witness_extended(pms, f1, d1)?;
    let p2 = polyconvex_witness_extended(pms, f2, d2)?;
    let fm = (*f1 + *f2) * 0.5;
    let pm = polyconvex_witness_extended(pms, &fm, 0.5 * (d1 + d2))?;
    Ok((0.5 * (p1 + p2) - pm) / (1.0 + pm.abs()))
}
