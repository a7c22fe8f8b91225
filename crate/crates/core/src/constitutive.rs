//! The exponentiated Hencky energy
//!
//! ```text
//! W(F) = μ/k · exp(k ‖dev₂ log U‖²) + κ/(2k̂) · exp(k̂ (log det F)²)   if det F > 0
//!      = +∞                                                            otherwise
//! ```
//!
//! together with its first Piola-Kirchhoff stress and a finite-difference
//! consistency check between the two.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor2::{conformal_split, dev2, log_spd, polar_left, Mat2};

/// Determinants below this are treated as collapsed elements.
pub const MIN_DET: f64 = 1e-300;
/// Exponent arguments above this saturate the energy to the overflow marker.
pub const MAX_EXPONENT: f64 = 700.0;

/// Elastic moduli and the two dimensionless exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub mu: f64,
    pub kappa: f64,
    pub k: f64,
    pub k_hat: f64,
    /// First Lamé constant, when the bulk modulus was derived from it.
    pub lame_lambda: Option<f64>,
}

impl MaterialParams {
    pub fn new(mu: f64, kappa: f64, k: f64, k_hat: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("kappa", kappa), ("k", k), ("k_hat", k_hat)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(MaterialParams {
            mu,
            kappa,
            k,
            k_hat,
            lame_lambda: None,
        })
    }

    /// Builds the parameters from `μ` and the first Lamé constant through
    /// `κ = (2μ + 3λ)/3`.
    pub fn from_lame(mu: f64, lame_lambda: f64, k: f64, k_hat: f64) -> Result<Self> {
        let kappa = (2.0 * mu + 3.0 * lame_lambda) / 3.0;
        let mut p = Self::new(mu, kappa, k, k_hat)?;
        p.lame_lambda = Some(lame_lambda);
        Ok(p)
    }

    /// Energy of the undeformed state, `μ/k + κ/(2k̂)`.
    pub fn reference_energy(&self) -> f64 {
        self.iso_scale() + self.vol_scale()
    }

    pub fn iso_scale(&self) -> f64 {
        self.mu / self.k
    }

    pub fn vol_scale(&self) -> f64 {
        self.kappa / (2.0 * self.k_hat)
    }
}

impl Default for MaterialParams {
    /// `μ = κ = 1`, `k = 1/4`, `k̂ = 1/8`.
    fn default() -> Self {
        MaterialParams {
            mu: 1.0,
            kappa: 1.0,
            k: 0.25,
            k_hat: 0.125,
            lame_lambda: None,
        }
    }
}

/// Why an energy evaluation returned `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Barrier {
    /// `det F ≤ 0` (or below [`MIN_DET`]).
    NonPositiveDet,
    /// An exponent exceeded [`MAX_EXPONENT`].
    Overflow,
}

/// Extended-real energy value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyValue {
    Finite { iso_part: f64, vol_part: f64 },
    Infinite(Barrier),
}

impl EnergyValue {
    /// Total energy; `f64::INFINITY` for the barrier cases.
    pub fn value(&self) -> f64 {
        match self {
            EnergyValue::Finite { iso_part, vol_part } => iso_part + vol_part,
            EnergyValue::Infinite(_) => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, EnergyValue::Finite { .. })
    }

    pub fn parts(&self) -> Option<(f64, f64)> {
        match *self {
            EnergyValue::Finite { iso_part, vol_part } => Some((iso_part, vol_part)),
            EnergyValue::Infinite(_) => None,
        }
    }
}

/// `‖dev₂ log U‖² = ½ log²(λ₁/λ₂)`, evaluated from the singular values.
pub fn iso_invariant(f: &Mat2) -> Result<f64> {
    let det = f.det();
    if !(det > 0.0) {
        return Err(Error::NonInvertible { det });
    }
    Ok(iso_invariant_unchecked(f, det))
}

fn iso_invariant_unchecked(f: &Mat2, det: f64) -> f64 {
    let split = conformal_split(f);
    // λ₁/λ₂ = (q + r)/(q − r), so log(λ₁/λ₂) = 2 atanh(r/q).
    let x = split.r / split.q;
    let log_ratio = if x < 0.5 {
        2.0 * x.atanh()
    } else {
        let l1 = split.q + split.r;
        (l1 * l1 / det).ln()
    };
    0.5 * log_ratio * log_ratio
}

/// Exponentiated Hencky energy of `F`.
pub fn energy(p: &MaterialParams, f: &Mat2) -> EnergyValue {
    let det = f.det();
    if !(det >= MIN_DET) || !f.is_finite() {
        return EnergyValue::Infinite(Barrier::NonPositiveDet);
    }
    let iso_exp = p.k * iso_invariant_unchecked(f, det);
    let log_det = det.ln();
    let vol_exp = p.k_hat * log_det * log_det;
    if !(iso_exp <= MAX_EXPONENT && vol_exp <= MAX_EXPONENT) {
        return EnergyValue::Infinite(Barrier::Overflow);
    }
    EnergyValue::Finite {
        iso_part: p.iso_scale() * iso_exp.exp(),
        vol_part: p.vol_scale() * vol_exp.exp(),
    }
}

/// Kirchhoff stress `τ = 2μ e^{k‖dev₂ log V‖²} dev₂ log V + κ e^{k̂ (log det F)²} log det F · 1`.
pub fn kirchhoff_stress(p: &MaterialParams, f: &Mat2) -> Result<Mat2> {
    let det = f.det();
    if !(det > 0.0) {
        return Err(Error::NonInvertible { det });
    }
    let (v, _) = polar_left(f)?;
    let dev_log = dev2(&log_spd(&v)?);
    let log_det = det.ln();
    let iso_factor = 2.0 * p.mu * (p.k * dev_log.norm_sq()).exp();
    let vol_factor = p.kappa * (p.k_hat * log_det * log_det).exp() * log_det;
    Ok(dev_log * iso_factor + Mat2::diag(vol_factor, vol_factor))
}

/// First Piola-Kirchhoff stress `S₁ = τ F⁻ᵀ`, the derivative of [`energy`]
/// with respect to `F`.
///
/// `τ` is built from the left stretch `V`; for symmetric `F` this coincides
/// with the same expression written with `log U`.
pub fn pk1_stress(p: &MaterialParams, f: &Mat2) -> Result<Mat2> {
    let tau = kirchhoff_stress(p, f)?;
    let f_inv_t = f
        .inverse_transpose()
        .ok_or(Error::NonInvertible { det: f.det() })?;
    Ok(tau * f_inv_t)
}

/// Largest normalized deviation between [`pk1_stress`] and central
/// differences of [`energy`] with step `h`:
/// `max_ij |FD_ij − S_ij| / (1 + max|S|)`.
///
/// If a perturbed matrix leaves `det > 0`, the step is reduced tenfold once.
pub fn stress_consistency(p: &MaterialParams, f: &Mat2, h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1e-3) {
        return Err(Error::Domain(format!("step h = {h} must lie in (0, 1e-3)")));
    }
    let stress = pk1_stress(p, f)?;
    let fd = fd_gradient(p, f, h).or_else(|_| fd_gradient(p, f, 0.1 * h))?;
    Ok(fd.rel_diff(&stress))
}

fn fd_gradient(p: &MaterialParams, f: &Mat2, h: f64) -> Result<Mat2> {
    let mut grad = Mat2::ZERO;
    for idx in 0..4 {
        let mut e = Mat2::ZERO;
        e.0[idx] = h;
        let plus = energy(p, &(*f + e));
        let minus = energy(p, &(*f - e));
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonInvertible {
                det: (*f - e).det().min((*f + e).det()),
            });
        }
        grad.0[idx] = (plus.value() - minus.value()) / (2.0 * h);
    }
    Ok(grad)
}
