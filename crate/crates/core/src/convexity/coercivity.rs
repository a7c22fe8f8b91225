use serde::{Deserialize, Serialize};

use crate::constitutive::{energy, MaterialParams};
use crate::error::{Error, Result};
use crate::tensor2::Mat2;

/// Growth ratios `W(F_t)/‖F_t‖^q` along the two probe rays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoercivityRays {
    pub q: f64,
    pub t_grid: Vec<f64>,
    /// `F_t = diag(t, t)`.
    pub volumetric: Vec<f64>,
    /// `F_t = diag(t, 1/t)`.
    pub isochoric: Vec<f64>,
}

/// Evaluates the ratios; an overflowing energy shows up as `+∞`.
pub fn coercivity_probe(pms: &MaterialParams, q: f64, t_grid: &[f64]) -> Result<CoercivityRays> {
    if !(q >= 1.0) {
        return Err(Error::Domain(format!("q must be >= 1, got {q}")));
    }
    if t_grid.iter().any(|t| !(*t > 1.0)) || t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("t_grid must be increasing with t > 1".into()));
    }
    let ratio = |f: Mat2| energy(pms, &f).value() / f.norm().powf(q);
    Ok(CoercivityRays {
        q,
        t_grid: t_grid.to_vec(),
        volumetric: t_grid.iter().map(|&t| ratio(Mat2::diag(t, t))).collect(),
        isochoric: t_grid
            .iter()
            .map(|&t| ratio(Mat2::diag(t, 1.0 / t)))
            .collect(),
    })
}

/// Smallest relative increment `(rᵢ₊₁ − rᵢ)/rᵢ` over consecutive entries;
/// positive iff the sequence is strictly increasing. Pairs involving `+∞`
/// count as increasing only when the earlier entry is finite.
pub fn min_relative_increment(ratios: &[f64]) -> f64 {
    ratios
        .windows(2)
        .map(|w| match (w[0].is_finite(), w[1].is_finite()) {
            (true, true) => (w[1] - w[0]) / w[0].abs(),
            (true, false) => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        })
        .fold(f64::INFINITY, f64::min)
}

/// True when the last `tail` entries increase strictly.
pub fn eventually_increasing(ratios: &[f64], tail: usize) -> bool {
    let start = ratios.len().saturating_sub(tail);
    ratios.len() >= 2 && min_relative_increment(&ratios[start..]) > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volumetric_ray_grows_for_q2() {
        let r = coercivity_probe(&MaterialParams::default(), 2.0, &[10.0, 100.0]).unwrap();
        assert!(r.volumetric[1] > r.volumetric[0]);
    }

    #[test]
    fn isochoric_ray_eventually_increases_for_q10() {
        let grid: Vec<f64> = (1..=12).map(|j| 10f64.powi(j)).collect();
        let r = coercivity_probe(&MaterialParams::default(), 10.0, &grid).unwrap();
        assert!(eventually_increasing(&r.isochoric, 3));
        assert!(eventually_increasing(&r.volumetric, 3));
        // With exponent growth exp(k/2·(2 log t)²) against t¹⁰ the ratio only
        // turns upward once log t > 20.
        assert!(r.isochoric[1] < r.isochoric[0]);
    }

    #[test]
    fn ratio_finite_at_small_t() {
        let r = coercivity_probe(&MaterialParams::default(), 1.0, &[2.0]).unwrap();
        assert!(r.volumetric[0].is_finite() && r.volumetric[0] > 0.0);
        assert!(r.isochoric[0].is_finite() && r.isochoric[0] > 0.0);
    }

    #[test]
    fn bad_grids_rejected() {
        let p = MaterialParams::default();
        assert!(coercivity_probe(&p, 2.0, &[1.0, 2.0]).is_err());
        assert!(coercivity_probe(&p, 2.0, &[3.0, 2.0]).is_err());
        assert!(coercivity_probe(&p, 0.5, &[3.0]).is_err());
    }

    #[test]
    fn increments() {
        assert!(min_relative_increment(&[1.0, 2.0, 3.0]) > 0.0);
        assert!(min_relative_increment(&[1.0, 2.0, 2.0]) == 0.0);
        assert!(min_relative_increment(&[1.0, f64::INFINITY]) > 0.0);
        assert!(!eventually_increasing(&[1.0], 3));
    }
}
