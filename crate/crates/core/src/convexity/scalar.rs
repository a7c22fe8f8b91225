//! One-dimensional convexity boundaries: `Y(θ) = exp(k/2 · log²θ)` on
//! `[1, ∞)` and the volumetric profile `t ↦ exp(k̂ · logᵐ t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn y_value(k: f64, theta: f64) -> Result<f64> {
    if !(theta >= 1.0) {
        return Err(Error::Domain(format!(
            "Y is defined for theta >= 1, got {theta}"
        )));
    }
    let s = theta.ln();
    Ok((0.5 * k * s * s).exp())
}

/// `k s² − s + 1` with `s = log θ`; `Y''` has the sign of this factor.
pub fn y_convexity_factor(k: f64, s: f64) -> f64 {
    k * s * s - s + 1.0
}

/// `Y''(θ) = Y(θ)·k·(k s² − s + 1)/θ²`, `s = log θ`.
pub fn y_second_derivative(k: f64, theta: f64) -> f64 {
    let s = theta.ln();
    let y = (0.5 * k * s * s).exp();
    y * k * y_convexity_factor(k, s) / (theta * theta)
}

/// Second derivative of `t ↦ exp(k̂ · (log t)ᵐ)` for `m ∈ {2, 3}`.
///
/// With `s = log t` and `g(s) = k̂ sᵐ`, the derivative is
/// `exp(g)·(g'² + g'' − g')/t²`. For `m = 2` its sign is that of
/// `2k̂ s² − s + 1`.
pub fn vol_convexity_margin(m: u32, k_hat: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let s = t.ln();
    let (g, g1, g2) = match m {
        2 => (k_hat * s * s, 2.0 * k_hat * s, 2.0 * k_hat),
        3 => (k_hat * s * s * s, 3.0 * k_hat * s * s, 6.0 * k_hat * s),
        _ => return Err(Error::UnsupportedExponent(m)),
    };
    Ok(g.exp() * (g1 * g1 + g2 - g1) / (t * t))
}

/// Value of `t ↦ exp(k̂ · (log t)ᵐ)`.
pub fn vol_profile(m: u32, k_hat: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    match m {
        2 | 3 => Ok((k_hat * t.ln().powi(m as i32)).exp()),
        _ => Err(Error::UnsupportedExponent(m)),
    }
}

/// Samples of `Y` for one value of `k`, ready for plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarCurve {
    pub k: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl ScalarCurve {
    /// `n_points` log-spaced abscissae on `[1, theta_max]`.
    pub fn log_spaced(k: f64, theta_max: f64, n_points: usize) -> Result<Self> {
        if !(theta_max > 1.0) || !theta_max.is_finite() {
            return Err(Error::Domain(format!(
                "theta_max must exceed 1, got {theta_max}"
            )));
        }
        if n_points < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 points, got {n_points}"
            )));
        }
        if !(k > 0.0) {
            return Err(Error::Domain(format!("k must be positive, got {k}")));
        }
        let log_max = theta_max.ln();
        let last = n_points - 1;
        let grid: Vec<f64> = (0..n_points)
            .map(|i| {
                if i == last {
                    theta_max
                } else {
                    (log_max * i as f64 / last as f64).exp()
                }
            })
            .collect();
        let values = grid
            .iter()
            .map(|&theta| y_value(k, theta))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScalarCurve { k, grid, values })
    }

    /// CSV with header `theta,y`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,y\n");
        for (theta, y) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{theta},{y}\n"));
        }
        out
    }

    /// Second divided differences `2·[θᵢ₋₁, θᵢ, θᵢ₊₁]Y` at interior nodes.
    pub fn second_differences(&self) -> Vec<f64> {
        self.grid
            .windows(3)
            .zip(self.values.windows(3))
            .map(|(x, y)| {
                let h0 = x[1] - x[0];
                let h1 = x[2] - x[1];
                2.0 * ((y[2] - y[1]) / h1 - (y[1] - y[0]) / h0) / (h0 + h1)
            })
            .collect()
    }

    /// Maximal θ-intervals `[θᵢ₋₁, θⱼ₊₁]` whose interior nodes all have a
    /// negative second difference.
    pub fn nonconvex_intervals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut start: Option<usize> = None;
        let diffs = self.second_differences();
        for (i, d) in diffs.iter().enumerate() {
            // diffs[i] belongs to node i + 1.
            match (d < &0.0, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    out.push((self.grid[s], self.grid[i + 1]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((self.grid[s], self.grid[diffs.len() + 1]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn y_examples() {
        for k in [0.1, 0.25, 3.0] {
            assert_eq!(y_value(k, 1.0).unwrap(), 1.0);
        }
        let y = y_value(0.5, E).unwrap();
        // exp(x) = Σ xⁿ/n! at x = 1/4.
        let series: f64 = (0..20)
            .scan(1.0, |term, n| {
                let out = *term;
                *term *= 0.25 / (n as f64 + 1.0);
                Some(out)
            })
            .sum();
        assert!((y - series).abs() < 1e-15);
        assert!((y - 1.2840).abs() < 1e-4);
        assert!(y_value(0.25, 2.0).unwrap() < y_value(0.25, 3.0).unwrap());
        assert!(matches!(y_value(0.25, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn y_second_derivative_examples() {
        // Double root s = 2 of s²/4 − s + 1.
        assert_eq!(y_second_derivative(0.25, (2.0f64).exp()), 0.0);
        assert_eq!(y_convexity_factor(0.25, 2.0), 0.0);
        assert!(y_second_derivative(0.2, (2.5f64).exp()) < 0.0);
        assert!((y_convexity_factor(0.2, 2.5) + 0.25).abs() < 1e-15);
        for i in 0..=1000 {
            let s = 10.0 * i as f64 / 1000.0;
            assert!(y_second_derivative(0.5, s.exp()) > 0.0);
        }
    }

    #[test]
    fn y_second_derivative_matches_central_differences() {
        for k in [0.2, 0.25, 0.5, 2.0] {
            for i in 1..=50 {
                let theta = (5.0 * i as f64 / 50.0).exp();
                let h = 1e-4 * theta;
                let y = |x: f64| y_value(k, x).unwrap();
                let fd = (y(theta + h) - 2.0 * y(theta) + y(theta - h)) / (h * h);
                let exact = y_second_derivative(k, theta);
                let scale = y(theta) / (theta * theta);
                assert!(
                    (fd - exact).abs() <= 1e-6 * exact.abs().max(scale),
                    "k={k} i={i}"
                );
            }
        }
    }

    #[test]
    fn vol_margin_examples() {
        assert_eq!(vol_convexity_margin(2, 0.125, (2.0f64).exp()).unwrap(), 0.0);
        assert!(vol_convexity_margin(2, 0.1, (2.5f64).exp()).unwrap() < 0.0);
        assert!(matches!(
            vol_convexity_margin(4, 0.1, 2.0),
            Err(Error::UnsupportedExponent(4))
        ));
        assert!(vol_convexity_margin(2, 0.1, 0.0).is_err());
    }

    #[test]
    fn vol_margin_matches_central_differences() {
        for m in [2, 3] {
            for s in [-3.0, -1.0, -0.2, 0.3, 1.0, 2.0, 3.0, 4.5] {
                let t = f64::exp(s);
                let h = 1e-4 * t;
                let f = |x: f64| vol_profile(m, 0.1, x).unwrap();
                let fd = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
                let exact = vol_convexity_margin(m, 0.1, t).unwrap();
                assert!((fd - exact).abs() <= 1e-6 * f(t) / (t * t), "m={m} s={s}");
            }
        }
    }

    #[test]
    fn cubic_profile_is_sharp_on_the_positive_axis() {
        // 3k̂s³ − s + 2 has a double root at s = 3 when k̂ = 1/81.
        let k_hat = 1.0 / 81.0;
        for i in 0..=5000 {
            let s = 5.0 * i as f64 / 5000.0;
            let factor = 3.0 * k_hat * s * s * s - s + 2.0;
            assert!(factor >= -1e-12, "s = {s}");
        }
        let below = 1.0 / 81.0 - 1e-3;
        assert!(vol_convexity_margin(3, below, 3f64.exp()).unwrap() < 0.0);
        // Odd powers of log t are concave just below t = 1 for every k̂.
        assert!(vol_convexity_margin(3, 1.0, (-0.1f64).exp()).unwrap() < 0.0);
    }

    #[test]
    fn curve_shape() {
        let c = ScalarCurve::log_spaced(0.25, 100.0, 5).unwrap();
        assert_eq!(c.grid[0], 1.0);
        assert_eq!(*c.grid.last().unwrap(), 100.0);
        assert_eq!(c.values[0], 1.0);
        assert!(c.grid.windows(2).all(|w| w[0] < w[1]));
        assert!(c.to_csv().starts_with("theta,y\n1,1\n"));
        assert_eq!(c.to_csv().lines().count(), 6);
        assert!(ScalarCurve::log_spaced(0.25, 1.0, 5).is_err());
        assert!(ScalarCurve::log_spaced(0.25, 10.0, 1).is_err());
    }

    #[test]
    fn nonconvexity_flag_tracks_threshold() {
        let eighth = ScalarCurve::log_spaced(0.125, 1000.0, 400).unwrap();
        let flagged = eighth.nonconvex_intervals();
        assert_eq!(flagged.len(), 1);
        let (a, b) = flagged[0];
        // Roots of s²/8 − s + 1 are s = 4 ± 2√2.
        let lo = (4.0 - 2.0 * 2f64.sqrt()).exp();
        let hi = (4.0 + 2.0 * 2f64.sqrt()).exp();
        assert!(a < (4.0f64).exp() && (4.0f64).exp() < b);
        assert!(
            (a / lo - 1.0).abs() < 0.1 && (b / hi - 1.0).abs() < 0.1,
            "{a} {b}"
        );
        for k in [0.25, 0.5] {
            let c = ScalarCurve::log_spaced(k, 1000.0, 400).unwrap();
            assert!(c.nonconvex_intervals().is_empty());
        }
    }
}
