//! Named certification suites, each producing one or more [`ScanReport`]s.

use std::fmt;
use std::str::FromStr;

use crate::constitutive::MaterialParams;
use crate::error::{Error, Result};

use super::coercivity::{coercivity_probe, min_relative_increment};
use super::scalar::vol_convexity_margin;
use super::scan::{
    run_scan, RankOneProbe, ScanReport, SingularSumProbe, VonNeumannMaxProbe, VonNeumannProbe,
    Witness, WitnessIdentityProbe, WitnessMidpointProbe,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    RankOne,
    PolyconvexWitness,
    VonNeumann,
    LambdaMax,
    Coercivity,
    Volumetric,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 6] = [
        Suite::RankOne,
        Suite::PolyconvexWitness,
        Suite::VonNeumann,
        Suite::LambdaMax,
        Suite::Coercivity,
        Suite::Volumetric,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::RankOne => "rank-one",
            Suite::PolyconvexWitness => "polyconvex-witness",
            Suite::VonNeumann => "von-neumann",
            Suite::LambdaMax => "lambda-max",
            Suite::Coercivity => "coercivity",
            Suite::Volumetric => "volumetric",
            Suite::All => "all",
        }
    }

    /// The individual suites this name expands to.
    pub fn expand(&self) -> Vec<Suite> {
        match self {
            Suite::All => Self::INDIVIDUAL.to_vec(),
            s => vec![*s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::INDIVIDUAL
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|suite| suite.as_str() == s)
            .copied()
            .ok_or_else(|| Error::Domain(format!("unknown suite `{s}`")))
    }
}

/// Orthogonal pairs sampled per `(A, B)` in the `von-neumann` suite.
pub const ORTH_SAMPLES_PER_PAIR: usize = 16;

/// Runs one individual suite (use [`Suite::expand`] for `All`).
pub fn run_suite(
    suite: Suite,
    params: &MaterialParams,
    samples: usize,
    seed: u64,
) -> Vec<ScanReport> {
    match suite {
        Suite::RankOne => vec![run_scan(&RankOneProbe::new(*params), samples, seed)],
        Suite::PolyconvexWitness => vec![
            run_scan(&WitnessMidpointProbe { params: *params }, samples, seed),
            run_scan(&WitnessIdentityProbe { params: *params }, samples, seed),
        ],
        Suite::VonNeumann => vec![
            run_scan(&VonNeumannProbe, samples, seed),
            run_scan(
                &VonNeumannMaxProbe {
                    orth_samples: ORTH_SAMPLES_PER_PAIR,
                },
                samples,
                seed,
            ),
        ],
        Suite::LambdaMax => vec![
            run_scan(&SingularSumProbe::lambda_max(), samples, seed),
            run_scan(&SingularSumProbe { weights: None }, samples, seed),
        ],
        Suite::Coercivity => vec![coercivity_report(params, seed)],
        Suite::Volumetric => vec![VolumetricGrid::new(2, params.k_hat).run(seed)],
        Suite::All => Suite::INDIVIDUAL
            .iter()
            .flat_map(|s| run_suite(*s, params, samples, seed))
            .collect(),
    }
}

/// Deterministic grid scan of the volumetric profile `exp(k̂ logᵐ t)`.
///
/// The margin at `s = log t` is `t²·h''(t)/h(t)`, the second derivative
/// measured in the profile's own scale; for `m = 2` it equals
/// `2k̂ (2k̂ s² − s + 1)`.
#[derive(Clone, Copy, Debug)]
pub struct VolumetricGrid {
    pub m: u32,
    pub k_hat: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub points: usize,
}

impl VolumetricGrid {
    pub fn new(m: u32, k_hat: f64) -> Self {
        VolumetricGrid {
            m,
            k_hat,
            s_min: -10.0,
            s_max: 10.0,
            points: 10_001,
        }
    }

    pub fn with_range(mut self, s_min: f64, s_max: f64) -> Self {
        self.s_min = s_min;
        self.s_max = s_max;
        self
    }

    pub fn abscissa(&self, i: usize) -> f64 {
        let n = (self.points - 1).max(1) as f64;
        self.s_min + (self.s_max - self.s_min) * i as f64 / n
    }

    pub fn margin_at(m: u32, k_hat: f64, s: f64) -> Result<f64> {
        let t = s.exp();
        let h = (k_hat * s.powi(m as i32)).exp();
        Ok(vol_convexity_margin(m, k_hat, t)? * t * t / h)
    }

    pub fn run(&self, seed: u64) -> ScanReport {
        let (worst, s) = (0..self.points)
            .map(|i| {
                let s = self.abscissa(i);
                let m = Self::margin_at(self.m, self.k_hat, s).unwrap_or(f64::NEG_INFINITY);
                (if m.is_nan() { f64::NEG_INFINITY } else { m }, s)
            })
            .fold(
                (f64::INFINITY, f64::NAN),
                |acc, x| if x.0 < acc.0 { x } else { acc },
            );
        ScanReport {
            name: format!("volumetric-m{}", self.m),
            samples: self.points,
            worst_margin: worst,
            tolerance: 1e-12,
            witness: Witness::default()
                .with_scalar("m", self.m as f64)
                .with_scalar("k_hat", self.k_hat)
                .with_scalar("s", s)
                .with_scalar("t", s.exp()),
            seed,
        }
    }
}

/// Exponents probed by the `coercivity` suite.
pub const COERCIVITY_EXPONENTS: [f64; 3] = [1.0, 2.0, 10.0];

/// `t = 10¹ … 10¹²`; the super-polynomial growth overtakes `t¹⁰` only for
/// `log t ≳ 20` at the default exponents.
pub fn coercivity_grid() -> Vec<f64> {
    (1..=12).map(|j| 10f64.powi(j)).collect()
}

/// Number of trailing grid points that must increase strictly.
pub const COERCIVITY_TAIL: usize = 3;

/// Worst relative increment of `W/‖F‖^q` over the last
/// [`COERCIVITY_TAIL`] finite grid points, over both rays and all
/// [`COERCIVITY_EXPONENTS`].
pub fn coercivity_report(params: &MaterialParams, seed: u64) -> ScanReport {
    let grid = coercivity_grid();
    let mut worst = (f64::INFINITY, Witness::default());
    for q in COERCIVITY_EXPONENTS {
        let rays = match coercivity_probe(params, q, &grid) {
            Ok(r) => r,
            Err(_) => continue,
        };
        for (ray, ratios) in [
            ("volumetric", &rays.volumetric),
            ("isochoric", &rays.isochoric),
        ] {
            let finite: Vec<f64> = ratios.iter().copied().filter(|r| r.is_finite()).collect();
            let start = finite.len().saturating_sub(COERCIVITY_TAIL);
            let margin = if finite.len() >= 2 {
                min_relative_increment(&finite[start..])
            } else {
                f64::NEG_INFINITY
            };
            if margin < worst.0 {
                let t_last = grid[finite.len().saturating_sub(1)];
                worst = (
                    margin,
                    Witness::default()
                        .with_scalar("q", q)
                        .with_scalar("ray_is_isochoric", (ray == "isochoric") as u8 as f64)
                        .with_scalar("t_last", t_last),
                );
            }
        }
    }
    ScanReport {
        name: "coercivity".into(),
        samples: COERCIVITY_EXPONENTS.len() * 2,
        worst_margin: worst.0,
        tolerance: 0.0,
        witness: worst.1,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::INDIVIDUAL.iter().chain([Suite::All].iter()) {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), *s);
        }
        assert!("bogus".parse::<Suite>().is_err());
        assert_eq!(Suite::All.expand().len(), 6);
    }

    #[test]
    fn volumetric_threshold() {
        let at = VolumetricGrid::new(2, 0.125).run(0);
        assert!(at.passed(), "{}", at.summary_line());
        let below = VolumetricGrid::new(2, 0.1).run(0);
        assert!(!below.passed());
        let s = below.witness.scalar("s").unwrap();
        assert!((s - 2.5).abs() < 0.01, "witness at s = {s}");
        // ⅛ − 1e-3: the violation sits at s = 1/(4k̂) ≈ 2.016.
        let just_below = VolumetricGrid::new(2, 0.125 - 1e-3).run(0);
        assert!(!just_below.passed());
        let s = just_below.witness.scalar("s").unwrap();
        assert!((s - 1.0 / (4.0 * (0.125 - 1e-3))).abs() < 0.01);
    }

    #[test]
    fn volumetric_margin_matches_closed_form() {
        for s in [-3.0, 0.0, 1.0, 2.5, 7.0] {
            let m = VolumetricGrid::margin_at(2, 0.1, s).unwrap();
            let closed = 0.2 * (0.2 * s * s - s + 1.0);
            assert!((m - closed).abs() < 1e-12 * (1.0 + closed.abs()));
        }
    }

    #[test]
    fn coercivity_suite_passes_at_defaults() {
        let r = coercivity_report(&MaterialParams::default(), 0);
        assert!(r.passed(), "{}", r.summary_line());
    }
}
