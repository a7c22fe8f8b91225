//! Numerical certification of the convexity statements behind the planar
//! polyconvexity result: scalar thresholds, the polyconvex representation
//! `P(F, δ)`, rank-one scans, coercivity probes and the singular-value
//! inequalities.

pub mod appendix;
pub mod coercivity;
pub mod polyconvex;
pub mod scalar;
pub mod scan;
pub mod suites;

pub use appendix::{
    lambda_max_convexity_check, von_neumann_check, von_neumann_max_check,
    weighted_singular_convexity_check, VonNeumannMax,
};
pub use coercivity::{coercivity_probe, eventually_increasing, CoercivityRays};
pub use polyconvex::{
    f_pq_hessian, f_pq_hessian_psd, polyconvex_witness, polyconvex_witness_extended,
    witness_midpoint_margin, z_value, PqHessian,
};
pub use scalar::{
    vol_convexity_margin, vol_profile, y_convexity_factor, y_second_derivative, y_value,
    ScalarCurve,
};
pub use scan::{run_scan, Probe, RankOneProbe, ScanReport, Witness};
pub use suites::{run_suite, Suite, VolumetricGrid};

use crate::constitutive::MaterialParams;

/// Rank-one (Legendre-Hadamard) scan of the energy with the default step.
pub fn rank_one_scan(params: &MaterialParams, n_samples: usize, seed: u64) -> ScanReport {
    run_scan(&RankOneProbe::new(*params), n_samples, seed)
}
