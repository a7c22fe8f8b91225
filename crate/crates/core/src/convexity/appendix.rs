//! Singular-value inequalities behind the convexity of `λ_max`: the von
//! Neumann trace bound, its attainment over pairs of orthogonal matrices,
//! and convexity of weighted singular-value sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{sample_orthogonal, sample_rng};
use crate::tensor2::{svd2, Mat2};

fn singular_dot(a: &Mat2, b: &Mat2) -> f64 {
    let sa = svd2(a);
    let sb = svd2(b);
    sa.lambda1 * sb.lambda1 + sa.lambda2 * sb.lambda2
}

/// `⟨α, β⟩ − |tr(A B)|`, nonnegative by the von Neumann trace inequality.
pub fn von_neumann_check(a: &Mat2, b: &Mat2) -> f64 {
    singular_dot(a, b) - (*a * *b).trace().abs()
}

/// Outcome of maximizing `|⟨A Q, Rᵀ Bᵀ⟩|` over `Q, R ∈ O(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VonNeumannMax {
    /// Maximum over the random samples and the constructed pair.
    pub sup_found: f64,
    /// `⟨α, β⟩`.
    pub analytic: f64,
    /// Maximum over the random samples alone.
    pub best_sampled: f64,
    /// Value at `Q = R₁ᵀQ₂ᵀ`, `R = R₂ᵀQ₁ᵀ` built from the SVDs
    /// `A = Q₁ diag(α) R₁`, `B = Q₂ diag(β) R₂`.
    pub constructed: f64,
}

fn pairing(a: &Mat2, b: &Mat2, q: &Mat2, r: &Mat2) -> f64 {
    // ⟨A Q, Rᵀ Bᵀ⟩ = tr(A Q B R)
    (*a * *q).dot(&(r.transpose() * b.transpose())).abs()
}

/// Samples `n_orth_samples` pairs `(Q, R)` from O(2) (both components) and
/// adds the optimizer constructed from the two SVDs.
pub fn von_neumann_max_check(
    a: &Mat2,
    b: &Mat2,
    n_orth_samples: usize,
    seed: u64,
) -> VonNeumannMax {
    let sa = svd2(a);
    let sb = svd2(b);
    let analytic = sa.lambda1 * sb.lambda1 + sa.lambda2 * sb.lambda2;
    let q = sa.right_rot.transpose() * sb.left_rot.transpose();
    let r = sb.right_rot.transpose() * sa.left_rot.transpose();
    let constructed = pairing(a, b, &q, &r);
    let best_sampled = (0..n_orth_samples as u64)
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let q = sample_orthogonal(&mut rng);
            let r = sample_orthogonal(&mut rng);
            pairing(a, b, &q, &r)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    VonNeumannMax {
        sup_found: best_sampled.max(constructed),
        analytic,
        best_sampled,
        constructed,
    }
}

fn check_weight(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t must lie in [0, 1], got {t}")));
    }
    Ok(())
}

/// `(1−t)·g(F₁) + t·g(F₂) − g((1−t)F₁ + tF₂)` for `g = ⟨r, λ(·)⟩`.
pub fn weighted_singular_convexity_check(f1: &Mat2, f2: &Mat2, t: f64, r: [f64; 2]) -> Result<f64> {
    check_weight(t)?;
    if !(r[0] >= r[1] && r[1] >= 0.0) || !r.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidWeights(r));
    }
    let g = |f: &Mat2| {
        let sd = svd2(f);
        r[0] * sd.lambda1 + r[1] * sd.lambda2
    };
    let mid = *f1 * (1.0 - t) + *f2 * t;
    Ok((1.0 - t) * g(f1) + t * g(f2) - g(&mid))
}

/// Convexity margin of the largest singular value along a segment.
pub fn lambda_max_convexity_check(f1: &Mat2, f2: &Mat2, t: f64) -> Result<f64> {
    weighted_singular_convexity_check(f1, f2, t, [1.0, 0.0])
}
