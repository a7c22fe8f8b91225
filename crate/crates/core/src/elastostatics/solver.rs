//! Total energy, nodal gradient and the descent minimizer.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constitutive::{energy, pk1_stress, MaterialParams};
use crate::error::{Error, Result};

use super::mesh::{ElementGeometry, MeshState, Point};

/// Multiple of machine epsilon, relative to the energy, below which an
/// energy decrease is treated as rounding.
const ROUNDING_FACTOR: f64 = 16.0;

/// Meshes below this size are assembled on the calling thread.
const PARALLEL_MIN_ELEMENTS: usize = 512;

fn element_energies(
    p: &MaterialParams,
    mesh: &MeshState,
    x: &[Point],
    geoms: &[ElementGeometry],
) -> Vec<f64> {
    let eval = |e: usize| {
        let f = mesh.deformation_gradient_at(x, e, &geoms[e]);
        geoms[e].area * energy(p, &f).value()
    };
    if geoms.len() >= PARALLEL_MIN_ELEMENTS {
        (0..geoms.len()).into_par_iter().map(eval).collect()
    } else {
        (0..geoms.len()).map(eval).collect()
    }
}

fn energy_at(p: &MaterialParams, mesh: &MeshState, x: &[Point], geoms: &[ElementGeometry]) -> f64 {
    // Ordered sum keeps the result independent of the thread count.
    element_energies(p, mesh, x, geoms).into_iter().sum()
}

fn gradient_at(
    p: &MaterialParams,
    mesh: &MeshState,
    x: &[Point],
    geoms: &[ElementGeometry],
) -> Result<Vec<Point>> {
    let eval = |e: usize| -> Result<[Point; 3]> {
        let geom = &geoms[e];
        let f = mesh.deformation_gradient_at(x, e, geom);
        let s = pk1_stress(p, &f).map_err(|_| Error::InadmissibleState)?;
        Ok(geom.shape_gradients().map(|g| {
            let v = s.mul_vec(g);
            [geom.area * v[0], geom.area * v[1]]
        }))
    };
    let contributions: Vec<[Point; 3]> = if geoms.len() >= PARALLEL_MIN_ELEMENTS {
        (0..geoms.len())
            .into_par_iter()
            .map(eval)
            .collect::<Result<_>>()?
    } else {
        (0..geoms.len()).map(eval).collect::<Result<_>>()?
    };
    let mut grad = vec![[0.0; 2]; x.len()];
    for (tri, forces) in mesh.triangles.iter().zip(&contributions) {
        for (&node, force) in tri.iter().zip(forces) {
            grad[node][0] += force[0];
            grad[node][1] += force[1];
        }
    }
    for &i in &mesh.boundary_nodes {
        grad[i] = [0.0, 0.0];
    }
    Ok(grad)
}

/// `Σ_e area_e · W(F_e)`; `+∞` as soon as one element is inadmissible.
pub fn total_energy(p: &MaterialParams, mesh: &MeshState) -> f64 {
    energy_at(p, mesh, &mesh.deformed, &mesh.geometries())
}

/// Derivative of [`total_energy`] with respect to the deformed nodal
/// positions, assembled from element stresses. Dirichlet entries are zero.
pub fn energy_gradient(p: &MaterialParams, mesh: &MeshState) -> Result<Vec<Point>> {
    let geoms = mesh.geometries();
    if !energy_at(p, mesh, &mesh.deformed, &geoms).is_finite() {
        return Err(Error::InadmissibleState);
    }
    gradient_at(p, mesh, &mesh.deformed, &geoms)
}

fn norm(v: &[Point]) -> f64 {
    v.iter()
        .map(|g| g[0] * g[0] + g[1] * g[1])
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Stop when `‖∇I‖ ≤ tol · (1 + |I|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Sufficient-decrease constant.
    pub armijo: f64,
    pub backtrack: f64,
    /// Consecutive step reductions before giving up.
    pub max_halvings: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-7,
            max_iter: 100_000,
            armijo: 1e-4,
            backtrack: 0.5,
            max_halvings: 60,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    /// The line search exhausted its reductions; the best state is returned.
    NoDescent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Smallest element determinant over every accepted iterate.
    pub min_element_det: f64,
    #[serde(skip)]
    pub energy_history: Vec<f64>,
    #[serde(skip)]
    pub deformed: Vec<Point>,
}

/// Gradient descent with Armijo backtracking on the free nodal positions.
///
/// Trial states with an inverted element have infinite energy and fail the
/// sufficient-decrease test, so every accepted iterate stays admissible. The
/// first trial step of each iteration is twice the last accepted one.
/// On return `mesh.deformed` holds the final (or best) state.
pub fn minimize(
    p: &MaterialParams,
    mesh: &mut MeshState,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    let geoms = mesh.geometries();
    let mut x = mesh.deformed.clone();
    let mut e = energy_at(p, mesh, &x, &geoms);
    if !e.is_finite() {
        return Err(Error::InadmissibleState);
    }
    let initial_energy = e;
    let mut history = vec![e];
    let mut min_det = mesh.min_element_det();
    let mut grad = gradient_at(p, mesh, &x, &geoms)?;
    let mut gnorm = norm(&grad);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut trial = x.clone();

    let status = loop {
        if gnorm <= opts.tol * (1.0 + e.abs()) {
            break SolveStatus::Converged;
        }
        if iterations >= opts.max_iter {
            break SolveStatus::MaxIterations;
        }
        let mut alpha = step;
        let mut accepted = None;
        // Energy changes this small are indistinguishable from rounding.
        let noise = ROUNDING_FACTOR * f64::EPSILON * e.abs();
        for _ in 0..=opts.max_halvings {
            for ((t, xi), g) in trial.iter_mut().zip(&x).zip(&grad) {
                *t = [xi[0] - alpha * g[0], xi[1] - alpha * g[1]];
            }
            let e_trial = energy_at(p, mesh, &trial, &geoms);
            if e_trial <= e - opts.armijo * alpha * gnorm * gnorm && e_trial < e {
                accepted = Some((e_trial, None));
                break;
            }
            if e_trial <= e && e - e_trial <= noise {
                // Approximate Armijo test: near the minimizer the energy no
                // longer resolves progress, so require a smaller gradient.
                let g_trial = gradient_at(p, mesh, &trial, &geoms)?;
                if norm(&g_trial) < gnorm {
                    accepted = Some((e_trial, Some(g_trial)));
                    break;
                }
            }
            alpha *= opts.backtrack;
        }
        let Some((e_new, g_new)) = accepted else {
            break SolveStatus::NoDescent;
        };
        std::mem::swap(&mut x, &mut trial);
        e = e_new;
        history.push(e);
        iterations += 1;
        step = 2.0 * alpha;
        min_det = min_det.min(
            (0..geoms.len())
                .map(|el| mesh.deformation_gradient_at(&x, el, &geoms[el]).det())
                .fold(f64::INFINITY, f64::min),
        );
        grad = match g_new {
            Some(g) => g,
            None => gradient_at(p, mesh, &x, &geoms)?,
        };
        gnorm = norm(&grad);
    };

    mesh.deformed = x.clone();
    Ok(SolveResult {
        status,
        initial_energy,
        final_energy: e,
        iterations,
        gradient_norm: gnorm,
        min_element_det: min_det,
        energy_history: history,
        deformed: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastostatics::mesh::build_rect_mesh;
    use crate::tensor2::Mat2;

    fn affine(f0: Mat2) -> impl Fn(Point) -> Point {
        move |x| f0.mul_vec(x)
    }

    // Central differences of the total energy in every free coordinate.
    fn fd_gradient(p: &MaterialParams, mesh: &MeshState, h: f64) -> Vec<Point> {
        let mut out = vec![[0.0; 2]; mesh.nodes.len()];
        for i in mesh.interior_nodes().collect::<Vec<_>>() {
            for (c, slot) in out[i].iter_mut().enumerate() {
                let mut plus = mesh.clone();
                plus.deformed[i][c] += h;
                let mut minus = mesh.clone();
                minus.deformed[i][c] -= h;
                *slot = (total_energy(p, &plus) - total_energy(p, &minus)) / (2.0 * h);
            }
        }
        out
    }

    #[test]
    fn identity_energy_and_gradient() {
        let p = MaterialParams::default();
        let mesh = build_rect_mesh(4, 4, 1.0, 1.0).unwrap();
        assert!((total_energy(&p, &mesh) - p.reference_energy()).abs() < 1e-13);
        assert!(energy_gradient(&p, &mesh)
            .unwrap()
            .iter()
            .all(|g| g == &[0.0, 0.0]));
    }

    #[test]
    fn affine_energy_is_exact() {
        let p = MaterialParams::default();
        let f0 = Mat2::new(1.1, 0.2, -0.05, 0.8);
        let mut mesh = build_rect_mesh(3, 5, 2.0, 0.5).unwrap();
        mesh.set_deformation(affine(f0));
        let expected = 1.0 * energy(&p, &f0).value();
        assert!((total_energy(&p, &mesh) - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn inverted_element_gives_infinite_energy() {
        let p = MaterialParams::default();
        let mut mesh = build_rect_mesh(2, 2, 1.0, 1.0).unwrap();
        // Push the centre node across the far corner.
        mesh.deformed[4] = [1.5, 1.5];
        assert_eq!(total_energy(&p, &mesh), f64::INFINITY);
        assert_eq!(energy_gradient(&p, &mesh), Err(Error::InadmissibleState));
    }

    #[test]
    fn homogeneous_state_is_equilibrated() {
        let p = MaterialParams::default();
        let f0 = Mat2::new(1.2, 0.1, 0.0, 0.9);
        let mut mesh = build_rect_mesh(2, 2, 1.0, 1.0).unwrap();
        mesh.set_deformation(affine(f0));
        let g = energy_gradient(&p, &mesh).unwrap();
        let fd = fd_gradient(&p, &mesh, 1e-6);
        assert!(norm(&g) < 1e-13);
        assert!(norm(&fd) < 1e-8);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = MaterialParams::default();
        let mut mesh = build_rect_mesh(3, 3, 1.0, 1.0).unwrap();
        mesh.set_deformation(affine(Mat2::new(1.1, 0.3, 0.0, 0.95)));
        mesh.perturb_interior(0.05, 17).unwrap();
        let g = energy_gradient(&p, &mesh).unwrap();
        let fd = fd_gradient(&p, &mesh, 1e-6);
        let scale = 1.0 + norm(&g);
        for (a, b) in g.iter().zip(&fd) {
            assert!((a[0] - b[0]).abs() < 1e-5 * scale && (a[1] - b[1]).abs() < 1e-5 * scale);
        }
    }

    #[test]
    fn identity_data_converges_immediately() {
        let p = MaterialParams::default();
        let mut mesh = build_rect_mesh(4, 4, 1.0, 1.0).unwrap();
        let r = minimize(&p, &mut mesh, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 0);
        assert!((r.final_energy - p.reference_energy()).abs() < 1e-13);
    }

    #[test]
    fn perturbed_affine_problem_relaxes() {
        let p = MaterialParams::default();
        let f0 = Mat2::diag(1.2, 0.9);
        let mut mesh = build_rect_mesh(4, 4, 1.0, 1.0).unwrap();
        mesh.apply_dirichlet(affine(f0));
        mesh.affine_extension();
        mesh.perturb_interior(0.03, 1).unwrap();
        let r = minimize(&p, &mut mesh, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.energy_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.min_element_det > 0.0);
        let target = energy(&p, &f0).value();
        assert!(r.final_energy >= target * (1.0 - 1e-14));
        assert!((r.final_energy - target).abs() < 1e-8 * target);
    }

    #[test]
    fn inadmissible_start_is_rejected() {
        let p = MaterialParams::default();
        let mut mesh = build_rect_mesh(2, 2, 1.0, 1.0).unwrap();
        mesh.deformed[4] = [1.5, 1.5];
        assert_eq!(
            minimize(&p, &mut mesh, &SolveOptions::default()),
            Err(Error::InadmissibleState)
        );
    }

    #[test]
    fn exhausted_line_search_reports_no_descent() {
        let p = MaterialParams::default();
        let mut mesh = build_rect_mesh(2, 2, 1.0, 1.0).unwrap();
        mesh.deformed[4] = [0.6, 0.55];
        let opts = SolveOptions {
            max_halvings: 0,
            ..SolveOptions::default()
        };
        // A unit first step overshoots badly, and no reduction is allowed.
        let r = minimize(
            &p,
            &mut mesh,
            &SolveOptions {
                max_iter: 1000,
                ..opts
            },
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::NoDescent);
        assert!(r.final_energy <= r.initial_energy);
    }
}
