use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sampling::sample_rng;
use crate::tensor2::Mat2;

pub type Point = [f64; 2];

/// Triangulated reference domain together with the current deformation.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshState {
    pub nodes: Vec<Point>,
    /// Counterclockwise node-index triples.
    pub triangles: Vec<[usize; 3]>,
    /// Sorted indices of Dirichlet nodes.
    pub boundary_nodes: Vec<usize>,
    pub deformed: Vec<Point>,
    is_dirichlet: Vec<bool>,
}

/// Reference geometry of a P1 element.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub area: f64,
    /// Inverse of the reference edge matrix `[X₁ − X₀, X₂ − X₀]`.
    pub dm_inv: Mat2,
}

impl ElementGeometry {
    /// Gradients of the three barycentric shape functions.
    pub fn shape_gradients(&self) -> [Point; 3] {
        let [a, b, c, d] = self.dm_inv.0;
        let g1 = [a, b];
        let g2 = [c, d];
        [[-(a + c), -(b + d)], g1, g2]
    }
}

impl MeshState {
    /// Builds a mesh in its reference configuration. Fails on out-of-range
    /// indices or a triangle without positive (counterclockwise) area.
    pub fn new(
        nodes: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_nodes: Vec<usize>,
    ) -> Result<Self> {
        let n = nodes.len();
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&i| i >= n)) {
            return Err(Error::Mesh(format!(
                "triangle {t:?} references a missing node"
            )));
        }
        let mut boundary_nodes = boundary_nodes;
        boundary_nodes.sort_unstable();
        boundary_nodes.dedup();
        if boundary_nodes.last().is_some_and(|&i| i >= n) {
            return Err(Error::Mesh("boundary node index out of range".into()));
        }
        let mut is_dirichlet = vec![false; n];
        for &i in &boundary_nodes {
            is_dirichlet[i] = true;
        }
        let mesh = MeshState {
            deformed: nodes.clone(),
            nodes,
            triangles,
            boundary_nodes,
            is_dirichlet,
        };
        for (e, _) in mesh.triangles.iter().enumerate() {
            let area = 0.5 * mesh.reference_edges(e).det();
            if !(area > 0.0) {
                return Err(Error::Mesh(format!("triangle {e} has area {area}")));
            }
        }
        Ok(mesh)
    }

    pub fn is_dirichlet(&self, node: usize) -> bool {
        self.is_dirichlet[node]
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.is_dirichlet[i])
    }

    fn edges(points: &[Point], tri: &[usize; 3]) -> Mat2 {
        let [p0, p1, p2] = tri.map(|i| points[i]);
        Mat2::from_cols(
            [p1[0] - p0[0], p1[1] - p0[1]],
            [p2[0] - p0[0], p2[1] - p0[1]],
        )
    }

    fn reference_edges(&self, e: usize) -> Mat2 {
        Self::edges(&self.nodes, &self.triangles[e])
    }

    pub fn geometry(&self, e: usize) -> ElementGeometry {
        let dm = self.reference_edges(e);
        ElementGeometry {
            area: 0.5 * dm.det(),
            dm_inv: dm
                .inverse()
                .expect("reference triangles have positive area"),
        }
    }

    pub fn geometries(&self) -> Vec<ElementGeometry> {
        (0..self.triangles.len())
            .map(|e| self.geometry(e))
            .collect()
    }

    /// Constant deformation gradient of element `e` for positions `x`.
    pub fn deformation_gradient_at(&self, x: &[Point], e: usize, geom: &ElementGeometry) -> Mat2 {
        Self::edges(x, &self.triangles[e]) * geom.dm_inv
    }

    pub fn deformation_gradient(&self, e: usize) -> Mat2 {
        self.deformation_gradient_at(&self.deformed, e, &self.geometry(e))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|e| self.geometry(e).area)
            .sum()
    }

    /// Smallest `det F` over all elements of the current state.
    pub fn min_element_det(&self) -> f64 {
        (0..self.triangles.len())
            .map(|e| self.deformation_gradient(e).det())
            .fold(f64::INFINITY, f64::min)
    }

    /// Sets every node (boundary and interior) to `phi(X)`.
    pub fn set_deformation(&mut self, phi: impl Fn(Point) -> Point) {
        for (x, p) in self.deformed.iter_mut().zip(&self.nodes) {
            *x = phi(*p);
        }
    }

    /// Prescribes `phi` on the Dirichlet nodes only.
    pub fn apply_dirichlet(&mut self, phi: impl Fn(Point) -> Point) {
        for &i in &self.boundary_nodes {
            self.deformed[i] = phi(self.nodes[i]);
        }
    }

    /// Fills interior nodes from the least-squares affine fit `X ↦ A X + b`
    /// of the Dirichlet data. Falls back to the reference positions if the
    /// fit is degenerate or produces an inverted element.
    pub fn affine_extension(&mut self) -> InitStatus {
        let fit = self.fit_boundary_affine();
        if let Some((a, b)) = fit {
            if a.det() > 0.0 {
                let saved = self.deformed.clone();
                for i in 0..self.nodes.len() {
                    if !self.is_dirichlet[i] {
                        let ax = a.mul_vec(self.nodes[i]);
                        self.deformed[i] = [ax[0] + b[0], ax[1] + b[1]];
                    }
                }
                if self.min_element_det() > 0.0 {
                    return InitStatus::AffineExtension;
                }
                self.deformed = saved;
            }
        }
        for i in 0..self.nodes.len() {
            if !self.is_dirichlet[i] {
                self.deformed[i] = self.nodes[i];
            }
        }
        InitStatus::IdentityFallback
    }

    fn fit_boundary_affine(&self) -> Option<(Mat2, Point)> {
        // Normal equations for [X, Y, 1]·c = x, solved for both components.
        let mut ata = [[0.0; 3]; 3];
        let mut atx = [[0.0; 3]; 2];
        for &i in &self.boundary_nodes {
            let row = [self.nodes[i][0], self.nodes[i][1], 1.0];
            for r in 0..3 {
                for c in 0..3 {
                    ata[r][c] += row[r] * row[c];
                }
                for (rhs, x) in atx.iter_mut().zip(self.deformed[i]) {
                    rhs[r] += row[r] * x;
                }
            }
        }
        let cx = solve3(ata, atx[0])?;
        let cy = solve3(ata, atx[1])?;
        Some((Mat2::new(cx[0], cx[1], cy[0], cy[1]), [cx[2], cy[2]]))
    }

    /// Adds a seeded uniform perturbation in `[−amplitude, amplitude]²` to
    /// every interior node.
    pub fn perturb_interior(&mut self, amplitude: f64, seed: u64) -> Result<()> {
        for i in 0..self.nodes.len() {
            if !self.is_dirichlet[i] {
                let mut rng = sample_rng(seed, i as u64);
                self.deformed[i][0] += rng.gen_range(-amplitude..=amplitude);
                self.deformed[i][1] += rng.gen_range(-amplitude..=amplitude);
            }
        }
        if self.min_element_det() > 0.0 {
            Ok(())
        } else {
            Err(Error::InadmissibleState)
        }
    }

    /// Nodes on edges that belong to exactly one triangle.
    pub fn topological_boundary(triangles: &[[usize; 3]]) -> Vec<usize> {
        let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *edge_count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut nodes: Vec<usize> = edge_count
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .flat_map(|((a, b), _)| [a, b])
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }
}

/// How the interior was initialized by [`MeshState::affine_extension`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStatus {
    AffineExtension,
    IdentityFallback,
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(a);
    let scale: f64 = a.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    if !(d.abs() > 1e-14 * scale.powi(3)) {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *slot = det3(m) / d;
    }
    Some(out)
}

/// Structured triangulation of `[0, width] × [0, height]`: each of the
/// `nx × ny` cells is split along its rising diagonal, and every boundary
/// node is Dirichlet.
pub fn build_rect_mesh(nx: usize, ny: usize, width: f64, height: f64) -> Result<MeshState> {
    if nx == 0 || ny == 0 {
        return Err(Error::Mesh(format!("need nx, ny >= 1, got {nx}x{ny}")));
    }
    if !(width > 0.0 && height > 0.0) {
        return Err(Error::Mesh(format!(
            "need positive size, got {width} x {height}"
        )));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    let mut boundary = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([width * i as f64 / nx as f64, height * j as f64 / ny as f64]);
            if i == 0 || j == 0 || i == nx || j == ny {
                boundary.push(id(i, j));
            }
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    MeshState::new(nodes, triangles, boundary)
}
