//! Plain-text mesh format: one `node x y u v` line per node, where `(u, v)`
//! is the displacement of the deformed position from `(x, y)`, followed by
//! one `tri i j k` line per triangle.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::mesh::MeshState;

pub fn write_mesh_text(mesh: &MeshState) -> String {
    let mut out = String::new();
    for (x, y) in mesh.nodes.iter().zip(&mesh.deformed) {
        let _ = writeln!(
            out,
            "node {} {} {} {}",
            x[0],
            x[1],
            y[0] - x[0],
            y[1] - x[1]
        );
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "tri {} {} {}", t[0], t[1], t[2]);
    }
    out
}

/// Parses [`write_mesh_text`] output. Blank lines and `#` comments are
/// skipped; Dirichlet nodes are the nodes on the topological boundary.
pub fn read_mesh_text(text: &str) -> Result<MeshState> {
    let mut nodes = Vec::new();
    let mut disp = Vec::new();
    let mut triangles = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::Mesh(format!("line {}: cannot parse `{line}`", lineno + 1));
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("node") => {
                let v: Vec<f64> = fields
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad())?;
                let [x, y, u, w] = v[..] else {
                    return Err(bad());
                };
                nodes.push([x, y]);
                disp.push([u, w]);
            }
            Some("tri") => {
                let v: Vec<usize> = fields
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad())?;
                let [i, j, k] = v[..] else { return Err(bad()) };
                triangles.push([i, j, k]);
            }
            _ => return Err(bad()),
        }
    }
    let boundary = MeshState::topological_boundary(&triangles);
    let mut mesh = MeshState::new(nodes, triangles, boundary)?;
    for (y, (x, d)) in mesh.deformed.iter_mut().zip(mesh.nodes.iter().zip(&disp)) {
        *y = [x[0] + d[0], x[1] + d[1]];
    }
    Ok(mesh)
}
