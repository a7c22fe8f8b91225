use hencky::elastostatics::{
    build_rect_mesh, energy_gradient, minimize, read_mesh_text, total_energy, write_mesh_text,
    BoundaryData, InitStatus, MeshState, SolveOptions, SolveStatus,
};
use hencky::{energy, Mat2, MaterialParams};

fn affine_problem(n: usize, f0: Mat2, perturb: f64, seed: u64) -> MeshState {
    let mut mesh = build_rect_mesh(n, n, 1.0, 1.0).unwrap();
    mesh.apply_dirichlet(|x| f0.mul_vec(x));
    assert_eq!(mesh.affine_extension(), InitStatus::AffineExtension);
    if perturb > 0.0 {
        mesh.perturb_interior(perturb, seed).unwrap();
    }
    mesh
}

fn max_node_error(mesh: &MeshState, f0: Mat2) -> f64 {
    mesh.nodes
        .iter()
        .zip(&mesh.deformed)
        .map(|(x, y)| {
            let a = f0.mul_vec(*x);
            (a[0] - y[0]).abs().max((a[1] - y[1]).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn affine_reproduction_on_refined_meshes() {
    let p = MaterialParams::default();
    for f0 in [
        Mat2::diag(1.2, 0.9),
        Mat2::new(1.0, 0.3, -0.1, 1.1),
        Mat2::new(0.7, -0.2, 0.4, 0.8),
    ] {
        let target = energy(&p, &f0).value();
        for n in [2, 8, 16] {
            let mut mesh = affine_problem(n, f0, 0.16 / n as f64, n as u64);
            let r = minimize(&p, &mut mesh, &SolveOptions::default()).unwrap();
            assert_eq!(r.status, SolveStatus::Converged, "n = {n}, F0 = {f0}");
            assert!(r.final_energy >= target * (1.0 - 1e-14));
            assert!((r.final_energy - target) / target < 1e-6);
            assert!(max_node_error(&mesh, f0) < 1e-4);
            assert!(r.min_element_det > 0.0);
        }
    }
}

#[test]
fn perturbed_solve_is_monotone_and_admissible() {
    let p = MaterialParams::default();
    let f0 = Mat2::diag(1.2, 0.9);
    let mut mesh = affine_problem(8, f0, 0.02, 3);
    let r = minimize(&p, &mut mesh, &SolveOptions::default()).unwrap();
    assert!(r.energy_history.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(r.energy_history.len(), r.iterations + 1);
    assert!(r.final_energy <= r.initial_energy);
    assert!(r.min_element_det > 0.0);
    assert_eq!(r.deformed, mesh.deformed);
}

#[test]
fn rotated_boundary_data_leave_energy_unchanged() {
    let p = MaterialParams::default();
    let f0 = Mat2::new(1.1, 0.25, 0.0, 0.95);
    let q = Mat2::rotation(0.7);
    let solve = |data: Mat2| {
        let mut mesh = affine_problem(6, data, 0.02, 11);
        minimize(&p, &mut mesh, &SolveOptions::default())
            .unwrap()
            .final_energy
    };
    let (e, e_rot) = (solve(f0), solve(q * f0));
    assert!((e - e_rot).abs() <= 1e-10 * e);
}

#[test]
fn shear_data() {
    let p = MaterialParams::default();
    let data = BoundaryData::Shear(0.4);
    let mut mesh = build_rect_mesh(6, 6, 1.0, 1.0).unwrap();
    mesh.apply_dirichlet(|x| data.map(x));
    mesh.affine_extension();
    let r = minimize(&p, &mut mesh, &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    assert!((r.final_energy - energy(&p, &data.gradient()).value()).abs() < 1e-12 * r.final_energy);
}

#[test]
fn gradient_matches_central_differences_on_random_states() {
    let p = MaterialParams::default();
    for seed in 0..5 {
        let mut mesh = build_rect_mesh(4, 3, 1.0, 0.75).unwrap();
        mesh.set_deformation(|x| [1.1 * x[0] + 0.2 * x[1], -0.1 * x[0] + 0.9 * x[1]]);
        mesh.perturb_interior(0.04, seed).unwrap();
        let g = energy_gradient(&p, &mesh).unwrap();
        let h = 1e-6;
        for i in mesh.interior_nodes().collect::<Vec<_>>() {
            for (c, &gc) in g[i].iter().enumerate() {
                let mut plus = mesh.clone();
                plus.deformed[i][c] += h;
                let mut minus = mesh.clone();
                minus.deformed[i][c] -= h;
                let fd = (total_energy(&p, &plus) - total_energy(&p, &minus)) / (2.0 * h);
                assert!(
                    (fd - gc).abs() <= 1e-5 * (1.0 + gc.abs()),
                    "node {i}: {fd} vs {gc}"
                );
            }
        }
    }
}

#[test]
fn assembly_is_bit_reproducible_across_thread_pools() {
    let p = MaterialParams::default();
    // Large enough to take the parallel path.
    let mut mesh = build_rect_mesh(24, 24, 1.0, 1.0).unwrap();
    mesh.set_deformation(|x| [1.05 * x[0], 0.97 * x[1] + 0.1 * x[0]]);
    mesh.perturb_interior(0.002, 9).unwrap();
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let (e1, g1) =
        serial.install(|| (total_energy(&p, &mesh), energy_gradient(&p, &mesh).unwrap()));
    let (e2, g2) = (total_energy(&p, &mesh), energy_gradient(&p, &mesh).unwrap());
    assert_eq!(e1.to_bits(), e2.to_bits());
    assert_eq!(g1, g2);
}

#[test]
fn exported_mesh_round_trips() {
    let f0 = Mat2::diag(1.2, 0.9);
    let mesh = affine_problem(5, f0, 0.02, 4);
    let back = read_mesh_text(&write_mesh_text(&mesh)).unwrap();
    assert_eq!(back.triangles, mesh.triangles);
    assert_eq!(back.boundary_nodes, mesh.boundary_nodes);
    for (a, b) in back.deformed.iter().zip(&mesh.deformed) {
        assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
    }
}
