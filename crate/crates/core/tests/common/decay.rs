//! Backward-Euler decay of a film temperature disturbance.

use ebfvm::assembly::{step_transient, BoundaryConditions, MeshGeometry, TransportProblem};
use ebfvm::elements::ElementKind;
use ebfvm::mesh::{generate_bearing_mesh, DomainSpec, TextureSpec, AXIAL_LEFT, AXIAL_RIGHT};
use ebfvm::solvers::LinearConfig;
use nalgebra::Matrix3;

/// Volume-weighted L2 norms of a disturbance on a converging film with
/// cold walls and ends, before and after each of six steps of size `dt`.
pub fn film_decay(kind: ElementKind, dt: f64) -> Vec<f64> {
    let domain = DomainSpec {
        radius: 0.01,
        width: 0.01,
        clearance: 2e-5,
        nx: 8,
        ny: 4,
        element: kind,
        bands: Vec::new(),
        feature_refinement: 1,
    };
    let surface = generate_bearing_mesh(&domain, &TextureSpec::default()).unwrap();
    let h: Vec<f64> = surface
        .nodes
        .iter()
        .map(|p| 2e-5 * (1.5 + (p[0] / 0.01).cos()))
        .collect();
    let film = ebfvm::thermal::extrude_film_mesh(&surface, &h, 8).unwrap();
    let mesh = &film.mesh;
    let geometry = MeshGeometry::new(mesh).unwrap();
    let n = mesh.nodes.len();
    let mut problem = TransportProblem::new(n);
    problem.diffusivity = vec![Matrix3::identity() * 0.13; n];
    problem.capacity = vec![850.0 * 2000.0; n];
    problem.capacity_old = problem.capacity.clone();
    problem.time_step = Some(dt);
    let mut bcs = BoundaryConditions::from_mesh(mesh);
    bcs.set_dirichlet(
        mesh.set(AXIAL_LEFT)
            .chain(mesh.set(AXIAL_RIGHT))
            .chain(mesh.set(ebfvm::thermal::BUSHING_WALL))
            .chain(mesh.set(ebfvm::thermal::JOURNAL_WALL)),
        0.0,
    );
    let mut phi: Vec<f64> = mesh
        .nodes
        .iter()
        .map(|p| 50.0 * ((p[0] * 900.0).sin() + (p[1] * 300.0).cos()))
        .collect();
    for (&i, &v) in &bcs.dirichlet {
        phi[i] = v;
    }
    for &(m, s) in &bcs.periodic {
        phi[s] = phi[m];
    }
    let norm = |x: &[f64]| {
        x.iter()
            .zip(&geometry.node_volumes)
            .map(|(a, v)| a * a * v)
            .sum::<f64>()
            .sqrt()
    };
    let mut norms = vec![norm(&phi)];
    for _ in 0..6 {
        problem.previous = phi.clone();
        phi = step_transient(
            mesh,
            &geometry,
            &problem,
            &bcs,
            LinearConfig {
                tol: 1e-14,
                ..LinearConfig::default()
            },
        )
        .unwrap();
        norms.push(norm(&phi));
    }
    norms
}
