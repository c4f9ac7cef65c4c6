//! Builders and closed-form oracles shared by the integration suites.
#![allow(dead_code)]

pub mod decay;
pub mod film;
pub mod oracle;

use std::collections::BTreeSet;

use ebfvm::assembly::MeshGeometry;
use ebfvm::elements::ElementKind;
use ebfvm::lubrication::{
    assemble_gre_system, build_gre_problem, FilmState, GreCoefficients, KinematicsState, PressureBoundary,
};
use ebfvm::mesh::{Element, Mesh, AXIAL_LEFT, AXIAL_RIGHT};
use ebfvm::solvers::GreSystem;

/// `nx` Quad4 cells along x on `[0, length] × [0, width]`. The x = 0 and
/// x = length node rows carry the two axial set names so the film builder
/// pins them to the ambient pressure.
pub fn strip_mesh(nx: usize, length: f64, width: f64) -> Mesh {
    let mut mesh = Mesh::default();
    for j in 0..2 {
        for i in 0..=nx {
            mesh.nodes.push([length * i as f64 / nx as f64, width * j as f64, 0.0]);
        }
    }
    let row = nx + 1;
    for i in 0..nx {
        mesh.elements.push(Element {
            kind: ElementKind::Quad4,
            nodes: vec![i, i + 1, row + i + 1, row + i],
        });
    }
    mesh.boundary_sets.insert(AXIAL_LEFT.into(), BTreeSet::from([0, row]));
    mesh.boundary_sets
        .insert(AXIAL_RIGHT.into(), BTreeSet::from([nx, row + nx]));
    mesh
}

pub struct Strip {
    pub mesh: Mesh,
    pub geometry: MeshGeometry,
    pub system: GreSystem,
    pub h: Vec<f64>,
}

/// Steady isoviscous film on a strip with the journal sliding at `speed`
/// along +x and both ends held at `p_amb`.
pub fn gre_strip(
    gap: impl Fn(f64) -> f64,
    nx: usize,
    length: f64,
    speed: f64,
    p_amb: f64,
    rho: f64,
    eta: f64,
) -> Strip {
    let mesh = strip_mesh(nx, length, length / nx as f64);
    let geometry = MeshGeometry::new(&mesh).unwrap();
    let h: Vec<f64> = mesh.nodes.iter().map(|p| gap(p[0])).collect();
    let coefficients = h.iter().map(|&hi| GreCoefficients::isoviscous(hi, rho, eta)).collect();
    let state = FilmState::new(h.clone(), p_amb, coefficients);
    let kin = KinematicsState {
        u1: speed,
        ..KinematicsState::default()
    };
    let bounds = PressureBoundary {
        ambient: p_amb,
        supply: p_amb,
    };
    let (problem, bcs) = build_gre_problem(&mesh, &state, &kin, bounds, None);
    let system = assemble_gre_system(&mesh, &geometry, &problem, &bcs).unwrap();
    Strip {
        mesh,
        geometry,
        system,
        h,
    }
}

/// Closed-form pressure of a linear-wedge slider
/// `h = h_in + (h_out − h_in) x / L` with ambient ends.
pub fn wedge_pressure(x: f64, h_in: f64, h_out: f64, length: f64, speed: f64, eta: f64, p_amb: f64) -> f64 {
    let b = (h_out - h_in) / length;
    let h = |x: f64| h_in + b * x;
    let i2 = |x: f64| (1.0 / h_in - 1.0 / h(x)) / b;
    let i3 = |x: f64| (1.0 / (h_in * h_in) - 1.0 / (h(x) * h(x))) / (2.0 * b);
    let h_star = i2(length) / i3(length);
    p_amb + 6.0 * eta * speed * (i2(x) - h_star * i3(x))
}

/// Balance `Σ D p − Σ C θ − S₁ θ + b` of the unconstrained equations over
/// `nodes`: the net mass the solution pushes through those constrained CVs.
pub fn reaction(system: &GreSystem, p: &[f64], theta: &[f64], nodes: impl IntoIterator<Item = usize>) -> f64 {
    let dp = system.diffusion.mul_vec(p);
    let ct = system.convection.mul_vec(theta);
    nodes
        .into_iter()
        .map(|i| dp[i] - ct[i] - system.capacity[i] * theta[i] + system.rhs[i])
        .sum()
}

pub fn l2(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}
