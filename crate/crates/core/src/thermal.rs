//! Film energy balance on the layered 3D film mesh.
//!
//! The film mesh is extruded from the surface mesh with `z = 0` on the
//! bushing and `z = h` on the journal. Temperature is transported with
//! capacity `ρc_p`, diffusivity `kI` and carrier flux `ρc_p v`, in advective
//! form so that the reconstructed velocity need not be discretely
//! solenoidal.

use std::collections::BTreeSet;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use thiserror::Error;

use crate::assembly::{AssemblyError, BoundaryConditions, MeshGeometry, TransportProblem};
use crate::elements::{gradient_tensor, ElementError};
use crate::lubrication::LubricantModel;
use crate::mesh::{Element, Mesh, MeshError, AXIAL_LEFT, AXIAL_RIGHT, FEED_HOLE};

pub const BUSHING_WALL: &str = "bushing_wall";
pub const JOURNAL_WALL: &str = "journal_wall";

#[derive(Debug, Error)]
pub enum ThermalError {
    #[error("film thickness {h:e} at surface node {node} is not positive")]
    NonPositiveGap { node: usize, h: f64 },
    #[error("at least 2 layers are needed, got {0}")]
    TooFewLayers(usize),
    #[error("surface element {0} is not a 2D element")]
    NotSurface(usize),
    #[error("field length {got} does not match {expected}")]
    FieldLength { got: usize, expected: usize },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

/// Layered film mesh: `columns[i][k]` is the 3D node at level `k` above
/// surface node `i`.
#[derive(Debug, Clone)]
pub struct FilmMesh3D {
    pub mesh: Mesh,
    pub n_layers: usize,
    pub columns: Vec<Vec<usize>>,
}

impl FilmMesh3D {
    pub fn surface_count(&self) -> usize {
        self.columns.len()
    }

    /// Surface node below each 3D node.
    pub fn surface_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.mesh.nodes.len()];
        for (i, col) in self.columns.iter().enumerate() {
            for &n in col {
                out[n] = i;
            }
        }
        out
    }

    /// Gap height per surface node.
    pub fn heights(&self) -> Vec<f64> {
        self.columns
            .iter()
            .map(|c| self.mesh.nodes[c[self.n_layers]][2])
            .collect()
    }
}

/// Stacks `n_layers` layers of Hex8 (from Quad4) or Prism6 (from Tri3)
/// between the bushing and the journal, node id `i·(n_layers+1) + k`.
pub fn extrude_film_mesh(surface: &Mesh, h: &[f64], n_layers: usize) -> Result<FilmMesh3D, ThermalError> {
    if n_layers < 2 {
        return Err(ThermalError::TooFewLayers(n_layers));
    }
    if h.len() != surface.nodes.len() {
        return Err(ThermalError::FieldLength {
            got: h.len(),
            expected: surface.nodes.len(),
        });
    }
    if let Some((node, &h)) = h.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(ThermalError::NonPositiveGap { node, h });
    }
    let nl = n_layers + 1;
    let id = |i: usize, k: usize| i * nl + k;
    let mut mesh = Mesh::default();
    let mut columns = Vec::with_capacity(surface.nodes.len());
    for (i, p) in surface.nodes.iter().enumerate() {
        let mut col = Vec::with_capacity(nl);
        for k in 0..nl {
            mesh.nodes.push([p[0], p[1], k as f64 * h[i] / n_layers as f64]);
            col.push(id(i, k));
        }
        columns.push(col);
    }
    for (e, el) in surface.elements.iter().enumerate() {
        let kind = el.kind.extruded().ok_or(ThermalError::NotSurface(e))?;
        for k in 0..n_layers {
            let mut nodes: Vec<usize> = el.nodes.iter().map(|&n| id(n, k)).collect();
            nodes.extend(el.nodes.iter().map(|&n| id(n, k + 1)));
            mesh.elements.push(Element { kind, nodes });
        }
    }
    for (name, set) in &surface.boundary_sets {
        let lifted: BTreeSet<usize> = set.iter().flat_map(|&i| columns[i].iter().copied()).collect();
        mesh.boundary_sets.insert(name.clone(), lifted);
    }
    mesh.boundary_sets
        .insert(BUSHING_WALL.into(), columns.iter().map(|c| c[0]).collect());
    mesh.boundary_sets
        .insert(JOURNAL_WALL.into(), columns.iter().map(|c| c[n_layers]).collect());
    for &(m, s) in &surface.periodic_pairs {
        for k in 0..nl {
            mesh.periodic_pairs.push((id(m, k), id(s, k)));
        }
    }
    mesh.validate()?;
    Ok(FilmMesh3D {
        mesh,
        n_layers,
        columns,
    })
}

/// Volume-weighted average of element gradients evaluated at SCV centroids.
/// Periodic images share one value.
pub fn nodal_gradients(mesh: &Mesh, geometry: &MeshGeometry, field: &[f64]) -> Result<Vec<Vector3<f64>>, ThermalError> {
    let n = mesh.nodes.len();
    if field.len() != n {
        return Err(ThermalError::FieldLength {
            got: field.len(),
            expected: n,
        });
    }
    let locals = mesh
        .elements
        .par_iter()
        .zip(&geometry.elements)
        .map(|(el, geom)| {
            let reference = el.kind.reference();
            reference
                .scv_centroids
                .iter()
                .zip(&geom.scv_volumes)
                .map(|(&xi, &vol)| {
                    let g = gradient_tensor(el.kind, &geom.nodes, xi)?;
                    let grad: Vector3<f64> = g.iter().zip(&el.nodes).map(|(gk, &nk)| gk * field[nk]).sum();
                    Ok(grad * vol)
                })
                .collect::<Result<Vec<_>, ElementError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut sum = vec![Vector3::zeros(); n];
    let mut vol = geometry.node_volumes.clone();
    for (el, contrib) in mesh.elements.iter().zip(locals) {
        for (&node, c) in el.nodes.iter().zip(contrib) {
            sum[node] += c;
        }
    }
    for &(m, s) in &mesh.periodic_pairs {
        let g = sum[m] + sum[s];
        sum[m] = g;
        sum[s] = g;
        let v = vol[m] + vol[s];
        vol[m] = v;
        vol[s] = v;
    }
    Ok(sum.iter().zip(&vol).map(|(g, v)| g / *v).collect())
}

/// In-plane velocities of the two walls.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WallVelocities {
    pub bushing: [f64; 2],
    pub journal: [f64; 2],
}

/// Nodal 3D velocity and its cross-film shear.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub v: Vec<Vector3<f64>>,
    /// `(∂u/∂z, ∂v/∂z)` per node.
    pub shear: Vec<[f64; 2]>,
}

fn cumulative_trapezoid(f: &[f64], z: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for k in 1..f.len() {
        out[k] = out[k - 1] + 0.5 * (f[k] + f[k - 1]) * (z[k] - z[k - 1]);
    }
    out
}

/// Thin-film velocity profile in every column:
///
/// ```text
/// u(z) = u_b + ∂p/∂x (F₁(z) − F₁(h)/F₀(h) F₀(z)) + (u_j − u_b) F₀(z)/F₀(h)
/// ```
///
/// with `F₀ = ∫₀^z dz'/η` and `F₁ = ∫₀^z z' dz'/η`, and the same for `v`.
/// `w` integrates continuity upward from `w(0) = 0`.
pub fn reconstruct_velocity(
    film: &FilmMesh3D,
    geometry: &MeshGeometry,
    grad_p: &[Vector3<f64>],
    eta: &[f64],
    walls: WallVelocities,
) -> Result<VelocityField, ThermalError> {
    let n = film.mesh.nodes.len();
    if grad_p.len() != film.surface_count() {
        return Err(ThermalError::FieldLength {
            got: grad_p.len(),
            expected: film.surface_count(),
        });
    }
    if eta.len() != n {
        return Err(ThermalError::FieldLength {
            got: eta.len(),
            expected: n,
        });
    }
    let mut v = vec![Vector3::zeros(); n];
    let mut shear = vec![[0.0; 2]; n];
    for (i, col) in film.columns.iter().enumerate() {
        let z: Vec<f64> = col.iter().map(|&c| film.mesh.nodes[c][2]).collect();
        let h = z[film.n_layers];
        if !(h > 0.0) {
            return Err(ThermalError::NonPositiveGap { node: i, h });
        }
        let inv: Vec<f64> = col.iter().map(|&c| 1.0 / eta[c]).collect();
        let zinv: Vec<f64> = inv.iter().zip(&z).map(|(a, b)| a * b).collect();
        let f0 = cumulative_trapezoid(&inv, &z);
        let f1 = cumulative_trapezoid(&zinv, &z);
        let (f0h, f1h) = (f0[film.n_layers], f1[film.n_layers]);
        let lever = f1h / f0h;
        for (k, &node) in col.iter().enumerate() {
            for d in 0..2 {
                let (ub, uj) = (walls.bushing[d], walls.journal[d]);
                let g = grad_p[i][d];
                v[node][d] = if k == 0 {
                    ub
                } else if k == film.n_layers {
                    uj
                } else {
                    ub + g * (f1[k] - lever * f0[k]) + (uj - ub) * f0[k] / f0h
                };
                shear[node][d] = (g * (z[k] - lever) + (uj - ub) / f0h) * inv[k];
            }
        }
    }
    let u: Vec<f64> = v.iter().map(|x| x[0]).collect();
    let vv: Vec<f64> = v.iter().map(|x| x[1]).collect();
    let gu = nodal_gradients(&film.mesh, geometry, &u)?;
    let gv = nodal_gradients(&film.mesh, geometry, &vv)?;
    for col in &film.columns {
        let mut w = 0.0;
        for k in 1..col.len() {
            let (a, b) = (col[k - 1], col[k]);
            let dz = film.mesh.nodes[b][2] - film.mesh.nodes[a][2];
            let div_a = gu[a][0] + gv[a][1];
            let div_b = gu[b][0] + gv[b][1];
            w -= 0.5 * (div_a + div_b) * dz;
            v[b][2] = w;
        }
    }
    Ok(VelocityField { v, shear })
}

/// Inputs of the volumetric heat source.
#[derive(Debug, Clone, Copy)]
pub struct HeatSourceInput<'a> {
    /// 3D nodal temperature.
    pub temperature: &'a [f64],
    /// Surface pressure gradient.
    pub grad_p: &'a [Vector3<f64>],
    /// Surface `∂p/∂t`, `None` for steady runs.
    pub dp_dt: Option<&'a [f64]>,
    pub velocity: &'a VelocityField,
    /// 3D nodal effective viscosity (mixture weighted where cavitated).
    pub eta: &'a [f64],
}

/// `Q_T = Q_p + Q_cp + Q_Φ` with `Q_p = βT(∂p/∂t + v·∇p)`,
/// `Q_Φ = η[(∂u/∂z)² + (∂v/∂z)²]` and `Q_cp = 0` for constant `c_p`.
pub fn heat_sources(film: &FilmMesh3D, input: &HeatSourceInput<'_>, model: &LubricantModel) -> Vec<f64> {
    let surface = film.surface_of();
    (0..film.mesh.nodes.len())
        .into_par_iter()
        .map(|n| {
            let i = surface[n];
            let v = input.velocity.v[n];
            let g = input.grad_p[i];
            let dpdt = input.dp_dt.map_or(0.0, |d| d[i]);
            let q_p = model.beta * input.temperature[n] * (dpdt + v[0] * g[0] + v[1] * g[1]);
            let [sx, sy] = input.velocity.shear[n];
            let q_phi = input.eta[n] * (sx * sx + sy * sy);
            q_p + q_phi
        })
        .collect()
}

/// Thermal boundary values; `None` leaves the boundary adiabatic.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ThermalBoundary {
    pub ambient: Option<f64>,
    pub supply: Option<f64>,
    pub bushing_wall: Option<f64>,
    pub journal_wall: Option<f64>,
}

impl ThermalBoundary {
    /// Ambient temperature at the axial ends, supply temperature in the feed
    /// hole, adiabatic walls.
    pub fn bearing(ambient: f64, supply: f64) -> Self {
        Self {
            ambient: Some(ambient),
            supply: Some(supply),
            bushing_wall: None,
            journal_wall: None,
        }
    }
}

/// Per-node material data of the energy problem.
#[derive(Debug, Clone, Copy)]
pub struct EnergyInput<'a> {
    pub velocity: &'a VelocityField,
    pub source: &'a [f64],
    /// Effective density (mixture weighted where cavitated).
    pub rho: &'a [f64],
    pub rho_old: Option<&'a [f64]>,
    pub t_old: &'a [f64],
    pub time_step: Option<f64>,
}

pub fn build_energy_problem(
    film: &FilmMesh3D,
    input: &EnergyInput<'_>,
    model: &LubricantModel,
    boundary: &ThermalBoundary,
) -> (TransportProblem, BoundaryConditions) {
    let mesh = &film.mesh;
    let n = mesh.nodes.len();
    let mut problem = TransportProblem::new(n);
    let k = Matrix3::from_diagonal_element(model.k);
    for i in 0..n {
        let rc = input.rho[i] * model.cp;
        problem.diffusivity[i] = k;
        problem.convective_flux[i] = rc * input.velocity.v[i];
        problem.capacity[i] = rc;
        problem.capacity_old[i] = input.rho_old.map_or(rc, |r| r[i] * model.cp);
    }
    problem.source = input.source.to_vec();
    problem.previous = input.t_old.to_vec();
    problem.time_step = input.time_step;
    problem.advective_form = true;
    let mut bcs = BoundaryConditions::from_mesh(mesh);
    // walls first so the axial and feed values win on shared edges
    if let Some(t) = boundary.bushing_wall {
        bcs.set_dirichlet(mesh.set(BUSHING_WALL), t);
    }
    if let Some(t) = boundary.journal_wall {
        bcs.set_dirichlet(mesh.set(JOURNAL_WALL), t);
    }
    if let Some(t) = boundary.ambient {
        bcs.set_dirichlet(mesh.set(AXIAL_LEFT).chain(mesh.set(AXIAL_RIGHT)), t);
    }
    if let Some(t) = boundary.supply {
        bcs.set_dirichlet(mesh.set(FEED_HOLE), t);
    }
    (problem, bcs)
}

/// Value at `z = h/2` in every column.
pub fn extract_midplane(film: &FilmMesh3D, t: &[f64]) -> Vec<f64> {
    let nl = film.n_layers;
    film.columns
        .iter()
        .map(|c| {
            if nl % 2 == 0 {
                t[c[nl / 2]]
            } else {
                0.5 * (t[c[nl / 2]] + t[c[nl / 2 + 1]])
            }
        })
        .collect()
}
