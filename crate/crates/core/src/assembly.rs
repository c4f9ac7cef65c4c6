//! Element matrices for diffusion, upwind convection and sources, and their
//! assembly into node-centred control-volume balances.
//!
//! Sign conventions: row `s` of the diffusion matrix is the net outward
//! diffusive flux `Σ (Γ∇φ)·ΔS` of SCV `s`; row `s` of the convection matrix
//! is its net outward convective flux. A steady transport balance reads
//! `(C − D) φ = S₃` and backward Euler adds `S₁ φⁿ + S₂ φⁿ⁻¹`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, Matrix3, Vector3};
use rayon::prelude::*;
use thiserror::Error;

use crate::elements::ElementGeometry;
use crate::mesh::{Mesh, MeshError};
use crate::solvers::{linear_solve, LinearConfig, SolverError};
use crate::sparse::CsrMatrix;

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("mesh has no elements")]
    EmptyMesh,
    #[error("node {0} is a periodic slave and cannot carry a Dirichlet value")]
    DirichletOnSlave(usize),
    #[error("field `{field}` has {got} entries, expected {expected}")]
    FieldLength {
        field: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("time step must be positive, got {0}")]
    TimeStep(f64),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Nodal coefficients of one advection–diffusion problem.
#[derive(Debug, Clone)]
pub struct TransportProblem {
    /// Γᵈ per node.
    pub diffusivity: Vec<Matrix3<f64>>,
    /// Product `Γᶜ v` per node, interpolated to integration points.
    pub convective_flux: Vec<Vector3<f64>>,
    /// ρⁿ per node (coefficient of φⁿ/Δt).
    pub capacity: Vec<f64>,
    /// ρⁿ⁻¹ per node.
    pub capacity_old: Vec<f64>,
    /// φⁿ⁻¹ per node.
    pub previous: Vec<f64>,
    /// Qⁿ per node.
    pub source: Vec<f64>,
    /// `None` for steady problems.
    pub time_step: Option<f64>,
    /// Subtract the discrete divergence of the carrier flux from each
    /// convection row so that constants are transported exactly.
    pub advective_form: bool,
}

impl TransportProblem {
    pub fn new(n: usize) -> Self {
        Self {
            diffusivity: vec![Matrix3::zeros(); n],
            convective_flux: vec![Vector3::zeros(); n],
            capacity: vec![0.0; n],
            capacity_old: vec![0.0; n],
            previous: vec![0.0; n],
            source: vec![0.0; n],
            time_step: None,
            advective_form: false,
        }
    }

    fn check(&self, n: usize) -> Result<(), AssemblyError> {
        let lens = [
            ("diffusivity", self.diffusivity.len()),
            ("convective_flux", self.convective_flux.len()),
            ("capacity", self.capacity.len()),
            ("capacity_old", self.capacity_old.len()),
            ("previous", self.previous.len()),
            ("source", self.source.len()),
        ];
        for (field, got) in lens {
            if got != n {
                return Err(AssemblyError::FieldLength {
                    field,
                    got,
                    expected: n,
                });
            }
        }
        if let Some(dt) = self.time_step {
            if !(dt > 0.0) {
                return Err(AssemblyError::TimeStep(dt));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct BoundaryConditions {
    pub dirichlet: BTreeMap<usize, f64>,
    /// (master, slave) pairs.
    pub periodic: Vec<(usize, usize)>,
}

impl BoundaryConditions {
    pub fn from_mesh(mesh: &Mesh) -> Self {
        Self {
            dirichlet: BTreeMap::new(),
            periodic: mesh.periodic_pairs.clone(),
        }
    }

    /// Sets `value` on every node of `nodes` that is not a periodic slave.
    pub fn set_dirichlet(&mut self, nodes: impl IntoIterator<Item = usize>, value: f64) {
        let slaves: BTreeSet<usize> = self.periodic.iter().map(|&(_, s)| s).collect();
        for n in nodes {
            if !slaves.contains(&n) {
                self.dirichlet.insert(n, value);
            }
        }
    }

    fn check(&self) -> Result<(), AssemblyError> {
        for &(_, s) in &self.periodic {
            if self.dirichlet.contains_key(&s) {
                return Err(AssemblyError::DirichletOnSlave(s));
            }
        }
        Ok(())
    }
}

/// Node → equation map: periodic slaves are folded onto their master.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub target: Vec<usize>,
}

impl DofMap {
    pub fn new(n: usize, periodic: &[(usize, usize)]) -> Self {
        let mut target: Vec<usize> = (0..n).collect();
        for &(m, s) in periodic {
            target[s] = m;
        }
        Self { target }
    }

    pub fn is_slave(&self, n: usize) -> bool {
        self.target[n] != n
    }
}

/// Cached element geometry of a whole mesh.
#[derive(Debug, Clone)]
pub struct MeshGeometry {
    pub elements: Vec<ElementGeometry>,
    /// Σ of SCV volumes around each node (periodic images counted separately).
    pub node_volumes: Vec<f64>,
}

impl MeshGeometry {
    pub fn new(mesh: &Mesh) -> Result<Self, AssemblyError> {
        if mesh.elements.is_empty() {
            return Err(AssemblyError::EmptyMesh);
        }
        let elements = (0..mesh.elements.len())
            .into_par_iter()
            .map(|e| mesh.geometry(e))
            .collect::<Result<Vec<_>, _>>()?;
        let mut node_volumes = vec![0.0; mesh.nodes.len()];
        for (el, g) in mesh.elements.iter().zip(&elements) {
            for (&n, v) in el.nodes.iter().zip(&g.scv_volumes) {
                node_volumes[n] += v;
            }
        }
        Ok(Self { elements, node_volumes })
    }
}

/// `D_e`: row `s` holds the net outward diffusive flux of SCV `s`.
pub fn element_diffusion_matrix(geom: &ElementGeometry, gamma: &[Matrix3<f64>]) -> DMatrix<f64> {
    let m = geom.nodes.len();
    let reference = geom.kind.reference();
    let mut d = DMatrix::zeros(m, m);
    for (ip, g) in reference.integration_points.iter().zip(&geom.ips) {
        let mut gam = Matrix3::zeros();
        for (n, gm) in g.shape.iter().zip(gamma) {
            gam += *n * gm;
        }
        let w = gam.transpose() * g.area;
        for k in 0..m {
            let f = w.dot(&g.gradients[k]);
            d[(ip.donor, k)] += f;
            d[(ip.receiver, k)] -= f;
        }
    }
    d
}

/// Mass flux `q̃ = Σ_m N_m (Γᶜv)_m · ΔS` through each integration face,
/// positive from donor to receiver.
pub fn integration_point_fluxes(geom: &ElementGeometry, flux: &[Vector3<f64>]) -> Vec<f64> {
    geom.ips
        .iter()
        .map(|g| {
            let mut c = Vector3::zeros();
            for (n, f) in g.shape.iter().zip(flux) {
                c += *n * f;
            }
            c.dot(&g.area)
        })
        .collect()
}

/// `C_e` with first-order donor-cell upwinding at each integration face.
pub fn element_convection_matrix(geom: &ElementGeometry, flux: &[Vector3<f64>]) -> DMatrix<f64> {
    let m = geom.nodes.len();
    let reference = geom.kind.reference();
    let mut c = DMatrix::zeros(m, m);
    for (ip, q) in reference
        .integration_points
        .iter()
        .zip(integration_point_fluxes(geom, flux))
    {
        let upwind = if q > 0.0 { ip.donor } else { ip.receiver };
        c[(ip.donor, upwind)] += q;
        c[(ip.receiver, upwind)] -= q;
    }
    c
}

/// `(S₁, S₂, S₃)` per SCV from node-local values.
pub fn element_source_vectors(
    geom: &ElementGeometry,
    rho: &[f64],
    rho_old: &[f64],
    dt: Option<f64>,
    source: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let vols = &geom.scv_volumes;
    let (s1, s2) = match dt {
        Some(dt) => (
            vols.iter().zip(rho).map(|(v, r)| r / dt * v).collect(),
            vols.iter().zip(rho_old).map(|(v, r)| -r / dt * v).collect(),
        ),
        None => (vec![0.0; vols.len()], vec![0.0; vols.len()]),
    };
    let s3 = vols.iter().zip(source).map(|(v, q)| q * v).collect();
    (s1, s2, s3)
}

/// Assembled operators before constraint rows are imposed. Slave rows are
/// empty; their contributions live in the master rows and columns.
#[derive(Debug, Clone)]
pub struct Operators {
    pub diffusion: CsrMatrix,
    pub convection: CsrMatrix,
    /// Diagonal `S₁` per equation.
    pub capacity: Vec<f64>,
    /// `S₃ − S₂ φⁿ⁻¹` per equation.
    pub rhs: Vec<f64>,
    pub dofs: DofMap,
}

fn gather<T: Clone>(values: &[T], nodes: &[usize]) -> Vec<T> {
    nodes.iter().map(|&n| values[n].clone()).collect()
}

/// Sparsity pattern over equations, including the periodic coupling entries.
pub fn build_pattern(mesh: &Mesh, dofs: &DofMap) -> Vec<BTreeSet<usize>> {
    let n = mesh.nodes.len();
    let mut rows: Vec<BTreeSet<usize>> = (0..n).map(|i| BTreeSet::from([i])).collect();
    for el in &mesh.elements {
        for &a in &el.nodes {
            for &b in &el.nodes {
                rows[dofs.target[a]].insert(dofs.target[b]);
            }
        }
    }
    for s in 0..n {
        let m = dofs.target[s];
        if m != s {
            rows[s].insert(m);
            rows[m].insert(s);
        }
    }
    rows
}

pub fn assemble_operators(
    mesh: &Mesh,
    geometry: &MeshGeometry,
    problem: &TransportProblem,
    periodic: &[(usize, usize)],
) -> Result<Operators, AssemblyError> {
    let n = mesh.nodes.len();
    if mesh.elements.is_empty() {
        return Err(AssemblyError::EmptyMesh);
    }
    problem.check(n)?;
    let dofs = DofMap::new(n, periodic);
    let pattern = build_pattern(mesh, &dofs);
    let mut diffusion = CsrMatrix::from_pattern(&pattern);
    let mut convection = diffusion.clone();
    let mut capacity = vec![0.0; n];
    let mut rhs = vec![0.0; n];

    let locals: Vec<_> = mesh
        .elements
        .par_iter()
        .zip(&geometry.elements)
        .map(|(el, geom)| {
            let d = element_diffusion_matrix(geom, &gather(&problem.diffusivity, &el.nodes));
            let mut c = element_convection_matrix(geom, &gather(&problem.convective_flux, &el.nodes));
            if problem.advective_form {
                for s in 0..c.nrows() {
                    let row_sum: f64 = c.row(s).sum();
                    c[(s, s)] -= row_sum;
                }
            }
            let sv = element_source_vectors(
                geom,
                &gather(&problem.capacity, &el.nodes),
                &gather(&problem.capacity_old, &el.nodes),
                problem.time_step,
                &gather(&problem.source, &el.nodes),
            );
            (d, c, sv)
        })
        .collect();

    // sequential scatter in element order keeps the sums bitwise reproducible
    for (el, (d, c, (s1, s2, s3))) in mesh.elements.iter().zip(locals) {
        for (a, &na) in el.nodes.iter().enumerate() {
            let r = dofs.target[na];
            for (b, &nb) in el.nodes.iter().enumerate() {
                let col = dofs.target[nb];
                diffusion.add(r, col, d[(a, b)]);
                convection.add(r, col, c[(a, b)]);
            }
            capacity[r] += s1[a];
            rhs[r] += s3[a] - s2[a] * problem.previous[na];
        }
    }
    Ok(Operators {
        diffusion,
        convection,
        capacity,
        rhs,
        dofs,
    })
}

/// Assembled linear system `A φ = b` with constraints applied.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

/// Replaces constraint rows: periodic slaves get `φ_s − φ_m = 0`, Dirichlet
/// nodes get the identity row.
pub fn apply_constraints(
    matrix: &mut CsrMatrix,
    rhs: &mut [f64],
    bcs: &BoundaryConditions,
) -> Result<(), AssemblyError> {
    bcs.check()?;
    for &(m, s) in &bcs.periodic {
        matrix.clear_row(s);
        matrix.add(s, s, 1.0);
        matrix.add(s, m, -1.0);
        rhs[s] = 0.0;
    }
    for (&node, &value) in &bcs.dirichlet {
        matrix.clear_row(node);
        matrix.add(node, node, 1.0);
        rhs[node] = value;
    }
    Ok(())
}

/// `A = C − D + diag(S₁)`, `b = S₃ − S₂ φⁿ⁻¹`, constraints applied.
pub fn assemble_global(
    mesh: &Mesh,
    geometry: &MeshGeometry,
    problem: &TransportProblem,
    bcs: &BoundaryConditions,
) -> Result<SparseSystem, AssemblyError> {
    bcs.check()?;
    let ops = assemble_operators(mesh, geometry, problem, &bcs.periodic)?;
    let mut matrix = ops.convection;
    matrix.axpy(-1.0, &ops.diffusion);
    for (i, c) in ops.capacity.iter().enumerate() {
        if *c != 0.0 {
            matrix.add(i, i, *c);
        }
    }
    let mut rhs = ops.rhs;
    apply_constraints(&mut matrix, &mut rhs, bcs)?;
    Ok(SparseSystem { matrix, rhs })
}

/// One backward-Euler step (or a steady solve when `time_step` is `None`).
pub fn step_transient(
    mesh: &Mesh,
    geometry: &MeshGeometry,
    problem: &TransportProblem,
    bcs: &BoundaryConditions,
    cfg: LinearConfig,
) -> Result<Vec<f64>, AssemblyError> {
    let sys = assemble_global(mesh, geometry, problem, bcs)?;
    Ok(linear_solve(&sys.matrix, &sys.rhs, Some(&problem.previous), cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{ElementKind, Point};
    use crate::mesh::Element;

    fn unit_hex() -> ElementGeometry {
        ElementGeometry::new(ElementKind::Hex8, ElementKind::Hex8.reference().nodes.clone()).unwrap()
    }

    fn cube_mesh() -> Mesh {
        Mesh {
            nodes: ElementKind::Hex8.reference().nodes.clone(),
            elements: vec![Element {
                kind: ElementKind::Hex8,
                nodes: (0..8).collect(),
            }],
            ..Mesh::default()
        }
    }

    #[test]
    fn zero_coefficients_give_zero_matrices() {
        let g = unit_hex();
        assert_eq!(element_diffusion_matrix(&g, &[Matrix3::zeros(); 8]).norm(), 0.0);
        assert_eq!(element_convection_matrix(&g, &[Vector3::zeros(); 8]).norm(), 0.0);
    }

    #[test]
    fn diffusion_of_linear_field_matches_face_areas() {
        let g = unit_hex();
        let d = element_diffusion_matrix(&g, &[Matrix3::identity(); 8]);
        let phi = nalgebra::DVector::from_iterator(8, g.nodes.iter().map(|p| p[0]));
        let flux = &d * phi;
        // each SCV has one internal x-face of area 1/4; outward sign depends on side
        for (s, p) in ElementKind::Hex8.reference().nodes.iter().enumerate() {
            let expected = if p[0] == 0.0 { 0.25 } else { -0.25 };
            assert!((flux[s] - expected).abs() < 1e-12, "{s}: {}", flux[s]);
        }
        let ones = nalgebra::DVector::from_element(8, 1.0);
        assert!((&d * ones).norm() < 1e-14);
    }

    #[test]
    fn upwind_uses_donor_for_positive_flux() {
        let g = unit_hex();
        let c = element_convection_matrix(&g, &[Vector3::new(1.0, 0.0, 0.0); 8]);
        // face pI1 separates SCV1 → SCV2 with +x normal
        assert!((c[(0, 0)] - 0.25).abs() < 1e-15);
        assert!((c[(1, 0)] + 0.25).abs() < 1e-15);
        // column sums vanish: every face adds +q and −q
        for k in 0..8 {
            assert!(c.column(k).sum().abs() < 1e-15);
        }
    }

    #[test]
    fn source_vectors_scale_with_time_step() {
        let g = unit_hex();
        let ones = [1.0; 8];
        let (s1, s2, s3) = element_source_vectors(&g, &ones, &ones, Some(1.0), &[0.0; 8]);
        assert!(s1.iter().all(|v| (v - 0.125).abs() < 1e-15));
        assert!(s3.iter().all(|v| *v == 0.0));
        let (t1, t2, _) = element_source_vectors(&g, &ones, &ones, Some(2.0), &[0.0; 8]);
        for i in 0..8 {
            assert!((t1[i] - 0.5 * s1[i]).abs() < 1e-16);
            assert!((t2[i] - 0.5 * s2[i]).abs() < 1e-16);
        }
    }

    #[test]
    fn single_cube_linear_solution() {
        let mesh = cube_mesh();
        let geometry = MeshGeometry::new(&mesh).unwrap();
        let mut p = TransportProblem::new(8);
        p.diffusivity = vec![Matrix3::identity(); 8];
        let mut bcs = BoundaryConditions::default();
        for (i, n) in mesh.nodes.iter().enumerate() {
            bcs.dirichlet.insert(i, n[0]);
        }
        let sys = assemble_global(&mesh, &geometry, &p, &bcs).unwrap();
        assert_eq!(sys.matrix.to_dense(), DMatrix::identity(8, 8));
    }

    fn stacked_mesh() -> Mesh {
        let mut nodes: Vec<Point> = Vec::new();
        for z in [0.0, 1.0, 2.0] {
            for (x, y) in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)] {
                nodes.push([x, y, z]);
            }
        }
        Mesh {
            nodes,
            elements: vec![
                Element {
                    kind: ElementKind::Hex8,
                    nodes: (0..8).collect(),
                },
                Element {
                    kind: ElementKind::Hex8,
                    nodes: (4..12).collect(),
                },
            ],
            ..Mesh::default()
        }
    }

    #[test]
    fn opposite_faces_fixed_gives_linear_solution() {
        let mesh = stacked_mesh();
        let geometry = MeshGeometry::new(&mesh).unwrap();
        let mut p = TransportProblem::new(12);
        p.diffusivity = vec![Matrix3::identity(); 12];
        let mut bcs = BoundaryConditions::default();
        bcs.set_dirichlet(0..4, 0.0);
        bcs.set_dirichlet(8..12, 1.0);
        let phi = step_transient(&mesh, &geometry, &p, &bcs, LinearConfig::default()).unwrap();
        for (v, n) in phi.iter().zip(&mesh.nodes) {
            assert!((v - n[2] / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dirichlet_on_slave_is_rejected() {
        let mesh = cube_mesh();
        let geometry = MeshGeometry::new(&mesh).unwrap();
        let p = TransportProblem::new(8);
        let mut bcs = BoundaryConditions::default();
        bcs.periodic.push((0, 1));
        bcs.dirichlet.insert(1, 0.0);
        assert!(matches!(
            assemble_global(&mesh, &geometry, &p, &bcs),
            Err(AssemblyError::DirichletOnSlave(1))
        ));
    }

    #[test]
    fn stacked_hexes_share_face_fluxes() {
        let mesh = stacked_mesh();
        let geometry = MeshGeometry::new(&mesh).unwrap();
        let phi: Vec<f64> = mesh.nodes.iter().map(|p| p[2] * p[2]).collect();
        let gamma = [Matrix3::identity(); 8];
        let mut net = vec![0.0; 12];
        for (el, g) in mesh.elements.iter().zip(&geometry.elements) {
            let d = element_diffusion_matrix(g, &gamma);
            let local = nalgebra::DVector::from_iterator(8, el.nodes.iter().map(|&n| phi[n]));
            let f = d * local;
            for (a, &n) in el.nodes.iter().enumerate() {
                net[n] += f[a];
            }
        }
        // total of all CV balances telescopes to the flux through the outer boundary
        let total: f64 = net.iter().sum();
        assert!(total.abs() < 1e-13);
    }
}
