//! Film cases with known answers and the metrics the suites check on them.

use ebfvm::assembly::MeshGeometry;
use ebfvm::elements::ElementKind;
use ebfvm::lubrication::{
    assemble_gre_system, build_gre_problem, film_thickness_field, FilmState, GreCoefficients, KinematicsState,
    PressureBoundary,
};
use ebfvm::mesh::{generate_bearing_mesh, DomainSpec, Mesh, TextureSpec, AXIAL_LEFT, AXIAL_RIGHT};
use ebfvm::solvers::{sor_p_theta, SorConfig, SorReport};
use nalgebra::{DMatrix, DVector, Vector3};

use super::{gre_strip, l2, reaction, wedge_pressure, Strip};

pub const RHO: f64 = 850.0;
pub const ETA: f64 = 0.05;
pub const SPEED: f64 = 5.0;
pub const P_AMB: f64 = 1e5;

pub fn tight() -> SorConfig {
    SorConfig {
        tol: 1e-13,
        max_iter: 2_000_000,
        ..SorConfig::default()
    }
}

pub fn cold(n: usize, p: f64) -> (Vec<f64>, Vec<f64>) {
    (vec![p; n], vec![1.0; n])
}

/// Relative L2 pressure error of the linear-wedge slider on `nx` cells.
pub fn slider_error(nx: usize) -> f64 {
    let (length, h_in, h_out) = (0.05, 4e-5, 2e-5);
    let s = gre_strip(
        |x| h_in + (h_out - h_in) * x / length,
        nx,
        length,
        SPEED,
        P_AMB,
        RHO,
        ETA,
    );
    let (p0, t0) = cold(s.mesh.nodes.len(), P_AMB);
    let r = sor_p_theta(&s.system, &p0, &t0, &tight()).unwrap();
    assert!(r.theta.iter().all(|&t| t == 1.0));
    let exact: Vec<f64> = s
        .mesh
        .nodes
        .iter()
        .map(|p| wedge_pressure(p[0], h_in, h_out, length, SPEED, ETA, P_AMB))
        .collect();
    let err = l2(r.p.iter().zip(&exact).map(|(a, b)| a - b));
    err / l2(exact.iter().map(|e| e - P_AMB))
}

/// Errors on 64, 128 and 256 cells with the observed orders between them.
pub fn slider_study() -> ([f64; 3], [f64; 2]) {
    let e = [slider_error(64), slider_error(128), slider_error(256)];
    (e, [(e[0] / e[1]).log2(), (e[1] / e[2]).log2()])
}

/// Converging-diverging gap with its minimum at mid-length.
pub fn parabolic(nx: usize, p_amb: f64) -> (Strip, SorReport) {
    let (length, h_min) = (0.05f64, 1e-5);
    let r_eq = (0.5 * length).powi(2) / (2.0 * 4e-5);
    let s = gre_strip(
        |x| h_min + (x - 0.5 * length).powi(2) / (2.0 * r_eq),
        nx,
        length,
        SPEED,
        p_amb,
        RHO,
        ETA,
    );
    let (p0, t0) = cold(s.mesh.nodes.len(), p_amb);
    let r = sor_p_theta(&s.system, &p0, &t0, &tight()).unwrap();
    (s, r)
}

#[derive(Debug)]
pub struct Cavitation {
    pub cavitated: usize,
    pub theta_in_range: bool,
    /// `max |(p − p_cav)(1 − θ)| / max |p − p_cav|`.
    pub complementarity: f64,
    /// Every cavitated node lies past the minimum gap.
    pub downstream_only: bool,
    /// Net end flux over inlet flux.
    pub mass_defect: f64,
}

pub fn cavitation_case() -> Cavitation {
    let (s, r) = parabolic(200, P_AMB);
    let p_cav = SorConfig::default().p_cav;
    let scale = r.p.iter().fold(0.0f64, |a, p| a.max((p - p_cav).abs()));
    let comp =
        r.p.iter()
            .zip(&r.theta)
            .fold(0.0f64, |a, (p, t)| a.max(((p - p_cav) * (1.0 - t)).abs()));
    let inlet = reaction(&s.system, &r.p, &r.theta, s.mesh.set(AXIAL_LEFT));
    let outlet = reaction(&s.system, &r.p, &r.theta, s.mesh.set(AXIAL_RIGHT));
    Cavitation {
        cavitated: r.theta.iter().filter(|&&t| t < 1.0).count(),
        theta_in_range: r.theta.iter().all(|&t| (0.0..=1.0).contains(&t)),
        complementarity: comp / scale,
        downstream_only: s
            .mesh
            .nodes
            .iter()
            .zip(&r.theta)
            .all(|(n, &t)| t == 1.0 || n[0] > 0.025),
        mass_defect: ((inlet + outlet) / inlet).abs(),
    }
}

/// A high ambient pressure keeps the parabolic film flooded; returns the
/// largest SOR deviation from a dense LU solve, relative to the pressure
/// rise, and whether the film stayed flooded.
pub fn flooded_mismatch() -> (f64, bool) {
    let p_amb = 2e8;
    let (s, r) = parabolic(100, p_amb);
    let sys = &s.system;
    let n = s.mesh.nodes.len();
    let mut a: DMatrix<f64> = sys.diffusion.to_dense();
    let ct = sys.convection.mul_vec(&vec![1.0; n]);
    let mut b = DVector::from_iterator(n, (0..n).map(|i| ct[i] + sys.capacity[i] - sys.rhs[i]));
    for (&i, &v) in &sys.dirichlet {
        a.row_mut(i).fill(0.0);
        a[(i, i)] = 1.0;
        b[i] = v;
    }
    let direct = a.lu().solve(&b).unwrap();
    let scale = direct.iter().fold(0.0f64, |m, p| m.max((p - p_amb).abs()));
    let dev =
        r.p.iter()
            .zip(direct.iter())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    (dev / scale, r.theta.iter().all(|&t| t == 1.0))
}

pub struct Journal {
    pub mesh: Mesh,
    pub geometry: MeshGeometry,
    pub eps: Vec<f64>,
    pub carrier: Vec<Vector3<f64>>,
    pub report: SorReport,
}

/// Eccentric isoviscous journal on a periodic 16×16 surface mesh.
pub fn journal(kind: ElementKind) -> Journal {
    let (radius, clearance) = (0.03, 2e-5);
    let domain = DomainSpec {
        radius,
        width: 0.08,
        clearance,
        nx: 16,
        ny: 16,
        element: kind,
        bands: Vec::new(),
        feature_refinement: 1,
    };
    let texture = TextureSpec::default();
    let mesh = generate_bearing_mesh(&domain, &texture).unwrap();
    let geometry = MeshGeometry::new(&mesh).unwrap();
    let q = [0.3 * clearance, -0.6 * clearance, 0.0, 0.0];
    let h = film_thickness_field(&mesh, &q, clearance, radius, &texture).unwrap();
    let coefficients: Vec<GreCoefficients> = h.iter().map(|&hi| GreCoefficients::isoviscous(hi, RHO, ETA)).collect();
    let speed = 15.0;
    let eps = coefficients.iter().map(|c| c.eps).collect();
    let carrier = coefficients
        .iter()
        .map(|c| Vector3::new(c.rho_star_e * 0.5 * speed + c.rho_star_1 * speed, 0.0, 0.0))
        .collect();
    let state = FilmState::new(h, P_AMB, coefficients);
    let kin = KinematicsState {
        u1: speed,
        q,
        ..KinematicsState::default()
    };
    let bounds = PressureBoundary {
        ambient: P_AMB,
        supply: P_AMB,
    };
    let (problem, bcs) = build_gre_problem(&mesh, &state, &kin, bounds, None);
    let system = assemble_gre_system(&mesh, &geometry, &problem, &bcs).unwrap();
    let (p0, t0) = cold(mesh.nodes.len(), P_AMB);
    let cfg = SorConfig { tol: 1e-10, ..tight() };
    let report = sor_p_theta(&system, &p0, &t0, &cfg).unwrap();
    Journal {
        mesh,
        geometry,
        eps,
        carrier,
        report,
    }
}

fn fold_targets(mesh: &Mesh) -> Vec<usize> {
    let mut target: Vec<usize> = (0..mesh.nodes.len()).collect();
    for &(m, s) in &mesh.periodic_pairs {
        target[s] = m;
    }
    target
}

fn free_masters(mesh: &Mesh, target: &[usize]) -> Vec<usize> {
    let fixed: Vec<usize> = mesh.set(AXIAL_LEFT).chain(mesh.set(AXIAL_RIGHT)).collect();
    (0..mesh.nodes.len())
        .filter(|&i| target[i] == i && !fixed.contains(&i))
        .collect()
}

/// Every free CV balance rebuilt face by face from the element geometry.
/// Returns the worst balance relative to the CV's flux scale, the number
/// of CVs checked and whether the film cavitated.
pub fn conservation_defect(j: &Journal) -> (f64, usize, bool) {
    let n = j.mesh.nodes.len();
    let target = fold_targets(&j.mesh);
    let mut balance = vec![0.0; n];
    let mut scale = vec![0.0; n];
    let (p, theta) = (&j.report.p, &j.report.theta);
    for (el, g) in j.mesh.elements.iter().zip(&j.geometry.elements) {
        for (ip, geo) in el.kind.reference().integration_points.iter().zip(&g.ips) {
            let mut eps = 0.0;
            let mut carrier = Vector3::zeros();
            let mut grad = Vector3::zeros();
            for (k, &node) in el.nodes.iter().enumerate() {
                eps += geo.shape[k] * j.eps[node];
                carrier += geo.shape[k] * j.carrier[node];
                grad += geo.gradients[k] * p[node];
            }
            let mass = carrier.dot(&geo.area);
            let up = if mass > 0.0 { ip.donor } else { ip.receiver };
            let poiseuille = eps * grad.dot(&geo.area);
            let couette = mass * theta[el.nodes[up]];
            let (d, r) = (target[el.nodes[ip.donor]], target[el.nodes[ip.receiver]]);
            balance[d] += poiseuille - couette;
            balance[r] -= poiseuille - couette;
            for node in [d, r] {
                scale[node] += poiseuille.abs() + couette.abs();
            }
        }
    }
    let free = free_masters(&j.mesh, &target);
    let worst = free.iter().map(|&i| balance[i].abs() / scale[i]).fold(0.0, f64::max);
    (worst, free.len(), theta.iter().any(|&t| t < 1.0))
}

/// Largest area-vector sum over a closed CV, relative to the largest face.
pub fn closure_defect(j: &Journal) -> f64 {
    let n = j.mesh.nodes.len();
    let target = fold_targets(&j.mesh);
    let mut sum = vec![Vector3::zeros(); n];
    let mut face: f64 = 0.0;
    for (el, g) in j.mesh.elements.iter().zip(&j.geometry.elements) {
        for (ip, geo) in el.kind.reference().integration_points.iter().zip(&g.ips) {
            face = face.max(geo.area.norm());
            sum[target[el.nodes[ip.donor]]] += geo.area;
            sum[target[el.nodes[ip.receiver]]] -= geo.area;
        }
    }
    free_masters(&j.mesh, &target)
        .into_iter()
        .map(|i| sum[i].norm() / face)
        .fold(0.0, f64::max)
}
