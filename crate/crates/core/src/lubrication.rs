//! Film-pressure balance: film thickness, rheology closures, cross-film
//! coefficient integrals and the p–θ transport problem on the surface mesh.
//!
//! Cross-film integrals run from the journal surface (`z = 0`, velocity
//! `v₁ = (u₁, v₁)`) to the bushing (`z = h`, velocity `v₂`). With this datum
//! the mass flux per unit width is
//!
//! ```text
//! ∫ρu dz = −ε ∇p + ρ*_e v_e + ρ*_1 v₁
//! ```

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use thiserror::Error;

use crate::assembly::{assemble_operators, AssemblyError, BoundaryConditions, MeshGeometry, TransportProblem};
use crate::mesh::{evaluate_texture_depth, Mesh, TextureSpec, AXIAL_LEFT, AXIAL_RIGHT, FEED_HOLE};
use crate::solvers::GreSystem;

/// Singular temperature of the Roelands temperature term.
pub const ROELANDS_POLE: f64 = 138.0;

#[derive(Debug, Error)]
pub enum LubricationError {
    #[error("surfaces in contact: h = {h:e} m at (x, y) = ({x}, {y})")]
    Contact { x: f64, y: f64, h: f64 },
    #[error("temperature {0} K is at or below the Roelands pole of 138 K")]
    RoelandsPole(f64),
    #[error("non-positive viscosity sample {0:e}")]
    NonPositiveViscosity(f64),
    #[error("cross-film quadrature needs an odd sample count of at least 3, got {0}")]
    Quadrature(usize),
    #[error("invalid lubricant model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LubricantModel {
    pub rho0: f64,
    pub eta0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub z: f64,
    pub s0: f64,
    pub p_r0: f64,
    pub k: f64,
    pub cp: f64,
    pub beta: f64,
    pub p_cav: f64,
    pub t0: f64,
}

impl Default for LubricantModel {
    fn default() -> Self {
        Self {
            rho0: 810.0,
            eta0: 0.1,
            c1: 0.6e-9,
            c2: 1.7e-9,
            c3: 6.5e-4,
            z: 0.689,
            s0: 1.3891,
            p_r0: 5.1e9,
            k: 0.105,
            cp: 2300.0,
            beta: 6.5e-4,
            p_cav: 0.0,
            t0: 353.15,
        }
    }
}

impl LubricantModel {
    pub fn check(&self) -> Result<(), LubricationError> {
        for (name, v) in [("rho0", self.rho0), ("eta0", self.eta0), ("k", self.k), ("cp", self.cp)] {
            if !(v > 0.0) {
                return Err(LubricationError::InvalidModel(format!("{name} must be positive")));
            }
        }
        if !(self.t0 > ROELANDS_POLE) {
            return Err(LubricationError::RoelandsPole(self.t0));
        }
        if !(self.p_r0 > 0.0) {
            return Err(LubricationError::InvalidModel("p_r0 must be positive".into()));
        }
        Ok(())
    }

    /// Model with pressure and temperature dependence switched off.
    pub fn isoviscous(rho: f64, eta: f64) -> Self {
        Self {
            rho0: rho,
            eta0: eta,
            c1: 0.0,
            c3: 0.0,
            z: 0.0,
            s0: 0.0,
            ..Self::default()
        }
    }
}

/// Dowson–Higginson density.
pub fn density(p: f64, t: f64, m: &LubricantModel) -> f64 {
    m.rho0 * (1.0 + m.c1 * p / (1.0 + m.c2 * p)) * (1.0 - m.c3 * (t - m.t0))
}

/// Roelands viscosity.
pub fn viscosity(p: f64, t: f64, m: &LubricantModel) -> Result<f64, LubricationError> {
    if !(t > ROELANDS_POLE) {
        return Err(LubricationError::RoelandsPole(t));
    }
    let thermal = ((t - ROELANDS_POLE) / (m.t0 - ROELANDS_POLE)).powf(-m.s0);
    let exponent = (m.eta0.ln() + 9.67) * (-1.0 + (1.0 + p / m.p_r0).powf(m.z) * thermal);
    Ok(m.eta0 * exponent.exp())
}

/// Liquid-fraction weighted properties of a cavitated mixture.
pub fn mixture_adjust(eta: f64, rho: f64, theta: f64) -> (f64, f64) {
    (theta * eta, theta * rho)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KinematicsState {
    /// Journal surface velocity.
    pub u1: f64,
    pub v1: f64,
    /// Bushing surface velocity.
    pub u2: f64,
    pub v2: f64,
    /// `(X_r, Y_r, A_r, B_r)`.
    pub q: [f64; 4],
    pub q_dot: [f64; 4],
}

impl KinematicsState {
    pub fn mean_velocity(&self) -> Vector3<f64> {
        Vector3::new(0.5 * (self.u1 + self.u2), 0.5 * (self.v1 + self.v2), 0.0)
    }

    pub fn journal_velocity(&self) -> Vector3<f64> {
        Vector3::new(self.u1, self.v1, 0.0)
    }
}

/// Gap between journal and bushing at unwrapped position `(x, y)`, with
/// `x̂ = x / R_b` inside the trigonometric terms.
pub fn film_thickness(
    x: f64,
    y: f64,
    q: &[f64; 4],
    clearance: f64,
    radius: f64,
    texture: &TextureSpec,
) -> Result<f64, LubricationError> {
    let (s, c) = (x / radius).sin_cos();
    let h = clearance - (q[1] - q[2] * y) * c + (q[0] - q[3] * y) * s + evaluate_texture_depth(x, y, texture);
    if !(h > 0.0) {
        return Err(LubricationError::Contact { x, y, h });
    }
    Ok(h)
}

/// Rate of change of the gap from the journal velocity `q̇`.
pub fn film_thickness_rate(x: f64, y: f64, q_dot: &[f64; 4], radius: f64) -> f64 {
    let (s, c) = (x / radius).sin_cos();
    -(q_dot[1] - q_dot[2] * y) * c + (q_dot[0] - q_dot[3] * y) * s
}

/// Nodal gap over a mesh.
pub fn film_thickness_field(
    mesh: &Mesh,
    q: &[f64; 4],
    clearance: f64,
    radius: f64,
    texture: &TextureSpec,
) -> Result<Vec<f64>, LubricationError> {
    mesh.nodes
        .iter()
        .map(|p| film_thickness(p[0], p[1], q, clearance, radius, texture))
        .collect()
}

/// Cross-film coefficients at one surface point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GreCoefficients {
    pub eps: f64,
    pub rho_e: f64,
    pub rho_star_e: f64,
    pub rho_star_1: f64,
    /// `1/η_e = ∫ dz/η`.
    pub inv_eta_e: f64,
    /// `1/η'_e = ∫ z dz/η`.
    pub inv_eta_e1: f64,
    pub rho_1: f64,
    pub rho_2: f64,
}

impl GreCoefficients {
    /// Closed form for constant properties.
    pub fn isoviscous(h: f64, rho: f64, eta: f64) -> Self {
        Self {
            eps: rho * h.powi(3) / (12.0 * eta),
            rho_e: rho * h,
            rho_star_e: rho * h,
            rho_star_1: 0.0,
            inv_eta_e: h / eta,
            inv_eta_e1: h * h / (2.0 * eta),
            rho_1: rho * h * h / (2.0 * eta),
            rho_2: rho * h.powi(3) / (6.0 * eta),
        }
    }
}

/// Composite Simpson over uniformly spaced samples.
pub fn simpson(f: &[f64], dz: f64) -> f64 {
    let n = f.len() - 1;
    let mut s = f[0] + f[n];
    for (i, v) in f.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * dz / 3.0
}

/// Running integral `∫₀^{z_i} f` at every sample: Simpson up to panel ends,
/// and a three-point partial-panel rule at panel midpoints.
pub fn cumulative_simpson(f: &[f64], dz: f64) -> Vec<f64> {
    let n = f.len() - 1;
    let mut out = vec![0.0; n + 1];
    let mut i = 0;
    while i + 2 <= n {
        out[i + 1] = out[i] + dz * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]) / 12.0;
        out[i + 2] = out[i] + dz * (f[i] + 4.0 * f[i + 1] + f[i + 2]) / 3.0;
        i += 2;
    }
    out
}

/// Evaluates the cross-film integrals from profiles sampled at `n_z`
/// uniform points from the journal (`z = 0`) to the bushing (`z = h`).
pub fn gre_coefficients(h: f64, eta: &[f64], rho: &[f64]) -> Result<GreCoefficients, LubricationError> {
    let n = eta.len();
    if n < 3 || n % 2 == 0 || rho.len() != n {
        return Err(LubricationError::Quadrature(n));
    }
    if !(h > 0.0) {
        return Err(LubricationError::Contact {
            x: f64::NAN,
            y: f64::NAN,
            h,
        });
    }
    if let Some(&bad) = eta.iter().find(|&&e| !(e > 0.0)) {
        return Err(LubricationError::NonPositiveViscosity(bad));
    }
    let dz = h / (n - 1) as f64;
    let inv: Vec<f64> = eta.iter().map(|e| 1.0 / e).collect();
    let zinv: Vec<f64> = inv.iter().enumerate().map(|(i, v)| i as f64 * dz * v).collect();
    let f0 = cumulative_simpson(&inv, dz);
    let f1 = cumulative_simpson(&zinv, dz);
    let inv_eta_e = f0[n - 1];
    let inv_eta_e1 = f1[n - 1];
    let rho_e = simpson(rho, dz);
    let rho_f0: Vec<f64> = rho.iter().zip(&f0).map(|(r, f)| r * f).collect();
    let rho_f1: Vec<f64> = rho.iter().zip(&f1).map(|(r, f)| r * f).collect();
    let rho_1 = simpson(&rho_f0, dz);
    let rho_2 = simpson(&rho_f1, dz);
    let eta_e = 1.0 / inv_eta_e;
    let eps = (inv_eta_e1 / inv_eta_e) * rho_1 - rho_2;
    let rho_star_e = 2.0 * eta_e * rho_1;
    Ok(GreCoefficients {
        eps,
        rho_e,
        rho_star_e,
        rho_star_1: rho_e - rho_star_e,
        inv_eta_e,
        inv_eta_e1,
        rho_1,
        rho_2,
    })
}

/// Linear interpolation in a column of equally spaced levels at `s ∈ [0, 1]`.
pub fn interpolate_column(column: &[f64], s: f64) -> f64 {
    let n = column.len() - 1;
    if n == 0 {
        return column[0];
    }
    let t = (s.clamp(0.0, 1.0) * n as f64).min(n as f64);
    let k = (t.floor() as usize).min(n - 1);
    let w = t - k as f64;
    column[k] * (1.0 - w) + column[k + 1] * w
}

/// Temperature input for the cross-film property profiles.
#[derive(Debug, Clone, Copy)]
pub enum FilmTemperature<'a> {
    Uniform(f64),
    /// One column per surface node, levels equally spaced from the bushing
    /// (`z = 0`) to the journal (`z = h`).
    Columns(&'a [Vec<f64>]),
}

/// Samples η(p, T) and ρ(p, T) through the film at every node and evaluates
/// the cross-film coefficients.
pub fn nodal_gre_coefficients(
    model: &LubricantModel,
    h: &[f64],
    p: &[f64],
    temperature: FilmTemperature<'_>,
    n_z: usize,
) -> Result<Vec<GreCoefficients>, LubricationError> {
    if n_z < 3 || n_z % 2 == 0 {
        return Err(LubricationError::Quadrature(n_z));
    }
    (0..h.len())
        .into_par_iter()
        .map(|i| {
            let mut eta = Vec::with_capacity(n_z);
            let mut rho = Vec::with_capacity(n_z);
            for j in 0..n_z {
                // sample j sits at distance j/(n_z−1)·h from the journal
                let t = match temperature {
                    FilmTemperature::Uniform(t) => t,
                    FilmTemperature::Columns(c) => interpolate_column(&c[i], 1.0 - j as f64 / (n_z - 1) as f64),
                };
                eta.push(viscosity(p[i], t, model)?);
                rho.push(density(p[i], t, model));
            }
            gre_coefficients(h[i], &eta, &rho)
        })
        .collect()
}

/// Surface fields of the film-pressure problem.
#[derive(Debug, Clone)]
pub struct FilmState {
    pub p: Vec<f64>,
    pub theta: Vec<f64>,
    pub h: Vec<f64>,
    pub p_old: Vec<f64>,
    pub theta_old: Vec<f64>,
    pub coefficients: Vec<GreCoefficients>,
    /// ρ_e at the previous time level, used by the squeeze term.
    pub rho_e_old: Vec<f64>,
}

impl FilmState {
    pub fn new(h: Vec<f64>, p0: f64, coefficients: Vec<GreCoefficients>) -> Self {
        let n = h.len();
        Self {
            p: vec![p0; n],
            theta: vec![1.0; n],
            h,
            p_old: vec![p0; n],
            theta_old: vec![1.0; n],
            rho_e_old: coefficients.iter().map(|c| c.rho_e).collect(),
            coefficients,
        }
    }

    /// `|(p − p_cav)(1 − θ)|` per node.
    pub fn complementarity(&self, p_cav: f64) -> Vec<f64> {
        self.p
            .iter()
            .zip(&self.theta)
            .map(|(p, t)| ((p - p_cav) * (1.0 - t)).abs())
            .collect()
    }
}

/// Pressure boundary values of the film problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureBoundary {
    pub ambient: f64,
    pub supply: f64,
}

/// Poiseuille term as diffusion of p (Γ_d = εI), Couette term as the carrier
/// flux `ρ*_e v_e + ρ*_1 v₁` of θ, squeeze term as the backward-Euler
/// capacity `ρ_e` acting on θ.
pub fn build_gre_problem(
    mesh: &Mesh,
    state: &FilmState,
    kin: &KinematicsState,
    pressure: PressureBoundary,
    time_step: Option<f64>,
) -> (TransportProblem, BoundaryConditions) {
    let n = mesh.nodes.len();
    let mut problem = TransportProblem::new(n);
    let ve = kin.mean_velocity();
    let v1 = kin.journal_velocity();
    for (i, c) in state.coefficients.iter().enumerate() {
        problem.diffusivity[i] = Matrix3::from_diagonal_element(c.eps);
        problem.convective_flux[i] = c.rho_star_e * ve + c.rho_star_1 * v1;
        problem.capacity[i] = c.rho_e;
    }
    problem.capacity_old = state.rho_e_old.clone();
    problem.previous = state.theta_old.clone();
    problem.time_step = time_step;
    let mut bcs = BoundaryConditions::from_mesh(mesh);
    bcs.set_dirichlet(mesh.set(AXIAL_LEFT).chain(mesh.set(AXIAL_RIGHT)), pressure.ambient);
    bcs.set_dirichlet(mesh.set(FEED_HOLE), pressure.supply);
    (problem, bcs)
}

/// Assembles the p–θ operators of a film problem.
pub fn assemble_gre_system(
    mesh: &Mesh,
    geometry: &MeshGeometry,
    problem: &TransportProblem,
    bcs: &BoundaryConditions,
) -> Result<GreSystem, LubricationError> {
    let ops = assemble_operators(mesh, geometry, problem, &bcs.periodic)?;
    let master = (0..mesh.nodes.len())
        .map(|i| ops.dofs.is_slave(i).then(|| ops.dofs.target[i]))
        .collect();
    let dirichlet: BTreeMap<usize, f64> = bcs.dirichlet.clone();
    Ok(GreSystem {
        diffusion: ops.diffusion,
        convection: ops.convection,
        capacity: ops.capacity,
        rhs: ops.rhs,
        dirichlet,
        master,
    })
}
