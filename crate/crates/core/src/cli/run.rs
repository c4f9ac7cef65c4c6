//! Coupled case runner.
//!
//! Each outer iteration: film thickness from the current journal position,
//! cross-film properties from the relaxed `(p, T)`, p–θ solve, equilibrium
//! update of `q` (optional), then the 3D energy solve (skipped in
//! isothermal mode) with under-relaxed temperature.

use std::fmt;

use nalgebra::Vector3;
use thiserror::Error;

use crate::assembly::{step_transient, AssemblyError, MeshGeometry};
use crate::cli::config::{CaseConfig, ConfigError};
use crate::lubrication::{
    assemble_gre_system, build_gre_problem, density, film_thickness_field, nodal_gre_coefficients, viscosity,
    FilmState, FilmTemperature, KinematicsState, LubricationError, PressureBoundary,
};
use crate::mesh::{generate_bearing_mesh, Mesh, MeshError, TextureSpec};
use crate::solvers::{
    hydrodynamic_loads, newton_equilibrium, sor_p_theta, DynamicsProblem, ResidualError, SolverError, SorConfig,
    SorReport,
};
use crate::thermal::{
    build_energy_problem, extract_midplane, extrude_film_mesh, heat_sources, nodal_gradients, reconstruct_velocity,
    EnergyInput, FilmMesh3D, HeatSourceInput, ThermalBoundary, ThermalError, WallVelocities,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Mesh,
    Film,
    Pressure,
    Dynamics,
    Thermal,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mesh => "mesh",
            Self::Film => "film",
            Self::Pressure => "pressure",
            Self::Dynamics => "dynamics",
            Self::Thermal => "thermal",
        })
    }
}

#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Lubrication(#[from] LubricationError),
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{stage} stage failed at outer iteration {iteration}: {source}")]
    Stage {
        stage: Stage,
        iteration: usize,
        #[source]
        source: StageError,
    },
}

impl RunError {
    fn at(stage: Stage, iteration: usize) -> impl FnOnce(StageError) -> Self {
        move |source| Self::Stage {
            stage,
            iteration,
            source,
        }
    }

    pub fn is_contact(&self) -> bool {
        matches!(
            self,
            Self::Stage {
                source: StageError::Lubrication(LubricationError::Contact { .. })
                    | StageError::Solver(SolverError::ContactAtStart)
                    | StageError::Thermal(ThermalError::NonPositiveGap { .. }),
                ..
            }
        )
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            Self::Stage {
                source: StageError::Solver(
                    SolverError::SorNotConverged { .. }
                        | SolverError::NewtonNotConverged { .. }
                        | SolverError::LineSearchStagnation { .. }
                        | SolverError::LinearNotConverged { .. }
                        | SolverError::LinearBreakdown { .. }
                ) | StageError::Assembly(AssemblyError::Solver(_)),
                ..
            }
        )
    }

    /// Process exit code: 2 non-convergence, 3 configuration, 4 contact.
    pub fn exit_code(&self) -> i32 {
        if matches!(self, Self::Config(_)) {
            3
        } else if self.is_contact() {
            4
        } else if self.is_non_convergence() {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone)]
pub struct Results {
    pub surface: Mesh,
    pub film: FilmMesh3D,
    pub p: Vec<f64>,
    pub theta: Vec<f64>,
    pub h: Vec<f64>,
    /// 3D nodal temperature on `film`.
    pub temperature: Vec<f64>,
    pub t_mid: Vec<f64>,
    /// `[W_X, W_Y, M_X, M_Y]`.
    pub loads: [f64; 4],
    pub q: [f64; 4],
    pub converged: bool,
    pub outer_iterations: usize,
    pub outer_history: Vec<f64>,
    pub sor_history: Vec<(f64, usize)>,
    pub newton_history: Vec<(f64, f64)>,
    pub complementarity: f64,
}

/// One p–θ solution at a fixed journal position.
#[derive(Debug, Clone)]
pub struct FilmSolution {
    pub h: Vec<f64>,
    pub report: SorReport,
    pub loads: [f64; 4],
}

/// Solves the film-pressure problem for given properties and journal position.
pub struct FilmSolver<'a> {
    pub cfg: &'a CaseConfig,
    pub mesh: &'a Mesh,
    pub geometry: &'a MeshGeometry,
    pub texture: &'a TextureSpec,
}

impl FilmSolver<'_> {
    pub fn solve(
        &self,
        q: &[f64; 4],
        p_props: &[f64],
        temperature: FilmTemperature<'_>,
        start: (&[f64], &[f64]),
        sor: &SorConfig,
    ) -> Result<FilmSolution, StageError> {
        let g = &self.cfg.geometry;
        let o = &self.cfg.operating;
        let h = film_thickness_field(self.mesh, q, g.clearance, g.radius, self.texture)?;
        let coefficients = nodal_gre_coefficients(&self.cfg.lubricant, &h, p_props, temperature, self.cfg.solver.n_z)?;
        let state = FilmState::new(h, o.p_ambient, coefficients);
        let kin = KinematicsState {
            u1: self.cfg.surface_speed(),
            q: *q,
            ..KinematicsState::default()
        };
        let bounds = PressureBoundary {
            ambient: o.p_ambient,
            supply: o.p_supply,
        };
        let (problem, bcs) = build_gre_problem(self.mesh, &state, &kin, bounds, None);
        let system = assemble_gre_system(self.mesh, self.geometry, &problem, &bcs)?;
        let report = sor_p_theta(&system, start.0, start.1, sor)?;
        let loads = hydrodynamic_loads(&report.p, self.mesh, &self.geometry.node_volumes, g.radius);
        Ok(FilmSolution {
            h: state.h,
            report,
            loads,
        })
    }
}

fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |a, x| a.max(x.abs()))
}

fn relative_change(new: &[f64], old: &[f64]) -> f64 {
    let scale = max_abs(new.iter().copied()).max(f64::MIN_POSITIVE);
    max_abs(new.iter().zip(old).map(|(a, b)| a - b)) / scale
}

/// Surface → column temperatures.
fn columns(film: &FilmMesh3D, t: &[f64]) -> Vec<Vec<f64>> {
    film.columns.iter().map(|c| c.iter().map(|&n| t[n]).collect()).collect()
}

struct ThermalOutcome {
    film: FilmMesh3D,
    temperature: Vec<f64>,
}

fn thermal_stage(
    cfg: &CaseConfig,
    surface: &Mesh,
    geometry: &MeshGeometry,
    h: &[f64],
    p: &[f64],
    theta: &[f64],
    t_prev: Option<&[f64]>,
) -> Result<ThermalOutcome, StageError> {
    let model = &cfg.lubricant;
    let o = &cfg.operating;
    let film = extrude_film_mesh(surface, h, cfg.mesh.n_layers)?;
    let geom3 = MeshGeometry::new(&film.mesh)?;
    let n3 = film.mesh.nodes.len();
    let t_cur = t_prev.map_or_else(|| vec![o.t_ambient; n3], |t| t.to_vec());
    let below = film.surface_of();
    let mut eta = Vec::with_capacity(n3);
    let mut rho = Vec::with_capacity(n3);
    for (node, &i) in below.iter().enumerate() {
        eta.push(viscosity(p[i], t_cur[node], model)?);
        rho.push(density(p[i], t_cur[node], model));
    }
    let grad_p: Vec<Vector3<f64>> = nodal_gradients(surface, geometry, p)?;
    let walls = WallVelocities {
        bushing: [0.0, 0.0],
        journal: [cfg.surface_speed(), 0.0],
    };
    let velocity = reconstruct_velocity(&film, &geom3, &grad_p, &eta, walls)?;
    let eta_mix: Vec<f64> = eta.iter().zip(&below).map(|(e, &i)| theta[i] * e).collect();
    let rho_mix: Vec<f64> = rho.iter().zip(&below).map(|(r, &i)| theta[i] * r).collect();
    let source = heat_sources(
        &film,
        &HeatSourceInput {
            temperature: &t_cur,
            grad_p: &grad_p,
            dp_dt: None,
            velocity: &velocity,
            eta: &eta_mix,
        },
        model,
    );
    let boundary = ThermalBoundary {
        ambient: Some(o.t_ambient),
        supply: Some(o.t_supply),
        bushing_wall: o.t_bushing,
        journal_wall: o.t_journal,
    };
    let input = EnergyInput {
        velocity: &velocity,
        source: &source,
        rho: &rho_mix,
        rho_old: None,
        t_old: &t_cur,
        time_step: None,
    };
    let (problem, bcs) = build_energy_problem(&film, &input, model, &boundary);
    let solved = step_transient(&film.mesh, &geom3, &problem, &bcs, cfg.solver.linear)?;
    let w = cfg.coupling.relax_t;
    let temperature = t_cur.iter().zip(&solved).map(|(a, b)| a + w * (b - a)).collect();
    Ok(ThermalOutcome { film, temperature })
}

/// Runs a case on the generated mesh, or on `mesh` when given.
pub fn run_case(cfg: &CaseConfig, mesh: Option<Mesh>) -> Result<Results, RunError> {
    let texture = cfg.texture_spec();
    let surface = match mesh {
        Some(m) => {
            m.validate().map_err(|e| RunError::at(Stage::Mesh, 0)(e.into()))?;
            m
        }
        None => generate_bearing_mesh(&cfg.domain(), &texture).map_err(|e| RunError::at(Stage::Mesh, 0)(e.into()))?,
    };
    let geometry = MeshGeometry::new(&surface).map_err(|e| RunError::at(Stage::Mesh, 0)(e.into()))?;
    let n = surface.nodes.len();
    let o = &cfg.operating;
    let c = &cfg.coupling;
    let solver = FilmSolver {
        cfg,
        mesh: &surface,
        geometry: &geometry,
        texture: &texture,
    };
    let half = 0.5 * cfg.geometry.width;
    let clearance = cfg.geometry.clearance;
    let scales = [clearance, clearance, clearance / half, clearance / half];
    let cold_p = vec![o.p_ambient; n];
    let cold_theta = vec![1.0; n];
    let tight = SorConfig {
        tol: cfg.solver.sor.tol.min(cfg.solver.sor_tol_equilibrium),
        ..cfg.solver.sor
    };

    let mut q = o.q0;
    let mut p = cold_p.clone();
    let mut theta = cold_theta.clone();
    let mut p_props = cold_p.clone();
    let mut temperature: Option<Vec<f64>> = None;
    let mut film: Option<FilmMesh3D> = None;
    let mut outer_history = Vec::new();
    let mut newton_history = Vec::new();
    let mut last: Option<FilmSolution> = None;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=c.max_outer {
        iterations = it;
        let cols = match (&film, &temperature) {
            (Some(f), Some(t)) => Some(columns(f, t)),
            _ => None,
        };
        let temps = cols
            .as_deref()
            .map_or(FilmTemperature::Uniform(o.t_ambient), FilmTemperature::Columns);

        let q_prev = q;
        let mut start = (cold_p.clone(), cold_theta.clone());
        if c.equilibrium {
            let problem = DynamicsProblem::quasi_static(cfg.external_load().to_vec(), q.to_vec(), scales.to_vec());
            let mut warm = (p.clone(), theta.clone());
            let mut failure: Option<StageError> = None;
            let outcome = newton_equilibrium(&problem, &cfg.solver.newton, |trial| {
                let qt = [trial[0], trial[1], trial[2], trial[3]];
                match solver.solve(&qt, &p_props, temps, (&warm.0, &warm.1), &tight) {
                    Ok(s) => {
                        warm = (s.report.p, s.report.theta);
                        Ok(s.loads.to_vec())
                    }
                    Err(StageError::Lubrication(LubricationError::Contact { .. })) => Err(ResidualError::Contact),
                    Err(e) => {
                        let msg = e.to_string();
                        failure = Some(e);
                        Err(ResidualError::Failed(msg))
                    }
                }
            });
            let report = match outcome {
                Ok(r) => r,
                Err(SolverError::Residual(_)) if failure.is_some() => {
                    return Err(RunError::at(Stage::Dynamics, it)(failure.unwrap()))
                }
                Err(e) => return Err(RunError::at(Stage::Dynamics, it)(e.into())),
            };
            q = [report.q[0], report.q[1], report.q[2], report.q[3]];
            newton_history = report.history;
            start = warm;
        }
        let sor = if c.equilibrium { tight } else { cfg.solver.sor };
        let sol = solver
            .solve(&q, &p_props, temps, (&start.0, &start.1), &sor)
            .map_err(RunError::at(Stage::Pressure, it))?;
        let dp = relative_change(&sol.report.p, &p);
        p.clone_from(&sol.report.p);
        theta.clone_from(&sol.report.theta);

        let mut dt = 0.0;
        if c.isothermal {
            let f = extrude_film_mesh(&surface, &sol.h, cfg.mesh.n_layers)
                .map_err(|e| RunError::at(Stage::Thermal, it)(e.into()))?;
            temperature = Some(vec![o.t_ambient; f.mesh.nodes.len()]);
            film = Some(f);
        } else {
            let out = thermal_stage(cfg, &surface, &geometry, &sol.h, &p, &theta, temperature.as_deref())
                .map_err(RunError::at(Stage::Thermal, it))?;
            if let Some(t_old) = &temperature {
                dt = relative_change(&out.temperature, t_old);
            } else {
                dt = relative_change(&out.temperature, &vec![o.t_ambient; out.temperature.len()]);
            }
            temperature = Some(out.temperature);
            film = Some(out.film);
        }
        let dq = (0..4).map(|i| (q[i] - q_prev[i]).abs() / scales[i]).fold(0.0, f64::max);
        let change = dp.max(dt).max(dq);
        outer_history.push(change);
        log::info!("outer {it}: change {change:.3e} (p {dp:.2e}, T {dt:.2e}, q {dq:.2e})");
        for (a, b) in p_props.iter_mut().zip(&p) {
            *a += c.relax_props * (b - *a);
        }
        last = Some(sol);
        if it > 1 && change <= c.outer_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("outer loop stopped after {iterations} iterations without meeting the tolerance");
    }
    let sol = last.expect("at least one outer iteration");
    let film = film.expect("film mesh built");
    let temperature = temperature.expect("temperature set");
    let t_mid = extract_midplane(&film, &temperature);
    Ok(Results {
        surface,
        film,
        p,
        theta,
        h: sol.h,
        temperature,
        t_mid,
        loads: sol.loads,
        q,
        converged,
        outer_iterations: iterations,
        outer_history,
        sor_history: sol.report.history,
        newton_history,
        complementarity: sol.report.complementarity,
    })
}
