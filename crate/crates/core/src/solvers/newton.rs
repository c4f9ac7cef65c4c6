//! Newton–Raphson with Armijo backtracking for `Ω(q) = M q̈ + F_c(q) − F_ext = 0`.

use nalgebra::{DMatrix, DVector};

use crate::solvers::SolverError;

/// Failure modes of one load evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum ResidualError {
    /// The trial configuration closes the gap.
    Contact,
    Failed(String),
}

#[derive(Debug, Clone)]
pub struct DynamicsProblem {
    /// Diagonal of the inertia matrix.
    pub mass: Vec<f64>,
    /// Known acceleration term `q̈`.
    pub acceleration: Vec<f64>,
    pub external: Vec<f64>,
    pub q0: Vec<f64>,
    /// Characteristic size of each coordinate for finite-difference steps.
    pub scales: Vec<f64>,
}

impl DynamicsProblem {
    /// Quasi-static problem (no inertia).
    pub fn quasi_static(external: Vec<f64>, q0: Vec<f64>, scales: Vec<f64>) -> Self {
        let n = q0.len();
        Self {
            mass: vec![0.0; n],
            acceleration: vec![0.0; n],
            external,
            q0,
            scales,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub armijo: f64,
    pub lambda_min: f64,
    /// Relative finite-difference step.
    pub fd_rel: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 50,
            armijo: 1e-4,
            lambda_min: 2f64.powi(-20),
            fd_rel: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub q: Vec<f64>,
    pub residual: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    /// `(residual norm, accepted λ)` per iteration; the first entry is the start.
    pub history: Vec<(f64, f64)>,
    pub contact_hits: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves for `q*` with `‖Ω(q*)‖ ≤ tol · ‖F_ext‖`. `loads(q)` returns `F_c(q)`.
pub fn newton_equilibrium<F>(
    problem: &DynamicsProblem,
    cfg: &NewtonConfig,
    mut loads: F,
) -> Result<NewtonReport, SolverError>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, ResidualError>,
{
    let n = problem.q0.len();
    let mut omega = |q: &[f64]| -> Result<Vec<f64>, ResidualError> {
        let fc = loads(q)?;
        Ok((0..n)
            .map(|i| problem.mass[i] * problem.acceleration[i] + fc[i] - problem.external[i])
            .collect())
    };
    let target = cfg.tol * norm(&problem.external);
    let mut q = problem.q0.clone();
    let mut r = match omega(&q) {
        Ok(r) => r,
        Err(ResidualError::Contact) => return Err(SolverError::ContactAtStart),
        Err(ResidualError::Failed(m)) => return Err(SolverError::Residual(m)),
    };
    let mut rn = norm(&r);
    let mut history = vec![(rn, 0.0)];
    let mut contact_hits = 0;

    for it in 1..=cfg.max_iter {
        if rn <= target {
            return Ok(NewtonReport {
                q,
                residual: r,
                residual_norm: rn,
                iterations: it - 1,
                history,
                contact_hits,
            });
        }
        // forward-difference Jacobian, falling back to a backward step at contact
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let step = cfg.fd_rel * q[j].abs().max(problem.scales[j]);
            let mut qp = q.clone();
            qp[j] += step;
            let (rp, h) = match omega(&qp) {
                Ok(v) => (v, step),
                Err(ResidualError::Contact) => {
                    contact_hits += 1;
                    qp[j] = q[j] - step;
                    match omega(&qp) {
                        Ok(v) => (v, -step),
                        Err(ResidualError::Contact) => {
                            return Err(SolverError::Residual(
                                "contact on both sides of a finite-difference probe".into(),
                            ))
                        }
                        Err(ResidualError::Failed(m)) => return Err(SolverError::Residual(m)),
                    }
                }
                Err(ResidualError::Failed(m)) => return Err(SolverError::Residual(m)),
            };
            for i in 0..n {
                jac[(i, j)] = (rp[i] - r[i]) / h;
            }
        }
        let rhs = -DVector::from_column_slice(&r);
        let s = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| SolverError::Residual("singular finite-difference Jacobian".into()))?;

        let mut lambda = 1.0;
        loop {
            if lambda < cfg.lambda_min {
                return Err(SolverError::LineSearchStagnation {
                    iteration: it,
                    residual: rn,
                });
            }
            let trial: Vec<f64> = (0..n).map(|i| q[i] + lambda * s[i]).collect();
            match omega(&trial) {
                Ok(rt) => {
                    let tn = norm(&rt);
                    if tn <= (1.0 - cfg.armijo * lambda) * rn {
                        q = trial;
                        r = rt;
                        rn = tn;
                        history.push((rn, lambda));
                        log::debug!("newton {it}: |Ω| = {rn:.6e}, λ = {lambda}");
                        break;
                    }
                }
                Err(ResidualError::Contact) => contact_hits += 1,
                Err(ResidualError::Failed(m)) => return Err(SolverError::Residual(m)),
            }
            lambda *= 0.5;
        }
    }
    if rn <= target {
        return Ok(NewtonReport {
            q,
            residual: r,
            residual_norm: rn,
            iterations: cfg.max_iter,
            history,
            contact_hits,
        });
    }
    Err(SolverError::NewtonNotConverged {
        iterations: cfg.max_iter,
        residual: rn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_residual_takes_one_step() {
        let k = [[4.0, 1.0], [1.0, 3.0]];
        let prob = DynamicsProblem::quasi_static(vec![1.0, 2.0], vec![0.0, 0.0], vec![1.0, 1.0]);
        let rep = newton_equilibrium(&prob, &NewtonConfig::default(), |q| {
            Ok(vec![k[0][0] * q[0] + k[0][1] * q[1], k[1][0] * q[0] + k[1][1] * q[1]])
        })
        .unwrap();
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.history[1].1, 1.0);
    }

    #[test]
    fn cube_root() {
        let prob = DynamicsProblem::quasi_static(vec![8.0], vec![3.0], vec![1.0]);
        let cfg = NewtonConfig {
            tol: 1e-14,
            ..NewtonConfig::default()
        };
        let rep = newton_equilibrium(&prob, &cfg, |q| Ok(vec![q[0].powi(3)])).unwrap();
        assert!((rep.q[0] - 2.0).abs() < 1e-12);
        // quadratic decay: near the root r_{k+1} ≈ r_k² / 24
        let errs: Vec<f64> = rep.history.iter().map(|h| h.0).collect();
        for w in errs.windows(2) {
            if w[1] > 1e-10 {
                assert!(w[1] <= w[0] * w[0] / 10.0, "{errs:?}");
            }
        }
    }

    #[test]
    fn contact_halves_the_step() {
        // F_c = 1/(1 − q) blows up at q = 1, contact beyond
        let prob = DynamicsProblem::quasi_static(vec![10.0], vec![0.0], vec![1.0]);
        let rep = newton_equilibrium(&prob, &NewtonConfig::default(), |q| {
            if q[0] >= 1.0 {
                Err(ResidualError::Contact)
            } else {
                Ok(vec![1.0 / (1.0 - q[0])])
            }
        })
        .unwrap();
        assert!((rep.q[0] - 0.9).abs() < 1e-6);
        assert!(rep.contact_hits > 0);
    }
}
