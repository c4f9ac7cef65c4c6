//! Extended SOR for the coupled pressure / film-fraction balance.
//!
//! At every free node the discrete balance is
//!
//! ```text
//! R_P = Σ_k D_Pk p_k − Σ_k C_Pk θ_k − S₁_P θ_P + b_P = 0
//! ```
//!
//! solved for `p_P` in the pressurised branch and for `θ_P` in the cavitated
//! branch.

use std::collections::BTreeMap;

use crate::solvers::SolverError;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SorConfig {
    pub omega_p: f64,
    pub omega_theta: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub p_cav: f64,
}

impl Default for SorConfig {
    fn default() -> Self {
        Self {
            omega_p: 1.5,
            omega_theta: 0.8,
            tol: 1e-6,
            max_iter: 100_000,
            p_cav: 0.0,
        }
    }
}

impl SorConfig {
    pub fn check(&self) -> Result<(), SolverError> {
        let ok = |w: f64| w > 0.0 && w <= 2.0;
        if !ok(self.omega_p) || !ok(self.omega_theta) {
            return Err(SolverError::InvalidConfig(
                "relaxation factors must lie in (0, 2]".into(),
            ));
        }
        if !(self.tol > 0.0) || self.max_iter < 1 {
            return Err(SolverError::InvalidConfig(
                "tolerance must be positive and the sweep cap at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Assembled p–θ operators. Slave rows are empty and slave values are
/// copied from their master after each sweep.
#[derive(Debug, Clone)]
pub struct GreSystem {
    /// Acts on p.
    pub diffusion: CsrMatrix,
    /// Acts on θ.
    pub convection: CsrMatrix,
    /// Backward-Euler diagonal acting on θ.
    pub capacity: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Fixed pressures (θ = 1 there).
    pub dirichlet: BTreeMap<usize, f64>,
    /// `Some(master)` for periodic slaves.
    pub master: Vec<Option<usize>>,
}

impl GreSystem {
    /// `R_P` at every node (zero on constrained nodes).
    pub fn residual(&self, p: &[f64], theta: &[f64]) -> Vec<f64> {
        let dp = self.diffusion.mul_vec(p);
        let ct = self.convection.mul_vec(theta);
        (0..p.len())
            .map(|i| {
                if self.master[i].is_some() || self.dirichlet.contains_key(&i) {
                    0.0
                } else {
                    dp[i] - ct[i] - self.capacity[i] * theta[i] + self.rhs[i]
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SorReport {
    pub p: Vec<f64>,
    pub theta: Vec<f64>,
    pub iterations: usize,
    pub error: f64,
    /// `(e_SOR, cavitated node count)` per sweep.
    pub history: Vec<(f64, usize)>,
    pub complementarity: f64,
}

fn row_dot_excluding(m: &CsrMatrix, r: usize, x: &[f64]) -> (f64, f64) {
    let (cols, vals) = m.row(r);
    let mut off = 0.0;
    let mut diag = 0.0;
    for (&c, &v) in cols.iter().zip(vals) {
        if c == r {
            diag = v;
        } else {
            off += v * x[c];
        }
    }
    (off, diag)
}

/// Runs the extended SOR from `(p0, θ0)`.
pub fn sor_p_theta(system: &GreSystem, p0: &[f64], theta0: &[f64], cfg: &SorConfig) -> Result<SorReport, SolverError> {
    cfg.check()?;
    let n = p0.len();
    let mut p = p0.to_vec();
    let mut theta: Vec<f64> = theta0.iter().map(|t| t.clamp(0.0, 1.0)).collect();
    for (&i, &v) in &system.dirichlet {
        p[i] = v;
        theta[i] = 1.0;
    }
    let free: Vec<usize> = (0..n)
        .filter(|&i| system.master[i].is_none() && !system.dirichlet.contains_key(&i))
        .collect();
    let pc = cfg.p_cav;
    let tiny = 1e-300;
    let mut history = Vec::new();
    let mut error = 1.0;
    let mut r = 0;

    while error > cfg.tol && r < cfg.max_iter {
        r += 1;
        let mut dp_max: f64 = 0.0;
        let mut dth_max: f64 = 0.0;
        for &i in &free {
            let (p_old, th_old) = (p[i], theta[i]);
            if p[i] > pc || theta[i] >= 1.0 {
                let (d_off, d_pp) = row_dot_excluding(&system.diffusion, i, &p);
                if d_pp.abs() > tiny {
                    let ct: f64 = {
                        let (cols, vals) = system.convection.row(i);
                        cols.iter().zip(vals).map(|(&c, &v)| v * theta[c]).sum()
                    };
                    let target = (-d_off + ct + system.capacity[i] * theta[i] - system.rhs[i]) / d_pp;
                    p[i] = cfg.omega_p * target + (1.0 - cfg.omega_p) * p[i];
                    if p[i] >= pc {
                        theta[i] = 1.0;
                    } else {
                        p[i] = pc;
                    }
                }
            }
            if p[i] <= pc || theta[i] < 1.0 {
                let (c_off, c_pp) = row_dot_excluding(&system.convection, i, &theta);
                let a = c_pp + system.capacity[i];
                if a > tiny {
                    let dp_row: f64 = {
                        let (cols, vals) = system.diffusion.row(i);
                        cols.iter().zip(vals).map(|(&c, &v)| v * p[c]).sum()
                    };
                    let target = (dp_row - c_off + system.rhs[i]) / a;
                    let t = cfg.omega_theta * target + (1.0 - cfg.omega_theta) * theta[i];
                    if t < 1.0 {
                        theta[i] = t.max(0.0);
                        p[i] = pc;
                    } else {
                        theta[i] = 1.0;
                    }
                }
            }
            dp_max = dp_max.max((p[i] - p_old).abs());
            dth_max = dth_max.max((theta[i] - th_old).abs());
        }
        for (i, m) in system.master.iter().enumerate() {
            if let Some(m) = *m {
                p[i] = p[m];
                theta[i] = theta[m];
            }
        }
        let p_scale = p.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(tiny);
        error = (dp_max / p_scale).max(dth_max);
        let cavitated = theta.iter().filter(|&&t| t < 1.0).count();
        history.push((error, cavitated));
        if !error.is_finite() {
            break;
        }
    }
    let complementarity = p
        .iter()
        .zip(&theta)
        .map(|(pp, t)| ((pp - pc) * (1.0 - t)).abs())
        .fold(0.0, f64::max);
    if !(error <= cfg.tol) {
        return Err(SolverError::SorNotConverged {
            iterations: r,
            error,
            history: history.into_iter().map(|h| h.0).collect(),
        });
    }
    Ok(SorReport {
        p,
        theta,
        iterations: r,
        error,
        history,
        complementarity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// 1D chain: unit Laplacian on p, upwind transport of θ with unit flux.
    fn chain(n: usize, flux: f64) -> GreSystem {
        let rows: Vec<BTreeSet<usize>> = (0..n)
            .map(|i| (i.saturating_sub(1)..=(i + 1).min(n - 1)).collect())
            .collect();
        let mut d = CsrMatrix::from_pattern(&rows);
        let mut c = d.clone();
        for i in 0..n - 1 {
            // face between i and i+1
            d.add(i, i, -1.0);
            d.add(i, i + 1, 1.0);
            d.add(i + 1, i + 1, -1.0);
            d.add(i + 1, i, 1.0);
            c.add(i, i, flux);
            c.add(i + 1, i, -flux);
        }
        GreSystem {
            diffusion: d,
            convection: c,
            capacity: vec![0.0; n],
            rhs: vec![0.0; n],
            dirichlet: BTreeMap::from([(0, 1.0), (n - 1, 1.0)]),
            master: vec![None; n],
        }
    }

    #[test]
    fn uniform_flux_keeps_boundary_pressure() {
        let sys = chain(11, 0.0);
        let rep = sor_p_theta(&sys, &[0.5; 11], &[1.0; 11], &SorConfig::default()).unwrap();
        for v in &rep.p {
            assert!((v - 1.0).abs() < 1e-5);
        }
        assert!(rep.theta.iter().all(|&t| t == 1.0));
    }

    #[test]
    fn theta_forced_to_one_when_pressurised() {
        let mut sys = chain(5, 1.0);
        sys.rhs[2] = 1.0; // a source raises p above p_cav
        let rep = sor_p_theta(&sys, &[0.0; 5], &[0.3; 5], &SorConfig::default()).unwrap();
        assert!(rep.p[2] > 1.0);
        assert_eq!(rep.theta[2], 1.0);
    }

    #[test]
    fn strong_sink_cavitates() {
        let mut sys = chain(5, 1.0);
        sys.dirichlet = BTreeMap::from([(0, 0.1), (4, 0.1)]);
        sys.rhs[2] = -0.5;
        let cfg = SorConfig::default();
        let rep = sor_p_theta(&sys, &[0.1; 5], &[1.0; 5], &cfg).unwrap();
        assert_eq!(rep.p[2], 0.0);
        assert!(rep.theta[2] < 1.0);
        assert!(rep.p.iter().all(|&v| v >= 0.0));
        assert!(rep.theta.iter().all(|t| (0.0..=1.0).contains(t)));
        assert!(rep.complementarity < 1e-12);
    }
}
