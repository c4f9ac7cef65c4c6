//! Film load vector conjugate to the journal displacement `(X_r, Y_r, A_r, B_r)`.
//!
//! With the film thickness `h = c − (Y_r − A_r y) cos x̂ + (X_r − B_r y) sin x̂`
//! the gap closes along `e(x̂) = (−sin x̂, cos x̂)`, so the load carried by
//! the film is `∬ p e dA` and equilibrium reads `F_c = F_ext`:
//!
//! ```text
//! W_X = −∬ p sin x̂ dA      M_X = −∬ p cos x̂ · y dA
//! W_Y =  ∬ p cos x̂ dA      M_Y =  ∬ p sin x̂ · y dA
//! ```
//!
//! Integrals are control-volume area weighted nodal sums.

use crate::mesh::Mesh;

/// `[W_X, W_Y, M_X, M_Y]` for nodal pressure `p` and nodal CV areas.
pub fn hydrodynamic_loads(p: &[f64], mesh: &Mesh, areas: &[f64], radius: f64) -> [f64; 4] {
    let mut w = [0.0; 4];
    for ((node, &pp), &a) in mesh.nodes.iter().zip(p).zip(areas) {
        let xh = node[0] / radius;
        let y = node[1];
        let (s, c) = xh.sin_cos();
        let f = pp * a;
        w[0] -= f * s;
        w[1] += f * c;
        w[2] -= f * c * y;
        w[3] += f * s * y;
    }
    w
}
