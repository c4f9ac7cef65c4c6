//! Element-based finite volume solver for thin lubricating films.
//!
//! The crate discretises advection–diffusion balances on node-centred
//! control volumes assembled from hexahedral, prismatic, quadrilateral and
//! triangular elements, and builds on that a cavitating film-pressure
//! solver, a three-dimensional film energy solver and a rigid journal
//! equilibrium solver.

pub mod assembly;
pub mod cli;
pub mod elements;
pub mod lubrication;
pub mod mesh;
pub mod solvers;
pub mod sparse;
pub mod thermal;
