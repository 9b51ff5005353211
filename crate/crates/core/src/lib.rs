//! Pseudo-spectral simulation and diagnostics for 2D Navier–Stokes near the Couette flow.

pub mod coordinates;
pub mod diagnostics;
pub mod linear;
pub mod multipliers;
pub mod solver;
pub mod spectral;
