//! Finite-difference solvers for the acoustic wave equation
//! `ρ(x) ∂²u/∂t² - Σ_k a_k² ∂²u/∂x_k² = f` on a box with Dirichlet data.
//!
//! The main solver is a three-level, semi-explicit, fourth-order vector compact
//! scheme: each time step solves independent three-point Numerov systems along
//! grid lines for auxiliary second-derivative fields and then updates the
//! solution pointwise. A classical second-order leapfrog scheme is included as a
//! baseline, together with exact solutions and a convergence-study harness.

pub mod error;
pub mod grid;
pub mod harness;
pub mod numerov;
pub mod oracles;
pub mod parallel;
pub mod scheme;

pub use error::{Error, Result};
