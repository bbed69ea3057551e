use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{GridField, SpaceMesh};

/// Density field and per-axis coefficients of `ρ ∂²u/∂t² - Σ a_k² ∂²u/∂x_k² = f`.
#[derive(Debug, Clone)]
pub struct MediumSpec {
    rho: GridField,
    inv_rho: Vec<f64>,
    rho_min: f64,
    rho_max: f64,
    a: Vec<f64>,
}

impl MediumSpec {
    /// Bounds are taken from the nodal values; use [`MediumSpec::with_bounds`]
    /// when the continuous bounds are known.
    pub fn new(rho: GridField, a: Vec<f64>) -> Result<Self> {
        let n = rho.mesh().dim();
        if a.len() != n {
            return Err(Error::CoefficientCount {
                expected: n,
                got: a.len(),
            });
        }
        for (axis, &value) in a.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveCoefficient { axis, value });
            }
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &r in rho.values() {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidMedium(format!(
                    "density must be positive and finite, found {r}"
                )));
            }
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let inv_rho = rho.values().iter().map(|r| 1.0 / r).collect();
        Ok(Self {
            rho,
            inv_rho,
            rho_min: lo,
            rho_max: hi,
            a,
        })
    }

    pub fn from_fn<F>(mesh: &Arc<SpaceMesh>, a: Vec<f64>, rho: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        Self::new(GridField::from_fn(mesh, rho), a)
    }

    pub fn constant(mesh: &Arc<SpaceMesh>, rho: f64, a: Vec<f64>) -> Result<Self> {
        Self::new(GridField::constant(mesh, rho), a)
    }

    /// Replaces the nodal bounds by the given ones, which must bracket every node.
    pub fn with_bounds(mut self, rho_min: f64, rho_max: f64) -> Result<Self> {
        if !(rho_min > 0.0) || rho_min > self.rho_min || rho_max < self.rho_max {
            return Err(Error::InvalidMedium(format!(
                "bounds [{rho_min}, {rho_max}] do not bracket nodal densities [{}, {}]",
                self.rho_min, self.rho_max
            )));
        }
        self.rho_min = rho_min;
        self.rho_max = rho_max;
        Ok(self)
    }

    pub fn rho(&self) -> &GridField {
        &self.rho
    }

    pub fn inv_rho(&self) -> &[f64] {
        &self.inv_rho
    }

    pub fn rho_min(&self) -> f64 {
        self.rho_min
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn a_max(&self) -> f64 {
        self.a.iter().cloned().fold(0.0, f64::max)
    }
}

/// Initial, boundary and source data of one problem.
pub trait ProblemData: Sync {
    /// `u_0(x)`.
    fn initial_value(&self, x: &[f64]) -> f64;

    /// `u_1(x) = ∂u/∂t` at `t = 0`.
    fn initial_velocity(&self, x: &[f64]) -> f64;

    /// `f(x, t)`.
    fn source(&self, x: &[f64], t: f64) -> f64;

    /// `false` when `f ≡ 0`, which lets the steppers skip the source slices.
    fn has_source(&self) -> bool {
        true
    }

    /// Whether `f` may be evaluated at `t = h_t / 2`.
    fn half_step_source(&self) -> bool {
        true
    }

    /// Dirichlet data `g(x, t)`.
    fn boundary_value(&self, x: &[f64], t: f64) -> f64;

    /// Boundary value of `a_k² v_kk`. `own_face` is true on the faces
    /// `x_k = 0, X_k`, where the value is `ρ ∂²g/∂t² - Σ_{l≠k} a_l² ∂²g/∂x_l² - f`;
    /// on the other faces it is `a_k² ∂²g/∂x_k²`. The default is the case `g = 0`.
    fn aux_boundary(&self, k: usize, x: &[f64], t: f64, own_face: bool) -> f64 {
        let _ = k;
        if own_face {
            -self.source(x, t)
        } else {
            0.0
        }
    }
}

/// Largest `|u_0 - g(·, 0)|` over the boundary nodes.
pub fn compatibility_defect(mesh: &SpaceMesh, data: &dyn ProblemData) -> f64 {
    let mut x = vec![0.0; mesh.dim()];
    mesh.boundary_indices()
        .iter()
        .map(|&i| {
            mesh.point_into(i, &mut x);
            (data.initial_value(&x) - data.boundary_value(&x, 0.0)).abs()
        })
        .fold(0.0, f64::max)
}
