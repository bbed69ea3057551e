#![allow(dead_code)]

pub mod quadrature;

use compact_wave::scheme::ProblemData;

type Space = Box<dyn Fn(&[f64]) -> f64 + Sync>;
type SpaceTime = Box<dyn Fn(&[f64], f64) -> f64 + Sync>;
type Axis = Box<dyn Fn(usize, &[f64], f64) -> f64 + Sync>;

/// Problem built from a known solution `u`: `f = ρ u_tt - Σ a_k² u_kk`, `g = u`
/// and boundary `a_k² v_kk = a_k² u_kk`.
pub struct Manufactured {
    pub a: Vec<f64>,
    pub u: SpaceTime,
    pub u_t: SpaceTime,
    pub u_tt: SpaceTime,
    pub u_kk: Axis,
    pub rho: Space,
}

impl Manufactured {
    pub fn exact(&self, x: &[f64], t: f64) -> f64 {
        (self.u)(x, t)
    }
}

impl ProblemData for Manufactured {
    fn initial_value(&self, x: &[f64]) -> f64 {
        (self.u)(x, 0.0)
    }

    fn initial_velocity(&self, x: &[f64]) -> f64 {
        (self.u_t)(x, 0.0)
    }

    fn source(&self, x: &[f64], t: f64) -> f64 {
        let lap: f64 = (0..self.a.len())
            .map(|k| self.a[k] * self.a[k] * (self.u_kk)(k, x, t))
            .sum();
        (self.rho)(x) * (self.u_tt)(x, t) - lap
    }

    fn boundary_value(&self, x: &[f64], t: f64) -> f64 {
        (self.u)(x, t)
    }

    fn aux_boundary(&self, k: usize, x: &[f64], t: f64, _own_face: bool) -> f64 {
        self.a[k] * self.a[k] * (self.u_kk)(k, x, t)
    }
}

/// Arbitrary data with no consistency between the parts; used by oracles that
/// only check algebra.
pub struct Arbitrary {
    pub u0: Space,
    pub u1: Space,
    pub f: SpaceTime,
    pub g: SpaceTime,
    pub gk: Axis,
}

impl ProblemData for Arbitrary {
    fn initial_value(&self, x: &[f64]) -> f64 {
        (self.u0)(x)
    }

    fn initial_velocity(&self, x: &[f64]) -> f64 {
        (self.u1)(x)
    }

    fn source(&self, x: &[f64], t: f64) -> f64 {
        (self.f)(x, t)
    }

    fn boundary_value(&self, x: &[f64], t: f64) -> f64 {
        (self.g)(x, t)
    }

    fn aux_boundary(&self, k: usize, x: &[f64], t: f64, _own_face: bool) -> f64 {
        (self.gk)(k, x, t)
    }
}
