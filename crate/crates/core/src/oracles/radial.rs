use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    W0,
    W1,
    W2,
}

/// Piecewise polynomial radial profile supported on `[0, r0]`:
/// `w0 = 1`, `w1 = (r0 - r)/r0`, `w2 = (r/r0)² ((r0 - r)/r0)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub kind: ProfileKind,
    pub r0: f64,
}

impl RadialProfile {
    pub fn new(kind: ProfileKind, r0: f64) -> Result<Self> {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::InvalidArgument(format!("profile radius must be positive, got {r0}")));
        }
        Ok(Self { kind, r0 })
    }

    /// Nikolskii smoothness order `k + 1/2`.
    pub fn smoothness(&self) -> f64 {
        match self.kind {
            ProfileKind::W0 => 0.5,
            ProfileKind::W1 => 1.5,
            ProfileKind::W2 => 2.5,
        }
    }

    /// `w(r)` for `r >= 0`. `w0` is taken as 1 at `r = r0`.
    pub fn value(&self, r: f64) -> f64 {
        let r0 = self.r0;
        if r > r0 {
            return 0.0;
        }
        let s = r / r0;
        match self.kind {
            ProfileKind::W0 => 1.0,
            ProfileKind::W1 => 1.0 - s,
            ProfileKind::W2 => s * s * (1.0 - s) * (1.0 - s),
        }
    }

    /// `w'(r)` for `r` off the support end.
    pub fn derivative(&self, r: f64) -> f64 {
        let r0 = self.r0;
        if r > r0 {
            return 0.0;
        }
        let s = r / r0;
        match self.kind {
            ProfileKind::W0 => 0.0,
            ProfileKind::W1 => -1.0 / r0,
            ProfileKind::W2 => 2.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / r0,
        }
    }

    /// `P(s) = ∫_0^s q w(q) dq`, `s >= 0`.
    pub fn first_moment(&self, s: f64) -> f64 {
        let r0 = self.r0;
        let x = s.min(r0);
        match self.kind {
            ProfileKind::W0 => 0.5 * x * x,
            ProfileKind::W1 => x * x / 2.0 - x * x * x / (3.0 * r0),
            ProfileKind::W2 => {
                let x4 = x.powi(4);
                (r0 * r0 * x4 / 4.0 - 2.0 * r0 * x4 * x / 5.0 + x4 * x * x / 6.0) / r0.powi(4)
            }
        }
    }

    /// `R(x) = ∫_0^x P(|y|) dy`; odd in `x`.
    pub fn second_moment(&self, x: f64) -> f64 {
        let r0 = self.r0;
        let s = x.abs();
        let inside = s.min(r0);
        let mut value = match self.kind {
            ProfileKind::W0 => inside.powi(3) / 6.0,
            ProfileKind::W1 => inside.powi(3) / 6.0 - inside.powi(4) / (12.0 * r0),
            ProfileKind::W2 => {
                let y5 = inside.powi(5);
                (r0 * r0 * y5 / 20.0 - r0 * y5 * inside / 15.0 + y5 * inside * inside / 42.0)
                    / r0.powi(4)
            }
        };
        if s > r0 {
            value += self.first_moment(r0) * (s - r0);
        }
        value.copysign(x)
    }
}

/// Which datum carries the profile; the other data vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialRole {
    InitialValue,
    InitialVelocity,
    Source,
}

/// Spherically symmetric solution of `∂²u/∂t² = a² Δu + f` in free space with
/// one radial datum (`u_0`, `u_1` or a time-independent `f`), from the
/// d'Alembert-type representation of `r u` after odd extension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalWave {
    pub role: RadialRole,
    pub profile: RadialProfile,
    pub a: f64,
}

impl SphericalWave {
    /// Radii below `SMALL_R * r0` use the `r -> 0` limits.
    const SMALL_R: f64 = 1e-6;

    pub fn value(&self, r: f64, t: f64) -> f64 {
        let (a, w) = (self.a, &self.profile);
        let at = a * t;
        let r = r.abs();
        if r < Self::SMALL_R * w.r0 {
            return match self.role {
                RadialRole::InitialValue => w.value(at) + at * w.derivative(at),
                RadialRole::InitialVelocity => t * w.value(at),
                RadialRole::Source => w.first_moment(at) / (a * a),
            };
        }
        match self.role {
            RadialRole::InitialValue => {
                let (lo, hi) = (r - at, r + at);
                (lo * w.value(lo.abs()) + hi * w.value(hi)) / (2.0 * r)
            }
            RadialRole::InitialVelocity => {
                (w.first_moment(r + at) - w.first_moment((r - at).abs())) / (2.0 * a * r)
            }
            RadialRole::Source => {
                (w.second_moment(r + at) - 2.0 * w.second_moment(r) + w.second_moment(r - at))
                    / (2.0 * a * a * r)
            }
        }
    }
}
