use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::radial::{ProfileKind, RadialProfile, RadialRole, SphericalWave};
use super::ricker::{ricker_source, GaussianBump, LayeredMedium};
use super::travelling::{
    bumpy_density, travelling_wave, travelling_wave_source, travelling_wave_velocity,
};
use crate::error::{Error, Result};
use crate::grid::{SpaceMesh, TensorMesh, TimeMesh};
use crate::scheme::{MediumSpec, ProblemData};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScenarioKind {
    /// `u = cos(t - x - y - z)` on `(0, 1)³`, `ρ ≡ 1` or the bumpy density.
    TravellingWave { variable_density: bool },
    /// One radial datum centred at the origin of a symmetric cube, `ρ ≡ 1`.
    Spherical { wave: SphericalWave },
    /// Ricker source in a layered medium; no exact solution.
    Layered {
        medium: LayeredMedium,
        bump: GaussianBump,
        center: Vec<f64>,
        snapshots: Vec<f64>,
    },
}

/// A named 3D test problem on the cube `[origin, origin + extent]³`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub extent: f64,
    pub origin: f64,
    pub t_final: f64,
    /// Common value of every `a_k`.
    pub a: f64,
    /// Default `(N, M)` refinement ladder.
    pub ladder: Vec<(usize, usize)>,
    pub kind: ScenarioKind,
}

const DIM: usize = 3;

fn default_ladder() -> Vec<(usize, usize)> {
    vec![(81, 27), (135, 45), (225, 75), (375, 125)]
}

fn spherical(name: &str, description: &str, role: RadialRole, kind: ProfileKind) -> Scenario {
    Scenario {
        name: name.into(),
        description: description.into(),
        extent: 1.0,
        origin: -0.5,
        t_final: 0.3,
        a: 1.0 / 3f64.sqrt(),
        ladder: default_ladder(),
        kind: ScenarioKind::Spherical {
            wave: SphericalWave {
                role,
                profile: RadialProfile { kind, r0: 0.2 },
                a: 1.0 / 3f64.sqrt(),
            },
        },
    }
}

/// All built-in scenarios.
pub fn scenario_catalog() -> Vec<Scenario> {
    let wave = |name: &str, description: &str, variable_density| Scenario {
        name: name.into(),
        description: description.into(),
        extent: 1.0,
        origin: 0.0,
        t_final: 0.3,
        a: 1.0 / 3f64.sqrt(),
        ladder: default_ladder(),
        kind: ScenarioKind::TravellingWave { variable_density },
    };
    use ProfileKind::*;
    use RadialRole::*;
    vec![
        wave("ex1a", "travelling wave, constant density", false),
        wave("ex1b", "travelling wave, variable density", true),
        spherical("ex2a", "spherical wave, u0 = w1", InitialValue, W1),
        spherical("ex2b", "spherical wave, u0 = w2", InitialValue, W2),
        spherical("ex2c", "spherical wave, u1 = w0", InitialVelocity, W0),
        spherical("ex2d", "spherical wave, u1 = w1", InitialVelocity, W1),
        spherical("ex2e", "spherical wave, f = w0", Source, W0),
        spherical("ex2f", "spherical wave, f = w1", Source, W1),
        Scenario {
            name: "ex3".into(),
            description: "Ricker source in a three-layer medium".into(),
            extent: 3.0,
            origin: 0.0,
            t_final: 0.8,
            a: 1.0,
            ladder: vec![(100, 140), (200, 280)],
            kind: ScenarioKind::Layered {
                medium: LayeredMedium::three_layer(),
                bump: GaussianBump {
                    gamma: 1e4,
                    normalized: false,
                },
                center: vec![1.5; 3],
                snapshots: vec![0.25, 0.4, 0.5, 0.6, 0.7, 0.8],
            },
        },
    ]
}

pub fn scenario(name: &str) -> Result<Scenario> {
    scenario_catalog()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.into()))
}

impl Scenario {
    pub fn dim(&self) -> usize {
        DIM
    }

    pub fn coefficients(&self) -> Vec<f64> {
        vec![self.a; DIM]
    }

    pub fn space_mesh(&self, n: usize) -> Result<SpaceMesh> {
        SpaceMesh::cube(DIM, self.extent, n, self.origin)
    }

    pub fn mesh(&self, n: usize, m: usize) -> Result<TensorMesh> {
        Ok(TensorMesh::new(self.space_mesh(n)?, TimeMesh::new(self.t_final, m)?))
    }

    pub fn has_exact(&self) -> bool {
        !matches!(self.kind, ScenarioKind::Layered { .. })
    }

    /// Smoothness order of the data, `None` for smooth data.
    pub fn smoothness(&self) -> Option<f64> {
        match &self.kind {
            ScenarioKind::Spherical { wave } => Some(
                wave.profile.smoothness()
                    + match wave.role {
                        RadialRole::InitialValue => 0.0,
                        RadialRole::InitialVelocity => 1.0,
                        RadialRole::Source => 2.0,
                    },
            ),
            _ => None,
        }
    }

    pub fn snapshots(&self) -> &[f64] {
        match &self.kind {
            ScenarioKind::Layered { snapshots, .. } => snapshots,
            _ => &[],
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        match &self.kind {
            ScenarioKind::TravellingWave {
                variable_density: true,
            } => bumpy_density(x),
            ScenarioKind::Layered { medium, .. } => {
                // Node coordinates may overshoot the end by rounding.
                let start = medium.layers.first().map_or(0.0, |l| l.0);
                medium
                    .density(x[0].clamp(start, medium.extent))
                    .expect("clamped into the layered domain")
            }
            _ => 1.0,
        }
    }

    /// Nodal density with the continuous bounds where they are known.
    pub fn medium(&self, mesh: &Arc<SpaceMesh>) -> Result<MediumSpec> {
        let spec = MediumSpec::from_fn(mesh, self.coefficients(), |x| self.density(x))?;
        match &self.kind {
            ScenarioKind::TravellingWave {
                variable_density: true,
            } => spec.with_bounds(1.0, 2.0),
            ScenarioKind::Layered { medium, .. } => {
                let (lo, hi) = medium.bounds();
                spec.with_bounds(lo, hi)
            }
            _ => Ok(spec),
        }
    }

    fn radius(&self, x: &[f64], center: &[f64]) -> f64 {
        x.iter()
            .zip(center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Exact solution, when the scenario has one.
    pub fn exact(&self, x: &[f64], t: f64) -> Result<f64> {
        match &self.kind {
            ScenarioKind::TravellingWave { .. } => Ok(travelling_wave(x, t)),
            ScenarioKind::Spherical { wave } => Ok(wave.value(self.radius(x, &[0.0; DIM]), t)),
            ScenarioKind::Layered { .. } => Err(Error::NoExactSolution(self.name.clone())),
        }
    }
}

impl ProblemData for Scenario {
    fn initial_value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            ScenarioKind::TravellingWave { .. } => travelling_wave(x, 0.0),
            ScenarioKind::Spherical { wave } if wave.role == RadialRole::InitialValue => {
                wave.profile.value(self.radius(x, &[0.0; DIM]))
            }
            _ => 0.0,
        }
    }

    fn initial_velocity(&self, x: &[f64]) -> f64 {
        match &self.kind {
            ScenarioKind::TravellingWave { .. } => travelling_wave_velocity(x, 0.0),
            ScenarioKind::Spherical { wave } if wave.role == RadialRole::InitialVelocity => {
                wave.profile.value(self.radius(x, &[0.0; DIM]))
            }
            _ => 0.0,
        }
    }

    fn source(&self, x: &[f64], t: f64) -> f64 {
        match &self.kind {
            ScenarioKind::TravellingWave {
                variable_density: true,
            } => travelling_wave_source(bumpy_density(x), x, t),
            ScenarioKind::TravellingWave { .. } => 0.0,
            ScenarioKind::Spherical { wave } if wave.role == RadialRole::Source => {
                wave.profile.value(self.radius(x, &[0.0; DIM]))
            }
            ScenarioKind::Spherical { .. } => 0.0,
            ScenarioKind::Layered { bump, center, .. } => ricker_source(x, t, bump, center),
        }
    }

    fn has_source(&self) -> bool {
        match &self.kind {
            ScenarioKind::TravellingWave { variable_density } => *variable_density,
            ScenarioKind::Spherical { wave } => wave.role == RadialRole::Source,
            ScenarioKind::Layered { .. } => true,
        }
    }

    fn boundary_value(&self, x: &[f64], t: f64) -> f64 {
        match &self.kind {
            ScenarioKind::TravellingWave { .. } => travelling_wave(x, t),
            _ => 0.0,
        }
    }

    fn aux_boundary(&self, _k: usize, x: &[f64], t: f64, own_face: bool) -> f64 {
        match &self.kind {
            // a² ∂_k² u on every face; both boundary formulas reduce to it here.
            ScenarioKind::TravellingWave { .. } => -self.a * self.a * travelling_wave(x, t),
            _ if own_face => -self.source(x, t),
            _ => 0.0,
        }
    }
}
