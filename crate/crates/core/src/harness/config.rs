//! TOML run configuration. Every scenario parameter has a named key whose
//! default is the built-in catalog value.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::study::RunOptions;
use crate::error::{Error, Result};
use crate::oracles::{scenario, Scenario, ScenarioKind};
use crate::scheme::{FirstStepVariant, SchemeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    #[default]
    Compact,
    Explicit,
    Both,
}

impl SchemeChoice {
    pub fn kinds(self) -> Vec<SchemeKind> {
        match self {
            SchemeChoice::Compact => vec![SchemeKind::Compact],
            SchemeChoice::Explicit => vec![SchemeKind::Explicit],
            SchemeChoice::Both => vec![SchemeKind::Compact, SchemeKind::Explicit],
        }
    }
}

impl std::str::FromStr for SchemeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compact" => Ok(SchemeChoice::Compact),
            "explicit" => Ok(SchemeChoice::Explicit),
            "both" => Ok(SchemeChoice::Both),
            other => Err(Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Overrides applied on top of a catalog scenario; absent keys keep the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOverrides {
    pub t_final: Option<f64>,
    pub a: Option<f64>,
    /// Support radius of the radial profiles.
    pub r0: Option<f64>,
    /// Gaussian sharpness of the smoothed point source.
    pub gamma: Option<f64>,
    /// Use the unit-mass Gaussian instead of the printed normalization.
    pub normalized_source: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Sample the error series every this many steps; 0 disables it.
    pub series_every: usize,
    pub l2_scale: f64,
    /// Fill the timing columns of the table CSV; off keeps files reproducible.
    pub timing: bool,
    pub field_dumps: bool,
    /// Snapshot times; the scenario's own list when absent.
    pub snapshots: Option<Vec<f64>>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            series_every: 1,
            l2_scale: 1.0,
            timing: false,
            field_dumps: false,
            snapshots: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    #[serde(default)]
    pub scheme: SchemeChoice,
    /// Single-run mesh; defaults to the first ladder entry.
    pub n: Option<usize>,
    pub m: Option<usize>,
    /// Study ladder; defaults to the scenario's.
    pub ladder: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    pub first_step: FirstStepVariant,
    pub workers: Option<usize>,
    #[serde(default)]
    pub explicit_first_step_rho_weight: bool,
    #[serde(default)]
    pub explicit_first_step_velocity_correction: bool,
    #[serde(default)]
    pub overrides: ScenarioOverrides,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn new(scenario: impl Into<String>) -> Self {
        RunConfig {
            scenario: scenario.into(),
            scheme: SchemeChoice::default(),
            n: None,
            m: None,
            ladder: None,
            first_step: FirstStepVariant::default(),
            workers: None,
            explicit_first_step_rho_weight: false,
            explicit_first_step_velocity_correction: false,
            overrides: ScenarioOverrides::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn options(&self) -> RunOptions {
        RunOptions {
            variant: self.first_step,
            workers: self.workers,
            explicit_rho_weight: self.explicit_first_step_rho_weight,
            explicit_velocity_correction: self.explicit_first_step_velocity_correction,
        }
    }

    /// The catalog scenario with overrides applied.
    pub fn scenario(&self) -> Result<Scenario> {
        let mut s = scenario(&self.scenario).map_err(|e| Error::Config(e.to_string()))?;
        let o = &self.overrides;
        if let Some(t) = o.t_final {
            if !(t > 0.0) {
                return Err(Error::Config(format!("t_final must be positive, got {t}")));
            }
            s.t_final = t;
        }
        if let Some(a) = o.a {
            if !(a > 0.0) {
                return Err(Error::Config(format!("a must be positive, got {a}")));
            }
            s.a = a;
        }
        match &mut s.kind {
            ScenarioKind::Spherical { wave } => {
                wave.a = s.a;
                if let Some(r0) = o.r0 {
                    if !(r0 > 0.0 && r0 < s.extent / 2.0) {
                        return Err(Error::Config(format!("r0 must lie in (0, X/2), got {r0}")));
                    }
                    wave.profile.r0 = r0;
                }
            }
            ScenarioKind::Layered { bump, .. } => {
                if let Some(g) = o.gamma {
                    if !(g > 0.0) {
                        return Err(Error::Config(format!("gamma must be positive, got {g}")));
                    }
                    bump.gamma = g;
                }
                if let Some(norm) = o.normalized_source {
                    bump.normalized = norm;
                }
            }
            ScenarioKind::TravellingWave { .. } => {}
        }
        let misplaced = match s.kind {
            ScenarioKind::Spherical { .. } => o.gamma.is_some() || o.normalized_source.is_some(),
            ScenarioKind::Layered { .. } => o.r0.is_some(),
            ScenarioKind::TravellingWave { .. } => {
                o.r0.is_some() || o.gamma.is_some() || o.normalized_source.is_some()
            }
        };
        if misplaced {
            return Err(Error::Config(format!(
                "override does not apply to scenario `{}`",
                self.scenario
            )));
        }
        if let Some(l) = &self.ladder {
            s.ladder = l.clone();
        }
        Ok(s)
    }

    /// Mesh for a single run.
    pub fn mesh_size(&self, scenario: &Scenario) -> Result<(usize, usize)> {
        let first = scenario.ladder.first().copied();
        match (self.n, self.m, first) {
            (Some(n), Some(m), _) => Ok((n, m)),
            (None, None, Some(nm)) => Ok(nm),
            (Some(n), None, Some((n0, m0))) if (n * m0) % n0 == 0 => Ok((n, n * m0 / n0)),
            _ => Err(Error::Config("give both N and M".into())),
        }
    }
}
