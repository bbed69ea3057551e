//! Exact solutions, analytic data and the built-in scenarios.

mod catalog;
mod radial;
mod ricker;
mod travelling;

pub use catalog::{scenario, scenario_catalog, Scenario, ScenarioKind};
pub use radial::{ProfileKind, RadialProfile, RadialRole, SphericalWave};
pub use ricker::{ricker_source, ricker_wavelet, GaussianBump, LayeredMedium};
pub use travelling::{
    bumpy_density, travelling_wave, travelling_wave_source, travelling_wave_velocity,
};
