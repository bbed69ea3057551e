use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpaceMesh;

/// `ψ(t) = sin(50t) e^{-200t²}`.
pub fn ricker_wavelet(t: f64) -> f64 {
    (50.0 * t).sin() * (-200.0 * t * t).exp()
}

/// Spatial factor of the source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub gamma: f64,
    /// `(γ/π)^{3/2}` prefactor with unit integral instead of `(π/γ)^{3/2}`.
    pub normalized: bool,
}

impl GaussianBump {
    pub fn amplitude(&self) -> f64 {
        if self.normalized {
            (self.gamma / PI).powf(1.5)
        } else {
            (PI / self.gamma).powf(1.5)
        }
    }

    /// `φ_γ(r)`.
    pub fn value(&self, r: f64) -> f64 {
        self.amplitude() * (-self.gamma * r * r).exp()
    }

    /// `∫_{R³} φ_γ dV` in closed form: `(π/γ)^{3/2}` times the amplitude.
    pub fn total_mass(&self) -> f64 {
        self.amplitude() * (PI / self.gamma).powf(1.5)
    }

    /// `∫ 4π r² φ_γ(r) dr` by composite Simpson on `[0, 12/√γ]`, past which the
    /// integrand is below `e^{-144}` of its scale.
    pub fn radial_mass(&self) -> f64 {
        const PANELS: usize = 4000;
        let cut = 12.0 / self.gamma.sqrt();
        let h = cut / PANELS as f64;
        let g = |r: f64| 4.0 * PI * r * r * self.value(r);
        let inner: f64 = (1..PANELS)
            .map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h))
            .sum();
        h / 3.0 * (g(0.0) + inner + g(cut))
    }

    /// Cell volume times the sum of nodal values: what a mesh sees of the bump.
    pub fn nodal_mass(&self, mesh: &SpaceMesh, center: &[f64]) -> f64 {
        let mut x = vec![0.0; mesh.dim()];
        let sum: f64 = (0..mesh.len())
            .map(|i| {
                mesh.point_into(i, &mut x);
                let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                (-self.gamma * r2).exp()
            })
            .sum();
        self.amplitude() * sum * mesh.cell_volume()
    }
}

/// `f = φ_γ(|x - center|) ψ(t)`.
pub fn ricker_source(x: &[f64], t: f64, bump: &GaussianBump, center: &[f64]) -> f64 {
    let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
    bump.amplitude() * (-bump.gamma * r2).exp() * ricker_wavelet(t)
}

/// Density layers along the first axis, closed on the left: `layers[i] = (start, ρ)`,
/// ascending starts; the last layer also owns the right end `extent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredMedium {
    pub layers: Vec<(f64, f64)>,
    pub extent: f64,
}

impl LayeredMedium {
    /// Layers `[0,1)`, `[1,2)`, `[2,3]` with `ρ = 4/9, 1, 1/9`.
    pub fn three_layer() -> Self {
        Self {
            layers: vec![(0.0, 4.0 / 9.0), (1.0, 1.0), (2.0, 1.0 / 9.0)],
            extent: 3.0,
        }
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        let start = self.layers.first().map_or(0.0, |l| l.0);
        if !(start..=self.extent).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self
            .layers
            .iter()
            .rev()
            .find(|(s, _)| x >= *s)
            .map(|l| l.1)
            .expect("x is at or past the first layer start"))
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.layers
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), l| (lo.min(l.1), hi.max(l.1)))
    }
}
