use std::f64::consts::PI;

/// `u = cos(t - x - y - z)` with `a_k = 1/√3`, so that `Σ a_k² ∂_k² u = ∂²u/∂t²`.
pub fn travelling_wave(x: &[f64], t: f64) -> f64 {
    (t - x.iter().sum::<f64>()).cos()
}

/// `∂u/∂t` of [`travelling_wave`].
pub fn travelling_wave_velocity(x: &[f64], t: f64) -> f64 {
    -(t - x.iter().sum::<f64>()).sin()
}

/// `ρ = 1 + sin²2πx sin²2πy sin²2πz`.
pub fn bumpy_density(x: &[f64]) -> f64 {
    1.0 + x.iter().map(|c| (2.0 * PI * c).sin().powi(2)).product::<f64>()
}

/// Source making [`travelling_wave`] solve the equation with density `rho`:
/// `f = (ρ - 1) ∂²u/∂t² = (1 - ρ) cos(t - x - y - z)`.
pub fn travelling_wave_source(rho: f64, x: &[f64], t: f64) -> f64 {
    (1.0 - rho) * travelling_wave(x, t)
}
