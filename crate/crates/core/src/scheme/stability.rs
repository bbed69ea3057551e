use serde::{Deserialize, Serialize};

use super::problem::MediumSpec;
use crate::error::{Error, Result};
use crate::grid::TensorMesh;

/// Mesh-ratio diagnostics of the compact scheme.
///
/// `cfl_number` is `h_t² Σ a_k²/h_k² / ρ_min`. The proven sufficient conditions
/// are `cfl/3 <= 1 - ε` and `cfl <= (2/3)(1 - ε0²)`; `margin_eps` and
/// `margin_eps0` are the largest admissible `ε`, `ε0` (0 when none exists).
/// `satisfied` is the sharp limit `cfl <= 1` of the scheme on the highest mesh
/// mode for constant density; `courant_ratio` is `sqrt(cfl)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub cfl_number: f64,
    pub courant_ratio: f64,
    pub margin_eps: f64,
    pub margin_eps0: f64,
    /// Both proven conditions hold with positive margins (or with the requested ε, ε0).
    pub sufficient: bool,
    pub satisfied: bool,
}

/// `eps`/`eps0` of `None` ask for the maximal margins only.
pub fn check_stability(
    mesh: &TensorMesh,
    medium: &MediumSpec,
    eps: Option<f64>,
    eps0: Option<f64>,
) -> Result<StabilityReport> {
    let ht = mesh.time_step();
    if !(ht > 0.0) {
        return Err(Error::InvalidMesh(format!("time step must be positive, got {ht}")));
    }
    let a = medium.a();
    if a.len() != mesh.dim() {
        return Err(Error::CoefficientCount {
            expected: mesh.dim(),
            got: a.len(),
        });
    }
    let mut sum = 0.0;
    for (ak, ax) in a.iter().zip(mesh.space().axes()) {
        let h = ax.step();
        if !(h > 0.0) {
            return Err(Error::InvalidMesh(format!("space step must be positive, got {h}")));
        }
        sum += ak * ak / (h * h);
    }
    for (name, v) in [("eps", eps), ("eps0", eps0)] {
        if let Some(v) = v {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1), got {v}")));
            }
        }
    }
    let cfl = ht * ht * sum / medium.rho_min();
    let margin_eps = (1.0 - cfl / 3.0).max(0.0);
    let margin_eps0 = if cfl < 2.0 / 3.0 {
        (1.0 - 1.5 * cfl).sqrt()
    } else {
        0.0
    };
    let sufficient = match (eps, eps0) {
        (Some(e), Some(e0)) => cfl <= (3.0 * (1.0 - e)).min(2.0 / 3.0 * (1.0 - e0 * e0)),
        (Some(e), None) => cfl <= 3.0 * (1.0 - e) && margin_eps0 > 0.0,
        (None, Some(e0)) => cfl <= 2.0 / 3.0 * (1.0 - e0 * e0) && margin_eps > 0.0,
        (None, None) => margin_eps > 0.0 && margin_eps0 > 0.0,
    };
    Ok(StabilityReport {
        cfl_number: cfl,
        courant_ratio: cfl.sqrt(),
        margin_eps,
        margin_eps0,
        sufficient,
        satisfied: cfl <= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{SpaceMesh, TimeMesh};

    fn cube_mesh(n: usize, t: f64, m: usize) -> TensorMesh {
        TensorMesh::new(
            SpaceMesh::cube(3, 1.0, n, 0.0).unwrap(),
            TimeMesh::new(t, m).unwrap(),
        )
    }

    #[test]
    fn travelling_wave_setup_has_courant_ratio_point_nine() {
        let mesh = cube_mesh(81, 0.3, 27);
        let a = 1.0 / 3f64.sqrt();
        let medium = MediumSpec::constant(mesh.space(), 1.0, vec![a; 3]).unwrap();
        let r = check_stability(&mesh, &medium, None, None).unwrap();
        assert!((r.courant_ratio - 0.9).abs() < 1e-12);
        assert!(r.satisfied);
        // 0.81 exceeds 2/3, so the proven sufficient inequality does not hold here.
        assert!(!r.sufficient);
        let doubled = cube_mesh(81, 0.6, 27);
        assert!(!check_stability(&doubled, &medium, None, None).unwrap().satisfied);
    }

    #[test]
    fn small_time_step_gives_margins_near_one() {
        let mesh = cube_mesh(10, 1e-3, 1000);
        let medium = MediumSpec::constant(mesh.space(), 1.0, vec![1.0; 3]).unwrap();
        let r = check_stability(&mesh, &medium, None, None).unwrap();
        assert!(r.satisfied && r.sufficient);
        assert!(r.margin_eps > 0.99 && r.margin_eps0 > 0.99);
    }

    #[test]
    fn boundary_case_matches_hand_evaluation() {
        // h_t² Σ a²/h² = ρ_min exactly: cfl = 1.
        let mesh = TensorMesh::new(
            SpaceMesh::cube(1, 1.0, 4, 0.0).unwrap(),
            TimeMesh::new(1.0, 4).unwrap(),
        );
        let medium = MediumSpec::constant(mesh.space(), 1.0, vec![1.0]).unwrap();
        let r = check_stability(&mesh, &medium, Some(0.5), Some(0.1)).unwrap();
        assert!((r.cfl_number - 1.0).abs() < 1e-15);
        assert!((r.margin_eps - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.margin_eps0, 0.0);
        // min{3(1 - 0.5), (2/3)(1 - 0.01)} = 0.66 < 1.
        assert!(!r.sufficient);
        assert!(r.satisfied);
        assert!(check_stability(&mesh, &medium, Some(1.5), None).is_err());
    }
}
