use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    L2,
    H1,
    Energy,
}

/// `p = ln(e_coarse / e_fine) / ln q`.
pub fn runge_rate(e_coarse: f64, e_fine: f64, q: f64) -> Result<f64> {
    if !(e_coarse > 0.0) || !(e_fine > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "errors must be positive, got {e_coarse} and {e_fine}"
        )));
    }
    if !(q > 1.0) {
        return Err(Error::InvalidArgument(format!("refinement ratio must exceed 1, got {q}")));
    }
    Ok((e_coarse / e_fine).ln() / q.ln())
}

/// Expected rate `k/(k+1) λ` in L² and `k/(k+1) (λ - 1)` in the gradient and
/// energy norms, for `0 <= λ <= k + 1`; `λ` outside is clamped.
pub fn theoretical_rate(k: u32, lambda: f64, norm: NormKind) -> f64 {
    let kf = k as f64;
    let upper = kf + 1.0;
    let lam = if (0.0..=upper).contains(&lambda) {
        lambda
    } else {
        log::warn!("smoothness order {lambda} outside [0, {upper}], clamped");
        lambda.clamp(0.0, upper)
    };
    let factor = kf / (kf + 1.0);
    match norm {
        NormKind::L2 => factor * lam,
        NormKind::H1 | NormKind::Energy => factor * (lam - 1.0),
    }
}

/// Expected rates in all three norms; smooth data (`None`) give `k` everywhere.
pub fn theoretical_rates(k: u32, lambda: Option<f64>) -> [f64; 3] {
    match lambda {
        None => [k as f64; 3],
        Some(l) => [NormKind::L2, NormKind::H1, NormKind::Energy].map(|n| theoretical_rate(k, l, n)),
    }
}
