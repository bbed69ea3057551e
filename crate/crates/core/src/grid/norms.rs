//! Mesh norms.
//!
//! Every reduction accumulates one partial sum per last-axis line and then adds
//! the partials sequentially in line order, so results are bit-identical for
//! any worker count.

use rayon::prelude::*;

use super::field::GridField;
use super::mesh::SpaceMesh;
use crate::error::{Error, Result};

fn ordered_sum<F>(mesh: &SpaceMesh, per_line: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let partials: Vec<f64> = (0..mesh.line_count())
        .into_par_iter()
        .map(per_line)
        .collect();
    partials.iter().sum()
}

/// `(v, w)_h = h_1…h_n Σ_{interior} v w`.
pub fn inner_product(v: &GridField, w: &GridField) -> Result<f64> {
    v.ensure_same_mesh(w)?;
    let mesh = v.mesh();
    let len = mesh.line_len();
    let (a, b) = (v.values(), w.values());
    let sum = ordered_sum(mesh, |line| {
        if !mesh.line_is_interior(line) {
            return 0.0;
        }
        let base = line * len;
        (1..len - 1).map(|j| a[base + j] * b[base + j]).sum()
    });
    Ok(mesh.cell_volume() * sum)
}

/// `‖w‖_h`; boundary values are ignored.
pub fn norm_l2h(w: &GridField) -> f64 {
    (sum_sq_interior(w.mesh(), w.values(), None) * w.mesh().cell_volume()).sqrt()
}

/// Σ over interior nodes of `(a - b)²`, or of `a²` when `b` is absent.
fn sum_sq_interior(mesh: &SpaceMesh, a: &[f64], b: Option<&[f64]>) -> f64 {
    let len = mesh.line_len();
    ordered_sum(mesh, |line| {
        if !mesh.line_is_interior(line) {
            return 0.0;
        }
        let base = line * len;
        match b {
            Some(b) => (1..len - 1)
                .map(|j| {
                    let d = a[base + j] - b[base + j];
                    d * d
                })
                .sum(),
            None => (1..len - 1).map(|j| a[base + j] * a[base + j]).sum(),
        }
    })
}

/// `‖w‖²_{H¹_h} = Σ_k a_k² ‖δ̄_k w‖²_{h,k*}` with backward differences over
/// `1 <= i_k <= N_k` and interior indices in the other directions.
pub fn seminorm_h1h(w: &GridField, a: &[f64]) -> Result<f64> {
    Ok(seminorm_h1h_sq(w.mesh(), w.values(), a)?.sqrt())
}

pub(crate) fn seminorm_h1h_sq(mesh: &SpaceMesh, w: &[f64], a: &[f64]) -> Result<f64> {
    let n = mesh.dim();
    if a.len() != n {
        return Err(Error::CoefficientCount {
            expected: n,
            got: a.len(),
        });
    }
    let len = mesh.line_len();
    let shape = mesh.shape();
    let strides = mesh.strides();
    let weights: Vec<f64> = a
        .iter()
        .zip(mesh.axes())
        .map(|(ak, ax)| ak * ak / (ax.step() * ax.step()))
        .collect();
    let sum = ordered_sum(mesh, |line| {
        // Coordinates of the line along the first n-1 axes.
        let mut coords = [0usize; 8];
        let mut coords_vec;
        let c: &mut [usize] = if n - 1 <= coords.len() {
            &mut coords[..n - 1]
        } else {
            coords_vec = vec![0usize; n - 1];
            &mut coords_vec
        };
        let mut rest = line;
        for k in (0..n - 1).rev() {
            c[k] = rest % shape[k];
            rest /= shape[k];
        }
        let interior = |l: usize| c[l] > 0 && c[l] + 1 < shape[l];
        let base = line * len;
        let mut total = 0.0;
        for k in 0..n - 1 {
            let ok = c[k] >= 1 && (0..n - 1).all(|l| l == k || interior(l));
            if !ok {
                continue;
            }
            let s = strides[k];
            let part: f64 = (1..len - 1)
                .map(|j| {
                    let d = w[base + j] - w[base + j - s];
                    d * d
                })
                .sum();
            total += weights[k] * part;
        }
        if (0..n - 1).all(interior) {
            let part: f64 = (1..len)
                .map(|j| {
                    let d = w[base + j] - w[base + j - 1];
                    d * d
                })
                .sum();
            total += weights[n - 1] * part;
        }
        total
    });
    Ok(mesh.cell_volume() * sum)
}

/// `‖y‖_{E_h} = (‖δ̄_t y‖²_h + ‖y‖²_{H¹_h})^{1/2}` with `δ̄_t y = (cur - prev) / h_t`
/// and the `H¹_h` part taken at the current level.
pub fn norm_energy(prev: &GridField, cur: &GridField, time_step: f64, a: &[f64]) -> Result<f64> {
    prev.ensure_same_mesh(cur)?;
    if !(time_step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {time_step}"
        )));
    }
    let mesh = cur.mesh();
    let dt_sq = sum_sq_interior(mesh, cur.values(), Some(prev.values())) * mesh.cell_volume()
        / (time_step * time_step);
    let h1_sq = seminorm_h1h_sq(mesh, cur.values(), a)?;
    Ok((dt_sq + h1_sq).sqrt())
}
