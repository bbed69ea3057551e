//! Three-point difference operators on grid fields.
//!
//! `Λ_k w = (w_{i+1} - 2 w_i + w_{i-1}) / h_k²` along axis `k`, the Numerov
//! average `s_kN w = (w_{i-1} + 10 w_i + w_{i+1}) / 12`, and
//! `L_h = Σ a_k² Λ_k`. Results at nodes where a stencil would leave the mesh
//! are set to zero and carry no meaning.

use rayon::prelude::*;

use super::field::GridField;
use super::mesh::SpaceMesh;
use crate::error::{Error, Result};

/// Applies `stencil(w_{i-1}, w_i, w_{i+1})` along axis `k` at nodes interior in
/// direction `k`; all other nodes get 0.
fn stencil_along<S>(w: &GridField, k: usize, stencil: S) -> Result<GridField>
where
    S: Fn(f64, f64, f64) -> f64 + Sync,
{
    let mesh = w.mesh();
    mesh.axis(k)?;
    let src = w.values();
    let mut out = vec![0.0; mesh.len()];
    let n = mesh.dim();
    if k + 1 == n {
        let len = mesh.line_len();
        out.par_chunks_mut(len)
            .zip(src.par_chunks(len))
            .for_each(|(o, s)| {
                for j in 1..len - 1 {
                    o[j] = stencil(s[j - 1], s[j], s[j + 1]);
                }
            });
    } else {
        let stride = mesh.strides()[k];
        let len = mesh.shape()[k];
        out.par_chunks_mut(stride)
            .enumerate()
            .for_each(|(row, o)| {
                let j = row % len;
                if j == 0 || j + 1 == len {
                    return;
                }
                let base = row * stride;
                let prev = &src[base - stride..base];
                let cur = &src[base..base + stride];
                let next = &src[base + stride..base + 2 * stride];
                for c in 0..stride {
                    o[c] = stencil(prev[c], cur[c], next[c]);
                }
            });
    }
    GridField::from_values(mesh, out)
}

/// `Λ_k w` at nodes interior in direction `k`.
pub fn apply_lambda(w: &GridField, k: usize) -> Result<GridField> {
    let h = w.mesh().axis(k)?.step();
    let inv_h2 = 1.0 / (h * h);
    stencil_along(w, k, move |a, b, c| (a - 2.0 * b + c) * inv_h2)
}

/// Numerov average `s_kN w` at nodes interior in direction `k`.
pub fn apply_skn(w: &GridField, k: usize) -> Result<GridField> {
    w.mesh().axis(k)?;
    stencil_along(w, k, |a, b, c| (a + 10.0 * b + c) / 12.0)
}

/// `L_h w = Σ_k a_k² Λ_k w` at nodes interior in every direction.
pub fn apply_lh(w: &GridField, a: &[f64]) -> Result<GridField> {
    let mesh = w.mesh();
    let kernel = LhKernel::new(mesh, a)?;
    let mut out = vec![0.0; mesh.len()];
    let src = w.values();
    for_each_interior_line(mesh, &mut out, |base, line| {
        kernel.line_into(src, base, line);
    });
    GridField::from_values(mesh, out)
}

/// Coefficients of `L_h` in flat-index form.
#[derive(Debug, Clone)]
pub(crate) struct LhKernel {
    coef: Vec<f64>,
    strides: Vec<usize>,
}

impl LhKernel {
    pub(crate) fn new(mesh: &SpaceMesh, a: &[f64]) -> Result<Self> {
        if a.len() != mesh.dim() {
            return Err(Error::CoefficientCount {
                expected: mesh.dim(),
                got: a.len(),
            });
        }
        let coef = a
            .iter()
            .zip(mesh.axes())
            .map(|(ak, ax)| ak * ak / (ax.step() * ax.step()))
            .collect();
        Ok(Self {
            coef,
            strides: mesh.strides().to_vec(),
        })
    }

    /// `(L_h w)` at the interior node `i`.
    #[inline]
    pub(crate) fn at(&self, w: &[f64], i: usize) -> f64 {
        let mut sum = 0.0;
        for (c, &s) in self.coef.iter().zip(&self.strides) {
            sum += c * (w[i - s] - 2.0 * w[i] + w[i + s]);
        }
        sum
    }

    /// Writes `(L_h w)` into `out[1..len-1]` for the last-axis line starting at
    /// flat index `base`. The line must be interior.
    #[inline]
    pub(crate) fn line_into(&self, w: &[f64], base: usize, out: &mut [f64]) {
        let len = out.len();
        let n = self.coef.len();
        let line = &w[base..base + len];
        let c_last = self.coef[n - 1];
        for j in 1..len - 1 {
            out[j] = c_last * (line[j - 1] - 2.0 * line[j] + line[j + 1]);
        }
        for k in 0..n - 1 {
            let s = self.strides[k];
            let c = self.coef[k];
            let lo = &w[base - s..base - s + len];
            let hi = &w[base + s..base + s + len];
            for j in 1..len - 1 {
                out[j] += c * (lo[j] - 2.0 * line[j] + hi[j]);
            }
        }
    }
}

/// Runs `f(base, line)` in parallel on every last-axis line of `out` that crosses
/// the interior; `base` is the flat index of the line's first node.
pub(crate) fn for_each_interior_line<F>(mesh: &SpaceMesh, out: &mut [f64], f: F)
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let len = mesh.line_len();
    out.par_chunks_mut(len)
        .enumerate()
        .filter(|(line, _)| mesh.line_is_interior(*line))
        .for_each(|(line, chunk)| f(line * len, chunk));
}
