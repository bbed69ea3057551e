//! Batched Numerov line solves.
//!
//! For every grid line along axis `k` the auxiliary field `v_kk` solves
//! `s_kN v_kk = Λ_k v + b_k` at the interior nodes of the line, with Dirichlet
//! end values. The matrix `tridiag(1, 10, 1) / 12` is the same for every line,
//! so the elimination coefficients are computed once per axis and shared.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridField, SpaceMesh};

/// Minimum contiguous output, in values, handed to one worker (4 KiB).
const MIN_CHUNK: usize = 512;

/// One three-point Numerov system `s_N x = rhs` with known end values.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSystem {
    pub rhs: Vec<f64>,
    pub left_bc: f64,
    pub right_bc: f64,
}

impl LineSystem {
    pub fn interior_size(&self) -> usize {
        self.rhs.len()
    }
}

/// Elimination coefficients of `tridiag(1, 10, 1)` of a fixed size.
///
/// With unit off-diagonals the forward-sweep multiplier and the inverse pivot
/// coincide, so one vector is enough.
#[derive(Debug, Clone)]
pub struct NumerovFactor {
    inv_pivot: Vec<f64>,
}

impl NumerovFactor {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyLineSystem);
        }
        let mut inv_pivot = Vec::with_capacity(size);
        let mut prev = 0.0;
        for _ in 0..size {
            let c = 1.0 / (10.0 - prev);
            inv_pivot.push(c);
            prev = c;
        }
        Ok(Self { inv_pivot })
    }

    pub fn size(&self) -> usize {
        self.inv_pivot.len()
    }

    /// Solves `tridiag(1, 10, 1) x = r` in place.
    pub fn solve_scaled(&self, r: &mut [f64]) {
        let c = &self.inv_pivot;
        let n = r.len();
        debug_assert_eq!(n, c.len());
        r[0] *= c[0];
        for i in 1..n {
            r[i] = (r[i] - r[i - 1]) * c[i];
        }
        for i in (0..n - 1).rev() {
            r[i] -= c[i] * r[i + 1];
        }
    }
}

/// Thomas elimination for a single Numerov system.
pub fn thomas_solve(sys: &LineSystem) -> Result<Vec<f64>> {
    let n = sys.interior_size();
    let factor = NumerovFactor::new(n)?;
    let mut r: Vec<f64> = sys.rhs.iter().map(|v| 12.0 * v).collect();
    r[0] -= sys.left_bc;
    r[n - 1] -= sys.right_bc;
    factor.solve_scaled(&mut r);
    Ok(r)
}

/// Auxiliary fields, either one per direction or only their weighted sum.
#[derive(Debug, Clone)]
pub enum AuxFieldSet {
    PerDirection(Vec<GridField>),
    WeightedSum(GridField),
}

impl AuxFieldSet {
    /// `Σ_k a_k² v_kk`.
    pub fn weighted_sum(&self, a: &[f64]) -> Result<GridField> {
        match self {
            AuxFieldSet::WeightedSum(w) => Ok(w.clone()),
            AuxFieldSet::PerDirection(fields) => {
                if fields.len() != a.len() {
                    return Err(Error::CoefficientCount {
                        expected: fields.len(),
                        got: a.len(),
                    });
                }
                let mut sum = GridField::zeros(fields[0].mesh());
                for (f, ak) in fields.iter().zip(a) {
                    add_scaled(sum.values_mut(), f.values(), ak * ak);
                }
                Ok(sum)
            }
        }
    }
}

fn add_scaled(acc: &mut [f64], x: &[f64], scale: f64) {
    acc.par_chunks_mut(MIN_CHUNK)
        .zip(x.par_chunks(MIN_CHUNK))
        .for_each(|(a, b)| {
            for (ai, bi) in a.iter_mut().zip(b) {
                *ai += scale * bi;
            }
        });
}

/// Reusable line solver for all directions of one mesh.
#[derive(Debug, Clone)]
pub struct AuxSolver {
    mesh: Arc<SpaceMesh>,
    factors: Vec<NumerovFactor>,
    scratch: Vec<f64>,
}

impl AuxSolver {
    pub fn new(mesh: &Arc<SpaceMesh>) -> Result<Self> {
        let factors = mesh
            .axes()
            .iter()
            .map(|ax| NumerovFactor::new(ax.intervals() - 1))
            .collect::<Result<_>>()?;
        Ok(Self {
            mesh: Arc::clone(mesh),
            factors,
            scratch: Vec::new(),
        })
    }

    pub fn mesh(&self) -> &Arc<SpaceMesh> {
        &self.mesh
    }

    /// Solves direction `k` into `out` (all nodes). `bc` holds `v_kk` at every
    /// boundary node, aligned with [`SpaceMesh::boundary_indices`]; `b` is the
    /// optional right-hand-side perturbation at interior nodes.
    pub fn solve_into(
        &self,
        v: &[f64],
        k: usize,
        b: Option<&[f64]>,
        bc: &[f64],
        out: &mut [f64],
    ) -> Result<()> {
        let mesh = &*self.mesh;
        mesh.axis(k)?;
        let boundary = mesh.boundary_indices();
        debug_assert_eq!(bc.len(), boundary.len());
        for (&i, &val) in boundary.iter().zip(bc) {
            out[i] = val;
        }
        let h = mesh.axes()[k].step();
        let scale = 12.0 / (h * h);
        let factor = &self.factors[k];
        let len = mesh.shape()[k];
        if k + 1 == mesh.dim() {
            out.par_chunks_mut(len)
                .enumerate()
                .for_each(|(line, o)| {
                    let base = line * len;
                    solve_contiguous(factor, &v[base..base + len], b.map(|b| &b[base..base + len]), scale, o);
                });
        } else {
            let inner = mesh.strides()[k];
            let width = chunk_width(inner);
            out.par_chunks_mut(len * inner)
                .enumerate()
                .for_each(|(outer, block)| {
                    let block_base = outer * len * inner;
                    let ncols = inner.div_ceil(width);
                    let mut groups: Vec<Vec<&mut [f64]>> =
                        (0..ncols).map(|_| Vec::with_capacity(len)).collect();
                    for row in block.chunks_mut(inner) {
                        for (g, piece) in row.chunks_mut(width).enumerate() {
                            groups[g].push(piece);
                        }
                    }
                    groups.into_par_iter().enumerate().for_each(|(g, mut rows)| {
                        let offset = block_base + g * width;
                        solve_strided(factor, v, b, scale, offset, inner, &mut rows);
                    });
                });
        }
        // Lines on faces of the other axes take their values from the boundary data.
        for (&i, &val) in boundary.iter().zip(bc) {
            out[i] = val;
        }
        Ok(())
    }

    /// `W = Σ_k a_k² v_kk`, accumulated in axis order. `bc[k]` holds `a_k² v_kk`
    /// at the boundary nodes.
    pub fn weighted_sum_into(
        &mut self,
        v: &[f64],
        a: &[f64],
        b: Option<&[&[f64]]>,
        bc: &[Vec<f64>],
        out: &mut [f64],
    ) -> Result<()> {
        let n = self.mesh.dim();
        check_coefficients(a, n)?;
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.resize(self.mesh.len(), 0.0);
        let mut end_values = Vec::new();
        for k in 0..n {
            let a2 = a[k] * a[k];
            end_values.clear();
            end_values.extend(bc[k].iter().map(|g| g / a2));
            let target: &mut [f64] = if k == 0 { &mut *out } else { &mut scratch };
            let res = self.solve_into(v, k, b.map(|b| b[k]), &end_values, target);
            if let Err(e) = res {
                self.scratch = scratch;
                return Err(e);
            }
            if k == 0 {
                out.par_chunks_mut(MIN_CHUNK).for_each(|c| {
                    for x in c {
                        *x *= a2;
                    }
                });
            } else {
                add_scaled(out, &scratch, a2);
            }
        }
        self.scratch = scratch;
        Ok(())
    }
}

fn chunk_width(inner: usize) -> usize {
    let workers = rayon::current_num_threads().max(1);
    let even = inner.div_ceil(workers);
    even.max(MIN_CHUNK).min(inner)
}

fn check_coefficients(a: &[f64], n: usize) -> Result<()> {
    if a.len() != n {
        return Err(Error::CoefficientCount {
            expected: n,
            got: a.len(),
        });
    }
    for (axis, &value) in a.iter().enumerate() {
        if !(value > 0.0) {
            return Err(Error::NonPositiveCoefficient { axis, value });
        }
    }
    Ok(())
}

/// One contiguous line; `out[0]` and `out[len-1]` hold the end values.
#[inline]
fn solve_contiguous(factor: &NumerovFactor, v: &[f64], b: Option<&[f64]>, scale: f64, out: &mut [f64]) {
    let len = out.len();
    let last = len - 2;
    for j in 1..=last {
        let mut r = scale * (v[j - 1] - 2.0 * v[j] + v[j + 1]);
        if let Some(b) = b {
            r += 12.0 * b[j];
        }
        out[j] = r;
    }
    out[1] -= out[0];
    out[last] -= out[len - 1];
    factor.solve_scaled(&mut out[1..=last]);
}

/// Lines along a strided axis, solved together column by column. `rows[j]` is
/// the piece of row `j` of the block owned by this group; `offset` is the flat
/// index of `rows[0][0]` and `stride` the distance between rows.
fn solve_strided(
    factor: &NumerovFactor,
    v: &[f64],
    b: Option<&[f64]>,
    scale: f64,
    offset: usize,
    stride: usize,
    rows: &mut [&mut [f64]],
) {
    let len = rows.len();
    let last = len - 2;
    let width = rows[0].len();
    let c = &factor.inv_pivot;
    for j in 1..=last {
        let base = offset + j * stride;
        let vm = &v[base - stride..base - stride + width];
        let v0 = &v[base..base + width];
        let vp = &v[base + stride..base + stride + width];
        let (before, after) = rows.split_at_mut(j);
        let prev: &[f64] = &before[j - 1];
        let cur: &mut [f64] = &mut after[0];
        let cj = c[j - 1];
        match b {
            Some(b) => {
                let bj = &b[base..base + width];
                for i in 0..width {
                    cur[i] = scale * (vm[i] - 2.0 * v0[i] + vp[i]) + 12.0 * bj[i];
                }
            }
            None => {
                for i in 0..width {
                    cur[i] = scale * (vm[i] - 2.0 * v0[i] + vp[i]);
                }
            }
        }
        if j == last {
            let (mid, end) = after.split_at_mut(1);
            let right: &[f64] = &end[end.len() - 1];
            for (x, r) in mid[0].iter_mut().zip(right) {
                *x -= r;
            }
        }
        let cur: &mut [f64] = &mut after[0];
        // `prev` is the left end value for j == 1 and the previous sweep value otherwise.
        for i in 0..width {
            cur[i] = (cur[i] - prev[i]) * cj;
        }
    }
    for j in (1..last).rev() {
        let (head, tail) = rows.split_at_mut(j + 1);
        let next: &[f64] = &tail[0];
        let cur: &mut [f64] = &mut head[j];
        let cj = c[j - 1];
        for i in 0..width {
            cur[i] -= cj * next[i];
        }
    }
}

fn boundary_values<F>(mesh: &SpaceMesh, f: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = vec![0.0; mesh.dim()];
    mesh.boundary_indices()
        .iter()
        .map(|&i| {
            mesh.point_into(i, &mut x);
            f(&x)
        })
        .collect()
}

/// `v_kk` on all nodes from `s_kN v_kk = Λ_k v + b_k`. The boundary evaluator
/// returns `a_k² v_kk`; on faces normal to other axes the values are taken from
/// it directly.
pub fn solve_direction(
    v: &GridField,
    k: usize,
    a_k: f64,
    b_k: Option<&GridField>,
    bc_k: &dyn Fn(&[f64]) -> f64,
) -> Result<GridField> {
    let mesh = v.mesh();
    mesh.axis(k)?;
    if !(a_k > 0.0) {
        return Err(Error::NonPositiveCoefficient { axis: k, value: a_k });
    }
    if let Some(b) = b_k {
        v.ensure_same_mesh(b)?;
    }
    let a2 = a_k * a_k;
    let bc = boundary_values(mesh, |x| bc_k(x) / a2);
    let solver = AuxSolver::new(mesh)?;
    let mut out = GridField::zeros(mesh);
    solver.solve_into(v.values(), k, b_k.map(GridField::values), &bc, out.values_mut())?;
    Ok(out)
}

/// All directions, kept separately.
pub fn solve_all_directions(
    v: &GridField,
    a: &[f64],
    b: Option<&[GridField]>,
    bc: &[&dyn Fn(&[f64]) -> f64],
) -> Result<AuxFieldSet> {
    let n = v.mesh().dim();
    check_coefficients(a, n)?;
    check_evaluators(bc.len(), n)?;
    let fields = (0..n)
        .map(|k| solve_direction(v, k, a[k], b.map(|b| &b[k]), bc[k]))
        .collect::<Result<Vec<_>>>()?;
    Ok(AuxFieldSet::PerDirection(fields))
}

/// `W = Σ_k a_k² v_kk` without keeping the individual `v_kk`.
pub fn weighted_aux_sum(
    v: &GridField,
    a: &[f64],
    b: Option<&[GridField]>,
    bc: &[&dyn Fn(&[f64]) -> f64],
) -> Result<GridField> {
    let mesh = v.mesh();
    let n = mesh.dim();
    check_coefficients(a, n)?;
    check_evaluators(bc.len(), n)?;
    if let Some(b) = b {
        if b.len() != n {
            return Err(Error::CoefficientCount {
                expected: n,
                got: b.len(),
            });
        }
        for bk in b {
            v.ensure_same_mesh(bk)?;
        }
    }
    let bc_values: Vec<Vec<f64>> = bc.iter().map(|g| boundary_values(mesh, g)).collect();
    let b_slices: Option<Vec<&[f64]>> = b.map(|b| b.iter().map(GridField::values).collect());
    let mut solver = AuxSolver::new(mesh)?;
    let mut out = GridField::zeros(mesh);
    solver.weighted_sum_into(
        v.values(),
        a,
        b_slices.as_deref(),
        &bc_values,
        out.values_mut(),
    )?;
    Ok(out)
}

fn check_evaluators(got: usize, n: usize) -> Result<()> {
    if got != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} boundary evaluators, got {got}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{apply_lambda, apply_skn, AxisMesh};
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn numerov_matrix(size: usize) -> DMatrix<f64> {
        DMatrix::from_fn(size, size, |i, j| {
            if i == j {
                10.0 / 12.0
            } else if i.abs_diff(j) == 1 {
                1.0 / 12.0
            } else {
                0.0
            }
        })
    }

    fn zero(_: &[f64]) -> f64 {
        0.0
    }

    #[test]
    fn constants_are_fixed() {
        let sys = LineSystem {
            rhs: vec![3.0; 9],
            left_bc: 3.0,
            right_bc: 3.0,
        };
        let x = thomas_solve(&sys).unwrap();
        assert!(x.iter().all(|v| (v - 3.0).abs() < 1e-14));
    }

    #[test]
    fn single_unknown_closed_form() {
        let sys = LineSystem {
            rhs: vec![2.0],
            left_bc: 0.5,
            right_bc: -1.5,
        };
        let x = thomas_solve(&sys).unwrap();
        let expected = (2.0 - (0.5 - 1.5) / 12.0) * 12.0 / 10.0;
        assert!((x[0] - expected).abs() < 1e-15);
        assert!(matches!(
            thomas_solve(&LineSystem {
                rhs: vec![],
                left_bc: 0.0,
                right_bc: 0.0
            }),
            Err(Error::EmptyLineSystem)
        ));
    }

    #[test]
    fn matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rhs: Vec<f64> = (0..7).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (l, r) = (0.3, -0.7);
        let x = thomas_solve(&LineSystem {
            rhs: rhs.clone(),
            left_bc: l,
            right_bc: r,
        })
        .unwrap();
        let mut b = DVector::from_vec(rhs.clone());
        b[0] -= l / 12.0;
        b[6] -= r / 12.0;
        let dense = numerov_matrix(7).lu().solve(&b).unwrap();
        let norm = rhs.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for i in 0..7 {
            assert!((x[i] - dense[i]).abs() < 1e-13 * norm);
        }
    }

    #[test]
    fn quadratic_gives_constant_second_derivative() {
        let mesh = Arc::new(SpaceMesh::cube(1, 1.0, 10, 0.0).unwrap());
        let v = GridField::from_fn(&mesh, |x| x[0] * x[0]);
        let vkk = solve_direction(&v, 0, 1.0, None, &|_| 2.0).unwrap();
        assert!(vkk.values().iter().all(|x| (x - 2.0).abs() < 1e-12));
        let zero_field = GridField::zeros(&mesh);
        let z = solve_direction(&zero_field, 0, 1.0, None, &zero).unwrap();
        assert!(z.values().iter().all(|&x| x == 0.0));
        assert!(matches!(
            solve_direction(&v, 0, 0.0, None, &zero),
            Err(Error::NonPositiveCoefficient { .. })
        ));
    }

    #[test]
    fn sine_matches_dense_inverse_and_is_fourth_order() {
        let pi = std::f64::consts::PI;
        let mut errors = Vec::new();
        for n in [16usize, 32] {
            let mesh = Arc::new(SpaceMesh::cube(1, 1.0, n, 0.0).unwrap());
            let v = GridField::from_fn(&mesh, |x| (pi * x[0]).sin());
            let vkk = solve_direction(&v, 0, 1.0, None, &zero).unwrap();
            if n == 16 {
                let lam = apply_lambda(&v, 0).unwrap();
                let rhs = DVector::from_iterator(n - 1, (1..n).map(|i| lam.values()[i]));
                let dense = numerov_matrix(n - 1).try_inverse().unwrap() * rhs;
                for i in 1..n {
                    assert!((vkk.values()[i] - dense[i - 1]).abs() < 1e-11);
                }
            }
            let err = (0..=n)
                .map(|i| {
                    let x = i as f64 / n as f64;
                    (vkk.values()[i] + pi * pi * (pi * x).sin()).abs()
                })
                .fold(0.0_f64, f64::max);
            errors.push(err);
        }
        assert!(errors[0] / errors[1] >= 15.5, "ratio {}", errors[0] / errors[1]);
    }

    #[test]
    fn round_trip_residual_all_axes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mesh = Arc::new(
            SpaceMesh::new(vec![
                AxisMesh::new(1.0, 6).unwrap(),
                AxisMesh::new(1.5, 7).unwrap(),
                AxisMesh::new(0.7, 5).unwrap(),
            ])
            .unwrap(),
        );
        let v = GridField::from_values(&mesh, (0..mesh.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .unwrap();
        let b = GridField::from_values(&mesh, (0..mesh.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .unwrap();
        for k in 0..3 {
            let bc = |x: &[f64]| x[0] - x[1] + 0.5;
            let vkk = solve_direction(&v, k, 0.8, Some(&b), &bc).unwrap();
            let s = apply_skn(&vkk, k).unwrap();
            let l = apply_lambda(&v, k).unwrap();
            let h = mesh.axes()[k].step();
            for i in 0..mesh.len() {
                if mesh.is_interior(i) {
                    let res = s.values()[i] - l.values()[i] - b.values()[i];
                    // Residual relative to the size of the Λ_k term.
                    assert!(res.abs() <= 1e-12 / (h * h), "axis {k}: {res}");
                } else {
                    let x = mesh.point(i);
                    assert!((vkk.values()[i] - bc(&x) / 0.64).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn weighted_sum_equals_per_direction_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mesh = Arc::new(SpaceMesh::cube(2, 1.0, 8, 0.0).unwrap());
        let v = GridField::from_values(&mesh, (0..mesh.len()).map(|_| rng.gen()).collect()).unwrap();
        let a = [0.6, 1.1];
        let g0 = |x: &[f64]| x[0] + 1.0;
        let g1 = |x: &[f64]| x[1] * 2.0;
        let bc: [&dyn Fn(&[f64]) -> f64; 2] = [&g0, &g1];
        let w = weighted_aux_sum(&v, &a, None, &bc).unwrap();
        let full = solve_all_directions(&v, &a, None, &bc).unwrap();
        let expected = full.weighted_sum(&a).unwrap();
        for (x, y) in w.values().iter().zip(expected.values()) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn paraboloid_weighted_sum_is_constant() {
        let mesh = Arc::new(SpaceMesh::cube(2, 1.0, 9, 0.0).unwrap());
        let v = GridField::from_fn(&mesh, |x| x[0] * x[0] + x[1] * x[1]);
        let two = |_: &[f64]| 2.0;
        let bc: [&dyn Fn(&[f64]) -> f64; 2] = [&two, &two];
        let w = weighted_aux_sum(&v, &[1.0, 1.0], None, &bc).unwrap();
        assert!(w.values().iter().all(|x| (x - 4.0).abs() < 1e-11));
        let zero_v = GridField::zeros(&mesh);
        let zb: [&dyn Fn(&[f64]) -> f64; 2] = [&zero, &zero];
        let z = weighted_aux_sum(&zero_v, &[1.0, 1.0], None, &zb).unwrap();
        assert!(z.values().iter().all(|&x| x == 0.0));
    }
}
