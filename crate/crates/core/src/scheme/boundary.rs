//! Boundary node coordinates and per-step boundary data, evaluated once per
//! level and aligned with [`SpaceMesh::boundary_indices`].

use rayon::prelude::*;

use super::problem::ProblemData;
use crate::grid::SpaceMesh;

#[derive(Debug, Clone)]
pub(crate) struct BoundaryCache {
    dim: usize,
    indices: Vec<usize>,
    /// Coordinates, `dim` per node.
    points: Vec<f64>,
    /// `own[k][j]`: node `j` lies on a face `x_k = const`.
    own: Vec<Vec<bool>>,
}

impl BoundaryCache {
    pub(crate) fn new(mesh: &SpaceMesh) -> Self {
        let dim = mesh.dim();
        let indices = mesh.boundary_indices().to_vec();
        let mut points = vec![0.0; indices.len() * dim];
        for (j, &i) in indices.iter().enumerate() {
            mesh.point_into(i, &mut points[j * dim..(j + 1) * dim]);
        }
        let own = (0..dim)
            .map(|k| indices.iter().map(|&i| !mesh.is_interior_along(i, k)).collect())
            .collect();
        Self {
            dim,
            indices,
            points,
            own,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.indices.len()
    }

    fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.dim..(j + 1) * self.dim]
    }

    /// Writes `g(·, t)` into the boundary nodes of `v`.
    pub(crate) fn inject(&self, data: &dyn ProblemData, t: f64, v: &mut [f64]) {
        let vals: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|j| data.boundary_value(self.point(j), t))
            .collect();
        for (&i, val) in self.indices.iter().zip(vals) {
            v[i] = val;
        }
    }

    /// `a_k² v_kk` at the boundary nodes for every direction `k`, into `out[k]`.
    pub(crate) fn aux_values(&self, data: &dyn ProblemData, t: f64, out: &mut Vec<Vec<f64>>) {
        out.resize_with(self.dim, Vec::new);
        for (k, dst) in out.iter_mut().enumerate() {
            let own = &self.own[k];
            (0..self.len())
                .into_par_iter()
                .map(|j| data.aux_boundary(k, self.point(j), t, own[j]))
                .collect_into_vec(dst);
        }
    }
}
