use std::sync::Arc;

use rayon::prelude::*;

use super::mesh::SpaceMesh;
use crate::error::{Error, Result};

/// Nodal values on every node of a [`SpaceMesh`], boundary nodes included.
#[derive(Debug, Clone)]
pub struct GridField {
    mesh: Arc<SpaceMesh>,
    values: Vec<f64>,
}

impl GridField {
    pub fn zeros(mesh: &Arc<SpaceMesh>) -> Self {
        Self {
            mesh: Arc::clone(mesh),
            values: vec![0.0; mesh.len()],
        }
    }

    pub fn constant(mesh: &Arc<SpaceMesh>, value: f64) -> Self {
        Self {
            mesh: Arc::clone(mesh),
            values: vec![value; mesh.len()],
        }
    }

    pub fn from_values(mesh: &Arc<SpaceMesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} nodal values, got {}",
                mesh.len(),
                values.len()
            )));
        }
        Ok(Self {
            mesh: Arc::clone(mesh),
            values,
        })
    }

    /// Samples `f` at every node.
    pub fn from_fn<F>(mesh: &Arc<SpaceMesh>, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let mut values = vec![0.0; mesh.len()];
        sample_into(mesh, &mut values, f);
        Self {
            mesh: Arc::clone(mesh),
            values,
        }
    }

    pub fn mesh(&self) -> &Arc<SpaceMesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.mesh.index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let flat = self.mesh.index(idx);
        self.values[flat] = value;
    }

    pub fn same_mesh(&self, other: &GridField) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh
    }

    pub(crate) fn ensure_same_mesh(&self, other: &GridField) -> Result<()> {
        if self.same_mesh(other) {
            Ok(())
        } else {
            Err(Error::MeshMismatch)
        }
    }

    /// Overwrites the boundary nodes with samples of `f`.
    pub fn fill_boundary<F>(&mut self, f: F)
    where
        F: Fn(&[f64]) -> f64,
    {
        let mut x = vec![0.0; self.mesh.dim()];
        for &i in self.mesh.boundary_indices() {
            self.mesh.point_into(i, &mut x);
            self.values[i] = f(&x);
        }
    }

    /// Nodewise `self - other`.
    pub fn difference(&self, other: &GridField) -> Result<GridField> {
        self.ensure_same_mesh(other)?;
        let values = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridField {
            mesh: Arc::clone(&self.mesh),
            values,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_interior(&self) -> f64 {
        (0..self.values.len())
            .filter(|&i| self.mesh.is_interior(i))
            .fold(0.0_f64, |m, i| m.max(self.values[i].abs()))
    }
}

/// Samples `f` at every node into `out`, parallel over lines of the last axis.
pub(crate) fn sample_into<F>(mesh: &SpaceMesh, out: &mut [f64], f: F)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let line_len = mesh.line_len();
    let n = mesh.dim();
    let last = &mesh.axes()[n - 1];
    out.par_chunks_mut(line_len)
        .enumerate()
        .for_each(|(line, chunk)| {
            let mut x = vec![0.0; n];
            mesh.point_into(line * line_len, &mut x);
            for (j, v) in chunk.iter_mut().enumerate() {
                x[n - 1] = last.node(j);
                *v = f(&x);
            }
        });
}
