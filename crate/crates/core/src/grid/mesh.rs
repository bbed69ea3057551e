use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform mesh on one coordinate axis: nodes `origin + i * step`, `0 <= i <= intervals`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisMesh {
    extent: f64,
    intervals: usize,
    origin: f64,
}

impl AxisMesh {
    pub fn new(extent: f64, intervals: usize) -> Result<Self> {
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidMesh(format!(
                "axis extent must be positive and finite, got {extent}"
            )));
        }
        if intervals < 2 {
            return Err(Error::InvalidMesh(format!(
                "an axis needs at least 2 intervals, got {intervals}"
            )));
        }
        Ok(Self {
            extent,
            intervals,
            origin: 0.0,
        })
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn node_count(&self) -> usize {
        self.intervals + 1
    }

    pub fn step(&self) -> f64 {
        self.extent / self.intervals as f64
    }

    /// Coordinate of node `i`. Computed from the index, never accumulated.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step()
    }
}

/// Tensor-product space mesh. Storage is axis-major with the last axis contiguous.
#[derive(Debug)]
pub struct SpaceMesh {
    axes: Vec<AxisMesh>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
    boundary: OnceLock<Vec<usize>>,
}

impl PartialEq for SpaceMesh {
    fn eq(&self, other: &Self) -> bool {
        self.axes == other.axes
    }
}

impl Clone for SpaceMesh {
    fn clone(&self) -> Self {
        Self::build(self.axes.clone())
    }
}

impl SpaceMesh {
    pub fn new(axes: Vec<AxisMesh>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidMesh("a mesh needs at least one axis".into()));
        }
        Ok(Self::build(axes))
    }

    fn build(axes: Vec<AxisMesh>) -> Self {
        let shape: Vec<usize> = axes.iter().map(AxisMesh::node_count).collect();
        let mut strides = vec![1; shape.len()];
        for k in (0..shape.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * shape[k + 1];
        }
        let len = shape.iter().product();
        Self {
            axes,
            shape,
            strides,
            len,
            boundary: OnceLock::new(),
        }
    }

    /// `dim`-dimensional cube `[origin, origin + extent]^dim` with `intervals` per axis.
    pub fn cube(dim: usize, extent: f64, intervals: usize, origin: f64) -> Result<Self> {
        let axis = AxisMesh::new(extent, intervals)?.with_origin(origin);
        Self::new(vec![axis; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisMesh] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> Result<&AxisMesh> {
        self.axes.get(k).ok_or(Error::AxisOutOfRange {
            axis: k,
            dim: self.dim(),
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn steps(&self) -> Vec<f64> {
        self.axes.iter().map(AxisMesh::step).collect()
    }

    /// Product of the steps, the weight of the mesh inner product.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(AxisMesh::step).product()
    }

    /// Length of a line along the last (contiguous) axis.
    pub fn line_len(&self) -> usize {
        self.shape[self.dim() - 1]
    }

    pub fn line_count(&self) -> usize {
        self.len / self.line_len()
    }

    pub fn index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dim());
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coords_into(&self, mut flat: usize, idx: &mut [usize]) {
        for k in 0..self.dim() {
            idx[k] = flat / self.strides[k];
            flat %= self.strides[k];
        }
    }

    pub fn coords(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        self.coords_into(flat, &mut idx);
        idx
    }

    pub fn point_into(&self, flat: usize, x: &mut [f64]) {
        let mut rest = flat;
        for k in 0..self.dim() {
            let i = rest / self.strides[k];
            rest %= self.strides[k];
            x[k] = self.axes[k].node(i);
        }
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        self.point_into(flat, &mut x);
        x
    }

    #[inline]
    pub fn coord_along(&self, flat: usize, k: usize) -> usize {
        (flat / self.strides[k]) % self.shape[k]
    }

    #[inline]
    pub fn is_interior_along(&self, flat: usize, k: usize) -> bool {
        let i = self.coord_along(flat, k);
        i > 0 && i + 1 < self.shape[k]
    }

    pub fn is_interior(&self, flat: usize) -> bool {
        (0..self.dim()).all(|k| self.is_interior_along(flat, k))
    }

    pub fn is_boundary(&self, flat: usize) -> bool {
        !self.is_interior(flat)
    }

    /// Whether every line coordinate except the last axis is interior, i.e. the
    /// line along the last axis crosses the interior of the mesh.
    pub fn line_is_interior(&self, line: usize) -> bool {
        let n = self.dim();
        let mut rest = line;
        for k in (0..n - 1).rev() {
            let i = rest % self.shape[k];
            rest /= self.shape[k];
            if i == 0 || i + 1 == self.shape[k] {
                return false;
            }
        }
        true
    }

    /// Flat indices of all boundary nodes in increasing order (cached).
    pub fn boundary_indices(&self) -> &[usize] {
        self.boundary
            .get_or_init(|| (0..self.len).filter(|&i| self.is_boundary(i)).collect())
    }

    pub fn interior_count(&self) -> usize {
        self.shape.iter().map(|s| s - 2).product()
    }
}

/// Uniform time mesh `t_m = m * T / M`, `0 <= m <= M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeMesh {
    extent: f64,
    steps: usize,
}

impl TimeMesh {
    pub fn new(extent: f64, steps: usize) -> Result<Self> {
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidMesh(format!(
                "time extent must be positive and finite, got {extent}"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidMesh(format!(
                "at least 2 time steps are required, got {steps}"
            )));
        }
        Ok(Self { extent, steps })
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        self.extent / self.steps as f64
    }

    #[inline]
    pub fn time(&self, m: usize) -> f64 {
        m as f64 * self.step()
    }

    /// Level whose time is within half a step of `t`, if `0 <= t <= T`.
    pub fn level_of(&self, t: f64) -> Option<usize> {
        let m = (t / self.step()).round();
        if m < 0.0 || m > self.steps as f64 || (m * self.step() - t).abs() > 0.5 * self.step() {
            return None;
        }
        Some(m as usize)
    }
}

#[derive(Debug, Clone)]
pub struct TensorMesh {
    space: Arc<SpaceMesh>,
    time: TimeMesh,
}

impl TensorMesh {
    pub fn new(space: SpaceMesh, time: TimeMesh) -> Self {
        Self {
            space: Arc::new(space),
            time,
        }
    }

    pub fn space(&self) -> &Arc<SpaceMesh> {
        &self.space
    }

    pub fn time(&self) -> &TimeMesh {
        &self.time
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn time_step(&self) -> f64 {
        self.time.step()
    }
}
