//! Uniform tensor meshes, nodal fields, the three-point operators `Λ_k`,
//! `s_kN`, `L_h` and the mesh norms used to measure errors.

mod field;
mod mesh;
mod norms;
mod ops;

pub use field::GridField;
pub use mesh::{AxisMesh, SpaceMesh, TensorMesh, TimeMesh};
pub use norms::{inner_product, norm_energy, norm_l2h, seminorm_h1h};
pub use ops::{apply_lambda, apply_lh, apply_skn};

pub(crate) use field::sample_into;
pub(crate) use ops::{for_each_interior_line, LhKernel};
