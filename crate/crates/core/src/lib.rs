//! Spin transformations of triangle meshes and diagnostics for isometric,
//! mean-curvature-preserving pairs of surfaces.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix it to `f64`.

pub mod bonnet;
pub mod dirac;
pub mod error;
pub mod integrate;
pub mod mesh;
pub mod quatnum;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Quat = quatnum::Quaternion<f64>;
pub type Mesh = mesh::TriMesh<f64>;
pub type HalfDensity = mesh::HalfDensityField<f64>;
pub type Normals = mesh::NormalField<f64>;
pub type QuadDiff = mesh::QuadDiffField<f64>;
pub type Spinor = dirac::SpinorField<f64>;
pub type Dirac = dirac::DiracAssembly<f64>;
pub type OneForm = integrate::EdgeOneForm<f64>;
pub type Transform = integrate::SpinTransform<f64>;
pub type Options = quatnum::EigenOptions<f64>;
