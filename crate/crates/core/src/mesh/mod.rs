//! Halfedge triangle meshes, OBJ input and output, and discrete curvature.

pub mod curvature;
pub mod fields;
pub mod generate;
pub mod hopf;
pub mod obj;
mod trimesh;
pub mod vec3;

pub use curvature::{
    curvature_report, mean_curvature, mean_curvature_half_density, vertex_areas, vertex_normals,
    CurvatureReport,
};
pub use fields::{HalfDensityField, NormalField};
pub use generate::{generate_test_mesh, MeshKind};
pub use hopf::{hopf_differential, QuadDiffField};
pub use obj::{load_obj, save_obj};
pub use trimesh::TriMesh;
