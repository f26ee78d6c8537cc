//! Comparing isometric surfaces: shape distortion, holomorphicity, umbilic
//! indices, congruence and the Gauss-map half-space test.

mod congruence;
mod distortion;
mod halfspace;
mod holomorphic;
mod index;

pub use crate::mesh::QuadDiffField;
pub use congruence::{congruence_check, similarity_align, Congruence, RigidMotion, SimilarityAlignment, CONGRUENCE_TOL};
pub use distortion::{isometry_defect, shape_distortion, ShapeDistortion, ShapeDistortionSummary};
pub use halfspace::{gauss_map_halfspace_test, halfspace_of_directions, HalfSpace};
pub use holomorphic::{holomorphicity_residual, holomorphicity_residual_on};
pub use index::{
    analyze_umbilics, cluster_index, find_umbilics, foliation_index, vertex_indices, UmbilicAnalysis,
    UmbilicCluster,
};
