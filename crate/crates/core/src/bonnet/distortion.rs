use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::hopf::{face_shape_operators, fit_normals, trace_free_part};
use crate::mesh::vec3;
use crate::mesh::{mean_curvature, QuadDiffField, TriMesh};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct ShapeDistortion<T> {
    /// `(II₁ − II₂)^{2,0}` per face.
    pub field: QuadDiffField<T>,
    pub max_norm: T,
    /// `max_f |tr(II₁ − II₂)| / 2`.
    pub trace_residual: T,
    /// Largest relative difference of corresponding edge lengths.
    pub isometry_defect: T,
    /// Largest difference of cotan mean curvatures relative to the mean `|H|`.
    pub mean_curvature_defect: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapeDistortionSummary<T> {
    pub max_norm: T,
    pub trace_residual: T,
    pub isometry_defect: T,
    pub mean_curvature_defect: T,
}

impl<T: Real> ShapeDistortion<T> {
    pub fn summary(&self) -> ShapeDistortionSummary<T> {
        ShapeDistortionSummary {
            max_norm: self.max_norm,
            trace_residual: self.trace_residual,
            isometry_defect: self.isometry_defect,
            mean_curvature_defect: self.mean_curvature_defect,
        }
    }
}

/// Largest relative edge-length difference between two meshes with the same
/// connectivity, with the worst edge.
pub fn isometry_defect<T: Real>(m1: &TriMesh<T>, m2: &TriMesh<T>) -> Result<(T, usize, usize)> {
    if !m1.same_connectivity(m2) {
        return Err(Error::ConnectivityMismatch);
    }
    let mut worst = (T::zero(), 0, 0);
    for e in 0..m1.num_edges() {
        let h = m1.edge_halfedge(e);
        let l1 = vec3::norm(m1.he_vector(h));
        let l2 = vec3::norm(m2.he_vector(h));
        let rel = (l1 - l2).abs() / l1;
        if rel > worst.0 {
            worst = (rel, m1.tail(h), m1.head(h));
        }
    }
    Ok(worst)
}

/// Difference of the per-face second fundamental forms of two isometric
/// meshes with shared connectivity, in each face's first-halfedge chart.
pub fn shape_distortion<T: Real>(m1: &TriMesh<T>, m2: &TriMesh<T>, iso_tol: T) -> Result<ShapeDistortion<T>> {
    let (defect, a, b) = isometry_defect(m1, m2)?;
    if defect > iso_tol {
        return Err(Error::IsometryViolation {
            a,
            b,
            relative_error: defect.to_f64_lossy(),
        });
    }
    let s1 = face_shape_operators(m1, &fit_normals(m1)?)?;
    let s2 = face_shape_operators(m2, &fit_normals(m2)?)?;
    let mut values = Vec::with_capacity(s1.len());
    let mut trace_residual = T::zero();
    for (p, q) in s1.iter().zip(&s2) {
        let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
        trace_residual = trace_residual.max(((d[0] + d[2]) * T::lit(0.5)).abs());
        values.push(trace_free_part(d));
    }
    let field = QuadDiffField::new(m1, values)?;
    let h1 = mean_curvature(m1)?;
    let h2 = mean_curvature(m2)?;
    let scale = h1.iter().map(|h| h.abs()).sum::<T>() / T::from_usize_lossy(h1.len());
    let dh = h1
        .iter()
        .zip(&h2)
        .map(|(a, b)| (*a - *b).abs())
        .fold(T::zero(), T::max);
    let mean_curvature_defect = if scale > T::zero() { dh / scale } else { dh };
    Ok(ShapeDistortion {
        max_norm: field.max_norm(),
        field,
        trace_residual,
        isometry_defect: defect,
        mean_curvature_defect,
    })
}
