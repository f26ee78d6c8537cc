//! Per-face shape operators and the Hopf differential.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::curvature::curvature_report;
use crate::mesh::fields::NormalField;
use crate::mesh::vec3::{self, V3};
use crate::mesh::TriMesh;
use crate::quatnum::dense::least_squares;
use crate::scalar::Real;

/// A quadratic differential sampled as one complex value per face, in the
/// face chart of [`face_chart`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuadDiffField<T> {
    pub values: Vec<Complex<T>>,
    mesh_id: u64,
}

impl<T: Real> QuadDiffField<T> {
    pub fn new(mesh: &TriMesh<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != mesh.num_faces() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_faces(),
                found: values.len(),
            });
        }
        Ok(Self {
            values,
            mesh_id: mesh.connectivity_id(),
        })
    }

    pub fn belongs_to(&self, mesh: &TriMesh<T>) -> bool {
        self.mesh_id == mesh.connectivity_id() && self.values.len() == mesh.num_faces()
    }

    pub fn magnitudes(&self) -> Vec<T> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn max_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<T: Real + Serialize> Serialize for QuadDiffField<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[T; 2]> = self.values.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

/// Orthonormal chart of face `f`: `x` along the first halfedge, `y = n × x`.
pub fn face_chart<T: Real>(m: &TriMesh<T>, f: usize) -> (V3<T>, V3<T>, V3<T>) {
    let n = m.face_normal(f);
    let x = vec3::normalize(m.he_vector(3 * f));
    let y = vec3::cross(n, x);
    (x, y, n)
}

/// Symmetric shape operator `[s11, s12, s22]` per face in its chart, fitted
/// to the normal differences along the three edges (`S e = ΔN`).
pub fn face_shape_operators<T: Real>(m: &TriMesh<T>, normals: &NormalField<T>) -> Result<Vec<[T; 3]>> {
    if normals.len() != m.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: m.num_vertices(),
            found: normals.len(),
        });
    }
    let mut out = Vec::with_capacity(m.num_faces());
    for f in 0..m.num_faces() {
        let (x, y, _) = face_chart(m, f);
        let mut rows = Vec::with_capacity(6);
        let mut rhs = Vec::with_capacity(6);
        for k in 0..3 {
            let h = 3 * f + k;
            let e = m.he_vector(h);
            let dn = vec3::sub(normals.vector(m.head(h)), normals.vector(m.tail(h)));
            let (e1, e2) = (vec3::dot(e, x), vec3::dot(e, y));
            rows.push(vec![e1, e2, T::zero()]);
            rhs.push(vec3::dot(dn, x));
            rows.push(vec![T::zero(), e1, e2]);
            rhs.push(vec3::dot(dn, y));
        }
        let s = least_squares(&rows, &rhs).ok_or(Error::DegenerateFace { face: f })?;
        out.push([s[0], s[1], s[2]]);
    }
    Ok(out)
}

/// `(2,0)` part of a symmetric operator in an orthonormal chart, normalized
/// so that `|q| = |κ₁ − κ₂| / 2`.
pub fn trace_free_part<T: Real>(s: [T; 3]) -> Complex<T> {
    Complex::new((s[0] - s[2]) * T::lit(0.5), -s[1])
}

/// Hopf differential from explicit vertex normals.
pub fn hopf_differential_with_normals<T: Real>(
    m: &TriMesh<T>,
    normals: &NormalField<T>,
) -> Result<QuadDiffField<T>> {
    let s = face_shape_operators(m, normals)?;
    QuadDiffField::new(m, s.into_iter().map(trace_free_part).collect())
}

/// Hopf differential using the normals of the per-vertex quadratic fits.
pub fn hopf_differential<T: Real>(m: &TriMesh<T>) -> Result<QuadDiffField<T>> {
    let normals = fit_normals(m)?;
    hopf_differential_with_normals(m, &normals)
}

pub fn fit_normals<T: Real>(m: &TriMesh<T>) -> Result<NormalField<T>> {
    let r = curvature_report(m)?;
    NormalField::from_vectors(&r.fit_normals)
}
