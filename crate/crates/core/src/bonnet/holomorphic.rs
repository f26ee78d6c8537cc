use num_complex::Complex;

use crate::error::{Error, Result};
use crate::mesh::curvature::{tangent_frame, vertex_normal_vectors};
use crate::mesh::hopf::face_chart;
use crate::mesh::vec3;
use crate::mesh::{QuadDiffField, TriMesh};
use crate::quatnum::dense::least_squares;
use crate::scalar::Real;

/// Dimensionless `∂̄`-defect of a face-sampled quadratic differential over the
/// whole mesh. Zero for fields that are locally `c₀ + c₁z`.
pub fn holomorphicity_residual<T: Real>(m: &TriMesh<T>, q: &QuadDiffField<T>) -> Result<T> {
    let all: Vec<usize> = (0..m.num_vertices()).collect();
    holomorphicity_residual_on(m, q, &all)
}

/// As [`holomorphicity_residual`], restricted to the stars of `vertices`.
///
/// At each vertex the neighbouring face values are carried to a common
/// tangent chart (`q ↦ q e^{−2iφ}` for a face chart rotated by `φ`) and
/// fitted by `c₀ + c₁ z` at the face centroids. The per-vertex deviation is
/// divided by the ring radius, area-weighted in RMS, then scaled by the
/// patch length `√(area/π)` and divided by the RMS of `|q|`.
pub fn holomorphicity_residual_on<T: Real>(
    m: &TriMesh<T>,
    q: &QuadDiffField<T>,
    vertices: &[usize],
) -> Result<T> {
    if !q.belongs_to(m) {
        return Err(Error::MeshMismatch);
    }
    if vertices.is_empty() {
        return Err(Error::InvalidParameter("empty vertex set".into()));
    }
    let normals = vertex_normal_vectors(m);
    let mut in_patch = vec![false; m.num_faces()];
    let mut acc = T::zero();
    let mut weight = T::zero();
    for &v in vertices {
        if v >= m.num_vertices() {
            return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
        }
        let faces = m.vertex_faces(v);
        let (t1, t2) = tangent_frame(vec3::normalize(normals[v]));
        let origin = m.point(v);
        let mut rows = Vec::with_capacity(2 * faces.len());
        let mut rhs = Vec::with_capacity(2 * faces.len());
        let mut samples = Vec::with_capacity(faces.len());
        let mut radius = T::zero();
        let mut area = T::zero();
        for &f in &faces {
            in_patch[f] = true;
            let (x, _, _) = face_chart(m, f);
            let phi = vec3::dot(x, t2).atan2(vec3::dot(x, t1));
            let value = q.values[f] * Complex::from_polar(T::one(), -(phi + phi));
            let d = vec3::sub(m.face_centroid(f), origin);
            let z = Complex::new(vec3::dot(d, t1), vec3::dot(d, t2));
            let w = m.face_area(f).sqrt();
            // Real rows of w·(c₀ + c₁ z) = w·value with unknowns (a₀, b₀, a₁, b₁).
            rows.push(vec![w, T::zero(), w * z.re, -w * z.im]);
            rhs.push(w * value.re);
            rows.push(vec![T::zero(), w, w * z.im, w * z.re]);
            rhs.push(w * value.im);
            samples.push((z, value, m.face_area(f)));
            radius += z.norm();
            area += m.face_area(f);
        }
        let c = least_squares(&rows, &rhs).ok_or(Error::RankDeficientFit { vertex: v })?;
        let (c0, c1) = (Complex::new(c[0], c[1]), Complex::new(c[2], c[3]));
        radius /= T::from_usize_lossy(faces.len());
        let dev2 = samples
            .iter()
            .map(|(z, val, a)| (*val - (c0 + c1 * z)).norm_sqr() * *a)
            .sum::<T>()
            / area;
        let ratio = dev2.sqrt() / radius;
        let av = area / T::lit(3.0);
        acc += ratio * ratio * av;
        weight += av;
    }
    let mut patch_area = T::zero();
    let mut q2 = T::zero();
    for (f, inside) in in_patch.iter().enumerate() {
        if *inside {
            let a = m.face_area(f);
            patch_area += a;
            q2 += q.values[f].norm_sqr() * a;
        }
    }
    let q_rms = (q2 / patch_area).sqrt();
    let rms = (acc / weight).sqrt();
    if !(q_rms > T::zero()) {
        return Ok(if rms > T::zero() { T::infinity() } else { T::zero() });
    }
    let length = (patch_area / T::PI()).sqrt();
    Ok(rms * length / q_rms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate::subdivided_tetrahedron;

    /// Samples `Q(z) dz²` with `z = x + iy`, expressed in each face chart.
    fn sampled(m: &TriMesh<f64>, f: impl Fn(Complex<f64>) -> Complex<f64>) -> QuadDiffField<f64> {
        let values = (0..m.num_faces())
            .map(|i| {
                let (x, _, _) = face_chart(m, i);
                let c = m.face_centroid(i);
                let phi = x[1].atan2(x[0]);
                f(Complex::new(c[0], c[1])) * Complex::from_polar(1.0, 2.0 * phi)
            })
            .collect();
        QuadDiffField::new(m, values).unwrap()
    }

    fn flat_patch(m: &TriMesh<f64>) -> Vec<usize> {
        // Interior vertices of the face lying in the plane z = max z.
        let zmax = m.points().iter().fold(f64::NEG_INFINITY, |a, p| a.max(p[2]));
        (0..m.num_vertices())
            .filter(|&v| {
                m.neighbors(v).iter().all(|&u| (m.point(u)[2] - zmax).abs() < 1e-12)
                    && (m.point(v)[2] - zmax).abs() < 1e-12
            })
            .collect()
    }

    #[test]
    fn holomorphic_fields_pass_and_antiholomorphic_fail() {
        let m = flat_tetra();
        let patch = flat_patch(&m);
        assert!(patch.len() > 20, "{}", patch.len());
        let hol = sampled(&m, |z| z + Complex::new(0.3, 0.1));
        let r = holomorphicity_residual_on(&m, &hol, &patch).unwrap();
        assert!(r <= 1e-10, "{r}");
        let anti = sampled(&m, |z| z.conj());
        let r = holomorphicity_residual_on(&m, &anti, &patch).unwrap();
        assert!(r >= 0.5, "{r}");
    }

    /// Subdivided tetrahedron turned so one face has outward normal `+z`.
    fn flat_tetra() -> TriMesh<f64> {
        let m: TriMesh<f64> = subdivided_tetrahedron(4).unwrap();
        let f = (0..m.num_faces())
            .max_by(|&a, &b| m.face_normal(a)[2].total_cmp(&m.face_normal(b)[2]))
            .unwrap();
        let n = m.face_normal(f);
        let axis = vec3::cross(n, [0.0, 0.0, 1.0]);
        let s = vec3::norm(axis);
        if s < 1e-14 {
            return m;
        }
        let angle = s.atan2(n[2]);
        let r = crate::quatnum::Quaternion::from_axis_angle(axis, angle);
        m.map_points(|p| r.rotate(crate::quatnum::Quaternion::from_vector(p)).vector())
            .unwrap()
    }
}
