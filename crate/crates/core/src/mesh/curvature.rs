//! Discrete curvature measurements.
//!
//! Sign convention: with outward (ccw) orientation a round sphere has
//! positive mean curvature and positive principal curvatures.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::fields::{HalfDensityField, NormalField};
use crate::mesh::vec3::{self, V3};
use crate::mesh::TriMesh;
use crate::quatnum::dense::least_squares;
use crate::scalar::Real;

/// Barycentric dual areas: a third of each incident face area.
pub fn vertex_areas<T: Real>(m: &TriMesh<T>) -> Vec<T> {
    let third = T::one() / T::lit(3.0);
    let mut a = vec![T::zero(); m.num_vertices()];
    for f in 0..m.num_faces() {
        let af = m.face_area(f) * third;
        for v in m.face(f) {
            a[v] += af;
        }
    }
    a
}

pub fn face_areas<T: Real>(m: &TriMesh<T>) -> Vec<T> {
    (0..m.num_faces()).map(|f| m.face_area(f)).collect()
}

/// Cotangent of the corner angle opposite each halfedge.
pub fn halfedge_cotangents<T: Real>(m: &TriMesh<T>) -> Result<Vec<T>> {
    let mut out = vec![T::zero(); m.num_halfedges()];
    for (h, slot) in out.iter_mut().enumerate() {
        // Vectors from the opposite corner to the tail and head of `h`.
        let u = m.he_vector(m.prev(h));
        let w = vec3::scale(m.he_vector(m.next(h)), -T::one());
        let s = vec3::norm(vec3::cross(u, w));
        if !(s > T::zero()) {
            return Err(Error::DegenerateFace { face: h / 3 });
        }
        *slot = vec3::dot(u, w) / s;
    }
    Ok(out)
}

/// Cotan weight `½(cot α + cot β)` per edge.
pub fn cotan_weights<T: Real>(m: &TriMesh<T>) -> Result<Vec<T>> {
    let cot = halfedge_cotangents(m)?;
    Ok((0..m.num_edges())
        .map(|e| {
            let h = m.edge_halfedge(e);
            (cot[h] + cot[m.twin(h)]) * T::lit(0.5)
        })
        .collect())
}

/// Integrated mean-curvature normal `Σ_j w_ij (x_i − x_j) ≈ 2 H A_i N_i`.
pub fn mean_curvature_normals<T: Real>(m: &TriMesh<T>) -> Result<Vec<V3<T>>> {
    let w = cotan_weights(m)?;
    let mut k = vec![vec3::zero(); m.num_vertices()];
    for (e, &we) in w.iter().enumerate() {
        let (i, j) = m.edge_vertices(e);
        let d = vec3::scale(vec3::sub(m.point(i), m.point(j)), we);
        vec3::add_assign(&mut k[i], d);
        vec3::add_assign(&mut k[j], vec3::scale(d, -T::one()));
    }
    Ok(k)
}

/// Area-weighted vertex normals, unnormalized.
pub fn vertex_normal_vectors<T: Real>(m: &TriMesh<T>) -> Vec<V3<T>> {
    let mut n = vec![vec3::zero(); m.num_vertices()];
    for f in 0..m.num_faces() {
        let nf = m.face_normal_scaled(f);
        for v in m.face(f) {
            vec3::add_assign(&mut n[v], nf);
        }
    }
    n
}

pub fn vertex_normals<T: Real>(m: &TriMesh<T>) -> NormalField<T> {
    NormalField::from_vectors(&vertex_normal_vectors(m))
        .expect("closed meshes without degenerate faces have nonzero vertex normals")
}

/// Cotan mean curvature `H_i = ½‖K_i‖ / A_i`, signed by agreement with the
/// outward vertex normal.
pub fn mean_curvature<T: Real>(m: &TriMesh<T>) -> Result<Vec<T>> {
    let k = mean_curvature_normals(m)?;
    let n = vertex_normal_vectors(m);
    let a = vertex_areas(m);
    Ok((0..m.num_vertices())
        .map(|i| {
            let h = vec3::norm(k[i]) / (T::lit(2.0) * a[i]);
            if vec3::dot(k[i], n[i]) < T::zero() {
                -h
            } else {
                h
            }
        })
        .collect())
}

/// `U_i = H_i √Â_i` from the cotan mean curvature, normalized areas `Â`.
pub fn mean_curvature_half_density<T: Real>(m: &TriMesh<T>) -> Result<HalfDensityField<T>> {
    let h = mean_curvature(m)?;
    let ell = m.length_scale();
    let a = vertex_areas(m);
    let values = h
        .iter()
        .zip(&a)
        .map(|(&h, &a)| h * ell * (a / (ell * ell)).sqrt())
        .collect();
    HalfDensityField::new(m, values)
}

/// Signed dihedral angle across halfedge `h`, positive when convex.
pub fn dihedral_angle<T: Real>(m: &TriMesh<T>, h: usize) -> T {
    let nf = m.face_normal(h / 3);
    let ng = m.face_normal(m.twin(h) / 3);
    let e = vec3::normalize(m.he_vector(h));
    vec3::dot(vec3::cross(nf, ng), e).atan2(vec3::dot(nf, ng))
}

/// Integrated dihedral mean curvature per face, `¼ Σ_edges |e| θ_e`.
pub fn face_dihedral_curvature<T: Real>(m: &TriMesh<T>) -> Vec<T> {
    let quarter = T::lit(0.25);
    let mut hf = vec![T::zero(); m.num_faces()];
    for (h, slot) in (0..m.num_halfedges()).map(|h| (h, h / 3)) {
        let l = vec3::norm(m.he_vector(h));
        hf[slot] += quarter * l * dihedral_angle(m, h);
    }
    hf
}

/// Dihedral mean curvature per vertex: a third of the integrated face values
/// of each incident face, divided by the dual area.
pub fn dihedral_mean_curvature<T: Real>(m: &TriMesh<T>) -> Vec<T> {
    let hf = face_dihedral_curvature(m);
    let a = vertex_areas(m);
    let third = T::one() / T::lit(3.0);
    let mut h = vec![T::zero(); m.num_vertices()];
    for (f, &x) in hf.iter().enumerate() {
        for v in m.face(f) {
            h[v] += x * third;
        }
    }
    h.iter().zip(&a).map(|(&x, &a)| x / a).collect()
}

/// Corner angle of face `f` at local corner `k`.
pub fn corner_angle<T: Real>(m: &TriMesh<T>, f: usize, k: usize) -> T {
    let p = m.face_points(f);
    let u = vec3::sub(p[(k + 1) % 3], p[k]);
    let w = vec3::sub(p[(k + 2) % 3], p[k]);
    vec3::norm(vec3::cross(u, w)).atan2(vec3::dot(u, w))
}

/// Angle defect `2π − Σ corner angles` per vertex.
pub fn angle_defects<T: Real>(m: &TriMesh<T>) -> Vec<T> {
    let mut d = vec![T::lit(2.0) * T::PI(); m.num_vertices()];
    for f in 0..m.num_faces() {
        for (k, v) in m.face(f).into_iter().enumerate() {
            d[v] -= corner_angle(m, f, k);
        }
    }
    d
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport<T> {
    /// Cotan mean curvature (1/length).
    pub mean: Vec<T>,
    /// Angle-defect Gauss curvature (1/length²).
    pub gauss: Vec<T>,
    pub kappa1: Vec<T>,
    pub kappa2: Vec<T>,
    /// Barycentric dual area (length²).
    pub area: Vec<T>,
    /// `|κ₁κ₂ − K|` per vertex.
    pub gauss_residual: Vec<T>,
    /// `|(κ₁ + κ₂)/2 − H|` per vertex.
    pub mean_residual: Vec<T>,
    /// Vertex normals of the quadratic fits.
    #[serde(skip)]
    pub fit_normals: Vec<V3<T>>,
}

impl<T: Real> CurvatureReport<T> {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Root-mean-square of `mean_residual`.
    pub fn mean_residual_rms(&self) -> T {
        rms(&self.mean_residual)
    }

    pub fn gauss_residual_rms(&self) -> T {
        rms(&self.gauss_residual)
    }
}

fn rms<T: Real>(x: &[T]) -> T {
    (x.iter().map(|&v| v * v).sum::<T>() / T::from_usize_lossy(x.len().max(1))).sqrt()
}

/// Per-vertex shape operator from a quadratic height fit over the tangent
/// plane (one-ring, two-ring below valence 5).
pub fn curvature_report<T: Real>(m: &TriMesh<T>) -> Result<CurvatureReport<T>> {
    let mean = mean_curvature(m)?;
    let area = vertex_areas(m);
    let gauss: Vec<T> = angle_defects(m)
        .into_iter()
        .zip(&area)
        .map(|(d, &a)| d / a)
        .collect();
    let normals = vertex_normal_vectors(m);
    let n = m.num_vertices();
    let mut kappa1 = Vec::with_capacity(n);
    let mut kappa2 = Vec::with_capacity(n);
    let mut fit_normals = Vec::with_capacity(n);
    for v in 0..n {
        let (k1, k2, nn) = fit_vertex(m, v, vec3::normalize(normals[v]))?;
        kappa1.push(k1);
        kappa2.push(k2);
        fit_normals.push(nn);
    }
    let half = T::lit(0.5);
    let gauss_residual = (0..n)
        .map(|v| (kappa1[v] * kappa2[v] - gauss[v]).abs())
        .collect();
    let mean_residual = (0..n)
        .map(|v| ((kappa1[v] + kappa2[v]) * half - mean[v]).abs())
        .collect();
    Ok(CurvatureReport {
        mean,
        gauss,
        kappa1,
        kappa2,
        area,
        gauss_residual,
        mean_residual,
        fit_normals,
    })
}

fn ring_samples<T: Real>(m: &TriMesh<T>, v: usize) -> Vec<usize> {
    let ring = m.neighbors(v);
    if ring.len() >= 5 {
        return ring;
    }
    let mut out = ring.clone();
    for &u in &ring {
        for w in m.neighbors(u) {
            if w != v && !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

/// Tangent frame `(t1, t2)` completing the unit normal `n` to a right-handed basis.
pub fn tangent_frame<T: Real>(n: V3<T>) -> (V3<T>, V3<T>) {
    let a = if n[0].abs() < T::lit(0.6) {
        [T::one(), T::zero(), T::zero()]
    } else {
        [T::zero(), T::one(), T::zero()]
    };
    let t1 = vec3::normalize(vec3::sub(a, vec3::scale(n, vec3::dot(a, n))));
    let t2 = vec3::cross(n, t1);
    (t1, t2)
}

fn fit_vertex<T: Real>(m: &TriMesh<T>, v: usize, n: V3<T>) -> Result<(T, T, V3<T>)> {
    let samples = ring_samples(m, v);
    let (t1, t2) = tangent_frame(n);
    let x0 = m.point(v);
    let scale = samples
        .iter()
        .map(|&u| vec3::norm(vec3::sub(m.point(u), x0)))
        .fold(T::zero(), T::max);
    let mut rows = Vec::with_capacity(samples.len());
    let mut rhs = Vec::with_capacity(samples.len());
    for &u in &samples {
        let d = vec3::scale(vec3::sub(m.point(u), x0), T::one() / scale);
        let (x, y) = (vec3::dot(d, t1), vec3::dot(d, t2));
        rows.push(vec![x * x, x * y, y * y, x, y]);
        rhs.push(-vec3::dot(d, n));
    }
    let c = least_squares(&rows, &rhs).ok_or(Error::RankDeficientFit { vertex: v })?;
    let two = T::lit(2.0);
    // Height h(x, y) = a x² + b xy + c y² + d x + e y in units of `scale`.
    let (a, b, cc, d, e) = (c[0] / scale, c[1] / scale, c[2] / scale, c[3], c[4]);
    let g = T::one() + d * d + e * e;
    let w = g.sqrt();
    let (i11, i12, i22) = (T::one() + d * d, d * e, T::one() + e * e);
    let (l11, l12, l22) = (two * a / w, b / w, two * cc / w);
    let det_i = i11 * i22 - i12 * i12;
    // S = I⁻¹ II.
    let s11 = (i22 * l11 - i12 * l12) / det_i;
    let s12 = (i22 * l12 - i12 * l22) / det_i;
    let s21 = (i11 * l12 - i12 * l11) / det_i;
    let s22 = (i11 * l22 - i12 * l12) / det_i;
    let tr = (s11 + s22) * T::lit(0.5);
    let det = s11 * s22 - s12 * s21;
    let disc = (tr * tr - det).max(T::zero()).sqrt();
    // Surface normal of the graph, pointing to the side opposite the height.
    let nn = vec3::normalize(vec3::add(
        n,
        vec3::add(vec3::scale(t1, d), vec3::scale(t2, e)),
    ));
    Ok((tr + disc, tr - disc, nn))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate::{icosphere, torus};

    #[test]
    fn icosphere_mean_curvature_near_one() {
        let m: TriMesh<f64> = icosphere(3).unwrap();
        let h = mean_curvature(&m).unwrap();
        let err = (h.iter().map(|x| (x - 1.0).powi(2)).sum::<f64>() / h.len() as f64).sqrt();
        assert!(err <= 0.02, "{err}");
    }

    #[test]
    fn gauss_bonnet_is_exact() {
        for m in [icosphere::<f64>(2).unwrap(), torus(2.0, 1.0, 12, 9).unwrap()] {
            let total: f64 = angle_defects(&m).iter().sum();
            let expect = 2.0 * std::f64::consts::PI * m.euler_characteristic() as f64;
            assert!((total - expect).abs() <= 1e-9);
        }
    }

    #[test]
    fn principal_curvatures_sorted_and_unit_on_sphere() {
        let m: TriMesh<f64> = icosphere(3).unwrap();
        let r = curvature_report(&m).unwrap();
        for v in 0..m.num_vertices() {
            assert!(r.kappa1[v] >= r.kappa2[v]);
            assert!((r.kappa1[v] - 1.0).abs() < 0.05 && (r.kappa2[v] - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn icosphere_cotan_weights_positive() {
        let m: TriMesh<f64> = icosphere(2).unwrap();
        assert!(cotan_weights(&m).unwrap().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn dihedral_curvature_on_sphere() {
        let m: TriMesh<f64> = icosphere(3).unwrap();
        let h = dihedral_mean_curvature(&m);
        assert!(h.iter().all(|&x| (x - 1.0).abs() < 0.05));
    }
}
