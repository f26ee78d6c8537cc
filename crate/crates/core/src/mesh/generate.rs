//! Procedural test meshes.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::vec3::{self, V3};
use crate::mesh::TriMesh;
use crate::scalar::Real;

pub const MAX_LEVEL: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeshKind {
    /// Unit sphere by repeated 4-to-1 subdivision of the icosahedron.
    Icosphere { level: usize },
    /// Icosphere with coordinates scaled by the semi-axes.
    Ellipsoid { a: f64, b: f64, c: f64, level: usize },
    /// Torus of revolution about the z axis with `nu × nv` quads split in two.
    Torus { major: f64, minor: f64, nu: usize, nv: usize },
}

pub fn generate_test_mesh<T: Real>(kind: MeshKind) -> Result<TriMesh<T>> {
    match kind {
        MeshKind::Icosphere { level } => icosphere(level),
        MeshKind::Ellipsoid { a, b, c, level } => ellipsoid(a, b, c, level),
        MeshKind::Torus { major, minor, nu, nv } => torus(major, minor, nu, nv),
    }
}

fn check_level(level: usize) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::InvalidParameter(format!(
            "subdivision level {level} exceeds {MAX_LEVEL}"
        )));
    }
    Ok(())
}

/// Icosahedron with one vertex at `+z` (vertex 0) and one at `−z`.
fn icosahedron() -> (Vec<V3<f64>>, Vec<[usize; 3]>) {
    let h = 1.0 / 5f64.sqrt();
    let r = 2.0 * h;
    let mut p = vec![[0.0, 0.0, 1.0]];
    for k in 0..5 {
        let t = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
        p.push([r * t.cos(), r * t.sin(), h]);
    }
    for k in 0..5 {
        let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 5.0;
        p.push([r * t.cos(), r * t.sin(), -h]);
    }
    p.push([0.0, 0.0, -1.0]);
    let mut f = Vec::with_capacity(20);
    for k in 0..5 {
        let (u0, u1) = (1 + k, 1 + (k + 1) % 5);
        let (l0, l1) = (6 + k, 6 + (k + 1) % 5);
        f.push([0, u0, u1]);
        f.push([u0, l0, u1]);
        f.push([u1, l0, l1]);
        f.push([11, l1, l0]);
    }
    (p, f)
}

fn subdivide(points: &mut Vec<V3<f64>>, faces: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
    let mut get = |a: usize, b: usize, points: &mut Vec<V3<f64>>| {
        *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
            let m = vec3::scale(vec3::add(points[a], points[b]), 0.5);
            points.push(m);
            points.len() - 1
        })
    };
    let mut out = Vec::with_capacity(4 * faces.len());
    for &[a, b, c] in faces {
        let ab = get(a, b, points);
        let bc = get(b, c, points);
        let ca = get(c, a, points);
        out.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
    }
    out
}

fn icosphere_f64(level: usize) -> (Vec<V3<f64>>, Vec<[usize; 3]>) {
    let (mut p, mut f) = icosahedron();
    for _ in 0..level {
        f = subdivide(&mut p, &f);
        for q in &mut p {
            *q = vec3::normalize(*q);
        }
    }
    (p, f)
}

fn to_t<T: Real>(p: Vec<V3<f64>>) -> Vec<V3<T>> {
    p.into_iter().map(|q| q.map(T::lit)).collect()
}

/// Unit icosphere with `10·4^level + 2` vertices; vertex 0 is the north pole.
pub fn icosphere<T: Real>(level: usize) -> Result<TriMesh<T>> {
    check_level(level)?;
    let (p, f) = icosphere_f64(level);
    TriMesh::new(to_t(p), f)
}

pub fn ellipsoid<T: Real>(a: f64, b: f64, c: f64, level: usize) -> Result<TriMesh<T>> {
    check_level(level)?;
    if !(a > 0.0 && b > 0.0 && c > 0.0 && a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::InvalidParameter("ellipsoid semi-axes must be positive".into()));
    }
    let (p, f) = icosphere_f64(level);
    let p = p.into_iter().map(|q| [q[0] * a, q[1] * b, q[2] * c]).collect();
    TriMesh::new(to_t(p), f)
}

pub fn torus<T: Real>(major: f64, minor: f64, nu: usize, nv: usize) -> Result<TriMesh<T>> {
    if nu < 3 || nv < 3 {
        return Err(Error::InvalidParameter("torus needs nu, nv >= 3".into()));
    }
    if !(minor > 0.0 && major > minor && major.is_finite()) {
        return Err(Error::InvalidParameter("torus radii must satisfy 0 < r < R".into()));
    }
    let tau = 2.0 * std::f64::consts::PI;
    let mut p = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = tau * i as f64 / nu as f64;
        for j in 0..nv {
            let v = tau * j as f64 / nv as f64;
            let rho = major + minor * v.cos();
            p.push([rho * u.cos(), rho * u.sin(), minor * v.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut f = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            f.push([a, b, c]);
            f.push([a, c, d]);
        }
    }
    TriMesh::new(to_t(p), f)
}

/// Regular tetrahedron whose faces are each subdivided `level` times; every
/// vertex off the original edges has a flat one-ring.
pub fn subdivided_tetrahedron<T: Real>(level: usize) -> Result<TriMesh<T>> {
    check_level(level)?;
    let mut p = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let mut f = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
    for _ in 0..level {
        f = subdivide(&mut p, &f);
    }
    TriMesh::new(to_t(p), f)
}

/// Flat fan of `k` triangles around the origin in the plane `z = 0` (vertex
/// 0, rim of unit radius), closed below by a cone to `(0, 0, −depth)`. The
/// apex has a flat one-ring of valence `k`.
pub fn flat_fan_cone<T: Real>(k: usize, depth: f64) -> Result<TriMesh<T>> {
    if k < 3 || !(depth > 0.0) {
        return Err(Error::InvalidParameter("fan needs k >= 3 and positive depth".into()));
    }
    let tau = 2.0 * std::f64::consts::PI;
    let mut p = vec![[0.0, 0.0, 0.0]];
    for i in 0..k {
        let t = tau * i as f64 / k as f64;
        p.push([t.cos(), t.sin(), 0.0]);
    }
    p.push([0.0, 0.0, -depth]);
    let bottom = k + 1;
    let mut f = Vec::with_capacity(2 * k);
    for i in 0..k {
        let (a, b) = (1 + i, 1 + (i + 1) % k);
        f.push([0, a, b]);
        f.push([bottom, b, a]);
    }
    TriMesh::new(to_t(p), f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosahedron_counts() {
        let m: TriMesh<f64> = icosphere(0).unwrap();
        assert_eq!((m.num_vertices(), m.num_faces()), (12, 20));
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.point(0), [0.0, 0.0, 1.0]);
        for e in 0..m.num_edges() {
            let l = vec3::norm(m.he_vector(m.edge_halfedge(e)));
            assert!((l - 1.0514622242382672).abs() < 1e-12);
        }
    }

    #[test]
    fn icosphere_vertices_on_unit_sphere() {
        for level in 0..=3 {
            let m: TriMesh<f64> = icosphere(level).unwrap();
            assert_eq!(m.num_vertices(), 10 * 4usize.pow(level as u32) + 2);
            for v in 0..m.num_vertices() {
                assert!((vec3::norm(m.point(v)) - 1.0).abs() <= 1e-12);
            }
            for f in 0..m.num_faces() {
                assert!(vec3::dot(m.face_normal(f), m.face_centroid(f)) > 0.0);
            }
        }
        assert!(icosphere::<f64>(8).is_err());
    }

    #[test]
    fn torus_is_genus_one() {
        let m: TriMesh<f64> = torus(2.0, 1.0, 32, 16).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.genus(), 1);
        assert!(torus::<f64>(2.0, 1.0, 2, 16).is_err());
        assert!(torus::<f64>(1.0, 2.0, 8, 8).is_err());
    }

    #[test]
    fn round_ellipsoid_is_icosphere() {
        let a: TriMesh<f64> = ellipsoid(1.0, 1.0, 1.0, 3).unwrap();
        let b: TriMesh<f64> = icosphere(3).unwrap();
        assert!(a.same_connectivity(&b));
        for v in 0..a.num_vertices() {
            assert!(vec3::norm(vec3::sub(a.point(v), b.point(v))) <= 1e-12);
        }
    }

    #[test]
    fn auxiliary_meshes_are_closed_spheres() {
        let t: TriMesh<f64> = subdivided_tetrahedron(3).unwrap();
        assert_eq!(t.euler_characteristic(), 2);
        let c: TriMesh<f64> = flat_fan_cone(12, 0.5).unwrap();
        assert_eq!(c.euler_characteristic(), 2);
        assert_eq!(c.valence(0), 12);
    }
}
