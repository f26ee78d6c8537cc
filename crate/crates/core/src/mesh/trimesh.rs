use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mesh::vec3::{self, V3};
use crate::quatnum::Quaternion;
use crate::scalar::Real;

/// Closed, oriented, manifold triangle mesh with halfedge connectivity.
///
/// Halfedge `3f + k` runs from `faces[f][k]` to `faces[f][(k + 1) % 3]`.
/// Positions are imaginary quaternions.
#[derive(Clone, Debug)]
pub struct TriMesh<T> {
    positions: Vec<Quaternion<T>>,
    faces: Vec<[usize; 3]>,
    twin: Vec<usize>,
    vertex_he: Vec<usize>,
    he_edge: Vec<usize>,
    edge_he: Vec<usize>,
    connectivity_id: u64,
}

impl<T: Real> TriMesh<T> {
    /// Builds and validates a mesh from point coordinates and ccw faces.
    pub fn new(points: Vec<V3<T>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let positions = points.into_iter().map(Quaternion::from_vector).collect();
        Self::from_positions(positions, faces)
    }

    /// Same as [`TriMesh::new`] with positions already given as imaginary quaternions.
    pub fn from_positions(positions: Vec<Quaternion<T>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = positions.len();
        for (f, face) in faces.iter().enumerate() {
            for &v in face {
                if v >= n {
                    return Err(Error::IndexOutOfRange {
                        face: f,
                        index: v,
                        vertex_count: n,
                    });
                }
            }
            if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
                return Err(Error::DegenerateFace { face: f });
            }
        }
        let nh = 3 * faces.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(nh);
        let mut undirected: HashMap<(usize, usize), u32> = HashMap::with_capacity(nh);
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                let c = undirected.entry((a.min(b), a.max(b))).or_insert(0);
                *c += 1;
                if *c > 2 {
                    return Err(Error::NonManifoldEdge { face: f, a, b });
                }
                if directed.insert((a, b), 3 * f + k).is_some() {
                    return Err(Error::InconsistentOrientation { face: f, a, b });
                }
            }
        }
        let mut twin = vec![usize::MAX; nh];
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                match directed.get(&(b, a)) {
                    Some(&h) => twin[3 * f + k] = h,
                    None => return Err(Error::OpenBoundary { face: f, a, b }),
                }
            }
        }
        let mut vertex_he = vec![usize::MAX; n];
        let mut valence = vec![0usize; n];
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                let v = face[k];
                valence[v] += 1;
                if vertex_he[v] == usize::MAX {
                    vertex_he[v] = 3 * f + k;
                }
            }
        }
        if let Some(v) = vertex_he.iter().position(|&h| h == usize::MAX) {
            return Err(Error::UnreferencedVertex { vertex: v });
        }
        for v in 0..n {
            let start = vertex_he[v];
            let mut h = start;
            let mut count = 0;
            loop {
                count += 1;
                h = twin[prev_he(h)];
                if h == start || count > valence[v] {
                    break;
                }
            }
            if count != valence[v] {
                return Err(Error::NonManifoldVertex { vertex: v });
            }
        }
        let mut he_edge = vec![usize::MAX; nh];
        let mut edge_he = Vec::with_capacity(nh / 2);
        for h in 0..nh {
            if he_edge[h] == usize::MAX {
                he_edge[h] = edge_he.len();
                he_edge[twin[h]] = edge_he.len();
                edge_he.push(h);
            }
        }
        let mesh = Self {
            connectivity_id: hash_faces(n, &faces),
            positions,
            faces,
            twin,
            vertex_he,
            he_edge,
            edge_he,
        };
        let chi = mesh.euler_characteristic();
        if chi % 2 != 0 {
            return Err(Error::OddEulerCharacteristic { chi });
        }
        let areas: Vec<T> = (0..mesh.num_faces()).map(|f| mesh.face_area(f)).collect();
        let mean = areas.iter().copied().sum::<T>() / T::from_usize_lossy(areas.len().max(1));
        if let Some(f) = areas
            .iter()
            .position(|&a| !(a > T::lit(1e-12) * mean) || !a.is_finite())
        {
            return Err(Error::DegenerateFace { face: f });
        }
        Ok(mesh)
    }

    /// Mesh with the same connectivity and new positions.
    pub fn with_points(&self, points: Vec<V3<T>>) -> Result<Self> {
        if points.len() != self.num_vertices() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vertices(),
                found: points.len(),
            });
        }
        let mut m = self.clone();
        m.positions = points.into_iter().map(Quaternion::from_vector).collect();
        let areas: Vec<T> = (0..m.num_faces()).map(|f| m.face_area(f)).collect();
        let mean = areas.iter().copied().sum::<T>() / T::from_usize_lossy(areas.len());
        if let Some(f) = areas
            .iter()
            .position(|&a| !(a > T::lit(1e-12) * mean) || !a.is_finite())
        {
            return Err(Error::DegenerateFace { face: f });
        }
        Ok(m)
    }

    /// Replaces positions without the face-area check; used for collapsed
    /// integration results.
    pub(crate) fn set_points_unchecked(&mut self, points: Vec<V3<T>>) {
        self.positions = points.into_iter().map(Quaternion::from_vector).collect();
    }

    /// Applies `p ↦ f(p)` to every vertex.
    pub fn map_points(&self, f: impl Fn(V3<T>) -> V3<T>) -> Result<Self> {
        self.with_points(self.points().into_iter().map(f).collect())
    }

    pub fn num_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_he.len()
    }

    pub fn num_halfedges(&self) -> usize {
        self.twin.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic()) / 2
    }

    /// Hash of the face list; equal for meshes with identical connectivity.
    pub fn connectivity_id(&self) -> u64 {
        self.connectivity_id
    }

    pub fn same_connectivity(&self, other: &Self) -> bool {
        self.connectivity_id == other.connectivity_id
            && self.num_vertices() == other.num_vertices()
            && self.faces == other.faces
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> [usize; 3] {
        self.faces[f]
    }

    pub fn positions(&self) -> &[Quaternion<T>] {
        &self.positions
    }

    pub fn point(&self, v: usize) -> V3<T> {
        self.positions[v].vector()
    }

    pub fn points(&self) -> Vec<V3<T>> {
        self.positions.iter().map(|q| q.vector()).collect()
    }

    pub fn face_points(&self, f: usize) -> [V3<T>; 3] {
        let [a, b, c] = self.faces[f];
        [self.point(a), self.point(b), self.point(c)]
    }

    pub fn twin(&self, h: usize) -> usize {
        self.twin[h]
    }

    pub fn next(&self, h: usize) -> usize {
        next_he(h)
    }

    pub fn prev(&self, h: usize) -> usize {
        prev_he(h)
    }

    pub fn tail(&self, h: usize) -> usize {
        self.faces[h / 3][h % 3]
    }

    pub fn head(&self, h: usize) -> usize {
        self.faces[h / 3][(h + 1) % 3]
    }

    pub fn he_face(&self, h: usize) -> usize {
        h / 3
    }

    pub fn he_edge(&self, h: usize) -> usize {
        self.he_edge[h]
    }

    /// Canonical halfedge of an edge.
    pub fn edge_halfedge(&self, e: usize) -> usize {
        self.edge_he[e]
    }

    pub fn edge_vertices(&self, e: usize) -> (usize, usize) {
        let h = self.edge_he[e];
        (self.tail(h), self.head(h))
    }

    /// Vector from tail to head of halfedge `h`.
    pub fn he_vector(&self, h: usize) -> V3<T> {
        vec3::sub(self.point(self.head(h)), self.point(self.tail(h)))
    }

    /// Outgoing halfedges of `v` in counter-clockwise order.
    pub fn outgoing(&self, v: usize) -> Vec<usize> {
        let start = self.vertex_he[v];
        let mut out = vec![start];
        let mut h = self.twin[prev_he(start)];
        while h != start {
            out.push(h);
            h = self.twin[prev_he(h)];
        }
        out
    }

    /// One-ring neighbours in counter-clockwise order.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.outgoing(v).into_iter().map(|h| self.head(h)).collect()
    }

    /// Incident faces in counter-clockwise order; face `i` lies between
    /// neighbours `i` and `i + 1`.
    pub fn vertex_faces(&self, v: usize) -> Vec<usize> {
        self.outgoing(v).into_iter().map(|h| h / 3).collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.outgoing(v).len()
    }

    /// Unnormalized face normal `(b − a) × (c − a)`, twice the area in length.
    pub fn face_normal_scaled(&self, f: usize) -> V3<T> {
        let [a, b, c] = self.face_points(f);
        vec3::cross(vec3::sub(b, a), vec3::sub(c, a))
    }

    pub fn face_normal(&self, f: usize) -> V3<T> {
        vec3::normalize(self.face_normal_scaled(f))
    }

    pub fn face_area(&self, f: usize) -> T {
        vec3::norm(self.face_normal_scaled(f)) * T::lit(0.5)
    }

    pub fn face_centroid(&self, f: usize) -> V3<T> {
        let [a, b, c] = self.face_points(f);
        vec3::scale(vec3::add(vec3::add(a, b), c), T::one() / T::lit(3.0))
    }

    pub fn total_area(&self) -> T {
        (0..self.num_faces()).map(|f| self.face_area(f)).sum()
    }

    /// Reference length `√(area / 4π)`; the radius for a round sphere.
    pub fn length_scale(&self) -> T {
        (self.total_area() / (T::lit(4.0) * T::PI())).sqrt()
    }

    /// Largest distance of a vertex from the vertex centroid.
    pub fn bounding_radius(&self) -> T {
        let pts = self.points();
        let c = vec3::scale(
            pts.iter().fold(vec3::zero(), |acc, &p| vec3::add(acc, p)),
            T::one() / T::from_usize_lossy(pts.len()),
        );
        pts.iter()
            .map(|&p| vec3::norm(vec3::sub(p, c)))
            .fold(T::zero(), T::max)
    }

    pub fn mean_edge_length(&self) -> T {
        let s: T = (0..self.num_edges())
            .map(|e| vec3::norm(self.he_vector(self.edge_he[e])))
            .sum();
        s / T::from_usize_lossy(self.num_edges())
    }

    /// Converts the coordinates to another scalar type.
    pub fn cast<S: Real>(&self) -> TriMesh<S> {
        let conv = |x: T| S::lit(x.to_f64_lossy());
        TriMesh {
            positions: self
                .positions
                .iter()
                .map(|q| Quaternion::new(conv(q.w), conv(q.x), conv(q.y), conv(q.z)))
                .collect(),
            faces: self.faces.clone(),
            twin: self.twin.clone(),
            vertex_he: self.vertex_he.clone(),
            he_edge: self.he_edge.clone(),
            edge_he: self.edge_he.clone(),
            connectivity_id: self.connectivity_id,
        }
    }
}

fn next_he(h: usize) -> usize {
    3 * (h / 3) + (h + 1) % 3
}

fn prev_he(h: usize) -> usize {
    3 * (h / 3) + (h + 2) % 3
}

fn hash_faces(n: usize, faces: &[[usize; 3]]) -> u64 {
    // FNV-1a over the vertex count and face indices.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    eat(n as u64);
    for f in faces {
        for &v in f {
            eat(v as u64);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tetrahedron() -> TriMesh<f64> {
        TriMesh::new(
            vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]],
        )
        .unwrap()
    }

    #[test]
    fn tetrahedron_counts() {
        let m = tetrahedron();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_faces()), (4, 6, 4));
        assert_eq!(m.euler_characteristic(), 2);
        for v in 0..4 {
            assert_eq!(m.valence(v), 3);
        }
        for h in 0..m.num_halfedges() {
            assert_eq!(m.twin(m.twin(h)), h);
            assert_eq!(m.tail(m.twin(h)), m.head(h));
        }
    }

    #[test]
    fn tetrahedron_normals_point_outward() {
        let m = tetrahedron();
        for f in 0..4 {
            assert!(vec3::dot(m.face_normal(f), m.face_centroid(f)) > 0.0);
        }
    }

    #[test]
    fn one_ring_is_counter_clockwise() {
        let m = tetrahedron();
        let ring = m.neighbors(0);
        let faces = m.vertex_faces(0);
        for i in 0..ring.len() {
            let f = m.face(faces[i]);
            let next = ring[(i + 1) % ring.len()];
            let pos = f.iter().position(|&x| x == 0).unwrap();
            assert_eq!(f[(pos + 1) % 3], ring[i]);
            assert_eq!(f[(pos + 2) % 3], next);
        }
    }

    #[test]
    fn rejects_bad_meshes() {
        let p = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let open = TriMesh::new(p.clone(), vec![[0, 1, 2], [0, 2, 3], [0, 3, 1]]);
        assert!(matches!(open, Err(Error::OpenBoundary { .. })));
        let flipped = TriMesh::new(p.clone(), vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 2, 3]]);
        assert!(matches!(flipped, Err(Error::InconsistentOrientation { .. })));
        let oob = TriMesh::new(p.clone(), vec![[0, 1, 7]]);
        assert!(matches!(oob, Err(Error::IndexOutOfRange { index: 7, .. })));
        let mut q = p.clone();
        q.push([5.0, 5.0, 5.0]);
        let unref = TriMesh::new(q, vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]]);
        assert!(matches!(unref, Err(Error::UnreferencedVertex { vertex: 4 })));
    }

    #[test]
    fn rejects_three_faces_on_an_edge() {
        let p = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        let r = TriMesh::new(p, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]);
        assert!(matches!(r, Err(Error::NonManifoldEdge { a: 0, b: 1, .. })));
    }

    #[test]
    fn rejects_pinched_vertex() {
        // Two tetrahedra sharing vertex 0.
        let p = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, -1.0],
        ];
        let f = vec![
            [0, 2, 1],
            [0, 1, 3],
            [0, 3, 2],
            [1, 2, 3],
            [0, 4, 5],
            [0, 6, 4],
            [0, 5, 6],
            [4, 6, 5],
        ];
        assert!(matches!(TriMesh::new(p, f), Err(Error::NonManifoldVertex { vertex: 0 })));
    }

    #[test]
    fn zero_area_face_is_rejected() {
        let m = tetrahedron();
        let mut pts = m.points();
        pts[3] = [0.0, 0.0, 0.0];
        pts[0] = [0.0, 0.0, 0.0];
        assert!(m.with_points(pts).is_err());
    }
}
