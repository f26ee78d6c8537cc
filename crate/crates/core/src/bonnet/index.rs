use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::curvature::angle_defects;
use crate::mesh::hopf::face_chart;
use crate::mesh::vec3::{self, V3};
use crate::mesh::{CurvatureReport, QuadDiffField, TriMesh};
use crate::scalar::Real;

fn wrap<T: Real>(a: T) -> T {
    let tau = T::TAU();
    let mut r = a % tau;
    if r > T::PI() {
        r -= tau;
    } else if r <= -T::PI() {
        r += tau;
    }
    r
}

fn round_half<T: Real>(x: T) -> T {
    // Adding zero turns −0 into +0.
    (x + x).round() * T::lit(0.5) + T::zero()
}

/// Unrounded index at each vertex, `−(Σδ − 2d_v) / 4π`, where the `δ` are
/// the phase jumps of `q` between consecutive faces of the star after
/// parallel transport across the shared edge and `d_v` is the angle defect.
struct IndexDensity<T> {
    defects: Vec<T>,
    floor: T,
}

impl<T: Real> IndexDensity<T> {
    fn new(m: &TriMesh<T>, q: &QuadDiffField<T>) -> Result<Self> {
        if !q.belongs_to(m) {
            return Err(Error::MeshMismatch);
        }
        Ok(Self {
            defects: angle_defects(m),
            floor: q.max_norm() * T::lit(1e-12),
        })
    }

    fn raw(&self, m: &TriMesh<T>, q: &QuadDiffField<T>, v: usize) -> Result<T> {
        self.partial(m, q, v, |_| false)
    }

    /// As `raw`, dropping the jumps across edges `(v, u)` with `inner(u)`.
    /// Over a vertex set those jumps cancel in pairs, leaving the winding
    /// around the boundary of its star.
    fn partial(&self, m: &TriMesh<T>, q: &QuadDiffField<T>, v: usize, inner: impl Fn(usize) -> bool) -> Result<T> {
        let faces = m.vertex_faces(v);
        let nbrs = m.neighbors(v);
        let k = faces.len();
        let angle_in = |f: usize, e: V3<T>| {
            let (x, y, _) = face_chart(m, f);
            vec3::dot(e, y).atan2(vec3::dot(e, x))
        };
        let mut sum = T::zero();
        for i in 0..k {
            if inner(nbrs[i]) {
                continue;
            }
            // Faces i − 1 and i share the edge to neighbour i.
            let f = faces[(i + k - 1) % k];
            let g = faces[i];
            if !(q.values[f].norm() > self.floor) || !(q.values[g].norm() > self.floor) {
                return Err(Error::VanishingOnLink { vertex: v });
            }
            // Jumps are evaluated in a canonical face order and edge direction,
            // so the two endpoints of an edge see exactly opposite values and
            // the indices sum to χ even when a jump sits at ±π.
            let u = nbrs[i];
            let e = if v < u {
                vec3::sub(m.point(u), m.point(v))
            } else {
                vec3::sub(m.point(v), m.point(u))
            };
            let jump = |a: usize, b: usize| {
                let rho = angle_in(b, e) - angle_in(a, e);
                wrap(q.values[b].arg() - q.values[a].arg() + rho + rho)
            };
            sum += if f < g { jump(f, g) } else { -jump(g, f) };
        }
        let d = self.defects[v];
        Ok(-(sum - (d + d)) / (T::lit(4.0) * T::PI()))
    }

    fn cluster(&self, m: &TriMesh<T>, q: &QuadDiffField<T>, set: &[usize]) -> Result<T> {
        let mut inside = vec![false; m.num_vertices()];
        for &v in set {
            inside[v] = true;
        }
        let mut s = T::zero();
        for &v in set {
            s += self.partial(m, q, v, |u| inside[u])?;
        }
        Ok(round_half(s))
    }
}

/// Index of the horizontal foliation of `q` at vertex `v`, a half-integer.
/// A zero of order `n` of a holomorphic `q` has index `−n/2`.
pub fn foliation_index<T: Real>(m: &TriMesh<T>, q: &QuadDiffField<T>, v: usize) -> Result<T> {
    if v >= m.num_vertices() {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    let d = IndexDensity::new(m, q)?;
    Ok(round_half(d.raw(m, q, v)?))
}

/// Indices at all vertices. They sum to the Euler characteristic.
pub fn vertex_indices<T: Real>(m: &TriMesh<T>, q: &QuadDiffField<T>) -> Result<Vec<T>> {
    let d = IndexDensity::new(m, q)?;
    (0..m.num_vertices()).map(|v| d.raw(m, q, v).map(round_half)).collect()
}

/// Index of a connected vertex set: the winding around the boundary of its
/// star, equal to the sum of the member indices.
pub fn cluster_index<T: Real>(m: &TriMesh<T>, q: &QuadDiffField<T>, vertices: &[usize]) -> Result<T> {
    if let Some(&v) = vertices.iter().find(|&&v| v >= m.num_vertices()) {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    IndexDensity::new(m, q)?.cluster(m, q, vertices)
}

/// Vertices where `|κ₁ − κ₂| ≤ tol · max(|κ₁| + |κ₂|, 1/ℓ)`, with `ℓ` the
/// mesh length scale.
pub fn find_umbilics<T: Real>(report: &CurvatureReport<T>, tol: T) -> Vec<usize> {
    let area: T = report.area.iter().copied().sum();
    let floor = T::one() / (area / (T::lit(4.0) * T::PI())).sqrt();
    (0..report.len())
        .filter(|&v| {
            let (a, b) = (report.kappa1[v], report.kappa2[v]);
            (a - b).abs() <= tol * (a.abs() + b.abs()).max(floor)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct UmbilicCluster<T> {
    pub vertices: Vec<usize>,
    pub centroid: [T; 3],
    pub index: T,
    /// Number of one-ring dilations needed for a nonvanishing boundary.
    pub dilations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct UmbilicAnalysis<T> {
    pub tolerance: T,
    pub umbilics: Vec<usize>,
    pub clusters: Vec<UmbilicCluster<T>>,
    pub index_sum: T,
    /// Sum of all vertex indices; equals `euler_characteristic`.
    pub total_index: T,
    pub euler_characteristic: i64,
    /// Vertices outside every cluster with a nonzero index.
    pub stray: Vec<usize>,
}

const MAX_DILATIONS: usize = 3;

fn components<T: Real>(m: &TriMesh<T>, marked: &[usize]) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; m.num_vertices()];
    let mut is_marked = vec![false; m.num_vertices()];
    for &v in marked {
        is_marked[v] = true;
    }
    let mut out = Vec::new();
    for &s in marked {
        if label[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut comp = vec![s];
        label[s] = id;
        let mut i = 0;
        while i < comp.len() {
            for u in m.neighbors(comp[i]) {
                if is_marked[u] && label[u] == usize::MAX {
                    label[u] = id;
                    comp.push(u);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn dilate<T: Real>(m: &TriMesh<T>, set: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; m.num_vertices()];
    for &v in set {
        inside[v] = true;
        for u in m.neighbors(v) {
            inside[u] = true;
        }
    }
    (0..m.num_vertices()).filter(|&v| inside[v]).collect()
}

/// Umbilic clusters of `m` with the index of `q` around each.
pub fn analyze_umbilics<T: Real>(
    m: &TriMesh<T>,
    report: &CurvatureReport<T>,
    q: &QuadDiffField<T>,
    tol: T,
) -> Result<UmbilicAnalysis<T>> {
    if report.len() != m.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: m.num_vertices(),
            found: report.len(),
        });
    }
    let density = IndexDensity::new(m, q)?;
    let umbilics = find_umbilics(report, tol);
    let mut clusters = Vec::new();
    let mut covered = vec![false; m.num_vertices()];
    for comp in components(m, &umbilics) {
        let mut set = comp.clone();
        let mut dilations = 0;
        let index = loop {
            match density.cluster(m, q, &set) {
                Ok(i) => break i,
                Err(Error::VanishingOnLink { .. }) if dilations < MAX_DILATIONS => {
                    set = dilate(m, &set);
                    dilations += 1;
                }
                Err(e) => return Err(e),
            }
        };
        for &v in &set {
            covered[v] = true;
        }
        let mut c = [T::zero(); 3];
        for &v in &comp {
            vec3::add_assign(&mut c, m.point(v));
        }
        clusters.push(UmbilicCluster {
            centroid: vec3::scale(c, T::one() / T::from_usize_lossy(comp.len())),
            vertices: comp,
            index,
            dilations,
        });
    }
    let mut total = T::zero();
    let mut stray = Vec::new();
    for v in 0..m.num_vertices() {
        if covered[v] {
            continue;
        }
        let i = round_half(density.raw(m, q, v)?);
        if i != T::zero() {
            stray.push(v);
        }
        total += i;
    }
    let index_sum = clusters.iter().map(|c| c.index).fold(T::zero(), |a, b| a + b);
    total += index_sum;
    Ok(UmbilicAnalysis {
        tolerance: tol,
        umbilics,
        clusters,
        index_sum,
        total_index: total,
        euler_characteristic: m.euler_characteristic(),
        stray,
    })
}
