use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::curvature::vertex_areas;
use crate::mesh::vec3::{self, V3};
use crate::mesh::TriMesh;
use crate::quatnum::Quaternion;
use crate::scalar::Real;

/// One real sample of a half-density per vertex.
///
/// Samples are dimensionless: a value `U_i` stands for `u_i·√Â_i`, with `Â_i`
/// the dual area measured in units of the mesh length scale, so the field
/// is unchanged by uniform scaling of the mesh.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfDensityField<T> {
    pub values: Vec<T>,
    #[serde(skip)]
    mesh_id: u64,
}

impl<T: Real> HalfDensityField<T> {
    pub fn new(mesh: &TriMesh<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_vertices(),
                found: values.len(),
            });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("half-density samples must be finite".into()));
        }
        Ok(Self {
            values,
            mesh_id: mesh.connectivity_id(),
        })
    }

    pub fn zeros(mesh: &TriMesh<T>) -> Self {
        Self {
            values: vec![T::zero(); mesh.num_vertices()],
            mesh_id: mesh.connectivity_id(),
        }
    }

    /// Samples of the function `c`: `U_i = c·√Â_i`.
    pub fn constant(mesh: &TriMesh<T>, c: T) -> Self {
        let w = sqrt_normalized_areas(mesh);
        Self {
            values: w.into_iter().map(|s| s * c).collect(),
            mesh_id: mesh.connectivity_id(),
        }
    }

    /// Samples `U_i = f_i·√Â_i` of a per-vertex function `f`.
    pub fn from_function(mesh: &TriMesh<T>, f: &[T]) -> Result<Self> {
        if f.len() != mesh.num_vertices() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_vertices(),
                found: f.len(),
            });
        }
        let w = sqrt_normalized_areas(mesh);
        Self::new(mesh, f.iter().zip(w).map(|(&x, s)| x * s).collect())
    }

    /// Mean-free Gaussian bump centred on `axis` (as seen from the area
    /// centroid), `exp(−(1 − cos θ)/width)`, scaled to peak magnitude `amp`.
    pub fn lobe(mesh: &TriMesh<T>, axis: V3<T>, amp: T, width: T) -> Result<Self> {
        if !(width > T::zero()) || !(vec3::norm(axis) > T::zero()) {
            return Err(Error::InvalidParameter("lobe needs a nonzero axis and positive width".into()));
        }
        let dir = vec3::normalize(axis);
        let areas = vertex_areas(mesh);
        let total: T = areas.iter().copied().sum();
        let mut c = vec3::zero();
        for (v, &a) in areas.iter().enumerate() {
            vec3::add_assign(&mut c, vec3::scale(mesh.point(v), a / total));
        }
        let mut g: Vec<T> = (0..mesh.num_vertices())
            .map(|v| {
                let d = vec3::sub(mesh.point(v), c);
                let n = vec3::norm(d);
                let cos = if n > T::zero() { vec3::dot(d, dir) / n } else { T::zero() };
                (-(T::one() - cos) / width).exp()
            })
            .collect();
        let mean = g.iter().zip(&areas).map(|(&x, &a)| x * a).sum::<T>() / total;
        for x in &mut g {
            *x -= mean;
        }
        let peak = g.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
        if !(peak > T::zero()) {
            return Err(Error::InvalidParameter("lobe is constant on this mesh".into()));
        }
        for x in &mut g {
            *x = *x * amp / peak;
        }
        Self::from_function(mesh, &g)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn belongs_to(&self, mesh: &TriMesh<T>) -> bool {
        self.mesh_id == mesh.connectivity_id() && self.values.len() == mesh.num_vertices()
    }

    /// Per-vertex function `f_i = U_i / √Â_i`.
    pub fn function_values(&self, mesh: &TriMesh<T>) -> Result<Vec<T>> {
        if !self.belongs_to(mesh) {
            return Err(Error::MeshMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(sqrt_normalized_areas(mesh))
            .map(|(&u, s)| u / s)
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.mesh_id != other.mesh_id || self.len() != other.len() {
            return Err(Error::MeshMismatch);
        }
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| a + b).collect(),
            mesh_id: self.mesh_id,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&Self {
            values: other.values.iter().map(|&x| -x).collect(),
            mesh_id: other.mesh_id,
        })
    }

    pub fn l2_norm(&self) -> T {
        self.values.iter().map(|&x| x * x).sum::<T>().sqrt()
    }
}

/// `√(A_i / ℓ²)` with barycentric dual areas and `ℓ` the mesh length scale.
pub fn sqrt_normalized_areas<T: Real>(mesh: &TriMesh<T>) -> Vec<T> {
    let l2 = mesh.length_scale().powi(2);
    vertex_areas(mesh).into_iter().map(|a| (a / l2).sqrt()).collect()
}

/// Unit normal per vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalField<T> {
    pub normals: Vec<Quaternion<T>>,
}

impl<T: Real> NormalField<T> {
    /// Normalizes every vector; zero vectors are rejected.
    pub fn from_vectors(v: &[V3<T>]) -> Result<Self> {
        let mut normals = Vec::with_capacity(v.len());
        for &n in v {
            let l = vec3::norm(n);
            if !(l > T::zero()) || !l.is_finite() {
                return Err(Error::InvalidParameter("normal vectors must be nonzero".into()));
            }
            normals.push(Quaternion::from_vector(vec3::scale(n, T::one() / l)));
        }
        Ok(Self { normals })
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn vector(&self, v: usize) -> V3<T> {
        self.normals[v].vector()
    }
}
