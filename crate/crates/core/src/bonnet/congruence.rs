use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::vec3::{self, V3};
use crate::mesh::TriMesh;
use crate::quatnum::dense::symmetric_eigen;
use crate::quatnum::Quaternion;
use crate::scalar::Real;

/// `x ↦ R(σx) + t` with `σ = −1` when `reflection` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RigidMotion<T> {
    pub rotation: Quaternion<T>,
    pub translation: [T; 3],
    pub reflection: bool,
}

impl<T: Real> RigidMotion<T> {
    pub fn identity() -> Self {
        Self {
            rotation: Quaternion::one(),
            translation: [T::zero(); 3],
            reflection: false,
        }
    }

    pub fn apply(&self, p: V3<T>) -> V3<T> {
        let p = if self.reflection { vec3::scale(p, -T::one()) } else { p };
        vec3::add(self.rotation.rotate(Quaternion::from_vector(p)).vector(), self.translation)
    }

    pub fn inverse(&self) -> Self {
        let r = self.rotation.conj();
        let mut t = r.rotate(Quaternion::from_vector(self.translation)).vector();
        if !self.reflection {
            t = vec3::scale(t, -T::one());
        }
        Self {
            rotation: r,
            translation: t,
            reflection: self.reflection,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Congruence<T> {
    pub congruent: bool,
    /// Best motion carrying the first mesh onto the second.
    pub motion: RigidMotion<T>,
    pub rms: T,
    /// `rms` divided by the bounding radius of the first mesh.
    pub relative_rms: T,
    pub tolerance: T,
}

/// Relative tolerance on the alignment RMS for calling two meshes congruent.
pub const CONGRUENCE_TOL: f64 = 1e-6;

fn centroid<T: Real>(p: &[V3<T>]) -> V3<T> {
    let mut c = vec3::zero();
    for &x in p {
        vec3::add_assign(&mut c, x);
    }
    vec3::scale(c, T::one() / T::from_usize_lossy(p.len()))
}

fn centered<T: Real>(p: &[V3<T>]) -> (V3<T>, Vec<V3<T>>) {
    let c = centroid(p);
    (c, p.iter().map(|&x| vec3::sub(x, c)).collect())
}

/// Rotation maximizing `Σ qᵢ · R pᵢ` for centred sets, by Horn's quaternion
/// eigenproblem.
fn horn_rotation<T: Real>(p: &[V3<T>], q: &[V3<T>]) -> Quaternion<T> {
    let mut s = [[T::zero(); 3]; 3];
    for (a, b) in p.iter().zip(q) {
        for i in 0..3 {
            for j in 0..3 {
                s[i][j] += a[i] * b[j];
            }
        }
    }
    let (sxx, sxy, sxz) = (s[0][0], s[0][1], s[0][2]);
    let (syx, syy, syz) = (s[1][0], s[1][1], s[1][2]);
    let (szx, szy, szz) = (s[2][0], s[2][1], s[2][2]);
    let n = vec![
        vec![sxx + syy + szz, syz - szy, szx - sxz, sxy - syx],
        vec![syz - szy, sxx - syy - szz, sxy + syx, szx + sxz],
        vec![szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy],
        vec![sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz],
    ];
    let (_, vecs) = symmetric_eigen(&n);
    let c = 3;
    Quaternion::new(vecs[0][c], vecs[1][c], vecs[2][c], vecs[3][c]).normalized()
}

fn check_spread<T: Real>(p: &[V3<T>]) -> Result<()> {
    // Eigenvalues ascend; the middle one must not vanish.
    let mut c = vec![vec![T::zero(); 3]; 3];
    for a in p {
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] += a[i] * a[j];
            }
        }
    }
    let (vals, _) = symmetric_eigen(&c);
    if !(vals[2] > T::zero()) || !(vals[1] > vals[2] * T::lit(1e-14)) {
        return Err(Error::DegenerateCovariance);
    }
    Ok(())
}

fn rms<T: Real>(p: &[V3<T>], q: &[V3<T>], f: impl Fn(V3<T>) -> V3<T>) -> T {
    let s: T = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| {
            let d = vec3::sub(f(a), b);
            vec3::dot(d, d)
        })
        .sum();
    (s / T::from_usize_lossy(p.len())).sqrt()
}

fn best_motion<T: Real>(p: &[V3<T>], q: &[V3<T>], reflection: bool) -> Result<(RigidMotion<T>, T)> {
    let p: Vec<V3<T>> = if reflection {
        p.iter().map(|&x| vec3::scale(x, -T::one())).collect()
    } else {
        p.to_vec()
    };
    let (cp, pc) = centered(&p);
    let (cq, qc) = centered(q);
    check_spread(&pc)?;
    let r = horn_rotation(&pc, &qc);
    let t = vec3::sub(cq, r.rotate(Quaternion::from_vector(cp)).vector());
    let motion = RigidMotion {
        rotation: r,
        translation: t,
        reflection,
    };
    let err = rms(&p, q, |x| vec3::add(r.rotate(Quaternion::from_vector(x)).vector(), t));
    Ok((motion, err))
}

fn check_pair<T: Real>(m1: &TriMesh<T>, m2: &TriMesh<T>) -> Result<()> {
    if m1.num_vertices() != m2.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: m1.num_vertices(),
            found: m2.num_vertices(),
        });
    }
    Ok(())
}

/// Least-squares rigid alignment of corresponding vertices.
pub fn congruence_check<T: Real>(m1: &TriMesh<T>, m2: &TriMesh<T>, allow_reflection: bool) -> Result<Congruence<T>> {
    check_pair(m1, m2)?;
    let (p, q) = (m1.points(), m2.points());
    let mut best = best_motion(&p, &q, false)?;
    if allow_reflection {
        let r = best_motion(&p, &q, true)?;
        if r.1 < best.1 {
            best = r;
        }
    }
    let radius = m1.bounding_radius();
    let tol = T::lit(CONGRUENCE_TOL);
    let relative = best.1 / radius;
    Ok(Congruence {
        congruent: relative <= tol,
        motion: best.0,
        rms: best.1,
        relative_rms: relative,
        tolerance: tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SimilarityAlignment<T> {
    pub scale: T,
    pub motion: RigidMotion<T>,
    /// RMS of `s·R x + t − y`.
    pub rms: T,
    /// `rms` divided by the bounding radius of the target.
    pub relative_rms: T,
}

/// Best similarity `x ↦ s R x + t` carrying `m1` onto `m2` (no reflection).
pub fn similarity_align<T: Real>(m1: &TriMesh<T>, m2: &TriMesh<T>) -> Result<SimilarityAlignment<T>> {
    check_pair(m1, m2)?;
    let (p, q) = (m1.points(), m2.points());
    let (cp, pc) = centered(&p);
    let (cq, qc) = centered(&q);
    check_spread(&pc)?;
    let r = horn_rotation(&pc, &qc);
    let mut num = T::zero();
    let mut den = T::zero();
    for (a, b) in pc.iter().zip(&qc) {
        num += vec3::dot(*b, r.rotate(Quaternion::from_vector(*a)).vector());
        den += vec3::dot(*a, *a);
    }
    let s = num / den;
    let t = vec3::sub(cq, vec3::scale(r.rotate(Quaternion::from_vector(cp)).vector(), s));
    let err = rms(&p, &q, |x| {
        vec3::add(vec3::scale(r.rotate(Quaternion::from_vector(x)).vector(), s), t)
    });
    Ok(SimilarityAlignment {
        scale: s,
        motion: RigidMotion {
            rotation: r,
            translation: t,
            reflection: false,
        },
        rms: err,
        relative_rms: err / m2.bounding_radius(),
    })
}
