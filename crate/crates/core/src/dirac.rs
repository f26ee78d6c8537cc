//! Discrete quaternionic Dirac operator with a half-density potential.
//!
//! Spinors live on vertices, the operator maps them to faces:
//!
//! ```text
//! (G ψ)_f = −1/(2A_f) Σ_{j∈f} e_j ψ_j + ⅓ Σ_{j∈f} (Ĥ_j − ρ_j) ψ_j
//! ```
//!
//! with `e_j` the edge of `f` opposite `j` (counter-clockwise), `Ĥ` the
//! dihedral mean curvature and `ρ_j = U_j/√A_j` the potential as a function.
//! The first sum annihilates constant spinors, so `G·1` reads off `Ĥ`. The
//! vertex operator is the hermitian form `Q = G* M_F G`, solved as
//! `Q ψ = μ M_V ψ`; reported Dirac eigenvalues are `λ = √μ`, the singular
//! values of `G`. All lengths are measured in units of the mesh length scale,
//! so spectra are unchanged by uniform scaling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::curvature::{dihedral_mean_curvature, face_areas, vertex_areas};
use crate::mesh::fields::sqrt_normalized_areas;
use crate::mesh::vec3;
use crate::mesh::{HalfDensityField, TriMesh};
use crate::quatnum::{low_spectrum, EigenOptions, QuatSparseOperator, QuatVector, Quaternion};
use crate::scalar::Real;

/// Per-vertex quaternion, normalized to `‖ψ‖²_A = Σ A_i` (normalized areas).
#[derive(Clone, Debug)]
pub struct SpinorField<T> {
    pub values: QuatVector<T>,
    mesh_id: u64,
}

impl<T: Real> SpinorField<T> {
    pub fn new(mesh: &TriMesh<T>, values: Vec<Quaternion<T>>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_vertices(),
                found: values.len(),
            });
        }
        Ok(Self {
            values: QuatVector(values),
            mesh_id: mesh.connectivity_id(),
        })
    }

    pub fn constant(mesh: &TriMesh<T>, q: Quaternion<T>) -> Self {
        Self {
            values: QuatVector::constant(mesh.num_vertices(), q),
            mesh_id: mesh.connectivity_id(),
        }
    }

    pub fn belongs_to(&self, mesh: &TriMesh<T>) -> bool {
        self.mesh_id == mesh.connectivity_id() && self.values.len() == mesh.num_vertices()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> Quaternion<T> {
        self.values.0[i]
    }

    /// `ψ · α`.
    pub fn right_mul(&self, alpha: Quaternion<T>) -> Self {
        Self {
            values: self.values.right_mul(alpha),
            mesh_id: self.mesh_id,
        }
    }

    /// `min |ψ_i| ≥ 1e−6 · mean |ψ_i|`.
    pub fn is_nonvanishing(&self) -> bool {
        let n = T::from_usize_lossy(self.len().max(1));
        let mags: Vec<T> = self.values.0.iter().map(|q| q.norm()).collect();
        let mean = mags.iter().copied().sum::<T>() / n;
        let min = mags.iter().copied().fold(T::infinity(), T::min);
        min >= T::lit(1e-6) * mean
    }

    /// Right-multiplies by the inverse polar factor of the first
    /// non-vanishing entry (vertex 0 unless it vanishes), which becomes a
    /// positive real number.
    pub fn gauge_fixed(&self) -> Self {
        let n = T::from_usize_lossy(self.len().max(1));
        let mean = self.values.0.iter().map(|q| q.norm()).sum::<T>() / n;
        let pivot = self
            .values
            .0
            .iter()
            .find(|q| q.norm() > T::lit(1e-6) * mean)
            .copied()
            .unwrap_or_else(Quaternion::one);
        self.right_mul(pivot.conj().normalized())
    }
}

/// The assembled vertex operator together with the face operator it came from.
#[derive(Clone, Debug)]
pub struct DiracAssembly<T> {
    /// `Q = G* M_F G`.
    pub operator: QuatSparseOperator<T>,
    /// Normalized vertex areas `Â_i`.
    pub mass: Vec<T>,
    pub potential: HalfDensityField<T>,
    face_mass: Vec<T>,
    /// Three `(vertex, coefficient)` entries per face.
    face_rows: Vec<[(usize, Quaternion<T>); 3]>,
    mesh_id: u64,
}

impl<T: Real> DiracAssembly<T> {
    pub fn dimension(&self) -> usize {
        self.mass.len()
    }

    pub fn belongs_to(&self, mesh: &TriMesh<T>) -> bool {
        self.mesh_id == mesh.connectivity_id() && self.mass.len() == mesh.num_vertices()
    }

    /// Face values `G ψ`.
    pub fn apply_face(&self, psi: &QuatVector<T>) -> Result<Vec<Quaternion<T>>> {
        if psi.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: psi.len(),
            });
        }
        Ok(self
            .face_rows
            .iter()
            .map(|row| row.iter().map(|&(j, q)| q * psi.0[j]).sum())
            .collect())
    }

    /// `M_V⁻¹ G* M_F g`: pulls face values back to vertices.
    pub fn face_to_vertex(&self, g: &[Quaternion<T>]) -> Vec<Quaternion<T>> {
        let mut out = vec![Quaternion::zero(); self.dimension()];
        for ((row, &gf), &af) in self.face_rows.iter().zip(g).zip(&self.face_mass) {
            for &(j, q) in row {
                out[j] += (q.conj() * gf).scale(af);
            }
        }
        out.iter().zip(&self.mass).map(|(q, &a)| q.scale(T::one() / a)).collect()
    }

    /// `Σ_f A_f |(Gψ)_f|² / Σ_i A_i |ψ_i|²`, the Rayleigh quotient of `μ`.
    pub fn rayleigh_quotient(&self, psi: &QuatVector<T>) -> Result<T> {
        let g = self.apply_face(psi)?;
        let num: T = g.iter().zip(&self.face_mass).map(|(q, &a)| q.norm_sqr() * a).sum();
        Ok(num / psi.norm_sqr(&self.mass))
    }
}

/// Assembles `G` and `Q` for the mesh with potential `U`.
pub fn assemble_dirac<T: Real>(m: &TriMesh<T>, potential: &HalfDensityField<T>) -> Result<DiracAssembly<T>> {
    if potential.len() != m.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: m.num_vertices(),
            found: potential.len(),
        });
    }
    if !potential.belongs_to(m) {
        return Err(Error::MeshMismatch);
    }
    let ell = m.length_scale();
    let inv_l = T::one() / ell;
    let l2 = ell * ell;
    let mass: Vec<T> = vertex_areas(m).into_iter().map(|a| a / l2).collect();
    let face_mass: Vec<T> = face_areas(m).into_iter().map(|a| a / l2).collect();
    let sqrt_a = sqrt_normalized_areas(m);
    let h_hat: Vec<T> = dihedral_mean_curvature(m).into_iter().map(|h| h * ell).collect();
    let scalar: Vec<T> = (0..m.num_vertices())
        .map(|i| h_hat[i] - potential.values[i] / sqrt_a[i])
        .collect();
    let third = T::one() / T::lit(3.0);
    let mut face_rows = Vec::with_capacity(m.num_faces());
    for f in 0..m.num_faces() {
        let af = face_mass[f];
        if !(af > T::zero()) {
            return Err(Error::DegenerateFace { face: f });
        }
        let c = -T::one() / (T::lit(2.0) * af);
        let vs = m.face(f);
        let mut row = [(0, Quaternion::zero()); 3];
        for k in 0..3 {
            // Edge opposite corner k, oriented counter-clockwise.
            let e = vec3::scale(
                vec3::sub(m.point(vs[(k + 2) % 3]), m.point(vs[(k + 1) % 3])),
                inv_l,
            );
            let q = Quaternion::new(scalar[vs[k]] * third, e[0] * c, e[1] * c, e[2] * c);
            row[k] = (vs[k], q);
        }
        face_rows.push(row);
    }
    let mut entries = Vec::with_capacity(9 * m.num_faces());
    for (row, &af) in face_rows.iter().zip(&face_mass) {
        for &(i, qi) in row {
            for &(j, qj) in row {
                if i <= j {
                    entries.push((i, j, (qi.conj() * qj).scale(af)));
                }
            }
        }
    }
    let operator = QuatSparseOperator::hermitian_from_upper(m.num_vertices(), entries)?;
    Ok(DiracAssembly {
        operator,
        mass,
        potential: potential.clone(),
        face_mass,
        face_rows,
        mesh_id: m.connectivity_id(),
    })
}

/// Dihedral mean-curvature half-density `Ĥ_i √Â_i`, the potential for which
/// the constant spinor lies exactly in the kernel.
pub fn intrinsic_half_density<T: Real>(m: &TriMesh<T>) -> Result<HalfDensityField<T>> {
    let ell = m.length_scale();
    let values = dihedral_mean_curvature(m)
        .into_iter()
        .zip(sqrt_normalized_areas(m))
        .map(|(h, s)| h * ell * s)
        .collect();
    HalfDensityField::new(m, values)
}

/// Mean-curvature half-density read off from the zero-potential operator
/// applied to the constant spinor: `U_i = Re(M_V⁻¹ G* M_F G·1)_i · √Â_i`.
pub fn dirac_half_density<T: Real>(m: &TriMesh<T>) -> Result<HalfDensityField<T>> {
    let asm = assemble_dirac(m, &HalfDensityField::zeros(m))?;
    potential_readout(&asm, m)
}

/// The potential read from `G·1` of an assembly, as a half-density.
pub fn potential_readout<T: Real>(asm: &DiracAssembly<T>, m: &TriMesh<T>) -> Result<HalfDensityField<T>> {
    if !asm.belongs_to(m) {
        return Err(Error::MeshMismatch);
    }
    let one = QuatVector::constant(asm.dimension(), Quaternion::one());
    let g = asm.apply_face(&one)?;
    // Project face values onto vertex functions with the barycentric
    // interpolation: r = M_V⁻¹ Pᵀ M_F g.
    let third = T::one() / T::lit(3.0);
    let mut r = vec![T::zero(); asm.dimension()];
    for ((row, gf), &af) in asm.face_rows.iter().zip(&g).zip(&asm.face_mass) {
        for &(j, _) in row {
            r[j] += gf.w * af * third;
        }
    }
    let values = r
        .iter()
        .zip(&asm.mass)
        .map(|(&x, &a)| x / a * a.sqrt())
        .collect();
    HalfDensityField::new(m, values)
}

#[derive(Clone, Debug)]
pub struct DiracSolution<T> {
    pub spinor: SpinorField<T>,
    /// `λ = √μ ≥ 0`.
    pub eigenvalue: T,
    /// Relative residual of `Q ψ = μ M_V ψ` in the `M_V` norm.
    pub residual: T,
    /// `false` when the spinor vanishes somewhere; the integrated surface may
    /// then degenerate.
    pub immersive: bool,
}

pub fn solve_dirac<T: Real>(asm: &DiracAssembly<T>, opts: &EigenOptions<T>) -> Result<DiracSolution<T>> {
    let pair = low_spectrum(&asm.operator, &asm.mass, 1, opts)?.remove(0);
    let spinor = SpinorField {
        values: pair.vector,
        mesh_id: asm.mesh_id,
    }
    .gauge_fixed();
    let immersive = spinor.is_nonvanishing();
    Ok(DiracSolution {
        eigenvalue: pair.value.max(T::zero()).sqrt(),
        residual: pair.residual,
        immersive,
        spinor,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport<T> {
    /// Number of `λ ≤ zero_tol` among the reported eigenvalues.
    pub count: usize,
    pub zero_tol: T,
    /// Smallest Dirac eigenvalues `λ = √μ`, ascending.
    pub eigenvalues: Vec<T>,
    pub residuals: Vec<T>,
    /// First eigenvalue above the threshold divided by the largest below it,
    /// `None` when either side is empty or the ratio is unbounded.
    pub gap_ratio: Option<T>,
}

/// How many of the `min(8, n)` smallest Dirac eigenvalues are `≤ zero_tol`.
pub fn kernel_dimension<T: Real>(
    asm: &DiracAssembly<T>,
    zero_tol: T,
    opts: &EigenOptions<T>,
) -> Result<KernelReport<T>> {
    if !(zero_tol >= T::zero()) {
        return Err(Error::InvalidParameter("zero tolerance must be nonnegative".into()));
    }
    let k = asm.dimension().min(8);
    let pairs = low_spectrum(&asm.operator, &asm.mass, k, opts)?;
    let eigenvalues: Vec<T> = pairs.iter().map(|p| p.value.max(T::zero()).sqrt()).collect();
    let residuals = pairs.iter().map(|p| p.residual).collect();
    let count = eigenvalues.iter().filter(|&&l| l <= zero_tol).count();
    let gap_ratio = if count > 0 && count < eigenvalues.len() {
        let below = eigenvalues[count - 1];
        let above = eigenvalues[count];
        if below > T::zero() {
            Some(above / below)
        } else {
            None
        }
    } else {
        None
    };
    Ok(KernelReport {
        count,
        zero_tol,
        eigenvalues,
        residuals,
        gap_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate::icosphere;
    use crate::mesh::mean_curvature_half_density;

    fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
        let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
        let n: f64 = b.iter().map(|y| y * y).sum();
        (d / n).sqrt()
    }

    #[test]
    fn constant_spinor_is_exact_without_potential_mismatch() {
        let m: TriMesh<f64> = icosphere(2).unwrap();
        // Potential equal to the dihedral half-density: G·1 = 0 exactly.
        let u = intrinsic_half_density(&m).unwrap();
        let asm = assemble_dirac(&m, &u).unwrap();
        let one = QuatVector::constant(m.num_vertices(), Quaternion::one());
        assert!(asm.rayleigh_quotient(&one).unwrap() < 1e-20);
    }

    #[test]
    fn readout_tracks_cotan_half_density() {
        let mut errs = Vec::new();
        for level in 2..=4 {
            let m: TriMesh<f64> = icosphere(level).unwrap();
            let d = dirac_half_density(&m).unwrap();
            let c = mean_curvature_half_density(&m).unwrap();
            errs.push(rel_l2(&d.values, &c.values));
        }
        assert!(errs[1] <= 0.05, "{errs:?}");
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn operator_is_exactly_hermitian() {
        let m: TriMesh<f64> = icosphere(1).unwrap();
        let asm = assemble_dirac(&m, &mean_curvature_half_density(&m).unwrap()).unwrap();
        assert_eq!(asm.operator.hermitian_defect(), 0.0);
        assert!(asm.operator.is_hermitian());
    }

    #[test]
    fn own_potential_has_near_kernel() {
        let m: TriMesh<f64> = icosphere(2).unwrap();
        let asm = assemble_dirac(&m, &mean_curvature_half_density(&m).unwrap()).unwrap();
        let s = solve_dirac(&asm, &EigenOptions::default()).unwrap();
        assert!(s.eigenvalue <= 5e-2, "{}", s.eigenvalue);
        assert!(s.residual <= 1e-10);
        assert!(s.immersive);
        let p0 = s.spinor.get(0);
        assert!(p0.w > 0.0 && p0.imag_norm() <= 1e-12 * p0.w);
    }

    #[test]
    fn rejects_foreign_potential() {
        let a: TriMesh<f64> = icosphere(1).unwrap();
        let b: TriMesh<f64> = icosphere(2).unwrap();
        assert!(assemble_dirac(&a, &HalfDensityField::zeros(&b)).is_err());
    }
}
