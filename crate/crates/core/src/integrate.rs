//! From spinors to surfaces: the edge one-form `ψ̄ e ψ`, its least-squares
//! integration, and the complete prescribed-curvature transform.

use std::collections::VecDeque;

use serde::Serialize;

use crate::dirac::{assemble_dirac, intrinsic_half_density, solve_dirac, SpinorField};
use crate::error::{Error, Result};
use crate::mesh::curvature::{cotan_weights, vertex_areas};
use crate::mesh::vec3::{self, V3};
use crate::mesh::{mean_curvature_half_density, HalfDensityField, TriMesh};
use crate::quatnum::sparse::{factor_rcm, CsrMatrix};
use crate::quatnum::{EigenOptions, Quaternion};
use crate::scalar::Real;

/// Imaginary quaternion per edge, stored along the canonical halfedge of
/// each edge; the opposite direction reads the negated value.
#[derive(Clone, Debug)]
pub struct EdgeOneForm<T> {
    values: Vec<Quaternion<T>>,
    canonical: Vec<usize>,
    mesh_id: u64,
}

impl<T: Real> EdgeOneForm<T> {
    /// One-form from the value on each canonical halfedge (edge order).
    pub fn from_edge_values(m: &TriMesh<T>, values: Vec<Quaternion<T>>) -> Result<Self> {
        if values.len() != m.num_edges() {
            return Err(Error::DimensionMismatch {
                expected: m.num_edges(),
                found: values.len(),
            });
        }
        Ok(Self {
            values,
            canonical: (0..m.num_edges()).map(|e| m.edge_halfedge(e)).collect(),
            mesh_id: m.connectivity_id(),
        })
    }

    /// `ω = dF` for the positions of `m`.
    pub fn exact(m: &TriMesh<T>) -> Self {
        let v = (0..m.num_edges())
            .map(|e| Quaternion::from_vector(m.he_vector(m.edge_halfedge(e))))
            .collect();
        Self::from_edge_values(m, v).expect("edge count matches")
    }

    pub fn zero(m: &TriMesh<T>) -> Self {
        Self::from_edge_values(m, vec![Quaternion::zero(); m.num_edges()]).expect("edge count matches")
    }

    pub fn belongs_to(&self, m: &TriMesh<T>) -> bool {
        self.mesh_id == m.connectivity_id() && self.values.len() == m.num_edges()
    }

    pub fn edge_values(&self) -> &[Quaternion<T>] {
        &self.values
    }

    /// Value along halfedge `h` of `m`.
    pub fn along(&self, m: &TriMesh<T>, h: usize) -> Quaternion<T> {
        let e = m.he_edge(h);
        if self.canonical[e] == h {
            self.values[e]
        } else {
            -self.values[e]
        }
    }

    /// `|ω(ij) + ω(jk) + ω(ki)|` per face.
    pub fn closedness(&self, m: &TriMesh<T>) -> Vec<T> {
        (0..m.num_faces())
            .map(|f| (0..3).map(|k| self.along(m, 3 * f + k)).sum::<Quaternion<T>>().norm())
            .collect()
    }

    /// Per-face closedness relative to the RMS edge value, as an RMS.
    pub fn closedness_rms(&self, m: &TriMesh<T>) -> T {
        let c = self.closedness(m);
        let scale = rms(&self.values.iter().map(|q| q.norm()).collect::<Vec<_>>());
        if scale > T::zero() {
            rms(&c) / scale
        } else {
            T::zero()
        }
    }

    /// Largest `|Re ω| / |ω|` over edges.
    pub fn max_real_fraction(&self) -> T {
        self.values
            .iter()
            .filter(|q| q.norm() > T::zero())
            .map(|q| q.w.abs() / q.norm())
            .fold(T::zero(), T::max)
    }
}

fn rms<T: Real>(x: &[T]) -> T {
    if x.is_empty() {
        return T::zero();
    }
    (x.iter().map(|&v| v * v).sum::<T>() / T::from_usize_lossy(x.len())).sqrt()
}

/// `ω(ij) = ⅓ψ̄ᵢeψᵢ + ⅙(ψ̄ᵢeψⱼ + ψ̄ⱼeψᵢ) + ⅓ψ̄ⱼeψⱼ` with `e = x_j − x_i`.
pub fn spinor_one_form<T: Real>(m: &TriMesh<T>, psi: &SpinorField<T>) -> Result<EdgeOneForm<T>> {
    if !psi.belongs_to(m) {
        return Err(Error::MeshMismatch);
    }
    let third = T::one() / T::lit(3.0);
    let sixth = T::one() / T::lit(6.0);
    let values = (0..m.num_edges())
        .map(|e| {
            let h = m.edge_halfedge(e);
            let (i, j) = (m.tail(h), m.head(h));
            let ed = Quaternion::from_vector(m.he_vector(h));
            let (pi, pj) = (psi.get(i), psi.get(j));
            let (ci, cj) = (pi.conj(), pj.conj());
            (ci * ed * pi).scale(third)
                + (ci * ed * pj + cj * ed * pi).scale(sixth)
                + (cj * ed * pj).scale(third)
        })
        .collect();
    EdgeOneForm::from_edge_values(m, values)
}

fn is_connected<T: Real>(m: &TriMesh<T>) -> bool {
    let n = m.num_vertices();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for u in m.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    count == n
}

/// Integrated surface and the cotan-weighted RMS of `F_j − F_i − ω(ij)`.
#[derive(Clone, Debug)]
pub struct Integration<T> {
    pub mesh: TriMesh<T>,
    pub exactness_residual: T,
}

/// Minimizes `Σ w_ij |F_j − F_i − ω(ij)|²` over positions (cotan weights),
/// then moves the area-weighted centroid to the origin.
pub fn integrate_one_form<T: Real>(m: &TriMesh<T>, omega: &EdgeOneForm<T>) -> Result<Integration<T>> {
    if !omega.belongs_to(m) {
        return Err(Error::MeshMismatch);
    }
    if !is_connected(m) {
        return Err(Error::SingularSystem);
    }
    let n = m.num_vertices();
    let w = cotan_weights(m)?;
    let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
    let mut rhs = vec![vec3::zero::<T>(); n];
    for e in 0..m.num_edges() {
        let (i, j) = m.edge_vertices(e);
        let we = w[e];
        let om = omega.values[e].vector();
        rows[i].push((i, we));
        rows[j].push((j, we));
        rows[i].push((j, -we));
        rows[j].push((i, -we));
        // (LF)_i = −Σ_j w_ij ω(i→j)
        vec3::add_assign(&mut rhs[i], vec3::scale(om, -we));
        vec3::add_assign(&mut rhs[j], vec3::scale(om, we));
    }
    // Pin vertex 0 at the origin.
    for row in rows.iter_mut() {
        row.retain(|&(c, _)| c != 0);
    }
    rows[0] = vec![(0, T::one())];
    rhs[0] = vec3::zero();
    let lap = CsrMatrix::from_rows(rows);
    let chol = factor_rcm(&lap).map_err(|_| Error::SingularSystem)?;
    let mut pts = vec![vec3::zero::<T>(); n];
    for k in 0..3 {
        let b: Vec<T> = rhs.iter().map(|r| r[k]).collect();
        let x = chol.solve(&b);
        for (p, xv) in pts.iter_mut().zip(x) {
            p[k] = xv;
        }
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for e in 0..m.num_edges() {
        let (i, j) = m.edge_vertices(e);
        let r = vec3::sub(vec3::sub(pts[j], pts[i]), omega.values[e].vector());
        num += w[e] * vec3::dot(r, r);
        den += w[e];
    }
    let exactness_residual = if den > T::zero() {
        (num.max(T::zero()) / den).sqrt()
    } else {
        T::zero()
    };
    let out = recentre(m, pts)?;
    Ok(Integration {
        mesh: out,
        exactness_residual,
    })
}

/// New positions with the area-weighted centroid moved to the origin. A
/// collapsed point set (all positions equal) is placed at the origin.
fn recentre<T: Real>(m: &TriMesh<T>, pts: Vec<V3<T>>) -> Result<TriMesh<T>> {
    let mut moved = m.clone();
    let probe = m.with_points(pts.clone());
    let areas = match &probe {
        Ok(p) => vertex_areas(p),
        Err(_) => vec![T::one(); pts.len()],
    };
    let total: T = areas.iter().copied().sum();
    let mut c = vec3::zero();
    for (p, &a) in pts.iter().zip(&areas) {
        vec3::add_assign(&mut c, vec3::scale(*p, a / total));
    }
    let shifted: Vec<V3<T>> = pts.iter().map(|&p| vec3::sub(p, c)).collect();
    match probe {
        Ok(_) => m.with_points(shifted),
        Err(Error::DegenerateFace { .. }) => {
            moved.set_points_unchecked(shifted);
            Ok(moved)
        }
        Err(e) => Err(e),
    }
}

/// Singular-value ratio `σ₁/σ₂ ≥ 1` of the linear map taking each face of
/// `a` to the corresponding face of `b`.
pub fn quasi_conformal_distortion<T: Real>(a: &TriMesh<T>, b: &TriMesh<T>) -> Result<Vec<T>> {
    if !a.same_connectivity(b) {
        return Err(Error::ConnectivityMismatch);
    }
    let frame = |m: &TriMesh<T>, f: usize| -> [[T; 2]; 2] {
        let [p0, p1, p2] = m.face_points(f);
        let e1 = vec3::sub(p1, p0);
        let e2 = vec3::sub(p2, p0);
        let x = vec3::normalize(e1);
        let n = vec3::cross(e1, e2);
        let nl = vec3::norm(n);
        let y = if nl > T::zero() {
            vec3::cross(vec3::scale(n, T::one() / nl), x)
        } else {
            vec3::zero()
        };
        [[vec3::dot(e1, x), vec3::dot(e2, x)], [vec3::dot(e1, y), vec3::dot(e2, y)]]
    };
    Ok((0..a.num_faces())
        .map(|f| {
            let s = frame(a, f);
            let t = frame(b, f);
            let det_s = s[0][0] * s[1][1] - s[0][1] * s[1][0];
            // t · s⁻¹
            let inv = [
                [s[1][1] / det_s, -s[0][1] / det_s],
                [-s[1][0] / det_s, s[0][0] / det_s],
            ];
            let mut mm = [[T::zero(); 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    mm[r][c] = t[r][0] * inv[0][c] + t[r][1] * inv[1][c];
                }
            }
            // Split into conformal and anti-conformal parts; σ = q ± r.
            let half = T::lit(0.5);
            let e = (mm[0][0] + mm[1][1]) * half;
            let f = (mm[0][0] - mm[1][1]) * half;
            let g = (mm[1][0] + mm[0][1]) * half;
            let h = (mm[1][0] - mm[0][1]) * half;
            let q = e.hypot(h);
            let r = f.hypot(g);
            if !((q - r).abs() > T::zero()) {
                return T::infinity();
            }
            (q + r) / (q - r).abs()
        })
        .collect())
}

/// Closed edge loops generating first homology, by tree–cotree
/// decomposition. Each loop is a list of halfedges.
pub fn homology_generators<T: Real>(m: &TriMesh<T>) -> Vec<Vec<usize>> {
    let n = m.num_vertices();
    let ne = m.num_edges();
    // Primal BFS tree from vertex 0; parent halfedge points towards the root.
    let mut parent_he = vec![usize::MAX; n];
    let mut in_tree = vec![false; ne];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for h in m.outgoing(v) {
            let u = m.head(h);
            if !seen[u] {
                seen[u] = true;
                parent_he[u] = m.twin(h);
                in_tree[m.he_edge(h)] = true;
                queue.push_back(u);
            }
        }
    }
    // Dual BFS tree over faces through edges not in the primal tree.
    let nf = m.num_faces();
    let mut in_cotree = vec![false; ne];
    let mut fseen = vec![false; nf];
    let mut fq = VecDeque::from([0usize]);
    fseen[0] = true;
    while let Some(f) = fq.pop_front() {
        for k in 0..3 {
            let h = 3 * f + k;
            let e = m.he_edge(h);
            if in_tree[e] {
                continue;
            }
            let g = m.twin(h) / 3;
            if !fseen[g] {
                fseen[g] = true;
                in_cotree[e] = true;
                fq.push_back(g);
            }
        }
    }
    let path_to_root = |mut v: usize| {
        let mut out = Vec::new();
        while parent_he[v] != usize::MAX {
            let h = parent_he[v];
            out.push(h);
            v = m.head(h);
        }
        out
    };
    let mut loops = Vec::new();
    for e in 0..ne {
        if in_tree[e] || in_cotree[e] {
            continue;
        }
        let h = m.edge_halfedge(e);
        // root → tail, h, head → root
        let mut lp: Vec<usize> = path_to_root(m.tail(h)).into_iter().rev().map(|x| m.twin(x)).collect();
        lp.push(h);
        lp.extend(path_to_root(m.head(h)));
        loops.push(lp);
    }
    loops
}

/// Sum of `ω` along each homology generator.
pub fn periods<T: Real>(m: &TriMesh<T>, omega: &EdgeOneForm<T>) -> Result<Vec<V3<T>>> {
    if !omega.belongs_to(m) {
        return Err(Error::MeshMismatch);
    }
    Ok(homology_generators(m)
        .iter()
        .map(|lp| lp.iter().map(|&h| omega.along(m, h)).sum::<Quaternion<T>>().vector())
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformReport<T> {
    /// Dirac eigenvalue `λ` of the solved spinor.
    pub eigenvalue: T,
    pub eigen_residual: T,
    /// RMS per-face closedness relative to the RMS edge value.
    pub closedness_rms: T,
    /// Cotan-weighted RMS integration residual relative to the RMS `|ω|`.
    pub exactness_rms: T,
    pub qc_mean: T,
    pub qc_max: T,
    /// `‖(U_new − U_old) − ρ‖ / ‖ρ‖`, or relative to `‖U_old‖` when `ρ ≈ 0`.
    pub halfdensity_l2_error: T,
    /// Magnitude of `ω` summed over each homology generator, relative to the
    /// RMS `|ω|`.
    pub periods: Vec<T>,
    pub immersive: bool,
}

#[derive(Clone, Debug)]
pub struct SpinTransform<T> {
    pub mesh: TriMesh<T>,
    pub spinor: SpinorField<T>,
    pub report: TransformReport<T>,
}

/// Conformal deformation changing the mean-curvature half-density by `ρ`.
pub fn spin_transform<T: Real>(
    m: &TriMesh<T>,
    rho: &HalfDensityField<T>,
    opts: &EigenOptions<T>,
) -> Result<SpinTransform<T>> {
    if !rho.belongs_to(m) {
        return Err(Error::MeshMismatch);
    }
    let potential = intrinsic_half_density(m)?.add(rho)?;
    let asm = assemble_dirac(m, &potential)?;
    let sol = solve_dirac(&asm, opts)?;
    transform_with_spinor(m, rho, &sol.spinor, sol.eigenvalue, sol.residual, sol.immersive)
}

/// The integration half of [`spin_transform`] for a given spinor.
pub fn transform_with_spinor<T: Real>(
    m: &TriMesh<T>,
    rho: &HalfDensityField<T>,
    psi: &SpinorField<T>,
    eigenvalue: T,
    eigen_residual: T,
    immersive: bool,
) -> Result<SpinTransform<T>> {
    let omega = spinor_one_form(m, psi)?;
    let integ = integrate_one_form(m, &omega)?;
    let scale = rms(&omega.values.iter().map(|q| q.norm()).collect::<Vec<_>>());
    let rel = |x: T| if scale > T::zero() { x / scale } else { T::zero() };
    let qc = quasi_conformal_distortion(m, &integ.mesh)?;
    let qc_mean = qc.iter().copied().sum::<T>() / T::from_usize_lossy(qc.len());
    let qc_max = qc.iter().copied().fold(T::zero(), T::max);
    let halfdensity_l2_error = match mean_curvature_half_density(&integ.mesh) {
        Ok(u_new) => {
            let u_old = mean_curvature_half_density(m)?;
            let d = u_new.sub(&u_old)?.sub(rho)?;
            let rn = rho.l2_norm();
            let denom = if rn > T::lit(1e-12) * u_old.l2_norm() {
                rn
            } else {
                u_old.l2_norm()
            };
            d.l2_norm() / denom
        }
        Err(_) => T::infinity(),
    };
    let periods = periods(m, &omega)?
        .into_iter()
        .map(|p| rel(vec3::norm(p)))
        .collect();
    let report = TransformReport {
        eigenvalue,
        eigen_residual,
        closedness_rms: omega.closedness_rms(m),
        exactness_rms: rel(integ.exactness_residual),
        qc_mean,
        qc_max,
        halfdensity_l2_error,
        periods,
        immersive,
    };
    Ok(SpinTransform {
        mesh: integ.mesh,
        spinor: psi.clone(),
        report,
    })
}
