//! Smallest-magnitude eigenpairs of hermitian quaternionic operators.
//!
//! Solves `A ψ = λ W ψ` with `W` a positive diagonal weight. The iteration is
//! shifted inverse (subspace) iteration on the real representation:
//! `A + σW` is factored once by envelope Cholesky with a tiny shift `σ`. If
//! that factorization fails the operator is indefinite and the iteration runs
//! on `A W⁻¹ A + σ²W` instead, which has the same eigenvectors and the
//! squared eigenvalues. Every iterate is Rayleigh–Ritz projected onto `A`
//! itself, so returned eigenvalues carry their sign.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quatnum::dense::symmetric_eigen;
use crate::quatnum::sparse::{factor_blocks, CsrMatrix, SkylineCholesky};
use crate::quatnum::{QuatSparseOperator, QuatVector, Quaternion};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EigenOptions<T> {
    /// Relative residual tolerance `‖W⁻¹Aψ − λψ‖_W ≤ tol ‖ψ‖_W`.
    pub tol: T,
    pub max_iter: usize,
    /// Seed of the random start block.
    pub seed: u64,
}

impl<T: Real> Default for EigenOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-10),
            max_iter: 1000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair<T> {
    pub value: T,
    /// Normalized so that `‖ψ‖²_W = Σ W`.
    pub vector: QuatVector<T>,
    /// `‖W⁻¹Aψ − λψ‖_W / ‖ψ‖_W`.
    pub residual: T,
    /// Imaginary part of the quaternionic Rayleigh quotient, relative to `‖ψ‖²_W`.
    pub imag_residual: T,
}

/// Smallest-magnitude eigenpair of `A ψ = λ W ψ`.
pub fn smallest_eigenpair<T: Real>(
    a: &QuatSparseOperator<T>,
    weights: &[T],
    opts: &EigenOptions<T>,
) -> Result<Eigenpair<T>> {
    low_spectrum(a, weights, 1, opts).map(|mut v| v.remove(0))
}

/// The `k` smallest-magnitude eigenpairs, sorted by `|λ|`, with mutually
/// `W`-orthogonal eigenvectors.
pub fn low_spectrum<T: Real>(
    a: &QuatSparseOperator<T>,
    weights: &[T],
    k: usize,
    opts: &EigenOptions<T>,
) -> Result<Vec<Eigenpair<T>>> {
    let n = a.dimension();
    if !a.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    if weights.iter().any(|&w| !(w > T::zero())) {
        return Err(Error::InvalidParameter("weights must be strictly positive".into()));
    }
    if k > n || k == 0 {
        return Err(Error::TooManyEigenpairs {
            requested: k,
            dimension: n,
        });
    }
    let solver = ShiftedSolver::new(a, weights)?;
    // A generous guard block keeps convergence fast inside eigenvalue clusters.
    let block = n.min(2 * k + 4);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut active: Vec<QuatVector<T>> = (0..block).map(|_| random_vector(n, &mut rng)).collect();
    let mut locked: Vec<Eigenpair<T>> = Vec::new();
    orthonormalize_against(&mut active, &[], weights, &mut rng);
    let mut last_residual = T::infinity();
    for _iter in 0..opts.max_iter {
        let mut next: Vec<QuatVector<T>> = active
            .iter()
            .map(|x| solver.apply_inverse(x, weights))
            .collect();
        let locked_vecs: Vec<&QuatVector<T>> = locked.iter().map(|p| &p.vector).collect();
        orthonormalize_against(&mut next, &locked_vecs, weights, &mut rng);
        let ritz = rayleigh_ritz(a, &next)?;
        active = ritz.iter().map(|(_, v)| v.clone()).collect();
        let mut newly = 0;
        for (value, vector) in &ritz {
            if locked.len() + newly >= k {
                break;
            }
            let (res, _) = residual(a, weights, *value, vector)?;
            last_residual = res;
            if res <= opts.tol {
                newly += 1;
            } else {
                break;
            }
        }
        for (value, vector) in ritz.iter().take(newly) {
            locked.push(finish(a, weights, *value, vector)?);
        }
        active.drain(..newly);
        if locked.len() >= k {
            locked.sort_by(|p, q| {
                p.value
                    .abs()
                    .partial_cmp(&q.value.abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            locked.truncate(k);
            return Ok(locked);
        }
        if active.is_empty() {
            break;
        }
        // Keep the block size constant after locking.
        while active.len() + locked.len() < block.max(locked.len() + 1) && active.len() < n - locked.len() {
            active.push(random_vector(n, &mut rng));
        }
        let locked_vecs: Vec<&QuatVector<T>> = locked.iter().map(|p| &p.vector).collect();
        orthonormalize_against(&mut active, &locked_vecs, weights, &mut rng);
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: last_residual.to_f64_lossy(),
    })
}

enum Mode<T> {
    /// `A + σW` is positive definite.
    Shifted(SkylineCholesky<T>),
    /// Factor of `A W⁻¹ A + σ²W`.
    Squared(SkylineCholesky<T>),
}

struct ShiftedSolver<T> {
    mode: Mode<T>,
}

impl<T: Real> ShiftedSolver<T> {
    fn new(a: &QuatSparseOperator<T>, weights: &[T]) -> Result<Self> {
        let real = CsrMatrix::from_quat(a);
        let w4: Vec<T> = weights.iter().flat_map(|&w| [w; 4]).collect();
        let wmax = weights.iter().copied().fold(T::zero(), T::max);
        let scale = real.max_abs_diagonal().max(T::min_positive_value()) / wmax;
        let sigma = scale * T::lit(1e-10);
        let pattern = a.pattern();
        let shifted = real.add_diagonal(&w4.iter().map(|&w| w * sigma).collect::<Vec<_>>());
        match factor_blocks(&shifted, &pattern) {
            Ok(f) => Ok(Self {
                mode: Mode::Shifted(f),
            }),
            Err(Error::NotPositiveDefinite { .. }) => {
                let winv: Vec<T> = w4.iter().map(|&w| T::one() / w).collect();
                let sq = real.square_weighted(&winv);
                let sq_scale = sq.max_abs_diagonal().max(T::min_positive_value()) / wmax;
                let sigma2 = sq_scale * T::lit(1e-10);
                let sq = sq.add_diagonal(&w4.iter().map(|&w| w * sigma2).collect::<Vec<_>>());
                let pattern2 = square_pattern(&pattern);
                let f = factor_blocks(&sq, &pattern2)?;
                Ok(Self {
                    mode: Mode::Squared(f),
                })
            }
            Err(e) => Err(e),
        }
    }

    /// `K⁻¹ W x`.
    fn apply_inverse(&self, x: &QuatVector<T>, weights: &[T]) -> QuatVector<T> {
        let rhs: Vec<T> = x
            .0
            .iter()
            .zip(weights)
            .flat_map(|(q, &w)| q.scale(w).to_array())
            .collect();
        let sol = match &self.mode {
            Mode::Shifted(f) | Mode::Squared(f) => f.solve(&rhs),
        };
        QuatVector::from_real(&sol)
    }
}

fn square_pattern(p: &[Vec<usize>]) -> Vec<Vec<usize>> {
    p.iter()
        .map(|row| {
            let mut out: Vec<usize> = row.iter().flat_map(|&k| p[k].iter().copied()).collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect()
}

fn random_vector<T: Real>(n: usize, rng: &mut ChaCha8Rng) -> QuatVector<T> {
    QuatVector(
        (0..n)
            .map(|_| {
                Quaternion::new(
                    T::lit(rng.random_range(-1.0..1.0)),
                    T::lit(rng.random_range(-1.0..1.0)),
                    T::lit(rng.random_range(-1.0..1.0)),
                    T::lit(rng.random_range(-1.0..1.0)),
                )
            })
            .collect(),
    )
}

/// Quaternionic Gram–Schmidt (twice) in the `W` inner product, right-scalar
/// convention. Vectors that collapse are replaced by fresh random ones.
fn orthonormalize_against<T: Real>(
    vs: &mut [QuatVector<T>],
    against: &[&QuatVector<T>],
    weights: &[T],
    rng: &mut ChaCha8Rng,
) {
    let n = weights.len();
    for i in 0..vs.len() {
        for attempt in 0..4 {
            let before = vs[i].norm(weights);
            for _pass in 0..2 {
                for u in against {
                    let c = u.inner(&vs[i], weights).scale(T::one() / u.norm_sqr(weights));
                    vs[i].sub_right_scaled(u, c);
                }
                for j in 0..i {
                    let (head, tail) = vs.split_at_mut(i);
                    let u = &head[j];
                    let c = u.inner(&tail[0], weights);
                    tail[0].sub_right_scaled(u, c);
                }
            }
            let after = vs[i].norm(weights);
            if after > before * T::lit(1e-8) && after > T::zero() && after.is_finite() {
                vs[i] = vs[i].scale(T::one() / after);
                break;
            }
            if attempt == 3 {
                vs[i] = vs[i].scale(T::one() / after.max(T::min_positive_value()));
            } else {
                vs[i] = random_vector(n, rng);
            }
        }
    }
}

/// Rayleigh–Ritz on a `W`-orthonormal quaternionic basis. Returns Ritz pairs
/// sorted by `|λ|`.
fn rayleigh_ritz<T: Real>(
    a: &QuatSparseOperator<T>,
    basis: &[QuatVector<T>],
) -> Result<Vec<(T, QuatVector<T>)>> {
    let p = basis.len();
    let images: Vec<QuatVector<T>> = basis.iter().map(|b| a.apply(b)).collect::<Result<_>>()?;
    let ones = vec![T::one(); a.dimension()];
    let mut h = vec![vec![Quaternion::zero(); p]; p];
    for i in 0..p {
        for j in 0..p {
            h[i][j] = basis[i].inner(&images[j], &ones);
        }
    }
    let mut real = vec![vec![T::zero(); 4 * p]; 4 * p];
    for i in 0..p {
        for j in 0..p {
            let q = if i == j {
                Quaternion::real(h[i][i].w)
            } else {
                (h[i][j] + h[j][i].conj()).scale(T::lit(0.5))
            };
            let b = q.to_real_block();
            for r in 0..4 {
                for s in 0..4 {
                    real[4 * i + r][4 * j + s] = b[r][s];
                }
            }
        }
    }
    let (vals, vecs) = symmetric_eigen(&real);
    let mut order: Vec<usize> = (0..4 * p).collect();
    order.sort_by(|&x, &y| {
        vals[x]
            .abs()
            .partial_cmp(&vals[y].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(vals[x].partial_cmp(&vals[y]).unwrap_or(std::cmp::Ordering::Equal))
    });
    let unit = vec![T::one(); p];
    let mut coeffs: Vec<(T, QuatVector<T>)> = Vec::with_capacity(p);
    for &c in &order {
        if coeffs.len() == p {
            break;
        }
        let col: Vec<T> = (0..4 * p).map(|r| vecs[r][c]).collect();
        let mut v = QuatVector::from_real(&col);
        for (_, u) in &coeffs {
            let proj = u.inner(&v, &unit);
            v.sub_right_scaled(u, proj);
        }
        let nv = v.norm(&unit);
        if nv > T::lit(0.5) {
            coeffs.push((vals[c], v.scale(T::one() / nv)));
        }
    }
    Ok(coeffs
        .into_iter()
        .map(|(val, c)| {
            let mut x = QuatVector::zeros(a.dimension());
            for (b, &cb) in basis.iter().zip(&c.0) {
                x.add_right_scaled(b, cb);
            }
            (val, x)
        })
        .collect())
}

fn residual<T: Real>(
    a: &QuatSparseOperator<T>,
    weights: &[T],
    value: T,
    v: &QuatVector<T>,
) -> Result<(T, T)> {
    let av = a.apply(v)?;
    let mut r2 = T::zero();
    for ((q, x), &w) in av.0.iter().zip(&v.0).zip(weights) {
        let r = q.scale(T::one() / w) - x.scale(value);
        r2 += r.norm_sqr() * w;
    }
    let nv2 = v.norm_sqr(weights);
    let ones = vec![T::one(); weights.len()];
    let rq = v.inner(&av, &ones);
    Ok(((r2 / nv2).sqrt(), rq.imag_norm() / nv2))
}

fn finish<T: Real>(
    a: &QuatSparseOperator<T>,
    weights: &[T],
    value: T,
    v: &QuatVector<T>,
) -> Result<Eigenpair<T>> {
    let total: T = weights.iter().copied().sum();
    let v = v.scale((total / v.norm_sqr(weights)).sqrt());
    let (residual, imag_residual) = residual(a, weights, value, &v)?;
    Ok(Eigenpair {
        value,
        vector: v,
        residual,
        imag_residual,
    })
}
