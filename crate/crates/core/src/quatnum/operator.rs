use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::quatnum::Quaternion;
use crate::scalar::Real;

/// Coefficient vector of a quaternionic right module.
///
/// Operators act on the left of the coefficients, scalars act on the right
/// (`v · α`), so `A (v α) = (A v) α` for every quaternion `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatVector<T>(pub Vec<Quaternion<T>>);

impl<T: Real> QuatVector<T> {
    pub fn zeros(n: usize) -> Self {
        Self(vec![Quaternion::zero(); n])
    }

    pub fn constant(n: usize, q: Quaternion<T>) -> Self {
        Self(vec![q; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Quaternion<T>] {
        &self.0
    }

    /// Weighted quaternionic-hermitian inner product `Σ wᵢ conj(selfᵢ) otherᵢ`.
    pub fn inner(&self, other: &Self, weights: &[T]) -> Quaternion<T> {
        self.0
            .iter()
            .zip(&other.0)
            .zip(weights)
            .map(|((a, b), &w)| (a.conj() * *b).scale(w))
            .sum()
    }

    pub fn norm_sqr(&self, weights: &[T]) -> T {
        self.0
            .iter()
            .zip(weights)
            .map(|(a, &w)| a.norm_sqr() * w)
            .sum()
    }

    pub fn norm(&self, weights: &[T]) -> T {
        self.norm_sqr(weights).sqrt()
    }

    pub fn right_mul(&self, alpha: Quaternion<T>) -> Self {
        Self(self.0.iter().map(|&q| q * alpha).collect())
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.iter().map(|&q| q.scale(s)).collect())
    }

    /// `self − other · alpha`.
    pub fn sub_right_scaled(&mut self, other: &Self, alpha: Quaternion<T>) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a -= *b * alpha;
        }
    }

    pub fn add_right_scaled(&mut self, other: &Self, alpha: Quaternion<T>) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += *b * alpha;
        }
    }

    pub fn to_real(&self) -> Vec<T> {
        self.0.iter().flat_map(|q| q.to_array()).collect()
    }

    pub fn from_real(v: &[T]) -> Self {
        Self(
            v.chunks_exact(4)
                .map(|c| Quaternion::new(c[0], c[1], c[2], c[3]))
                .collect(),
        )
    }
}

/// Sparse quaternionic operator stored by rows.
///
/// No explicit zeros are stored. When `hermitian` is set the stored entries
/// satisfy `entry(j, i) == conj(entry(i, j))` bit for bit.
#[derive(Clone, Debug)]
pub struct QuatSparseOperator<T> {
    n: usize,
    rows: Vec<Vec<(usize, Quaternion<T>)>>,
    hermitian: bool,
}

impl<T: Real> QuatSparseOperator<T> {
    /// Builds an operator from `(row, col, value)` triplets; duplicates are summed.
    /// With `hermitian = true` the stored structure is checked exactly.
    pub fn from_entries<I>(n: usize, entries: I, hermitian: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Quaternion<T>)>,
    {
        let mut map: BTreeMap<(usize, usize), Quaternion<T>> = BTreeMap::new();
        for (i, j, q) in entries {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: i.max(j) + 1,
                });
            }
            *map.entry((i, j)).or_insert_with(Quaternion::zero) += q;
        }
        let op = Self::from_map(n, map, hermitian);
        if hermitian && !op.check_hermitian() {
            return Err(Error::NotHermitian);
        }
        Ok(op)
    }

    /// Builds a hermitian operator from its upper triangle (`i <= j`).
    /// The lower triangle is mirrored by conjugation and diagonal entries
    /// are projected onto their real part.
    pub fn hermitian_from_upper<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Quaternion<T>)>,
    {
        let mut map: BTreeMap<(usize, usize), Quaternion<T>> = BTreeMap::new();
        for (i, j, q) in entries {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: i.max(j) + 1,
                });
            }
            let (a, b, q) = if i <= j { (i, j, q) } else { (j, i, q.conj()) };
            *map.entry((a, b)).or_insert_with(Quaternion::zero) += q;
        }
        let mut full = BTreeMap::new();
        for ((i, j), q) in map {
            if i == j {
                full.insert((i, i), Quaternion::real(q.w));
            } else {
                full.insert((i, j), q);
                full.insert((j, i), q.conj());
            }
        }
        Ok(Self::from_map(n, full, true))
    }

    fn from_map(n: usize, map: BTreeMap<(usize, usize), Quaternion<T>>, hermitian: bool) -> Self {
        let mut rows = vec![Vec::new(); n];
        for ((i, j), q) in map {
            if q != Quaternion::zero() {
                rows[i].push((j, q));
            }
        }
        Self { n, rows, hermitian }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![T::one(); n])
    }

    pub fn diagonal(values: &[T]) -> Self {
        let rows = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == T::zero() {
                    Vec::new()
                } else {
                    vec![(i, Quaternion::real(v))]
                }
            })
            .collect();
        Self {
            n: values.len(),
            rows,
            hermitian: true,
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn row(&self, i: usize) -> &[(usize, Quaternion<T>)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> Quaternion<T> {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or_else(|_| Quaternion::zero())
    }

    fn check_hermitian(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter()
                .all(|&(j, q)| self.entry(j, i) == q.conj())
        })
    }

    /// Largest `|A_ij − conj(A_ji)|` over stored entries.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, q) in row {
                worst = worst.max((q - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `(A v)_i = Σ_j A_ij v_j`, entries multiplying from the left.
    pub fn apply(&self, v: &QuatVector<T>) -> Result<QuatVector<T>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok(QuatVector(
            self.rows
                .iter()
                .map(|row| row.iter().map(|&(j, q)| q * v.0[j]).sum())
                .collect(),
        ))
    }

    /// Dense `4n × 4n` real representation built from left-multiplication blocks.
    pub fn to_real_dense(&self) -> Vec<Vec<T>> {
        let m = 4 * self.n;
        let mut out = vec![vec![T::zero(); m]; m];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, q) in row {
                let b = q.to_real_block();
                for (r, br) in b.iter().enumerate() {
                    for (s, &v) in br.iter().enumerate() {
                        out[4 * i + r][4 * j + s] = v;
                    }
                }
            }
        }
        out
    }

    /// Block adjacency pattern (row → columns), used for fill-reducing orderings.
    pub(crate) fn pattern(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(j, _)| j).collect())
            .collect()
    }
}
