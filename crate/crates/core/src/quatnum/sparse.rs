//! Real sparse symmetric matrices and an envelope (skyline) Cholesky solver.
//!
//! Quaternionic operators are factored through their real `4n × 4n`
//! representation. A reverse Cuthill–McKee ordering of the block graph keeps
//! the envelope narrow for mesh-shaped sparsity.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::quatnum::QuatSparseOperator;
use crate::scalar::Real;

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
pub struct CsrMatrix<T> {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Builds from per-row `(col, value)` lists; columns need not be sorted.
    pub fn from_rows(rows: Vec<Vec<(usize, T)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Real representation of a quaternionic operator (left-multiplication blocks).
    pub fn from_quat(op: &QuatSparseOperator<T>) -> Self {
        let n = op.dimension();
        let mut rows = vec![Vec::new(); 4 * n];
        for i in 0..n {
            for &(j, q) in op.row(i) {
                let b = q.to_real_block();
                for (r, br) in b.iter().enumerate() {
                    for (s, &v) in br.iter().enumerate() {
                        if v != T::zero() {
                            rows[4 * i + r].push((4 * j + s, v));
                        }
                    }
                }
            }
        }
        Self::from_rows(rows)
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `self + diag(d)`.
    pub fn add_diagonal(&self, d: &[T]) -> Self {
        let rows = (0..self.n)
            .map(|i| {
                let mut r: Vec<(usize, T)> = self.row(i).collect();
                r.push((i, d[i]));
                r
            })
            .collect();
        Self::from_rows(rows)
    }

    /// `self · diag(d) · self` for a symmetric `self`.
    pub fn square_weighted(&self, d: &[T]) -> Self {
        let mut rows = Vec::with_capacity(self.n);
        let mut acc = vec![T::zero(); self.n];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; self.n];
        for i in 0..self.n {
            for (k, a) in self.row(i) {
                let s = a * d[k];
                for (j, b) in self.row(k) {
                    if !mark[j] {
                        mark[j] = true;
                        touched.push(j);
                    }
                    acc[j] += s * b;
                }
            }
            let row: Vec<(usize, T)> = touched.iter().map(|&j| (j, acc[j])).collect();
            for &j in &touched {
                acc[j] = T::zero();
                mark[j] = false;
            }
            touched.clear();
            rows.push(row);
        }
        Self::from_rows(rows)
    }

    /// Largest absolute diagonal entry.
    pub fn max_abs_diagonal(&self) -> T {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .find(|&(j, _)| j == i)
                    .map(|(_, v)| v.abs())
                    .unwrap_or_else(T::zero)
            })
            .fold(T::zero(), T::max)
    }
}

/// Reverse Cuthill–McKee ordering of an undirected graph. Returns `perm` with
/// `perm[new] = old`.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    let bfs_last = |start: usize| -> usize {
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([start]);
        seen[start] = true;
        let mut last = start;
        while let Some(u) = q.pop_front() {
            last = u;
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    q.push_back(v);
                }
            }
        }
        last
    };
    while let Some(seed) = (0..n).filter(|&v| !visited[v]).min_by_key(|&v| degree[v]) {
        // Two BFS sweeps approximate a pseudo-peripheral start vertex.
        let start = bfs_last(bfs_last(seed));
        let start = if visited[start] { seed } else { start };
        visited[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = adj[u].iter().copied().filter(|&v| !visited[v]).collect();
            nbrs.sort_by_key(|&v| (degree[v], v));
            nbrs.dedup();
            for v in nbrs {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// Expands a block permutation to `block`-sized scalar blocks.
pub fn expand_permutation(perm: &[usize], block: usize) -> Vec<usize> {
    perm.iter()
        .flat_map(|&p| (0..block).map(move |c| block * p + c))
        .collect()
}

/// Envelope Cholesky factor `P A Pᵀ = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct SkylineCholesky<T> {
    n: usize,
    perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> SkylineCholesky<T> {
    /// Factors a symmetric matrix under the permutation `perm` (`perm[new] = old`).
    pub fn factor(a: &CsrMatrix<T>, perm: Vec<usize>) -> Result<Self> {
        let n = a.n;
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: perm.len(),
            });
        }
        let mut iperm = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        let mut first = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            first[new] = a
                .row(old)
                .map(|(j, _)| iperm[j])
                .filter(|&j| j <= new)
                .min()
                .unwrap_or(new);
        }
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for i in 0..n {
            let len = i - first[i] + 1;
            offset.push(offset[i] + len);
        }
        let mut data = vec![T::zero(); offset[n]];
        for (new, &old) in perm.iter().enumerate() {
            for (j, v) in a.row(old) {
                let jn = iperm[j];
                if jn <= new {
                    data[offset[new] + jn - first[new]] += v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let (done, rest) = data.split_at_mut(offset[i]);
            let row_i = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let row_j = &done[offset[j]..offset[j] + (j - fj + 1)];
                let k0 = fi.max(fj);
                let mut s = row_i[j - fi];
                for k in k0..j {
                    s -= row_i[k - fi] * row_j[k - fj];
                }
                row_i[j - fi] = s / row_j[j - fj];
            }
            let mut d = row_i[i - fi];
            for k in fi..i {
                d -= row_i[k - fi] * row_i[k - fi];
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite {
                    row: perm[i],
                    pivot: d.to_f64_lossy(),
                });
            }
            row_i[i - fi] = d.sqrt();
        }
        Ok(Self {
            n,
            perm,
            first,
            offset,
            data,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    fn l(&self, i: usize, k: usize) -> T {
        self.data[self.offset[i] + k - self.first[i]]
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.offset[i]..self.offset[i + 1]];
            let mut s = y[i];
            for k in fi..i {
                s -= row[k - fi] * y[k];
            }
            y[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = y[i] / self.l(i, i);
            y[i] = xi;
            let row = &self.data[self.offset[i]..self.offset[i + 1]];
            for k in fi..i {
                y[k] -= row[k - fi] * xi;
            }
        }
        let mut x = vec![T::zero(); n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// Factors `a` with an RCM ordering computed on its own scalar pattern.
pub fn factor_rcm<T: Real>(a: &CsrMatrix<T>) -> Result<SkylineCholesky<T>> {
    let adj: Vec<Vec<usize>> = (0..a.n)
        .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
        .collect();
    SkylineCholesky::factor(a, reverse_cuthill_mckee(&adj))
}

/// Factors the real representation of a quaternionic operator, ordering by
/// its block graph.
pub fn factor_blocks<T: Real>(
    a: &CsrMatrix<T>,
    block_pattern: &[Vec<usize>],
) -> Result<SkylineCholesky<T>> {
    let adj: Vec<Vec<usize>> = block_pattern
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().copied().filter(|&j| j != i).collect())
        .collect();
    let perm = expand_permutation(&reverse_cuthill_mckee(&adj), 4);
    SkylineCholesky::factor(a, perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn laplacian_1d_plus(n: usize, shift: f64) -> CsrMatrix<f64> {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![(i, 2.0 + shift)];
                if i > 0 {
                    r.push((i - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, -1.0));
                }
                r
            })
            .collect();
        CsrMatrix::from_rows(rows)
    }

    #[test]
    fn solves_tridiagonal_system() {
        let a = laplacian_1d_plus(50, 0.1);
        let f = factor_rcm(&a).unwrap();
        let x_true: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&x_true);
        let x = f.solve(&b);
        for (p, q) in x.iter().zip(&x_true) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn solves_random_spd_under_random_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 80;
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for i in 0..n {
            for _ in 0..3 {
                let j = rng.random_range(0..n);
                if j != i {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    rows[i].push((j, v));
                    rows[j].push((i, v));
                }
            }
        }
        // Diagonal dominance makes the matrix SPD.
        for i in 0..n {
            let s: f64 = rows[i].iter().map(|(_, v)| v.abs()).sum();
            rows[i].push((i, s + 1.0));
        }
        let a = CsrMatrix::from_rows(rows);
        let f = factor_rcm(&a).unwrap();
        let x_true: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = f.solve(&a.mul_vec(&x_true));
        for (p, q) in x.iter().zip(&x_true) {
            assert!((p - q).abs() < 1e-11);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = laplacian_1d_plus(10, -3.0);
        assert!(matches!(factor_rcm(&a), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn rcm_is_a_permutation() {
        let adj = vec![vec![1, 2], vec![0], vec![0, 3], vec![2], vec![]];
        let mut p = reverse_cuthill_mckee(&adj);
        p.sort();
        assert_eq!(p, vec![0, 1, 2, 3, 4]);
    }
}
