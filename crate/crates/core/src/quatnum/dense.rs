use crate::scalar::Real;

/// Eigen-decomposition of a small dense symmetric matrix by cyclic Jacobi
/// rotations. Returns eigenvalues in ascending order with matching column
/// eigenvectors (`vectors[row][col]`).
pub fn symmetric_eigen<T: Real>(a: &[Vec<T>]) -> (Vec<T>, Vec<Vec<T>>) {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a.to_vec();
    let mut v = vec![vec![T::zero(); n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |acc, &x| acc.max(x.abs()));
    let tiny = T::epsilon() * T::epsilon() * scale.max(T::min_positive_value());
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() <= T::epsilon() * scale * T::lit(1e-2) || off <= tiny * tiny {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq.abs() <= tiny {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = idx.iter().map(|&i| m[i][i]).collect();
    let vecs = (0..n)
        .map(|r| idx.iter().map(|&c| v[r][c]).collect())
        .collect();
    (vals, vecs)
}

/// Least-squares solution of `A x ≈ b` for a tall dense `A` (rows given as
/// slices) by Householder QR. Returns `None` when `A` is numerically rank
/// deficient relative to its largest column norm.
pub fn least_squares<T: Real>(rows: &[Vec<T>], rhs: &[T]) -> Option<Vec<T>> {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    if m < n || n == 0 {
        return None;
    }
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let mut b: Vec<T> = rhs.to_vec();
    let col_scale = (0..n)
        .map(|j| (0..m).map(|i| a[i][j] * a[i][j]).sum::<T>().sqrt())
        .fold(T::zero(), T::max);
    if !(col_scale > T::zero()) {
        return None;
    }
    for k in 0..n {
        let norm = (k..m).map(|i| a[i][k] * a[i][k]).sum::<T>().sqrt();
        if norm <= T::lit(1e-10) * col_scale {
            return None;
        }
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 > T::zero() {
            for j in k..n {
                let d: T = (k..m).map(|i| v[i - k] * a[i][j]).sum::<T>() * T::lit(2.0) / vnorm2;
                for i in k..m {
                    a[i][j] -= d * v[i - k];
                }
            }
            let d: T = (k..m).map(|i| v[i - k] * b[i]).sum::<T>() * T::lit(2.0) / vnorm2;
            for i in k..m {
                b[i] -= d * v[i - k];
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let s: T = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_exact_fit() {
        let rows: Vec<Vec<f64>> = (0..7)
            .map(|i| {
                let t = i as f64 * 0.3 - 1.0;
                vec![1.0, t, t * t]
            })
            .collect();
        let rhs: Vec<f64> = rows.iter().map(|r| 2.0 - r[1] + 0.5 * r[2]).collect();
        let x = least_squares(&rows, &rhs).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] + 1.0).abs() < 1e-12 && (x[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn least_squares_detects_rank_deficiency() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![-1.0, -2.0]];
        assert!(least_squares(&rows, &[1.0, 2.0, 3.0]).is_none());
    }

    #[test]
    fn diagonalizes_small_matrix() {
        let a = vec![
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, -0.2],
            vec![0.5, -0.2, 1.0],
        ];
        let (vals, vecs) = symmetric_eigen(&a);
        for c in 0..3 {
            for r in 0..3 {
                let av: f64 = (0..3).map(|k| a[r][k] * vecs[k][c]).sum();
                assert!((av - vals[c] * vecs[r][c]).abs() < 1e-12);
            }
        }
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
        let tr: f64 = vals.iter().sum();
        assert!((tr - 8.0).abs() < 1e-12);
    }
}
