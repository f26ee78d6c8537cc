use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::vec3;
use crate::mesh::NormalField;
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize)]
pub struct HalfSpace<T> {
    /// Whether all differences `N₁ − N₂` lie in one closed half-space.
    pub contained: bool,
    /// Unit `v` with `v · (N₁ − N₂) ≥ 0` everywhere, when `contained`.
    pub witness: Option<[T; 3]>,
    /// Largest `min_i v · dᵢ / |dᵢ|` over `|v|_∞ ≤ 1`; positive for an open
    /// half-space.
    pub margin: T,
    /// Number of vertices with `N₁ ≠ N₂`.
    pub nonzero: usize,
}

/// Differences below this length count as zero.
const ZERO_DIFF: f64 = 1e-12;
/// Slack for treating LP optima as positive.
const LP_EPS: f64 = 1e-9;

fn lp(dirs: &[[f64; 3]], objective: [f64; 3], with_margin: bool) -> Result<(f64, [f64; 3])> {
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let v: Vec<_> = (0..3).map(|k| p.add_var(objective[k], (-1.0, 1.0))).collect();
    let t = p.add_var(if with_margin { 1.0 } else { 0.0 }, if with_margin { (-2.0, 1.0) } else { (0.0, 0.0) });
    for d in dirs {
        p.add_constraint([(v[0], d[0]), (v[1], d[1]), (v[2], d[2]), (t, -1.0)], ComparisonOp::Ge, 0.0);
    }
    let s = p.solve().map_err(|e| Error::LinearProgram(e.to_string()))?;
    Ok((s.objective(), [s[v[0]], s[v[1]], s[v[2]]]))
}

/// Decides whether the Gauss-map differences of two meshes with the same
/// vertex set lie in a closed half-space through the origin.
pub fn gauss_map_halfspace_test<T: Real>(n1: &NormalField<T>, n2: &NormalField<T>) -> Result<HalfSpace<T>> {
    if n1.len() != n2.len() {
        return Err(Error::DimensionMismatch {
            expected: n1.len(),
            found: n2.len(),
        });
    }
    let dirs: Vec<[f64; 3]> = (0..n1.len())
        .filter_map(|i| {
            let d = vec3::sub(n1.vector(i), n2.vector(i));
            let d = [d[0].to_f64_lossy(), d[1].to_f64_lossy(), d[2].to_f64_lossy()];
            let l = vec3::norm(d);
            (l > ZERO_DIFF).then(|| vec3::scale(d, 1.0 / l))
        })
        .collect();
    halfspace_of_directions(&dirs).map(|(contained, witness, margin)| HalfSpace {
        contained,
        witness: witness.map(|w| w.map(T::lit)),
        margin: T::lit(margin),
        nonzero: dirs.len(),
    })
}

/// `(contained, witness, margin)` for unit directions.
pub fn halfspace_of_directions(dirs: &[[f64; 3]]) -> Result<(bool, Option<[f64; 3]>, f64)> {
    if dirs.is_empty() {
        return Ok((true, Some([0.0, 0.0, 1.0]), 1.0));
    }
    let (margin, v) = lp(dirs, [0.0; 3], true)?;
    if margin > LP_EPS {
        return Ok((true, Some(vec3::normalize(v)), margin));
    }
    // Closed case: the cone {v : v·dᵢ ≥ 0} is nontrivial iff some signed
    // coordinate is positive on it.
    for k in 0..3 {
        for s in [1.0, -1.0] {
            let mut c = [0.0; 3];
            c[k] = s;
            let (obj, v) = lp(dirs, c, false)?;
            if obj > LP_EPS {
                let w = vec3::normalize(v);
                let worst = dirs.iter().map(|d| vec3::dot(*d, w)).fold(f64::INFINITY, f64::min);
                if worst >= -LP_EPS {
                    return Ok((true, Some(w), margin.max(0.0)));
                }
            }
        }
    }
    Ok((false, None, margin))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(v: [f64; 3]) -> [f64; 3] {
        vec3::normalize(v)
    }

    #[test]
    fn open_closed_and_full() {
        let open = [unit([1.0, 0.1, 0.0]), unit([1.0, -0.3, 0.2]), unit([0.5, 0.0, -0.4])];
        assert!(halfspace_of_directions(&open).unwrap().0);
        // A great circle: only the closed half-space through its pole works.
        let circle: Vec<_> = (0..8)
            .map(|i| {
                let t = i as f64 * std::f64::consts::FRAC_PI_4;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        let (c, w, m) = halfspace_of_directions(&circle).unwrap();
        assert!(c && m.abs() < 1e-9);
        assert!(w.unwrap()[2].abs() > 1.0 - 1e-9);
        let mut all = circle.clone();
        all.push([0.0, 0.0, 1.0]);
        all.push([0.0, 0.0, -1.0]);
        assert!(!halfspace_of_directions(&all).unwrap().0);
    }
}
