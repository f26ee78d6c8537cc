//! Poisson integration against a dense least-squares solve, and the gauge
//! behaviour of spinor integration.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinwright_core::dirac::SpinorField;
use spinwright_core::integrate::{integrate_one_form, spinor_one_form, EdgeOneForm};
use spinwright_core::mesh::curvature::{cotan_weights, vertex_areas};
use spinwright_core::mesh::generate::icosphere;
use spinwright_core::mesh::TriMesh;
use spinwright_core::quatnum::Quaternion;

fn random_form(m: &TriMesh<f64>, seed: u64) -> EdgeOneForm<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exact = EdgeOneForm::exact(m);
    let values = exact
        .edge_values()
        .iter()
        .map(|q| {
            let noise = Quaternion::new(0.0, rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1));
            *q + noise
        })
        .collect();
    EdgeOneForm::from_edge_values(m, values).unwrap()
}

/// Weighted least squares `min Σ w_e |F_j − F_i − ω_e|²` with `F_0 = 0`,
/// recentred by vertex area.
fn dense_oracle(m: &TriMesh<f64>, omega: &EdgeOneForm<f64>) -> Vec<[f64; 3]> {
    let w = cotan_weights(m).unwrap();
    let n = m.num_vertices();
    let ne = m.num_edges();
    let mut a = DMatrix::<f64>::zeros(ne, n - 1);
    let mut out = vec![[0.0; 3]; n];
    for k in 0..3 {
        let mut b = DVector::<f64>::zeros(ne);
        for e in 0..ne {
            let (i, j) = m.edge_vertices(e);
            let s = w[e].sqrt();
            if k == 0 {
                if i > 0 {
                    a[(e, i - 1)] = -s;
                }
                if j > 0 {
                    a[(e, j - 1)] = s;
                }
            }
            b[e] = s * omega.edge_values()[e].vector()[k];
        }
        let x = (a.transpose() * &a).cholesky().unwrap().solve(&(a.transpose() * &b));
        for v in 1..n {
            out[v][k] = x[v - 1];
        }
    }
    let areas = vertex_areas(m);
    let total: f64 = areas.iter().sum();
    let mut c = [0.0; 3];
    for (p, a) in out.iter().zip(&areas) {
        for k in 0..3 {
            c[k] += p[k] * a / total;
        }
    }
    out.iter().map(|p| [p[0] - c[0], p[1] - c[1], p[2] - c[2]]).collect()
}

#[test]
fn poisson_solve_matches_dense_least_squares() {
    // Icosphere level 2 has positive cotan weights, so the problem is a true
    // weighted least-squares fit.
    let m: TriMesh<f64> = icosphere(2).unwrap();
    assert!(cotan_weights(&m).unwrap().iter().all(|&w| w > 0.0));
    let omega = random_form(&m, 11);
    let got = integrate_one_form(&m, &omega).unwrap();
    let want = dense_oracle(&m, &omega);
    // The oracle recentres with the input areas, the solver with the output
    // ones, so compare after a common shift.
    let p = got.mesh.points();
    let shift: Vec<f64> = (0..3)
        .map(|k| (0..p.len()).map(|v| p[v][k] - want[v][k]).sum::<f64>() / p.len() as f64)
        .collect();
    for (a, b) in p.iter().zip(&want) {
        for k in 0..3 {
            assert!((a[k] - shift[k] - b[k]).abs() <= 1e-9, "{} {}", a[k] - shift[k], b[k]);
        }
    }
}

#[test]
fn exact_form_reproduces_the_mesh() {
    let m: TriMesh<f64> = icosphere(2).unwrap();
    let got = integrate_one_form(&m, &EdgeOneForm::exact(&m)).unwrap();
    assert!(got.exactness_residual <= 1e-12);
    for (a, b) in got.mesh.points().iter().zip(&m.points()) {
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Right-multiplying ψ by a constant quaternion `c` rotates the output by
    /// `c` and scales it by `|c|²`.
    #[test]
    fn constant_gauge_acts_by_similarity(c in prop::array::uniform4(-2.0f64..2.0), seed in any::<u64>()) {
        let c = Quaternion::from_array(c);
        prop_assume!(c.norm() > 0.1);
        let m: TriMesh<f64> = icosphere(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: Vec<Quaternion<f64>> = (0..m.num_vertices())
            .map(|_| Quaternion::new(1.0 + rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2)))
            .collect();
        let gauged: Vec<Quaternion<f64>> = psi.iter().map(|&p| p * c).collect();
        let f1 = spinor_one_form(&m, &SpinorField::new(&m, psi).unwrap()).unwrap();
        let f2 = spinor_one_form(&m, &SpinorField::new(&m, gauged).unwrap()).unwrap();
        for (a, b) in f1.edge_values().iter().zip(f2.edge_values()) {
            let expect = c.conj() * *a * c;
            prop_assert!((expect - *b).norm() <= 1e-12 * c.norm_sqr().max(1.0));
        }
    }

    #[test]
    fn spinor_forms_are_imaginary(seed in any::<u64>()) {
        let m: TriMesh<f64> = icosphere(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: Vec<Quaternion<f64>> = (0..m.num_vertices())
            .map(|_| Quaternion::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let f = spinor_one_form(&m, &SpinorField::new(&m, psi).unwrap()).unwrap();
        prop_assert!(f.max_real_fraction() <= 1e-12);
    }
}
