//! Sparse quaternionic eigensolver against dense real-representation solves.

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinwright_core::dirac::assemble_dirac;
use spinwright_core::mesh::generate::icosphere;
use spinwright_core::mesh::{mean_curvature_half_density, TriMesh};
use spinwright_core::quatnum::{low_spectrum, EigenOptions, QuatSparseOperator, Quaternion};

/// Eigenvalues of `W^{-1/2} A W^{-1/2}` for the 4n×4n real form of `A`.
fn dense_spectrum(a: &QuatSparseOperator<f64>, w: &[f64]) -> Vec<f64> {
    let real = a.to_real_dense();
    let n = real.len();
    let s: Vec<f64> = w.iter().flat_map(|&x| [1.0 / x.sqrt(); 4]).collect();
    let m = DMatrix::from_fn(n, n, |i, j| real[i][j] * s[i] * s[j]);
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| x.total_cmp(y));
    v
}

fn random_hermitian(n: usize, density: f64, seed: u64) -> QuatSparseOperator<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for i in 0..n {
        entries.push((i, i, Quaternion::new(rng.random_range(-2.0..2.0), 0.0, 0.0, 0.0)));
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                let q = Quaternion::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                entries.push((i, j, q));
            }
        }
    }
    QuatSparseOperator::hermitian_from_upper(n, entries).unwrap()
}

#[test]
fn real_form_has_fourfold_multiplicity() {
    let a = random_hermitian(10, 0.5, 3);
    let ev = dense_spectrum(&a, &[1.0; 10]);
    for g in ev.chunks(4) {
        assert!(g[3] - g[0] <= 1e-10, "{g:?}");
    }
}

#[test]
fn dirac_spectrum_matches_dense_solver() {
    let m: TriMesh<f64> = icosphere(2).unwrap();
    assert!(m.num_vertices() <= 200);
    let asm = assemble_dirac(&m, &mean_curvature_half_density(&m).unwrap()).unwrap();
    let dense = dense_spectrum(&asm.operator, &asm.mass);
    let pairs = low_spectrum(&asm.operator, &asm.mass, 3, &EigenOptions::default()).unwrap();
    for (k, p) in pairs.iter().enumerate() {
        assert!((p.value - dense[4 * k]).abs() <= 1e-8, "{k}: {} vs {}", p.value, dense[4 * k]);
        assert!(p.imag_residual <= 1e-10);
    }
    for g in dense[..12].chunks(4) {
        assert!(g[3] - g[0] <= 1e-10 * g[3].abs().max(1.0), "{g:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_spectra_match_dense(n in 6usize..14, density in 0.2f64..0.8, seed in any::<u64>()) {
        let a = random_hermitian(n, density, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let dense = dense_spectrum(&a, &w);
        let mut by_mag: Vec<f64> = dense.iter().step_by(4).copied().collect();
        by_mag.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
        let k = 4.min(n);
        let pairs = low_spectrum(&a, &w, k, &EigenOptions::default()).unwrap();
        for (p, d) in pairs.iter().zip(&by_mag) {
            prop_assert!((p.value.abs() - d.abs()).abs() <= 1e-8, "{} vs {}", p.value, d);
            prop_assert!(p.imag_residual <= 1e-10);
        }
    }
}
