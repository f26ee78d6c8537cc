//! Mesh construction, OBJ round trips and curvature sanity checks.

use proptest::prelude::*;
use spinwright_core::mesh::generate::{icosphere, torus};
use spinwright_core::mesh::{curvature_report, generate_test_mesh, load_obj, save_obj, MeshKind, TriMesh};
use spinwright_core::Mesh;

#[test]
fn icosphere_counts() {
    for level in 0..=4 {
        let m: Mesh = icosphere(level).unwrap();
        assert_eq!(m.num_vertices(), 10 * 4usize.pow(level as u32) + 2);
        assert_eq!(m.euler_characteristic(), 2);
    }
}

#[test]
fn generator_rejects_bad_parameters() {
    assert!(generate_test_mesh::<f64>(MeshKind::Icosphere { level: 99 }).is_err());
    assert!(generate_test_mesh::<f64>(MeshKind::Torus { major: 1.0, minor: 2.0, nu: 8, nv: 8 }).is_err());
    assert!(generate_test_mesh::<f64>(MeshKind::Ellipsoid { a: 1.0, b: -1.0, c: 1.0, level: 2 }).is_err());
}

#[test]
fn single_precision_tracks_double() {
    let m: TriMesh<f32> = icosphere(2).unwrap();
    let r = curvature_report(&m).unwrap();
    let r64 = curvature_report(&m.cast::<f64>()).unwrap();
    for (a, b) in r.mean.iter().zip(&r64.mean) {
        assert!((*a as f64 - b).abs() < 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn obj_round_trip_is_lossless_enough(nu in 3usize..12, nv in 3usize..12, r in 0.2f64..0.9) {
        let m: Mesh = torus(1.0, r, nu, nv).unwrap();
        prop_assert_eq!(m.euler_characteristic(), 0);
        let mut buf = Vec::new();
        save_obj(&m, &mut buf).unwrap();
        let back: Mesh = load_obj(&buf[..]).unwrap();
        prop_assert!(back.same_connectivity(&m));
        for (a, b) in back.points().iter().zip(&m.points()) {
            for k in 0..3 {
                prop_assert!((a[k] - b[k]).abs() <= 1e-8 * b[k].abs().max(1.0));
            }
        }
    }
}
