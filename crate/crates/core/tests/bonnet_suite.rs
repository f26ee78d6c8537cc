//! Pair analyses: distortion, congruence, indices and the half-space test.

use num_complex::Complex;
use proptest::prelude::*;
use spinwright_core::bonnet::*;
use spinwright_core::mesh::generate::{ellipsoid, flat_fan_cone, icosphere, torus};
use spinwright_core::mesh::hopf::face_chart;
use spinwright_core::mesh::{curvature_report, hopf_differential, NormalField, TriMesh};
use spinwright_core::quatnum::Quaternion;
use spinwright_core::Error;

fn motion(axis: [f64; 3], angle: f64, t: [f64; 3], reflection: bool) -> RigidMotion<f64> {
    RigidMotion {
        rotation: Quaternion::from_axis_angle(axis, angle),
        translation: t,
        reflection,
    }
}

fn moved(m: &TriMesh<f64>, g: &RigidMotion<f64>) -> TriMesh<f64> {
    m.map_points(|p| g.apply(p)).unwrap()
}

#[test]
fn rigid_copy_has_no_shape_distortion() {
    let m: TriMesh<f64> = ellipsoid(1.0, 1.2, 1.5, 3).unwrap();
    let copy = moved(&m, &motion([0.2, 1.0, -0.7], 1.3, [2.0, -1.0, 0.5], false));
    let d = shape_distortion(&m, &copy, 1e-6).unwrap();
    assert!(d.max_norm <= 1e-8 && d.trace_residual <= 1e-8, "{:?}", d.summary());
    assert!(congruence_check(&m, &copy, false).unwrap().congruent);
}

#[test]
fn sphere_and_ellipsoid_are_not_isometric() {
    let s: TriMesh<f64> = icosphere(3).unwrap();
    let e: TriMesh<f64> = ellipsoid(1.0, 1.2, 1.5, 3).unwrap();
    assert!(matches!(shape_distortion(&s, &e, 1e-3), Err(Error::IsometryViolation { .. })));
    assert!(!congruence_check(&s, &e, true).unwrap().congruent);
}

#[test]
fn different_connectivity_is_rejected() {
    let a: TriMesh<f64> = icosphere(2).unwrap();
    let b: TriMesh<f64> = icosphere(3).unwrap();
    assert!(matches!(shape_distortion(&a, &b, 1e-6), Err(Error::ConnectivityMismatch)));
}

#[test]
fn congruence_identity_is_exact() {
    let m: TriMesh<f64> = torus(2.0, 1.0, 16, 8).unwrap();
    let c = congruence_check(&m, &m, false).unwrap();
    assert!(c.congruent && c.rms <= 1e-12);
    assert!((c.motion.rotation.w.abs() - 1.0).abs() <= 1e-12);
}

fn power_field(m: &TriMesh<f64>, n: i32) -> QuadDiffField<f64> {
    let values = (0..m.num_faces())
        .map(|f| {
            let (x, _, _) = face_chart(m, f);
            let c = m.face_centroid(f);
            Complex::new(c[0], c[1]).powi(n) * Complex::from_polar(1.0, 2.0 * x[1].atan2(x[0]))
        })
        .collect();
    QuadDiffField::new(m, values).unwrap()
}

#[test]
fn synthetic_zeros_have_negative_half_indices() {
    let m: TriMesh<f64> = flat_fan_cone(12, 0.8).unwrap();
    for n in 1..=3 {
        assert_eq!(foliation_index(&m, &power_field(&m, n), 0).unwrap(), -(n as f64) / 2.0);
    }
}

#[test]
fn ellipsoid_has_four_umbilics_of_total_index_two() {
    let m: TriMesh<f64> = ellipsoid(1.0, 1.2, 1.5, 5).unwrap();
    let r = curvature_report(&m).unwrap();
    let q = hopf_differential(&m).unwrap();
    let a = analyze_umbilics(&m, &r, &q, 0.05).unwrap();
    assert_eq!(a.clusters.len(), 4);
    assert_eq!(a.index_sum, 2.0);
    for c in &a.clusters {
        assert_eq!(c.index, 0.5);
        // Umbilics of this ellipsoid lie in the plane y = 0 near |x| = 0.593.
        assert!(c.centroid[1].abs() < 0.02 && (c.centroid[0].abs() - 0.593).abs() < 0.03);
    }
}

#[test]
fn torus_has_zero_index_sum() {
    let m: TriMesh<f64> = torus(2.0, 1.0, 48, 24).unwrap();
    let r = curvature_report(&m).unwrap();
    let q = hopf_differential(&m).unwrap();
    let a = analyze_umbilics(&m, &r, &q, 0.05).unwrap();
    assert!(a.clusters.is_empty());
    assert_eq!(a.index_sum, 0.0);
    assert_eq!(a.total_index, 0.0);
}

/// A closed half-space exists iff some candidate normal built from pairs of
/// directions, or a direction itself, has nonnegative dot with all of them.
fn enumeration_oracle(d: &[[f64; 3]]) -> bool {
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    };
    let mut cands: Vec<[f64; 3]> = d.iter().flat_map(|&a| [a, a.map(|x| -x)]).collect();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let c = cross(d[i], d[j]);
            let l = dot(c, c).sqrt();
            if l > 1e-9 {
                let c = c.map(|x| x / l);
                cands.push(c);
                cands.push(c.map(|x| -x));
            }
        }
    }
    d.is_empty() || cands.iter().any(|&v| d.iter().all(|&x| dot(v, x) >= -1e-9))
}

fn field(v: &[[f64; 3]]) -> NormalField<f64> {
    NormalField::from_vectors(v).unwrap()
}

#[test]
fn halfspace_examples() {
    let n: Vec<[f64; 3]> = (0..6).map(|i| [0.0, (i as f64).sin(), (i as f64).cos()]).collect();
    let n = field(&n);
    let h = gauss_map_halfspace_test(&n, &n).unwrap();
    assert!(h.contained && h.witness.is_some());

    // Antipodal unit normals make `N₁ − N₂ = 2N₁`.
    let antipodal = |d: &[[f64; 3]]| {
        let n1 = field(d);
        let n2: Vec<[f64; 3]> = (0..n1.len()).map(|i| n1.vector(i).map(|x| -x)).collect();
        (n1, field(&n2))
    };
    let tet = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let (n1, n2) = antipodal(&tet);
    let h = gauss_map_halfspace_test(&n1, &n2).unwrap();
    assert!(!h.contained && h.witness.is_none());
    assert!(!enumeration_oracle(&tet));

    let up = [[0.3, 0.1, 0.9], [-0.2, 0.4, 0.5], [0.0, -0.5, 0.2], [0.6, 0.6, 0.1]];
    let (n1, n2) = antipodal(&up);
    let h = gauss_map_halfspace_test(&n1, &n2).unwrap();
    let w = h.witness.unwrap();
    assert!(h.contained && h.margin > 0.0 && w[2] > 0.5, "{w:?}");
    assert!(enumeration_oracle(&up));
}

#[test]
fn coarse_ellipsoid_indices_still_sum_to_two() {
    // A jump of q lands on ±π across some edge of this mesh.
    let s: TriMesh<f64> = icosphere(1).unwrap();
    let m = s.map_points(|p| [0.8 * p[0], p[1], 1.537611728741365 * p[2]]).unwrap();
    let q = hopf_differential(&m).unwrap();
    let idx = vertex_indices(&m, &q).unwrap();
    assert_eq!(idx.iter().sum::<f64>(), 2.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn halfspace_lp_agrees_with_enumeration(
        raw in prop::collection::vec(prop::array::uniform3(-1.0f64..1.0), 1..9),
        squash in prop::bool::ANY,
    ) {
        let mut dirs: Vec<[f64; 3]> = raw
            .into_iter()
            .map(|mut d| {
                if squash {
                    // Push directions onto a plane to exercise the closed case.
                    d[2] = 0.0;
                }
                d
            })
            .filter(|d| d.iter().map(|x| x * x).sum::<f64>() > 1e-4)
            .collect();
        for d in &mut dirs {
            let l = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            *d = d.map(|x| x / l);
        }
        let (contained, witness, _) = halfspace_of_directions(&dirs).unwrap();
        prop_assert_eq!(contained, enumeration_oracle(&dirs));
        if let Some(w) = witness {
            for d in &dirs {
                prop_assert!(w[0] * d[0] + w[1] * d[1] + w[2] * d[2] >= -1e-8);
            }
        }
    }

    #[test]
    fn congruence_is_an_equivalence(
        axis in prop::array::uniform3(-1.0f64..1.0),
        angle in -3.0f64..3.0,
        t in prop::array::uniform3(-4.0f64..4.0),
        refl in prop::bool::ANY,
    ) {
        prop_assume!(axis.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let m: TriMesh<f64> = ellipsoid(1.0, 1.2, 1.5, 1).unwrap();
        let m = m.map_points(|p| [p[0] + 0.3 * p[1] * p[1], p[1], p[2]]).unwrap();
        let g = motion(axis, angle, t, refl);
        let other = moved(&m, &g);
        prop_assert!(congruence_check(&m, &m, false).unwrap().congruent);
        let ab = congruence_check(&m, &other, true).unwrap();
        let ba = congruence_check(&other, &m, true).unwrap();
        prop_assert!(ab.congruent && ba.congruent);
        // The backward motion is the inverse of the forward one.
        for p in m.points().iter().take(10) {
            let back = ba.motion.apply(ab.motion.apply(*p));
            prop_assert!((0..3).all(|k| (back[k] - p[k]).abs() <= 1e-9));
        }
        let h = motion([1.0, -1.0, 0.3], 0.9, [0.5, 0.0, -2.0], false);
        let c = congruence_check(&moved(&m, &h), &moved(&other, &h), true).unwrap();
        prop_assert_eq!(c.congruent, ab.congruent);
    }

    #[test]
    fn indices_are_half_integers(level in 1usize..3, sx in 0.8f64..1.5, sz in 0.8f64..1.8) {
        let s: TriMesh<f64> = icosphere(level).unwrap();
        let m = s.map_points(|p| [sx * p[0], p[1], sz * p[2]]).unwrap();
        let q = hopf_differential(&m).unwrap();
        if let Ok(idx) = vertex_indices(&m, &q) {
            for i in &idx {
                prop_assert_eq!((2.0 * i).fract(), 0.0);
            }
            prop_assert_eq!(idx.iter().sum::<f64>(), 2.0);
        }
    }
}
