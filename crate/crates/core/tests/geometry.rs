use std::f64::consts::PI;

use approx::assert_relative_eq;
use neumann_spectra::geometry::examples::*;
use neumann_spectra::geometry::{
    check_central_symmetry, check_symmetry, integrate, mesh, AlphaMode, Domain, Mesh, Pose, Shape,
};
use neumann_spectra::Error;
use proptest::prelude::*;

fn planar_examples() -> Vec<(&'static str, Domain)> {
    vec![
        ("disk", disk(1.0)),
        ("annulus", annulus(0.25, 1.0)),
        ("rectangle", rectangle_sqrt3()),
        ("square-with-disk-hole", square_with_disk_hole(2.0, 0.3)),
        ("square-with-square-hole", square_with_square_hole(2.0, 0.6)),
        ("octagon", unit_octagon()),
        ("l4-ball", lp_ball(4.0, 1.0)),
        ("eccentric-annulus", eccentric_annulus(0.25, 1.0, 0.25)),
        ("two-hole-disk", two_hole_disk()),
    ]
}

#[test]
fn meshes_cover_the_domain() {
    for (name, d) in planar_examples() {
        let m = mesh(&d, 0.1).unwrap_or_else(|e| panic!("{name}: {e}"));
        let q = m.validate().unwrap();
        assert!(q.min_angle_deg > 10.0, "{name}: {q:?}");
        assert!(q.max_edge < 0.25, "{name}: {q:?}");
        // straight-edged meshes of curved domains lose O(h^2) area
        assert!((m.area() - d.measure()).abs() < 0.02 * d.measure(), "{name}: {} vs {}", m.area(), d.measure());
        for t in m.triangles.iter().step_by(7) {
            let c = [0, 1].map(|k| t.iter().map(|&v| m.vertices[v][k]).sum::<f64>() / 3.0);
            assert!(d.contains(&c) || d.contains(&m.vertices[t[0]]), "{name}: centroid {c:?}");
        }
    }
}

#[test]
fn mesh_text_round_trip() {
    let m = mesh(&annulus(0.25, 1.0), 0.2).unwrap();
    let back = Mesh::from_text(&m.to_text()).unwrap();
    assert_eq!(back.triangles, m.triangles);
    assert_eq!(back.vertices.len(), m.vertices.len());
    for (a, b) in back.vertices.iter().zip(&m.vertices) {
        assert_relative_eq!(a[0], b[0], max_relative = 1e-15);
        assert_relative_eq!(a[1], b[1], max_relative = 1e-15);
    }
}

#[test]
fn mesh_quadrature_integrates_polynomials() {
    let d = square_with_disk_hole(2.0, 0.3);
    let area = 4.0 - PI * 0.09;
    let i = integrate(&d, |_| 1.0, 0.1).unwrap();
    assert!((i.value - area).abs() < 1e-8, "{i:?}");
    // int x^2 over the square minus the disk: 4/3 - pi r^4 / 4
    let i = integrate(&d, |x| x[0] * x[0], 0.1).unwrap();
    assert!((i.value - (4.0 / 3.0 - PI * 0.3f64.powi(4) / 4.0)).abs() < 1e-8, "{i:?}");
}

#[test]
fn symmetry_classes() {
    let sq = square_with_disk_hole(2.0, 0.3);
    assert!(check_symmetry(&sq, 4).holds);
    assert!(!check_symmetry(&sq, 8).holds);
    assert!(check_symmetry(&unit_octagon(), 8).holds);
    let r = rectangle_sqrt3();
    assert!(check_central_symmetry(&r).holds);
    assert!(!check_symmetry(&r, 4).holds);
    assert!(!check_central_symmetry(&eccentric_annulus(0.25, 1.0, 0.25)).holds);
    assert!(check_central_symmetry(&two_hole_disk()).holds);
    assert!(!check_symmetry(&two_hole_disk(), 4).holds);
}

#[test]
fn matched_shells() {
    let d = square_with_disk_hole(2.0, 0.3);
    let s = d.matched_shell(AlphaMode::Inscribed).unwrap();
    assert_relative_eq!(s.alpha, 0.3, max_relative = 1e-12);
    assert_relative_eq!(s.volume(), d.measure(), max_relative = 1e-12);
    let h = square_with_square_hole(2.0, 0.6);
    assert_relative_eq!(h.matched_shell(AlphaMode::Inscribed).unwrap().alpha, 0.3, max_relative = 1e-9);
    let e = h.matched_shell(AlphaMode::EqualMeasure).unwrap();
    assert_relative_eq!(PI * e.alpha * e.alpha, 0.36, max_relative = 1e-12);
    assert_eq!(annulus(0.25, 1.0).as_shell().unwrap().alpha, 0.25);
    assert!(rectangle(1.0, 1.0).as_shell().is_none());
}

#[test]
fn invalid_domains() {
    let outside = Domain::new(2, Shape::disk(0.0, 0.0, 1.0), vec![Shape::disk(0.9, 0.0, 0.3)]);
    assert!(outside.is_err());
    let overlap = Domain::new(2, Shape::disk(0.0, 0.0, 1.0), vec![Shape::disk(0.2, 0.0, 0.3), Shape::disk(-0.2, 0.0, 0.3)]);
    assert!(overlap.is_err());
    assert!(Domain::new(2, Shape::disk(0.0, 0.0, -1.0), vec![]).is_err());
    assert!(matches!(mesh(&ball(3, 1.0), 0.1), Err(Error::Unsupported(_))));
}

#[test]
fn serde_round_trip() {
    for (_, d) in planar_examples() {
        let s = serde_json::to_string(&d).unwrap();
        let back: Domain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
    let bad = r#"{"dim":2,"outer":{"kind":"ball","center":[0,0],"radius":1},"extra":1}"#;
    assert!(serde_json::from_str::<Domain>(bad).is_err());
}

proptest! {
    #[test]
    fn pose_round_trip(rot in -PI..PI, tx in -5.0f64..5.0, ty in -5.0f64..5.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let p = Pose { rotation: rot, translation: vec![tx, ty] };
        let w = p.to_world(&p.to_canonical(&[x, y]));
        prop_assert!((w[0] - x).abs() < 1e-12 && (w[1] - y).abs() < 1e-12);
    }

    #[test]
    fn posed_membership_follows_the_pose(rot in -PI..PI, tx in -2.0f64..2.0, x in -1.5f64..1.5, y in -1.5f64..1.5) {
        let d = square_with_disk_hole(2.0, 0.3);
        let p = Pose { rotation: rot, translation: vec![tx, 0.0] };
        let moved = d.clone().with_pose(p.clone());
        let w = p.to_world(&[x, y]);
        prop_assert_eq!(moved.contains(&w), d.contains(&[x, y]));
        prop_assert!((moved.measure() - d.measure()).abs() < 1e-12);
    }

    #[test]
    fn annulus_measure(a in 0.05f64..0.9) {
        let d = annulus(a, 1.0);
        prop_assert!((d.measure() - PI * (1.0 - a * a)).abs() < 1e-12);
        let (mc, err) = d.monte_carlo_measure(20_000);
        prop_assert!((mc - d.measure()).abs() < 5.0 * err + 1e-3);
    }
}
