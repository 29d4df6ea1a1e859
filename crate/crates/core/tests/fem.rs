use std::f64::consts::PI;

use neumann_spectra::fem::{
    assemble, assemble_sequential, dense, refine_extrapolate, smallest_eigs, solve_level, subspace,
};
use neumann_spectra::geometry::examples::*;
use neumann_spectra::geometry::mesh;
use neumann_spectra::shell::{neumann_spectrum, ShellSpec};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn rectangle_matches_cosine_modes() {
    // (pi m / a)^2 + (pi n / b)^2 on the 2 x 1 rectangle
    let s = refine_extrapolate(&rectangle(2.0, 1.0), &[0.1, 0.05, 0.025], 6).unwrap();
    let exact = [0.0, 0.25, 1.0, 1.0, 1.25, 2.0].map(|c| c * PI * PI);
    assert!(s.values[0].value.abs() < 1e-8);
    for (v, e) in s.values.iter().zip(exact).skip(1) {
        assert!(rel(v.value, e) < 1e-4, "mu{} = {} vs {e}", v.k, v.value);
        assert!(v.error_estimate < 1e-3 * e);
    }
    let cl = s.cluster_ranges();
    assert_eq!(cl, vec![(1, 1), (2, 2), (3, 4), (5, 5), (6, 6)]);
}

#[test]
fn disk_and_annulus_match_bessel() {
    for (d, shell) in [
        (disk(1.0), ShellSpec::new(0.0, 1.0, 2).unwrap()),
        (annulus(0.25, 1.0), ShellSpec::new(0.25, 1.0, 2).unwrap()),
    ] {
        let s = refine_extrapolate(&d, &[0.1, 0.05, 0.025], 6).unwrap();
        let exact = neumann_spectrum(&shell, 6).unwrap().values();
        for (v, e) in s.values.iter().zip(exact).skip(1) {
            assert!(rel(v.value, e) < 5e-4, "mu{} = {} vs {e}", v.k, v.value);
        }
        // mu2 = mu3 up to discretization
        assert!(rel(s.values[1].value, s.values[2].value) < 1e-4);
    }
}

#[test]
fn error_estimate_is_honest_on_the_disk() {
    let s = refine_extrapolate(&disk(1.0), &[0.1, 0.05, 0.025], 2).unwrap();
    let exact = neumann_spectrum(&ShellSpec::new(0.0, 1.0, 2).unwrap(), 2).unwrap().values()[1];
    let v = &s.values[1];
    assert!((v.value - exact).abs() <= 10.0 * v.error_estimate + 1e-9, "{v:?} vs {exact}");
}

#[test]
fn finer_meshes_approach_from_above() {
    let exact = PI * PI / 3.0;
    let w = 3f64.sqrt();
    let d = rectangle(w, 1.0 / w);
    let a = solve_level(&d, 0.2, 3).unwrap().values[1];
    let b = solve_level(&d, 0.1, 3).unwrap().values[1];
    assert!(a > b && b > exact, "{a} {b} {exact}");
}

#[test]
fn parallel_and_sequential_assembly_agree() {
    let m = mesh(&two_hole_disk(), 0.1).unwrap();
    assert_eq!(assemble(&m).unwrap(), assemble_sequential(&m).unwrap());
}

#[test]
fn solvers_agree() {
    let m = mesh(&unit_octagon(), 0.06).unwrap();
    let p = assemble(&m).unwrap();
    let a = dense(&p, 5).unwrap();
    let b = subspace(&p, 5).unwrap();
    let c = smallest_eigs(&p, 5).unwrap();
    for i in 0..5 {
        assert!((a.values[i] - b.values[i]).abs() < 1e-8 * a.values[i].max(1.0));
        assert!((a.values[i] - c.values[i]).abs() < 1e-8 * a.values[i].max(1.0));
    }
    assert!(smallest_eigs(&p, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pencil_invariants(alpha in 0.1f64..0.7, h in 0.1f64..0.3) {
        let m = mesh(&annulus(alpha, 1.0), h).unwrap();
        let p = assemble(&m).unwrap();
        let area: f64 = p.m.row_sums().iter().sum();
        prop_assert!((area - m.area()).abs() < 1e-12);
        prop_assert!(p.k.row_sums().iter().all(|s| s.abs() < 1e-10));
        let ones = vec![1.0; p.k.n];
        prop_assert!(p.k.dot(&ones, &ones).abs() < 1e-10);
    }

    #[test]
    fn eigenvalues_scale_with_the_domain(s in 0.5f64..2.0) {
        let base = solve_level(&rectangle(1.0, 1.0), 0.1, 3).unwrap().values[1];
        let scaled = solve_level(&rectangle(s, s), 0.1 * s, 3).unwrap().values[1];
        prop_assert!(rel(scaled * s * s, base) < 1e-9);
    }
}
