//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.

use std::io::Write;
use std::time::{Duration, Instant};

use neumann_spectra::cli::reproduce::{self, Experiment};
use neumann_spectra::geometry::examples::*;
use neumann_spectra::geometry::{AlphaMode, Domain};
use neumann_spectra::shell::{neumann_mode_values, Boundary, ShellSpec};
use neumann_spectra::sl_oracle::extrapolated_eigenvalues;
use neumann_spectra::trial::{rayleigh_bound, verify_inequalities, VerifyOptions, MU2, MU3, MU4, MU5};

/// Writes past the test harness capture so the line lands in the log.
fn report(n: usize, pass: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let verdict = if pass && elapsed <= budget { "PASS" } else { "FAIL" };
    let line = format!("criterion {n}: {verdict} ({:.2} s of {} s) {detail}\n", elapsed.as_secs_f64(), budget.as_secs());
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
}

fn failures(e: &Experiment) -> String {
    e.rows.iter().filter(|r| !r.pass).map(|r| format!("[{} = {}]", r.label, r.value)).collect::<Vec<_>>().join(" ")
}

fn check_experiment(n: usize, budget_s: u64, f: fn() -> neumann_spectra::Result<Experiment>) {
    let t = Instant::now();
    let e = f().unwrap();
    let el = t.elapsed();
    let budget = Duration::from_secs(budget_s);
    let detail = if e.rows.len() <= 4 {
        e.rows.iter().map(|r| format!("{} = {:.6}", r.label, r.value)).collect::<Vec<_>>().join(", ")
    } else {
        format!("{} rows {}", e.rows.len(), failures(&e))
    };
    report(n, e.pass, el, budget, &detail);
    assert!(e.pass, "{e:?}");
    assert!(el <= budget, "took {el:?}");
}

#[test]
fn criterion_01_disk_constants() {
    let t = Instant::now();
    let e = reproduce::disk_constants().unwrap();
    let el = t.elapsed();
    let pi_rows = &e.rows[..2];
    let pass = pi_rows.iter().all(|r| r.pass);
    let detail = pi_rows.iter().map(|r| format!("{} = {:.6}", r.label, r.value)).collect::<Vec<_>>().join(", ");
    report(1, pass, el, Duration::from_secs(1), &detail);
    assert!(pass && el <= Duration::from_secs(1));
}

#[test]
fn criterion_02_mu02_below_mu31() {
    let t = Instant::now();
    let e = reproduce::disk_constants().unwrap();
    let el = t.elapsed();
    let rows = &e.rows[2..];
    let pass = rows.iter().all(|r| r.pass);
    let detail = format!("mu[0,2] = {:.4}, mu[3,1] = {:.4}", rows[0].value, rows[1].value);
    report(2, pass, el, Duration::from_secs(1), &detail);
    assert!(pass && el <= Duration::from_secs(1));
}

#[test]
fn criterion_03_fd_oracle_agreement() {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for dim in 2..=5 {
        for a in [0.0, 0.25, 0.5, 0.9] {
            let s = ShellSpec::new(a, 1.0, dim).unwrap();
            for l in 0..=4 {
                let exact = neumann_mode_values(&s, l, 3).unwrap();
                let fd = extrapolated_eigenvalues(&s, l, Boundary::Neumann, 512, 3).unwrap();
                for (e, f) in exact.iter().zip(&fd) {
                    let rel = if *e == 0.0 { f.value.abs() } else { (f.value - e).abs() / e };
                    worst = worst.max(rel);
                }
            }
        }
    }
    let el = t.elapsed();
    let budget = Duration::from_secs(30);
    report(3, worst <= 1e-6, el, budget, &format!("worst relative gap {worst:.2e}"));
    assert!(worst <= 1e-6 && el <= budget);
}

#[test]
fn criterion_04_ordering() {
    check_experiment(4, 20, reproduce::ordering);
}

#[test]
fn criterion_05_monotonicity() {
    check_experiment(5, 10, reproduce::monotonicity);
}

#[test]
fn criterion_06_rectangle() {
    check_experiment(6, 120, reproduce::rectangle);
}

#[test]
fn criterion_07_eccentric_annulus() {
    check_experiment(7, 180, reproduce::eccentric);
}

#[test]
fn criterion_08_two_hole_disk() {
    check_experiment(8, 180, reproduce::two_hole_disk);
}

#[test]
fn criterion_09_inequalities() {
    let t = Instant::now();
    let opts = VerifyOptions::default();
    let mut notes = Vec::new();
    let mut pass = true;

    let ann = verify_inequalities("annulus", &annulus(0.25, 1.0), &opts).unwrap();
    for name in [MU2, MU3, MU4, MU5] {
        let i = ann.inequality(name).unwrap();
        let ok = i.margin.abs() <= 1e-6 * i.rhs;
        pass &= ok;
        if !ok {
            notes.push(format!("annulus {name} margin {:e}", i.margin));
        }
    }

    let sq = verify_inequalities("square-with-disk-hole", &square_with_disk_hole(2.0, 0.3), &opts).unwrap();
    for name in [MU2, MU3, MU4] {
        let i = sq.inequality(name).unwrap();
        let ok = i.applicable && i.pass && i.margin > 0.0;
        pass &= ok;
        notes.push(format!("square-with-hole {name} margin {:.4}", i.margin));
    }

    let oct = verify_inequalities("octagon", &unit_octagon(), &opts).unwrap();
    let i = oct.inequality(MU5).unwrap();
    pass &= i.applicable && i.pass && i.margin > 0.0;
    notes.push(format!("octagon {MU5} margin {:.4}", i.margin));

    let el = t.elapsed();
    let budget = Duration::from_secs(300);
    report(9, pass, el, budget, &notes.join(", "));
    assert!(pass && el <= budget, "{notes:?}");
}

#[test]
fn criterion_10_identities() {
    check_experiment(10, 60, reproduce::identities);
}

#[test]
fn criterion_11_small_hole_limit() {
    check_experiment(11, 5, reproduce::convergence);
}

#[test]
fn criterion_12_rayleigh_bound() {
    let t = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    let strict: [(&str, Domain); 3] = [
        ("square", rectangle(1.0, 1.0)),
        ("square-with-hole", square_with_disk_hole(2.0, 0.3)),
        ("octagon", unit_octagon()),
    ];
    for (name, d) in &strict {
        let s = d.matched_shell(AlphaMode::Inscribed).unwrap();
        for l in [1, 2] {
            let r = rayleigh_bound(d, &s, l).unwrap();
            let ok = r.margin > 0.0 && r.margin > 10.0 * r.error_estimate;
            pass &= ok;
            if !ok {
                notes.push(format!("{name} l={l} margin {:e} err {:e}", r.margin, r.error_estimate));
            }
        }
    }
    for (name, d) in [("disk", disk(1.0)), ("annulus", annulus(0.25, 1.0))] {
        let s = d.as_shell().unwrap();
        for l in [1, 2] {
            let r = rayleigh_bound(&d, &s, l).unwrap();
            let ok = r.margin.abs() <= 1e-6 * r.mu_l1;
            pass &= ok;
            if !ok {
                notes.push(format!("{name} l={l} gap {:e}", r.margin));
            }
        }
    }
    let el = t.elapsed();
    let budget = Duration::from_secs(60);
    report(12, pass, el, budget, &notes.join(", "));
    assert!(pass && el <= budget, "{notes:?}");
}
