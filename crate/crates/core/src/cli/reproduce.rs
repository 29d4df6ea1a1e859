//! Named reproduction experiments.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fmt_sig;
use crate::error::{Error, Result};
use crate::fem::refine_extrapolate;
use crate::geometry::{examples, AlphaMode, Domain};
use crate::harmonics::{basis_z, check_algebraic_identities, inner_product, Surd, Q};
use crate::shell::{
    check_monotonicity, dirichlet_sl_eigenvalue, neumann_spectrum, sl_eigenvalue, unit_ball_volume, ShellSpec,
};
use crate::trial::{gradient_norm_check, orthogonality};

pub const EXPERIMENTS: &[&str] = &[
    "disk-constants",
    "ordering",
    "monotonicity",
    "rectangle-counterexample",
    "eccentric-annulus",
    "two-hole-disk",
    "identities",
    "convergence",
];

/// Mesh levels of the FEM experiments.
pub const RECTANGLE_HS: [f64; 3] = [0.1, 0.05, 0.025];
pub const ECCENTRIC_HS: [f64; 3] = [0.1, 0.05, 0.025];
pub const TWO_HOLE_HS: [f64; 3] = [0.08, 0.04, 0.02];
pub const IDENTITY_SEED: u64 = 0x1d_2024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub value: f64,
    /// Target value, bound, or tolerance ceiling.
    pub reference: f64,
    /// Allowed deviation or required margin.
    pub tolerance: f64,
    pub pass: bool,
}

impl Row {
    /// `|value - reference| <= tolerance`.
    pub fn near(label: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        Self { label: label.into(), value, reference, tolerance, pass: (value - reference).abs() <= tolerance }
    }

    /// `value - reference > margin`.
    pub fn above(label: impl Into<String>, value: f64, reference: f64, margin: f64) -> Self {
        Self { label: label.into(), value, reference, tolerance: margin, pass: value - reference > margin }
    }

    /// `value <= ceiling`.
    pub fn at_most(label: impl Into<String>, value: f64, ceiling: f64) -> Self {
        Self { label: label.into(), value, reference: ceiling, tolerance: 0.0, pass: value <= ceiling }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub name: String,
    pub rows: Vec<Row>,
    pub pass: bool,
}

impl Experiment {
    fn new(name: &str, rows: Vec<Row>) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        Self { name: name.into(), rows, pass }
    }

    /// `label,value,reference,tolerance,pass`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("label,value,reference,tolerance,pass\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.label,
                fmt_sig(r.value),
                fmt_sig(r.reference),
                fmt_sig(r.tolerance),
                r.pass
            );
        }
        s
    }
}

pub fn run(name: &str) -> Result<Experiment> {
    match name {
        "disk-constants" => disk_constants(),
        "ordering" => ordering(),
        "monotonicity" => monotonicity(),
        "rectangle-counterexample" => rectangle(),
        "eccentric-annulus" => eccentric(),
        "two-hole-disk" => two_hole_disk(),
        "identities" => identities(),
        "convergence" => convergence(),
        _ => Err(Error::Parse(format!("unknown experiment {name:?}; expected one of {}", EXPERIMENTS.join(", ")))),
    }
}

fn unit_disk() -> ShellSpec {
    ShellSpec::new(0.0, 1.0, 2).expect("valid shell")
}

pub fn disk_constants() -> Result<Experiment> {
    let s = unit_disk();
    let (m11, m21) = (sl_eigenvalue(&s, 1, 1)?, sl_eigenvalue(&s, 2, 1)?);
    let (m02, m31) = (sl_eigenvalue(&s, 0, 2)?, sl_eigenvalue(&s, 3, 1)?);
    Ok(Experiment::new(
        "disk-constants",
        vec![
            Row::near("pi*mu[1,1]", PI * m11, 10.6499, 5e-4),
            Row::near("pi*mu[2,1]", PI * m21, 29.3059, 5e-4),
            Row::near("mu[0,2]", m02, 14.68, 0.01),
            Row::near("mu[3,1]", m31, 17.65, 0.01),
            Row::above("mu[3,1] > mu[0,2]", m31, m02, 0.0),
        ],
    ))
}

pub fn ordering() -> Result<Experiment> {
    let mut rows = Vec::new();
    for n in 2..=4 {
        for k in 0..=9 {
            let a = k as f64 / 10.0;
            let s = ShellSpec::new(a, 1.0, n)?;
            let tag = format!("N={n} alpha={a}");
            let (m11, m21, m02) = (sl_eigenvalue(&s, 1, 1)?, sl_eigenvalue(&s, 2, 1)?, sl_eigenvalue(&s, 0, 2)?);
            rows.push(Row::above(format!("{tag} mu[2,1] > mu[1,1]"), m21, m11, 0.0));
            rows.push(Row::above(format!("{tag} mu[0,2] > mu[2,1]"), m02, m21, 0.0));
            let l11 = dirichlet_sl_eigenvalue(&s, 1, 1)?;
            rows.push(Row::near(format!("{tag} mu[0,2] = lambda[1,1]"), m02, l11, 1e-6 * l11));
            for l in 0..=4 {
                for j in 1..=3 {
                    let (m, d) = (sl_eigenvalue(&s, l, j)?, dirichlet_sl_eigenvalue(&s, l, j)?);
                    rows.push(Row::above(format!("{tag} lambda[{l},{j}] > mu[{l},{j}]"), d, m, 0.0));
                }
            }
        }
    }
    Ok(Experiment::new("ordering", rows))
}

pub fn monotonicity() -> Result<Experiment> {
    let alphas = [0.0, 0.2, 0.4, 0.6];
    let mut rows = Vec::new();
    for (n, idx) in [(2usize, vec![2, 3, 4, 5]), (3, vec![2, 3, 4, 5])] {
        let rep = check_monotonicity(n, unit_ball_volume(n), &alphas, &idx, 1e-6)?;
        for (i, d) in rep.indices.iter().zip(&rep.min_drop) {
            rows.push(Row::above(format!("N={n} min decrease of mu{i}"), *d, 0.0, 1e-6));
        }
    }
    Ok(Experiment::new("monotonicity", rows))
}

pub fn rectangle() -> Result<Experiment> {
    let spec = refine_extrapolate(&examples::rectangle_sqrt3(), &RECTANGLE_HS, 6)?;
    let (m3, m4) = (spec.values[2].value, spec.values[3].value);
    let (e3, e4) = (4.0 * PI * PI / 3.0, 3.0 * PI * PI);
    let s = unit_disk();
    let (b11, b21) = (PI * sl_eigenvalue(&s, 1, 1)?, PI * sl_eigenvalue(&s, 2, 1)?);
    Ok(Experiment::new(
        "rectangle-counterexample",
        vec![
            Row::near("mu3 vs 4pi^2/3", m3, e3, 0.005 * e3),
            Row::near("mu4 vs 3pi^2", m4, e4, 0.005 * e4),
            Row::above("mu3 > mu[1,1] of the matched disk", m3, b11, 0.0),
            Row::above("mu4 > mu[2,1] of the matched disk", m4, b21, 0.0),
        ],
    ))
}

pub fn eccentric() -> Result<Experiment> {
    let spec = refine_extrapolate(&examples::eccentric_annulus(0.25, 1.0, 0.25), &ECCENTRIC_HS, 4)?;
    let v = &spec.values[1];
    let conc = neumann_spectrum(&ShellSpec::new(0.25, 1.0, 2)?, 2)?.values()[1];
    Ok(Experiment::new(
        "eccentric-annulus",
        vec![Row::above("mu2 eccentric > mu2 concentric (margin > 3 err)", v.value, conc, 3.0 * v.error_estimate)],
    ))
}

pub fn two_hole_disk() -> Result<Experiment> {
    let d = examples::two_hole_disk();
    let spec = refine_extrapolate(&d, &TWO_HOLE_HS, 4)?;
    let v = &spec.values[1];
    let shell = d.matched_shell(AlphaMode::EqualMeasure)?;
    let ms = neumann_spectrum(&shell, 2)?.values()[1];
    Ok(Experiment::new(
        "two-hole-disk",
        vec![
            Row::near("mu2 of the two-hole disk", v.value, 2.74, 0.02),
            Row::near("mu2 of the shell (0.25, 1)", ms, 2.70, 0.01),
            Row::above("mu2 domain > mu2 shell", v.value, ms, v.error_estimate),
        ],
    ))
}

pub fn random_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

/// Number of entries of the exact inner-product table that differ from the
/// expected values `<x_i, x_i> = 1`, `<x_i x_j, x_i x_j> = 1/2`,
/// `<z_i, z_i> = 2`, `<z_i, z_{i+1}> = -1`, all others zero.
pub fn inner_product_mismatches(dim: usize) -> Result<usize> {
    let z = basis_z(dim);
    let all: Vec<(usize, usize, &crate::harmonics::HarmonicPoly)> = z
        .z1
        .iter()
        .enumerate()
        .map(|(i, p)| (1, i, p))
        .chain(z.z2.iter().enumerate().map(|(i, p)| (2, i, p)))
        .chain(z.z3.iter().enumerate().map(|(i, p)| (3, i, p)))
        .collect();
    let mut bad = 0;
    for (sa, ia, p) in &all {
        for (sb, ib, q) in &all {
            let want = match (sa, sb) {
                _ if sa != sb => 0,
                (1, _) => {
                    if ia == ib {
                        2
                    } else {
                        0
                    }
                }
                (2, _) => {
                    if ia == ib {
                        1
                    } else {
                        0
                    }
                }
                _ => match ia.abs_diff(*ib) {
                    0 => 4,
                    1 => -2,
                    _ => 0,
                },
            };
            if inner_product(p, q)? != Surd::rational(Q::new(want, 2)) {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

fn quadrature_domains() -> Vec<(&'static str, Domain)> {
    vec![
        ("square", examples::rectangle(1.0, 1.0)),
        ("octagon", examples::unit_octagon()),
        ("l4-ball", examples::lp_ball(4.0, 1.0)),
    ]
}

pub fn identities() -> Result<Experiment> {
    let mut rows = Vec::new();
    for n in 2..=6 {
        let rep = check_algebraic_identities(n, &random_points(n, 100, IDENTITY_SEED + n as u64));
        rows.push(Row::at_most(format!("N={n} algebraic identities"), rep.max(), 1e-12));
        rows.push(Row::at_most(format!("N={n} inner-product table mismatches"), inner_product_mismatches(n)? as f64, 0.0));
    }
    for (name, d) in quadrature_domains() {
        let s = d.matched_shell(AlphaMode::Inscribed)?;
        let o = orthogonality(&d, &s)?;
        rows.push(Row::at_most(format!("{name} Gram off-diagonal"), o.offdiag_rel, 1e-6));
        rows.push(Row::at_most(format!("{name} mean"), o.mean_rel, 1e-6));
        for c in gradient_norm_check(&d, &s)? {
            rows.push(Row::at_most(format!("{name} gradient norm {}", c.function), c.rel, 1e-8));
        }
    }
    Ok(Experiment::new("identities", rows))
}

pub fn convergence() -> Result<Experiment> {
    let mut rows = Vec::new();
    for n in [2, 3] {
        let m0 = sl_eigenvalue(&ShellSpec::new(0.0, 1.0, n)?, 1, 1)?;
        let gaps = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&a| Ok((a, (sl_eigenvalue(&ShellSpec::new(a, 1.0, n)?, 1, 1)? - m0).abs())))
            .collect::<Result<Vec<_>>>()?;
        rows.push(Row::at_most(format!("N={n} |mu[1,1](1e-3) - mu[1,1](0)|"), gaps[2].1, 1e-2));
        for w in gaps.windows(2) {
            rows.push(Row::above(format!("N={n} gap shrinks from alpha={} to {}", w[0].0, w[1].0), w[0].1, w[1].1, 0.0));
        }
    }
    Ok(Experiment::new("convergence", rows))
}
