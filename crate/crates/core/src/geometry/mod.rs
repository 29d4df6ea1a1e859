//! Domains `Omega = Omega_out \ closure(Omega_in)`: membership, measure,
//! matched shells, symmetry detection, meshing and quadrature.

mod mesh;
mod quadrature;
mod shape;
mod symmetry;

pub use mesh::{mesh, BoundaryEdge, Curve, Family, Mesh, MeshQuality};
pub use quadrature::{
    integrate, integrate_mesh, polar_integrate, polar_integrate_vec, Integral, PolarRegion, TriangleRule,
};
pub use shape::{lp_ball_volume, lp_norm, regular_polygon_radius, signed_area, Shape};
pub use symmetry::{check_central_symmetry, check_symmetry, sampled_symmetry, SymmetryMethod, SymmetryVerdict};

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shell::{equal_measure_shell, unit_ball_volume, ShellSpec};

/// Seed for every sampled geometric check.
pub const SAMPLE_SEED: u64 = 0x5eed_2024;

/// Rotation in the `(x1, x2)` plane followed by a translation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Pose {
    #[serde(default)]
    pub rotation: f64,
    #[serde(default)]
    pub translation: Vec<f64>,
}

impl Pose {
    pub fn is_identity(&self) -> bool {
        self.rotation == 0.0 && self.translation.iter().all(|t| *t == 0.0)
    }

    /// Canonical-frame coordinates of a world point.
    pub fn to_canonical(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = x.to_vec();
        for (k, t) in self.translation.iter().enumerate() {
            y[k] -= t;
        }
        if self.rotation != 0.0 && y.len() >= 2 {
            let (s, c) = self.rotation.sin_cos();
            let (a, b) = (y[0], y[1]);
            y[0] = c * a + s * b;
            y[1] = -s * a + c * b;
        }
        y
    }

    pub fn to_world(&self, y: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = y.to_vec();
        if self.rotation != 0.0 && x.len() >= 2 {
            let (s, c) = self.rotation.sin_cos();
            let (a, b) = (x[0], x[1]);
            x[0] = c * a - s * b;
            x[1] = s * a + c * b;
        }
        for (k, t) in self.translation.iter().enumerate() {
            x[k] += t;
        }
        x
    }
}

/// How the inner radius of the matched shell is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    /// Largest centred ball inside `Omega_in`.
    #[default]
    Inscribed,
    /// `|B_alpha| = |Omega_in|`.
    EqualMeasure,
}

/// `Omega_out` minus the closure of the union of the holes, placed by `pose`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub dim: usize,
    pub outer: Shape,
    #[serde(default)]
    pub holes: Vec<Shape>,
    #[serde(default)]
    pub pose: Pose,
}

impl Domain {
    /// Validates the primitives, then checks by sampling that the holes are
    /// pairwise disjoint and strictly inside the outer region.
    pub fn new(dim: usize, outer: Shape, holes: Vec<Shape>) -> Result<Self> {
        let d = Self { dim, outer, holes, pose: Pose::default() };
        d.validate()?;
        Ok(d)
    }

    pub fn with_pose(mut self, pose: Pose) -> Self {
        self.pose = pose;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::Geometry("dimension must be at least 2".into()));
        }
        for s in std::iter::once(&self.outer).chain(&self.holes) {
            s.validate()?;
            if let Some(d) = s.dim() {
                if d != self.dim {
                    return Err(Error::Geometry(format!("primitive of dimension {d} in a {}-dimensional domain", self.dim)));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        for (i, hole) in self.holes.iter().enumerate() {
            let (lo, hi) = hole
                .bounding_box()
                .ok_or_else(|| Error::Geometry(format!("hole {i} is unbounded")))?;
            let pad: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.02 * (b - a)).collect();
            let mut hits = 0;
            for _ in 0..4000 {
                let x: Vec<f64> = (0..self.dim)
                    .map(|k| rng.random_range(lo[k] - pad[k]..hi[k] + pad[k]))
                    .collect();
                if !hole.contains(&x) {
                    continue;
                }
                hits += 1;
                if !self.outer.contains(&x) {
                    return Err(Error::Geometry(format!("hole {i} is not inside the outer region")));
                }
                if let Some(j) = (0..self.holes.len()).find(|&j| j != i && self.holes[j].contains(&x)) {
                    return Err(Error::Geometry(format!("holes {i} and {j} overlap")));
                }
            }
            if hits == 0 {
                return Err(Error::Geometry(format!("hole {i} is empty")));
            }
            // a thin collar around the hole must also lie in the outer region
            if self.dim == 2 {
                if let Some(c) = hole.planar_center() {
                    for k in 0..720 {
                        let t = 2.0 * PI * k as f64 / 720.0;
                        let r = hole.boundary_radius(t).unwrap_or(0.0) * 1.0005;
                        let p = [c[0] + r * t.cos(), c[1] + r * t.sin()];
                        if r > 0.0 && !self.outer.contains(&p) {
                            return Err(Error::Geometry(format!("hole {i} touches the outer boundary")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Membership in world coordinates.
    pub fn contains(&self, x: &[f64]) -> bool {
        let y = self.pose.to_canonical(x);
        self.contains_canonical(&y)
    }

    pub fn contains_canonical(&self, y: &[f64]) -> bool {
        self.outer.contains(y) && !self.holes.iter().any(|h| h.contains(y))
    }

    /// Membership in the union of the holes (canonical frame).
    pub fn in_holes(&self, y: &[f64]) -> bool {
        self.holes.iter().any(|h| h.contains(y))
    }

    /// Lebesgue measure: closed form when every primitive has one, polar
    /// quadrature for planar star-shaped regions, Monte Carlo otherwise.
    pub fn measure(&self) -> f64 {
        if let Some(v) = self.exact_measure() {
            return v;
        }
        if let Some(region) = PolarRegion::from_domain(self) {
            return region.area();
        }
        self.monte_carlo_measure(1_000_000).0
    }

    pub fn exact_measure(&self) -> Option<f64> {
        let outer = self.outer.exact_measure()?;
        let holes: Option<f64> = self.holes.iter().map(|h| h.exact_measure()).sum();
        Some(outer - holes?)
    }

    /// Measure of the union of the holes.
    pub fn hole_measure(&self) -> f64 {
        self.holes
            .iter()
            .map(|h| {
                h.exact_measure().unwrap_or_else(|| {
                    Domain { dim: self.dim, outer: h.clone(), holes: vec![], pose: Pose::default() }
                        .monte_carlo_measure(1_000_000)
                        .0
                })
            })
            .sum()
    }

    /// Monte Carlo estimate and its standard error.
    pub fn monte_carlo_measure(&self, samples: usize) -> (f64, f64) {
        let Some((lo, hi)) = self.outer.bounding_box() else {
            return (f64::INFINITY, 0.0);
        };
        let vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        let mut hits = 0usize;
        let mut x = vec![0.0; self.dim];
        for _ in 0..samples {
            for k in 0..self.dim {
                x[k] = rng.random_range(lo[k]..hi[k]);
            }
            if self.contains_canonical(&x) {
                hits += 1;
            }
        }
        let p = hits as f64 / samples as f64;
        (p * vol, vol * (p * (1.0 - p) / samples as f64).sqrt())
    }

    /// `sup { r : B_r(0) in Omega_in }` in the canonical frame.
    pub fn inscribed_alpha(&self) -> Result<f64> {
        if self.holes.is_empty() {
            return Ok(0.0);
        }
        let origin = vec![0.0; self.dim];
        let Some(hole) = self.holes.iter().find(|h| h.contains(&origin)) else {
            return Err(Error::Precondition(
                "the origin does not lie in Omega_in; supply alpha in equal-measure mode".into(),
            ));
        };
        if let Some(r) = hole.inradius_about(&origin) {
            return Ok(r);
        }
        // bisection on sampled spheres
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        let dirs: Vec<Vec<f64>> = (0..4000)
            .map(|_| {
                let v: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                v.into_iter().map(|a| a / n).collect()
            })
            .collect();
        let inside = |r: f64| {
            dirs.iter().all(|d| {
                let p: Vec<f64> = d.iter().map(|a| a * r).collect();
                self.in_holes(&p)
            })
        };
        let (mut a, mut b) = (0.0, 1.0);
        while inside(b) {
            b *= 2.0;
            if b > 1e6 {
                return Err(Error::Geometry("Omega_in is unbounded".into()));
            }
        }
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if inside(m) {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(a)
    }

    /// The shell `B_beta \ B_alpha` with `|Omega| = |B_beta \ B_alpha|`.
    pub fn matched_shell(&self, mode: AlphaMode) -> Result<ShellSpec> {
        let alpha = match mode {
            AlphaMode::Inscribed => self.inscribed_alpha()?,
            AlphaMode::EqualMeasure => {
                (self.hole_measure() / unit_ball_volume(self.dim)).powf(1.0 / self.dim as f64)
            }
        };
        equal_measure_shell(alpha, self.measure(), self.dim)
    }

    /// Whether the domain is a centred ball or shell in its canonical frame.
    pub fn as_shell(&self) -> Option<ShellSpec> {
        let centred = |c: &[f64]| c.iter().all(|x| *x == 0.0);
        let Shape::Ball { center, radius } = &self.outer else { return None };
        if !centred(center) {
            return None;
        }
        match self.holes.as_slice() {
            [] => ShellSpec::new(0.0, *radius, self.dim).ok(),
            [Shape::Ball { center: c, radius: a }] if centred(c) => ShellSpec::new(*a, *radius, self.dim).ok(),
            _ => None,
        }
    }
}

/// Named example domains.
pub mod examples {
    use super::*;

    pub fn disk(radius: f64) -> Domain {
        Domain { dim: 2, outer: Shape::disk(0.0, 0.0, radius), holes: vec![], pose: Pose::default() }
    }

    pub fn ball(dim: usize, radius: f64) -> Domain {
        Domain { dim, outer: Shape::Ball { center: vec![0.0; dim], radius }, holes: vec![], pose: Pose::default() }
    }

    pub fn annulus(alpha: f64, beta: f64) -> Domain {
        Domain {
            dim: 2,
            outer: Shape::disk(0.0, 0.0, beta),
            holes: vec![Shape::disk(0.0, 0.0, alpha)],
            pose: Pose::default(),
        }
    }

    /// Unit-type disk of radius `beta` minus a disk of radius `alpha` centred at `(s, 0)`.
    pub fn eccentric_annulus(alpha: f64, beta: f64, s: f64) -> Domain {
        Domain {
            dim: 2,
            outer: Shape::disk(0.0, 0.0, beta),
            holes: vec![Shape::disk(s, 0.0, alpha)],
            pose: Pose::default(),
        }
    }

    pub fn rectangle(width: f64, height: f64) -> Domain {
        Domain { dim: 2, outer: Shape::rectangle(width, height), holes: vec![], pose: Pose::default() }
    }

    /// The `sqrt(3) x 1/sqrt(3)` rectangle of unit area.
    pub fn rectangle_sqrt3() -> Domain {
        let a = 3f64.sqrt();
        rectangle(a, 1.0 / a)
    }

    pub fn square_with_disk_hole(side: f64, radius: f64) -> Domain {
        Domain {
            dim: 2,
            outer: Shape::rectangle(side, side),
            holes: vec![Shape::disk(0.0, 0.0, radius)],
            pose: Pose::default(),
        }
    }

    pub fn square_with_square_hole(side: f64, hole_side: f64) -> Domain {
        Domain {
            dim: 2,
            outer: Shape::rectangle(side, side),
            holes: vec![Shape::rectangle(hole_side, hole_side)],
            pose: Pose::default(),
        }
    }

    pub fn regular_polygon(sides: usize, circumradius: f64) -> Domain {
        Domain { dim: 2, outer: Shape::regular_polygon(sides, circumradius), holes: vec![], pose: Pose::default() }
    }

    /// Regular octagon of unit area.
    pub fn unit_octagon() -> Domain {
        let r = (1.0 / (2.0 * 2f64.sqrt())).sqrt();
        regular_polygon(8, r)
    }

    pub fn lp_ball(p: f64, radius: f64) -> Domain {
        Domain {
            dim: 2,
            outer: Shape::LpBall { center: vec![0.0, 0.0], radius, p },
            holes: vec![],
            pose: Pose::default(),
        }
    }

    /// Unit disk minus two disks of radius `sqrt(2)/8` centred at `(+-d/2, 0)`,
    /// `d = 3/5 + sqrt(2)/4`.
    pub fn two_hole_disk() -> Domain {
        let r = 2f64.sqrt() / 8.0;
        let d = 0.6 + 2f64.sqrt() / 4.0;
        Domain {
            dim: 2,
            outer: Shape::disk(0.0, 0.0, 1.0),
            holes: vec![Shape::disk(-d / 2.0, 0.0, r), Shape::disk(d / 2.0, 0.0, r)],
            pose: Pose::default(),
        }
    }

    /// `{ ||x||_inf < 1, x_1 ... x_N > 0 } u B_{1/2}(0)`.
    pub fn positive_product_cube_with_ball(dim: usize) -> Domain {
        let cube = Shape::Intersection {
            parts: vec![
                Shape::LpBall { center: vec![0.0; dim], radius: 1.0, p: f64::INFINITY },
                Shape::PositiveProduct { dim },
            ],
        };
        Domain {
            dim,
            outer: Shape::Union { parts: vec![cube, Shape::Ball { center: vec![0.0; dim], radius: 0.5 }] },
            holes: vec![],
            pose: Pose::default(),
        }
    }

    /// Two opposite open unit orthant cubes joined by three balls of radius
    /// `alpha` at `0` and `+-e_1`.
    pub fn opposite_cubes_with_balls(dim: usize, alpha: f64) -> Domain {
        let cube = |s: i8| Shape::Intersection {
            parts: vec![
                Shape::LpBall { center: vec![0.0; dim], radius: 1.0, p: f64::INFINITY },
                Shape::Orthant { signs: vec![s; dim] },
            ],
        };
        let mut e1 = vec![0.0; dim];
        e1[0] = 1.0;
        let m1: Vec<f64> = e1.iter().map(|x| -x).collect();
        Domain {
            dim,
            outer: Shape::Union {
                parts: vec![
                    cube(1),
                    cube(-1),
                    Shape::Ball { center: vec![0.0; dim], radius: alpha },
                    Shape::Ball { center: e1, radius: alpha },
                    Shape::Ball { center: m1, radius: alpha },
                ],
            },
            holes: vec![],
            pose: Pose::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn measures() {
        assert!((disk(1.0).measure() - PI).abs() < 1e-15);
        assert!((rectangle_sqrt3().measure() - 1.0).abs() < 1e-15);
        assert!((two_hole_disk().measure() - 15.0 * PI / 16.0).abs() < 1e-14);
        assert!((unit_octagon().measure() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn matched_shells() {
        let s = annulus(0.25, 1.0).matched_shell(AlphaMode::Inscribed).unwrap();
        assert!((s.alpha - 0.25).abs() < 1e-15 && (s.beta - 1.0).abs() < 1e-14);
        let s = square_with_disk_hole(2.0, 0.3).matched_shell(AlphaMode::Inscribed).unwrap();
        let beta = ((4.0 - 0.09 * PI) / PI + 0.09).sqrt();
        assert!((s.alpha - 0.3).abs() < 1e-15 && (s.beta - beta).abs() < 1e-14);
        let d = square_with_disk_hole(2.0, 0.3);
        assert!((d.measure() - PI * (s.beta * s.beta - s.alpha * s.alpha)).abs() < 1e-10);
        assert!(matches!(two_hole_disk().matched_shell(AlphaMode::Inscribed), Err(Error::Precondition(_))));
        let s = two_hole_disk().matched_shell(AlphaMode::EqualMeasure).unwrap();
        assert!((s.alpha - 0.25).abs() < 1e-14 && (s.beta - 1.0).abs() < 1e-14);
    }

    #[test]
    fn invalid_holes() {
        assert!(Domain::new(2, Shape::disk(0.0, 0.0, 1.0), vec![Shape::disk(0.9, 0.0, 0.2)]).is_err());
        assert!(Domain::new(
            2,
            Shape::disk(0.0, 0.0, 1.0),
            vec![Shape::disk(0.1, 0.0, 0.2), Shape::disk(-0.1, 0.0, 0.2)]
        )
        .is_err());
        assert!(Domain::new(2, Shape::disk(0.0, 0.0, 1.0), vec![Shape::disk(0.25, 0.0, 0.25)]).is_ok());
    }

    #[test]
    fn pose_round_trip() {
        let p = Pose { rotation: 0.7, translation: vec![1.0, -2.0] };
        let x = [0.3, 0.4];
        let y = p.to_world(&p.to_canonical(&x));
        assert!((y[0] - x[0]).abs() < 1e-15 && (y[1] - x[1]).abs() < 1e-15);
        let d = square_with_disk_hole(2.0, 0.3).with_pose(p.clone());
        assert!(d.contains(&p.to_world(&[0.9, 0.9])));
        assert!(!d.contains(&p.to_world(&[0.1, 0.1])));
    }

    #[test]
    fn shell_recognition() {
        assert_eq!(annulus(0.25, 1.0).as_shell(), Some(ShellSpec::new(0.25, 1.0, 2).unwrap()));
        assert_eq!(eccentric_annulus(0.25, 1.0, 0.25).as_shell(), None);
        assert!(eccentric_annulus(0.25, 1.0, 0.25).inscribed_alpha().is_err());
    }
}
