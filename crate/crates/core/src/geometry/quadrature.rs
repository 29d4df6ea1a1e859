//! Triangle rules with circular-segment corrections, and tensor Gauss rules in
//! polar coordinates for centred star-shaped regions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::mesh::{mesh, Curve, Mesh};
use super::{Domain, Shape};
use crate::error::Result;
use crate::numerics::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriangleRule {
    /// Degree 2.
    Three,
    /// Degree 5.
    Seven,
}

impl TriangleRule {
    /// Barycentric points and weights summing to one.
    pub fn points(self) -> Vec<([f64; 3], f64)> {
        match self {
            TriangleRule::Three => {
                let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
                vec![([a, b, b], 1.0 / 3.0), ([b, a, b], 1.0 / 3.0), ([b, b, a], 1.0 / 3.0)]
            }
            TriangleRule::Seven => {
                let r = 15f64.sqrt();
                let (a, wa) = ((6.0 - r) / 21.0, (155.0 - r) / 1200.0);
                let (b, wb) = ((6.0 + r) / 21.0, (155.0 + r) / 1200.0);
                vec![
                    ([1.0 / 3.0; 3], 9.0 / 40.0),
                    ([1.0 - 2.0 * a, a, a], wa),
                    ([a, 1.0 - 2.0 * a, a], wa),
                    ([a, a, 1.0 - 2.0 * a], wa),
                    ([1.0 - 2.0 * b, b, b], wb),
                    ([b, 1.0 - 2.0 * b, b], wb),
                    ([b, b, 1.0 - 2.0 * b], wb),
                ]
            }
        }
    }
}

/// A quadrature value with an error estimate from a refinement comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

/// Integral of `f` over the thin region between a boundary chord and its arc.
fn segment_integral<F: Fn([f64; 2]) -> f64>(f: &F, p: [f64; 2], q: [f64; 2], c: [f64; 2], r: f64) -> f64 {
    let ta = (p[1] - c[1]).atan2(p[0] - c[0]);
    let mut tb = (q[1] - c[1]).atan2(q[0] - c[0]);
    let mut d = tb - ta;
    if d > PI {
        tb -= 2.0 * PI;
        d -= 2.0 * PI;
    } else if d < -PI {
        tb += 2.0 * PI;
        d += 2.0 * PI;
    }
    let half = 0.5 * d.abs();
    let tm = 0.5 * (ta + tb);
    let chord = r * half.cos();
    let (x, w) = gauss_legendre(4);
    let mut sum = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let t = tm + 0.5 * d.abs() * xi;
        let r0 = chord / (t - tm).cos();
        let mut inner = 0.0;
        for (yj, wj) in x.iter().zip(&w) {
            let rr = r0 + 0.5 * (r - r0) * (1.0 + yj);
            inner += wj * rr * f([c[0] + rr * t.cos(), c[1] + rr * t.sin()]);
        }
        sum += wi * 0.5 * (r - r0) * inner;
    }
    sum * half
}

/// Triangle-rule integral over the mesh, corrected for the segments between
/// boundary chords and the circles they approximate.
pub fn integrate_mesh<F: Fn([f64; 2]) -> f64>(m: &Mesh, f: F, rule: TriangleRule) -> f64 {
    let pts = rule.points();
    let mut sum = 0.0;
    for t in &m.triangles {
        let [a, b, c] = [m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]];
        let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
        let mut s = 0.0;
        for (l, w) in &pts {
            let x = [l[0] * a[0] + l[1] * b[0] + l[2] * c[0], l[0] * a[1] + l[1] * b[1] + l[2] * c[1]];
            s += w * f(x);
        }
        sum += area * s;
    }
    for e in &m.boundary {
        if let Curve::Circle { center, radius } = e.curve {
            let (p, q) = (m.vertices[e.a], m.vertices[e.b]);
            // domain on the left: centre on the left means the arc bulges outward
            let left = (q[0] - p[0]) * (center[1] - p[1]) - (q[1] - p[1]) * (center[0] - p[0]) > 0.0;
            let seg = segment_integral(&f, p, q, center, radius);
            sum += if left { seg } else { -seg };
        }
    }
    sum
}

/// Degree-5 rule on meshes of size `h` and `h/2`; the fine value is returned.
pub fn integrate<F: Fn([f64; 2]) -> f64>(domain: &Domain, f: F, h: f64) -> Result<Integral> {
    let coarse = integrate_mesh(&mesh(domain, h)?, &f, TriangleRule::Seven);
    let fine = integrate_mesh(&mesh(domain, h / 2.0)?, &f, TriangleRule::Seven);
    Ok(Integral { value: fine, error_estimate: (fine - coarse).abs() })
}

/// An origin-centred planar region `rho_in(theta) < r < rho_out(theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarRegion {
    pub outer: Shape,
    pub hole: Option<Shape>,
}

impl PolarRegion {
    /// Available when the outer boundary and the optional single hole are
    /// star-shaped about the origin of the canonical frame.
    pub fn from_domain(domain: &Domain) -> Option<Self> {
        if domain.dim != 2 {
            return None;
        }
        let star = |s: &Shape| s.planar_center() == Some([0.0, 0.0]) && s.boundary_radius(0.0).is_some();
        if !star(&domain.outer) {
            return None;
        }
        match domain.holes.as_slice() {
            [] => Some(Self { outer: domain.outer.clone(), hole: None }),
            [h] if star(h) => Some(Self { outer: domain.outer.clone(), hole: Some(h.clone()) }),
            _ => None,
        }
    }

    pub fn inner_radius(&self, theta: f64) -> f64 {
        self.hole.as_ref().map_or(0.0, |h| h.boundary_radius(theta).unwrap())
    }

    pub fn outer_radius(&self, theta: f64) -> f64 {
        self.outer.boundary_radius(theta).unwrap()
    }

    /// Angular breakpoints covering `[t0, t0 + 2 pi]`.
    fn theta_breaks(&self) -> Vec<f64> {
        let mut c = self.outer.corner_angles();
        if let Some(h) = &self.hole {
            c.extend(h.corner_angles());
        }
        c.sort_by(f64::total_cmp);
        c.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        if c.is_empty() {
            c.push(0.0);
        }
        let first = c[0];
        c.push(first + 2.0 * PI);
        c
    }

    pub fn area(&self) -> f64 {
        polar_integrate(self, |_, _| 1.0, &[], 16, 12)
    }
}

/// `int_region f(x, r) dx` by Gauss rules in `theta` (split at corners and
/// where a radial break meets a boundary) and in `r` (split at
/// `radial_breaks`), with `panels` angular panels in total and `order` points
/// per panel.
pub fn polar_integrate<F: Fn([f64; 2], f64) -> f64>(
    region: &PolarRegion,
    f: F,
    radial_breaks: &[f64],
    panels: usize,
    order: usize,
) -> f64 {
    polar_integrate_vec(region, 1, |x, r, out| out[0] = f(x, r), radial_breaks, panels, order)[0]
}

/// Angles where `rho(theta) - b` changes sign for one of the boundaries.
fn crossing_angles(region: &PolarRegion, b: f64) -> Vec<f64> {
    let n = 2048;
    let tol = 1e-12 * b.abs().max(1.0);
    let mut out = Vec::new();
    for which in 0..2 {
        if which == 1 && region.hole.is_none() {
            continue;
        }
        let g = |t: f64| if which == 0 { region.outer_radius(t) - b } else { region.inner_radius(t) - b };
        // last sample with a definite sign
        let mut last: Option<(f64, f64)> = None;
        for k in 0..=n {
            let t = 2.0 * PI * k as f64 / n as f64;
            let gt = g(t);
            if gt.abs() <= tol {
                continue;
            }
            if let Some((t0, g0)) = last {
                if g0 * gt < 0.0 {
                    let (mut a, mut c, mut ga) = (t0, t, g0);
                    for _ in 0..200 {
                        if c - a < 1e-15 {
                            break;
                        }
                        let m = 0.5 * (a + c);
                        let gm = g(m);
                        if gm.abs() <= tol {
                            a = m;
                            c = m;
                            break;
                        }
                        if ga * gm < 0.0 {
                            c = m;
                        } else {
                            a = m;
                            ga = gm;
                        }
                    }
                    out.push(0.5 * (a + c));
                }
            }
            last = Some((t, gt));
        }
    }
    out
}

/// Vector-valued form of [`polar_integrate`]: `f` writes `dim` integrands.
pub fn polar_integrate_vec<F: Fn([f64; 2], f64, &mut [f64])>(
    region: &PolarRegion,
    dim: usize,
    f: F,
    radial_breaks: &[f64],
    panels: usize,
    order: usize,
) -> Vec<f64> {
    let (x, w) = gauss_legendre(order);
    let mut tb = region.theta_breaks();
    let t_first = tb[0];
    for &b in radial_breaks {
        for t in crossing_angles(region, b) {
            let t = t_first + (t - t_first).rem_euclid(2.0 * PI);
            tb.push(t);
        }
    }
    tb.sort_by(f64::total_cmp);
    tb.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut total = vec![0.0; dim];
    let mut radial = vec![0.0; dim];
    let mut val = vec![0.0; dim];
    for piece in tb.windows(2) {
        let (t0, t1) = (piece[0], piece[1]);
        let np = ((panels as f64 * (t1 - t0) / (2.0 * PI)).round() as usize).max(1);
        let ht = (t1 - t0) / np as f64;
        for p in 0..np {
            let tm = t0 + (p as f64 + 0.5) * ht;
            for (xi, wi) in x.iter().zip(&w) {
                let t = tm + 0.5 * ht * xi;
                let (c, s) = (t.cos(), t.sin());
                let (ri, ro) = (region.inner_radius(t), region.outer_radius(t));
                let mut edges = vec![ri];
                edges.extend(radial_breaks.iter().copied().filter(|b| *b > ri && *b < ro));
                edges.push(ro);
                radial.iter_mut().for_each(|v| *v = 0.0);
                for e in edges.windows(2) {
                    let (a, b) = (e[0], e[1]);
                    let nr = (((b - a) / (ro - ri).max(1e-300)) * (panels as f64 / 8.0)).ceil().max(1.0) as usize;
                    let hr = (b - a) / nr as f64;
                    for q in 0..nr {
                        let rm = a + (q as f64 + 0.5) * hr;
                        for (yj, wj) in x.iter().zip(&w) {
                            let r = rm + 0.5 * hr * yj;
                            f([r * c, r * s], r, &mut val);
                            let k = 0.5 * hr * wj * r;
                            for (acc, v) in radial.iter_mut().zip(&val) {
                                *acc += k * v;
                            }
                        }
                    }
                }
                for (acc, v) in total.iter_mut().zip(&radial) {
                    *acc += 0.5 * ht * wi * v;
                }
            }
        }
    }
    total
}

impl PolarRegion {
    /// Polar rule at `panels` and `2 panels`; the fine value is returned.
    pub fn integrate<F: Fn([f64; 2], f64) -> f64>(
        &self,
        f: F,
        radial_breaks: &[f64],
        panels: usize,
        order: usize,
    ) -> Integral {
        let coarse = polar_integrate(self, &f, radial_breaks, panels, order);
        let fine = polar_integrate(self, &f, radial_breaks, 2 * panels, order);
        Integral { value: fine, error_estimate: (fine - coarse).abs() }
    }
}

#[cfg(test)]
mod tests {
    use super::super::examples::*;
    use super::*;

    #[test]
    fn rule_exactness() {
        // monomials x^a y^b on the reference triangle: a! b! / (a + b + 2)!
        let fact = |n: u32| (1..=n).product::<u32>() as f64;
        for (rule, deg) in [(TriangleRule::Three, 2), (TriangleRule::Seven, 5)] {
            for a in 0..=deg {
                for b in 0..=(deg - a) {
                    let q: f64 = rule
                        .points()
                        .iter()
                        .map(|(l, w)| w * l[1].powi(a as i32) * l[2].powi(b as i32))
                        .sum::<f64>()
                        * 0.5;
                    let exact = fact(a) * fact(b) / fact(a + b + 2);
                    assert!((q - exact).abs() < 1e-15, "{rule:?} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn disk_area_with_segments() {
        let m = mesh(&disk(1.0), 0.02).unwrap();
        let v = integrate_mesh(&m, |_| 1.0, TriangleRule::Three);
        assert!((v - PI).abs() < 1e-6, "{}", v - PI);
    }

    #[test]
    fn odd_integrand_on_square() {
        let v = integrate_mesh(&mesh(&rectangle(2.0, 2.0), 0.1).unwrap(), |x| x[0] * x[1], TriangleRule::Seven);
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn second_moment_of_annulus() {
        let exact = 2.0 * PI * (1.0 - 0.25f64.powi(4)) / 4.0;
        let q = integrate(&annulus(0.25, 1.0), |x| x[0] * x[0] + x[1] * x[1], 0.05).unwrap();
        assert!((q.value - exact).abs() < 1e-7, "{}", q.value - exact);
        let p = PolarRegion::from_domain(&annulus(0.25, 1.0)).unwrap();
        let v = polar_integrate(&p, |_, r| r * r, &[], 16, 8);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn polar_areas() {
        let sq = PolarRegion::from_domain(&square_with_disk_hole(2.0, 0.3)).unwrap();
        assert!((sq.area() - (4.0 - 0.09 * PI)).abs() < 1e-12);
        let oct = PolarRegion::from_domain(&unit_octagon()).unwrap();
        assert!((oct.area() - 1.0).abs() < 1e-13);
        let l4 = PolarRegion::from_domain(&lp_ball(4.0, 1.0)).unwrap();
        let exact = crate::geometry::lp_ball_volume(2, 1.0, 4.0);
        assert!((l4.area() - exact).abs() < 1e-10, "{}", l4.area() - exact);
    }
}
