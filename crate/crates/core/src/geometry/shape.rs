//! Primitive regions and their boolean combinations.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shell::unit_ball_volume;
use crate::specialfn::gamma;

/// A region of `R^N` given by a membership predicate, with closed-form
/// measure where one exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// Open Euclidean ball (a disk in the plane).
    Ball { center: Vec<f64>, radius: f64 },
    /// Open axis-aligned box `|x_i - c_i| < half_i`.
    Boxed { center: Vec<f64>, half: Vec<f64> },
    /// Regular planar polygon with the given circumradius; vertex 0 at angle `rotation`.
    RegularPolygon { center: [f64; 2], circumradius: f64, sides: usize, rotation: f64 },
    /// Simple planar polygon, vertices counterclockwise.
    Polygon { vertices: Vec<[f64; 2]> },
    /// `||x - c||_p < radius`, `p` in `[1, inf]`.
    LpBall { center: Vec<f64>, radius: f64, p: f64 },
    /// Open orthant `{ sign_i x_i > 0 }`.
    Orthant { signs: Vec<i8> },
    /// `{ x_1 x_2 ... x_N > 0 }`.
    PositiveProduct { dim: usize },
    Union { parts: Vec<Shape> },
    Intersection { parts: Vec<Shape> },
}

pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

impl Shape {
    pub fn disk(cx: f64, cy: f64, radius: f64) -> Self {
        Shape::Ball { center: vec![cx, cy], radius }
    }

    pub fn rectangle(width: f64, height: f64) -> Self {
        Shape::Boxed { center: vec![0.0, 0.0], half: vec![width / 2.0, height / 2.0] }
    }

    pub fn regular_polygon(sides: usize, circumradius: f64) -> Self {
        Shape::RegularPolygon { center: [0.0, 0.0], circumradius, sides, rotation: 0.0 }
    }

    /// Ambient dimension, if the shape fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Shape::Ball { center, .. } | Shape::Boxed { center, .. } | Shape::LpBall { center, .. } => {
                Some(center.len())
            }
            Shape::RegularPolygon { .. } | Shape::Polygon { .. } => Some(2),
            Shape::Orthant { signs } => Some(signs.len()),
            Shape::PositiveProduct { dim } => Some(*dim),
            Shape::Union { parts } | Shape::Intersection { parts } => parts.iter().find_map(|p| p.dim()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Geometry(m.to_string()));
        match self {
            Shape::Ball { radius, .. } if !(*radius > 0.0) => bad("ball radius must be positive"),
            Shape::Boxed { center, half } if center.len() != half.len() || half.iter().any(|h| !(*h > 0.0)) => {
                bad("box needs positive half-widths matching its center")
            }
            Shape::RegularPolygon { sides, circumradius, .. } if *sides < 3 || !(*circumradius > 0.0) => {
                bad("regular polygon needs at least 3 sides and a positive radius")
            }
            Shape::Polygon { vertices } if vertices.len() < 3 => bad("polygon needs at least 3 vertices"),
            Shape::Polygon { vertices } if signed_area(vertices) <= 0.0 => {
                bad("polygon vertices must be counterclockwise")
            }
            Shape::LpBall { radius, p, .. } if !(*radius > 0.0) || !(*p >= 1.0) => {
                bad("L^p ball needs radius > 0 and p >= 1")
            }
            Shape::Union { parts } | Shape::Intersection { parts } => {
                if parts.is_empty() {
                    return bad("empty boolean combination");
                }
                let dims: Vec<usize> = parts.iter().filter_map(|p| p.dim()).collect();
                if dims.windows(2).any(|w| w[0] != w[1]) {
                    return bad("parts of different dimensions");
                }
                parts.iter().try_for_each(|p| p.validate())
            }
            _ => Ok(()),
        }
    }

    /// Open-set membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Shape::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() < radius * radius
            }
            Shape::Boxed { center, half } => {
                x.iter().zip(center).zip(half).all(|((a, c), h)| (a - c).abs() < *h)
            }
            Shape::RegularPolygon { center, circumradius, sides, rotation } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                let r = dx.hypot(dy);
                if r == 0.0 {
                    return true;
                }
                let th = dy.atan2(dx);
                r < regular_polygon_radius(*circumradius, *sides, *rotation, th)
            }
            Shape::Polygon { vertices } => point_in_polygon(vertices, x[0], x[1]),
            Shape::LpBall { center, radius, p } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                lp_norm(&d, *p) < *radius
            }
            Shape::Orthant { signs } => x.iter().zip(signs).all(|(a, &s)| a * s as f64 > 0.0),
            Shape::PositiveProduct { .. } => x.iter().product::<f64>() > 0.0,
            Shape::Union { parts } => parts.iter().any(|p| p.contains(x)),
            Shape::Intersection { parts } => parts.iter().all(|p| p.contains(x)),
        }
    }

    /// Closed-form measure, when available.
    pub fn exact_measure(&self) -> Option<f64> {
        match self {
            Shape::Ball { center, radius } => {
                Some(unit_ball_volume(center.len()) * radius.powi(center.len() as i32))
            }
            Shape::Boxed { half, .. } => Some(half.iter().map(|h| 2.0 * h).product()),
            Shape::RegularPolygon { circumradius, sides, .. } => {
                let n = *sides as f64;
                Some(0.5 * n * circumradius * circumradius * (2.0 * PI / n).sin())
            }
            Shape::Polygon { vertices } => Some(signed_area(vertices)),
            Shape::LpBall { center, radius, p } => Some(lp_ball_volume(center.len(), *radius, *p)),
            Shape::Intersection { parts } => {
                // an origin-centred L^p ball cut by an orthant or by the sign of the product
                let ball = parts.iter().find_map(|s| match s {
                    Shape::LpBall { center, .. } | Shape::Ball { center, .. }
                        if center.iter().all(|c| *c == 0.0) =>
                    {
                        s.exact_measure()
                    }
                    Shape::Boxed { center, half }
                        if center.iter().all(|c| *c == 0.0) =>
                    {
                        Some(half.iter().map(|h| 2.0 * h).product())
                    }
                    _ => None,
                })?;
                if parts.len() != 2 {
                    return None;
                }
                let n = self.dim()?;
                parts.iter().find_map(|s| match s {
                    Shape::Orthant { .. } => Some(ball / 2f64.powi(n as i32)),
                    Shape::PositiveProduct { .. } => Some(ball / 2.0),
                    _ => None,
                })
            }
            _ => None,
        }
    }

    /// An axis-aligned box containing the shape, if bounded.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Shape::Ball { center, radius } => Some((
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            )),
            Shape::LpBall { center, radius, .. } => Some((
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            )),
            Shape::Boxed { center, half } => Some((
                center.iter().zip(half).map(|(c, h)| c - h).collect(),
                center.iter().zip(half).map(|(c, h)| c + h).collect(),
            )),
            Shape::RegularPolygon { center, circumradius, .. } => Some((
                vec![center[0] - circumradius, center[1] - circumradius],
                vec![center[0] + circumradius, center[1] + circumradius],
            )),
            Shape::Polygon { vertices } => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                Some((lo, hi))
            }
            Shape::Orthant { .. } | Shape::PositiveProduct { .. } => None,
            Shape::Union { parts } => {
                let boxes: Option<Vec<_>> = parts.iter().map(|p| p.bounding_box()).collect();
                let boxes = boxes?;
                let n = boxes[0].0.len();
                let lo = (0..n).map(|k| boxes.iter().map(|b| b.0[k]).fold(f64::INFINITY, f64::min)).collect();
                let hi = (0..n).map(|k| boxes.iter().map(|b| b.1[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
                Some((lo, hi))
            }
            Shape::Intersection { parts } => {
                let boxes: Vec<_> = parts.iter().filter_map(|p| p.bounding_box()).collect();
                if boxes.is_empty() {
                    return None;
                }
                let n = boxes[0].0.len();
                let lo = (0..n).map(|k| boxes.iter().map(|b| b.0[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
                let hi = (0..n).map(|k| boxes.iter().map(|b| b.1[k]).fold(f64::INFINITY, f64::min)).collect();
                Some((lo, hi))
            }
        }
    }

    /// Distance from the origin-shifted center along direction `theta` to the
    /// boundary, for planar shapes star-shaped about `center`.
    pub fn boundary_radius(&self, theta: f64) -> Option<f64> {
        match self {
            Shape::Ball { center, radius } if center.len() == 2 => Some(*radius),
            Shape::Boxed { half, .. } if half.len() == 2 => {
                let (c, s) = (theta.cos().abs(), theta.sin().abs());
                let rx = if c > 0.0 { half[0] / c } else { f64::INFINITY };
                let ry = if s > 0.0 { half[1] / s } else { f64::INFINITY };
                Some(rx.min(ry))
            }
            Shape::RegularPolygon { circumradius, sides, rotation, .. } => {
                Some(regular_polygon_radius(*circumradius, *sides, *rotation, theta))
            }
            Shape::LpBall { center, radius, p } if center.len() == 2 => {
                let (c, s) = (theta.cos(), theta.sin());
                Some(radius / lp_norm(&[c, s], *p))
            }
            _ => None,
        }
    }

    /// Planar center about which [`Shape::boundary_radius`] is measured.
    pub fn planar_center(&self) -> Option<[f64; 2]> {
        match self {
            Shape::Ball { center, .. } | Shape::Boxed { center, .. } | Shape::LpBall { center, .. }
                if center.len() == 2 =>
            {
                Some([center[0], center[1]])
            }
            Shape::RegularPolygon { center, .. } => Some(*center),
            _ => None,
        }
    }

    /// Angles in `[0, 2 pi)` where the planar boundary has corners.
    pub fn corner_angles(&self) -> Vec<f64> {
        let mut a = match self {
            Shape::Boxed { half, .. } if half.len() == 2 => {
                let t = half[1].atan2(half[0]);
                vec![t, PI - t, PI + t, 2.0 * PI - t]
            }
            Shape::RegularPolygon { sides, rotation, .. } => (0..*sides)
                .map(|k| (rotation + 2.0 * PI * k as f64 / *sides as f64).rem_euclid(2.0 * PI))
                .collect(),
            Shape::LpBall { p, .. } if p.is_infinite() || *p == 1.0 => {
                let base = if *p == 1.0 { 0.0 } else { PI / 4.0 };
                (0..4).map(|k| base + k as f64 * PI / 2.0).collect()
            }
            _ => Vec::new(),
        };
        a.sort_by(f64::total_cmp);
        a
    }

    /// Largest `r` with the closed ball `B_r(point)` inside the shape, for the
    /// primitives where it is known in closed form.
    pub fn inradius_about(&self, point: &[f64]) -> Option<f64> {
        let is_center = |c: &[f64]| c.iter().zip(point).all(|(a, b)| a == b);
        match self {
            Shape::Ball { center, radius } => {
                let d = center.iter().zip(point).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                Some((radius - d).max(0.0))
            }
            Shape::Boxed { center, half } => Some(
                center
                    .iter()
                    .zip(half)
                    .zip(point)
                    .map(|((c, h), x)| h - (x - c).abs())
                    .fold(f64::INFINITY, f64::min)
                    .max(0.0),
            ),
            Shape::RegularPolygon { center, circumradius, sides, .. } if is_center(center) => {
                Some(circumradius * (PI / *sides as f64).cos())
            }
            Shape::LpBall { center, radius, p } if is_center(center) => {
                let n = center.len() as f64;
                let e = if p.is_infinite() { 0.5 } else { 0.5 - 1.0 / p };
                Some(if *p <= 2.0 { *radius } else { radius * n.powf(e) })
            }
            _ => None,
        }
    }
}

/// `(2 Gamma(1/p + 1))^N / Gamma(N/p + 1) r^N`; `(2r)^N` for `p = inf`.
pub fn lp_ball_volume(dim: usize, radius: f64, p: f64) -> f64 {
    let n = dim as f64;
    if p.is_infinite() {
        return (2.0 * radius).powi(dim as i32);
    }
    if p == 2.0 {
        return unit_ball_volume(dim) * radius.powi(dim as i32);
    }
    (2.0 * gamma(1.0 / p + 1.0)).powf(n) / gamma(n / p + 1.0) * radius.powf(n)
}

pub fn regular_polygon_radius(circumradius: f64, sides: usize, rotation: f64, theta: f64) -> f64 {
    let w = 2.0 * PI / sides as f64;
    let t = (theta - rotation).rem_euclid(w) - 0.5 * w;
    circumradius * (0.5 * w).cos() / t.cos()
}

pub fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}

fn point_in_polygon(v: &[[f64; 2]], x: f64, y: f64) -> bool {
    let mut inside = false;
    let n = v.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a[1] > y) != (b[1] > y) && x < (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]) + a[0] {
            inside = !inside;
        }
        j = i;
    }
    inside
}
