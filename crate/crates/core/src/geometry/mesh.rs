//! Triangle meshes for the planar domain families.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Domain, Pose, Shape};
use crate::error::{Error, Result};

/// Smallest admissible interior angle, degrees.
pub const MIN_ANGLE_DEG: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Curve {
    Straight,
    Circle { center: [f64; 2], radius: f64 },
}

/// Boundary edge with the domain on its left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub curve: Curve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<BoundaryEdge>,
    /// Characteristic spacing used for extrapolation.
    pub spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshQuality {
    pub min_angle_deg: f64,
    pub max_edge: f64,
    pub area: f64,
}

/// The planar families that [`mesh`] supports, in canonical coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Rectangle { width: f64, height: f64 },
    Disk { radius: f64 },
    Annulus { alpha: f64, beta: f64 },
    /// Disk of radius `beta` at the origin minus a disk of radius `alpha` at `(s, 0)`, `s > 0`.
    EccentricAnnulus { alpha: f64, beta: f64, s: f64, angle: f64 },
    RegularPolygon { sides: usize, circumradius: f64, rotation: f64 },
    /// Origin-centred star-shaped outer boundary around one centred hole.
    StarWithHole { outer: Shape, hole: Shape },
    /// Origin-centred star-shaped region with a smooth boundary and no holes.
    Star { outer: Shape },
    DiskWithHoles { radius: f64, holes: Vec<([f64; 2], f64)> },
}

impl Family {
    pub fn classify(domain: &Domain) -> Result<Family> {
        if domain.dim != 2 {
            return Err(Error::Unsupported("meshing is planar only".into()));
        }
        let at_origin = |c: &[f64]| c.iter().all(|x| *x == 0.0);
        let unsupported = || {
            Error::Unsupported(
                "no built-in mesher for this domain; import a mesh in the `nv nt` text format".into(),
            )
        };
        let disk = |s: &Shape| match s {
            Shape::Ball { center, radius } if center.len() == 2 => Some(([center[0], center[1]], *radius)),
            _ => None,
        };
        match (&domain.outer, domain.holes.as_slice()) {
            (Shape::Boxed { center, half }, []) if at_origin(center) => {
                Ok(Family::Rectangle { width: 2.0 * half[0], height: 2.0 * half[1] })
            }
            (Shape::Ball { center, radius }, []) if at_origin(center) => Ok(Family::Disk { radius: *radius }),
            (Shape::RegularPolygon { center, circumradius, sides, rotation }, []) if at_origin(center) => {
                Ok(Family::RegularPolygon { sides: *sides, circumradius: *circumradius, rotation: *rotation })
            }
            (Shape::Ball { center, radius }, [h]) if at_origin(center) && disk(h).is_some() => {
                let (c, a) = disk(h).unwrap();
                let s = c[0].hypot(c[1]);
                if s == 0.0 {
                    Ok(Family::Annulus { alpha: a, beta: *radius })
                } else {
                    Ok(Family::EccentricAnnulus { alpha: a, beta: *radius, s, angle: c[1].atan2(c[0]) })
                }
            }
            (Shape::Ball { center, radius }, holes) if at_origin(center) && holes.iter().all(|h| disk(h).is_some()) => {
                Ok(Family::DiskWithHoles { radius: *radius, holes: holes.iter().map(|h| disk(h).unwrap()).collect() })
            }
            (outer, []) => {
                let star = outer.planar_center().is_some_and(|c| c == [0.0, 0.0]) && outer.boundary_radius(0.0).is_some();
                if star && outer.corner_angles().is_empty() {
                    Ok(Family::Star { outer: outer.clone() })
                } else {
                    Err(unsupported())
                }
            }
            (outer, [hole]) => {
                let star = outer.planar_center().is_some_and(|c| c == [0.0, 0.0]) && outer.boundary_radius(0.0).is_some();
                let hole_ok = hole.planar_center().is_some_and(|c| c == [0.0, 0.0]) && hole.boundary_radius(0.0).is_some();
                if star && hole_ok {
                    Ok(Family::StarWithHole { outer: outer.clone(), hole: hole.clone() })
                } else {
                    Err(unsupported())
                }
            }
            _ => Err(unsupported()),
        }
    }
}

/// Conforming triangulation with maximum edge length at most `h`.
pub fn mesh(domain: &Domain, h: f64) -> Result<Mesh> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("mesh size must be positive, got {h}")));
    }
    let family = Family::classify(domain)?;
    let mut m = match family {
        Family::Rectangle { width, height } => rectangle(width, height, h),
        Family::Disk { radius } => disk(radius, h),
        Family::Annulus { alpha, beta } => annulus(alpha, beta, h),
        Family::EccentricAnnulus { alpha, beta, s, angle } => eccentric(alpha, beta, s, angle, h)?,
        Family::RegularPolygon { sides, circumradius, rotation } => polygon_fan(sides, circumradius, rotation, h),
        Family::StarWithHole { outer, hole } => star_with_hole(&outer, &hole, h),
        Family::Star { outer } => star(&outer, h),
        Family::DiskWithHoles { radius, holes } => disk_with_holes(radius, &holes, h)?,
    };
    m.tag_boundary(domain);
    if !domain.pose.is_identity() {
        m.apply_pose(&domain.pose);
    }
    Ok(m)
}

fn triangle_area(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

impl Mesh {
    fn from_parts(vertices: Vec<[f64; 2]>, mut triangles: Vec<[usize; 3]>, spacing: f64) -> Self {
        for t in &mut triangles {
            if triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0 {
                t.swap(1, 2);
            }
        }
        let mut m = Mesh { vertices, triangles, boundary: Vec::new(), spacing };
        m.boundary = m.boundary_edges().into_iter().map(|(a, b)| BoundaryEdge { a, b, curve: Curve::Straight }).collect();
        m
    }

    /// Edges used by exactly one triangle, oriented with the triangle.
    fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut count: HashMap<(usize, usize), (usize, (usize, usize))> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let e = count.entry((a.min(b), a.max(b))).or_insert((0, (a, b)));
                e.0 += 1;
            }
        }
        let mut out: Vec<(usize, usize)> = count.into_values().filter(|(c, _)| *c == 1).map(|(_, e)| e).collect();
        out.sort_unstable();
        out
    }

    /// Marks boundary edges whose endpoints both lie on a circle of the domain.
    fn tag_boundary(&mut self, domain: &Domain) {
        let mut circles = Vec::new();
        for s in std::iter::once(&domain.outer).chain(&domain.holes) {
            if let Shape::Ball { center, radius } = s {
                circles.push(([center[0], center[1]], *radius));
            }
        }
        for e in &mut self.boundary {
            let (p, q) = (self.vertices[e.a], self.vertices[e.b]);
            for &(c, r) in &circles {
                let tol = 1e-9 * r.max(1.0);
                if (dist(p, c) - r).abs() < tol && (dist(q, c) - r).abs() < tol {
                    e.curve = Curve::Circle { center: c, radius: r };
                }
            }
        }
    }

    fn apply_pose(&mut self, pose: &Pose) {
        let map = |p: [f64; 2]| {
            let w = pose.to_world(&p);
            [w[0], w[1]]
        };
        for v in &mut self.vertices {
            *v = map(*v);
        }
        for e in &mut self.boundary {
            if let Curve::Circle { center, .. } = &mut e.curve {
                *center = map(*center);
            }
        }
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| triangle_area(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]))
            .sum()
    }

    /// Orientation, conformity and angle checks.
    pub fn validate(&self) -> Result<MeshQuality> {
        let mut min_angle = 180.0f64;
        let mut max_edge = 0.0f64;
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&k| k >= self.vertices.len()) {
                return Err(Error::Geometry(format!("triangle {i} references a missing vertex")));
            }
            let p = [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]];
            if triangle_area(p[0], p[1], p[2]) <= 0.0 {
                return Err(Error::Geometry(format!("triangle {i} is not positively oriented")));
            }
            for k in 0..3 {
                let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let ang = (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]).to_degrees();
                min_angle = min_angle.min(ang);
                max_edge = max_edge.max(dist(a, b));
            }
        }
        let mut uses: HashMap<(usize, usize), i32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *uses.entry((a, b)).or_default() += 1;
                if uses[&(a, b)] > 1 {
                    return Err(Error::Geometry(format!("directed edge ({a},{b}) used twice")));
                }
            }
        }
        // every vertex on the boundary has exactly two boundary edges
        let mut deg = vec![0u32; self.vertices.len()];
        for (a, b) in self.boundary_edges() {
            deg[a] += 1;
            deg[b] += 1;
        }
        if let Some(v) = deg.iter().position(|d| *d != 0 && *d != 2) {
            return Err(Error::Geometry(format!("vertex {v} has a hanging boundary")));
        }
        if min_angle < MIN_ANGLE_DEG {
            return Err(Error::Geometry(format!("sliver: minimum angle {min_angle:.2} degrees")));
        }
        Ok(MeshQuality { min_angle_deg: min_angle, max_edge, area: self.area() })
    }

    /// `nv nt`, then `x y` per vertex, then `i j k` per triangle.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.vertices.len(), self.triangles.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:e} {:e}", v[0], v[1]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Mesh> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |m: String| Error::Parse(m);
        let header = lines.next().ok_or_else(|| parse_err("empty mesh file".into()))?;
        let hv: Vec<usize> = header
            .split_whitespace()
            .map(|w| w.parse().map_err(|_| parse_err(format!("bad header `{header}`"))))
            .collect::<Result<_>>()?;
        let [nv, nt] = hv[..] else { return Err(parse_err(format!("bad header `{header}`"))) };
        let mut vertices = Vec::with_capacity(nv);
        for i in 0..nv {
            let l = lines.next().ok_or_else(|| parse_err(format!("missing vertex {i}")))?;
            let xy: Vec<f64> = l
                .split_whitespace()
                .map(|w| w.parse().map_err(|_| parse_err(format!("bad vertex line `{l}`"))))
                .collect::<Result<_>>()?;
            let [x, y] = xy[..] else { return Err(parse_err(format!("bad vertex line `{l}`"))) };
            vertices.push([x, y]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for i in 0..nt {
            let l = lines.next().ok_or_else(|| parse_err(format!("missing triangle {i}")))?;
            let ijk: Vec<usize> = l
                .split_whitespace()
                .map(|w| w.parse().map_err(|_| parse_err(format!("bad triangle line `{l}`"))))
                .collect::<Result<_>>()?;
            let [a, b, c] = ijk[..] else { return Err(parse_err(format!("bad triangle line `{l}`"))) };
            if a.max(b).max(c) >= nv {
                return Err(parse_err(format!("triangle {i} references a missing vertex")));
            }
            triangles.push([a, b, c]);
        }
        let area: f64 = triangles.iter().map(|t| triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]).abs()).sum();
        let spacing = (2.0 * area / nt.max(1) as f64).sqrt();
        Ok(Mesh::from_parts(vertices, triangles, spacing))
    }
}

/// Structured grid with alternating diagonals.
fn rectangle(w: f64, ht: f64, h: f64) -> Mesh {
    let s = h / SQRT_2;
    let nx = (w / s).ceil().max(1.0) as usize;
    let ny = (ht / s).ceil().max(1.0) as usize;
    let mut v = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            v.push([-w / 2.0 + w * i as f64 / nx as f64, -ht / 2.0 + ht * j as f64 / ny as f64]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut t = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                t.push([a, b, c]);
                t.push([a, c, d]);
            } else {
                t.push([a, b, d]);
                t.push([b, c, d]);
            }
        }
    }
    Mesh::from_parts(v, t, (w / nx as f64).max(ht / ny as f64))
}

/// Triangulates the band between two closed rings sampled at increasing angles
/// in `[0, 2 pi)`.
fn stitch(out: &mut Vec<[usize; 3]>, a: &[usize], ta: &[f64], b: &[usize], tb: &[f64]) {
    let (na, nb) = (a.len(), b.len());
    let ang = |t: &[f64], k: usize| if k < t.len() { t[k] } else { t[k - t.len()] + 2.0 * PI };
    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        let adv_a = j >= nb || (i < na && ang(ta, i + 1) <= ang(tb, j + 1));
        if adv_a {
            out.push([a[i % na], a[(i + 1) % na], b[j % nb]]);
            i += 1;
        } else {
            out.push([a[i % na], b[(j + 1) % nb], b[j % nb]]);
            j += 1;
        }
    }
}

fn ring_angles(n: usize, offset: f64) -> Vec<f64> {
    (0..n).map(|k| offset + 2.0 * PI * k as f64 / n as f64).collect()
}

/// Concentric rings with `6i` points on ring `i`.
fn disk(radius: f64, h: f64) -> Mesh {
    let m = (1.75 * radius / h).ceil().max(1.0) as usize;
    let mut v = vec![[0.0, 0.0]];
    let mut t = Vec::new();
    let mut prev: Vec<usize> = vec![0];
    let mut prev_t: Vec<f64> = vec![0.0];
    for i in 1..=m {
        let r = radius * i as f64 / m as f64;
        let n = 6 * i;
        let th = ring_angles(n, 0.0);
        let idx: Vec<usize> = (0..n).map(|k| v.len() + k).collect();
        v.extend(th.iter().map(|a| [r * a.cos(), r * a.sin()]));
        if i == 1 {
            for k in 0..n {
                t.push([0, idx[k], idx[(k + 1) % n]]);
            }
        } else {
            stitch(&mut t, &prev, &prev_t, &idx, &th);
        }
        prev = idx;
        prev_t = th;
    }
    Mesh::from_parts(v, t, radius / m as f64)
}

/// Log-polar grid on `rho < |w| < 1`, returned as `(vertices, triangles, m, n)`.
fn log_polar(rho: f64, n_ang: usize) -> (Vec<[f64; 2]>, Vec<[usize; 3]>, usize) {
    let dt = 2.0 * PI / n_ang as f64;
    let m = ((1.0 / rho).ln() / dt).ceil().max(1.0) as usize;
    let mut v = Vec::with_capacity((m + 1) * n_ang);
    for i in 0..=m {
        let r = if i == m { 1.0 } else if i == 0 { rho } else { rho.powf(1.0 - i as f64 / m as f64) };
        v.extend(ring_angles(n_ang, 0.0).iter().map(|a| [r * a.cos(), r * a.sin()]));
    }
    let id = |i: usize, k: usize| i * n_ang + k % n_ang;
    let mut t = Vec::with_capacity(2 * m * n_ang);
    for i in 0..m {
        for k in 0..n_ang {
            let (a, b, c, d) = (id(i, k), id(i, k + 1), id(i + 1, k + 1), id(i + 1, k));
            if (i + k) % 2 == 0 {
                t.push([a, b, c]);
                t.push([a, c, d]);
            } else {
                t.push([a, b, d]);
                t.push([b, c, d]);
            }
        }
    }
    (v, t, m)
}

fn annulus(alpha: f64, beta: f64, h: f64) -> Mesh {
    let n = 8 * ((2.0 * PI * beta / (h / SQRT_2)) / 8.0).ceil().max(1.0) as usize;
    let (mut v, t, _) = log_polar(alpha / beta, n);
    v.iter_mut().for_each(|p| *p = [p[0] * beta, p[1] * beta]);
    Mesh::from_parts(v, t, 2.0 * PI * beta / n as f64)
}

/// Image of a log-polar annulus under the disk automorphism `(w + a) / (1 + a w)`.
fn eccentric(alpha: f64, beta: f64, s: f64, angle: f64, h: f64) -> Result<Mesh> {
    let (x1, x2) = ((s - alpha) / beta, (s + alpha) / beta);
    if !(x1 > -1.0 && x2 < 1.0) {
        return Err(Error::Geometry("hole must lie inside the outer disk".into()));
    }
    let (p, q) = (x1 + x2, 1.0 + x1 * x2);
    let a = (q - (q * q - p * p).sqrt()) / p;
    let rho = (x2 - a) / (1.0 - a * x2);
    // |f'| is largest at w = -1
    let stretch = (1.0 + a) / (1.0 - a);
    let n = 8 * ((2.0 * PI * beta * stretch / (h / SQRT_2)) / 8.0).ceil().max(1.0) as usize;
    let (mut v, t, m) = log_polar(rho, n);
    let (cs, sn) = (angle.cos(), angle.sin());
    for p in &mut v {
        let (x, y) = (p[0], p[1]);
        // (w + a) / (1 + a w) for w = x + iy
        let (nr, ni) = (x + a, y);
        let (dr, di) = (1.0 + a * x, a * y);
        let den = dr * dr + di * di;
        let (zr, zi) = ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den);
        *p = [beta * (cs * zr - sn * zi), beta * (sn * zr + cs * zi)];
    }
    // snap the two boundary rings onto the exact circles
    let hc = [s * cs, s * sn];
    for (k, p) in v.iter_mut().enumerate() {
        if k < n {
            let d = dist(*p, hc);
            *p = [hc[0] + (p[0] - hc[0]) * alpha / d, hc[1] + (p[1] - hc[1]) * alpha / d];
        } else if k >= m * n {
            let d = p[0].hypot(p[1]);
            *p = [p[0] * beta / d, p[1] * beta / d];
        }
    }
    Ok(Mesh::from_parts(v, t, 2.0 * PI * beta / n as f64))
}

/// Fan of `sides` triangles, each refined uniformly into `k^2` pieces.
fn polygon_fan(sides: usize, circumradius: f64, rotation: f64, h: f64) -> Mesh {
    let edge = 2.0 * circumradius * (PI / sides as f64).sin();
    let k = (circumradius.max(edge) / h).ceil().max(1.0) as usize;
    let corner = |i: usize| {
        let a = rotation + 2.0 * PI * (i % sides) as f64 / sides as f64;
        [circumradius * a.cos(), circumradius * a.sin()]
    };
    // ring t (0..=k) holds sides * t points; point (fan i, offset b) sits at index i * t + b
    let mut v = vec![[0.0, 0.0]];
    let mut start = vec![0usize; k + 1];
    for t in 1..=k {
        start[t] = v.len();
        let f = t as f64 / k as f64;
        for i in 0..sides {
            let (p, q) = (corner(i), corner(i + 1));
            for b in 0..t {
                let g = b as f64 / t as f64;
                v.push([f * (p[0] + g * (q[0] - p[0])), f * (p[1] + g * (q[1] - p[1]))]);
            }
        }
    }
    let id = |t: usize, i: usize, b: usize| if t == 0 { 0 } else { start[t] + (i * t + b) % (sides * t) };
    let mut tri = Vec::new();
    for i in 0..sides {
        for t in 0..k {
            for b in 0..=t {
                tri.push([id(t, i, b), id(t + 1, i, b), id(t + 1, i, b + 1)]);
                if b < t {
                    tri.push([id(t, i, b), id(t + 1, i, b + 1), id(t, i, b + 1)]);
                }
            }
        }
    }
    Mesh::from_parts(v, tri, circumradius / k as f64)
}

/// Angular grid with the given corners inserted.
fn angles_with_corners(n: usize, corners: &[f64]) -> Vec<f64> {
    let d = 2.0 * PI / n as f64;
    let mut th: Vec<f64> = ring_angles(n, 0.0)
        .into_iter()
        .filter(|a| corners.iter().all(|c| {
            let e = (a - c).rem_euclid(2.0 * PI);
            e.min(2.0 * PI - e) > 0.3 * d
        }))
        .collect();
    th.extend(corners.iter().map(|c| c.rem_euclid(2.0 * PI)));
    th.sort_by(f64::total_cmp);
    th.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    th
}

/// The ring mesh of the unit disk stretched radially onto the boundary.
fn star(outer: &Shape, h: f64) -> Mesh {
    let rmax = (0..720).map(|k| outer.boundary_radius(2.0 * PI * k as f64 / 720.0).unwrap()).fold(0.0, f64::max);
    let mut m = disk(1.0, h / rmax);
    for p in &mut m.vertices {
        let (r, a) = (p[0].hypot(p[1]), p[1].atan2(p[0]));
        let rho = r * outer.boundary_radius(a).unwrap();
        *p = [rho * a.cos(), rho * a.sin()];
    }
    m.spacing *= rmax;
    m
}

/// Transfinite radial grid between a centred star-shaped hole and outer boundary.
fn star_with_hole(outer: &Shape, hole: &Shape, h: f64) -> Mesh {
    let samples = (0..720).map(|k| 2.0 * PI * k as f64 / 720.0);
    let rmax = samples.clone().map(|t| outer.boundary_radius(t).unwrap()).fold(0.0, f64::max);
    let gap_max = samples
        .map(|t| outer.boundary_radius(t).unwrap() - hole.boundary_radius(t).unwrap())
        .fold(0.0, f64::max);
    let s = h / SQRT_2;
    let mut corners = outer.corner_angles();
    corners.extend(hole.corner_angles());
    let mut n = 8 * ((2.0 * PI * rmax / s) / 8.0).ceil().max(1.0) as usize;
    let on_grid = |n: usize| {
        corners.iter().all(|c| {
            let k = c * n as f64 / (2.0 * PI);
            (k - k.round()).abs() < 1e-9
        })
    };
    if !on_grid(n) {
        // a displaced node may widen one angular gap by 30%
        n = 8 * ((1.3 * 2.0 * PI * rmax / s) / 8.0).ceil() as usize;
    }
    let th = angles_with_corners(n, &corners);
    let m = (gap_max / s).ceil().max(1.0) as usize;
    let mut v = Vec::with_capacity((m + 1) * th.len());
    for i in 0..=m {
        let f = i as f64 / m as f64;
        for &a in &th {
            let (ri, ro) = (hole.boundary_radius(a).unwrap(), outer.boundary_radius(a).unwrap());
            let r = if i == m { ro } else { ri + f * (ro - ri) };
            v.push([r * a.cos(), r * a.sin()]);
        }
    }
    let nt = th.len();
    let mut t = Vec::new();
    for i in 0..m {
        let ring_a: Vec<usize> = (0..nt).map(|k| i * nt + k).collect();
        let ring_b: Vec<usize> = (0..nt).map(|k| (i + 1) * nt + k).collect();
        for k in 0..nt {
            let (a, b, c, d) = (ring_a[k], ring_a[(k + 1) % nt], ring_b[(k + 1) % nt], ring_b[k]);
            // split along the shorter diagonal
            if dist(v[a], v[c]) <= dist(v[b], v[d]) {
                t.push([a, b, c]);
                t.push([a, c, d]);
            } else {
                t.push([a, b, d]);
                t.push([b, c, d]);
            }
        }
    }
    Mesh::from_parts(v, t, 2.0 * PI * rmax / n as f64)
}

/// Polar collars around each hole and inside the outer circle, a hexagonal
/// lattice in between, joined by a Delaunay pass.
fn disk_with_holes(radius: f64, holes: &[([f64; 2], f64)], h: f64) -> Result<Mesh> {
    let s = h / 2.2;
    let mut pts: Vec<[f64; 2]> = Vec::new();
    // (center, radius of the last collar ring)
    let mut collars: Vec<([f64; 2], f64, f64)> = Vec::new();
    let layers = 3usize;
    for &(c, r) in holes {
        let n = ((2.0 * PI * r / s).ceil() as usize).max(12);
        let ds = 2.0 * PI * r / n as f64;
        for l in 0..layers {
            let rl = r + l as f64 * ds * 0.9;
            let off = if l % 2 == 0 { 0.0 } else { PI / n as f64 };
            pts.extend(ring_angles(n, off).iter().map(|a| [c[0] + rl * a.cos(), c[1] + rl * a.sin()]));
        }
        collars.push((c, r, r + (layers - 1) as f64 * ds * 0.9));
    }
    let n_out = ((2.0 * PI * radius / s).ceil() as usize).max(12);
    let ds_out = 2.0 * PI * radius / n_out as f64;
    let mut inner_out = radius;
    for l in 0..layers {
        let rl = radius - l as f64 * ds_out * 0.9;
        let off = if l % 2 == 0 { 0.0 } else { PI / n_out as f64 };
        pts.extend(ring_angles(n_out, off).iter().map(|a| [rl * a.cos(), rl * a.sin()]));
        inner_out = rl;
    }
    // hexagonal fill
    let dy = s * 3f64.sqrt() / 2.0;
    let rows = (radius / dy).ceil() as i64;
    let keep = 0.75 * s;
    for j in -rows..=rows {
        let y = j as f64 * dy;
        let shift = if j.rem_euclid(2) == 1 { 0.5 * s } else { 0.0 };
        let cols = (radius / s).ceil() as i64 + 1;
        for i in -cols..=cols {
            let p = [i as f64 * s + shift, y];
            let rp = p[0].hypot(p[1]);
            if rp > inner_out - keep {
                continue;
            }
            if collars.iter().any(|&(c, _, rc)| dist(p, c) < rc + keep) {
                continue;
            }
            pts.push(p);
        }
    }
    let dpts: Vec<delaunator::Point> = pts.iter().map(|p| delaunator::Point { x: p[0], y: p[1] }).collect();
    let tr = delaunator::triangulate(&dpts);
    let mut tris = Vec::with_capacity(tr.triangles.len() / 3);
    for c in tr.triangles.chunks(3) {
        let (a, b, d) = (pts[c[0]], pts[c[1]], pts[c[2]]);
        let g = [(a[0] + b[0] + d[0]) / 3.0, (a[1] + b[1] + d[1]) / 3.0];
        if holes.iter().any(|&(hc, r)| dist(g, hc) < r) {
            continue;
        }
        if triangle_area(a, b, d).abs() < 1e-14 * s * s {
            continue;
        }
        tris.push([c[0], c[1], c[2]]);
    }
    let m = Mesh::from_parts(pts, tris, s);
    // the kept triangles must tile the polygonal domain
    let poly_area = {
        let ring = |n: usize, r: f64| 0.5 * n as f64 * r * r * (2.0 * PI / n as f64).sin();
        let holes_area: f64 = holes
            .iter()
            .map(|&(_, r)| ring(((2.0 * PI * r / s).ceil() as usize).max(12), r))
            .sum();
        ring(n_out, radius) - holes_area
    };
    if (m.area() - poly_area).abs() > 1e-9 * poly_area {
        return Err(Error::Geometry(format!(
            "hole removal left area {} instead of {}",
            m.area(),
            poly_area
        )));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::super::examples::{self as ex, *};
    use super::{mesh, Curve, Domain, Error, Mesh, MeshQuality, Pose, Shape};

    fn check(domain: &Domain, h: f64) -> (Mesh, MeshQuality) {
        let m = mesh(domain, h).unwrap();
        let q = m.validate().unwrap();
        assert!(q.max_edge <= h * (1.0 + 1e-12), "max edge {} > {h}", q.max_edge);
        (m, q)
    }

    #[test]
    fn rectangle_quality() {
        let (_, q) = check(&rectangle_sqrt3(), 0.1);
        assert!(q.min_angle_deg >= 10.0);
        assert!((q.area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn annulus_radii() {
        let (m, _) = check(&ex::annulus(0.25, 1.0), 0.1);
        for v in &m.vertices {
            let r = v[0].hypot(v[1]);
            assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&r));
        }
        assert!(m.boundary.iter().all(|e| matches!(e.curve, Curve::Circle { .. })));
    }

    #[test]
    fn all_families_validate() {
        for (d, h) in [
            (ex::disk(1.0), 0.1),
            (eccentric_annulus(0.25, 1.0, 0.25), 0.1),
            (unit_octagon(), 0.05),
            (square_with_disk_hole(2.0, 0.3), 0.1),
            (square_with_square_hole(2.0, 0.8), 0.1),
            (two_hole_disk(), 0.08),
            (lp_ball(4.0, 1.0), 0.1),
            (lp_ball(3.0, 1.0), 0.05),
        ] {
            let m = mesh(&d, h).unwrap();
            let q = m.validate().unwrap_or_else(|e| panic!("{:?}: {e}", d.holes));
            assert!(q.max_edge <= h * (1.0 + 1e-12), "{:?}: max edge {} > {h}", d.holes, q.max_edge);
        }
    }

    #[test]
    fn eccentric_boundary_on_circles() {
        let (m, _) = check(&eccentric_annulus(0.25, 1.0, 0.25), 0.1);
        let circles = m.boundary.iter().filter(|e| matches!(e.curve, Curve::Circle { .. })).count();
        assert_eq!(circles, m.boundary.len());
    }

    #[test]
    fn text_round_trip() {
        let m = mesh(&unit_octagon(), 0.2).unwrap();
        let back = Mesh::from_text(&m.to_text()).unwrap();
        assert_eq!(back.triangles, m.triangles);
        for (a, b) in back.vertices.iter().zip(&m.vertices) {
            assert!(a == b);
        }
        assert!(Mesh::from_text("3 1\n0 0\n1 0\n0 1\n0 1 5\n").is_err());
    }

    #[test]
    fn unsupported_family() {
        let d = Domain {
            dim: 2,
            outer: Shape::Polygon { vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] },
            holes: vec![],
            pose: Pose::default(),
        };
        assert!(matches!(mesh(&d, 0.1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn pose_moves_vertices() {
        let d = ex::annulus(0.25, 1.0).with_pose(Pose { rotation: 0.3, translation: vec![2.0, 0.0] });
        let m = mesh(&d, 0.2).unwrap();
        let cx = m.vertices.iter().map(|v| v[0]).sum::<f64>() / m.vertices.len() as f64;
        assert!((cx - 2.0).abs() < 1e-9);
    }
}
