//! Rotational and central symmetry: certificates for primitives, sampling otherwise.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Domain, Shape, SAMPLE_SEED};

pub const SYMMETRY_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SymmetryMethod {
    Certificate,
    /// Sampled membership comparison.
    Empirical { samples: usize, mismatches: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryVerdict {
    pub holds: bool,
    pub method: SymmetryMethod,
    /// Rotation plane `(i, j)` of the first sampled mismatch.
    pub failed_plane: Option<(usize, usize)>,
}

impl SymmetryVerdict {
    pub fn label(&self) -> &'static str {
        match self.method {
            SymmetryMethod::Certificate => "certificate",
            SymmetryMethod::Empirical { .. } => "empirical",
        }
    }
}

#[derive(Clone, Copy)]
enum Map {
    Rotation { q: usize },
    Antipodal,
}

fn centred(c: &[f64]) -> bool {
    c.iter().all(|x| *x == 0.0)
}

/// `Some(true)` when the primitive is known to be invariant, `None` when unknown.
fn certify(shape: &Shape, map: Map, dim: usize) -> Option<bool> {
    match (shape, map) {
        (_, Map::Rotation { q: 1 }) => Some(true),
        (Shape::Ball { center, .. }, _) if centred(center) => Some(true),
        (Shape::Boxed { center, half }, Map::Antipodal) if centred(center) => Some(half.len() == dim),
        (Shape::Boxed { center, .. }, Map::Rotation { q: 2 }) if centred(center) => Some(true),
        (Shape::Boxed { center, half }, Map::Rotation { q: 4 }) if centred(center) => {
            Some(half.iter().all(|h| *h == half[0]))
        }
        (Shape::LpBall { center, .. }, Map::Rotation { q: 2 | 4 } | Map::Antipodal) if centred(center) => {
            Some(true)
        }
        (Shape::RegularPolygon { center, sides, .. }, Map::Rotation { q }) if *center == [0.0, 0.0] => {
            Some(sides % q == 0)
        }
        (Shape::RegularPolygon { center, sides, .. }, Map::Antipodal) if *center == [0.0, 0.0] => {
            Some(sides % 2 == 0)
        }
        (Shape::PositiveProduct { dim }, Map::Rotation { q: 2 }) => Some(*dim >= 2),
        (Shape::PositiveProduct { dim }, Map::Antipodal) => Some(dim % 2 == 0),
        (Shape::Union { parts } | Shape::Intersection { parts }, _) => {
            let all: Option<Vec<bool>> = parts.iter().map(|p| certify(p, map, dim)).collect();
            match all {
                Some(v) if v.iter().all(|b| *b) => Some(true),
                _ => None,
            }
        }
        _ => None,
    }
}

fn certify_domain(domain: &Domain, map: Map) -> Option<bool> {
    let mut all_true = true;
    for s in std::iter::once(&domain.outer).chain(&domain.holes) {
        match certify(s, map, domain.dim) {
            Some(true) => {}
            Some(false) if domain.holes.is_empty() => return Some(false),
            _ => all_true = false,
        }
    }
    all_true.then_some(true)
}

/// Exact cosine and sine for the common rotation angles.
fn cos_sin(q: usize) -> (f64, f64) {
    match q {
        1 => (1.0, 0.0),
        2 => (-1.0, 0.0),
        4 => (0.0, 1.0),
        _ => {
            let t = 2.0 * PI / q as f64;
            (t.cos(), t.sin())
        }
    }
}

fn sample_box(domain: &Domain) -> (Vec<f64>, Vec<f64>) {
    let n = domain.dim;
    match domain.outer.bounding_box() {
        Some((lo, hi)) => {
            // symmetric box so that the image of a sample stays in range
            let m = lo.iter().chain(&hi).fold(0.0f64, |m, x| m.max(x.abs())) * 1.05;
            (vec![-m; n], vec![m; n])
        }
        None => (vec![-2.0; n], vec![2.0; n]),
    }
}

fn sampled(domain: &Domain, map: Map) -> SymmetryVerdict {
    let n = domain.dim;
    let (lo, hi) = sample_box(domain);
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0x51);
    let planes: Vec<(usize, usize)> = match map {
        Map::Rotation { .. } => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        Map::Antipodal => vec![(0, 0)],
    };
    let per_plane = SYMMETRY_SAMPLES / planes.len();
    let mut mismatches = 0;
    let mut failed_plane = None;
    let mut x = vec![0.0; n];
    for &(i, j) in &planes {
        for _ in 0..per_plane {
            for k in 0..n {
                x[k] = rng.random_range(lo[k]..hi[k]);
            }
            let mut y = x.clone();
            match map {
                Map::Rotation { q } => {
                    let (c, s) = cos_sin(q);
                    y[i] = c * x[i] - s * x[j];
                    y[j] = s * x[i] + c * x[j];
                }
                Map::Antipodal => y.iter_mut().for_each(|v| *v = -*v),
            }
            if domain.contains_canonical(&x) != domain.contains_canonical(&y) {
                mismatches += 1;
                if failed_plane.is_none() {
                    failed_plane = Some((i, j));
                }
            }
        }
    }
    SymmetryVerdict {
        holds: mismatches == 0,
        method: SymmetryMethod::Empirical { samples: per_plane * planes.len(), mismatches },
        failed_plane,
    }
}

fn check(domain: &Domain, map: Map) -> SymmetryVerdict {
    match certify_domain(domain, map) {
        Some(holds) => SymmetryVerdict { holds, method: SymmetryMethod::Certificate, failed_plane: None },
        None => sampled(domain, map),
    }
}

/// Invariance under rotation by `2 pi / q` in every coordinate plane, in the
/// domain's canonical frame.
pub fn check_symmetry(domain: &Domain, q: usize) -> SymmetryVerdict {
    check(domain, Map::Rotation { q: q.max(1) })
}

/// Invariance under `x -> -x` in the canonical frame.
pub fn check_central_symmetry(domain: &Domain) -> SymmetryVerdict {
    check(domain, Map::Antipodal)
}

/// Sampled verdict even when a certificate exists.
pub fn sampled_symmetry(domain: &Domain, q: Option<usize>) -> SymmetryVerdict {
    match q {
        Some(q) => sampled(domain, Map::Rotation { q }),
        None => sampled(domain, Map::Antipodal),
    }
}
