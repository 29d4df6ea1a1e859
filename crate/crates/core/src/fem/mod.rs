//! P1 finite elements for the planar Neumann Laplacian.

mod eigen;
mod sparse;

pub use eigen::{dense, smallest_eigs, subspace, Eigenpairs, Method, DENSE_LIMIT, MAX_COUNT, RESIDUAL_TOL};
pub use sparse::{rcm, Csr, Skyline};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::geometry::{mesh, Domain, Mesh};

/// Stiffness and consistent mass over the mesh vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPencil {
    pub k: Csr,
    pub m: Csr,
}

type Element = ([usize; 3], [[f64; 3]; 3], [[f64; 3]; 3]);

fn element(mesh: &Mesh, t: &[usize; 3], index: usize) -> Result<Element> {
    let [a, b, c] = [mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]];
    let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    if !(area > 0.0) {
        return Err(Error::Geometry(format!("degenerate or inverted triangle {index} (area {area:e})")));
    }
    // gradient of the hat at vertex i is (y_j - y_k, x_k - x_j) / (2 area)
    let p = [a, b, c];
    let g: Vec<[f64; 2]> = (0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            [p[j][1] - p[k][1], p[k][0] - p[j][0]]
        })
        .collect();
    let mut ke = [[0.0; 3]; 3];
    let mut me = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ke[i][j] = (g[i][0] * g[j][0] + g[i][1] * g[j][1]) / (4.0 * area);
            me[i][j] = area / if i == j { 6.0 } else { 12.0 };
        }
    }
    Ok((*t, ke, me))
}

/// Element integrals are computed in parallel and scattered in element order.
pub fn assemble(mesh: &Mesh) -> Result<SymmetricPencil> {
    let ids: Vec<usize> = (0..mesh.triangles.len()).collect();
    let elems = par_map(&ids, |&i| element(mesh, &mesh.triangles[i], i));
    scatter(mesh.vertices.len(), elems)
}

/// Single-threaded reference assembly.
pub fn assemble_sequential(mesh: &Mesh) -> Result<SymmetricPencil> {
    let elems = mesh.triangles.iter().enumerate().map(|(i, t)| element(mesh, t, i)).collect();
    scatter(mesh.vertices.len(), elems)
}

fn scatter(n: usize, elems: Vec<Result<Element>>) -> Result<SymmetricPencil> {
    let mut kt = Vec::with_capacity(9 * elems.len());
    let mut mt = Vec::with_capacity(9 * elems.len());
    for e in elems {
        let (t, ke, me) = e?;
        for i in 0..3 {
            for j in 0..3 {
                kt.push((t[i], t[j], ke[i][j]));
                mt.push((t[i], t[j], me[i][j]));
            }
        }
    }
    Ok(SymmetricPencil { k: Csr::from_triplets(n, kt), m: Csr::from_triplets(n, mt) })
}

/// Eigenvalues on one mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub h: f64,
    pub spacing: f64,
    pub vertices: usize,
    pub values: Vec<f64>,
    pub max_residual: f64,
}

pub fn solve_mesh(m: &Mesh, count: usize) -> Result<(Eigenpairs, Level)> {
    let p = assemble(m)?;
    let e = smallest_eigs(&p, count)?;
    let level = Level {
        h: f64::NAN,
        spacing: m.spacing,
        vertices: m.vertices.len(),
        values: e.values.clone(),
        max_residual: e.residuals.iter().fold(0.0, |a, b| a.max(*b)),
    };
    Ok((e, level))
}

pub fn solve_level(domain: &Domain, h: f64, count: usize) -> Result<Level> {
    let m = mesh(domain, h)?;
    let (_, mut level) = solve_mesh(&m, count)?;
    level.h = h;
    Ok(level)
}

/// One extrapolated eigenvalue `mu_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemValue {
    pub k: usize,
    pub value: f64,
    pub error_estimate: f64,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemSpectrum {
    pub levels: Vec<Level>,
    pub values: Vec<FemValue>,
}

/// Clusters are maximal runs whose consecutive gaps are below this relative
/// size or below the sum of the two error estimates.
pub const CLUSTER_REL: f64 = 1e-6;

impl FemSpectrum {
    /// `mu_k`, 1-based.
    pub fn mu(&self, k: usize) -> Option<&FemValue> {
        k.checked_sub(1).and_then(|i| self.values.get(i))
    }

    /// Index ranges `k_first..=k_last` of each cluster.
    pub fn cluster_ranges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for v in &self.values {
            match out.get_mut(v.cluster) {
                Some(r) => r.1 = v.k,
                None => out.push((v.k, v.k)),
            }
        }
        out
    }

    /// `k,value,error_estimate,cluster_id`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,value,error_estimate,cluster_id\n");
        for v in &self.values {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                v.k,
                crate::cli::fmt_sig(v.value),
                crate::cli::fmt_sig(v.error_estimate),
                v.cluster
            );
        }
        s
    }
}

fn richardson(coarse: f64, fine: f64, sc: f64, sf: f64) -> f64 {
    let r = (sc / sf).powi(2);
    (r * fine - coarse) / (r - 1.0)
}

/// Second-order extrapolation from the two finest levels. With three or more
/// levels the error estimate is the change between the last two
/// extrapolants; with two it is the size of the correction.
pub fn extrapolate_levels(levels: Vec<Level>) -> Result<FemSpectrum> {
    if levels.is_empty() {
        return Err(Error::Domain("no refinement levels".into()));
    }
    let mut levels = levels;
    levels.sort_by(|a, b| b.spacing.total_cmp(&a.spacing));
    let count = levels.iter().map(|l| l.values.len()).min().unwrap();
    let nl = levels.len();
    let mut values = Vec::with_capacity(count);
    for i in 0..count {
        let (value, err) = if nl == 1 {
            (levels[0].values[i], f64::NAN)
        } else {
            let (c, f) = (&levels[nl - 2], &levels[nl - 1]);
            let v = richardson(c.values[i], f.values[i], c.spacing, f.spacing);
            let err = if nl >= 3 {
                let b = &levels[nl - 3];
                (v - richardson(b.values[i], c.values[i], b.spacing, c.spacing)).abs()
            } else {
                (v - f.values[i]).abs()
            };
            (v, err)
        };
        values.push(FemValue { k: i + 1, value, error_estimate: err, cluster: 0 });
    }
    // extrapolants of nearly equal modes can swap order
    values.sort_by(|a, b| a.value.total_cmp(&b.value));
    for (i, v) in values.iter_mut().enumerate() {
        v.k = i + 1;
    }
    let mut cid = 0;
    for i in 1..values.len() {
        let (a, b) = (&values[i - 1], &values[i]);
        let resolved = a.error_estimate + b.error_estimate;
        let tol = (CLUSTER_REL * b.value.abs().max(a.value.abs())).max(if resolved.is_nan() { 0.0 } else { resolved });
        if (b.value - a.value).abs() > tol.max(1e-300) {
            cid += 1;
        }
        values[i].cluster = cid;
    }
    Ok(FemSpectrum { levels, values })
}

/// Solves on each mesh size (levels concurrently) and extrapolates.
pub fn refine_extrapolate(domain: &Domain, hs: &[f64], count: usize) -> Result<FemSpectrum> {
    let levels = par_map(hs, |&h| solve_level(domain, h, count));
    extrapolate_levels(levels.into_iter().collect::<Result<Vec<_>>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::examples;

    #[test]
    fn pencil_invariants() {
        let m = mesh(&examples::annulus(0.25, 1.0), 0.2).unwrap();
        let p = assemble(&m).unwrap();
        assert!(p.k.row_sums().iter().all(|s| s.abs() < 1e-12));
        let total: f64 = p.m.row_sums().iter().sum();
        assert!((total - m.area()).abs() < 1e-12);
        assert_eq!(p, assemble_sequential(&m).unwrap());
    }

    #[test]
    fn degenerate_triangle() {
        let mut m = mesh(&examples::rectangle(1.0, 1.0), 0.5).unwrap();
        m.vertices[m.triangles[0][1]] = m.vertices[m.triangles[0][0]];
        assert!(matches!(assemble(&m), Err(Error::Geometry(_))));
    }

    #[test]
    fn dense_and_subspace_agree() {
        let m = mesh(&examples::rectangle(2.0, 1.0), 0.12).unwrap();
        let p = assemble(&m).unwrap();
        let a = dense(&p, 6).unwrap();
        let b = subspace(&p, 6).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "{x} {y}");
        }
        assert!(a.values[0].abs() < 1e-8 && b.values[0].abs() < 1e-8);
        assert!(b.residuals.iter().all(|r| *r <= RESIDUAL_TOL));
    }

    #[test]
    fn count_limits() {
        let m = mesh(&examples::rectangle(1.0, 1.0), 0.5).unwrap();
        let p = assemble(&m).unwrap();
        assert!(smallest_eigs(&p, 0).is_err());
        assert!(smallest_eigs(&p, 31).is_err());
    }
}
