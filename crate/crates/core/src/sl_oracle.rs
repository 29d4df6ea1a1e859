//! Finite-difference solver for the weighted radial problem
//! `-(r^{N-1} v')' + l(l+N-2) r^{N-3} v = mu r^{N-1} v` on `(alpha, beta)`.
//!
//! Vertex-centred conservative scheme: flux weights `r_{i+1/2}^{N-1} / h`, and
//! mass and potential integrated exactly over each dual cell. The pencil is
//! reduced to a symmetric tridiagonal matrix by the diagonal mass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{richardson2, Extrapolated, SymTridiagonal};
use crate::radial::RadialProfile;
use crate::shell::{Boundary, ShellSpec};

pub const MIN_INTERVALS: usize = 16;
/// Grid used by [`radial_eigenfunction`].
pub const PROFILE_INTERVALS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
}

impl RadialGrid {
    pub fn new(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        if n < MIN_INTERVALS {
            return Err(Error::Precondition(format!(
                "radial grid needs at least {MIN_INTERVALS} intervals, got {n}"
            )));
        }
        Ok(Self { alpha, beta, n })
    }

    pub fn h(&self) -> f64 {
        (self.beta - self.alpha) / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.beta
        } else {
            self.alpha + i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.node(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SLResult {
    pub shell: ShellSpec,
    pub l: usize,
    pub boundary: Boundary,
    pub grid: RadialGrid,
    pub eigenvalues: Vec<f64>,
    /// Node samples on the full grid, normalized in the discrete weighted norm.
    pub eigenvectors: Vec<Vec<f64>>,
}

/// The discrete pencil restricted to the free nodes `first..=last`.
struct Pencil {
    first: usize,
    last: usize,
    /// Stiffness diagonal, off-diagonal and diagonal mass on the free nodes.
    a: Vec<f64>,
    b: Vec<f64>,
    m: Vec<f64>,
}

fn power_integral(a: f64, b: f64, p: i32) -> f64 {
    if p == -1 {
        (b / a).ln()
    } else {
        let q = (p + 1) as f64;
        (b.powi(p + 1) - a.powi(p + 1)) / q
    }
}

fn build_pencil(shell: &ShellSpec, l: usize, boundary: Boundary, grid: &RadialGrid) -> Pencil {
    let n = grid.n;
    let dim = shell.dim as i32;
    let h = grid.h();
    let ang = (l * (l + shell.dim - 2)) as f64;
    let singular = shell.is_ball() && l >= 1;
    let first = match boundary {
        Boundary::Neumann if !singular => 0,
        Boundary::Dirichlet if shell.is_ball() && l == 0 => 0,
        _ => 1,
    };
    let last = match boundary {
        Boundary::Neumann => n,
        Boundary::Dirichlet => n - 1,
    };
    let flux = |i: usize| (grid.node(i) + 0.5 * h).powi(dim - 1) / h;
    let mut a = Vec::with_capacity(last - first + 1);
    let mut b = Vec::with_capacity(last - first);
    let mut m = Vec::with_capacity(last - first + 1);
    for i in first..=last {
        let lo = (grid.node(i) - 0.5 * h).max(grid.alpha);
        let hi = (grid.node(i) + 0.5 * h).min(grid.beta);
        let mut diag = 0.0;
        if i > 0 {
            diag += flux(i - 1);
        }
        if i < n {
            diag += flux(i);
        }
        if ang > 0.0 {
            diag += ang * power_integral(lo, hi, dim - 3);
        }
        a.push(diag);
        m.push(power_integral(lo, hi, dim - 1));
        if i < last {
            b.push(-flux(i));
        }
    }
    Pencil { first, last, a, b, m }
}

/// The `count` smallest eigenpairs of the discretized radial problem.
pub fn fd_sl_solve(
    shell: &ShellSpec,
    l: usize,
    boundary: Boundary,
    n: usize,
    count: usize,
) -> Result<SLResult> {
    let grid = RadialGrid::new(shell.alpha, shell.beta, n)?;
    let p = build_pencil(shell, l, boundary, &grid);
    let s: Vec<f64> = p.m.iter().map(|m| 1.0 / m.sqrt()).collect();
    let diag: Vec<f64> = p.a.iter().zip(&s).map(|(a, s)| a * s * s).collect();
    let off: Vec<f64> = p.b.iter().enumerate().map(|(i, b)| b * s[i] * s[i + 1]).collect();
    let t = SymTridiagonal::new(diag, off);
    let eigenvalues = t.smallest(count);
    let eigenvectors = eigenvalues
        .iter()
        .map(|&lam| {
            let y = t.eigenvector(lam);
            let mut v = vec![0.0; n + 1];
            for (k, yk) in y.iter().enumerate() {
                v[p.first + k] = yk * s[k];
            }
            // positive just inside beta
            let probe = v[p.last.min(n)];
            let probe = if probe != 0.0 { probe } else { v[p.last - 1] };
            if probe < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    Ok(SLResult { shell: *shell, l, boundary, grid, eigenvalues, eigenvectors })
}

/// Discrete Rayleigh quotient `v^T A v / v^T M v` under the solver's own quadrature.
pub fn discrete_rayleigh(result: &SLResult, v: &[f64]) -> f64 {
    let p = build_pencil(&result.shell, result.l, result.boundary, &result.grid);
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..p.a.len() {
        let vi = v[p.first + k];
        num += p.a[k] * vi * vi;
        den += p.m[k] * vi * vi;
        if k + 1 < p.a.len() {
            num += 2.0 * p.b[k] * vi * v[p.first + k + 1];
        }
    }
    num / den
}

/// Richardson combination of solves on `n` and `2n` intervals.
pub fn extrapolate(coarse: &SLResult, fine: &SLResult) -> Result<Vec<Extrapolated>> {
    if coarse.shell != fine.shell || coarse.l != fine.l || coarse.boundary != fine.boundary {
        return Err(Error::Mismatch("extrapolation needs the same shell, degree and boundary".into()));
    }
    if fine.grid.n != 2 * coarse.grid.n {
        return Err(Error::Mismatch(format!(
            "extrapolation needs grids n and 2n, got {} and {}",
            coarse.grid.n, fine.grid.n
        )));
    }
    Ok(coarse
        .eigenvalues
        .iter()
        .zip(&fine.eigenvalues)
        .map(|(&c, &f)| richardson2(c, f))
        .collect())
}

/// Extrapolated eigenvalues from the pair of grids `n`, `2n`.
pub fn extrapolated_eigenvalues(
    shell: &ShellSpec,
    l: usize,
    boundary: Boundary,
    n: usize,
    count: usize,
) -> Result<Vec<Extrapolated>> {
    let c = fd_sl_solve(shell, l, boundary, n, count)?;
    let f = fd_sl_solve(shell, l, boundary, 2 * n, count)?;
    extrapolate(&c, &f)
}

/// The Neumann eigenfunction of index `j`, normalized by
/// `int v^2 r^{N-1} dr = 1` and positive at `beta`.
pub fn radial_eigenfunction(shell: &ShellSpec, l: usize, j: usize) -> Result<RadialProfile> {
    if j == 0 {
        return Err(Error::Domain("radial index j starts at 1".into()));
    }
    let res = fd_sl_solve(shell, l, Boundary::Neumann, PROFILE_INTERVALS, j)?;
    let v = res.eigenvectors[j - 1].clone();
    Ok(RadialProfile::from_samples(*shell, l, res.eigenvalues[j - 1], res.grid.nodes(), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_too_small() {
        let s = ShellSpec::new(0.25, 1.0, 2).unwrap();
        assert!(matches!(
            fd_sl_solve(&s, 1, Boundary::Neumann, 8, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn constant_mode_on_small_grid() {
        let s = ShellSpec::new(0.25, 1.0, 3).unwrap();
        let r = fd_sl_solve(&s, 0, Boundary::Neumann, 64, 2).unwrap();
        assert!(r.eigenvalues[0].abs() < 1e-10);
        let v = &r.eigenvectors[0];
        assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-8 * v[0].abs()));
    }

    #[test]
    fn mismatched_extrapolation() {
        let s = ShellSpec::new(0.25, 1.0, 2).unwrap();
        let a = fd_sl_solve(&s, 1, Boundary::Neumann, 32, 1).unwrap();
        let b = fd_sl_solve(&s, 1, Boundary::Neumann, 48, 1).unwrap();
        assert!(extrapolate(&a, &b).is_err());
        let c = fd_sl_solve(&s, 2, Boundary::Neumann, 64, 1).unwrap();
        assert!(extrapolate(&a, &c).is_err());
    }
}
