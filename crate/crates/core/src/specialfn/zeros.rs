//! Zeros of the radial boundary functions: `p`-zeros for balls and the
//! Bessel cross-products whose roots are the shell eigenvalues.

use std::f64::consts::PI;

use super::bessel::{bessel_jy, BesselValues};
use crate::error::{Error, Result};
use crate::numerics::brent;
use crate::shell::ShellSpec;

/// Step of the sign scan for `p`-zeros.
pub const P_SCAN_STEP: f64 = 0.05;
const P_SCAN_END: f64 = 400.0;
const ROOT_REL_TOL: f64 = 1e-15;

/// Sign changes of `f` on a uniform grid, then Brent polish of each bracket.
/// Stops after `limit` roots or at `end`.
pub(crate) fn scan_roots<F>(mut f: F, start: f64, end: f64, step: f64, limit: usize) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut roots = Vec::new();
    let mut a = start;
    let mut fa = f(a)?;
    while roots.len() < limit && a < end {
        let b = (a + step).min(end);
        let fb = f(b)?;
        if fb == 0.0 {
            roots.push(b);
            // step past the exact zero so it is not counted twice
            let c = (b + 0.5 * step).min(end);
            a = c;
            fa = f(c)?;
            continue;
        }
        if fa != 0.0 && fa.signum() != fb.signum() {
            roots.push(brent(&mut f, a, b, ROOT_REL_TOL)?);
        }
        a = b;
        fa = fb;
    }
    Ok(roots)
}

/// `h(r) = (1 - nu) J_m(r) + r J'_m(r)` with `m = nu + l - 1`, so that
/// `(r^{1-nu} J_m(r))' = r^{-nu} h(r)`.
fn p_kernel(nu: f64, l: usize, r: f64) -> Result<f64> {
    let b = bessel_jy(nu + l as f64 - 1.0, r)?;
    Ok((1.0 - nu) * b.j + r * b.jp)
}

/// `(r^{1-nu} J_{nu+l-1}(r))'`.
pub fn p_function(nu: f64, l: usize, r: f64) -> Result<f64> {
    Ok(r.powf(-nu) * p_kernel(nu, l, r)?)
}

fn check_p_args(nu: f64, j: usize, l: usize) -> Result<()> {
    if !(0.0..=12.0).contains(&nu) || j == 0 || j > 20 || l > 8 {
        return Err(Error::Domain(format!(
            "p_zero needs 0 <= nu <= 12, 1 <= j <= 20, l <= 8 (got nu={nu}, j={j}, l={l})"
        )));
    }
    Ok(())
}

/// The `j`-th positive zero of `(r^{1-nu} J_{nu+l-1}(r))'`.
pub fn p_zero(nu: f64, j: usize, l: usize) -> Result<f64> {
    check_p_args(nu, j, l)?;
    p_zeros(nu, l, j).map(|z| z[j - 1])
}

/// The first `count` positive zeros of `(r^{1-nu} J_{nu+l-1}(r))'`, ascending.
pub fn p_zeros(nu: f64, l: usize, count: usize) -> Result<Vec<f64>> {
    let z = scan_roots(|r| p_kernel(nu, l, r), P_SCAN_STEP, P_SCAN_END, P_SCAN_STEP, count)?;
    if z.len() < count {
        return Err(Error::SearchFailure {
            what: format!("p-zero #{count} for nu={nu}, l={l}"),
            window: P_SCAN_END,
        });
    }
    Ok(z)
}

/// Positive zeros of `(r^{1-nu} J_{nu+l-1}(r))'` not exceeding `r_max`.
pub fn p_zeros_below(nu: f64, l: usize, r_max: f64) -> Result<Vec<f64>> {
    scan_roots(|r| p_kernel(nu, l, r), P_SCAN_STEP, r_max, P_SCAN_STEP, usize::MAX)
}

/// Positive zeros of `J_nu` not exceeding `r_max`.
pub fn bessel_j_zeros_below(nu: f64, r_max: f64) -> Result<Vec<f64>> {
    scan_roots(|r| Ok(bessel_jy(nu, r)?.j), P_SCAN_STEP, r_max, P_SCAN_STEP, usize::MAX)
}

/// `((2 - N)/2) C_nu(k r) + r k C'_nu(k r)` for both kinds at once.
fn neumann_factors(dim: usize, nu: f64, k: f64, r: f64) -> Result<(f64, f64)> {
    let BesselValues { j, y, jp, yp } = bessel_jy(nu, k * r)?;
    let c = (2.0 - dim as f64) / 2.0;
    Ok((c * j + r * k * jp, c * y + r * k * yp))
}

fn require_hole(shell: &ShellSpec) -> Result<()> {
    if shell.alpha <= 0.0 {
        return Err(Error::Precondition(
            "cross-product needs alpha > 0; use p_zero for balls".into(),
        ));
    }
    Ok(())
}

/// The Neumann cross-product `F(mu)` for degree `l`.
#[allow(non_snake_case)]
pub fn cross_product_F(mu: f64, shell: &ShellSpec, l: usize) -> Result<f64> {
    require_hole(shell)?;
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("cross-product needs mu > 0, got {mu}")));
    }
    let nu = shell.order(l);
    let k = mu.sqrt();
    let (aj, ay) = neumann_factors(shell.dim, nu, k, shell.alpha)?;
    let (bj, by) = neumann_factors(shell.dim, nu, k, shell.beta)?;
    Ok(aj * by - ay * bj)
}

/// `F` divided by the norms of its two boundary vectors, as a function of
/// `k = sqrt(mu)`; same zeros, bounded by one in magnitude.
pub(crate) fn normalized_neumann(shell: &ShellSpec, l: usize, k: f64) -> Result<f64> {
    let nu = shell.order(l);
    let (aj, ay) = neumann_factors(shell.dim, nu, k, shell.alpha)?;
    let (bj, by) = neumann_factors(shell.dim, nu, k, shell.beta)?;
    Ok((aj * by - ay * bj) / (aj.hypot(ay) * bj.hypot(by)))
}

/// Dirichlet cross-product `J_nu(k a) Y_nu(k b) - Y_nu(k a) J_nu(k b)`, normalized.
pub(crate) fn normalized_dirichlet(shell: &ShellSpec, l: usize, k: f64) -> Result<f64> {
    let nu = shell.order(l);
    let a = bessel_jy(nu, k * shell.alpha)?;
    let b = bessel_jy(nu, k * shell.beta)?;
    Ok((a.j * b.y - a.y * b.j) / (a.j.hypot(a.y) * b.j.hypot(b.y)))
}

/// Scan step in `k` for cross-products on a shell.
pub(crate) fn shell_scan_step(shell: &ShellSpec) -> f64 {
    PI / (20.0 * (shell.beta - shell.alpha))
}
