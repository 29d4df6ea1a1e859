//! Small numerical kernels shared across modules: bracketed root polishing,
//! Gauss-Legendre rules and Richardson extrapolation.

use crate::error::{Error, Result};

/// Brent's method on a bracket `[a, b]` with `f(a)` and `f(b)` of opposite sign.
///
/// Terminates when the bracket is narrower than `rel_tol * |x| + 1e-300`.
pub fn brent<F>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Precondition(format!(
            "brent: interval [{a}, {b}] does not bracket a sign change"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NonConvergence {
        what: "brent root polish".into(),
        iterations: 200,
        residual: fb.abs(),
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` with a composite Gauss-Legendre rule of
/// `panels` equal panels and `order` points per panel.
pub fn gauss_integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (xi, wi) in x.iter().zip(&w) {
            sum += wi * f(mid + 0.5 * h * xi);
        }
    }
    0.5 * h * sum
}

/// A value refined by Richardson extrapolation, with an attached error estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Extrapolated {
    pub value: f64,
    pub error_estimate: f64,
}

/// Richardson combination for a second-order method observed at spacing `h` (`coarse`)
/// and `h/2` (`fine`).
pub fn richardson2(coarse: f64, fine: f64) -> Extrapolated {
    Extrapolated {
        value: (4.0 * fine - coarse) / 3.0,
        error_estimate: (fine - coarse).abs() / 3.0,
    }
}


/// A real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm count of negative pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + x.abs() + f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection to full precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale * 1e-3 {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `count` smallest eigenvalues, ascending.
    pub fn smallest(&self, count: usize) -> Vec<f64> {
        (0..count.min(self.len())).map(|k| self.eigenvalue(k)).collect()
    }

    /// Unit eigenvector for an accurate eigenvalue `lambda`, by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let (lo, hi) = self.gershgorin();
        let shift = lambda + 1e-13 * lo.abs().max(hi.abs()).max(1.0);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// Solves `(T - s I) y = b` by LU with partial pivoting.
    fn solve_shifted(&self, s: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            let d = self.diag[0] - s;
            return vec![b[0] / if d == 0.0 { f64::EPSILON } else { d }];
        }
        // after pivoting each row of U has up to three entries
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut rhs = b.to_vec();
        let tiny = f64::EPSILON * (self.gershgorin().1.abs() + s.abs()).max(f64::MIN_POSITIVE);
        let mut d = self.diag[0] - s;
        let mut e = self.off[0];
        for i in 0..n - 1 {
            let sub = self.off[i];
            let nd = self.diag[i + 1] - s;
            let ne = if i + 1 < n - 1 { self.off[i + 1] } else { 0.0 };
            if sub.abs() > d.abs() {
                let m = d / sub;
                u0[i] = sub;
                u1[i] = nd;
                u2[i] = ne;
                rhs.swap(i, i + 1);
                rhs[i + 1] -= m * rhs[i];
                d = e - m * nd;
                e = -m * ne;
            } else {
                let dd = if d.abs() < tiny { tiny } else { d };
                let m = sub / dd;
                u0[i] = dd;
                u1[i] = e;
                rhs[i + 1] -= m * rhs[i];
                d = nd - m * e;
                e = ne;
            }
        }
        u0[n - 1] = if d.abs() < tiny { tiny } else { d };
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= u1[i] * y[i + 1];
            }
            if i + 2 < n {
                acc -= u2[i] * y[i + 2];
            }
            y[i] = acc / u0[i];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let num: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((num - exact).abs() < 1e-13, "n={n} deg={deg}: {num} vs {exact}");
            }
        }
    }

    #[test]
    fn brent_finds_cosine_root() {
        let r = brent(|x| Ok(x.cos()), 1.0, 2.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_unbracketed_interval() {
        assert!(brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn tridiagonal_laplacian_spectrum() {
        let n = 40;
        let t = SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]);
        for k in 0..5 {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            let got = t.eigenvalue(k);
            assert!((got - exact).abs() < 1e-14, "k={k}");
            let v = t.eigenvector(got);
            for i in 0..n {
                let prev = if i > 0 { v[i - 1] } else { 0.0 };
                let next = if i + 1 < n { v[i + 1] } else { 0.0 };
                assert!((2.0 * v[i] - prev - next - got * v[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn richardson_removes_quadratic_term() {
        let exact = 2.0;
        let c = 5.0;
        let h: f64 = 0.1;
        let e = richardson2(exact + c * h * h, exact + c * h * h / 4.0);
        assert!((e.value - exact).abs() < 1e-14);
        assert!(e.error_estimate >= (exact + c * h * h / 4.0 - exact).abs() * 0.99);
    }
}
