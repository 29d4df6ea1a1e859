//! Bessel functions and p-zeros against independent oracles: power series in
//! double-double arithmetic, the trapezoid-rule integral representation, and
//! closed trigonometric forms at half-integer orders.

use std::f64::consts::PI;

use neumann_spectra::specialfn::{
    bessel_deriv, bessel_j, bessel_jy, bessel_y, gamma, p_function, p_zero, BesselOrder, Kind,
};
use proptest::prelude::*;

#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        let lo = err + self.lo + o.lo;
        let hi = s + lo;
        Dd { hi, lo: lo - (hi - s) }
    }
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let lo = e + self.hi * o.lo + self.lo * o.hi;
        let hi = p + lo;
        Dd { hi, lo: lo - (hi - p) }
    }
    fn scale(self, x: f64) -> Dd {
        self.mul(Dd::new(x))
    }
    fn div(self, x: f64) -> Dd {
        let q = self.hi / x;
        let r = self.add(Dd::new(q).scale(-x));
        Dd::new(q).add(Dd::new(r.hi / x))
    }
    fn div_dd(self, d: Dd) -> Dd {
        let q1 = self.hi / d.hi;
        let r = self.add(d.scale(-q1));
        let q2 = r.hi / d.hi;
        let r = r.add(d.scale(-q2));
        Dd::new(q1).add(Dd::new(q2)).add(Dd::new(r.hi / d.hi))
    }
    fn f(self) -> f64 {
        self.hi + self.lo
    }
}

/// `sum_k (-1)^k (x/2)^{2k+nu} / (k! Gamma(k+nu+1))` for `nu` not a negative integer.
fn series_j(nu: f64, x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = Dd::new((x / 2.0).powf(nu) / gamma(nu + 1.0));
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        let den = Dd::new(kf * kf).add(Dd::new(kf).scale(nu));
        term = term.scale(-q).div_dd(den);
        sum = sum.add(term);
        if term.f().abs() < 1e-34 * sum.f().abs().max(1e-300) {
            break;
        }
    }
    sum.f()
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn harmonic(m: usize) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}

/// Integer-order `Y_n` from its logarithmic power series.
fn series_y_int(n: usize, x: f64) -> f64 {
    let q = x * x / 4.0;
    let h = x / 2.0;
    let fact = |m: usize| (1..=m).fold(1.0, |a, i| a * i as f64);
    let mut head = Dd::new(0.0);
    for k in 0..n {
        head = head.add(Dd::new(fact(n - k - 1) / fact(k) * q.powi(k as i32)));
    }
    let head = head.scale(-h.powi(-(n as i32)) / PI);
    let jn = series_j(n as f64, x);
    let log_part = 2.0 / PI * h.ln() * jn;
    let mut tail = Dd::new(0.0);
    let mut c = Dd::new(1.0 / fact(n));
    for k in 0..200 {
        if k > 0 {
            c = c.scale(-q).div(k as f64 * (n + k) as f64);
        }
        let psi = -2.0 * EULER_GAMMA + harmonic(k) + harmonic(n + k);
        let t = c.scale(psi);
        tail = tail.add(t);
        if k > 5 && t.f().abs() < 1e-34 * tail.f().abs().max(1e-300) {
            break;
        }
    }
    let tail = tail.scale(-h.powi(n as i32) / PI);
    head.add(Dd::new(log_part)).add(tail).f()
}

/// Non-integer order `Y_nu = (J_nu cos(nu pi) - J_{-nu}) / sin(nu pi)`.
fn series_y_frac(nu: f64, x: f64) -> f64 {
    let c = (nu * PI).cos();
    let s = (nu * PI).sin();
    let a = Dd::new(series_j(nu, x)).scale(c);
    let b = Dd::new(-series_j(-nu, x));
    a.add(b).f() / s
}

/// `J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt`, trapezoid on the full period.
fn integral_j(n: i32, x: f64) -> f64 {
    let m = 4096;
    let h = 2.0 * PI / m as f64;
    let s: f64 = (0..m)
        .map(|i| {
            let t = i as f64 * h;
            (n as f64 * t - x * t.sin()).cos()
        })
        .sum();
    s * h / (2.0 * PI)
}

fn order(v: f64) -> BesselOrder {
    BesselOrder::new(v).unwrap()
}

fn envelope(nu: f64, x: f64, f: f64) -> f64 {
    f.abs().max(if x > nu { (2.0 / (PI * x)).sqrt() } else { 0.0 })
}

#[test]
fn frozen_values() {
    assert!((bessel_j(order(1.0), 1.0).unwrap() - 0.440_050_585_744_933_5).abs() < 1e-15);
    assert!((bessel_y(order(0.0), 1.0).unwrap() - 0.088_256_964_215_676_96).abs() < 1e-15);
    assert!((series_j(1.0, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-16);
    assert!((series_y_int(0, 1.0) - 0.088_256_964_215_676_96).abs() < 1e-15);
}

#[test]
fn j_matches_power_series() {
    let orders = [0.0, 0.3, 1.0, 1.7, 2.0, 2.5, 5.0, 7.5, 10.0, 12.25, 20.0];
    let xs = [0.05, 0.3, 1.0, 1.99, 2.0, 3.7, 8.0, 13.0, 20.0, 25.0];
    for &nu in &orders {
        for &x in &xs {
            let got = bessel_j(order(nu), x).unwrap();
            let want = series_j(nu, x);
            let tol = 1e-10 * envelope(nu, x, want);
            assert!((got - want).abs() <= tol, "J_{nu}({x}): {got} vs {want}");
        }
    }
}

#[test]
fn y_matches_power_series() {
    for n in [0usize, 1, 2, 3, 6, 10] {
        for &x in &[0.05, 0.5, 1.0, 1.99, 2.0, 4.5, 9.0, 16.0] {
            let got = bessel_y(order(n as f64), x).unwrap();
            let want = series_y_int(n, x);
            let tol = 1e-10 * envelope(n as f64, x, want);
            assert!((got - want).abs() <= tol, "Y_{n}({x}): {got} vs {want}");
        }
    }
    for &nu in &[0.3, 1.7, 2.5, 4.25, 7.5] {
        for &x in &[0.1, 1.0, 1.99, 2.0, 6.0, 12.0] {
            let got = bessel_y(order(nu), x).unwrap();
            let want = series_y_frac(nu, x);
            let tol = 1e-10 * envelope(nu, x, want);
            assert!((got - want).abs() <= tol, "Y_{nu}({x}): {got} vs {want}");
        }
    }
}

#[test]
fn j_matches_integral_representation_at_large_argument() {
    for n in [0, 1, 4, 11, 20] {
        for &x in &[30.0, 75.5, 140.0, 200.0, 640.0] {
            let got = bessel_j(order(n as f64), x).unwrap();
            let want = integral_j(n, x);
            assert!((got - want).abs() <= 1e-10 * envelope(n as f64, x, want), "J_{n}({x})");
        }
    }
}

#[test]
fn half_integer_orders_have_closed_forms() {
    for &x in &[0.2, 1.0, 2.0, 9.0, 40.0, 300.0] {
        let s = (2.0 / (PI * x)).sqrt();
        let j32 = s * (x.sin() / x - x.cos());
        let y32 = -s * (x.cos() / x + x.sin());
        let b = bessel_jy(1.5, x).unwrap();
        assert!((b.j - j32).abs() <= 1e-12 * s.max(j32.abs()), "x={x}");
        assert!((b.y - y32).abs() <= 1e-12 * s.max(y32.abs()), "x={x}");
    }
}

#[test]
fn y_derivative_matches_finite_difference() {
    let h = 1e-5;
    let d = bessel_deriv(Kind::Y, order(1.0), 2.0).unwrap();
    let fd = (bessel_y(order(1.0), 2.0 + h).unwrap() - bessel_y(order(1.0), 2.0 - h).unwrap()) / (2.0 * h);
    assert!((d - fd).abs() < 1e-8);
}

#[test]
fn small_argument_limits() {
    assert!((bessel_j(order(0.0), 1e-10).unwrap() - 1.0).abs() < 1e-15);
    assert!((bessel_deriv(Kind::J, order(1.0), 1e-10).unwrap() - 0.5).abs() < 1e-12);
    assert!(bessel_y(order(0.0), 1e-10).unwrap() < -10.0);
}

#[test]
fn disk_constants_from_p_zeros() {
    let p11 = p_zero(1.0, 1, 1).unwrap();
    let p12 = p_zero(1.0, 1, 2).unwrap();
    assert!((PI * p11 * p11 - 10.6499).abs() < 5e-4);
    assert!((PI * p12 * p12 - 29.3059).abs() < 5e-4);
}

/// Sign scan of `d/dr (r^{1/2} J_{-1/2}(r)) = -sqrt(2/pi) sin r` at step 1e-4.
#[test]
fn half_order_p_zero_against_sign_scan() {
    let f = |r: f64| -(2.0 / PI).sqrt() * r.sin();
    let mut r = 1e-4;
    while f(r).signum() == f(r + 1e-4).signum() {
        r += 1e-4;
    }
    let z = p_zero(0.5, 1, 0).unwrap();
    assert!(z > r - 1e-12 && z < r + 1e-4 + 1e-12, "{z} not in [{r}, {}]", r + 1e-4);
}

#[test]
fn p_zeros_match_dense_sign_scan() {
    for &(nu, l) in &[(1.0, 1), (1.5, 2), (2.0, 3)] {
        let mut found = Vec::new();
        let mut r: f64 = 0.01;
        let step = 1e-3;
        let mut prev = p_function(nu, l, r).unwrap();
        while found.len() < 3 {
            let next = p_function(nu, l, r + step).unwrap();
            if prev.signum() != next.signum() {
                found.push(r + 0.5 * step);
            }
            prev = next;
            r += step;
        }
        for (j, z) in found.iter().enumerate() {
            assert!((p_zero(nu, j + 1, l).unwrap() - z).abs() <= step);
        }
    }
}

#[test]
fn p_zeros_increase_with_spacing_tending_to_pi() {
    for &(nu, l) in &[(1.0, 0), (1.0, 1), (1.5, 4), (3.0, 8), (12.0, 2)] {
        let z: Vec<f64> = (1..=20).map(|j| p_zero(nu, j, l).unwrap()).collect();
        assert!(z.windows(2).all(|w| w[1] > w[0]));
        let gap = z[19] - z[18];
        assert!((gap - PI).abs() < 0.05 * PI, "nu={nu} l={l}: gap {gap}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn wronskian(nu in 0.0f64..10.0, x in 0.1f64..50.0) {
        let b = bessel_jy(nu, x).unwrap();
        let w = b.j * b.yp - b.jp * b.y;
        let want = 2.0 / (PI * x);
        prop_assert!((w - want).abs() <= 1e-10 * want.max(1.0));
    }

    #[test]
    fn three_term_recurrence(nu in 1.0f64..10.0, x in 0.1f64..50.0) {
        let m = bessel_jy(nu - 1.0, x).unwrap();
        let c = bessel_jy(nu, x).unwrap();
        let p = bessel_jy(nu + 1.0, x).unwrap();
        let sj = (2.0 * nu / x * c.j).abs().max(m.j.abs()).max(1e-300);
        prop_assert!((m.j + p.j - 2.0 * nu / x * c.j).abs() <= 1e-9 * sj);
        let sy = (2.0 * nu / x * c.y).abs().max(p.y.abs());
        prop_assert!((m.y + p.y - 2.0 * nu / x * c.y).abs() <= 1e-9 * sy);
        let sd = c.jp.abs().max(m.j.abs()).max(p.j.abs());
        prop_assert!((c.jp - 0.5 * (m.j - p.j)).abs() <= 1e-10 * sd);
        let sdy = c.yp.abs().max(m.y.abs()).max(p.y.abs());
        prop_assert!((c.yp - 0.5 * (m.y - p.y)).abs() <= 1e-10 * sdy);
    }
}
