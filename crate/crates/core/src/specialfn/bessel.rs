//! Real-order Bessel functions `J_nu`, `Y_nu` and their derivatives.
//!
//! For `x < 2` the Temme series gives `Y_mu`, `Y_{mu+1}` at a reduced order
//! `|mu| <= 1/2`; for `x >= 2` Steed's continued fraction (CF2) does. In both
//! cases the ratio `J'_nu / J_nu` comes from the continued fraction CF1 and the
//! Wronskian fixes the scale, which keeps every branch accurate to a few ulps
//! of relative error away from the zeros.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-290;
const MAXIT: usize = 200_000;
const TEMME_LIMIT: f64 = 2.0;

/// Largest supported argument.
pub const X_MAX: f64 = 2000.0;
/// Largest supported order magnitude.
pub const NU_MAX: f64 = 40.0;

/// A non-negative real Bessel order.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 || nu > NU_MAX {
            return Err(Error::Domain(format!(
                "Bessel order {nu} outside [0, {NU_MAX}]"
            )));
        }
        Ok(Self(nu))
    }

    /// Order `N/2 + l - 1` of the radial problem on an `N`-dimensional shell.
    pub fn for_shell(dim: usize, l: usize) -> Result<Self> {
        Self::new(dim as f64 / 2.0 + l as f64 - 1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which kind of Bessel function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Kind {
    J,
    Y,
}

/// `J_nu(x)`, `Y_nu(x)` and their `x`-derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselValues {
    pub j: f64,
    pub y: f64,
    pub jp: f64,
    pub yp: f64,
}

impl BesselValues {
    pub fn get(&self, kind: Kind) -> f64 {
        match kind {
            Kind::J => self.j,
            Kind::Y => self.y,
        }
    }

    pub fn deriv(&self, kind: Kind) -> f64 {
        match kind {
            Kind::J => self.jp,
            Kind::Y => self.yp,
        }
    }
}

fn check_argument(x: f64) -> Result<()> {
    if !(x > 0.0 && x <= X_MAX) {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside (0, {X_MAX}]"
        )));
    }
    Ok(())
}

pub fn bessel_j(nu: BesselOrder, x: f64) -> Result<f64> {
    Ok(bessel_jy(nu.value(), x)?.j)
}

pub fn bessel_y(nu: BesselOrder, x: f64) -> Result<f64> {
    Ok(bessel_jy(nu.value(), x)?.y)
}

pub fn bessel_deriv(kind: Kind, nu: BesselOrder, x: f64) -> Result<f64> {
    Ok(bessel_jy(nu.value(), x)?.deriv(kind))
}

/// `cos(pi v)` and `sin(pi v)` with exact results at multiples of `1/2`.
fn cos_sin_pi(v: f64) -> (f64, f64) {
    let twice = 2.0 * v;
    if twice == twice.round() {
        let k = (twice.round() as i64).rem_euclid(4);
        return match k {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
    }
    let r = v.rem_euclid(2.0) * PI;
    (r.cos(), r.sin())
}

/// Bessel functions of any real order `|nu| <= NU_MAX`; negative orders use the
/// reflection formulas `J_{-v} = cos(pi v) J_v - sin(pi v) Y_v`,
/// `Y_{-v} = sin(pi v) J_v + cos(pi v) Y_v`.
pub fn bessel_jy(nu: f64, x: f64) -> Result<BesselValues> {
    check_argument(x)?;
    if !nu.is_finite() || nu.abs() > NU_MAX {
        return Err(Error::Domain(format!("Bessel order {nu} outside [-{NU_MAX}, {NU_MAX}]")));
    }
    if nu >= 0.0 {
        return jy_nonnegative(nu, x);
    }
    let v = -nu;
    let b = jy_nonnegative(v, x)?;
    let (c, s) = cos_sin_pi(v);
    Ok(BesselValues {
        j: c * b.j - s * b.y,
        y: s * b.j + c * b.y,
        jp: c * b.jp - s * b.yp,
        yp: s * b.jp + c * b.yp,
    })
}

/// Coefficients of the Taylor series `1/Gamma(z) = sum c_k z^k`, `k = 1..26`.
const RECIP_GAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// Returns `(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu))` for `|mu| <= 1/2`, where
/// `gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)` and
/// `gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let mut odd = 0.0; // c1 + c3 mu^2 + ...
    let mut even = 0.0; // c2 + c4 mu^2 + ...
    for k in (0..13).rev() {
        odd = odd * mu2 + RECIP_GAMMA[2 * k];
        even = even * mu2 + RECIP_GAMMA[2 * k + 1];
    }
    let gam1 = -even;
    let gam2 = odd;
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

fn jy_nonnegative(xnu: f64, x: f64) -> Result<BesselValues> {
    let nl = if x < TEMME_LIMIT {
        (xnu + 0.5) as usize
    } else {
        (xnu - x + 1.5).max(0.0) as usize
    };
    let xmu = xnu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_nu / J_nu by modified Lentz.
    let mut isign = 1.0;
    let mut h = (xnu * xi).max(FPMIN);
    let mut b = xi2 * xnu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: format!("Bessel CF1 at nu={xnu}, x={x}"),
            iterations: MAXIT,
            residual: f64::NAN,
        });
    }

    // Downward recurrence to the reduced order mu.
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut fact = xnu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < TEMME_LIMIT {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let ee = e.exp();
        let mut p = ee / (gampl * PI);
        let mut q = 1.0 / (ee * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut ok = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::NonConvergence {
                what: format!("Temme series at nu={xnu}, x={x}"),
                iterations: MAXIT,
                residual: f64::NAN,
            });
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // CF2 (Steed) for p + iq = (J' + iY') / (J + iY).
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut ok = false;
        for i in 2..MAXIT {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::NonConvergence {
                what: format!("Bessel CF2 at nu={xnu}, x={x}"),
                iterations: MAXIT,
                residual: f64::NAN,
            });
        }
        let gam = (p - f) / q;
        let mag = (w / ((p - f) * gam + q)).sqrt();
        rjmu = mag.copysign(rjl);
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let scale = rjmu / rjl;
    let j = rjl1 * scale;
    let jp = rjp1 * scale;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    let y = rymu;
    let yp = xnu * xi * rymu - ry1;
    Ok(BesselValues { j, y, jp, yp })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(v: f64) -> BesselOrder {
        BesselOrder::new(v).unwrap()
    }

    #[test]
    fn j0_tends_to_one_at_origin() {
        assert!((bessel_j(order(0.0), 1e-12).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn half_order_closed_forms() {
        let x = PI;
        assert!(bessel_j(order(0.5), x).unwrap().abs() < 1e-15);
        assert!(bessel_y(order(0.5), PI / 2.0).unwrap().abs() < 1e-15);
        for &x in &[0.3, 1.0, 1.9, 2.0, 7.5, 31.0, 150.0] {
            let s = (2.0 / (PI * x)).sqrt();
            let j = bessel_j(order(0.5), x).unwrap();
            let y = bessel_y(order(0.5), x).unwrap();
            assert!((j - s * x.sin()).abs() <= 1e-12 * s, "x={x}");
            assert!((y + s * x.cos()).abs() <= 1e-12 * s, "x={x}");
        }
    }

    #[test]
    fn negative_half_order_is_cosine() {
        for &x in &[0.5, 2.5, 10.0] {
            let b = bessel_jy(-0.5, x).unwrap();
            let s = (2.0 / (PI * x)).sqrt();
            assert!((b.j - s * x.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_of_j0_is_minus_j1() {
        let d = bessel_deriv(Kind::J, order(0.0), 1.0).unwrap();
        let j1 = bessel_j(order(1.0), 1.0).unwrap();
        assert!((d + j1).abs() < 1e-15);
    }

    #[test]
    fn derivative_of_j1_at_origin_is_half() {
        let d = bessel_deriv(Kind::J, order(1.0), 1e-9).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn wronskian_at_reference_point() {
        let b = bessel_jy(1.0, 2.5).unwrap();
        let w = b.j * b.yp - b.jp * b.y;
        assert!((w - 2.0 / (PI * 2.5)).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        assert!(BesselOrder::new(-0.1).is_err());
        assert!(BesselOrder::new(NU_MAX + 1.0).is_err());
        assert!(bessel_j(order(1.0), 0.0).is_err());
        assert!(bessel_j(order(1.0), -1.0).is_err());
        assert!(bessel_y(order(1.0), X_MAX * 2.0).is_err());
    }
}
