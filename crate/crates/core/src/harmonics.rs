//! Homogeneous harmonic polynomials with exact coefficients, the bases
//! `Z1`, `Z2`, `Z3`, `Z~3` and the inner product
//! `<p, q> = (1/l!) sum_gamma gamma! a_gamma b_gamma`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;
/// Exponent vector `gamma` of a monomial `x^gamma`.
pub type MultiIndex = Vec<u32>;

/// An exact number `q * sqrt(m)` with `m` square-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Surd {
    pub q: Q,
    pub m: i64,
}

fn square_free(mut m: i64) -> (i64, i64) {
    // m = k^2 * rest
    let mut k = 1;
    let mut d = 2;
    while d * d <= m {
        while m % (d * d) == 0 {
            m /= d * d;
            k *= d;
        }
        d += 1;
    }
    (k, m)
}

impl Surd {
    pub fn rational(q: Q) -> Self {
        Surd { q, m: 1 }
    }

    /// `q * sqrt(m)` in canonical form.
    pub fn new(q: Q, m: i64) -> Self {
        assert!(m > 0, "radicand must be positive");
        let (k, rest) = square_free(m);
        Surd { q: q * Q::from_integer(k), m: rest }
    }

    pub fn mul(self, o: Surd) -> Surd {
        Surd::new(self.q * o.q, self.m * o.m)
    }

    pub fn to_f64(self) -> f64 {
        (*self.q.numer() as f64 / *self.q.denom() as f64) * (self.m as f64).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "{}", self.q)
        } else {
            write!(f, "{}*sqrt({})", self.q, self.m)
        }
    }
}

/// A homogeneous harmonic polynomial `scale * sum_gamma a_gamma x^gamma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicPoly {
    dim: usize,
    degree: u32,
    coeffs: BTreeMap<MultiIndex, Q>,
    scale: Surd,
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

fn laplacian_map(dim: usize, coeffs: &BTreeMap<MultiIndex, Q>) -> BTreeMap<MultiIndex, Q> {
    let mut out: BTreeMap<MultiIndex, Q> = BTreeMap::new();
    for (g, a) in coeffs {
        for i in 0..dim {
            if g[i] >= 2 {
                let mut h = g.clone();
                h[i] -= 2;
                let c = Q::from_integer((g[i] * (g[i] - 1)) as i64);
                *out.entry(h).or_insert_with(Q::zero) += *a * c;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// All multi-indices of length `dim` and total degree `degree`, lexicographic.
pub fn monomials(dim: usize, degree: u32) -> Vec<MultiIndex> {
    fn rec(dim: usize, left: u32, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
        if cur.len() == dim - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(dim, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

impl HarmonicPoly {
    /// Builds `sum a_gamma x^gamma` from terms; fails if not homogeneous or not harmonic.
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, Q)>) -> Result<Self> {
        let mut coeffs: BTreeMap<MultiIndex, Q> = BTreeMap::new();
        let mut degree = None;
        for (g, a) in terms {
            if g.len() != dim {
                return Err(Error::Mismatch(format!("multi-index {g:?} in dimension {dim}")));
            }
            let d: u32 = g.iter().sum();
            if *degree.get_or_insert(d) != d {
                return Err(Error::Domain("polynomial is not homogeneous".into()));
            }
            *coeffs.entry(g).or_insert_with(Q::zero) += a;
        }
        coeffs.retain(|_, v| !v.is_zero());
        if !laplacian_map(dim, &coeffs).is_empty() {
            return Err(Error::Domain("polynomial is not harmonic".into()));
        }
        Ok(Self { dim, degree: degree.unwrap_or(0), coeffs, scale: Surd::rational(Q::one()) })
    }

    /// `x_i` (0-based `i`).
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut g = vec![0; dim];
        g[i] = 1;
        Self::new(dim, [(g, Q::one())]).expect("linear monomials are harmonic")
    }

    pub fn with_scale(mut self, scale: Surd) -> Self {
        self.scale = self.scale.mul(scale);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn scale(&self) -> Surd {
        self.scale
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Q> {
        &self.coeffs
    }

    pub fn is_harmonic(&self) -> bool {
        laplacian_map(self.dim, &self.coeffs).is_empty()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .map(|(g, a)| q_f64(*a) * monomial_value(g, x))
            .sum();
        self.scale.to_f64() * s
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let sc = self.scale.to_f64();
        (0..self.dim)
            .map(|i| {
                let s: f64 = self
                    .coeffs
                    .iter()
                    .filter(|(g, _)| g[i] > 0)
                    .map(|(g, a)| {
                        let mut h = g.clone();
                        h[i] -= 1;
                        q_f64(*a) * g[i] as f64 * monomial_value(&h, x)
                    })
                    .sum();
                sc * s
            })
            .collect()
    }

    /// `(1/l!) sum gamma! a_gamma b_gamma` on the rational parts, before scaling.
    fn raw_inner(&self, other: &Self) -> Q {
        let mut s = Q::zero();
        for (g, a) in &self.coeffs {
            if let Some(b) = other.coeffs.get(g) {
                let gf: i64 = g.iter().map(|&e| factorial(e)).product();
                s += *a * *b * Q::from_integer(gf);
            }
        }
        s / Q::from_integer(factorial(self.degree))
    }

    fn sub_scaled(&self, other: &Self, c: Q) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (g, b) in &other.coeffs {
            *coeffs.entry(g.clone()).or_insert_with(Q::zero) -= c * *b;
        }
        coeffs.retain(|_, v| !v.is_zero());
        Self { dim: self.dim, degree: self.degree, coeffs, scale: self.scale }
    }
}

fn q_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn monomial_value(g: &[u32], x: &[f64]) -> f64 {
    g.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product()
}

impl fmt::Display for HarmonicPoly {
    /// Monomial list such as `+1 x1^2 -1 x2^2`, scale factored in front when not one.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale != Surd::rational(Q::one()) {
            write!(f, "({}) * ", self.scale)?;
        }
        let mut first = true;
        for (g, a) in self.coeffs.iter().rev() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let sign = if a.is_negative() { '-' } else { '+' };
            write!(f, "{sign}{}", a.abs())?;
            for (i, &e) in g.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, " x{}", i + 1)?,
                    _ => write!(f, " x{}^{e}", i + 1)?,
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `<p, q>`; zero for different degrees.
pub fn inner_product(p: &HarmonicPoly, q: &HarmonicPoly) -> Result<Surd> {
    if p.dim != q.dim {
        return Err(Error::Mismatch(format!(
            "inner product of polynomials in dimensions {} and {}",
            p.dim, q.dim
        )));
    }
    if p.degree != q.degree {
        return Ok(Surd::rational(Q::zero()));
    }
    let raw = p.raw_inner(q);
    if raw.is_zero() {
        return Ok(Surd::rational(Q::zero()));
    }
    Ok(p.scale.mul(q.scale).mul(Surd::rational(raw)))
}

/// The three sets `Z1 = {x_i}`, `Z2 = {x_i x_j : i < j}`, `Z3 = {x_i^2 - x_{i+1}^2}`.
#[derive(Debug, Clone)]
pub struct BasisZ {
    pub z1: Vec<HarmonicPoly>,
    pub z2: Vec<HarmonicPoly>,
    pub z3: Vec<HarmonicPoly>,
}

fn unit(dim: usize, pairs: &[(usize, u32)]) -> MultiIndex {
    let mut g = vec![0; dim];
    for &(i, e) in pairs {
        g[i] += e;
    }
    g
}

pub fn basis_z(dim: usize) -> BasisZ {
    let z1 = (0..dim).map(|i| HarmonicPoly::coordinate(dim, i)).collect();
    let mut z2 = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            z2.push(
                HarmonicPoly::new(dim, [(unit(dim, &[(i, 1), (j, 1)]), Q::one())])
                    .expect("x_i x_j is harmonic"),
            );
        }
    }
    let z3 = (0..dim.saturating_sub(1))
        .map(|i| {
            HarmonicPoly::new(
                dim,
                [(unit(dim, &[(i, 2)]), Q::one()), (unit(dim, &[(i + 1, 2)]), -Q::one())],
            )
            .expect("x_i^2 - x_{i+1}^2 is harmonic")
        })
        .collect();
    BasisZ { z1, z2, z3 }
}

/// The closed form `(1/sqrt(i(i+1))) (sum_{j<=i} x_j^2 - i x_{i+1}^2)`, `i = 1..N-1`.
pub fn z3_tilde_closed_form(dim: usize) -> Vec<HarmonicPoly> {
    (1..dim)
        .map(|i| {
            let mut terms: Vec<(MultiIndex, Q)> =
                (0..i).map(|j| (unit(dim, &[(j, 2)]), Q::one())).collect();
            terms.push((unit(dim, &[(i, 2)]), Q::from_integer(-(i as i64))));
            let ii = (i * (i + 1)) as i64;
            HarmonicPoly::new(dim, terms)
                .expect("trace-free quadratic is harmonic")
                .with_scale(Surd::new(Q::new(1, ii), ii))
        })
        .collect()
}

/// Gram-Schmidt on `Z3` in exact arithmetic, each result normalized to `<p, p> = 1`.
pub fn gram_schmidt_z3(dim: usize) -> Vec<HarmonicPoly> {
    let z3 = basis_z(dim).z3;
    let mut ortho: Vec<HarmonicPoly> = Vec::new();
    for p in z3 {
        let mut u = p;
        for e in &ortho {
            let c = u.raw_inner(e) / e.raw_inner(e);
            u = u.sub_scaled(e, c);
        }
        ortho.push(u);
    }
    ortho
        .into_iter()
        .map(|u| {
            // 1 / sqrt(a/b) = sqrt(a b) / a
            let n2 = u.raw_inner(&u);
            let (a, b) = (*n2.numer(), *n2.denom());
            u.with_scale(Surd::new(Q::new(1, a), a * b))
        })
        .collect()
}

/// Exact rank of a rational matrix by Gaussian elimination.
pub fn rational_rank(mut rows: Vec<Vec<Q>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let piv = rows[rank][c];
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = rows[r][c] / piv;
                for k in c..ncols {
                    let v = rows[rank][k];
                    rows[r][k] -= f * v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `dim H_l` as the kernel dimension of the Laplacian on degree-`l` monomials.
pub fn harmonic_dimension(dim: usize, degree: u32) -> usize {
    let src = monomials(dim, degree);
    if degree < 2 {
        return src.len();
    }
    let dst = monomials(dim, degree - 2);
    let index: BTreeMap<&MultiIndex, usize> = dst.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let rows: Vec<Vec<Q>> = src
        .iter()
        .map(|g| {
            let mut row = vec![Q::zero(); dst.len()];
            let img = laplacian_map(dim, &BTreeMap::from([(g.clone(), Q::one())]));
            for (h, c) in img {
                row[index[&h]] = c;
            }
            row
        })
        .collect();
    src.len() - rational_rank(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub dim: usize,
    pub points: usize,
    pub alg4: f64,
    pub alg12: f64,
    pub alg2: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        self.alg4.max(self.alg12).max(self.alg2)
    }
}

/// Largest absolute discrepancy of the three algebraic identities over the points.
pub fn check_algebraic_identities(dim: usize, points: &[Vec<f64>]) -> IdentityReport {
    let nf = dim as f64;
    let mut rep = IdentityReport { dim, points: points.len(), alg4: 0.0, alg12: 0.0, alg2: 0.0 };
    for x in points {
        let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
        let r2: f64 = sq.iter().sum();
        let mut pairs4 = 0.0;
        let mut pairs2 = 0.0;
        for i in 0..dim {
            for j in i + 1..dim {
                pairs4 += sq[i] * sq[j];
                pairs2 += sq[i] + sq[j];
            }
        }
        let mut tilde4 = 0.0;
        let mut tilde12 = 0.0;
        let mut partial = 0.0;
        for i in 1..dim {
            partial += sq[i - 1];
            let w = 1.0 / (i * (i + 1)) as f64;
            let fi = i as f64;
            tilde4 += w * (partial - fi * sq[i]).powi(2);
            tilde12 += w * (partial + fi * fi * sq[i]);
        }
        let c = (nf - 1.0) / nf;
        rep.alg4 = rep.alg4.max((2.0 * pairs4 + tilde4 - c * r2 * r2).abs());
        rep.alg12 = rep.alg12.max((tilde12 - c * r2).abs());
        rep.alg2 = rep.alg2.max((pairs2 - (nf - 1.0) * r2).abs());
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn non_harmonic_rejected() {
        assert!(HarmonicPoly::new(2, [(vec![2, 0], Q::one())]).is_err());
        assert!(HarmonicPoly::new(2, [(vec![1, 0], Q::one()), (vec![1, 1], Q::one())]).is_err());
    }

    #[test]
    fn display_is_canonical() {
        let z = basis_z(2);
        assert_eq!(z.z3[0].to_string(), "+1 x1^2 -1 x2^2");
        assert_eq!(z.z2[0].to_string(), "+1 x1 x2");
    }

    #[test]
    fn surd_canonical_form() {
        let s = Surd::new(q(1, 6), 24);
        assert_eq!(s, Surd { q: q(1, 3), m: 6 });
        assert_eq!(Surd::new(q(1, 2), 2).mul(Surd::new(q(1, 2), 2)), Surd::rational(q(1, 2)));
    }

    #[test]
    fn dimension_mismatch() {
        let a = HarmonicPoly::coordinate(2, 0);
        let b = HarmonicPoly::coordinate(3, 0);
        assert!(inner_product(&a, &b).is_err());
    }
}
