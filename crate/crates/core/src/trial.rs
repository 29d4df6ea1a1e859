//! Radial profiles `G_l`, trial spaces built from them, Rayleigh-quotient
//! bounds, and inequality verification for planar domains.
//!
//! All integrals are taken in the domain's canonical frame.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::refine_extrapolate;
use crate::geometry::{
    check_central_symmetry, check_symmetry, integrate_mesh, mesh, polar_integrate_vec, AlphaMode, Domain, Integral,
    Mesh, PolarRegion, SymmetryMethod, TriangleRule,
};
use crate::harmonics::{HarmonicPoly, Surd, Q};
use crate::radial::RadialProfile;
use crate::shell::{neumann_spectrum, sl_eigenvalue, RadialMode, ShellSpec};
use crate::sl_oracle::radial_eigenfunction;

/// Largest nodewise gap between the finite-difference `G_l` and the closed form.
pub const PROFILE_TOL: f64 = 1e-4;
/// Smallest radius at which trial functions are evaluated.
pub const R_MIN: f64 = 1e-12;
/// Angular panels of the coarse polar rule; the fine rule doubles them.
pub const POLAR_PANELS: usize = 64;
pub const POLAR_ORDER: usize = 10;
/// Coarse mesh size of the triangle-rule fallback; the fine mesh halves it.
pub const MESH_H: f64 = 0.02;
/// Relative off-diagonal and mean-zero tolerance on symmetric domains.
pub const ORTHO_TOL: f64 = 1e-8;
/// Relative tolerance of equality diagnostics.
pub const EQUALITY_TOL: f64 = 1e-6;

/// `G_l`: the first Neumann radial eigenfunction scaled to `v(beta) = 1`,
/// constant for `r > beta`.
pub fn build_g(shell: &ShellSpec, l: usize) -> Result<RadialProfile> {
    if l == 0 {
        return Err(Error::Precondition("G_l is defined for l >= 1".into()));
    }
    let raw = radial_eigenfunction(shell, l, 1)?;
    let tail = raw.tail();
    if !(tail.abs() > 0.0) {
        return Err(Error::NonConvergence { what: "radial profile at beta".into(), iterations: 0, residual: tail });
    }
    let v: Vec<f64> = raw.v.iter().map(|x| x / tail).collect();
    let g = RadialProfile::from_samples(*shell, l, raw.mu, raw.r.clone(), v);
    let first = if shell.is_ball() { 1 } else { 0 };
    if let Some((i, x)) = g.v.iter().enumerate().skip(first).find(|(_, x)| !(**x > 0.0)) {
        return Err(Error::Precondition(format!("G_{l} not positive at node {i} (value {x:e})")));
    }
    let inc = g.min_increment();
    if inc < -1e-12 {
        return Err(Error::Precondition(format!("G_{l} decreases by {:e}", -inc)));
    }
    let mode = RadialMode::neumann(shell, l, 1)?;
    let scale = 1.0 / mode.value(shell.beta)?;
    let mut worst = 0.0f64;
    for (r, v) in g.r.iter().zip(&g.v) {
        worst = worst.max((v - scale * mode.value(*r)?).abs());
    }
    if worst > PROFILE_TOL {
        return Err(Error::Mismatch(format!("G_{l} differs from the closed form by {worst:e}")));
    }
    Ok(g)
}

/// Fine and coarse values of a vector of integrals over a planar domain.
pub struct DomainQuadrature {
    rule: Rule,
    breaks: Vec<f64>,
}

enum Rule {
    Polar(PolarRegion),
    Mesh(Box<(Mesh, Mesh)>),
}

impl DomainQuadrature {
    /// Polar Gauss rule for regions star-shaped about the origin, otherwise
    /// the 7-point triangle rule on two nested mesh sizes.
    pub fn new(domain: &Domain, radial_breaks: Vec<f64>) -> Result<Self> {
        if domain.dim != 2 {
            return Err(Error::Unsupported(format!("trial integrals in dimension {}", domain.dim)));
        }
        let rule = match PolarRegion::from_domain(domain) {
            Some(p) => Rule::Polar(p),
            None => {
                let mut canonical = domain.clone();
                canonical.pose = Default::default();
                Rule::Mesh(Box::new((mesh(&canonical, MESH_H)?, mesh(&canonical, MESH_H / 2.0)?)))
            }
        };
        Ok(Self { rule, breaks: radial_breaks })
    }

    pub fn method(&self) -> &'static str {
        match self.rule {
            Rule::Polar(_) => "polar-gauss",
            Rule::Mesh(_) => "triangle-7",
        }
    }

    /// `(fine, coarse)` values of `dim` integrands written by `f(x, r, out)`.
    pub fn integrate_pair<F: Fn([f64; 2], f64, &mut [f64])>(&self, dim: usize, f: F) -> (Vec<f64>, Vec<f64>) {
        match &self.rule {
            Rule::Polar(p) => (
                polar_integrate_vec(p, dim, &f, &self.breaks, 2 * POLAR_PANELS, POLAR_ORDER),
                polar_integrate_vec(p, dim, &f, &self.breaks, POLAR_PANELS, POLAR_ORDER),
            ),
            Rule::Mesh(m) => {
                let one = |m: &Mesh| {
                    (0..dim)
                        .map(|k| {
                            integrate_mesh(
                                m,
                                |x| {
                                    let mut b = vec![0.0; dim];
                                    f(x, x[0].hypot(x[1]), &mut b);
                                    b[k]
                                },
                                TriangleRule::Seven,
                            )
                        })
                        .collect::<Vec<f64>>()
                };
                (one(&m.1), one(&m.0))
            }
        }
    }

    pub fn integrate<F: Fn([f64; 2], f64, &mut [f64])>(&self, dim: usize, f: F) -> Vec<Integral> {
        let (fine, coarse) = self.integrate_pair(dim, f);
        fine.iter()
            .zip(&coarse)
            .map(|(a, b)| Integral { value: *a, error_estimate: (a - b).abs() })
            .collect()
    }
}

/// `G_l(r) / r^d * p(x)` with `d = deg p`.
#[derive(Debug, Clone)]
pub struct TrialFunction {
    pub label: String,
    pub l: usize,
    pub poly: HarmonicPoly,
    /// `(e1, e2, c)` for each monomial `c x1^e1 x2^e2`, scale included.
    terms: Vec<(i32, i32, f64)>,
}

impl TrialFunction {
    pub fn new(label: impl Into<String>, l: usize, poly: HarmonicPoly) -> Self {
        let sc = poly.scale().to_f64();
        let terms = poly
            .coeffs()
            .iter()
            .map(|(g, c)| (g[0] as i32, g[1] as i32, sc * (*c.numer() as f64) / (*c.denom() as f64)))
            .collect();
        Self { label: label.into(), l, poly, terms }
    }

    fn poly_value_grad(&self, x: [f64; 2]) -> (f64, [f64; 2]) {
        let (mut p, mut g0, mut g1) = (0.0, 0.0, 0.0);
        for &(a, b, c) in &self.terms {
            let (xa, xb) = (x[0].powi(a), x[1].powi(b));
            p += c * xa * xb;
            if a > 0 {
                g0 += c * a as f64 * x[0].powi(a - 1) * xb;
            }
            if b > 0 {
                g1 += c * b as f64 * xa * x[1].powi(b - 1);
            }
        }
        (p, [g0, g1])
    }

    /// Value and gradient.
    pub fn eval(&self, g: &RadialProfile, x: [f64; 2], r: f64) -> (f64, [f64; 2]) {
        let r = r.max(R_MIN);
        let d = self.poly.degree() as i32;
        let (gv, gd) = (g.value(r), g.deriv(r));
        let (p, dp) = self.poly_value_grad(x);
        let a = gv / r.powi(d);
        let da = gd / r.powi(d) - d as f64 * gv / r.powi(d + 1);
        (a * p, [da * x[0] / r * p + a * dp[0], da * x[1] / r * p + a * dp[1]])
    }
}

fn poly(terms: &[([u32; 2], i64)]) -> HarmonicPoly {
    HarmonicPoly::new(2, terms.iter().map(|(g, c)| (g.to_vec(), Q::from_integer(*c)))).expect("harmonic")
}

/// `(x1^2 + 2 x1 x2 - x2^2) / sqrt 2`.
pub fn w_poly() -> HarmonicPoly {
    poly(&[([2, 0], 1), ([1, 1], 2), ([0, 2], -1)]).with_scale(Surd::new(Q::new(1, 2), 2))
}

/// Trial families for `N = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "X_N")]
    XN,
    #[serde(rename = "X_{N+1}")]
    XN1,
    #[serde(rename = "X_4")]
    X4,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::XN => "X_N",
            Family::XN1 => "X_{N+1}",
            Family::X4 => "X_4",
        }
    }

    /// Harmonic degree of the profile and of the bounding shell eigenvalue.
    pub fn l(self) -> usize {
        match self {
            Family::XN => 1,
            _ => 2,
        }
    }

    /// Rotation order the family relies on.
    pub fn required_order(self) -> usize {
        match self {
            Family::XN => 2,
            Family::XN1 => 4,
            Family::X4 => 8,
        }
    }

    pub fn functions(self) -> Vec<TrialFunction> {
        let l = self.l();
        let mut f = vec![
            TrialFunction::new(format!("G{l}/r x1"), l, poly(&[([1, 0], 1)])),
            TrialFunction::new(format!("G{l}/r x2"), l, poly(&[([0, 1], 1)])),
        ];
        match self {
            Family::XN => {}
            Family::XN1 => f.push(TrialFunction::new("w", 2, w_poly())),
            Family::X4 => {
                f.push(TrialFunction::new("G2/r^2 x1 x2", 2, poly(&[([1, 1], 1)])));
                f.push(TrialFunction::new("G2/r^2 (x1^2 - x2^2)", 2, poly(&[([2, 0], 1), ([0, 2], -1)])));
            }
        }
        f
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X_N" | "xn" => Ok(Family::XN),
            "X_{N+1}" | "X_N+1" | "xn1" => Ok(Family::XN1),
            "X_4" | "x4" => Ok(Family::X4),
            _ => Err(Error::Parse(format!("unknown trial family {s:?}"))),
        }
    }
}

/// `int (G'^2 + c G^2 / r^2) / int G^2` over the domain.
fn radial_quotient(q: &DomainQuadrature, g: &RadialProfile, c: f64) -> (f64, f64) {
    let (f, co) = q.integrate_pair(2, |_, r, out| {
        let r = r.max(R_MIN);
        let (v, d) = (g.value(r), g.deriv(r));
        out[0] = d * d + c * v * v / (r * r);
        out[1] = v * v;
    });
    let (a, b) = (f[0] / f[1], co[0] / co[1]);
    (a, (a - b).abs())
}

fn matching_shell(domain: &Domain, shell: &ShellSpec) -> Result<()> {
    let m = domain.matched_shell(AlphaMode::Inscribed)?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
    if m.dim != shell.dim || !close(m.alpha, shell.alpha) || !close(m.beta, shell.beta) {
        return Err(Error::Precondition(format!(
            "the matched shell of the domain is ({}, {}), not ({}, {})",
            m.alpha, m.beta, shell.alpha, shell.beta
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayleighBound {
    pub l: usize,
    pub shell: ShellSpec,
    /// `int [(G_l')^2 + l(l+N-2) G_l^2 / r^2] / int G_l^2` over the domain.
    pub value: f64,
    pub mu_l1: f64,
    /// `mu_l1 - value`.
    pub margin: f64,
    pub error_estimate: f64,
    pub quadrature: String,
    pub equality: bool,
    pub pass: bool,
}

/// The radial Rayleigh quotient of `G_l` over the domain, bounded by `mu_{l,1}` of its matched shell.
pub fn rayleigh_bound(domain: &Domain, shell: &ShellSpec, l: usize) -> Result<RayleighBound> {
    matching_shell(domain, shell)?;
    let g = build_g(shell, l)?;
    let q = DomainQuadrature::new(domain, vec![shell.beta])?;
    let c = (l * (l + shell.dim - 2)) as f64;
    let (value, err) = radial_quotient(&q, &g, c);
    let mu = sl_eigenvalue(shell, l, 1)?;
    let margin = mu - value;
    let tol = EQUALITY_TOL * mu;
    Ok(RayleighBound {
        l,
        shell: *shell,
        value,
        mu_l1: mu,
        margin,
        error_estimate: err,
        quadrature: q.method().into(),
        equality: margin.abs() <= tol,
        pass: margin >= -(tol + err),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimCheck {
    /// Rayleigh quotient of `w` by quadrature.
    pub direct: f64,
    /// `int [(G_2')^2 + 2N G_2^2 / r^2] / int G_2^2`.
    pub formula: f64,
    pub rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub family: Family,
    pub functions: Vec<String>,
    pub shell: ShellSpec,
    /// `mu_{l,1}` of the shell.
    pub bound: f64,
    pub quotients: Vec<f64>,
    /// Largest generalized Rayleigh value over the span.
    pub max_quotient: f64,
    pub min_quotient: f64,
    /// `max_quotient` predicted from radial integrals alone.
    pub closed_form: f64,
    pub closed_form_rel: f64,
    pub w_claim: Option<ClaimCheck>,
    /// Largest `|A_ij| / sqrt(A_ii A_jj)` over both Gram matrices.
    pub offdiag_rel: f64,
    /// Largest `|int u| / ||u||_2`.
    pub mean_rel: f64,
    pub error_estimate: f64,
    pub quadrature: String,
    pub pass: bool,
}

fn max_generalized(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    let l = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Precondition("trial functions are linearly dependent".into()))?
        .l();
    let t = l.solve_lower_triangular(b).expect("nonsingular");
    let c = l.solve_lower_triangular(&t.transpose()).expect("nonsingular");
    let c = (&c + c.transpose()) * 0.5;
    Ok(SymmetricEigen::new(c).eigenvalues.max())
}

fn rotation_error(q: usize) -> Error {
    Error::Precondition(format!("rotation by 2pi/{q} in the (x1, x2) plane does not preserve the domain"))
}

fn require_symmetry(domain: &Domain, q: usize) -> Result<()> {
    let ok = if q == 2 { check_central_symmetry(domain).holds } else { check_symmetry(domain, q).holds };
    if ok {
        Ok(())
    } else {
        Err(rotation_error(q))
    }
}

/// Gram matrices of the family under `int uv` and `int grad u . grad v` and the
/// largest generalized eigenvalue, with orthogonality and mean-zero diagnostics.
///
/// On domains of order 2 only, `X_N` is bounded through its smallest quotient.
pub fn trial_space_max(domain: &Domain, shell: &ShellSpec, family: Family) -> Result<TrialReport> {
    require_symmetry(domain, family.required_order())?;
    matching_shell(domain, shell)?;
    let order4 = family != Family::XN || check_symmetry(domain, 4).holds;
    let g = build_g(shell, family.l())?;
    let fns = family.functions();
    let k = fns.len();
    let q = DomainQuadrature::new(domain, vec![shell.beta])?;
    let gs = [g.clone(), g.clone()];
    let (fine, coarse) = gram_data(&q, &fns, &gs);
    let (a, b) = (&fine.l2, &fine.h1);
    let (ac, bc) = (&coarse.l2, &coarse.h1);
    let quotients: Vec<f64> = (0..k).map(|i| b[(i, i)] / a[(i, i)]).collect();
    let max_quotient = max_generalized(a, b)?;
    let error_estimate = (max_quotient - max_generalized(ac, bc)?).abs();
    let min_quotient = quotients.iter().copied().fold(f64::INFINITY, f64::min);
    let (offdiag_rel, mean_rel) = fine.diagnostics();
    let n = shell.dim as f64;
    let (closed_form, w_claim) = match family {
        Family::XN => (radial_quotient(&q, &g, n - 1.0).0, None),
        Family::XN1 => {
            let formula = radial_quotient(&q, &g, 2.0 * n).0;
            let direct = quotients[k - 1];
            let claim = ClaimCheck { direct, formula, rel: (direct - formula).abs() / formula };
            (radial_quotient(&q, &g, n - 1.0).0.max(formula), Some(claim))
        }
        Family::X4 => (radial_quotient(&q, &g, 4.0).0, None),
    };
    let closed_form_rel = (max_quotient - closed_form).abs() / closed_form;
    let bound = sl_eigenvalue(shell, family.l(), 1)?;
    let tol = EQUALITY_TOL * bound + error_estimate;
    let bounded = if order4 { max_quotient } else { min_quotient };
    let pass = bounded <= bound + tol
        && offdiag_rel <= ORTHO_TOL
        && mean_rel <= ORTHO_TOL
        && (!order4 || closed_form_rel <= EQUALITY_TOL)
        && w_claim.as_ref().is_none_or(|c| c.rel <= EQUALITY_TOL);
    Ok(TrialReport {
        family,
        functions: fns.iter().map(|f| f.label.clone()).collect(),
        shell: *shell,
        bound,
        quotients,
        max_quotient,
        min_quotient,
        closed_form,
        closed_form_rel,
        w_claim,
        offdiag_rel,
        mean_rel,
        error_estimate,
        quadrature: q.method().into(),
        pass,
    })
}

/// Gram matrices and means of a list of trial functions.
#[derive(Debug, Clone)]
pub struct GramData {
    pub l2: DMatrix<f64>,
    pub h1: DMatrix<f64>,
    pub means: Vec<f64>,
}

impl GramData {
    /// Largest relative off-diagonal entry of both matrices and largest
    /// `|int u| / ||u||_2`.
    pub fn diagnostics(&self) -> (f64, f64) {
        let k = self.means.len();
        let mut off = 0.0f64;
        for i in 0..k {
            for j in 0..i {
                for m in [&self.l2, &self.h1] {
                    off = off.max(m[(i, j)].abs() / (m[(i, i)] * m[(j, j)]).sqrt());
                }
            }
        }
        let mean = (0..k).map(|i| self.means[i].abs() / self.l2[(i, i)].sqrt()).fold(0.0, f64::max);
        (off, mean)
    }
}

/// Fine and coarse Gram data; `gs[l - 1]` is the profile used by functions of degree `l`.
pub fn gram_data(q: &DomainQuadrature, fns: &[TrialFunction], gs: &[RadialProfile]) -> (GramData, GramData) {
    let k = fns.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let np = pairs.len();
    let (fine, coarse) = q.integrate_pair(2 * np + k, |x, r, out| {
        let ev: Vec<(f64, [f64; 2])> = fns.iter().map(|f| f.eval(&gs[f.l - 1], x, r)).collect();
        for (n, (i, j)) in pairs.iter().enumerate() {
            out[n] = ev[*i].0 * ev[*j].0;
            out[np + n] = ev[*i].1[0] * ev[*j].1[0] + ev[*i].1[1] * ev[*j].1[1];
        }
        for i in 0..k {
            out[2 * np + i] = ev[i].0;
        }
    });
    let build = |v: &[f64]| {
        let mut a = DMatrix::zeros(k, k);
        let mut b = DMatrix::zeros(k, k);
        for (n, (i, j)) in pairs.iter().enumerate() {
            a[(*i, *j)] = v[n];
            a[(*j, *i)] = v[n];
            b[(*i, *j)] = v[np + n];
            b[(*j, *i)] = v[np + n];
        }
        GramData { l2: a, h1: b, means: v[2 * np..].to_vec() }
    };
    (build(&fine), build(&coarse))
}

/// The functions `G_1/r x_i`, `G_2/r^2 x1 x2` and `G_2/r^2 z3` with `z3` the
/// normalized trace-free quadratic.
pub fn standard_functions() -> Vec<TrialFunction> {
    vec![
        TrialFunction::new("G1/r x1", 1, poly(&[([1, 0], 1)])),
        TrialFunction::new("G1/r x2", 1, poly(&[([0, 1], 1)])),
        TrialFunction::new("G2/r^2 x1 x2", 2, poly(&[([1, 1], 1)])),
        TrialFunction::new("G2/r^2 z3", 2, crate::harmonics::z3_tilde_closed_form(2).remove(0)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub functions: Vec<String>,
    pub offdiag_rel: f64,
    pub mean_rel: f64,
    pub quadrature: String,
}

/// Orthogonality and mean-zero diagnostics of [`standard_functions`].
pub fn orthogonality(domain: &Domain, shell: &ShellSpec) -> Result<OrthogonalityReport> {
    let gs = [build_g(shell, 1)?, build_g(shell, 2)?];
    let q = DomainQuadrature::new(domain, vec![shell.beta])?;
    let fns = standard_functions();
    let (fine, _) = gram_data(&q, &fns, &gs);
    let (offdiag_rel, mean_rel) = fine.diagnostics();
    Ok(OrthogonalityReport {
        functions: fns.iter().map(|f| f.label.clone()).collect(),
        offdiag_rel,
        mean_rel,
        quadrature: q.method().into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientNormCheck {
    pub function: String,
    /// `int |grad u|^2` from the chain rule.
    pub direct: f64,
    /// `int` of the closed-form integrand.
    pub closed_form: f64,
    pub rel: f64,
}

/// `int |grad(g p)|^2` for the standard trial functions, computed from the
/// gradient and from closed-form integrands.
pub fn gradient_norm_check(domain: &Domain, shell: &ShellSpec) -> Result<Vec<GradientNormCheck>> {
    let g1 = build_g(shell, 1)?;
    let g2 = build_g(shell, 2)?;
    let q = DomainQuadrature::new(domain, vec![shell.beta])?;
    let z3 = crate::harmonics::z3_tilde_closed_form(2).remove(0);
    let fns = [
        TrialFunction::new("G1/r x1", 1, poly(&[([1, 0], 1)])),
        TrialFunction::new("G1/r x2", 1, poly(&[([0, 1], 1)])),
        TrialFunction::new("G2/r^2 x1 x2", 2, poly(&[([1, 1], 1)])),
        TrialFunction::new("G2/r^2 (x1^2 - x2^2)", 2, poly(&[([2, 0], 1), ([0, 2], -1)])),
        TrialFunction::new("G2/r^2 z3", 2, z3),
        TrialFunction::new("w", 2, w_poly()),
    ];
    let k = fns.len();
    let vals = q.integrate(2 * k, |x, r, out| {
        let r = r.max(R_MIN);
        let (a, b) = (x[0] * x[0], x[1] * x[1]);
        let (r2, r4, r6) = (r * r, r.powi(4), r.powi(6));
        let (v1, d1) = (g1.value(r), g1.deriv(r));
        let (v2, d2) = (g2.value(r), g2.deriv(r));
        for (i, f) in fns.iter().enumerate() {
            let g = if f.l == 1 { &g1 } else { &g2 };
            let (_, grad) = f.eval(g, x, r);
            out[i] = grad[0] * grad[0] + grad[1] * grad[1];
        }
        let c1 = |xi: f64| d1 * d1 * xi / r2 - v1 * v1 * xi / r4 + v1 * v1 / r2;
        let k2 = d2 * d2 / r4 - 4.0 * v2 * v2 / r6;
        out[k] = c1(a);
        out[k + 1] = c1(b);
        out[k + 2] = k2 * a * b + v2 * v2 / r4 * (a + b);
        out[k + 3] = k2 * (a - b).powi(2) + 4.0 * v2 * v2 / r2;
        // i = 1: (x1^2 - i x2^2) / sqrt(i (i + 1)), gradient norm 4 (x1^2 + i^2 x2^2) / (i (i + 1))
        out[k + 4] = k2 * (a - b).powi(2) / 2.0 + v2 * v2 / r4 * 2.0 * (a + b);
        let wq = (a + 2.0 * x[0] * x[1] - b) / 2f64.sqrt();
        out[k + 5] = k2 * wq * wq + 4.0 * v2 * v2 / r2;
    });
    Ok(fns
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let (d, c) = (vals[i].value, vals[k + i].value);
            GradientNormCheck { function: f.label.clone(), direct: d, closed_form: c, rel: (d - c).abs() / c.abs() }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationScan {
    /// Angle in `[0, pi/4]` at which `I` vanishes.
    pub theta: f64,
    pub i_start: f64,
    pub i_end: f64,
    pub residual: f64,
}

/// `I(theta) = int_{R_theta Omega} g(|x|) x1 x2^3 dx` with `Omega` in world coordinates.
pub fn rotation_moment<G: Fn(f64) -> f64>(domain: &Domain, g: &G, theta: f64) -> Result<f64> {
    if domain.pose.translation.iter().any(|t| *t != 0.0) {
        return Err(Error::Unsupported("rotation moments about a translated domain".into()));
    }
    let region = PolarRegion::from_domain(domain)
        .ok_or_else(|| Error::Unsupported("rotation moments need a region star-shaped about the origin".into()))?;
    let phi = theta + domain.pose.rotation;
    let (c, s) = (phi.cos(), phi.sin());
    Ok(polar_integrate_vec(
        &region,
        1,
        |y, r, out| {
            let x1 = c * y[0] - s * y[1];
            let x2 = s * y[0] + c * y[1];
            out[0] = g(r) * x1 * x2.powi(3);
        },
        &[],
        POLAR_PANELS,
        POLAR_ORDER,
    )[0])
}

/// Sign-change scan of `I` on `[0, pi/4]` with `steps` intervals, then bisection.
pub fn rotation_scan<G: Fn(f64) -> f64>(domain: &Domain, g: G, steps: usize) -> Result<RotationScan> {
    let i = |t: f64| rotation_moment(domain, &g, t);
    let (i_start, i_end) = (i(0.0)?, i(PI / 4.0)?);
    let scale = i_start.abs().max(i_end.abs()).max(f64::MIN_POSITIVE);
    let steps = steps.max(1);
    let mut prev = (0.0, i_start);
    for k in 1..=steps {
        let t = PI / 4.0 * k as f64 / steps as f64;
        let cur = (t, if k == steps { i_end } else { i(t)? });
        if prev.1.abs() <= 1e-14 * scale {
            return Ok(RotationScan { theta: prev.0, i_start, i_end, residual: prev.1 });
        }
        if prev.1 * cur.1 <= 0.0 {
            let (mut a, mut b) = (prev, cur);
            for _ in 0..100 {
                if b.0 - a.0 < 1e-14 {
                    break;
                }
                let m = 0.5 * (a.0 + b.0);
                let im = i(m)?;
                if a.1 * im <= 0.0 {
                    b = (m, im);
                } else {
                    a = (m, im);
                }
            }
            let best = if a.1.abs() < b.1.abs() { a } else { b };
            return Ok(RotationScan { theta: best.0, i_start, i_end, residual: best.1 });
        }
        prev = cur;
    }
    Err(Error::SearchFailure { what: "sign change of the rotation moment".into(), window: PI / 4.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub alpha_mode: AlphaMode,
    /// Mesh sizes relative to `sqrt |Omega|`.
    pub h_rel: Vec<f64>,
    /// Also evaluate Rayleigh bounds and trial spaces.
    pub trial: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { alpha_mode: AlphaMode::Inscribed, h_rel: vec![0.04, 0.02, 0.01], trial: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub error_estimate: f64,
    /// Whether the symmetry class of the domain implies it.
    pub applicable: bool,
    pub equality: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub domain: String,
    pub symmetry_class: String,
    pub symmetry_method: String,
    pub alpha: f64,
    pub beta: f64,
    /// `analytic` for centred disks and annuli, `fem` otherwise.
    pub mu_source: String,
    /// `mu_1..mu_6` of the domain.
    pub mu_omega: Vec<f64>,
    pub mu_omega_error: Vec<f64>,
    pub mu_shell: Vec<f64>,
    pub inequalities: Vec<Inequality>,
    pub rayleigh: Vec<RayleighBound>,
    pub trial: Vec<TrialReport>,
    pub notes: Vec<String>,
    /// All applicable inequalities hold.
    pub pass: bool,
}

impl InequalityReport {
    pub fn inequality(&self, name: &str) -> Option<&Inequality> {
        self.inequalities.iter().find(|i| i.name == name)
    }
}

/// Names of the inequalities in the report.
pub const MU2: &str = "mu2 <= mu[1,1]";
pub const MU3: &str = "mu3 <= mu[1,1]";
pub const MU4: &str = "mu4 <= mu[2,1]";
pub const MU5: &str = "mu5 <= mu[2,1]";

/// Symmetry class, matched shell, `mu_2..mu_5` against the shell, and the
/// inequality table. Every inequality is evaluated; those implied by the
/// symmetry class are flagged applicable and decide `pass`.
pub fn verify_inequalities(name: &str, domain: &Domain, opts: &VerifyOptions) -> Result<InequalityReport> {
    if domain.dim != 2 {
        return Err(Error::Unsupported(format!("verification in dimension {}", domain.dim)));
    }
    let central = check_central_symmetry(domain);
    let o4 = check_symmetry(domain, 4);
    let o8 = check_symmetry(domain, 8);
    let (class, verdict) = if o8.holds {
        ("order-8", &o8)
    } else if o4.holds {
        ("order-4", &o4)
    } else if central.holds {
        ("order-2", &central)
    } else {
        ("none", &central)
    };
    let method = match verdict.method {
        SymmetryMethod::Certificate => "certificate",
        SymmetryMethod::Empirical { .. } => "empirical",
    };
    let shell = domain.matched_shell(opts.alpha_mode)?;
    let count = 6;
    let mu_shell = neumann_spectrum(&shell, count)?.values();
    let (source, mu_omega, mu_err) = match domain.as_shell() {
        Some(s) => ("analytic", neumann_spectrum(&s, count)?.values(), vec![0.0; count]),
        None => {
            let scale = domain.measure().sqrt();
            let hs: Vec<f64> = opts.h_rel.iter().map(|h| h * scale).collect();
            let spec = refine_extrapolate(domain, &hs, count)?;
            (
                "fem",
                spec.values.iter().map(|v| v.value).collect(),
                spec.values.iter().map(|v| v.error_estimate).collect(),
            )
        }
    };
    let mu11 = sl_eigenvalue(&shell, 1, 1)?;
    let mu21 = sl_eigenvalue(&shell, 2, 1)?;
    let table = [
        (MU2, 2, mu11, central.holds),
        (MU3, 3, mu11, o4.holds),
        (MU4, 4, mu21, o4.holds),
        (MU5, 5, mu21, o8.holds),
    ];
    let inequalities: Vec<Inequality> = table
        .iter()
        .map(|(n, k, rhs, applicable)| {
            let lhs = mu_omega[k - 1];
            let err = mu_err[k - 1];
            let margin = rhs - lhs;
            let tol = EQUALITY_TOL * rhs;
            Inequality {
                name: n.to_string(),
                lhs,
                rhs: *rhs,
                margin,
                error_estimate: err,
                applicable: *applicable,
                equality: margin.abs() <= tol,
                pass: margin >= -(tol + err),
            }
        })
        .collect();
    let pass = inequalities.iter().filter(|i| i.applicable).all(|i| i.pass);
    let mut rayleigh = Vec::new();
    let mut trial = Vec::new();
    let mut notes = Vec::new();
    if opts.trial {
        for l in [1, 2] {
            match rayleigh_bound(domain, &shell, l) {
                Ok(r) => rayleigh.push(r),
                Err(e) => notes.push(format!("rayleigh bound l={l}: {e}")),
            }
        }
        for (f, ok) in [(Family::XN, central.holds), (Family::XN1, o4.holds), (Family::X4, o8.holds)] {
            if ok {
                match trial_space_max(domain, &shell, f) {
                    Ok(r) => trial.push(r),
                    Err(e) => notes.push(format!("{}: {e}", f.name())),
                }
            }
        }
    }
    Ok(InequalityReport {
        domain: name.into(),
        symmetry_class: class.into(),
        symmetry_method: method.into(),
        alpha: shell.alpha,
        beta: shell.beta,
        mu_source: source.into(),
        mu_omega,
        mu_omega_error: mu_err,
        mu_shell,
        inequalities,
        rayleigh,
        trial,
        notes,
        pass,
    })
}
