//! Analytic Neumann and Dirichlet spectra of spherical shells `B_beta \ closure(B_alpha)`.

use std::f64::consts::PI;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gauss_integrate;
use crate::specialfn::{
    bessel_j_zeros_below, bessel_jy, gamma, normalized_dirichlet, normalized_neumann,
    p_zeros_below, scan_roots, shell_scan_step, NU_MAX,
};

/// Relative gap under which distinct modes form one degenerate cluster.
pub const TIE_REL: f64 = 1e-9;
/// Largest spectrum length accepted by [`neumann_spectrum`].
pub const MAX_COUNT: usize = 200;

/// The shell `B_beta \ closure(B_alpha)` in `R^dim`; `alpha = 0` is the ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    pub alpha: f64,
    pub beta: f64,
    pub dim: usize,
}

impl ShellSpec {
    pub fn new(alpha: f64, beta: f64, dim: usize) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) || alpha < 0.0 || beta <= alpha {
            return Err(Error::Domain(format!(
                "shell radii must satisfy 0 <= alpha < beta (got alpha={alpha}, beta={beta})"
            )));
        }
        if !(2..=10).contains(&dim) {
            return Err(Error::Domain(format!("shell dimension {dim} outside 2..=10")));
        }
        Ok(Self { alpha, beta, dim })
    }

    pub fn is_ball(&self) -> bool {
        self.alpha == 0.0
    }

    /// Bessel order `N/2 + l - 1` of degree `l`.
    pub fn order(&self, l: usize) -> f64 {
        self.dim as f64 / 2.0 + l as f64 - 1.0
    }

    pub fn volume(&self) -> f64 {
        let n = self.dim as i32;
        unit_ball_volume(self.dim) * (self.beta.powi(n) - self.alpha.powi(n))
    }
}

/// `omega_N = q * pi^m` with `q` rational, for `N <= 10`.
pub fn unit_ball_volume_exact(dim: usize) -> Option<(Ratio<i64>, u32)> {
    if dim == 0 || dim > 10 {
        return None;
    }
    let m = (dim / 2) as i64;
    if dim % 2 == 0 {
        let fact: i64 = (1..=m).product();
        Some((Ratio::new(1, fact), m as u32))
    } else {
        let dfact: i64 = (0..=m).map(|i| 2 * i + 1).product();
        Some((Ratio::new(1 << (m + 1), dfact), m as u32))
    }
}

/// Volume of the unit ball in `R^dim`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match unit_ball_volume_exact(dim) {
        Some((q, m)) => (*q.numer() as f64 / *q.denom() as f64) * PI.powi(m as i32),
        None => PI.powf(dim as f64 / 2.0) / gamma(dim as f64 / 2.0 + 1.0),
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `Lambda_l = dim H_l`, the multiplicity carried by every `mu_{l,j}`.
pub fn multiplicity_lambda(l: usize, dim: usize) -> u64 {
    if l == 0 {
        return 1;
    }
    let (l, n) = (l as u64, dim as u64);
    // (2l+N-2)/(l+N-2) * C(l+N-2, l) = C(l+N-1, l) - C(l+N-3, l-2)
    let lower = if l >= 2 { binomial(l + n - 3, l - 2) } else { 0 };
    binomial(l + n - 1, l) - lower
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Neumann,
    Dirichlet,
}

/// One radial eigenvalue `mu_{l,j}` or `lambda_{l,j}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeEigenvalue {
    pub l: usize,
    pub j: usize,
    pub value: f64,
    pub multiplicity: u64,
    pub boundary: Boundary,
}

fn check_order(shell: &ShellSpec, l: usize) -> Result<()> {
    if shell.order(l) > NU_MAX {
        return Err(Error::Domain(format!(
            "degree l={l} gives Bessel order above {NU_MAX}"
        )));
    }
    Ok(())
}

/// Below the first eigenvalue of degree `l >= 1`: the potential term alone
/// bounds the quotient from below by `l(l+N-2)/beta^2`.
fn scan_start(shell: &ShellSpec, l: usize) -> f64 {
    let step = shell_scan_step(shell);
    if l == 0 {
        return 0.01 * step;
    }
    let floor = ((l * (l + shell.dim - 2)) as f64).sqrt() / shell.beta;
    (0.5 * floor).max(0.01 * step)
}

/// Positive roots `mu` of the boundary characteristic with `mu <= mu_max`.
fn positive_roots_below(shell: &ShellSpec, l: usize, boundary: Boundary, mu_max: f64) -> Result<Vec<f64>> {
    check_order(shell, l)?;
    let k_max = mu_max.max(0.0).sqrt();
    let ks = if shell.is_ball() {
        let nu = shell.dim as f64 / 2.0;
        let r_max = k_max * shell.beta;
        let zs = match boundary {
            Boundary::Neumann => p_zeros_below(nu, l, r_max)?,
            Boundary::Dirichlet => bessel_j_zeros_below(shell.order(l), r_max)?,
        };
        zs.into_iter().map(|z| z / shell.beta).collect()
    } else {
        let start = scan_start(shell, l);
        if start >= k_max {
            return Ok(Vec::new());
        }
        let step = shell_scan_step(shell);
        match boundary {
            Boundary::Neumann => {
                scan_roots(|k| normalized_neumann(shell, l, k), start, k_max, step, usize::MAX)?
            }
            Boundary::Dirichlet => {
                scan_roots(|k| normalized_dirichlet(shell, l, k), start, k_max, step, usize::MAX)?
            }
        }
    };
    Ok(ks.into_iter().map(|k| k * k).collect())
}

/// The first `count` positive roots of the characteristic function.
fn positive_roots(shell: &ShellSpec, l: usize, boundary: Boundary, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    // root spacing in k is about pi / (beta - alpha)
    let spacing = PI / (shell.beta - shell.alpha);
    let mut k_max = scan_start(shell, l) + (count as f64 + shell.order(l) / 2.0 + 2.0) * spacing;
    for _ in 0..8 {
        let roots = positive_roots_below(shell, l, boundary, k_max * k_max)?;
        if roots.len() >= count {
            return Ok(roots[..count].to_vec());
        }
        k_max *= 2.0;
    }
    Err(Error::SearchFailure {
        what: format!("{count} roots of the degree-{l} characteristic"),
        window: k_max * k_max,
    })
}

/// Neumann eigenvalues `mu_{l,1..=count}`, with `mu_{0,1} = 0` exactly.
pub fn neumann_mode_values(shell: &ShellSpec, l: usize, count: usize) -> Result<Vec<f64>> {
    if l == 0 {
        let mut v = vec![0.0];
        v.extend(positive_roots(shell, 0, Boundary::Neumann, count.saturating_sub(1))?);
        v.truncate(count);
        Ok(v)
    } else {
        positive_roots(shell, l, Boundary::Neumann, count)
    }
}

fn check_index(j: usize) -> Result<()> {
    if j == 0 {
        return Err(Error::Domain("radial index j starts at 1".into()));
    }
    Ok(())
}

/// `mu_{l,j}` of the shell.
pub fn sl_eigenvalue(shell: &ShellSpec, l: usize, j: usize) -> Result<f64> {
    check_index(j)?;
    Ok(neumann_mode_values(shell, l, j)?[j - 1])
}

/// `lambda_{l,j}`, the Dirichlet counterpart of `mu_{l,j}`.
pub fn dirichlet_sl_eigenvalue(shell: &ShellSpec, l: usize, j: usize) -> Result<f64> {
    check_index(j)?;
    Ok(positive_roots(shell, l, Boundary::Dirichlet, j)?[j - 1])
}

/// Neumann eigenvalues `mu_{l,j} <= mu_max`, ascending in `j`.
fn neumann_values_below(shell: &ShellSpec, l: usize, mu_max: f64) -> Result<Vec<f64>> {
    let mut v = if l == 0 { vec![0.0] } else { Vec::new() };
    v.extend(positive_roots_below(shell, l, Boundary::Neumann, mu_max)?);
    Ok(v)
}

/// One eigenvalue instance in an assembled spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub k: usize,
    pub value: f64,
    pub l: usize,
    pub j: usize,
    pub multiplicity: u64,
    pub cluster: usize,
}

/// Modes sharing one eigenvalue up to [`TIE_REL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub modes: Vec<(usize, usize)>,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub shell: ShellSpec,
    pub entries: Vec<SpectrumEntry>,
    pub clusters: Vec<Cluster>,
}

impl SpectrumTable {
    /// `mu_k` with the usual 1-based numbering.
    pub fn mu(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.entries.get(i)).map(|e| e.value)
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,value,l,j,multiplicity\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                e.k,
                crate::cli::fmt_sig(e.value),
                e.l,
                e.j,
                e.multiplicity
            ));
        }
        s
    }
}

/// The `count` smallest Neumann eigenvalues of the shell, repeated by multiplicity.
pub fn neumann_spectrum(shell: &ShellSpec, count: usize) -> Result<SpectrumTable> {
    if count == 0 || count > MAX_COUNT {
        return Err(Error::Domain(format!("spectrum length {count} outside 1..={MAX_COUNT}")));
    }
    let mut threshold = 4.0 * sl_eigenvalue(shell, 1, 1)?;
    loop {
        let mut modes: Vec<(f64, usize, usize)> = Vec::new();
        let mut total = 0u64;
        let mut l = 0;
        loop {
            if shell.order(l) > NU_MAX {
                break;
            }
            let vals = neumann_values_below(shell, l, threshold)?;
            if vals.is_empty() {
                break; // mu_{l,1} increases with l
            }
            total += vals.len() as u64 * multiplicity_lambda(l, shell.dim);
            modes.extend(vals.into_iter().enumerate().map(|(i, v)| (v, l, i + 1)));
            l += 1;
        }
        let exhausted = shell.order(l) > NU_MAX;
        if total >= count as u64 || exhausted {
            if total < count as u64 {
                return Err(Error::SearchFailure {
                    what: format!("{count} shell eigenvalues within the supported orders"),
                    window: threshold,
                });
            }
            return Ok(assemble(shell, modes, count));
        }
        threshold *= 2.0;
    }
}

fn assemble(shell: &ShellSpec, mut modes: Vec<(f64, usize, usize)>, count: usize) -> SpectrumTable {
    modes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut entries = Vec::new();
    for (value, l, j) in modes {
        let mult = multiplicity_lambda(l, shell.dim);
        let joins = clusters
            .last()
            .is_some_and(|c| (value - c.value).abs() <= TIE_REL * value.abs().max(c.value.abs()));
        if !joins {
            if entries.len() >= count {
                break;
            }
            clusters.push(Cluster { value, modes: Vec::new(), multiplicity: 0 });
        }
        let cid = clusters.len() - 1;
        let c = clusters.last_mut().expect("cluster pushed above");
        c.modes.push((l, j));
        c.multiplicity += mult;
        for _ in 0..mult {
            entries.push(SpectrumEntry {
                k: entries.len() + 1,
                value,
                l,
                j,
                multiplicity: mult,
                cluster: cid,
            });
        }
    }
    entries.truncate(count);
    SpectrumTable { shell: *shell, entries, clusters }
}

/// The shell with inner radius `alpha` and the given volume.
pub fn equal_measure_shell(alpha: f64, volume: f64, dim: usize) -> Result<ShellSpec> {
    if !(volume > 0.0) {
        return Err(Error::Domain(format!("volume must be positive, got {volume}")));
    }
    let n = dim as f64;
    let beta = (volume / unit_ball_volume(dim) + alpha.powf(n)).powf(1.0 / n);
    ShellSpec::new(alpha, beta, dim)
}

/// Outcome of a chain of strict inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; positive when the strict inequality `lhs < rhs` holds.
    pub margin: f64,
    pub pass: bool,
}

impl Check {
    pub fn less(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self { name: name.into(), lhs, rhs, margin, pass: margin > 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub shell: ShellSpec,
    /// `table[l][j-1] = mu_{l,j}` for `l, j <= 4`.
    pub table: Vec<Vec<f64>>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Strict monotonicity of `mu_{l,j}` in `l` and in `j` for `l, j <= 4`, and
/// the chain `mu_{1,1} < mu_{2,1} < mu_{0,2}`.
pub fn check_ordering(shell: &ShellSpec) -> Result<OrderingReport> {
    let table = (0..=4)
        .map(|l| neumann_mode_values(shell, l, 4))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for (l, row) in table.iter().enumerate() {
        for j in 1..row.len() {
            checks.push(Check::less(format!("mu[{l},{j}] < mu[{l},{}]", j + 1), row[j - 1], row[j]));
        }
    }
    for l in 1..table.len() {
        for j in 0..4 {
            checks.push(Check::less(
                format!("mu[{},{}] < mu[{l},{}]", l - 1, j + 1, j + 1),
                table[l - 1][j],
                table[l][j],
            ));
        }
    }
    checks.push(Check::less("mu[1,1] < mu[2,1]", table[1][0], table[2][0]));
    checks.push(Check::less("mu[2,1] < mu[0,2]", table[2][0], table[0][1]));
    let pass = checks.iter().all(|c| c.pass);
    Ok(OrderingReport { shell: *shell, table, checks, pass })
}

/// A closed-form radial eigenfunction
/// `v(r) = s * r^{1-N/2} (c_j J_nu(k r) + c_y Y_nu(k r))` on `[alpha, beta]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialMode {
    pub shell: ShellSpec,
    pub l: usize,
    pub mu: f64,
    c_j: f64,
    c_y: f64,
    scale: f64,
}

/// Smallest radius at which a mode on a ball is evaluated.
pub const R_FLOOR: f64 = 1e-12;

impl RadialMode {
    /// The Neumann eigenfunction of `mu_{l,j}`, normalized by
    /// `int_alpha^beta v^2 r^{N-1} dr = 1` and sign-fixed so that `v(beta) > 0`.
    pub fn neumann(shell: &ShellSpec, l: usize, j: usize) -> Result<Self> {
        let mu = sl_eigenvalue(shell, l, j)?;
        Self::with_eigenvalue(shell, l, mu, Boundary::Neumann)
    }

    pub fn dirichlet(shell: &ShellSpec, l: usize, j: usize) -> Result<Self> {
        let mu = dirichlet_sl_eigenvalue(shell, l, j)?;
        Self::with_eigenvalue(shell, l, mu, Boundary::Dirichlet)
    }

    fn with_eigenvalue(shell: &ShellSpec, l: usize, mu: f64, boundary: Boundary) -> Result<Self> {
        let (c_j, c_y) = if mu == 0.0 || shell.is_ball() {
            (1.0, 0.0)
        } else {
            let k = mu.sqrt();
            let a = shell.alpha;
            let b = bessel_jy(shell.order(l), k * a)?;
            let (cj, cy) = match boundary {
                Boundary::Neumann => {
                    let c = (2.0 - shell.dim as f64) / 2.0;
                    (c * b.y + a * k * b.yp, -(c * b.j + a * k * b.jp))
                }
                Boundary::Dirichlet => (b.y, -b.j),
            };
            let n = cj.hypot(cy);
            (cj / n, cy / n)
        };
        let mut mode = Self { shell: *shell, l, mu, c_j, c_y, scale: 1.0 };
        let norm2 = mode.weighted_norm2()?;
        mode.scale = 1.0 / norm2.sqrt();
        let tip = match boundary {
            Boundary::Neumann => mode.value(shell.beta)?,
            // Dirichlet modes vanish at beta; fix the sign by the outward slope
            Boundary::Dirichlet => -mode.deriv(shell.beta)?,
        };
        if tip < 0.0 {
            mode.scale = -mode.scale;
        }
        Ok(mode)
    }

    fn weighted_norm2(&self) -> Result<f64> {
        let n = self.shell.dim as i32;
        let panels = 16 + 4 * (self.mu.sqrt() * (self.shell.beta - self.shell.alpha)) as usize;
        let mut err = None;
        let v = gauss_integrate(
            |r| match self.value(r) {
                Ok(v) => v * v * r.powi(n - 1),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            self.shell.alpha,
            self.shell.beta,
            panels,
            16,
        );
        match err {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    fn nu(&self) -> f64 {
        self.shell.order(self.l)
    }

    /// `v(r)` for `r` in `[alpha, beta]`.
    pub fn value(&self, r: f64) -> Result<f64> {
        if self.mu == 0.0 {
            return Ok(self.scale);
        }
        let r = r.max(R_FLOOR);
        let s = 1.0 - self.shell.dim as f64 / 2.0;
        let b = bessel_jy(self.nu(), self.mu.sqrt() * r)?;
        Ok(self.scale * r.powf(s) * (self.c_j * b.j + self.c_y * b.y))
    }

    /// `v'(r)` for `r` in `[alpha, beta]`.
    pub fn deriv(&self, r: f64) -> Result<f64> {
        if self.mu == 0.0 {
            return Ok(0.0);
        }
        let r = r.max(R_FLOOR);
        let s = 1.0 - self.shell.dim as f64 / 2.0;
        let k = self.mu.sqrt();
        let b = bessel_jy(self.nu(), k * r)?;
        let c = self.c_j * b.j + self.c_y * b.y;
        let cp = self.c_j * b.jp + self.c_y * b.yp;
        Ok(self.scale * r.powf(s - 1.0) * (s * c + k * r * cp))
    }
}

/// `d mu_{2,1} / d alpha = -v(alpha)^2 (2N alpha^{N-3} - mu_{2,1} alpha^{N-1})`
/// with `v` the normalized eigenfunction of `mu_{2,1}`.
pub fn mu_alpha_derivative(shell: &ShellSpec) -> Result<f64> {
    if shell.is_ball() {
        return Err(Error::Precondition("the alpha-derivative needs alpha > 0".into()));
    }
    let mode = RadialMode::neumann(shell, 2, 1)?;
    let a = shell.alpha;
    let n = shell.dim as i32;
    let v = mode.value(a)?;
    Ok(-v * v * (2.0 * n as f64 * a.powi(n - 3) - mode.mu * a.powi(n - 1)))
}

/// `mu_i` of equal-volume shells as the hole grows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub dim: usize,
    pub volume: f64,
    pub alphas: Vec<f64>,
    pub indices: Vec<usize>,
    /// `values[a][i]` is `mu_{indices[i]}` of the shell with `alphas[a]`.
    pub values: Vec<Vec<f64>>,
    /// Smallest decrease over consecutive alphas, per index.
    pub min_drop: Vec<f64>,
    pub pass: bool,
}

/// Strict decrease of `mu_i` in `alpha` at fixed volume, for each listed `i`.
pub fn check_monotonicity(
    dim: usize,
    volume: f64,
    alphas: &[f64],
    indices: &[usize],
    min_margin: f64,
) -> Result<MonotonicityReport> {
    let top = indices.iter().copied().max().unwrap_or(1);
    let values = alphas
        .iter()
        .map(|&a| {
            let t = neumann_spectrum(&equal_measure_shell(a, volume, dim)?, top)?;
            Ok(indices.iter().map(|&i| t.mu(i).unwrap_or(f64::NAN)).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let min_drop: Vec<f64> = (0..indices.len())
        .map(|i| {
            values
                .windows(2)
                .map(|w| w[0][i] - w[1][i])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let pass = min_drop.iter().all(|&d| d > min_margin);
    Ok(MonotonicityReport {
        dim,
        volume,
        alphas: alphas.to_vec(),
        indices: indices.to_vec(),
        values,
        min_drop,
        pass,
    })
}
