//! Sampled radial functions with derivative data.

use serde::{Deserialize, Serialize};

use crate::shell::{RadialMode, ShellSpec};

/// A radial profile `v` on `[alpha, beta]`, extended by `v(beta)` for `r > beta`
/// and by `v(alpha)` for `r < alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub shell: ShellSpec,
    pub l: usize,
    pub mu: f64,
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    /// Closed-form evaluator; when present it takes precedence over the samples.
    #[serde(skip)]
    pub(crate) exact: Option<(RadialMode, f64)>,
}

impl RadialProfile {
    pub fn from_samples(shell: ShellSpec, l: usize, mu: f64, r: Vec<f64>, v: Vec<f64>) -> Self {
        let dv = sample_derivative(&r, &v);
        Self { shell, l, mu, r, v, dv, exact: None }
    }

    /// Samples `factor * mode` at the given nodes and keeps the closed form.
    pub fn from_mode(mode: RadialMode, factor: f64, r: Vec<f64>) -> crate::Result<Self> {
        let v = r.iter().map(|&x| Ok(factor * mode.value(x)?)).collect::<crate::Result<Vec<_>>>()?;
        let dv = r.iter().map(|&x| Ok(factor * mode.deriv(x)?)).collect::<crate::Result<Vec<_>>>()?;
        Ok(Self { shell: mode.shell, l: mode.l, mu: mode.mu, r, v, dv, exact: Some((mode, factor)) })
    }

    pub fn tail(&self) -> f64 {
        *self.v.last().expect("profile has samples")
    }

    /// `G(r)`: the profile on `[alpha, beta]`, constant outside.
    pub fn value(&self, r: f64) -> f64 {
        let r = r.clamp(self.shell.alpha, self.shell.beta);
        if let Some((mode, f)) = &self.exact {
            if let Ok(v) = mode.value(r) {
                return f * v;
            }
        }
        self.hermite(r).0
    }

    /// `G'(r)`, zero outside `[alpha, beta]`.
    pub fn deriv(&self, r: f64) -> f64 {
        if r > self.shell.beta || r < self.shell.alpha {
            return 0.0;
        }
        if let Some((mode, f)) = &self.exact {
            if let Ok(d) = mode.deriv(r) {
                return f * d;
            }
        }
        self.hermite(r).1
    }

    fn hermite(&self, r: f64) -> (f64, f64) {
        let n = self.r.len();
        let i = match self.r.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => return (self.v[i], self.dv[i]),
            Err(i) => i.clamp(1, n - 1) - 1,
        };
        let (r0, r1) = (self.r[i], self.r[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let (v0, v1, d0, d1) = (self.v[i], self.v[i + 1], self.dv[i] * h, self.dv[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let val = (2.0 * t3 - 3.0 * t2 + 1.0) * v0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * v1
            + (t3 - t2) * d1;
        let der = ((6.0 * t2 - 6.0 * t) * v0
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (-6.0 * t2 + 6.0 * t) * v1
            + (3.0 * t2 - 2.0 * t) * d1)
            / h;
        (val, der)
    }

    /// Smallest nodewise increment `v_{i+1} - v_i`.
    pub fn min_increment(&self) -> f64 {
        self.v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Number of sign changes of the interior samples.
    pub fn sign_changes(&self) -> usize {
        let scale = self.v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let signs: Vec<f64> = self
            .v
            .iter()
            .filter(|x| x.abs() > 1e-12 * scale)
            .map(|x| x.signum())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Second-order differences: centered inside, one-sided three-point at the ends.
fn sample_derivative(r: &[f64], v: &[f64]) -> Vec<f64> {
    let n = r.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            let s = (v[1] - v[0]) / (r[1] - r[0]);
            d.fill(s);
        }
        return d;
    }
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (r[i + 1] - r[i - 1]);
    }
    let h0 = r[1] - r[0];
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h0);
    let h1 = r[n - 1] - r[n - 2];
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h1);
    d
}
