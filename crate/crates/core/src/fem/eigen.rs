//! Smallest eigenpairs of the pencil `K x = mu M x`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sparse::{Csr, Skyline};
use super::SymmetricPencil;
use crate::error::{Error, Result};
use crate::numerics::SymTridiagonal;

pub const MAX_COUNT: usize = 30;
pub const MAX_VERTICES: usize = 200_000;
/// Pencils up to this size are solved densely.
pub const DENSE_LIMIT: usize = 800;
pub const RESIDUAL_TOL: f64 = 1e-9;
const MAX_ITER: usize = 500;
const SEED: u64 = 0xf3e1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Dense,
    SubspaceIteration,
}

/// Ascending eigenpairs; `values[0]` is the constant mode `mu_1 ~ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// M-orthonormal vectors.
    pub vectors: Vec<Vec<f64>>,
    /// `||K x - mu M x||` in the inverse lumped-mass norm.
    pub residuals: Vec<f64>,
    pub method: Method,
    pub iterations: usize,
}

impl Eigenpairs {
    /// `mu_k`, 1-based.
    pub fn mu(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }
}

fn residual(p: &SymmetricPencil, lumped: &[f64], x: &[f64], mu: f64) -> f64 {
    let n = x.len();
    let mut kx = vec![0.0; n];
    let mut mx = vec![0.0; n];
    p.k.mul_vec(x, &mut kx);
    p.m.mul_vec(x, &mut mx);
    kx.iter().zip(&mx).zip(lumped).map(|((a, b), w)| (a - mu * b).powi(2) / w).sum::<f64>().sqrt()
}

/// The `count` smallest eigenpairs, `mu_1 ~ 0` included.
pub fn smallest_eigs(p: &SymmetricPencil, count: usize) -> Result<Eigenpairs> {
    let n = p.k.n;
    if count == 0 || count > MAX_COUNT {
        return Err(Error::Domain(format!("eigenvalue count must be in 1..={MAX_COUNT}, got {count}")));
    }
    if n > MAX_VERTICES {
        return Err(Error::Domain(format!("{n} vertices exceed the limit {MAX_VERTICES}")));
    }
    if count > n {
        return Err(Error::Domain(format!("{count} eigenvalues requested from a pencil of size {n}")));
    }
    if n <= DENSE_LIMIT {
        dense(p, count)
    } else {
        subspace(p, count)
    }
}

fn to_dense(a: &Csr) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.n, a.n);
    for i in 0..a.n {
        let (c, v) = a.row(i);
        for (j, x) in c.iter().zip(v) {
            d[(i, *j)] = *x;
        }
    }
    d
}

/// Mass Cholesky, reduction to standard form, Householder tridiagonalization,
/// Sturm bisection and inverse iteration.
pub fn dense(p: &SymmetricPencil, count: usize) -> Result<Eigenpairs> {
    let k = to_dense(&p.k);
    let m = to_dense(&p.m);
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Precondition("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv_k = l.solve_lower_triangular(&k).expect("nonsingular factor");
    let c = l.solve_lower_triangular(&linv_k.transpose()).expect("nonsingular factor");
    let c = (&c + c.transpose()) * 0.5;
    let tri = nalgebra::linalg::SymmetricTridiagonal::new(c);
    let (q, diag, off) = tri.unpack();
    let t = SymTridiagonal::new(diag.iter().copied().collect(), off.iter().copied().collect());
    let values = t.smallest(count);
    let lt = l.transpose();
    let lumped = p.m.row_sums();
    let mut vectors = Vec::with_capacity(count);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for &mu in &values {
        let mut y = DVector::from_vec(t.eigenvector(mu));
        // re-orthogonalize within clusters
        for b in &basis {
            let d = b.dot(&y);
            y -= b * d;
        }
        y /= y.norm();
        basis.push(y.clone());
        let z = &q * y;
        let x = lt.solve_upper_triangular(&z).expect("nonsingular factor");
        vectors.push(x.iter().copied().collect::<Vec<f64>>());
    }
    let residuals = values.iter().zip(&vectors).map(|(mu, x)| residual(p, &lumped, x, *mu)).collect();
    Ok(Eigenpairs { values, vectors, residuals, method: Method::Dense, iterations: 0 })
}

/// Block subspace iteration with the shift-invert operator `(K + M)^{-1} M`.
pub fn subspace(p: &SymmetricPencil, count: usize) -> Result<Eigenpairs> {
    let n = p.k.n;
    let a = p.k.add_scaled(&p.m, 1.0);
    let fac = Skyline::factor(&a)?;
    let lumped = p.m.row_sums();
    let bs = (2 * count).max(count + 8).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut x: Vec<Vec<f64>> = (0..bs)
        .map(|j| {
            if j == 0 {
                vec![1.0; n]
            } else {
                (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
            }
        })
        .collect();
    let mut values = vec![0.0; bs];
    let mut res = vec![f64::INFINITY; count];
    for it in 1..=MAX_ITER {
        let y: Vec<Vec<f64>> = x
            .iter()
            .map(|xj| {
                let mut b = vec![0.0; n];
                p.m.mul_vec(xj, &mut b);
                fac.solve(&mut b);
                b
            })
            .collect();
        let mut ky = vec![vec![0.0; n]; bs];
        let mut my = vec![vec![0.0; n]; bs];
        for j in 0..bs {
            p.k.mul_vec(&y[j], &mut ky[j]);
            p.m.mul_vec(&y[j], &mut my[j]);
        }
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let kp = DMatrix::from_fn(bs, bs, |i, j| dot(&y[i], &ky[j]));
        let mp = DMatrix::from_fn(bs, bs, |i, j| dot(&y[i], &my[j]));
        let kp = (&kp + kp.transpose()) * 0.5;
        let mp = (&mp + mp.transpose()) * 0.5;
        let l = mp
            .cholesky()
            .ok_or_else(|| Error::NonConvergence {
                what: "subspace iteration (basis collapsed)".into(),
                iterations: it,
                residual: f64::NAN,
            })?
            .l();
        let t = l.solve_lower_triangular(&kp).expect("nonsingular");
        let c = l.solve_lower_triangular(&t.transpose()).expect("nonsingular");
        let c = (&c + c.transpose()) * 0.5;
        let eig = SymmetricEigen::new(c);
        let mut idx: Vec<usize> = (0..bs).collect();
        idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let w = l.transpose().solve_upper_triangular(&eig.eigenvectors).expect("nonsingular");
        let mut nx = vec![vec![0.0; n]; bs];
        for (new, &old) in idx.iter().enumerate() {
            values[new] = eig.eigenvalues[old];
            let col = w.column(old);
            let xi = &mut nx[new];
            for (j, yj) in y.iter().enumerate() {
                let c = col[j];
                if c != 0.0 {
                    for (a, b) in xi.iter_mut().zip(yj) {
                        *a += c * b;
                    }
                }
            }
        }
        x = nx;
        for i in 0..count {
            res[i] = residual(p, &lumped, &x[i], values[i]);
        }
        if res.iter().all(|r| *r <= RESIDUAL_TOL) {
            return Ok(Eigenpairs {
                values: values[..count].to_vec(),
                vectors: x[..count].to_vec(),
                residuals: res,
                method: Method::SubspaceIteration,
                iterations: it,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "shift-invert subspace iteration".into(),
        iterations: MAX_ITER,
        residual: res.iter().fold(0.0, |m, r| m.max(*r)),
    })
}
