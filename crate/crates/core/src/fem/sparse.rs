//! Compressed sparse rows, reverse Cuthill-McKee, and envelope Cholesky.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl Csr {
    /// Sums duplicate entries; columns sorted within each row.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col = Vec::with_capacity(t.len());
        let mut val: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *val.last_mut().unwrap() += v;
            } else {
                col.push(j);
                val.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n, row_ptr, col, val }
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col[r.clone()], &self.val[r])
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            *yi = c.iter().zip(v).map(|(j, a)| a * x[*j]).sum();
        }
    }

    pub fn dot(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| {
                let (c, v) = self.row(i);
                x[i] * c.iter().zip(v).map(|(j, a)| a * y[*j]).sum::<f64>()
            })
            .sum()
    }

    /// `self + s * other` on the union pattern.
    pub fn add_scaled(&self, other: &Csr, s: f64) -> Csr {
        let mut t = Vec::with_capacity(self.val.len() + other.val.len());
        for (m, f) in [(self, 1.0), (other, s)] {
            for i in 0..m.n {
                let (c, v) = m.row(i);
                t.extend(c.iter().zip(v).map(|(j, a)| (i, *j, f * a)));
            }
        }
        Csr::from_triplets(self.n, t)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }
}

/// Reverse Cuthill-McKee permutation: `perm[new] = old`.
pub fn rcm(a: &Csr) -> Vec<usize> {
    let n = a.n;
    let deg: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let bfs_levels = |start: usize| {
        let mut level = vec![usize::MAX; n];
        let mut q = VecDeque::from([start]);
        level[start] = 0;
        let mut last = start;
        while let Some(u) = q.pop_front() {
            last = u;
            for &v in a.row(u).0 {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    q.push_back(v);
                }
            }
        }
        (level[last], level)
    };
    while order.len() < n {
        // pseudo-peripheral start in the next component
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| deg[i]).unwrap();
        let mut start = seed;
        let (mut ecc, mut level) = bfs_levels(start);
        for _ in 0..8 {
            let far = (0..n)
                .filter(|&i| level[i] == ecc)
                .min_by_key(|&i| deg[i])
                .unwrap();
            let (e2, l2) = bfs_levels(far);
            if e2 <= ecc {
                break;
            }
            start = far;
            ecc = e2;
            level = l2;
        }
        let mut q = VecDeque::from([start]);
        visited[start] = true;
        while let Some(u) = q.pop_front() {
            order.push(u);
            let mut nb: Vec<usize> = a.row(u).0.iter().copied().filter(|&v| !visited[v]).collect();
            nb.sort_by_key(|&v| (deg[v], v));
            for v in nb {
                visited[v] = true;
                q.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// Lower Cholesky factor stored by rows over each row's envelope.
#[derive(Debug, Clone)]
pub struct Skyline {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl Skyline {
    /// Factors `P A P^T` with the RCM permutation of `a`.
    pub fn factor(a: &Csr) -> Result<Skyline> {
        let n = a.n;
        let perm = rcm(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = inv[old];
            for &oj in a.row(old).0 {
                let j = inv[oj];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for old in 0..n {
            let i = inv[old];
            let (c, v) = a.row(old);
            for (oj, x) in c.iter().zip(v) {
                let j = inv[*oj];
                if j <= i {
                    data[start[i] + j - first[i]] += x;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let (ri, rj) = (start[i], start[j]);
                let mut s = data[ri + j - fi];
                let li = &data[ri + k0 - fi..ri + j - fi];
                let lj = &data[rj + k0 - fj..rj + j - fj];
                s -= li.iter().zip(lj).map(|(a, b)| a * b).sum::<f64>();
                let djj = data[rj + j - fj];
                data[ri + j - fi] = s / djj;
            }
            let row = &data[start[i]..start[i] + i - fi];
            let d = data[start[i] + i - fi] - row.iter().map(|x| x * x).sum::<f64>();
            if !(d > 0.0) {
                return Err(Error::Precondition(format!("matrix not positive definite at pivot {i}")));
            }
            data[start[i] + i - fi] = d.sqrt();
        }
        Ok(Skyline { n, perm, first, start, data })
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i] + i - fi];
            let s: f64 = row.iter().zip(&y[fi..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - s) / self.data[self.start[i] + i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            y[i] /= self.data[self.start[i] + i - fi];
            let xi = y[i];
            let row = &self.data[self.start[i]..self.start[i] + i - fi];
            for (yk, l) in y[fi..i].iter_mut().zip(row) {
                *yk -= l * xi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = y[new];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> Csr {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.5));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        Csr::from_triplets(n, t)
    }

    #[test]
    fn solve_matches_matvec() {
        let mut t = Vec::new();
        // 2D grid Laplacian plus identity
        let m = 9;
        let id = |i: usize, j: usize| i * m + j;
        for i in 0..m {
            for j in 0..m {
                t.push((id(i, j), id(i, j), 5.0));
                for (di, dj) in [(0i64, 1i64), (1, 0), (0, -1), (-1, 0)] {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if (0..m as i64).contains(&a) && (0..m as i64).contains(&b) {
                        t.push((id(i, j), id(a as usize, b as usize), -1.0));
                    }
                }
            }
        }
        let a = Csr::from_triplets(m * m, t);
        let f = Skyline::factor(&a).unwrap();
        let x: Vec<f64> = (0..m * m).map(|k| (k as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; m * m];
        a.mul_vec(&x, &mut b);
        f.solve(&mut b);
        for (p, q) in b.iter().zip(&x) {
            assert!((p - q).abs() < 1e-13);
        }
        let p = rcm(&a);
        let mut s = p.clone();
        s.sort();
        assert_eq!(s, (0..m * m).collect::<Vec<_>>());
    }

    #[test]
    fn tridiagonal_envelope_is_minimal() {
        let a = laplace_1d(50);
        let f = Skyline::factor(&a).unwrap();
        assert_eq!(f.envelope_size(), 50 + 49);
    }

    #[test]
    fn indefinite_rejected() {
        let a = Csr::from_triplets(2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(Skyline::factor(&a).is_err());
    }
}
