//! Square banded matrices and an LU factorization with partial pivoting.
//!
//! Storage keeps `kl` extra super-diagonals per row so that row exchanges
//! during factorization stay inside the band (same layout idea as LAPACK
//! `gbtrf`).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.kl
    }

    pub fn upper(&self) -> usize {
        self.ku
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.data[s] += value;
    }

    pub fn add_diagonal(&mut self, diag: &[f64]) {
        assert_eq!(diag.len(), self.n);
        for (i, d) in diag.iter().enumerate() {
            self.add(i, i, *d);
        }
    }

    fn columns(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.columns(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Matrix product; bandwidths add.
    pub fn mul(&self, other: &Banded) -> Banded {
        assert_eq!(self.n, other.n);
        let mut out = Banded::zeros(self.n, self.kl + other.kl, self.ku + other.ku);
        for i in 0..self.n {
            for k in self.columns(i) {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in other.columns(k) {
                    out.add(i, j, a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.kl;
        let reach = self.ku + self.kl;
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.slot(k, k)].abs();
            for i in k + 1..=last_row {
                let v = self.data[self.slot(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular(k));
            }
            pivots[k] = p;
            let last_col = (k + reach).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.slot(k, j), self.slot(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.slot(k, k)];
            for i in k + 1..=last_row {
                let s = self.slot(i, k);
                let l = self.data[s] / pivot;
                self.data[s] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=last_col {
                    let kj = self.data[self.slot(k, j)];
                    let ij = self.slot(i, j);
                    self.data[ij] -= l * kj;
                }
            }
        }
        Ok(BandedLu { lu: self, pivots })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: Banded,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let a = &self.lu;
        let n = a.n;
        assert_eq!(rhs.len(), n);
        let mut b = rhs.to_vec();
        for k in 0..n {
            b.swap(k, self.pivots[k]);
            let bk = b[k];
            for i in k + 1..=(k + a.kl).min(n - 1) {
                b[i] -= a.data[a.slot(i, k)] * bk;
            }
        }
        let reach = a.ku + a.kl;
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + reach).min(n - 1) {
                s -= a.data[a.slot(k, j)] * b[j];
            }
            b[k] = s / a.data[a.slot(k, k)];
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination with full row pivoting, independent of the band code.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))
                .unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let l = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= l * a[k][j];
                }
                b[i] -= l * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
            x[k] = (b[k] - s) / a[k][k];
        }
        x
    }

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> Banded {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Banded::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                m.add(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    #[test]
    fn solve_matches_dense_elimination() {
        for (seed, kl, ku) in [(1u64, 2, 2), (2, 4, 4), (3, 1, 3), (4, 3, 0)] {
            let n = 40;
            let m = random_band(n, kl, ku, seed);
            let dense: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| m.get(i, j)).collect())
                .collect();
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
            let x = m.clone().factor().unwrap().solve(&b);
            let y = dense_solve(dense, b.clone());
            let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (a, c) in x.iter().zip(&y) {
                assert!((a - c).abs() < 1e-9 * scale, "{a} vs {c}");
            }
            let back = m.matvec(&x);
            for (a, c) in back.iter().zip(&b) {
                assert!((a - c).abs() < 1e-12 * scale * (kl + ku + 1) as f64);
            }
        }
    }

    #[test]
    fn product_matches_dense() {
        let a = random_band(12, 2, 1, 7);
        let b = random_band(12, 1, 2, 8);
        let c = a.mul(&b);
        for i in 0..12 {
            for j in 0..12 {
                let expect: f64 = (0..12).map(|k| a.get(i, k) * b.get(k, j)).sum();
                assert!((c.get(i, j) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_matrix_detected() {
        let m = Banded::zeros(5, 1, 1);
        assert!(matches!(m.factor(), Err(Error::Singular(0))));
    }
}
