//! Symmetric banded matrices (lower storage) and their Cholesky factors.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SymBand {
    pub n: usize,
    /// Half-bandwidth.
    pub kd: usize,
    /// `data[i * (kd + 1) + (i − j)] = A_ij` for `i − kd ≤ j ≤ i`.
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, kd: usize) -> Self {
        Self { n, kd, data: vec![0.0; n * (kd + 1)] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.kd {
            0.0
        } else {
            self.data[i * (self.kd + 1) + (i - j)]
        }
    }

    /// Adds `v` to `A_ij` (lower triangle, `i ≥ j`).
    #[inline]
    pub fn add_lower(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i >= j && i - j <= self.kd);
        self.data[i * (self.kd + 1) + (i - j)] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        let w = self.kd + 1;
        for i in 0..self.n {
            let row = &self.data[i * w..(i + 1) * w];
            y[i] += row[0] * x[i];
            for d in 1..w.min(i + 1) {
                let j = i - d;
                y[i] += row[d] * x[j];
                y[j] += row[d] * x[i];
            }
        }
        y
    }

    /// `D A D` for a diagonal `D`.
    pub fn scaled(&self, d: &[f64]) -> Self {
        let mut out = self.clone();
        let w = self.kd + 1;
        for i in 0..self.n {
            for k in 0..w.min(i + 1) {
                out.data[i * w + k] *= d[i] * d[i - k];
            }
        }
        out
    }

    pub fn shifted(&self, sigma: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * (self.kd + 1)] -= sigma;
        }
        out
    }

    pub fn diag_max_abs(&self) -> f64 {
        (0..self.n).fold(0.0, |m, i| m.max(self.data[i * (self.kd + 1)].abs()))
    }

    /// Gershgorin interval `[lo, hi]`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut rad = vec![0.0; self.n];
        let w = self.kd + 1;
        for i in 0..self.n {
            for d in 1..w.min(i + 1) {
                let v = self.data[i * w + d].abs();
                rad[i] += v;
                rad[i - d] += v;
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let c = self.data[i * w];
            lo = lo.min(c - rad[i]);
            hi = hi.max(c + rad[i]);
        }
        (lo, hi)
    }

    pub fn cholesky(&self) -> Result<BandCholesky> {
        let n = self.n;
        let kd = self.kd;
        let w = kd + 1;
        let mut l = self.data.clone();
        for j in 0..n {
            let mut d = l[j * w];
            for k in j.saturating_sub(kd)..j {
                let v = l[j * w + (j - k)];
                d -= v * v;
            }
            if !(d > 0.0) {
                return Err(Error::Factorization(j));
            }
            let d = d.sqrt();
            l[j * w] = d;
            for i in j + 1..(j + w).min(n) {
                let mut s = l[i * w + (i - j)];
                for k in i.saturating_sub(kd)..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                l[i * w + (i - j)] = s / d;
            }
        }
        Ok(BandCholesky { n, kd, l })
    }
}

/// `A = L Lᵀ` with `L` lower banded.
#[derive(Clone, Debug)]
pub struct BandCholesky {
    n: usize,
    kd: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// `L⁻¹ b`.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let w = self.kd + 1;
        let mut y = b.to_vec();
        for i in 0..self.n {
            let mut s = y[i];
            for k in i.saturating_sub(self.kd)..i {
                s -= self.l[i * w + (i - k)] * y[k];
            }
            y[i] = s / self.l[i * w];
        }
        y
    }

    /// `L⁻ᵀ b`.
    pub fn backward(&self, b: &[f64]) -> Vec<f64> {
        let w = self.kd + 1;
        let mut x = b.to_vec();
        for i in (0..self.n).rev() {
            let s = x[i] / self.l[i * w];
            x[i] = s;
            for k in i.saturating_sub(self.kd)..i {
                x[k] -= self.l[i * w + (i - k)] * s;
            }
        }
        x
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.backward(&self.forward(b))
    }
}
