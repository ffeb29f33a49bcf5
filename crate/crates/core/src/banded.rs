//! Banded LU factorization without pivoting, for diagonally dominant systems.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{config, Result};

#[derive(Debug, Clone)]
pub(crate) struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn new(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (2 * bw + 1)],
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.bw);
        i * (2 * self.bw + 1) + j + self.bw - i
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.at(i, j)]
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self.at(i, j);
        self.data[p] += v;
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let lo = i.saturating_sub(self.bw);
            let hi = (i + self.bw).min(self.n - 1);
            *yi = (lo..=hi).map(|j| self.get(i, j) * x[j]).sum();
        }
    }

    /// In-place Doolittle factorization.
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, bw) = (self.n, self.bw);
        for k in 0..n {
            let pivot = self.get(k, k);
            if pivot.abs() < 1e-300 {
                return Err(config("singular Poisson system"));
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                let pik = self.at(i, k);
                let l = self.data[pik] / pivot;
                if l == 0.0 {
                    continue;
                }
                self.data[pik] = l;
                for j in k + 1..=last {
                    let pkj = self.at(k, j);
                    let pij = self.at(i, j);
                    self.data[pij] -= l * self.data[pkj];
                }
            }
        }
        Ok(BandLu { m: self })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BandLu {
    m: BandMatrix,
}

impl BandLu {
    pub fn solve(&self, x: &mut [f64]) {
        let (n, bw) = (self.m.n, self.m.bw);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = x[i];
            for j in lo..i {
                s -= self.m.get(i, j) * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = x[i];
            for j in i + 1..=hi {
                s -= self.m.get(i, j) * x[j];
            }
            x[i] = s / self.m.get(i, i);
        }
    }
}
