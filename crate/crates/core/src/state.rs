use alloc::vec;
use alloc::vec::Vec;

/// Energy band: conduction (s = +1) or valence (s = −1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Conduction,
    Valence,
}

impl Band {
    pub const ALL: [Band; 2] = [Band::Conduction, Band::Valence];

    pub fn sign(self) -> f64 {
        match self {
            Band::Conduction => 1.0,
            Band::Valence => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Band::Conduction => 0,
            Band::Valence => 1,
        }
    }

    pub fn from_index(i: usize) -> Band {
        if i == 0 {
            Band::Conduction
        } else {
            Band::Valence
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Band::Conduction => "plus",
            Band::Valence => "minus",
        }
    }
}

/// DG coefficients of both bands.
///
/// On cell (i, k, n) the distribution is `a + 2(x − x_i)/Δx · b`. All `a`
/// values are stored first, then all `b` values, each block ordered by
/// band, spatial cell, energy cell, angle cell (fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionState {
    pub nx: usize,
    pub ne: usize,
    pub nt: usize,
    pub time: f64,
    pub coeffs: Vec<f64>,
}

impl SolutionState {
    pub fn zeros(nx: usize, ne: usize, nt: usize) -> Self {
        Self {
            nx,
            ne,
            nt,
            time: 0.0,
            coeffs: vec![0.0; 4 * nx * ne * nt],
        }
    }

    /// Number of (band, i, k, n) cells.
    pub fn cells(&self) -> usize {
        2 * self.nx * self.ne * self.nt
    }

    pub fn polar_len(&self) -> usize {
        self.ne * self.nt
    }

    #[inline]
    pub fn index(&self, band: Band, i: usize, k: usize, n: usize) -> usize {
        ((band.index() * self.nx + i) * self.ne + k) * self.nt + n
    }

    pub fn a(&self) -> &[f64] {
        &self.coeffs[..self.cells()]
    }

    pub fn b(&self) -> &[f64] {
        &self.coeffs[self.cells()..]
    }

    pub fn a_mut(&mut self) -> &mut [f64] {
        let c = self.cells();
        &mut self.coeffs[..c]
    }

    pub fn b_mut(&mut self) -> &mut [f64] {
        let c = self.cells();
        &mut self.coeffs[c..]
    }

    pub fn split_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        let c = self.cells();
        self.coeffs.split_at_mut(c)
    }

    /// Polar block of `a` for one band and spatial cell.
    pub fn a_cell(&self, band: Band, i: usize) -> &[f64] {
        let start = self.index(band, i, 0, 0);
        &self.a()[start..start + self.polar_len()]
    }

    pub fn b_cell(&self, band: Band, i: usize) -> &[f64] {
        let start = self.index(band, i, 0, 0);
        &self.b()[start..start + self.polar_len()]
    }

    pub fn get(&self, band: Band, i: usize, k: usize, n: usize) -> (f64, f64) {
        let idx = self.index(band, i, k, n);
        (self.coeffs[idx], self.coeffs[self.cells() + idx])
    }

    pub fn set(&mut self, band: Band, i: usize, k: usize, n: usize, a: f64, b: f64) {
        let idx = self.index(band, i, k, n);
        let c = self.cells();
        self.coeffs[idx] = a;
        self.coeffs[c + idx] = b;
    }

    /// Decode a flat coefficient index into (is_slope, band, i, k, n).
    pub fn locate(&self, flat: usize) -> (bool, Band, usize, usize, usize) {
        let c = self.cells();
        let (slope, idx) = if flat >= c { (true, flat - c) } else { (false, flat) };
        let n = idx % self.nt;
        let k = (idx / self.nt) % self.ne;
        let i = (idx / self.polar_len()) % self.nx;
        let band = Band::from_index(idx / (self.polar_len() * self.nx));
        (slope, band, i, k, n)
    }
}
