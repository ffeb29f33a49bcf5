//! Spatial grid, Poisson node grid and polar energy–angle mesh.
//!
//! Storage is 0-based: spatial cell `i` spans `[iΔx, (i+1)Δx]`, energy cell
//! `k` spans `[kΔε, (k+1)Δε]` and angle cell `n` spans `[nΔθ, (n+1)Δθ]`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{config, Result};

/// Uniform 1D grid along the channel. Lengths in nm.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    pub length: f64,
    pub nx: usize,
    pub dx: f64,
    pub edges: Vec<f64>,
    pub mids: Vec<f64>,
}

impl SpatialGrid {
    pub fn new(length: f64, nx: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(config(format!("device length must be positive, got {length}")));
        }
        if nx < 2 {
            return Err(config(format!("need at least 2 spatial cells, got {nx}")));
        }
        let dx = length / nx as f64;
        let edges = (0..=nx).map(|i| i as f64 * dx).collect();
        let mids = (0..nx).map(|i| (i as f64 + 0.5) * dx).collect();
        Ok(Self {
            length,
            nx,
            dx,
            edges,
            mids,
        })
    }
}

/// Node grid of the 2D Poisson problem on `[0, L] × [0, H]`.
///
/// x-nodes coincide with the edges of the [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonGrid {
    pub nx: usize,
    pub ny: usize,
    pub length: f64,
    pub height: f64,
    pub dx: f64,
    pub dy: f64,
    /// Node row of the graphene layer.
    pub j_gr: usize,
}

impl PoissonGrid {
    pub fn new(spatial: &SpatialGrid, height: f64, ny: usize, y_gr: f64) -> Result<Self> {
        if !(height > 0.0 && height.is_finite()) {
            return Err(config(format!("device height must be positive, got {height}")));
        }
        if ny < 2 {
            return Err(config(format!("need at least 2 vertical intervals, got {ny}")));
        }
        let dy = height / ny as f64;
        let r = y_gr / dy;
        let j = libm::round(r);
        if !(0.0..=ny as f64).contains(&j) || libm::fabs(r - j) > 1e-9 {
            return Err(config(format!(
                "graphene row y = {y_gr} nm is not a node of the {ny}-interval grid"
            )));
        }
        Ok(Self {
            nx: spatial.nx,
            ny,
            length: spatial.length,
            height,
            dx: spatial.dx,
            dy,
            j_gr: j as usize,
        })
    }

    pub fn nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.dy
    }

    /// Column-major node index: `j` varies fastest.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * (self.ny + 1) + j
    }
}

/// Tensor mesh in energy (eV) and angle (rad) with cached trigonometry.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarMesh {
    pub e_max: f64,
    pub ne: usize,
    pub nt: usize,
    pub de: f64,
    pub dtheta: f64,
    pub e_edges: Vec<f64>,
    pub e_mids: Vec<f64>,
    pub t_edges: Vec<f64>,
    pub t_mids: Vec<f64>,
    /// sin θ at angular edges, length `nt + 1`.
    pub sin_edges: Vec<f64>,
    pub sin_mids: Vec<f64>,
    pub cos_mids: Vec<f64>,
    /// sin θ_{n+1} − sin θ_n over each angle cell.
    pub dsin: Vec<f64>,
    /// ε²_{k+1} − ε²_k over each energy cell.
    pub de2: Vec<f64>,
    /// ε³_{k+1} − ε³_k over each energy cell.
    pub de3: Vec<f64>,
}

impl PolarMesh {
    pub fn new(e_max: f64, ne: usize, nt: usize) -> Result<Self> {
        if !(e_max > 0.0 && e_max.is_finite()) {
            return Err(config(format!("energy cap must be positive, got {e_max}")));
        }
        if ne < 2 {
            return Err(config(format!("need at least 2 energy cells, got {ne}")));
        }
        if nt < 4 || nt % 2 != 0 {
            return Err(config(format!("angle cells must be even and at least 4, got {nt}")));
        }
        let de = e_max / ne as f64;
        let dtheta = 2.0 * PI / nt as f64;
        let e_edges: Vec<f64> = (0..=ne).map(|k| k as f64 * de).collect();
        let e_mids = (0..ne).map(|k| (k as f64 + 0.5) * de).collect();
        let t_edges: Vec<f64> = (0..=nt).map(|n| n as f64 * dtheta).collect();
        let t_mids: Vec<f64> = (0..nt).map(|n| (n as f64 + 0.5) * dtheta).collect();
        let mut sin_edges: Vec<f64> = t_edges.iter().map(|&t| libm::sin(t)).collect();
        // θ = 2π is the same edge as θ = 0
        sin_edges[nt] = sin_edges[0];
        let sin_mids = t_mids.iter().map(|&t| libm::sin(t)).collect();
        let cos_mids = t_mids.iter().map(|&t| libm::cos(t)).collect();
        let dsin = (0..nt).map(|n| sin_edges[n + 1] - sin_edges[n]).collect();
        let de2 = (0..ne)
            .map(|k| e_edges[k + 1] * e_edges[k + 1] - e_edges[k] * e_edges[k])
            .collect();
        let de3 = (0..ne)
            .map(|k| libm::pow(e_edges[k + 1], 3.0) - libm::pow(e_edges[k], 3.0))
            .collect();
        Ok(Self {
            e_max,
            ne,
            nt,
            de,
            dtheta,
            e_edges,
            e_mids,
            t_edges,
            t_mids,
            sin_edges,
            sin_mids,
            cos_mids,
            dsin,
            de2,
            de3,
        })
    }

    pub fn cells(&self) -> usize {
        self.ne * self.nt
    }

    /// Angular offset (n − n') mod N_θ.
    #[inline]
    pub fn angle_offset(&self, n: usize, np: usize) -> usize {
        (n + self.nt - np) % self.nt
    }
}
