//! Finite-difference Poisson solve on the device cross-section.
//!
//! Solves ∇·(ϵ_r ∇φ) = h/ϵ₀ with φ in V and lengths in nm, so the source is
//! in V/nm². The matrix is assembled and factored once.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::banded::{BandLu, BandMatrix};
use crate::error::{config, Error, Result};
use crate::mesh::PoissonGrid;
use crate::physics::CHARGE_OVER_EPS0_V_NM;

/// Relative residual accepted from a solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Piecewise-constant relative permittivity: `graphene` on the strip
/// `[strip_bottom, strip_top]`, `oxide` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct DielectricMap {
    pub graphene: f64,
    pub oxide: f64,
    pub strip_bottom: f64,
    pub strip_top: f64,
}

impl DielectricMap {
    pub fn uniform(eps: f64) -> Self {
        Self {
            graphene: eps,
            oxide: eps,
            strip_bottom: 0.0,
            strip_top: 0.0,
        }
    }

    /// Permittivity of a face whose midpoint sits at height `y`.
    pub fn at(&self, y: f64) -> f64 {
        let tol = 1e-9;
        let on_edge = (y - self.strip_bottom).abs() < tol || (y - self.strip_top).abs() < tol;
        if on_edge && self.strip_top > self.strip_bottom {
            2.0 * self.graphene * self.oxide / (self.graphene + self.oxide)
        } else if y > self.strip_bottom && y < self.strip_top {
            self.graphene
        } else {
            self.oxide
        }
    }
}

/// Gate electrodes on the top and bottom edges over `[start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gates {
    pub start: f64,
    pub end: f64,
    pub top: f64,
    pub bottom: f64,
}

/// Dirichlet data; all other boundary nodes are homogeneous Neumann.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonBC {
    pub left: f64,
    pub right: f64,
    pub gates: Option<Gates>,
}

/// Node potentials and the per-cell longitudinal field on the graphene row.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    /// φ at node `(i, j)`, index `i·(N_y + 1) + j`, in V.
    pub phi: Vec<f64>,
    /// E_x per spatial cell in V/nm.
    pub ex: Vec<f64>,
}

/// Charge source h/ϵ₀ per node in V/nm².
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonRHS {
    pub source: Vec<f64>,
}

impl PoissonRHS {
    /// Builds h/ϵ₀ = (e/ϵ₀)(n − p − n_d)/t on node rows inside the strip,
    /// from densities in nm⁻² at the x-nodes.
    pub fn from_edge_densities(
        grid: &PoissonGrid,
        dielectric: &DielectricMap,
        thickness: f64,
        doping: f64,
        electrons: &[f64],
        holes: &[f64],
    ) -> Self {
        let mut source = vec![0.0; grid.nodes()];
        for j in 0..=grid.ny {
            let y = grid.y(j);
            if y < dielectric.strip_bottom - 1e-9 || y > dielectric.strip_top + 1e-9 {
                continue;
            }
            for i in 0..=grid.nx {
                source[grid.node(i, j)] =
                    CHARGE_OVER_EPS0_V_NM * (electrons[i] - holes[i] - doping) / thickness;
            }
        }
        Self { source }
    }
}

/// Assembled and factored Poisson operator.
#[derive(Debug, Clone)]
pub struct PoissonSystem {
    pub grid: PoissonGrid,
    pub dielectric: DielectricMap,
    pub bc: PoissonBC,
    matrix: BandMatrix,
    lu: BandLu,
    dirichlet: Vec<Option<f64>>,
}

impl PoissonSystem {
    pub fn new(grid: PoissonGrid, dielectric: DielectricMap, bc: PoissonBC) -> Result<Self> {
        if !(dielectric.graphene > 0.0 && dielectric.oxide > 0.0) {
            return Err(config("permittivities must be positive"));
        }
        let (nx, ny) = (grid.nx, grid.ny);
        let mut dirichlet = vec![None; grid.nodes()];
        if let Some(g) = &bc.gates {
            if !(g.start < g.end) {
                return Err(config(format!("gate span [{}, {}] is empty", g.start, g.end)));
            }
            let i2 = libm::round(g.start / grid.dx).clamp(0.0, nx as f64) as usize;
            let i3 = libm::round(g.end / grid.dx).clamp(0.0, nx as f64) as usize;
            for i in i2..=i3 {
                dirichlet[grid.node(i, 0)] = Some(g.bottom);
                dirichlet[grid.node(i, ny)] = Some(g.top);
            }
        }
        for j in 0..=ny {
            dirichlet[grid.node(0, j)] = Some(bc.left);
            dirichlet[grid.node(nx, j)] = Some(bc.right);
        }

        let mut matrix = BandMatrix::new(grid.nodes(), ny + 1);
        let (ix2, iy2) = (1.0 / (grid.dx * grid.dx), 1.0 / (grid.dy * grid.dy));
        for i in 0..=nx {
            for j in 0..=ny {
                let p = grid.node(i, j);
                if dirichlet[p].is_some() {
                    matrix.add(p, p, 1.0);
                    continue;
                }
                // interior in x: left/right columns are always Dirichlet
                let ex = dielectric.at(grid.y(j)) * ix2;
                matrix.add(p, grid.node(i - 1, j), ex);
                matrix.add(p, grid.node(i + 1, j), ex);
                matrix.add(p, p, -2.0 * ex);
                let up = (j < ny).then(|| dielectric.at(grid.y(j) + 0.5 * grid.dy) * iy2);
                let down = (j > 0).then(|| dielectric.at(grid.y(j) - 0.5 * grid.dy) * iy2);
                // mirror ghost node on Neumann edges
                let (up, down) = match (up, down) {
                    (Some(u), Some(d)) => (u, d),
                    (Some(u), None) => (2.0 * u, 0.0),
                    (None, Some(d)) => (0.0, 2.0 * d),
                    (None, None) => unreachable!("ny >= 2"),
                };
                if up != 0.0 {
                    matrix.add(p, grid.node(i, j + 1), up);
                }
                if down != 0.0 {
                    matrix.add(p, grid.node(i, j - 1), down);
                }
                matrix.add(p, p, -(up + down));
            }
        }
        let lu = matrix.clone().factor()?;
        Ok(Self {
            grid,
            dielectric,
            bc,
            matrix,
            lu,
            dirichlet,
        })
    }

    /// Solves for φ and extracts E_x on the graphene row.
    pub fn solve(&self, rhs: &PoissonRHS) -> Result<PotentialField> {
        let n = self.grid.nodes();
        if rhs.source.len() != n {
            return Err(config("Poisson source does not match the grid"));
        }
        let b: Vec<f64> = rhs
            .source
            .iter()
            .zip(&self.dirichlet)
            .map(|(s, d)| d.unwrap_or(*s))
            .collect();
        let mut phi = b.clone();
        self.lu.solve(&mut phi);

        let mut r = vec![0.0; n];
        self.matrix.mul(&phi, &mut r);
        let mut res = 0.0;
        let mut norm = 0.0;
        for (ri, bi) in r.iter().zip(&b) {
            res += (ri - bi) * (ri - bi);
            norm += bi * bi;
        }
        let rel = if norm > 0.0 { libm::sqrt(res / norm) } else { libm::sqrt(res) };
        if !(rel <= RESIDUAL_TOLERANCE) {
            return Err(Error::Poisson { residual: rel });
        }

        let g = &self.grid;
        let ex = (0..g.nx)
            .map(|i| -(phi[g.node(i + 1, g.j_gr)] - phi[g.node(i, g.j_gr)]) / g.dx)
            .collect();
        Ok(PotentialField { phi, ex })
    }

    /// Potential at node `(i, j)` of a solution.
    pub fn phi_at(&self, field: &PotentialField, i: usize, j: usize) -> f64 {
        field.phi[self.grid.node(i, j)]
    }
}
