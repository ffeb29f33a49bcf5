//! Mesh-refinement studies along one axis of the phase space.

use alloc::format;
use alloc::vec::Vec;

use crate::driver::{run_scenario, RunOutput};
use crate::error::{config, Result};
use crate::scenario::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Energy,
    Angle,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Energy => "eps",
            Axis::Angle => "theta",
        }
    }

    /// Config with the mesh size along this axis replaced.
    pub fn refine(self, base: &RunConfig, size: usize) -> RunConfig {
        let mut c = base.clone();
        match self {
            Axis::X => c.mesh.nx = size,
            Axis::Energy => c.mesh.ne = size,
            Axis::Angle => c.mesh.nt = size,
        }
        c
    }

    pub fn size(self, config: &RunConfig) -> usize {
        match self {
            Axis::X => config.mesh.nx,
            Axis::Energy => config.mesh.ne,
            Axis::Angle => config.mesh.nt,
        }
    }
}

/// Quantities compared between levels.
pub const QUANTITIES: [&str; 3] = ["density", "velocity", "energy"];

/// Final-frame electron profiles: density, mean velocity, mean energy.
pub fn profiles_of(output: &RunOutput) -> [Vec<f64>; 3] {
    let cells = &output.last().moments.cells;
    [
        cells.iter().map(|r| r.electrons.density).collect(),
        cells.iter().map(|r| r.electrons.velocity).collect(),
        cells.iter().map(|r| r.electrons.energy).collect(),
    ]
}

/// L¹, L², L^∞ norms of a coarse/fine difference weighted by the coarse
/// cell width `dx`. Along x the fine profile must have twice as many cells
/// and is averaged pairwise onto the coarse cells.
pub fn profile_error(axis: Axis, coarse: &[f64], fine: &[f64], dx: f64) -> Result<[f64; 3]> {
    let ratio = if axis == Axis::X { 2 } else { 1 };
    if fine.len() != ratio * coarse.len() {
        return Err(config(format!(
            "profile lengths {} and {} do not match a {} refinement",
            coarse.len(),
            fine.len(),
            axis.name()
        )));
    }
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf = 0.0f64;
    for (i, c) in coarse.iter().enumerate() {
        let f = if ratio == 2 {
            0.5 * (fine[2 * i] + fine[2 * i + 1])
        } else {
            fine[i]
        };
        let d = (c - f).abs();
        l1 += d * dx;
        l2 += d * d * dx;
        linf = linf.max(d);
    }
    Ok([l1, libm::sqrt(l2), linf])
}

/// log₂(e_l/e_{l+1}) for consecutive errors.
pub fn rates(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| libm::log2(w[0] / w[1])).collect()
}

/// Negated least-squares slope of log₂ e_l against the level index, i.e. the
/// fitted order for halving refinements. NaN if any error is non-positive
/// or fewer than two errors are given.
pub fn fitted_order(errors: &[f64]) -> f64 {
    let m = errors.len();
    if m < 2 || errors.iter().any(|e| !(*e > 0.0)) {
        return f64::NAN;
    }
    let mean_x = (m - 1) as f64 / 2.0;
    let ys: Vec<f64> = errors.iter().map(|e| libm::log2(*e)).collect();
    let mean_y = ys.iter().sum::<f64>() / m as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (l, y) in ys.iter().enumerate() {
        let dx = l as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    -sxy / sxx
}

/// Errors and rates for one quantity. `errors[l]` compares level l with l+1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantityReport {
    pub name: &'static str,
    pub errors: Vec<[f64; 3]>,
    pub rates: Vec<[f64; 3]>,
    pub order: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub axis: Axis,
    pub levels: Vec<usize>,
    pub quantities: Vec<QuantityReport>,
}

impl ConvergenceReport {
    /// `profiles[l]` holds the quantities at level `l`; `dx` is the spatial
    /// cell width (m) at each level.
    pub fn from_profiles(axis: Axis, levels: &[usize], profiles: &[[Vec<f64>; 3]], dx: &[f64]) -> Result<Self> {
        if levels.len() != profiles.len() || levels.len() != dx.len() || levels.len() < 2 {
            return Err(config("a convergence study needs at least two matching levels"));
        }
        let mut quantities = Vec::new();
        for (q, name) in QUANTITIES.iter().enumerate() {
            let mut errors = Vec::new();
            for l in 0..levels.len() - 1 {
                errors.push(profile_error(axis, &profiles[l][q], &profiles[l + 1][q], dx[l])?);
            }
            let column = |c: usize| errors.iter().map(|e| e[c]).collect::<Vec<_>>();
            let cols = [column(0), column(1), column(2)];
            let r = cols.clone().map(|c| rates(&c));
            let rates = (0..errors.len().saturating_sub(1))
                .map(|l| [r[0][l], r[1][l], r[2][l]])
                .collect();
            let order = cols.map(|c| fitted_order(&c));
            quantities.push(QuantityReport {
                name,
                errors,
                rates,
                order,
            });
        }
        Ok(Self {
            axis,
            levels: levels.to_vec(),
            quantities,
        })
    }

    pub fn quantity(&self, name: &str) -> Option<&QuantityReport> {
        self.quantities.iter().find(|q| q.name == name)
    }
}

/// Runs `base` at each size along `axis` and compares final-frame profiles.
pub fn convergence_study(base: &RunConfig, axis: Axis, levels: &[usize]) -> Result<ConvergenceReport> {
    let mut profiles = Vec::with_capacity(levels.len());
    let mut dx = Vec::with_capacity(levels.len());
    for &size in levels {
        let c = axis.refine(base, size);
        dx.push(c.geometry.length * 1e-9 / c.mesh.nx as f64);
        profiles.push(profiles_of(&run_scenario(c)?));
    }
    ConvergenceReport::from_profiles(axis, levels, &profiles, &dx)
}
