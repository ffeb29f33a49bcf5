//! SSP-RK3 time integration and the CFL step rule.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::mesh::{PolarMesh, SpatialGrid};

/// Step-size policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub cfl: f64,
    pub t_end: f64,
}

/// Δt = CFL · min(Δx/v_F, Δε/(e|E|v_F), ε₁Δθ/(e|E|v_F)) in ps.
///
/// `max_field` is in V/nm and `vf` in nm/ps; the drift bounds are dropped
/// for a vanishing field.
pub fn compute_dt(spatial: &SpatialGrid, polar: &PolarMesh, max_field: f64, vf: f64, cfl: f64) -> f64 {
    let mut dt = spatial.dx / vf;
    let drift = max_field.abs() * vf;
    if drift > 0.0 {
        dt = dt.min(polar.de / drift);
        dt = dt.min(polar.e_mids[0] * polar.dtheta / drift);
    }
    cfl * dt
}

/// Stage buffers for [`ssp_rk3_step`].
#[derive(Debug, Clone)]
pub struct Rk3Workspace {
    u0: Vec<f64>,
    rate: Vec<f64>,
}

impl Rk3Workspace {
    pub fn new(len: usize) -> Self {
        Self {
            u0: vec![0.0; len],
            rate: vec![0.0; len],
        }
    }
}

/// Advances `u` by one SSP-RK3 step.
///
/// `rhs(stage, u, du)` writes L(u); `post(stage, u)` runs after each stage
/// (limiting, field update) and may reject the stage.
pub fn ssp_rk3_step<R, P>(u: &mut [f64], dt: f64, ws: &mut Rk3Workspace, mut rhs: R, mut post: P) -> Result<()>
where
    R: FnMut(usize, &[f64], &mut [f64]) -> Result<()>,
    P: FnMut(usize, &mut [f64]) -> Result<()>,
{
    ws.u0.copy_from_slice(u);

    rhs(0, u, &mut ws.rate)?;
    for (x, r) in u.iter_mut().zip(&ws.rate) {
        *x += dt * r;
    }
    post(0, u)?;

    rhs(1, u, &mut ws.rate)?;
    for ((x, r), x0) in u.iter_mut().zip(&ws.rate).zip(&ws.u0) {
        *x = 0.75 * x0 + 0.25 * (*x + dt * r);
    }
    post(1, u)?;

    rhs(2, u, &mut ws.rate)?;
    for ((x, r), x0) in u.iter_mut().zip(&ws.rate).zip(&ws.u0) {
        *x = x0 / 3.0 + 2.0 / 3.0 * (*x + dt * r);
    }
    post(2, u)
}
