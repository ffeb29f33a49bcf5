//! Semi-discrete right-hand side: free streaming in x, field drift in
//! (ε, θ) and the collision projections, divided by the mass factors.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::collision::{CollisionOperator, CollisionScratch};
use crate::error::{config, Result};
use crate::mesh::{PolarMesh, SpatialGrid};
use crate::physics::fermi_dirac;
use crate::state::{Band, SolutionState};

/// Blend between upwind (η = 0) and central (η = 1) spatial fluxes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxBlend(f64);

impl FluxBlend {
    pub fn new(eta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&eta) {
            Ok(Self(eta))
        } else {
            Err(config(format!("flux blend must lie in [0, 1], got {eta}")))
        }
    }

    pub fn upwind() -> Self {
        Self(0.0)
    }

    pub fn eta(self) -> f64 {
        self.0
    }
}

/// Interface value from the left trace `f_minus` and right trace `f_plus`
/// for a cell with streaming coefficient sign `sign(M)`.
#[inline]
pub fn spatial_flux(f_minus: f64, f_plus: f64, m: f64, blend: FluxBlend) -> f64 {
    let s = if m > 0.0 {
        1.0
    } else if m < 0.0 {
        -1.0
    } else {
        0.0
    };
    0.5 * (f_minus + f_plus) + 0.5 * (1.0 - blend.0) * s * (f_minus - f_plus)
}

#[inline(always)]
pub fn minmod(p: f64, q: f64) -> f64 {
    if p * q <= 0.0 {
        0.0
    } else if p.abs() < q.abs() {
        p
    } else {
        q
    }
}

/// UNO interface value between cells `g` and `g_next` with wind sign `w`.
pub fn uno_interface(g_prev: f64, g: f64, g_next: f64, g_next2: f64, w: f64, dz: f64) -> f64 {
    if w > 0.0 {
        g + 0.5 * dz * minmod((g - g_prev) / dz, (g_next - g) / dz)
    } else if w < 0.0 {
        g_next - 0.5 * dz * minmod((g_next - g) / dz, (g_next2 - g_next) / dz)
    } else {
        0.5 * (g + g_next)
    }
}

#[inline(always)]
fn uno(g_prev: f64, g: f64, g_next: f64, g_next2: f64, w: f64) -> f64 {
    if w > 0.0 {
        g + 0.5 * minmod(g - g_prev, g_next - g)
    } else if w < 0.0 {
        g_next - 0.5 * minmod(g_next - g, g_next2 - g_next)
    } else {
        0.5 * (g + g_next)
    }
}

#[inline]
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Streaming coefficients M[s][k][n] = s v_F/(ħv_F)² · (ε²₊ − ε²₋)/2 · Δsin θ.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxCoefficients {
    pub ne: usize,
    pub nt: usize,
    /// Conduction-band values; the valence band is the negative.
    pub conduction: Vec<f64>,
}

impl FluxCoefficients {
    pub fn new(mesh: &PolarMesh, vf: f64, hbar_vf: f64) -> Self {
        let scale = vf / (hbar_vf * hbar_vf);
        let mut conduction = Vec::with_capacity(mesh.cells());
        for k in 0..mesh.ne {
            for n in 0..mesh.nt {
                conduction.push(scale * 0.5 * mesh.de2[k] * mesh.dsin[n]);
            }
        }
        Self {
            ne: mesh.ne,
            nt: mesh.nt,
            conduction,
        }
    }

    pub fn get(&self, band: Band, k: usize, n: usize) -> f64 {
        band.sign() * self.conduction[k * self.nt + n]
    }
}

/// Exterior occupancies at the two contacts, used on inflow cells.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    /// `[band][k]` at x = 0.
    pub left: [Vec<f64>; 2],
    /// `[band][k]` at x = L.
    pub right: [Vec<f64>; 2],
}

impl BoundarySpec {
    /// Fermi–Dirac occupancies at the cell midpoints for each contact level.
    pub fn fermi_dirac(mesh: &PolarMesh, left_level: f64, right_level: f64, temperature_k: f64) -> Self {
        let fill = |level: f64| {
            Band::ALL.map(|band| {
                mesh.e_mids
                    .iter()
                    .map(|&e| fermi_dirac(e, level, band, temperature_k))
                    .collect::<Vec<_>>()
            })
        };
        Self {
            left: fill(left_level),
            right: fill(right_level),
        }
    }

    /// Carriers of `band` in angle cell `n` enter through x = 0.
    pub fn inflow_left(mesh: &PolarMesh, band: Band, n: usize) -> bool {
        band.sign() * mesh.dsin[n] > 0.0
    }

    /// Carriers of `band` in angle cell `n` enter through x = L.
    pub fn inflow_right(mesh: &PolarMesh, band: Band, n: usize) -> bool {
        band.sign() * mesh.dsin[n] < 0.0
    }
}

/// Reusable buffers for [`Discretization::rhs`].
#[derive(Debug, Clone)]
pub struct Workspace {
    flux_lo: Vec<f64>,
    flux_hi: Vec<f64>,
    radial: Vec<f64>,
    angular: Vec<f64>,
    brace_a: Vec<f64>,
    brace_b: Vec<f64>,
    q0: [Vec<f64>; 2],
    q1: [Vec<f64>; 2],
    collision: CollisionScratch,
}

/// Everything needed to evaluate the semi-discrete operator.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub spatial: SpatialGrid,
    pub polar: PolarMesh,
    pub vf: f64,
    pub hbar_vf: f64,
    pub blend: FluxBlend,
    pub boundary: BoundarySpec,
    pub collision: Option<CollisionOperator>,
    /// Values of `a` beyond ε_max per band: empty conduction, full valence.
    pub vacuum: [f64; 2],
    /// Conduction-band mean x-velocity per angle cell, v_F Δsin θ/Δθ.
    velocity: Vec<f64>,
    /// N̄_k = Δθ(ε²₊ − ε²₋)/(2(ħv_F)²).
    mass: Vec<f64>,
    /// Upwind directions for E > 0: sgn(−Δsin θ_n) radially, sgn(sin θ_e) in angle.
    radial_wind: Vec<f64>,
    angular_wind: Vec<f64>,
}

impl Discretization {
    pub fn new(
        spatial: SpatialGrid,
        polar: PolarMesh,
        vf: f64,
        hbar_vf: f64,
        blend: FluxBlend,
        boundary: BoundarySpec,
        collision: Option<CollisionOperator>,
    ) -> Result<Self> {
        for side in [&boundary.left, &boundary.right] {
            if side.iter().any(|v| v.len() != polar.ne) {
                return Err(config("boundary data does not match the energy mesh"));
            }
        }
        let velocity = polar.dsin.iter().map(|d| vf * d / polar.dtheta).collect();
        let mass = polar
            .de2
            .iter()
            .map(|d| polar.dtheta * d / (2.0 * hbar_vf * hbar_vf))
            .collect();
        let radial_wind = polar.dsin.iter().map(|d| sign(-d)).collect();
        let angular_wind = polar.sin_edges[..polar.nt].iter().map(|s| sign(*s)).collect();
        Ok(Self {
            spatial,
            polar,
            vf,
            hbar_vf,
            blend,
            boundary,
            collision,
            vacuum: [0.0, 1.0],
            velocity,
            mass,
            radial_wind,
            angular_wind,
        })
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn zero_state(&self) -> SolutionState {
        SolutionState::zeros(self.spatial.nx, self.polar.ne, self.polar.nt)
    }

    pub fn workspace(&self) -> Workspace {
        let len = self.polar.cells();
        Workspace {
            flux_lo: vec![0.0; len],
            flux_hi: vec![0.0; len],
            radial: vec![0.0; (self.polar.ne + 1) * self.polar.nt],
            angular: vec![0.0; self.polar.ne * (self.polar.nt + 1)],
            brace_a: vec![0.0; len],
            brace_b: vec![0.0; len],
            q0: [vec![0.0; len], vec![0.0; len]],
            q1: [vec![0.0; len], vec![0.0; len]],
            collision: self
                .collision
                .as_ref()
                .map(|c| c.scratch())
                .unwrap_or_default(),
        }
    }

    /// Writes `{[ε g]_radial Δsin θ − [sin θ g]_angular Δε}` for one polar
    /// block `g` into `out`, with interface values from the UNO rule.
    fn drift_brace(
        &self,
        g: &[f64],
        field: f64,
        vacuum: f64,
        radial: &mut [f64],
        angular: &mut [f64],
        out: &mut [f64],
    ) {
        let (ne, nt) = (self.polar.ne, self.polar.nt);
        let p = &self.polar;
        let fs = sign(field);
        // radial edges e = 0..=ne at ε = eΔε; wind sgn(−E Δsin θ)
        radial[..nt].fill(0.0);
        radial[ne * nt..(ne + 1) * nt].fill(vacuum);
        for e in 1..ne {
            let lo = &g[(e - 1) * nt..e * nt];
            let hi = &g[e * nt..(e + 1) * nt];
            let prev = if e >= 2 { &g[(e - 2) * nt..(e - 1) * nt] } else { lo };
            let dst = &mut radial[e * nt..(e + 1) * nt];
            if e + 1 < ne {
                let next2 = &g[(e + 1) * nt..(e + 2) * nt];
                for n in 0..nt {
                    dst[n] = uno(prev[n], lo[n], hi[n], next2[n], fs * self.radial_wind[n]);
                }
            } else {
                for n in 0..nt {
                    dst[n] = uno(prev[n], lo[n], hi[n], vacuum, fs * self.radial_wind[n]);
                }
            }
        }
        // angular edges e = 0..=nt at θ = eΔθ, periodic; wind sgn(E sin θ)
        let w = nt + 1;
        for k in 0..ne {
            let row = &g[k * nt..(k + 1) * nt];
            let dst = &mut angular[k * w..(k + 1) * w];
            let wrap = |e: usize| {
                let at = |c: usize| row[c % nt];
                uno(at(e + nt - 2), at(e + nt - 1), at(e), at(e + 1), fs * self.angular_wind[e])
            };
            dst[0] = wrap(0);
            dst[1] = wrap(1);
            for e in 2..nt - 1 {
                dst[e] = uno(row[e - 2], row[e - 1], row[e], row[e + 1], fs * self.angular_wind[e]);
            }
            dst[nt - 1] = wrap(nt - 1);
            dst[nt] = dst[0];
        }
        for k in 0..ne {
            let (lo, hi) = (p.e_edges[k], p.e_edges[k + 1]);
            let r_lo = &radial[k * nt..(k + 1) * nt];
            let r_hi = &radial[(k + 1) * nt..(k + 2) * nt];
            let ang = &angular[k * w..(k + 1) * w];
            let dst = &mut out[k * nt..(k + 1) * nt];
            for n in 0..nt {
                let r = (hi * r_hi[n] - lo * r_lo[n]) * p.dsin[n];
                let t = (p.sin_edges[n + 1] * ang[n + 1] - p.sin_edges[n] * ang[n]) * p.de;
                dst[n] = r - t;
            }
        }
    }

    /// Drift projections `(G0, G1)` at spatial cell `i`, each `[band][k·N_θ + n]`.
    pub fn drift_projection(&self, state: &SolutionState, field: &[f64], i: usize) -> [[Vec<f64>; 2]; 2] {
        let mut ws = self.workspace();
        let len = self.polar.cells();
        let mut out = [[vec![0.0; len], vec![0.0; len]], [vec![0.0; len], vec![0.0; len]]];
        let pref = field[i] * self.vf / (self.hbar_vf * self.hbar_vf) * self.spatial.dx;
        for band in Band::ALL {
            let s = band.index();
            self.drift_brace(
                state.a_cell(band, i),
                field[i],
                self.vacuum[s],
                &mut ws.radial,
                &mut ws.angular,
                &mut out[0][s],
            );
            self.drift_brace(
                state.b_cell(band, i),
                field[i],
                0.0,
                &mut ws.radial,
                &mut ws.angular,
                &mut out[1][s],
            );
            out[0][s].iter_mut().for_each(|v| *v *= pref);
            out[1][s].iter_mut().for_each(|v| *v *= pref / 3.0);
        }
        out
    }

    /// Time derivatives of all coefficients, same layout as
    /// [`SolutionState::coeffs`].
    pub fn rhs(&self, coeffs: &[f64], field: &[f64], out: &mut [f64], ws: &mut Workspace) {
        let (nx, ne, nt) = (self.spatial.nx, self.polar.ne, self.polar.nt);
        let len = ne * nt;
        let cells = 2 * nx * len;
        let (a, b) = coeffs.split_at(cells);
        let (da, db) = out.split_at_mut(cells);
        let inv_dx = 1.0 / self.spatial.dx;
        let eta_w = 0.5 * (1.0 - self.blend.eta());
        let drift_scale = |k: usize| self.vf / (self.hbar_vf * self.hbar_vf) / self.mass[k];

        for band in Band::ALL {
            let s = band.index();
            let sg = band.sign();
            let upw: Vec<f64> = self.velocity.iter().map(|v| sign(sg * v)).collect();
            let speed: Vec<f64> = self.velocity.iter().map(|v| sg * v * inv_dx).collect();
            let block = |i: usize| {
                let start = (s * nx + i) * len;
                (start, start + len)
            };
            // left boundary flux
            {
                let (st, _) = block(0);
                for k in 0..ne {
                    for n in 0..nt {
                        let idx = k * nt + n;
                        let u = sg * self.velocity[n];
                        let fp = a[st + idx] - b[st + idx];
                        let fm = if u > 0.0 { self.boundary.left[s][k] } else { fp };
                        ws.flux_lo[idx] = 0.5 * (fm + fp) + eta_w * sign(u) * (fm - fp);
                    }
                }
            }
            for i in 0..nx {
                let (st, en) = block(i);
                let ai = &a[st..en];
                let bi = &b[st..en];
                if i + 1 < nx {
                    let (sn, enn) = block(i + 1);
                    let an = &a[sn..enn];
                    let bn = &b[sn..enn];
                    for k in 0..ne {
                        for n in 0..nt {
                            let idx = k * nt + n;
                            let fm = ai[idx] + bi[idx];
                            let fp = an[idx] - bn[idx];
                            ws.flux_hi[idx] = 0.5 * (fm + fp) + eta_w * upw[n] * (fm - fp);
                        }
                    }
                } else {
                    for k in 0..ne {
                        for n in 0..nt {
                            let idx = k * nt + n;
                            let u = sg * self.velocity[n];
                            let fm = ai[idx] + bi[idx];
                            let fp = if u < 0.0 { self.boundary.right[s][k] } else { fm };
                            ws.flux_hi[idx] = 0.5 * (fm + fp) + eta_w * sign(u) * (fm - fp);
                        }
                    }
                }
                let dai = &mut da[st..en];
                let dbi = &mut db[st..en];
                for k in 0..ne {
                    for n in 0..nt {
                        let idx = k * nt + n;
                        let u = speed[n];
                        let (lo, hi) = (ws.flux_lo[idx], ws.flux_hi[idx]);
                        dai[idx] = -(hi - lo) * u;
                        dbi[idx] = -3.0 * (hi + lo - 2.0 * ai[idx]) * u;
                    }
                }
                let e = field[i];
                if e != 0.0 {
                    self.drift_brace(ai, e, self.vacuum[s], &mut ws.radial, &mut ws.angular, &mut ws.brace_a);
                    self.drift_brace(bi, e, 0.0, &mut ws.radial, &mut ws.angular, &mut ws.brace_b);
                    for k in 0..ne {
                        let c = e * drift_scale(k);
                        for n in 0..nt {
                            let idx = k * nt + n;
                            dai[idx] += c * ws.brace_a[idx];
                            dbi[idx] += c * ws.brace_b[idx];
                        }
                    }
                }
                core::mem::swap(&mut ws.flux_lo, &mut ws.flux_hi);
            }
        }

        if let Some(op) = &self.collision {
            for i in 0..nx {
                let cp = i * len;
                let cm = (nx + i) * len;
                for v in ws.q0.iter_mut().chain(ws.q1.iter_mut()) {
                    v.iter_mut().for_each(|x| *x = 0.0);
                }
                {
                    let [q0p, q0m] = &mut ws.q0;
                    let [q1p, q1m] = &mut ws.q1;
                    op.apply(
                        [&a[cp..cp + len], &a[cm..cm + len]],
                        [&b[cp..cp + len], &b[cm..cm + len]],
                        [q0p, q0m],
                        [q1p, q1m],
                        &mut ws.collision,
                    );
                }
                for (s, start) in [(0usize, cp), (1, cm)] {
                    for k in 0..ne {
                        let inv = 1.0 / self.mass[k];
                        for n in 0..nt {
                            let idx = k * nt + n;
                            da[start + idx] += ws.q0[s][idx] * inv;
                            db[start + idx] += ws.q1[s][idx] * inv;
                        }
                    }
                }
            }
        }
    }
}
