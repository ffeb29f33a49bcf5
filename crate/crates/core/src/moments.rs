//! Macroscopic observables from the DG coefficients.
//!
//! Hole quantities follow the convention `f_h = 1 − f_−` with hole velocity
//! `v_+`, so the total current is `j_n − j_p`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::mesh::PolarMesh;
use crate::state::{Band, SolutionState};
use crate::transport::{BoundarySpec, Discretization};

/// g_s g_v/(2π)².
pub const DEGENERACY: f64 = 1.0 / (PI * PI);

const NM2_TO_M2: f64 = 1e18;
/// e/(nm·ps) in A/m.
const CURRENT_TO_SI: f64 = crate::physics::ELEMENTARY_CHARGE * 1e21;
const VELOCITY_TO_SI: f64 = 1e3;

/// Cell-integrated weights N̄, R̄, T̄.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentWeights {
    pub ne: usize,
    pub nt: usize,
    /// N̄_k = Δθ(ε²₊ − ε²₋)/(2(ħv_F)²), nm⁻².
    pub nbar: Vec<f64>,
    /// R̄_{k,n} = v_F(ε²₊ − ε²₋)(sin θ₊ − sin θ₋)/(2(ħv_F)²), nm⁻¹ps⁻¹.
    pub rbar: Vec<f64>,
    /// T̄_k = Δθ(ε³₊ − ε³₋)/(3(ħv_F)²), eV·nm⁻².
    pub tbar: Vec<f64>,
    /// Electron and hole densities (nm⁻²) below which mean values are not formed.
    pub guard: [f64; 2],
}

impl MomentWeights {
    pub fn new(mesh: &PolarMesh, vf: f64, hbar_vf: f64) -> Self {
        let h2 = hbar_vf * hbar_vf;
        let nbar = mesh.de2.iter().map(|d| mesh.dtheta * d / (2.0 * h2)).collect();
        let tbar = mesh.de3.iter().map(|d| mesh.dtheta * d / (3.0 * h2)).collect();
        let mut rbar = Vec::with_capacity(mesh.cells());
        for k in 0..mesh.ne {
            for n in 0..mesh.nt {
                rbar.push(vf * mesh.de2[k] * mesh.dsin[n] / (2.0 * h2));
            }
        }
        Self {
            ne: mesh.ne,
            nt: mesh.nt,
            nbar,
            rbar,
            tbar,
            guard: [0.0, 0.0],
        }
    }

    /// Sets the guards to 10⁻³ of the densities of the contact distribution.
    pub fn with_contact_guard(mut self, boundary: &BoundarySpec) -> Self {
        let occ = &boundary.left;
        let n = self.integrate(|k, _| occ[0][k]).density;
        let p = self.integrate(|k, _| 1.0 - occ[1][k]).density;
        self.guard = [1e-3 * n, 1e-3 * p];
        self
    }

    /// Density, flux and energy density of an occupancy (internal units).
    pub fn integrate(&self, occ: impl Fn(usize, usize) -> f64) -> Integrals {
        let mut out = Integrals::default();
        for k in 0..self.ne {
            let mut sn = 0.0;
            let mut sr = 0.0;
            for n in 0..self.nt {
                let f = occ(k, n);
                sn += f;
                sr += f * self.rbar[k * self.nt + n];
            }
            out.density += sn * self.nbar[k];
            out.flux += sr;
            out.energy += sn * self.tbar[k];
        }
        out.density *= DEGENERACY;
        out.flux *= DEGENERACY;
        out.energy *= DEGENERACY;
        out
    }
}

/// Raw sums (1/π²)Σ f N̄, (1/π²)Σ f R̄, (1/π²)Σ f T̄.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Integrals {
    pub density: f64,
    pub flux: f64,
    pub energy: f64,
}

/// Moments of one carrier type in SI units.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CarrierMoments {
    /// m⁻².
    pub density: f64,
    /// A/m.
    pub current: f64,
    /// eV·m⁻².
    pub energy_density: f64,
    /// m/s.
    pub velocity: f64,
    /// eV.
    pub energy: f64,
    /// Density below the guard; velocity and energy set to zero.
    pub flagged: bool,
}

impl CarrierMoments {
    /// `charge` is −1 for electrons and +1 for holes.
    fn from_integrals(s: Integrals, charge: f64, guard: f64) -> Self {
        let flagged = !(s.density > guard && s.density > 0.0);
        let (velocity, energy) = if flagged {
            (0.0, 0.0)
        } else {
            (s.flux / s.density * VELOCITY_TO_SI, s.energy / s.density)
        };
        Self {
            density: s.density * NM2_TO_M2,
            current: charge * s.flux * CURRENT_TO_SI,
            energy_density: s.energy * NM2_TO_M2,
            velocity,
            energy,
            flagged,
        }
    }
}

pub fn electron_moments(state: &SolutionState, weights: &MomentWeights, i: usize) -> CarrierMoments {
    let a = state.a_cell(Band::Conduction, i);
    let nt = weights.nt;
    let s = weights.integrate(|k, n| a[k * nt + n]);
    CarrierMoments::from_integrals(s, -1.0, weights.guard[0])
}

pub fn hole_moments(state: &SolutionState, weights: &MomentWeights, i: usize) -> CarrierMoments {
    let a = state.a_cell(Band::Valence, i);
    let nt = weights.nt;
    let s = weights.integrate(|k, n| 1.0 - a[k * nt + n]);
    CarrierMoments::from_integrals(s, 1.0, weights.guard[1])
}

pub fn total_current(electrons: &CarrierMoments, holes: &CarrierMoments) -> f64 {
    electrons.current - holes.current
}

/// One row of a moment profile.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentRow {
    /// Position in m.
    pub x: f64,
    pub electrons: CarrierMoments,
    pub holes: CarrierMoments,
    /// j_n − j_p in A/m.
    pub current: f64,
}

impl MomentRow {
    fn new(x_nm: f64, electrons: CarrierMoments, holes: CarrierMoments) -> Self {
        Self {
            x: x_nm * 1e-9,
            electrons,
            holes,
            current: total_current(&electrons, &holes),
        }
    }
}

/// Moments at every spatial cell plus the two contact points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MomentSet {
    pub cells: Vec<MomentRow>,
    pub left: MomentRow,
    pub right: MomentRow,
}

impl MomentSet {
    pub fn compute(state: &SolutionState, disc: &Discretization, weights: &MomentWeights) -> Self {
        let cells = (0..state.nx)
            .map(|i| {
                MomentRow::new(
                    disc.spatial.mids[i],
                    electron_moments(state, weights, i),
                    hole_moments(state, weights, i),
                )
            })
            .collect();
        let side = |right: bool| {
            let [e, h] = Band::ALL.map(|band| {
                let occ = |k: usize, n: usize| boundary_trace(state, disc, band, right, k, n);
                if band == Band::Conduction {
                    CarrierMoments::from_integrals(weights.integrate(occ), -1.0, weights.guard[0])
                } else {
                    CarrierMoments::from_integrals(
                        weights.integrate(|k, n| 1.0 - occ(k, n)),
                        1.0,
                        weights.guard[1],
                    )
                }
            });
            let x = if right { disc.spatial.length } else { 0.0 };
            MomentRow::new(x, e, h)
        };
        Self {
            cells,
            left: side(false),
            right: side(true),
        }
    }

    pub fn densities(&self) -> Vec<f64> {
        self.cells.iter().map(|r| r.electrons.density).collect()
    }
}

/// Exterior occupancy at a contact: inflow data on inflow cells, the
/// interior trace elsewhere.
pub fn boundary_trace(state: &SolutionState, disc: &Discretization, band: Band, right: bool, k: usize, n: usize) -> f64 {
    let p = &disc.polar;
    let s = band.index();
    if right {
        if BoundarySpec::inflow_right(p, band, n) {
            disc.boundary.right[s][k]
        } else {
            let (a, b) = state.get(band, state.nx - 1, k, n);
            a + b
        }
    } else if BoundarySpec::inflow_left(p, band, n) {
        disc.boundary.left[s][k]
    } else {
        let (a, b) = state.get(band, 0, k, n);
        a - b
    }
}

/// Electron and hole densities (nm⁻²) at the `N_x + 1` cell edges, each the
/// mean of the traces from both sides.
pub fn edge_densities(state: &SolutionState, disc: &Discretization, weights: &MomentWeights) -> (Vec<f64>, Vec<f64>) {
    let nx = state.nx;
    let nt = state.nt;
    let trace = |band: Band, i: usize, right_end: bool| {
        let a = state.a_cell(band, i);
        let b = state.b_cell(band, i);
        let sg = if right_end { 1.0 } else { -1.0 };
        let hole = band == Band::Valence;
        weights
            .integrate(|k, n| {
                let f = a[k * nt + n] + sg * b[k * nt + n];
                if hole {
                    1.0 - f
                } else {
                    f
                }
            })
            .density
    };
    let contact = |band: Band, right: bool| {
        let hole = band == Band::Valence;
        weights
            .integrate(|k, n| {
                let f = boundary_trace(state, disc, band, right, k, n);
                if hole {
                    1.0 - f
                } else {
                    f
                }
            })
            .density
    };
    let mut out = [Vec::with_capacity(nx + 1), Vec::with_capacity(nx + 1)];
    for band in Band::ALL {
        let v = &mut out[band.index()];
        for e in 0..=nx {
            let left = if e == 0 { contact(band, false) } else { trace(band, e - 1, true) };
            let right = if e == nx { contact(band, true) } else { trace(band, e, false) };
            v.push(0.5 * (left + right));
        }
    }
    let [n, p] = out;
    (n, p)
}
