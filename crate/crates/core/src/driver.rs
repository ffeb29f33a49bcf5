//! Simulation driver: initialization, time stepping and output frames.

use alloc::vec;
use alloc::vec::Vec;

use crate::collision::{CollisionOperator, ScatteringTable};
use crate::error::{Error, Result};
use crate::limiter::{limit_coeffs, LimiterStats};
use crate::mesh::{PoissonGrid, PolarMesh, SpatialGrid};
use crate::moments::{edge_densities, MomentSet, MomentWeights};
use crate::physics::fermi_dirac;
use crate::poisson::{DielectricMap, Gates, PoissonBC, PoissonRHS, PoissonSystem, PotentialField};
use crate::scenario::{FieldMode, RunConfig};
use crate::state::{Band, SolutionState};
use crate::stepping::{compute_dt, ssp_rk3_step, Rk3Workspace};
use crate::transport::{BoundarySpec, Discretization, FluxBlend, Workspace};

/// Moments at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub index: usize,
    /// ps.
    pub time: f64,
    pub moments: MomentSet,
    /// E_x per cell in V/nm.
    pub field: Vec<f64>,
    /// max|n(t) − n(t − δ)|/max n relative to the previous frame.
    pub steady_metric: Option<f64>,
}

/// Result of [`run_scenario`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub frames: Vec<Frame>,
    pub state: SolutionState,
    pub potential: Option<PotentialField>,
    pub stats: LimiterStats,
    pub steps: u64,
}

impl RunOutput {
    pub fn last(&self) -> &Frame {
        self.frames.last().expect("at least the initial frame")
    }
}

/// A configured simulation and its current state.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: RunConfig,
    pub disc: Discretization,
    pub weights: MomentWeights,
    pub table: ScatteringTable,
    pub poisson: Option<PoissonSystem>,
    pub state: SolutionState,
    pub field: Vec<f64>,
    pub potential: Option<PotentialField>,
    pub stats: LimiterStats,
    pub steps: u64,
    ws: Workspace,
    rk: Rk3Workspace,
    scratch: SolutionState,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let m = &config.mesh;
        let spatial = SpatialGrid::new(config.geometry.length, m.nx)?;
        let polar = PolarMesh::new(m.e_max, m.ne, m.nt)?;
        let phys = &config.physics;
        let table = ScatteringTable::build(&polar, phys, config.substrate)?;
        let collision = config.collisions.then(|| CollisionOperator::new(&table, &polar));
        let t = phys.temperature_k;
        let boundary = BoundarySpec::fermi_dirac(&polar, config.contact_fermi_level, config.contact_fermi_level, t);
        let weights = MomentWeights::new(&polar, phys.vf(), phys.hbar_vf()).with_contact_guard(&boundary);

        let poisson = match config.field {
            FieldMode::Frozen(_) => None,
            FieldMode::Coupled => {
                let g = &config.geometry;
                let grid = PoissonGrid::new(&spatial, g.height, m.ny, g.graphene_y)?;
                let dielectric = DielectricMap {
                    graphene: config.eps_graphene,
                    oxide: config.eps_oxide,
                    strip_bottom: g.strip_bottom,
                    strip_top: g.strip_top,
                };
                let bc = PoissonBC {
                    left: 0.0,
                    right: config.voltages.bias,
                    gates: config.gates.then(|| Gates {
                        start: g.gate_start,
                        end: g.gate_end,
                        top: config.voltages.gate_top,
                        bottom: config.voltages.gate_bottom,
                    }),
                };
                Some(PoissonSystem::new(grid, dielectric, bc)?)
            }
        };

        let disc = Discretization::new(
            spatial,
            polar,
            phys.vf(),
            phys.hbar_vf(),
            FluxBlend::new(config.eta)?,
            boundary,
            collision,
        )?;

        let mut state = disc.zero_state();
        for band in Band::ALL {
            for k in 0..m.ne {
                let f = fermi_dirac(disc.polar.e_mids[k], config.initial_fermi_level, band, t);
                for i in 0..m.nx {
                    for n in 0..m.nt {
                        state.set(band, i, k, n, f, 0.0);
                    }
                }
            }
        }
        let ws = disc.workspace();
        let rk = Rk3Workspace::new(state.coeffs.len());
        let scratch = state.clone();
        let field = match config.field {
            FieldMode::Frozen(e) => vec![e; m.nx],
            FieldMode::Coupled => vec![0.0; m.nx],
        };
        let mut sim = Self {
            config,
            disc,
            weights,
            table,
            poisson,
            state,
            field,
            potential: None,
            stats: LimiterStats::default(),
            steps: 0,
            ws,
            rk,
            scratch,
        };
        sim.refresh_field()?;
        Ok(sim)
    }

    /// Re-solves the field for the current state in coupled mode.
    pub fn refresh_field(&mut self) -> Result<()> {
        if let Some(p) = &self.poisson {
            let pot = solve_field(p, &self.config, &self.state, &self.disc, &self.weights)?;
            self.field.copy_from_slice(&pot.ex);
            self.potential = Some(pot);
        }
        Ok(())
    }

    /// CFL step for the current field.
    pub fn dt(&self) -> f64 {
        let max_field = self.field.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        compute_dt(&self.disc.spatial, &self.disc.polar, max_field, self.disc.vf, self.config.cfl)
    }

    pub fn moments(&self) -> MomentSet {
        MomentSet::compute(&self.state, &self.disc, &self.weights)
    }

    /// One SSP-RK3 step of length `dt`; the field is current on entry and exit.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let Self {
            config,
            disc,
            weights,
            poisson,
            state,
            field,
            stats,
            ws,
            rk,
            scratch,
            ..
        } = self;
        let time = state.time;
        let dims = SolutionState {
            nx: state.nx,
            ne: state.ne,
            nt: state.nt,
            time,
            coeffs: Vec::new(),
        };
        let coupled = poisson.as_ref();
        ssp_rk3_step(
            &mut state.coeffs,
            dt,
            rk,
            |stage, u, du| {
                if let (Some(p), true) = (coupled, stage > 0) {
                    scratch.coeffs.copy_from_slice(u);
                    let pot = solve_field(p, config, scratch, disc, weights)?;
                    field.copy_from_slice(&pot.ex);
                }
                disc.rhs(u, field, du, ws);
                Ok(())
            },
            |stage, u| {
                if let Some(bad) = u.iter().position(|v| !v.is_finite()) {
                    let (slope, band, cell, k, n) = dims.locate(bad);
                    return Err(Error::NonFinite {
                        stage,
                        time,
                        coefficient: if slope { 'b' } else { 'a' },
                        band: band.index(),
                        cell,
                        k,
                        n,
                    });
                }
                limit_coeffs(u, stats);
                Ok(())
            },
        )?;
        self.state.time += dt;
        self.steps += 1;
        self.refresh_field()
    }

    fn frame(&self, index: usize, previous: Option<&Frame>) -> Frame {
        let moments = self.moments();
        let steady_metric = previous.map(|p| steady_metric(&p.moments, &moments));
        Frame {
            index,
            time: self.state.time,
            moments,
            field: self.field.clone(),
            steady_metric,
        }
    }

    /// Advances to `t_end`, emitting a frame every `frame_interval`.
    pub fn run(mut self, mut observer: impl FnMut(&Frame)) -> Result<RunOutput> {
        let t_end = self.config.t_end;
        let cadence = self.config.frame_interval;
        let mut frames: Vec<Frame> = Vec::new();
        let first = self.frame(0, None);
        observer(&first);
        frames.push(first);
        let frozen_dt = self.dt();
        let coupled = self.poisson.is_some();
        let mut index = 0usize;
        while self.state.time < t_end - 1e-12 {
            index += 1;
            let target = (index as f64 * cadence).min(t_end);
            while self.state.time < target - 1e-12 {
                let dt = if coupled { self.dt() } else { frozen_dt };
                let dt = dt.min(target - self.state.time);
                self.step(dt)?;
            }
            self.state.time = target;
            let f = self.frame(index, frames.last());
            observer(&f);
            frames.push(f);
        }
        Ok(RunOutput {
            frames,
            state: self.state,
            potential: self.potential,
            stats: self.stats,
            steps: self.steps,
        })
    }
}

fn solve_field(
    p: &PoissonSystem,
    config: &RunConfig,
    state: &SolutionState,
    disc: &Discretization,
    weights: &MomentWeights,
) -> Result<PotentialField> {
    let (n, h) = edge_densities(state, disc, weights);
    let rhs = PoissonRHS::from_edge_densities(
        &p.grid,
        &p.dielectric,
        config.geometry.thickness,
        config.doping,
        &n,
        &h,
    );
    p.solve(&rhs)
}

/// max_i |n_i − n'_i| / max_i n_i between two frames.
pub fn steady_metric(previous: &MomentSet, current: &MomentSet) -> f64 {
    let mut diff = 0.0f64;
    let mut max = 0.0f64;
    for (a, b) in previous.cells.iter().zip(&current.cells) {
        diff = diff.max((a.electrons.density - b.electrons.density).abs());
        max = max.max(b.electrons.density);
    }
    if max > 0.0 {
        diff / max
    } else {
        diff
    }
}

/// Runs a configuration to its end time.
pub fn run_scenario(config: RunConfig) -> Result<RunOutput> {
    Simulation::new(config)?.run(|_| {})
}
