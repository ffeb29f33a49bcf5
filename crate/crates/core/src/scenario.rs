//! Run configuration and the two device presets.

use alloc::format;

use crate::error::{config, Result};
use crate::physics::PhysicalParams;
use crate::transport::FluxBlend;

/// CFL number used when a configuration does not set one.
pub const DEFAULT_CFL: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Suspended,
    Gfet,
    Custom,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Suspended => "suspended",
            ScenarioKind::Gfet => "gfet",
            ScenarioKind::Custom => "custom",
        }
    }
}

/// Source of the longitudinal field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldMode {
    /// Uniform E_x in V/nm.
    Frozen(f64),
    /// E_x from the Poisson solve at every stage.
    Coupled,
}

/// Device cross-section, lengths in nm.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub length: f64,
    pub height: f64,
    pub gate_start: f64,
    pub gate_end: f64,
    pub strip_bottom: f64,
    pub strip_top: f64,
    pub graphene_y: f64,
    /// Thickness over which the sheet charge is spread.
    pub thickness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshConfig {
    pub nx: usize,
    pub ne: usize,
    pub nt: usize,
    /// Energy cap in eV.
    pub e_max: f64,
    /// Vertical intervals of the Poisson grid.
    pub ny: usize,
}

/// Electrode potentials in V.
#[derive(Debug, Clone, PartialEq)]
pub struct Voltages {
    pub bias: f64,
    pub gate_top: f64,
    pub gate_bottom: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub geometry: Geometry,
    pub mesh: MeshConfig,
    pub physics: PhysicalParams,
    pub substrate: bool,
    pub collisions: bool,
    pub field: FieldMode,
    pub voltages: Voltages,
    pub gates: bool,
    /// Fermi level of the inflow distribution at both contacts (eV).
    pub contact_fermi_level: f64,
    /// Fermi level of the initial distribution (eV).
    pub initial_fermi_level: f64,
    pub eps_graphene: f64,
    pub eps_oxide: f64,
    /// Fixed sheet charge density in the Poisson source (nm⁻²).
    pub doping: f64,
    pub eta: f64,
    pub cfl: f64,
    /// Final time in ps.
    pub t_end: f64,
    /// Time between output frames in ps.
    pub frame_interval: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            length: 100.0,
            height: 21.0,
            gate_start: 25.0,
            gate_end: 75.0,
            strip_bottom: 10.0,
            strip_top: 11.0,
            graphene_y: 10.5,
            thickness: 1.0,
        }
    }
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            nx: 80,
            ne: 100,
            nt: 32,
            e_max: 1.2,
            ny: 22,
        }
    }
}

impl RunConfig {
    /// Suspended sheet under a frozen field of `field_v_per_um` V/μm pushing
    /// electrons toward x = L.
    pub fn suspended(field_v_per_um: f64) -> Self {
        Self {
            scenario: ScenarioKind::Suspended,
            geometry: Geometry::default(),
            mesh: MeshConfig::default(),
            physics: PhysicalParams::default(),
            substrate: false,
            collisions: true,
            field: FieldMode::Frozen(-field_v_per_um * 1e-3),
            voltages: Voltages {
                bias: 0.0,
                gate_top: 0.0,
                gate_bottom: 0.0,
            },
            gates: false,
            contact_fermi_level: 0.25,
            initial_fermi_level: 0.0,
            eps_graphene: 3.3,
            eps_oxide: 3.6,
            doping: 2.5e-3,
            eta: 0.0,
            cfl: DEFAULT_CFL,
            t_end: 1.0,
            frame_interval: 0.01,
        }
    }

    /// Graphene transistor with top and bottom gates and a self-consistent field.
    pub fn gfet() -> Self {
        Self {
            scenario: ScenarioKind::Gfet,
            substrate: true,
            field: FieldMode::Coupled,
            voltages: Voltages {
                bias: 0.1,
                gate_top: 0.4,
                gate_bottom: 0.4,
            },
            gates: true,
            t_end: 0.5,
            ..Self::suspended(0.0)
        }
    }

    pub fn with_mesh(mut self, nx: usize, ne: usize, nt: usize) -> Self {
        self.mesh.nx = nx;
        self.mesh.ne = ne;
        self.mesh.nt = nt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.physics.validate()?;
        FluxBlend::new(self.eta)?;
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(config(format!("CFL must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(config(format!("end time must be non-negative, got {}", self.t_end)));
        }
        if !(self.frame_interval > 0.0) {
            return Err(config("frame interval must be positive"));
        }
        if let FieldMode::Frozen(e) = self.field {
            if !e.is_finite() {
                return Err(config("frozen field must be finite"));
            }
        }
        if self.substrate && self.physics.substrate.is_none() {
            return Err(config("substrate enabled without substrate parameters"));
        }
        let g = &self.geometry;
        if self.field == FieldMode::Coupled {
            if !(g.thickness > 0.0) {
                return Err(config("sheet thickness must be positive"));
            }
            if !(0.0 <= g.strip_bottom && g.strip_bottom <= g.strip_top && g.strip_top <= g.height) {
                return Err(config("graphene strip must lie inside the device height"));
            }
            if !(self.eps_graphene > 0.0 && self.eps_oxide > 0.0) {
                return Err(config("permittivities must be positive"));
            }
        }
        Ok(())
    }
}
