//! TOML run configuration layered over the built-in presets.

use anyhow::{bail, Context, Result};
use graphene_dg_core::convergence::Axis;
use graphene_dg_core::physics::{PhysicalParams, Screening, SubstrateParams};
use graphene_dg_core::scenario::{FieldMode, RunConfig, ScenarioKind};
use serde::{Deserialize, Serialize};

/// Contents of a configuration file. Every key is optional; missing keys
/// keep the preset value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<String>,
    pub field: Option<FieldSection>,
    pub geometry: Option<GeometrySection>,
    pub mesh: Option<MeshSection>,
    pub physics: Option<PhysicsSection>,
    pub substrate: Option<SubstrateSection>,
    pub voltages: Option<VoltageSection>,
    pub run: Option<RunSection>,
    pub convergence: Option<ConvergenceSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    /// "frozen" or "coupled".
    pub mode: Option<String>,
    /// Frozen field strength in V/μm; positive values push electrons toward x = L.
    pub strength: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub length: Option<f64>,
    pub height: Option<f64>,
    pub gate_start: Option<f64>,
    pub gate_end: Option<f64>,
    pub strip_bottom: Option<f64>,
    pub strip_top: Option<f64>,
    pub graphene_y: Option<f64>,
    pub thickness: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub nx: Option<usize>,
    pub ne: Option<usize>,
    pub nt: Option<usize>,
    pub e_max: Option<f64>,
    pub ny: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub fermi_velocity_cm_s: Option<f64>,
    pub areal_mass_density_g_cm2: Option<f64>,
    pub optical_phonon_energy_ev: Option<f64>,
    pub k_phonon_energy_ev: Option<f64>,
    pub sound_velocity_cm_s: Option<f64>,
    pub acoustic_deformation_ev: Option<f64>,
    pub optical_coupling_ev_cm: Option<f64>,
    pub k_coupling_ev_cm: Option<f64>,
    pub temperature_k: Option<f64>,
    pub screening_fermi_level_ev: Option<f64>,
    pub screening_fallback_density_nm2: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstrateSection {
    pub enabled: Option<bool>,
    pub phonon_energy_ev: Option<f64>,
    pub phonon_coupling_ev_cm: Option<f64>,
    pub impurity_density_cm2: Option<f64>,
    pub impurity_distance_nm: Option<f64>,
    pub kappa_top: Option<f64>,
    pub kappa_bottom: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoltageSection {
    pub bias: Option<f64>,
    pub gate_top: Option<f64>,
    pub gate_bottom: Option<f64>,
    pub gates: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub t_end: Option<f64>,
    pub frame_interval: Option<f64>,
    pub cfl: Option<f64>,
    pub eta: Option<f64>,
    pub collisions: Option<bool>,
    pub contact_fermi_level: Option<f64>,
    pub initial_fermi_level: Option<f64>,
    pub eps_graphene: Option<f64>,
    pub eps_oxide: Option<f64>,
    pub doping: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    pub levels: Option<Vec<usize>>,
}

pub fn load(path: &std::path::Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse(text: &str) -> Result<FileConfig> {
    Ok(toml::from_str(text)?)
}

pub fn preset(name: &str) -> Result<RunConfig> {
    Ok(match name {
        "suspended" => RunConfig::suspended(1.0),
        "gfet" => RunConfig::gfet(),
        "custom" => RunConfig {
            scenario: ScenarioKind::Custom,
            ..RunConfig::suspended(1.0)
        },
        other => bail!("unknown scenario {other:?}; expected suspended, gfet or custom"),
    })
}

/// Mesh sizes held fixed while refining along `axis`, and the default levels.
pub fn study_defaults(axis: Axis) -> ((usize, usize, usize), Vec<usize>) {
    match axis {
        Axis::X => ((40, 80, 32), vec![40, 80, 160]),
        Axis::Energy => ((40, 40, 32), vec![40, 80, 160]),
        Axis::Angle => ((40, 40, 32), vec![32, 64, 128]),
    }
}

macro_rules! take {
    ($section:expr => $target:expr; $($field:ident),+) => {
        if let Some(s) = &$section {
            $(if let Some(v) = s.$field { $target.$field = v; })+
        }
    };
}

/// Resolved configuration: preset, then study companions, then the file,
/// then command-line overrides.
pub fn resolve(
    file: &FileConfig,
    scenario: Option<&str>,
    frozen_field: Option<f64>,
    study: Option<Axis>,
) -> Result<(RunConfig, Vec<usize>)> {
    let name = scenario.or(file.scenario.as_deref()).unwrap_or("suspended");
    let mut c = preset(name)?;
    let mut levels = Vec::new();
    if let Some(axis) = study {
        let ((nx, ne, nt), l) = study_defaults(axis);
        c = c.with_mesh(nx, ne, nt);
        levels = l;
    }

    if let Some(f) = &file.field {
        match f.mode.as_deref() {
            None => {}
            Some("frozen") => {
                if c.field == FieldMode::Coupled {
                    c.field = FieldMode::Frozen(0.0);
                }
            }
            Some("coupled") => c.field = FieldMode::Coupled,
            Some(other) => bail!("unknown field mode {other:?}; expected frozen or coupled"),
        }
        if let Some(s) = f.strength {
            if c.field == FieldMode::Coupled {
                bail!("a field strength only applies to the frozen field mode");
            }
            c.field = FieldMode::Frozen(-s * 1e-3);
        }
    }
    take!(file.geometry => c.geometry; length, height, gate_start, gate_end, strip_bottom, strip_top, graphene_y, thickness);
    take!(file.mesh => c.mesh; nx, ne, nt, e_max, ny);
    take!(file.physics => c.physics; fermi_velocity_cm_s, areal_mass_density_g_cm2, optical_phonon_energy_ev,
        k_phonon_energy_ev, sound_velocity_cm_s, acoustic_deformation_ev, optical_coupling_ev_cm,
        k_coupling_ev_cm, temperature_k);
    if let Some(p) = &file.physics {
        if let Some(v) = p.screening_fermi_level_ev {
            c.physics.screening.fermi_level_ev = v;
        }
        if let Some(v) = p.screening_fallback_density_nm2 {
            c.physics.screening.fallback_density_nm2 = Some(v);
        }
    }
    if let Some(s) = &file.substrate {
        if let Some(on) = s.enabled {
            c.substrate = on;
        }
        let sub = c.physics.substrate.get_or_insert_with(SubstrateParams::default);
        take!(file.substrate => sub; phonon_energy_ev, phonon_coupling_ev_cm, impurity_density_cm2,
            impurity_distance_nm, kappa_top, kappa_bottom);
    }
    take!(file.voltages => c.voltages; bias, gate_top, gate_bottom);
    if let Some(v) = file.voltages.as_ref().and_then(|v| v.gates) {
        c.gates = v;
    }
    take!(file.run => c; t_end, frame_interval, cfl, eta, collisions, contact_fermi_level,
        initial_fermi_level, eps_graphene, eps_oxide, doping);
    if let Some(l) = file.convergence.as_ref().and_then(|c| c.levels.clone()) {
        levels = l;
    }

    if let Some(v) = frozen_field {
        c.field = FieldMode::Frozen(-v * 1e-3);
    }
    c.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok((c, levels))
}

/// Fully populated file form of a resolved configuration.
pub fn echo(c: &RunConfig, levels: &[usize]) -> FileConfig {
    let p: &PhysicalParams = &c.physics;
    let Screening {
        fermi_level_ev,
        fallback_density_nm2,
    } = p.screening.clone();
    let g = &c.geometry;
    let sub = p.substrate.clone();
    FileConfig {
        scenario: Some(c.scenario.name().to_string()),
        field: Some(match c.field {
            FieldMode::Frozen(e) => FieldSection {
                mode: Some("frozen".into()),
                strength: Some(-e * 1e3),
            },
            FieldMode::Coupled => FieldSection {
                mode: Some("coupled".into()),
                strength: None,
            },
        }),
        geometry: Some(GeometrySection {
            length: Some(g.length),
            height: Some(g.height),
            gate_start: Some(g.gate_start),
            gate_end: Some(g.gate_end),
            strip_bottom: Some(g.strip_bottom),
            strip_top: Some(g.strip_top),
            graphene_y: Some(g.graphene_y),
            thickness: Some(g.thickness),
        }),
        mesh: Some(MeshSection {
            nx: Some(c.mesh.nx),
            ne: Some(c.mesh.ne),
            nt: Some(c.mesh.nt),
            e_max: Some(c.mesh.e_max),
            ny: Some(c.mesh.ny),
        }),
        physics: Some(PhysicsSection {
            fermi_velocity_cm_s: Some(p.fermi_velocity_cm_s),
            areal_mass_density_g_cm2: Some(p.areal_mass_density_g_cm2),
            optical_phonon_energy_ev: Some(p.optical_phonon_energy_ev),
            k_phonon_energy_ev: Some(p.k_phonon_energy_ev),
            sound_velocity_cm_s: Some(p.sound_velocity_cm_s),
            acoustic_deformation_ev: Some(p.acoustic_deformation_ev),
            optical_coupling_ev_cm: Some(p.optical_coupling_ev_cm),
            k_coupling_ev_cm: Some(p.k_coupling_ev_cm),
            temperature_k: Some(p.temperature_k),
            screening_fermi_level_ev: Some(fermi_level_ev),
            screening_fallback_density_nm2: fallback_density_nm2,
        }),
        substrate: Some(SubstrateSection {
            enabled: Some(c.substrate),
            phonon_energy_ev: sub.as_ref().map(|s| s.phonon_energy_ev),
            phonon_coupling_ev_cm: sub.as_ref().map(|s| s.phonon_coupling_ev_cm),
            impurity_density_cm2: sub.as_ref().map(|s| s.impurity_density_cm2),
            impurity_distance_nm: sub.as_ref().map(|s| s.impurity_distance_nm),
            kappa_top: sub.as_ref().map(|s| s.kappa_top),
            kappa_bottom: sub.as_ref().map(|s| s.kappa_bottom),
        }),
        voltages: Some(VoltageSection {
            bias: Some(c.voltages.bias),
            gate_top: Some(c.voltages.gate_top),
            gate_bottom: Some(c.voltages.gate_bottom),
            gates: Some(c.gates),
        }),
        run: Some(RunSection {
            t_end: Some(c.t_end),
            frame_interval: Some(c.frame_interval),
            cfl: Some(c.cfl),
            eta: Some(c.eta),
            collisions: Some(c.collisions),
            contact_fermi_level: Some(c.contact_fermi_level),
            initial_fermi_level: Some(c.initial_fermi_level),
            eps_graphene: Some(c.eps_graphene),
            eps_oxide: Some(c.eps_oxide),
            doping: Some(c.doping),
        }),
        convergence: (!levels.is_empty()).then(|| ConvergenceSection {
            levels: Some(levels.to_vec()),
        }),
    }
}
