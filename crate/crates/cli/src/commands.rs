use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use graphene_dg_core::collision::ScatteringTable;
use graphene_dg_core::convergence::{profiles_of, Axis, ConvergenceReport};
use graphene_dg_core::driver::Simulation;
use graphene_dg_core::mesh::PolarMesh;
use graphene_dg_core::scenario::RunConfig;

use crate::config::{self, FileConfig};
use crate::export;

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub scenario: Option<String>,
    pub out: PathBuf,
    pub frozen_field: Option<f64>,
    pub quiet: bool,
}

fn resolve(opts: &Options, study: Option<Axis>) -> Result<(RunConfig, Vec<usize>)> {
    let file = match &opts.config {
        Some(p) => config::load(p)?,
        None => FileConfig::default(),
    };
    config::resolve(&file, opts.scenario.as_deref(), opts.frozen_field, study)
}

fn core_err(e: graphene_dg_core::Error) -> anyhow::Error {
    anyhow!("{e}")
}

fn prepare(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

pub fn run(opts: &Options) -> Result<()> {
    let (config, _) = resolve(opts, None)?;
    prepare(&opts.out)?;
    let sim = Simulation::new(config.clone()).map_err(core_err)?;
    let polar = sim.disc.polar.clone();
    let grid = sim.poisson.as_ref().map(|p| (p.grid.nx, p.grid.ny, p.grid.dx, p.grid.dy));
    let quiet = opts.quiet;
    let output = sim
        .run(|f| {
            if !quiet {
                let metric = f.steady_metric.map(|m| format!("{m:.3e}")).unwrap_or_else(|| "-".into());
                eprintln!("t = {:.4} ps  steady = {metric}", f.time);
            }
        })
        .map_err(core_err)?;
    export::write_frames(&opts.out, &output.frames)?;
    export::write_snapshots(&opts.out, &output.state, &polar)?;
    if let (Some(pot), Some((nx, ny, dx, dy))) = (&output.potential, grid) {
        std::fs::write(opts.out.join("phi.csv"), export::phi_csv(pot, nx, ny, dx, dy))
            .context("writing phi.csv")?;
    }
    let meta = export::meta_text(&config, &[], &export::run_summary(&output))?;
    std::fs::write(opts.out.join("meta.txt"), meta).context("writing meta.txt")?;
    Ok(())
}

pub fn converge(opts: &Options, axis: Axis) -> Result<()> {
    let (base, levels) = resolve(opts, Some(axis))?;
    if levels.len() < 2 {
        return Err(anyhow!("a convergence study needs at least two levels"));
    }
    prepare(&opts.out)?;
    let mut profiles = Vec::new();
    let mut dx = Vec::new();
    for &size in &levels {
        let c = axis.refine(&base, size);
        if !opts.quiet {
            eprintln!("{} = {size}: N_x {}, N_eps {}, N_theta {}", axis.name(), c.mesh.nx, c.mesh.ne, c.mesh.nt);
        }
        dx.push(c.geometry.length * 1e-9 / c.mesh.nx as f64);
        let out = Simulation::new(c).and_then(|s| s.run(|_| {})).map_err(core_err)?;
        profiles.push(profiles_of(&out));
    }
    let report = ConvergenceReport::from_profiles(axis, &levels, &profiles, &dx).map_err(core_err)?;
    std::fs::write(opts.out.join("report.csv"), export::report_csv(&report)).context("writing report.csv")?;
    let summary = [("axis", axis.name().to_string())];
    let meta = export::meta_text(&base, &levels, &summary)?;
    std::fs::write(opts.out.join("meta.txt"), meta).context("writing meta.txt")?;
    Ok(())
}

pub fn dump_tables(opts: &Options) -> Result<()> {
    let (config, _) = resolve(opts, None)?;
    prepare(&opts.out)?;
    let m = &config.mesh;
    let polar = PolarMesh::new(m.e_max, m.ne, m.nt).map_err(core_err)?;
    let table = ScatteringTable::build(&polar, &config.physics, config.substrate).map_err(core_err)?;
    export::write_tables(&opts.out, &table)?;
    let meta = export::meta_text(&config, &[], &[])?;
    std::fs::write(opts.out.join("meta.txt"), meta).context("writing meta.txt")?;
    Ok(())
}
