//! CSV and metadata files written by the command-line driver.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use graphene_dg_core::collision::ScatteringTable;
use graphene_dg_core::convergence::ConvergenceReport;
use graphene_dg_core::driver::{Frame, RunOutput};
use graphene_dg_core::mesh::PolarMesh;
use graphene_dg_core::moments::MomentRow;
use graphene_dg_core::poisson::PotentialField;
use graphene_dg_core::scenario::RunConfig;
use graphene_dg_core::{Band, SolutionState};

use crate::config::{echo, FileConfig};

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

const FRAME_HEADER: &str = "x_m,n_m2,p_m2,j_n_A_m,j_p_A_m,j_tot_A_m,v_n_m_s,v_p_m_s,\
energy_n_eV,energy_p_eV,energy_density_n_eV_m2,energy_density_p_eV_m2,ex_V_nm,flag_n,flag_p";

fn moment_line(out: &mut String, row: &MomentRow, ex: f64) {
    let (e, h) = (&row.electrons, &row.holes);
    let _ = writeln!(
        out,
        "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
        row.x,
        e.density,
        h.density,
        e.current,
        h.current,
        row.current,
        e.velocity,
        h.velocity,
        e.energy,
        h.energy,
        e.energy_density,
        h.energy_density,
        ex,
        u8::from(e.flagged),
        u8::from(h.flagged),
    );
}

/// One frame as CSV: the left contact, every cell, then the right contact.
/// Contact rows repeat the field of the adjacent cell.
pub fn frame_csv(frame: &Frame) -> String {
    let m = &frame.moments;
    let mut out = String::from(FRAME_HEADER);
    out.push('\n');
    let first = frame.field.first().copied().unwrap_or(0.0);
    let last = frame.field.last().copied().unwrap_or(0.0);
    moment_line(&mut out, &m.left, first);
    for (row, ex) in m.cells.iter().zip(&frame.field) {
        moment_line(&mut out, row, *ex);
    }
    moment_line(&mut out, &m.right, last);
    out
}

/// Writes `frames/NNNN.csv` and `frames/index.csv`; nothing for an empty series.
pub fn write_frames(dir: &Path, frames: &[Frame]) -> Result<()> {
    if frames.is_empty() {
        return Ok(());
    }
    let dir = dir.join("frames");
    create_dir(&dir)?;
    let mut index = String::from("frame,time_ps,steady_metric\n");
    for f in frames {
        write(&dir.join(format!("{:04}.csv", f.index)), &frame_csv(f))?;
        let metric = f.steady_metric.map(|m| format!("{m:e}")).unwrap_or_default();
        let _ = writeln!(index, "{},{:e},{}", f.index, f.time, metric);
    }
    write(&dir.join("index.csv"), &index)
}

/// Cells sampled for distribution snapshots: first, nearest to L/2, last.
pub fn snapshot_cells(nx: usize) -> [(&'static str, usize); 3] {
    [("first", 0), ("middle", nx / 2), ("last", nx - 1)]
}

pub fn snapshot_csv(state: &SolutionState, polar: &PolarMesh, band: Band, i: usize) -> String {
    let mut out = String::from("k,n,energy_eV,theta_rad,a,b\n");
    for k in 0..state.ne {
        for n in 0..state.nt {
            let (a, b) = state.get(band, i, k, n);
            let _ = writeln!(out, "{k},{n},{:e},{:e},{:e},{:e}", polar.e_mids[k], polar.t_mids[n], a, b);
        }
    }
    out
}

/// Writes `snapshot_{band}_{pos}.csv` for both bands at the three sample cells.
pub fn write_snapshots(dir: &Path, state: &SolutionState, polar: &PolarMesh) -> Result<()> {
    for band in Band::ALL {
        for (pos, i) in snapshot_cells(state.nx) {
            let path = dir.join(format!("snapshot_{}_{pos}.csv", band.name()));
            write(&path, &snapshot_csv(state, polar, band, i))?;
        }
    }
    Ok(())
}

/// Node potentials as `i,j,x_nm,y_nm,phi_V`.
pub fn phi_csv(field: &PotentialField, nx: usize, ny: usize, dx: f64, dy: f64) -> String {
    let mut out = String::from("i,j,x_nm,y_nm,phi_V\n");
    for i in 0..=nx {
        for j in 0..=ny {
            let v = field.phi[i * (ny + 1) + j];
            let _ = writeln!(out, "{i},{j},{:e},{:e},{:e}", i as f64 * dx, j as f64 * dy, v);
        }
    }
    out
}

pub fn report_csv(report: &ConvergenceReport) -> String {
    const NORMS: [&str; 3] = ["L1", "L2", "Linf"];
    let mut out = String::from("quantity,norm,coarse,fine,error,rate,slope\n");
    for q in &report.quantities {
        for (p, norm) in NORMS.iter().enumerate() {
            for (l, e) in q.errors.iter().enumerate() {
                let rate = if l == 0 {
                    String::new()
                } else {
                    format!("{:e}", q.rates[l - 1][p])
                };
                let _ = writeln!(
                    out,
                    "{},{norm},{},{},{:e},{rate},{:e}",
                    q.name,
                    report.levels[l],
                    report.levels[l + 1],
                    e[p],
                    q.order[p]
                );
            }
        }
    }
    out
}

/// `meta.txt`: a loadable echo of every resolved parameter, preceded by
/// `# key = value` summary lines.
pub fn meta_text(config: &RunConfig, levels: &[usize], summary: &[(&str, String)]) -> Result<String> {
    let mut out = String::new();
    for (k, v) in summary {
        let _ = writeln!(out, "# {k} = {v}");
    }
    let file: FileConfig = echo(config, levels);
    out.push_str(&toml::to_string(&file)?);
    Ok(out)
}

pub fn run_summary(output: &RunOutput) -> Vec<(&'static str, String)> {
    let last = output.last();
    vec![
        ("final_time_ps", format!("{:e}", last.time)),
        ("steps", output.steps.to_string()),
        ("frames", output.frames.len().to_string()),
        (
            "final_steady_metric",
            last.steady_metric.map(|m| format!("{m:e}")).unwrap_or_else(|| "none".into()),
        ),
        ("limiter_clamps", output.stats.clamps.to_string()),
        ("min_endpoint", format!("{:e}", output.stats.min_endpoint)),
        ("max_endpoint", format!("{:e}", output.stats.max_endpoint)),
    ]
}

/// Writes the factored scattering table: energy blocks, angular weights and
/// the impurity kernel.
pub fn write_tables(dir: &Path, table: &ScatteringTable) -> Result<()> {
    let mut blocks = String::from("mechanism,from,to,k,kp,value\n");
    for (name, from, to, k, kp, v) in table.block_rows() {
        let _ = writeln!(blocks, "{name},{},{},{k},{kp},{v:e}", from.name(), to.name());
    }
    write(&dir.join("blocks.csv"), &blocks)?;
    let mut angular = String::from("mechanism,dn,weight\n");
    for m in &table.mechanisms {
        for (dn, w) in m.angular.iter().enumerate() {
            let _ = writeln!(angular, "{},{dn},{w:e}", m.spec.kind.name());
        }
    }
    write(&dir.join("angular.csv"), &angular)?;
    if let Some(kernel) = &table.impurity {
        let mut out = String::from("k,dn,value\n");
        for k in 0..table.ne {
            for dn in 0..table.nt {
                let _ = writeln!(out, "{k},{dn},{:e}", kernel[k * table.nt + dn]);
            }
        }
        write(&dir.join("impurity.csv"), &out)?;
    }
    Ok(())
}
