//! Runs a configured case and writes its outputs.

use std::path::{Path, PathBuf};

use crate::assembly::norms::{l2_error, l2_error_mean_free, vector_l2_error};
use crate::cases::{BubbleHeight, CaseKind, MmsSolution};
use crate::diagnostics::{stability_verdict, ErrorLevel, StabilityMode, StabilityVerdict};
use crate::error::{Error, Result};
use crate::stepper::{EnergyReport, Simulation};

use super::csv::{bubble_table, dof_tables, energy_table};
use super::{write_file, write_vtk, RunConfig};

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub reports: Vec<EnergyReport>,
    pub verdict: StabilityVerdict,
    /// Right-wall interface height per step, Rayleigh–Taylor only.
    pub bubble: Vec<(f64, BubbleHeight)>,
    /// Errors at the final time, manufactured solution only.
    pub errors: Option<ErrorLevel>,
    pub files: Vec<PathBuf>,
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the case described by `cfg`, writing the resolved configuration,
/// the energy history, optional snapshots and case diagnostics into
/// `cfg.output`.
pub fn execute(cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let out = &cfg.output;
    create_dir(out)?;
    let mut files = Vec::new();
    let config_path = out.join("config.txt");
    write_file(&config_path, &cfg.render())?;
    files.push(config_path);

    let mut sim = Simulation::new(cfg.problem()?, cfg.scheme, cfg.grid()?, cfg.settings())?;
    log::info!(
        "{} with {} on {}x{}, dt = {}, {} steps",
        cfg.case,
        cfg.scheme,
        cfg.nx,
        cfg.ny,
        cfg.dt,
        sim.grid().steps()
    );
    let mut bubble = Vec::new();
    let mut snaps = Vec::new();
    let reports = sim.run(|state, report| {
        if cfg.case == CaseKind::RayleighTaylor {
            bubble.push((state.t, cfg.rt.bubble_height(&state.rho)));
        }
        if cfg.snapshot_every > 0 && state.step % cfg.snapshot_every == 0 {
            let path = out.join(format!("snapshot_{:06}.vtk", state.step));
            write_vtk(state, &path)?;
            snaps.push(path);
            if cfg.dump_dofs {
                let [vel, sc] = dof_tables(state);
                for (table, stem) in [(vel, "velocity"), (sc, "scalars")] {
                    let path = out.join(format!("{stem}_{:06}.csv", state.step));
                    table.write(&path)?;
                    snaps.push(path);
                }
            }
        }
        if report.step % 50 == 0 {
            log::info!("step {} t = {:.4} kinetic = {:.6e}", report.step, report.t, report.kinetic);
        }
        Ok(())
    })?;
    files.extend(snaps);

    let energy_path = out.join("energy.csv");
    energy_table(&reports).write(&energy_path)?;
    files.push(energy_path);
    if !bubble.is_empty() {
        let path = out.join("bubble_height.csv");
        bubble_table(&bubble).write(&path)?;
        files.push(path);
    }

    let errors = match cfg.case {
        CaseKind::Mms => {
            let st = sim.state();
            let (fe, t) = (sim.fe(), st.t);
            Some(ErrorLevel {
                n: cfg.nx,
                h: 1.0 / cfg.nx.max(cfg.ny) as f64,
                tau: cfg.dt,
                u: vector_l2_error(fe, &st.u, |x, y| MmsSolution::velocity(x, y, t))?,
                p: l2_error_mean_free(fe, &st.p, |x, y| MmsSolution::pressure(x, y, t))?,
                rho: l2_error(fe, &st.rho, |x, y| MmsSolution::density(x, y, t))?,
            })
        }
        _ => None,
    };
    let verdict = stability_verdict(&format!("{} {}", cfg.case, cfg.scheme), &reports, StabilityMode::Finite);
    Ok(RunSummary {
        reports,
        verdict,
        bubble,
        errors,
        files,
    })
}
