//! Legacy ASCII VTK snapshots on the mesh vertices.

use std::fmt::Write as _;
use std::path::Path;

use crate::assembly::Field;
use crate::error::{Error, Result};
use crate::stepper::SimState;

pub const HEADER: &str = "# vtk DataFile Version 3.0";

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn vertex_values(field: &Field) -> impl Iterator<Item = f64> + '_ {
    let space = field.space();
    (0..space.mesh().num_vertices()).map(move |v| field.values()[space.vertex_dof(v)])
}

/// The VTK text of `state`: density, pressure, velocity and kinematic
/// viscosity at the vertices, x fastest.
pub fn render_vtk(state: &SimState) -> Result<String> {
    let mesh = state.rho.space().mesh().clone();
    for f in [&state.p, &state.nu, &state.u[0], &state.u[1]] {
        if !f.space().same_mesh(state.rho.space()) {
            return Err(Error::InvalidState("snapshot fields live on different meshes".into()));
        }
    }
    let n = mesh.num_vertices();
    let mut s = String::new();
    let w = &mut s;
    let e = "writing to a string";
    writeln!(w, "{HEADER}").expect(e);
    writeln!(w, "step {} t {}", state.step, real(state.t)).expect(e);
    writeln!(w, "ASCII\nDATASET STRUCTURED_GRID").expect(e);
    writeln!(w, "DIMENSIONS {} {} 1", mesh.nx() + 1, mesh.ny() + 1).expect(e);
    writeln!(w, "POINTS {n} double").expect(e);
    for [x, y] in mesh.vertices() {
        writeln!(w, "{} {} 0", real(*x), real(*y)).expect(e);
    }
    writeln!(w, "POINT_DATA {n}").expect(e);
    for (name, field) in [("density", &state.rho), ("pressure", &state.p)] {
        writeln!(w, "SCALARS {name} double 1\nLOOKUP_TABLE default").expect(e);
        for v in vertex_values(field) {
            writeln!(w, "{}", real(v)).expect(e);
        }
    }
    writeln!(w, "VECTORS velocity double").expect(e);
    for (ux, uy) in vertex_values(&state.u[0]).zip(vertex_values(&state.u[1])) {
        writeln!(w, "{} {} 0", real(ux), real(uy)).expect(e);
    }
    writeln!(w, "SCALARS viscosity double 1\nLOOKUP_TABLE default").expect(e);
    for v in vertex_values(&state.nu) {
        writeln!(w, "{}", real(v)).expect(e);
    }
    Ok(s)
}

pub fn write_vtk(state: &SimState, path: &Path) -> Result<()> {
    super::write_file(path, &render_vtk(state)?)
}

/// Values of the named scalar array in VTK text produced by
/// [`render_vtk`].
pub fn read_scalar_array(text: &str, name: &str) -> Option<Vec<f64>> {
    let mut lines = text.lines();
    let n: usize = lines
        .by_ref()
        .find_map(|l| l.strip_prefix("POINT_DATA "))?
        .trim()
        .parse()
        .ok()?;
    let tag = format!("SCALARS {name} ");
    lines.by_ref().find(|l| l.starts_with(&tag))?;
    lines.next()?;
    lines.take(n).map(|l| l.trim().parse().ok()).collect()
}
