//! Comma-separated tables with 17 significant digits.

use std::path::Path;

use crate::cases::BubbleHeight;
use crate::diagnostics::ErrorTable;
use crate::error::{Error, Result};
use crate::stepper::{EnergyReport, SimState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CsvValue {
    Int(i64),
    Real(f64),
    Blank,
}

impl CsvValue {
    fn text(&self) -> String {
        match self {
            CsvValue::Int(i) => i.to_string(),
            CsvValue::Real(v) => format!("{v:.16e}"),
            CsvValue::Blank => String::new(),
        }
    }
}

impl From<f64> for CsvValue {
    fn from(v: f64) -> Self {
        CsvValue::Real(v)
    }
}

impl From<usize> for CsvValue {
    fn from(v: usize) -> Self {
        CsvValue::Int(v as i64)
    }
}

impl From<Option<f64>> for CsvValue {
    fn from(v: Option<f64>) -> Self {
        v.map_or(CsvValue::Blank, CsvValue::Real)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<CsvValue>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<CsvValue>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    fn write_to<W: std::io::Write>(&self, sink: W) -> std::result::Result<W, csv::Error> {
        let mut w = csv::WriterBuilder::new().flexible(false).from_writer(sink);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(CsvValue::text))?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }

    pub fn render(&self) -> String {
        let bytes = self.write_to(Vec::new()).expect("writing to memory");
        String::from_utf8(bytes).expect("ascii output")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io_err)?;
        self.write_to(std::io::BufWriter::new(file))
            .and_then(|mut w| std::io::Write::flush(&mut w).map_err(Into::into))
            .map_err(|e| io_err(e.into()))?;
        Ok(())
    }
}

pub fn energy_table(reports: &[EnergyReport]) -> CsvTable {
    let mut t = CsvTable::new(&EnergyReport::COLUMNS);
    for r in reports {
        t.push(vec![
            r.step.into(),
            r.t.into(),
            r.tau.into(),
            r.kinetic.into(),
            r.kinetic_hat.into(),
            r.dissipation.into(),
            r.pressure_grad.into(),
            r.density_l2.into(),
            r.density_jump.into(),
            r.rho_min.into(),
            r.rho_max.into(),
            r.nu_min.into(),
            r.nu_max.into(),
            r.floor_violations.into(),
            r.weak_divergence.into(),
            r.energy().into(),
        ]);
    }
    t
}

/// One row per level; rate columns compare with the previous level and
/// are blank on the first.
pub fn error_table(table: &ErrorTable) -> CsvTable {
    let mut t = CsvTable::new(&["n", "h", "tau", "err_u", "rate_u", "err_p", "rate_p", "err_rho", "rate_rho"]);
    let rates = table.rates().ok();
    for (k, l) in table.levels.iter().enumerate() {
        let r = |which: usize| match (&rates, k) {
            (Some(r), k) if k > 0 => CsvValue::Real([&r.u, &r.p, &r.rho][which][k - 1]),
            _ => CsvValue::Blank,
        };
        t.push(vec![
            l.n.into(),
            l.h.into(),
            l.tau.into(),
            l.u.into(),
            r(0),
            l.p.into(),
            r(1),
            l.rho.into(),
            r(2),
        ]);
    }
    t
}

pub fn bubble_table(series: &[(f64, BubbleHeight)]) -> CsvTable {
    let mut t = CsvTable::new(&["t", "height", "crossed"]);
    for (time, h) in series {
        t.push(vec![(*time).into(), h.height.into(), CsvValue::Int(h.crossed as i64)]);
    }
    t
}

/// Every velocity dof, then every scalar dof, with coordinates.
pub fn dof_tables(state: &SimState) -> [CsvTable; 2] {
    let mut vel = CsvTable::new(&["x", "y", "u_x", "u_y"]);
    let q2 = state.u[0].space();
    for (d, [x, y]) in q2.dof_coords().iter().enumerate() {
        vel.push(vec![(*x).into(), (*y).into(), state.u[0].values()[d].into(), state.u[1].values()[d].into()]);
    }
    let mut sc = CsvTable::new(&["x", "y", "density", "pressure", "viscosity"]);
    let q1 = state.rho.space();
    for (d, [x, y]) in q1.dof_coords().iter().enumerate() {
        sc.push(vec![
            (*x).into(),
            (*y).into(),
            state.rho.values()[d].into(),
            state.p.values()[d].into(),
            state.nu.values()[d].into(),
        ]);
    }
    [vel, sc]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_and_blank_cells() {
        assert_eq!(energy_table(&[]).render().lines().count(), 1);
        let mut t = CsvTable::new(&["a", "b", "c"]);
        t.push(vec![CsvValue::Int(3), CsvValue::Blank, CsvValue::Real(0.1)]);
        assert_eq!(t.render(), "a,b,c\n3,,1.0000000000000001e-1\n");
    }
}
