//! Configuration files, output writers and the case driver behind the
//! command-line tool.

pub mod config;
pub mod csv;
pub mod driver;
pub mod vtk;

pub use config::{parse_pairs, RunConfig};
pub use csv::{bubble_table, dof_tables, energy_table, error_table, CsvTable, CsvValue};
pub use driver::{execute, RunSummary};
pub use vtk::{render_vtk, write_vtk};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
