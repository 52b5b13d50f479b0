//! Problem files, the end-to-end pipeline and artifact writers.

mod mesh_file;
mod pipeline;
mod render;
mod report;
mod spec;

use std::fs;
use std::io;
use std::path::Path;

pub use mesh_file::{format_mesh, parse_mesh, MeshFileError};
pub use pipeline::{run_pipeline, solve_spec, PipelineError, PipelineOptions, PipelineOutcome};
pub use render::{format_svg, format_vtk};
pub use report::{format_report_csv, format_report_text, ReportRow, RunReport};
pub use spec::{parse_size, parse_spec, OutputKind, OutputSpec, ProblemSpec, SolverChoice, SolverConfig, SpecError};

use crate::geometry::Point;
use crate::gridgen::OverlapMesh;

pub fn write_mesh(mesh: &OverlapMesh, path: &Path) -> io::Result<()> {
    fs::write(path, format_mesh(mesh))
}

pub fn read_mesh(path: &Path) -> io::Result<OverlapMesh> {
    let text = fs::read_to_string(path)?;
    parse_mesh(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

pub fn write_vtk(mesh: &OverlapMesh, title: &str, path: &Path) -> io::Result<()> {
    fs::write(path, format_vtk(mesh, title))
}

pub fn write_svg(mesh: &OverlapMesh, boundaries: &[Vec<Point>], path: &Path) -> io::Result<()> {
    fs::write(path, format_svg(mesh, boundaries))
}

/// Writes the aligned text table to `path` and its CSV twin next to it
/// (same stem, `.csv` extension).
pub fn write_report(report: &RunReport, path: &Path) -> io::Result<()> {
    fs::write(path, format_report_text(report))?;
    let csv = if path.extension().is_some_and(|e| e == "csv") {
        path.with_extension("rows.csv")
    } else {
        path.with_extension("csv")
    };
    fs::write(csv, format_report_csv(report))
}
