use std::path::{Path, PathBuf};

use log::{info, warn};
use thiserror::Error;

use super::report::{ReportRow, RunReport};
use super::spec::{OutputKind, ProblemSpec};
use super::{write_mesh, write_report, write_svg, write_vtk};
use crate::gridgen::{build_overlap, GridError, Overlap, OverlapMesh};
use crate::smoothing::{mesh_quality, ResidualSystem};
use crate::solvers::{max_abs_diff, newton_gmres_solve, sane_solve, SolverKind, SolverOutcome};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    /// Validation and I/O failures both map to exit code 1.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

/// Where relative output paths are resolved.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineOptions {
    /// Takes precedence over `base_dir`.
    pub out_dir: Option<PathBuf>,
    /// Usually the directory holding the spec file.
    pub base_dir: Option<PathBuf>,
}

impl PipelineOptions {
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            return path.to_path_buf();
        }
        match self.out_dir.as_ref().or(self.base_dir.as_ref()) {
            Some(dir) => dir.join(path),
            None => path.to_path_buf(),
        }
    }
}

/// Everything a run produced, before or after writing.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub overlap: Overlap,
    /// Smoothed mesh (the initial overlap mesh if every solver failed).
    pub mesh: OverlapMesh,
    pub outcomes: Vec<SolverOutcome>,
    pub report: RunReport,
    pub written: Vec<PathBuf>,
}

impl PipelineOutcome {
    /// True when every solver that ran reached its tolerance.
    pub fn converged(&self) -> bool {
        self.outcomes.iter().all(|o| o.report().is_some_and(|r| r.converged()))
    }

    /// 0 on convergence, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.converged() {
            0
        } else {
            2
        }
    }
}

/// Builds the overlap mesh and smooths it with the configured solver(s),
/// without touching the file system.
pub fn solve_spec(spec: &ProblemSpec) -> Result<PipelineOutcome, PipelineError> {
    let overlap = build_overlap(&spec.domain, &spec.boundaries, spec.grid)?;
    info!(
        "overlap mesh {}x{}: {} SIAC, {} fixed nodes",
        overlap.mesh.m(),
        overlap.mesh.n(),
        overlap.siacs.len(),
        overlap.mesh.fixed_count()
    );
    let sys = ResidualSystem::new(overlap.mesh.clone());
    let v0 = sys.initial_vector();
    let cfg = &spec.solver;

    let mut outcomes = Vec::new();
    if cfg.kind.runs_newton() {
        outcomes.push(SolverOutcome {
            kind: SolverKind::NewtonGmres,
            result: newton_gmres_solve(&sys, &v0, &cfg.gmres),
        });
    }
    if cfg.kind.runs_sane() {
        outcomes.push(SolverOutcome {
            kind: SolverKind::Sane,
            result: sane_solve(&sys, &v0, &cfg.sane),
        });
    }
    for o in &outcomes {
        match &o.result {
            Ok((_, rep)) => info!(
                "{}: {} after {}, ||F|| = {:.3e}",
                o.kind,
                rep.termination,
                rep.iterations_label(),
                rep.final_residual()
            ),
            Err(e) => warn!("{} failed: {e}", o.kind),
        }
    }

    let side_length = spec.domain.width().max(spec.domain.height());
    let normalized_difference = match outcomes.as_slice() {
        [a, b] => match (a.solution(), b.solution()) {
            (Some(x), Some(y)) => Some(max_abs_diff(x, y) / side_length),
            _ => None,
        },
        _ => None,
    };

    // Prefer SANE's mesh; it is the method of record.
    let chosen = outcomes
        .iter()
        .rev()
        .find_map(|o| o.solution())
        .map(|v| sys.apply(v))
        .transpose()
        .expect("solver output has the system dimension");
    let mesh = chosen.unwrap_or_else(|| overlap.mesh.clone());

    let report = RunReport {
        name: spec.name.clone(),
        m: mesh.m(),
        n: mesh.n(),
        unknowns: sys.dim(),
        side_length,
        rows: outcomes.iter().map(ReportRow::from_outcome).collect(),
        normalized_difference,
        quality: mesh_quality(&mesh),
    };
    Ok(PipelineOutcome {
        overlap,
        mesh,
        outcomes,
        report,
        written: Vec::new(),
    })
}

/// Runs the whole process and writes every requested artifact. Artifacts are
/// written even when a solver did not converge; check
/// [`PipelineOutcome::exit_code`].
pub fn run_pipeline(spec: &ProblemSpec, opts: &PipelineOptions) -> Result<PipelineOutcome, PipelineError> {
    let mut out = solve_spec(spec)?;
    if !out.converged() {
        warn!("'{}': solver did not converge; writing artifacts anyway", spec.name);
    }
    if !out.report.quality.is_valid() {
        warn!(
            "'{}': mesh has {} folded cells",
            spec.name, out.report.quality.folded_cells
        );
    }
    let boundaries = out.overlap.feature_polylines();
    for o in &spec.outputs {
        let path = opts.resolve(&o.path);
        let io_err = |source| PipelineError::Io {
            path: path.clone(),
            source,
        };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(io_err)?;
        }
        match o.kind {
            OutputKind::Mesh => write_mesh(&out.mesh, &path),
            OutputKind::Vtk => write_vtk(&out.mesh, &spec.name, &path),
            OutputKind::Svg => write_svg(&out.mesh, &boundaries, &path),
            OutputKind::Report => write_report(&out.report, &path),
        }
        .map_err(io_err)?;
        info!("wrote {}", path.display());
        out.written.push(path);
    }
    Ok(out)
}
