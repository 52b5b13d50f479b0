//! Nonlinear solvers for the smoothing system: the spectral residual method
//! with nonmonotone line search, and a matrix-free Newton-GMRES baseline.

mod compare;
mod gmres;
mod sane;

use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::smoothing::{fd_step, ResidualSystem, SmoothingError};

pub use compare::{compare_solvers, max_abs_diff, ComparisonRow, SolverOutcome};
pub use gmres::{gmres, newton_gmres_solve, GmresOutcome, GmresParams};
pub use sane::{backtrack, sane_solve, SaneParams, StepTrace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("vector has length {got}, the system has {expected} unknowns")]
    InconsistentLength { expected: usize, got: usize },
    #[error("directional derivative requested along a zero vector")]
    ZeroDirection,
    #[error("non-finite residual at iteration {0}")]
    NonFinite(usize),
    #[error("GMRES broke down at inner iteration {0}")]
    GmresBreakdown(usize),
}

impl From<SmoothingError> for SolverError {
    fn from(e: SmoothingError) -> Self {
        match e {
            SmoothingError::InconsistentLength { expected, got } => Self::InconsistentLength { expected, got },
            SmoothingError::ZeroDirection => Self::ZeroDirection,
        }
    }
}

/// A square nonlinear system `F: R^r -> R^r`.
pub trait NonlinearSystem {
    fn dim(&self) -> usize;

    fn residual(&self, v: &[f64]) -> Result<Vec<f64>, SolverError>;

    /// `J(v) w`, given `fv = F(v)`. Defaults to a forward difference.
    fn jacobian_vec(&self, v: &[f64], fv: &[f64], w: &[f64]) -> Result<Vec<f64>, SolverError> {
        let step = fd_step(v, w).ok_or(SolverError::ZeroDirection)?;
        let shifted: Vec<f64> = v.iter().zip(w).map(|(a, b)| a + step * b).collect();
        let fs = self.residual(&shifted)?;
        Ok(fs.iter().zip(fv).map(|(a, b)| (a - b) / step).collect())
    }
}

impl NonlinearSystem for ResidualSystem {
    fn dim(&self) -> usize {
        ResidualSystem::dim(self)
    }

    fn residual(&self, v: &[f64]) -> Result<Vec<f64>, SolverError> {
        Ok(ResidualSystem::residual(self, v)?)
    }

    fn jacobian_vec(&self, v: &[f64], fv: &[f64], w: &[f64]) -> Result<Vec<f64>, SolverError> {
        Ok(self.jacobian_vec_at(v, fv, w)?)
    }
}

/// Adapts a closure to [`NonlinearSystem`].
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64>> FnSystem<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> NonlinearSystem for FnSystem<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn residual(&self, v: &[f64]) -> Result<Vec<f64>, SolverError> {
        if v.len() != self.dim {
            return Err(SolverError::InconsistentLength {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok((self.f)(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Sane,
    NewtonGmres,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Sane => "SANE",
            SolverKind::NewtonGmres => "N-GMRES",
        })
    }
}

/// Why a solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `||F|| <= tol`.
    ResidualZero,
    /// `|F^t J F| / F^t F` fell below the safeguard.
    SmallCurvature,
    MaxIters,
    LineSearchFail,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::ResidualZero => "converged",
            Termination::SmallCurvature => "small curvature",
            Termination::MaxIters => "iteration limit",
            Termination::LineSearchFail => "line search failure",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solver: SolverKind,
    pub termination: Termination,
    /// Outer iterations performed.
    pub iters: usize,
    /// `||F||_2` before the first and after every iteration.
    pub residual_history: Vec<f64>,
    /// Step reductions per iteration.
    pub backtrack_counts: Vec<usize>,
    /// Inner GMRES iterations per Newton step (empty for SANE).
    pub inner_iterations: Vec<usize>,
    /// GMRES restart cycles per Newton step (empty for SANE).
    pub inner_cycles: Vec<usize>,
    /// Per-iteration line-search log (SANE only).
    pub trace: Vec<StepTrace>,
    pub residual_evaluations: usize,
    pub tol: f64,
    pub wall_time: Duration,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::ResidualZero
    }

    pub fn final_residual(&self) -> f64 {
        *self
            .residual_history
            .last()
            .expect("history holds the initial residual")
    }

    /// Iteration summary: `185` for SANE, `8N / 8 GMRES` for Newton-GMRES.
    pub fn iterations_label(&self) -> String {
        match self.solver {
            SolverKind::Sane => self.iters.to_string(),
            SolverKind::NewtonGmres => {
                format!("{}N / {} GMRES", self.iters, self.inner_cycles.iter().sum::<usize>())
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Default stopping tolerance `1e-8 sqrt(r)`.
pub fn default_tol(r: usize) -> f64 {
    1e-8 * (r as f64).sqrt()
}
