//! Discrete inverted elliptic system over the free nodes of an overlap mesh,
//! finite-difference operators and mesh-quality diagnostics.

pub mod fd;
mod quality;
mod residual;

use thiserror::Error;

pub use fd::{
    coefficients, fd_first, fd_second, metric_tensor, Coefficients, Direction, MetricSample, SecondDerivative, Stencil,
};
pub use quality::{mesh_quality, QualityReport};
pub use residual::{fd_step, node_residual, FreeNodeMap, ResidualSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmoothingError {
    #[error("vector has length {got}, the system has {expected} unknowns")]
    InconsistentLength { expected: usize, got: usize },
    #[error("directional derivative requested along a zero vector")]
    ZeroDirection,
}
