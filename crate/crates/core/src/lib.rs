//! Structured quadrilateral grid generation aligned to internal boundaries.

pub mod geometry;
pub mod gridgen;
pub mod io;
pub mod smoothing;
pub mod solvers;
