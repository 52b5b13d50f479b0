use super::{
    newton_gmres_solve, sane_solve, GmresParams, NonlinearSystem, SaneParams, SolveReport, SolverError, SolverKind,
};

/// Result of one solver run within a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    pub kind: SolverKind,
    pub result: Result<(Vec<f64>, SolveReport), SolverError>,
}

impl SolverOutcome {
    pub fn report(&self) -> Option<&SolveReport> {
        self.result.as_ref().ok().map(|(_, r)| r)
    }

    pub fn solution(&self) -> Option<&[f64]> {
        self.result.as_ref().ok().map(|(v, _)| v.as_slice())
    }
}

/// One row of a SANE versus Newton-GMRES comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub sane: SolverOutcome,
    pub newton: SolverOutcome,
    /// `||M1 - M2||_inf / L`; absent when either solver failed.
    pub normalized_difference: Option<f64>,
    pub side_length: f64,
}

/// Runs both solvers from the same start and measures how far apart their
/// meshes end up, relative to the domain side length.
pub fn compare_solvers<S: NonlinearSystem + ?Sized>(
    sys: &S,
    v0: &[f64],
    sane: &SaneParams,
    gmres: &GmresParams,
    side_length: f64,
) -> ComparisonRow {
    let sane = SolverOutcome {
        kind: SolverKind::Sane,
        result: sane_solve(sys, v0, sane),
    };
    let newton = SolverOutcome {
        kind: SolverKind::NewtonGmres,
        result: newton_gmres_solve(sys, v0, gmres),
    };
    let normalized_difference = match (sane.solution(), newton.solution()) {
        (Some(a), Some(b)) => Some(max_abs_diff(a, b) / side_length),
        _ => None,
    };
    ComparisonRow {
        sane,
        newton,
        normalized_difference,
        side_length,
    }
}

/// `||a - b||_inf`.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}
