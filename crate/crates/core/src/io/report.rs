use std::fmt::Write as _;

use crate::smoothing::QualityReport;
use crate::solvers::SolverOutcome;

/// One solver line of a run report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    /// Final `||F||_2`.
    pub residual: Option<f64>,
    pub time_s: Option<f64>,
    pub iterations: String,
    pub status: String,
}

impl ReportRow {
    pub fn from_outcome(o: &SolverOutcome) -> Self {
        match &o.result {
            Ok((_, rep)) => Self {
                method: o.kind.to_string(),
                residual: Some(rep.final_residual()),
                time_s: Some(rep.wall_time.as_secs_f64()),
                iterations: rep.iterations_label(),
                status: rep.termination.to_string(),
            },
            Err(e) => Self {
                method: o.kind.to_string(),
                residual: None,
                time_s: None,
                iterations: "-".into(),
                status: format!("failed: {e}"),
            },
        }
    }
}

/// Solver comparison for one problem, laid out like a results table:
/// residual norm, normalized mesh difference, time and iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub unknowns: usize,
    pub side_length: f64,
    pub rows: Vec<ReportRow>,
    /// `||M1 - M2||_inf / L` when two solvers ran.
    pub normalized_difference: Option<f64>,
    pub quality: QualityReport,
}

fn opt_sci(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4e}"))
}

fn opt_fixed(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

pub fn format_report_text(r: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Problem '{}': grid {} x {}, {} unknowns, L = {}",
        r.name, r.m, r.n, r.unknowns, r.side_length
    );
    let _ = writeln!(
        out,
        "{:<12} {:<8} {:>12} {:>18} {:>10} {:>16}  Status",
        "Ex", "Method", "||F||_2", "||M1-M2||_inf/L", "Time (s)", "Iterations"
    );
    for (k, row) in r.rows.iter().enumerate() {
        let diff = if k == 0 {
            opt_sci(r.normalized_difference)
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "{:<12} {:<8} {:>12} {:>18} {:>10} {:>16}  {}",
            if k == 0 { r.name.as_str() } else { "" },
            row.method,
            opt_sci(row.residual),
            diff,
            opt_fixed(row.time_s),
            row.iterations,
            row.status
        );
    }
    let q = &r.quality;
    let _ = writeln!(
        out,
        "Mesh quality: min J = {:.4e}, max J = {:.4e}, folded cells = {}, min corner triangle area = {:.4e}",
        q.min_jacobian, q.max_jacobian, q.folded_cells, q.min_triangle_area
    );
    out
}

pub fn format_report_csv(r: &RunReport) -> String {
    let mut out = String::from("example,method,residual_norm,normalized_difference,time_s,iterations,status\n");
    let field = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:?}"));
    for row in &r.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_escape(&r.name),
            row.method,
            field(row.residual),
            field(r.normalized_difference),
            field(row.time_s),
            csv_escape(&row.iterations),
            csv_escape(&row.status)
        );
    }
    out
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
