use crate::gridgen::OverlapMesh;

use super::fd::{metric_tensor, Stencil};

/// Mesh validity summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    /// Smallest corner Jacobian over all cells (twice the corner triangle area).
    pub min_jacobian: f64,
    pub max_jacobian: f64,
    /// Cells with at least one non-positive corner Jacobian.
    pub folded_cells: usize,
    /// Smallest signed area among the four corner triangles of every cell.
    pub min_triangle_area: f64,
    /// Extremes of the central-difference Jacobian at interior nodes.
    pub min_nodal_jacobian: f64,
    pub max_nodal_jacobian: f64,
    /// Interior nodes whose central-difference Jacobian is not positive.
    pub nodal_sign_changes: usize,
}

impl QualityReport {
    pub fn is_valid(&self) -> bool {
        self.folded_cells == 0 && self.min_jacobian > 0.0
    }
}

pub fn mesh_quality(mesh: &OverlapMesh) -> QualityReport {
    let (m, n) = (mesh.m(), mesh.n());
    let mut q = QualityReport {
        min_jacobian: f64::INFINITY,
        max_jacobian: f64::NEG_INFINITY,
        folded_cells: 0,
        min_triangle_area: f64::INFINITY,
        min_nodal_jacobian: f64::INFINITY,
        max_nodal_jacobian: f64::NEG_INFINITY,
        nodal_sign_changes: 0,
    };
    for j in 0..n - 1 {
        for i in 0..m - 1 {
            let c = [
                mesh.point(i, j),
                mesh.point(i + 1, j),
                mesh.point(i + 1, j + 1),
                mesh.point(i, j + 1),
            ];
            let mut folded = false;
            for k in 0..4 {
                let jac = (c[(k + 1) % 4] - c[k]).cross(c[(k + 3) % 4] - c[k]);
                q.min_jacobian = q.min_jacobian.min(jac);
                q.max_jacobian = q.max_jacobian.max(jac);
                q.min_triangle_area = q.min_triangle_area.min(0.5 * jac);
                folded |= jac <= 0.0;
            }
            q.folded_cells += usize::from(folded);
        }
    }
    for j in 1..n.saturating_sub(1) {
        for i in 1..m.saturating_sub(1) {
            let jac = metric_tensor(&Stencil::from_mesh(mesh, i, j)).jacobian;
            q.min_nodal_jacobian = q.min_nodal_jacobian.min(jac);
            q.max_nodal_jacobian = q.max_nodal_jacobian.max(jac);
            q.nodal_sign_changes += usize::from(jac <= 0.0);
        }
    }
    q
}
