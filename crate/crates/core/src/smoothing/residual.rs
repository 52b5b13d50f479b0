use crate::geometry::Point;
use crate::gridgen::OverlapMesh;

use super::SmoothingError;

/// Enumeration of the free (unfixed) nodes: row-major over `(j, i)`, each
/// node contributing its `x` then its `y` unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeNodeMap {
    nodes: Vec<usize>,
    slots: Vec<Option<usize>>,
}

impl FreeNodeMap {
    pub fn new(mesh: &OverlapMesh) -> Self {
        let mut nodes = Vec::new();
        let mut slots = vec![None; mesh.len()];
        for (k, &fixed) in mesh.fixed_mask().iter().enumerate() {
            if !fixed {
                slots[k] = Some(nodes.len());
                nodes.push(k);
            }
        }
        Self { nodes, slots }
    }

    /// Number of free nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of unknowns, `2 * (m n - p)`.
    pub fn dim(&self) -> usize {
        2 * self.nodes.len()
    }

    /// Mesh node index of free slot `s`.
    pub fn node(&self, s: usize) -> usize {
        self.nodes[s]
    }

    /// Free slot of mesh node `k`, if it is free.
    pub fn slot(&self, k: usize) -> Option<usize> {
        self.slots[k]
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }
}

/// The discrete inverted elliptic system restricted to the free nodes of an
/// overlap mesh. Fixed coordinates are read from the mesh snapshot.
#[derive(Debug, Clone)]
pub struct ResidualSystem {
    mesh: OverlapMesh,
    map: FreeNodeMap,
}

impl ResidualSystem {
    pub fn new(mesh: OverlapMesh) -> Self {
        let map = FreeNodeMap::new(&mesh);
        Self { mesh, map }
    }

    pub fn mesh(&self) -> &OverlapMesh {
        &self.mesh
    }

    pub fn map(&self) -> &FreeNodeMap {
        &self.map
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    /// Free coordinates of the mesh snapshot.
    pub fn initial_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        for &k in self.map.nodes() {
            let p = self.mesh.coords()[k];
            v.push(p.x);
            v.push(p.y);
        }
        v
    }

    fn check_len(&self, v: &[f64]) -> Result<(), SmoothingError> {
        if v.len() != self.dim() {
            return Err(SmoothingError::InconsistentLength {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Full coordinate buffer with the free nodes taken from `v`.
    fn assemble(&self, v: &[f64]) -> Vec<Point> {
        let mut coords = self.mesh.coords().to_vec();
        for (s, &k) in self.map.nodes().iter().enumerate() {
            coords[k] = Point::new(v[2 * s], v[2 * s + 1]);
        }
        coords
    }

    /// Mesh with the free nodes moved to `v`; fixed nodes are untouched.
    pub fn apply(&self, v: &[f64]) -> Result<OverlapMesh, SmoothingError> {
        self.check_len(v)?;
        let mut mesh = self.mesh.clone();
        mesh.coords_mut().copy_from_slice(&self.assemble(v));
        Ok(mesh)
    }

    /// Residual vector `F(v)` of length `dim()`.
    pub fn residual(&self, v: &[f64]) -> Result<Vec<f64>, SmoothingError> {
        self.check_len(v)?;
        let coords = self.assemble(v);
        let m = self.mesh.m();
        let mut out = vec![0.0; self.dim()];
        for (s, &k) in self.map.nodes().iter().enumerate() {
            let (fx, fy) = node_residual(&coords, m, k % m, k / m);
            out[2 * s] = fx;
            out[2 * s + 1] = fy;
        }
        Ok(out)
    }

    /// Forward-difference directional derivative `J(v) w`.
    pub fn jacobian_vec(&self, v: &[f64], w: &[f64]) -> Result<Vec<f64>, SmoothingError> {
        let fv = self.residual(v)?;
        self.jacobian_vec_at(v, &fv, w)
    }

    /// As [`jacobian_vec`](Self::jacobian_vec) with `F(v)` already known.
    pub fn jacobian_vec_at(&self, v: &[f64], fv: &[f64], w: &[f64]) -> Result<Vec<f64>, SmoothingError> {
        self.check_len(w)?;
        let step = fd_step(v, w).ok_or(SmoothingError::ZeroDirection)?;
        let shifted: Vec<f64> = v.iter().zip(w).map(|(a, b)| a + step * b).collect();
        let fs = self.residual(&shifted)?;
        Ok(fs.iter().zip(fv).map(|(a, b)| (a - b) / step).collect())
    }
}

/// Step `sqrt(eps) (1 + |v|_inf) / |w|_inf`, or `None` for a zero direction.
pub fn fd_step(v: &[f64], w: &[f64]) -> Option<f64> {
    let wn = w.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if wn == 0.0 || !wn.is_finite() {
        return None;
    }
    let vn = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    Some(f64::EPSILON.sqrt() * (1.0 + vn) / wn)
}

/// The two discrete equations at interior node `(i, j)`, with unit logical
/// spacing and undivided differences.
pub fn node_residual(c: &[Point], m: usize, i: usize, j: usize) -> (f64, f64) {
    let at = |di: isize, dj: isize| c[(j as isize + dj) as usize * m + (i as isize + di) as usize];
    let p = at(0, 0);
    let (e, w, n, s) = (at(1, 0), at(-1, 0), at(0, 1), at(0, -1));
    let (ne, se, sw, nw) = (at(1, 1), at(1, -1), at(-1, -1), at(-1, 1));

    let (xe, ye) = (e.x - w.x, e.y - w.y);
    let (xn, yn) = (n.x - s.x, n.y - s.y);
    let a = xn * xn + yn * yn;
    let b = xe * xn + ye * yn;
    let g = xe * xe + ye * ye;

    let fx = 2.0 * (e.x - 2.0 * p.x + w.x) * a - (ne.x - se.x + sw.x - nw.x) * b + 2.0 * (n.x - 2.0 * p.x + s.x) * g;
    let fy = 2.0 * (e.y - 2.0 * p.y + w.y) * a - (ne.y - se.y + sw.y - nw.y) * b + 2.0 * (n.y - 2.0 * p.y + s.y) * g;
    (fx, fy)
}
