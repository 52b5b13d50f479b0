use std::collections::HashSet;

use crate::geometry::{lerp, Domain, Orientation, Point, SegmentRole, Siac};

use super::mesh::{GridIndex, OverlapMesh};
use super::GridError;

/// Uniform Cartesian grid whose per-direction spacing is `fraction` times the
/// smallest gap between consecutive SIAC hits (and corners) on the sides
/// crossed by that direction.
pub fn initial_grid(dom: &Domain, siacs: &[Siac], fraction: f64) -> Result<OverlapMesh, GridError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(GridError::InvalidFraction(fraction));
    }
    let (gap_x, gap_y) = minimal_gaps(dom, siacs);
    if gap_x <= dom.tol() {
        return Err(GridError::DegenerateSpacing {
            direction: Orientation::Horizontal,
            gap: gap_x,
        });
    }
    if gap_y <= dom.tol() {
        return Err(GridError::DegenerateSpacing {
            direction: Orientation::Vertical,
            gap: gap_y,
        });
    }
    let m = (dom.width() / (fraction * gap_x)).round() as usize + 1;
    let n = (dom.height() / (fraction * gap_y)).round() as usize + 1;
    Ok(OverlapMesh::cartesian(*dom, m.max(2), n.max(2)))
}

/// Smallest gaps `(along x, along y)` between boundary hit points.
pub(crate) fn minimal_gaps(dom: &Domain, siacs: &[Siac]) -> (f64, f64) {
    let gap = |mut stops: Vec<f64>| {
        stops.sort_by(f64::total_cmp);
        stops.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    };
    let mut bottom = vec![dom.a, dom.b];
    let mut top = vec![dom.a, dom.b];
    let mut left = vec![dom.c, dom.d];
    let mut right = vec![dom.c, dom.d];
    for s in siacs {
        match s.orientation() {
            Orientation::Vertical => {
                bottom.push(s.first().x);
                top.push(s.last().x);
            }
            Orientation::Horizontal => {
                left.push(s.first().y);
                right.push(s.last().y);
            }
        }
    }
    (gap(bottom).min(gap(top)), gap(left).min(gap(right)))
}

/// Grid lines already taken by a SIAC.
#[derive(Debug, Clone)]
pub struct LineClaims {
    rows: Vec<bool>,
    cols: Vec<bool>,
}

impl LineClaims {
    pub fn new(mesh: &OverlapMesh) -> Self {
        Self {
            rows: vec![false; mesh.n()],
            cols: vec![false; mesh.m()],
        }
    }

    pub fn is_claimed(&self, orientation: Orientation, line: usize) -> bool {
        match orientation {
            Orientation::Horizontal => self.rows[line],
            Orientation::Vertical => self.cols[line],
        }
    }

    pub fn claim(&mut self, orientation: Orientation, line: usize) {
        match orientation {
            Orientation::Horizontal => self.rows[line] = true,
            Orientation::Vertical => self.cols[line] = true,
        }
    }
}

/// Picks the interior grid line closest to the mean transverse coordinate of
/// the SIAC vertices; a claimed line defers to the nearest unclaimed one.
/// Ties go to the lower index. The chosen line is claimed.
pub fn associate_line(mesh: &OverlapMesh, s: &Siac, claims: &mut LineClaims) -> Result<usize, GridError> {
    let o = s.orientation();
    let target = s.mean_across();
    let count = match o {
        Orientation::Horizontal => mesh.n(),
        Orientation::Vertical => mesh.m(),
    };
    let coord = |k: usize| match o {
        Orientation::Horizontal => mesh.cartesian_y(k),
        Orientation::Vertical => mesh.cartesian_x(k),
    };
    let tie = mesh.domain().tol();
    let mut best: Option<(usize, f64)> = None;
    for line in 1..count.saturating_sub(1) {
        if claims.is_claimed(o, line) {
            continue;
        }
        let d = (coord(line) - target).abs();
        if best.is_none_or(|(_, bd)| d < bd - tie) {
            best = Some((line, d));
        }
    }
    let (line, _) = best.ok_or_else(|| GridError::LineConflict {
        label: s.label().to_string(),
        orientation: o,
    })?;
    claims.claim(o, line);
    Ok(line)
}

/// A point where the SIAC meets a SIAC of the other orientation, pinned to
/// position `node` along the associated line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub point: Point,
    pub node: usize,
}

/// Outcome of mapping one SIAC onto its grid line.
#[derive(Debug, Clone, PartialEq)]
pub struct LineAssociation {
    pub label: String,
    pub orientation: Orientation,
    /// Row (horizontal) or column (vertical) index.
    pub line: usize,
    /// SIAC vertices after crossing insertion.
    pub vertices: Vec<Point>,
    /// Node each vertex was pinned to; strictly increasing along the line.
    pub vertex_to_node: Vec<GridIndex>,
}

/// Maps the nodes of grid line `line` onto the SIAC.
///
/// End vertices go to the end nodes, crossings to their given nodes, and every
/// other vertex to the closest free interior node of the line. Nodes between
/// two consecutive pinned vertices are spread proportionally over the segment
/// joining them. Nodes landing on feature segments or vertices are fixed.
pub fn redistribute_line(
    mesh: &mut OverlapMesh,
    line: usize,
    s: &Siac,
    crossings: &[Crossing],
) -> Result<LineAssociation, GridError> {
    let o = s.orientation();
    let tol = mesh.domain().tol();
    let len = match o {
        Orientation::Horizontal => mesh.m(),
        Orientation::Vertical => mesh.n(),
    };
    let node_at = |t: usize| match o {
        Orientation::Horizontal => GridIndex::new(t, line),
        Orientation::Vertical => GridIndex::new(line, t),
    };
    let collision = |node: usize| GridError::VertexCollision {
        label: s.label().to_string(),
        node: node_at(node),
    };

    let mut verts = s.vertices().to_vec();
    let mut roles = s.roles().to_vec();
    let mut pins: Vec<Option<usize>> = vec![None; verts.len()];
    let last = verts.len() - 1;
    pins[0] = Some(0);
    pins[last] = Some(len - 1);

    let mut sorted = crossings.to_vec();
    sorted.sort_by(|p, q| o.along(p.point).total_cmp(&o.along(q.point)));
    for c in &sorted {
        let a = o.along(c.point);
        let k = (0..verts.len() - 1)
            .find(|&k| o.along(verts[k]) - tol <= a && a <= o.along(verts[k + 1]) + tol)
            .ok_or_else(|| GridError::OrderViolation {
                label: s.label().to_string(),
            })?;
        let idx = if verts[k].dist(c.point) <= tol {
            k
        } else if verts[k + 1].dist(c.point) <= tol {
            k + 1
        } else {
            verts.insert(k + 1, c.point);
            roles.insert(k + 1, roles[k]);
            pins.insert(k + 1, None);
            k + 1
        };
        match pins[idx] {
            Some(node) if node != c.node => return Err(collision(c.node)),
            _ => {}
        }
        verts[idx] = c.point;
        pins[idx] = Some(c.node);
    }

    let last = verts.len() - 1;
    let taken: HashSet<usize> = pins.iter().flatten().copied().collect();
    let cart = |t: usize| match o {
        Orientation::Horizontal => mesh.cartesian_x(t),
        Orientation::Vertical => mesh.cartesian_y(t),
    };
    let mut snapped: HashSet<usize> = HashSet::new();
    for k in 1..last {
        if pins[k].is_some() {
            continue;
        }
        let a = o.along(verts[k]);
        let mut best: Option<(usize, f64)> = None;
        for t in 1..len - 1 {
            if taken.contains(&t) {
                continue;
            }
            let d = (cart(t) - a).abs();
            if best.is_none_or(|(_, bd)| d < bd - tol) {
                best = Some((t, d));
            }
        }
        let (t, _) = best.ok_or_else(|| collision(0))?;
        if !snapped.insert(t) {
            return Err(collision(t));
        }
        pins[k] = Some(t);
    }

    let pins: Vec<usize> = pins.into_iter().map(|p| p.expect("every vertex pinned")).collect();
    if pins.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GridError::OrderViolation {
            label: s.label().to_string(),
        });
    }

    let is_feature = |k: usize| roles.get(k) == Some(&SegmentRole::Feature);
    for k in 0..verts.len() {
        let g = node_at(pins[k]);
        mesh.set_point(g.i, g.j, verts[k]);
        if is_feature(k) || (k > 0 && is_feature(k - 1)) {
            mesh.fix(g.i, g.j);
        }
        if k == last {
            break;
        }
        let (na, nb) = (pins[k], pins[k + 1]);
        for t in na + 1..nb {
            let frac = (t - na) as f64 / (nb - na) as f64;
            let g = node_at(t);
            mesh.set_point(g.i, g.j, verts[k].lerp(verts[k + 1], frac));
            if is_feature(k) {
                mesh.fix(g.i, g.j);
            }
        }
    }

    Ok(LineAssociation {
        label: s.label().to_string(),
        orientation: o,
        line,
        vertex_to_node: pins.iter().map(|&t| node_at(t)).collect(),
        vertices: verts,
    })
}

/// Re-spaces the external boundary nodes proportionally between consecutive
/// SIAC endpoint hits on each side. Corners never move.
pub fn redistribute_external_boundary(
    mesh: &mut OverlapMesh,
    associations: &[LineAssociation],
) -> Result<(), GridError> {
    let dom = *mesh.domain();
    let (m, n) = (mesh.m(), mesh.n());
    let mut bottom = vec![(0, dom.a), (m - 1, dom.b)];
    let mut top = bottom.clone();
    let mut left = vec![(0, dom.c), (n - 1, dom.d)];
    let mut right = left.clone();
    for a in associations {
        let first = a.vertices[0];
        let last = a.vertices[a.vertices.len() - 1];
        match a.orientation {
            Orientation::Vertical => {
                bottom.push((a.line, first.x));
                top.push((a.line, last.x));
            }
            Orientation::Horizontal => {
                left.push((a.line, first.y));
                right.push((a.line, last.y));
            }
        }
    }
    let cx = |i: usize| lerp(dom.a, dom.b, i as f64 / (m - 1) as f64);
    let cy = |j: usize| lerp(dom.c, dom.d, j as f64 / (n - 1) as f64);
    // Stretches whose bounding pins did not move keep their Cartesian spacing bit-exactly.
    let spread = |mut pins: Vec<(usize, f64)>,
                  cart: &dyn Fn(usize) -> f64,
                  label: &str|
     -> Result<Vec<(usize, f64)>, GridError> {
        pins.sort_by_key(|p| p.0);
        pins.dedup_by_key(|p| p.0);
        if pins.windows(2).any(|w| w[1].1 <= w[0].1) {
            return Err(GridError::OrderViolation {
                label: format!("{label} side"),
            });
        }
        let mut out = Vec::new();
        for w in pins.windows(2) {
            let ((ta, xa), (tb, xb)) = (w[0], w[1]);
            let unmoved = xa == cart(ta) && xb == cart(tb);
            for t in ta..tb {
                let x = if unmoved {
                    cart(t)
                } else {
                    lerp(xa, xb, (t - ta) as f64 / (tb - ta) as f64)
                };
                out.push((t, x));
            }
        }
        out.push(*pins.last().expect("corner pins"));
        Ok(out)
    };
    for (i, x) in spread(bottom, &cx, "bottom")? {
        mesh.set_point(i, 0, Point::new(x, dom.c));
    }
    for (i, x) in spread(top, &cx, "top")? {
        mesh.set_point(i, n - 1, Point::new(x, dom.d));
    }
    for (j, y) in spread(left, &cy, "left")? {
        mesh.set_point(0, j, Point::new(dom.a, y));
    }
    for (j, y) in spread(right, &cy, "right")? {
        mesh.set_point(m - 1, j, Point::new(dom.b, y));
    }
    Ok(())
}

/// Moves, for each well, the nearest free node among the four nodes closest
/// to it onto the well and fixes it. Ties go to the lexicographically lowest
/// `(i, j)`.
pub fn snap_wells(mesh: &mut OverlapMesh, wells: &[Point]) -> Result<Vec<GridIndex>, GridError> {
    let tol = mesh.domain().tol();
    let mut placed = Vec::with_capacity(wells.len());
    for &w in wells {
        let mut nodes: Vec<(f64, GridIndex)> = (0..mesh.len())
            .map(|k| (mesh.coords()[k].dist(w), mesh.grid_index(k)))
            .collect();
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut candidates: Vec<(f64, GridIndex)> = nodes
            .into_iter()
            .take(4)
            .filter(|(_, g)| !mesh.is_fixed(g.i, g.j))
            .collect();
        candidates.sort_by_key(|c| c.1);
        let mut best: Option<(f64, GridIndex)> = None;
        for c in candidates {
            if best.is_none_or(|(bd, _)| c.0 < bd - tol) {
                best = Some(c);
            }
        }
        let (_, g) = best.ok_or(GridError::NoFreeNode { well: w })?;
        mesh.set_point(g.i, g.j, w);
        mesh.fix(g.i, g.j);
        placed.push(g);
    }
    Ok(placed)
}
