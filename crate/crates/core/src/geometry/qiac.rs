use std::collections::VecDeque;

use super::primitives::{line_intersection, segment_intersection, Domain, Point, Rect, SegmentHit};
use super::siac::{extend_chain, ExtensionMode, Orientation, Siac};
use super::GeometryError;

/// Lattice offset of each normalised corner (BL, BR, TR, TL) within its cell.
const CORNER_OFFSETS: [(usize, usize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// Convex four-sided closed internal boundary.
///
/// Corners are stored counter-clockwise starting at the bottom-left one, so
/// that edges BL-BR and TL-TR are its two horizontal lines and BL-TL, BR-TR
/// its two vertical lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Qiac {
    corners: [Point; 4],
}

impl Qiac {
    pub fn new(corners: &[Point], dom: &Domain) -> Result<Self, GeometryError> {
        if corners.len() != 4 {
            return Err(GeometryError::WrongCornerCount(corners.len()));
        }
        for (k, p) in corners.iter().enumerate() {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite(k));
            }
            if !dom.contains_strictly(*p) {
                return Err(GeometryError::TouchesBoundary(k));
            }
        }
        let mut c = [corners[0], corners[1], corners[2], corners[3]];
        let area2: f64 = (0..4).map(|k| c[k].cross(c[(k + 1) % 4])).sum();
        if area2 < 0.0 {
            c.reverse();
        }
        for k in 0..4 {
            let e1 = c[(k + 1) % 4] - c[k];
            let e2 = c[(k + 2) % 4] - c[(k + 1) % 4];
            if e1.cross(e2) <= 1e-12 * e1.norm() * e2.norm() {
                return Err(GeometryError::NonConvex);
            }
        }

        // The more horizontal pair of opposite edges is the horizontal lines.
        let flatness = |k: usize| {
            let e = c[(k + 1) % 4] - c[k];
            e.x.abs() - e.y.abs()
        };
        let pair0 = flatness(0) + flatness(2);
        let pair1 = flatness(1) + flatness(3);
        let first = if pair0 >= pair1 { 0 } else { 1 };
        // Counter-clockwise, the bottom edge runs left to right.
        let start = if (c[(first + 1) % 4] - c[first]).x > 0.0 {
            first
        } else {
            first + 2
        };
        let corners = [c[start % 4], c[(start + 1) % 4], c[(start + 2) % 4], c[(start + 3) % 4]];
        let q = Self { corners };

        let tol = dom.tol();
        let [bl, br, tr, tl] = corners;
        if br.x - bl.x <= tol {
            return Err(GeometryError::NotGrowing(0, 1));
        }
        if tr.x - tl.x <= tol {
            return Err(GeometryError::NotGrowing(3, 2));
        }
        if tl.y - bl.y <= tol {
            return Err(GeometryError::NotGrowing(0, 3));
        }
        if tr.y - br.y <= tol {
            return Err(GeometryError::NotGrowing(1, 2));
        }
        Ok(q)
    }

    /// Corners in the order bottom-left, bottom-right, top-right, top-left.
    pub fn corners(&self) -> &[Point; 4] {
        &self.corners
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..4).map(move |k| (self.corners[k], self.corners[(k + 1) % 4]))
    }

    /// Closed containment for a convex counter-clockwise polygon.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.edges().all(|(a, b)| {
            let e = b - a;
            e.cross(p - a) / e.norm() >= -tol
        })
    }

    pub fn to_iqiac(&self) -> Iqiac {
        Iqiac {
            members: vec![self.clone()],
            cells: vec![(0, 0)],
            cols: 2,
            rows: 2,
            lattice: vec![self.corners[0], self.corners[1], self.corners[3], self.corners[2]],
            artificial: Vec::new(),
        }
    }
}

/// Smallest axis-aligned rectangle containing the QIAC.
pub fn minimal_rectangle(q: &Qiac) -> Rect {
    Rect::bounding(q.corners())
}

fn rect_meets_polygon(r: &Rect, q: &Qiac, tol: f64) -> bool {
    if q.corners().iter().any(|&p| r.contains(p, tol)) {
        return true;
    }
    if r.corners().iter().any(|&p| q.contains(p, tol)) {
        return true;
    }
    let rc = r.corners();
    (0..4).any(|i| {
        q.edges()
            .any(|(a, b)| segment_intersection(rc[i], rc[(i + 1) % 4], a, b, tol) != SegmentHit::None)
    })
}

/// Two QIAC are associated when their minimal rectangles share at least a
/// point, or the minimal rectangle of one meets the other QIAC.
pub fn are_associated(q1: &Qiac, q2: &Qiac, tol: f64) -> bool {
    let r1 = minimal_rectangle(q1);
    let r2 = minimal_rectangle(q2);
    r1.intersects(&r2, tol) || rect_meets_polygon(&r1, q2, tol) || rect_meets_polygon(&r2, q1, tol)
}

/// Conformal lattice of convex quadrilaterals assembled from associated QIAC.
///
/// The lattice has `cols` vertices on every horizontal line and `rows`
/// vertices on every vertical line; each member QIAC occupies one cell and
/// the remaining lattice vertices are artificial.
#[derive(Debug, Clone, PartialEq)]
pub struct Iqiac {
    members: Vec<Qiac>,
    cells: Vec<(usize, usize)>,
    cols: usize,
    rows: usize,
    lattice: Vec<Point>,
    artificial: Vec<usize>,
}

impl Iqiac {
    pub fn members(&self) -> &[Qiac] {
        &self.members
    }

    /// Lattice cell `(column, row)` of each member.
    pub fn member_cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    /// Vertices per horizontal line.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Vertices per vertical line.
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn vertex(&self, i: usize, j: usize) -> Point {
        self.lattice[j * self.cols + i]
    }

    pub fn vertices(&self) -> &[Point] {
        &self.lattice
    }

    /// Lattice indices (`j * cols + i`) of the artificial vertices.
    pub fn artificial_vertices(&self) -> &[usize] {
        &self.artificial
    }

    /// Every lattice cell as counter-clockwise vertex indices.
    pub fn quads(&self) -> Vec<[usize; 4]> {
        let c = self.cols;
        let mut out = Vec::with_capacity((self.cols - 1) * (self.rows - 1));
        for j in 0..self.rows - 1 {
            for i in 0..self.cols - 1 {
                out.push([j * c + i, j * c + i + 1, (j + 1) * c + i + 1, (j + 1) * c + i]);
            }
        }
        out
    }

    pub fn horizontal_line(&self, j: usize) -> Vec<Point> {
        (0..self.cols).map(|i| self.vertex(i, j)).collect()
    }

    pub fn vertical_line(&self, i: usize) -> Vec<Point> {
        (0..self.rows).map(|j| self.vertex(i, j)).collect()
    }

    /// Smallest axis-aligned rectangle containing the whole structure.
    pub fn minimal_rectangle(&self) -> Rect {
        Rect::bounding(&self.lattice)
    }
}

/// Assembles associated QIAC into an IQIAC.
///
/// Members are placed on a common lattice through the corners they share.
/// Every lattice vertex not supplied by a member is artificial and sits where
/// the nearest member edges of its horizontal and vertical lattice lines,
/// continued according to `mode`, meet. The result must be a conformal
/// partition of convex quadrilaterals with growing lattice lines; otherwise
/// `NonConformable` is returned.
pub fn build_iqiac(qs: &[Qiac], dom: &Domain, mode: ExtensionMode) -> Result<Iqiac, GeometryError> {
    if qs.is_empty() {
        return Err(GeometryError::NonConformable("empty group".into()));
    }
    let tol = dom.tol();
    let n = qs.len();

    // Transitive association.
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(a) = queue.pop_front() {
        for b in 0..n {
            if !seen[b] && are_associated(&qs[a], &qs[b], tol) {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(GeometryError::NotAssociated);
    }

    // Lattice placement through shared corners.
    let mut cell: Vec<Option<(i64, i64)>> = vec![None; n];
    cell[0] = Some((0, 0));
    let mut queue = VecDeque::from([0]);
    while let Some(a) = queue.pop_front() {
        let (ca, ra) = cell[a].expect("placed");
        for b in 0..n {
            if a == b {
                continue;
            }
            for (ka, pa) in qs[a].corners.iter().enumerate() {
                for (kb, pb) in qs[b].corners.iter().enumerate() {
                    if pa.dist(*pb) > tol {
                        continue;
                    }
                    let (oa, ob) = (CORNER_OFFSETS[ka], CORNER_OFFSETS[kb]);
                    let want = (ca + oa.0 as i64 - ob.0 as i64, ra + oa.1 as i64 - ob.1 as i64);
                    match cell[b] {
                        None => {
                            cell[b] = Some(want);
                            queue.push_back(b);
                        }
                        Some(have) if have != want => {
                            return Err(GeometryError::NonConformable(format!(
                                "members {a} and {b} share corners inconsistently"
                            )));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
    }
    if let Some(b) = cell.iter().position(Option::is_none) {
        return Err(GeometryError::NonConformable(format!(
            "member {b} shares no corner with the rest of the group"
        )));
    }
    let cell: Vec<(i64, i64)> = cell.into_iter().map(Option::unwrap).collect();
    let min_c = cell.iter().map(|c| c.0).min().unwrap();
    let min_r = cell.iter().map(|c| c.1).min().unwrap();
    let cells: Vec<(usize, usize)> = cell
        .iter()
        .map(|&(c, r)| ((c - min_c) as usize, (r - min_r) as usize))
        .collect();
    for a in 0..n {
        for b in a + 1..n {
            if cells[a] == cells[b] {
                return Err(GeometryError::NonConformable(format!(
                    "members {a} and {b} occupy the same lattice cell"
                )));
            }
        }
    }
    let cols = cells.iter().map(|c| c.0).max().unwrap() + 2;
    let rows = cells.iter().map(|c| c.1).max().unwrap() + 2;

    let mut lattice: Vec<Option<Point>> = vec![None; cols * rows];
    for (q, &(ci, cj)) in qs.iter().zip(&cells) {
        for (k, &(oi, oj)) in CORNER_OFFSETS.iter().enumerate() {
            let idx = (cj + oj) * cols + ci + oi;
            match lattice[idx] {
                None => lattice[idx] = Some(q.corners[k]),
                Some(p) if p.dist(q.corners[k]) > tol => {
                    return Err(GeometryError::NonConformable(format!(
                        "lattice vertex ({}, {}) receives distinct corners",
                        ci + oi,
                        cj + oj
                    )));
                }
                Some(_) => {}
            }
        }
    }

    // Member edges on each lattice line: segment s joins lattice positions s and s + 1.
    let horizontal_edge = |j: usize, s: usize| cells.iter().any(|&(ci, cj)| ci == s && (cj == j || cj + 1 == j));
    let vertical_edge = |i: usize, s: usize| cells.iter().any(|&(ci, cj)| cj == s && (ci == i || ci + 1 == i));
    let nearest_edge = |count: usize, pos: usize, has: &dyn Fn(usize) -> bool| -> Option<usize> {
        (0..count)
            .filter(|&s| has(s))
            .min_by_key(|&s| if pos <= s { (s - pos, s) } else { (pos - s - 1, s) })
    };

    let mut artificial = Vec::new();
    let known = lattice.clone();
    for j in 0..rows {
        for i in 0..cols {
            if known[j * cols + i].is_some() {
                continue;
            }
            let hs = nearest_edge(cols - 1, i, &|s| horizontal_edge(j, s)).ok_or_else(|| {
                GeometryError::NonConformable(format!("horizontal lattice line {j} has no member edge"))
            })?;
            let vs = nearest_edge(rows - 1, j, &|s| vertical_edge(i, s)).ok_or_else(|| {
                GeometryError::NonConformable(format!("vertical lattice line {i} has no member edge"))
            })?;
            let h0 = known[j * cols + hs].expect("member corner");
            let h1 = known[j * cols + hs + 1].expect("member corner");
            let v0 = known[vs * cols + i].expect("member corner");
            let v1 = known[(vs + 1) * cols + i].expect("member corner");
            let p = match mode {
                ExtensionMode::Tangent => line_intersection(h0, h1, v0, v1).ok_or_else(|| {
                    GeometryError::NonConformable(format!("lattice lines through ({i}, {j}) are parallel"))
                })?,
                ExtensionMode::Axis => {
                    let hy = if i <= hs { h0.y } else { h1.y };
                    let vx = if j <= vs { v0.x } else { v1.x };
                    Point::new(vx, hy)
                }
            };
            lattice[j * cols + i] = Some(p);
            artificial.push(j * cols + i);
        }
    }
    let lattice: Vec<Point> = lattice.into_iter().map(Option::unwrap).collect();

    let iq = Iqiac {
        members: qs.to_vec(),
        cells,
        cols,
        rows,
        lattice,
        artificial,
    };
    for (k, p) in iq.lattice.iter().enumerate() {
        if !dom.contains_strictly(*p) {
            return Err(GeometryError::NonConformable(format!(
                "lattice vertex ({}, {}) at {p} is not strictly inside the domain",
                k % cols,
                k / cols
            )));
        }
    }
    for j in 0..rows {
        for i in 1..cols {
            if iq.vertex(i, j).x - iq.vertex(i - 1, j).x <= tol {
                return Err(GeometryError::NonConformable(format!(
                    "horizontal lattice line {j} is not growing at vertex {i}"
                )));
            }
        }
    }
    for i in 0..cols {
        for j in 1..rows {
            if iq.vertex(i, j).y - iq.vertex(i, j - 1).y <= tol {
                return Err(GeometryError::NonConformable(format!(
                    "vertical lattice line {i} is not growing at vertex {j}"
                )));
            }
        }
    }
    for quad in iq.quads() {
        let p: Vec<Point> = quad.iter().map(|&k| iq.lattice[k]).collect();
        for k in 0..4 {
            let e1 = p[(k + 1) % 4] - p[k];
            let e2 = p[(k + 2) % 4] - p[(k + 1) % 4];
            if e1.cross(e2) <= 1e-12 * e1.norm() * e2.norm() {
                return Err(GeometryError::NonConformable(format!(
                    "lattice cell at ({}, {}) is not a convex quadrilateral",
                    quad[0] % cols,
                    quad[0] / cols
                )));
            }
        }
    }
    Ok(iq)
}

/// Extends every horizontal and vertical lattice line of a QIAC or IQIAC to
/// a SIAC. Horizontal SIAC come first, bottom to top, then vertical ones,
/// left to right.
pub fn decompose_to_siacs(structure: &Iqiac, dom: &Domain, mode: ExtensionMode) -> Result<Vec<Siac>, GeometryError> {
    let mut out = Vec::with_capacity(structure.rows + structure.cols);
    for j in 0..structure.rows {
        out.push(extend_chain(
            &structure.horizontal_line(j),
            dom,
            Orientation::Horizontal,
            mode,
        )?);
    }
    for i in 0..structure.cols {
        out.push(extend_chain(
            &structure.vertical_line(i),
            dom,
            Orientation::Vertical,
            mode,
        )?);
    }
    Ok(out)
}
