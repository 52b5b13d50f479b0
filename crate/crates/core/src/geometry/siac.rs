use std::fmt;

use super::primitives::{segment_intersection, Domain, Point, Polyline, SegmentHit, Side};
use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    /// Coordinate that must grow along the curve.
    pub fn along(self, p: Point) -> f64 {
        match self {
            Orientation::Horizontal => p.x,
            Orientation::Vertical => p.y,
        }
    }

    /// Coordinate transverse to the curve.
    pub fn across(self, p: Point) -> f64 {
        match self {
            Orientation::Horizontal => p.y,
            Orientation::Vertical => p.x,
        }
    }

    pub fn other(self) -> Orientation {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Horizontal => f.write_str("horizontal"),
            Orientation::Vertical => f.write_str("vertical"),
        }
    }
}

/// Whether a SIAC segment belongs to the modelled internal boundary or was
/// added to carry the curve out to the external boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentRole {
    Feature,
    Extension,
}

/// How a chain is carried from its end vertices to the external boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtensionMode {
    /// Continue the direction of the end segment.
    #[default]
    Tangent,
    /// Continue parallel to the coordinate axis of the orientation.
    Axis,
}

/// A spanning, growing internal alignment curve.
///
/// Vertices are enumerated left to right (horizontal) or bottom to top
/// (vertical); the first and last lie on opposite sides of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Siac {
    orientation: Orientation,
    vertices: Vec<Point>,
    roles: Vec<SegmentRole>,
    label: String,
}

impl Siac {
    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// One role per segment.
    pub fn roles(&self) -> &[SegmentRole] {
        &self.roles
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn first(&self) -> Point {
        self.vertices[0]
    }

    pub fn last(&self) -> Point {
        self.vertices[self.vertices.len() - 1]
    }

    /// Mean of the transverse coordinate over all vertices.
    pub fn mean_across(&self) -> f64 {
        let sum: f64 = self.vertices.iter().map(|&p| self.orientation.across(p)).sum();
        sum / self.vertices.len() as f64
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    /// Maximal runs of consecutive feature segments, as vertex lists.
    pub fn feature_runs(&self) -> Vec<Vec<Point>> {
        let mut runs = Vec::new();
        let mut current: Vec<Point> = Vec::new();
        for (k, role) in self.roles.iter().enumerate() {
            if *role == SegmentRole::Feature {
                if current.is_empty() {
                    current.push(self.vertices[k]);
                }
                current.push(self.vertices[k + 1]);
            } else if !current.is_empty() {
                runs.push(std::mem::take(&mut current));
            }
        }
        if !current.is_empty() {
            runs.push(current);
        }
        runs
    }

    /// Builds a SIAC from parts without the spanning checks; used after
    /// extension where the invariants were established by construction.
    fn from_parts(orientation: Orientation, vertices: Vec<Point>, roles: Vec<SegmentRole>, label: String) -> Self {
        debug_assert_eq!(vertices.len(), roles.len() + 1);
        Self {
            orientation,
            vertices,
            roles,
            label,
        }
    }
}

/// Checks strict growth of `along` and returns the offending index pair.
fn check_growing(points: &[Point], orientation: Orientation, tol: f64) -> Result<(), GeometryError> {
    for k in 1..points.len() {
        if orientation.along(points[k]) - orientation.along(points[k - 1]) <= tol {
            return Err(GeometryError::NotGrowing(k - 1, k));
        }
    }
    Ok(())
}

/// Validates a polyline as a SIAC, detecting its orientation and
/// re-enumerating vertices left-to-right or bottom-to-top.
pub fn validate_siac(polyline: &Polyline, dom: &Domain) -> Result<Siac, GeometryError> {
    let first = polyline.vertices()[0];
    let last = polyline.vertices()[polyline.len() - 1];
    let on = |s: Side, p: Point| dom.is_on(s, p);

    let spans = |s1: Side, s2: Side| (on(s1, first) && on(s2, last)) || (on(s2, first) && on(s1, last));
    let orientation = if spans(Side::Left, Side::Right) {
        Orientation::Horizontal
    } else if spans(Side::Bottom, Side::Top) {
        Orientation::Vertical
    } else {
        for p in [first, last] {
            if !dom.is_on_boundary(p) {
                return Err(GeometryError::NotSpanning(p));
            }
        }
        return Err(GeometryError::MalformedSiac);
    };

    let mut vertices = polyline.vertices().to_vec();
    if orientation.along(first) > orientation.along(last) {
        vertices.reverse();
    }
    for (k, p) in vertices
        .iter()
        .enumerate()
        .skip(1)
        .take(vertices.len().saturating_sub(2))
    {
        if !dom.contains_strictly(*p) {
            return Err(GeometryError::OutsideDomain(k));
        }
    }
    check_growing(&vertices, orientation, dom.tol())?;
    let roles = vec![SegmentRole::Feature; vertices.len() - 1];
    Ok(Siac::from_parts(orientation, vertices, roles, String::new()))
}

/// Internal alignment curve: a polyline strictly inside the domain that does
/// not cross itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Iac {
    polyline: Polyline,
}

impl Iac {
    pub fn new(polyline: Polyline, dom: &Domain) -> Result<Self, GeometryError> {
        for (k, p) in polyline.vertices().iter().enumerate() {
            if !dom.contains_strictly(*p) {
                return Err(GeometryError::TouchesBoundary(k));
            }
        }
        if let Some((i, j)) = polyline.self_intersection(dom.tol()) {
            return Err(GeometryError::SelfIntersection(i, j));
        }
        Ok(Self { polyline })
    }

    pub fn polyline(&self) -> &Polyline {
        &self.polyline
    }

    /// Horizontal when the total horizontal travel is at least the vertical one.
    pub fn detect_orientation(&self) -> Orientation {
        let (dx, dy) = self.polyline.segments().fold((0.0, 0.0), |(dx, dy), (p, q)| {
            (dx + (q.x - p.x).abs(), dy + (q.y - p.y).abs())
        });
        if dx >= dy {
            Orientation::Horizontal
        } else {
            Orientation::Vertical
        }
    }
}

/// Extends an IAC along its end-segment directions to a SIAC.
pub fn extend_iac_to_siac(iac: &Iac, dom: &Domain, orientation: Orientation) -> Result<Siac, GeometryError> {
    extend_chain(iac.polyline().vertices(), dom, orientation, ExtensionMode::Tangent)
}

/// Carries a growing interior chain out to the two sides of the domain that
/// `orientation` spans. Chain segments are marked as feature segments.
pub fn extend_chain(
    chain: &[Point],
    dom: &Domain,
    orientation: Orientation,
    mode: ExtensionMode,
) -> Result<Siac, GeometryError> {
    if chain.len() < 2 {
        return Err(GeometryError::TooFewVertices(chain.len()));
    }
    let mut pts = chain.to_vec();
    if orientation.along(pts[0]) > orientation.along(pts[pts.len() - 1]) {
        pts.reverse();
    }
    for (k, p) in pts.iter().enumerate() {
        if !dom.contains_strictly(*p) {
            return Err(GeometryError::TouchesBoundary(k));
        }
    }
    check_growing(&pts, orientation, dom.tol())?;

    let (lo, hi) = match orientation {
        Orientation::Horizontal => (dom.a, dom.b),
        Orientation::Vertical => (dom.c, dom.d),
    };
    let (cross_lo, cross_hi) = match orientation {
        Orientation::Horizontal => (dom.c, dom.d),
        Orientation::Vertical => (dom.a, dom.b),
    };
    let make = |along: f64, across: f64| match orientation {
        Orientation::Horizontal => Point::new(along, across),
        Orientation::Vertical => Point::new(across, along),
    };
    let extend_to = |end: Point, inner: Point, target: f64| -> f64 {
        match mode {
            ExtensionMode::Axis => orientation.across(end),
            ExtensionMode::Tangent => {
                let slope = (orientation.across(inner) - orientation.across(end))
                    / (orientation.along(inner) - orientation.along(end));
                orientation.across(end) + (target - orientation.along(end)) * slope
            }
        }
    };

    let n = pts.len();
    let start_across = extend_to(pts[0], pts[1], lo);
    let end_across = extend_to(pts[n - 1], pts[n - 2], hi);
    let tol = dom.tol();
    let inside = |v: f64| v > cross_lo + tol && v < cross_hi - tol;
    if !inside(start_across) {
        return Err(GeometryError::ExtensionEscapesDomain {
            end: "first",
            hit: make(lo, start_across),
        });
    }
    if !inside(end_across) {
        return Err(GeometryError::ExtensionEscapesDomain {
            end: "last",
            hit: make(hi, end_across),
        });
    }

    let mut vertices = Vec::with_capacity(n + 2);
    vertices.push(make(lo, start_across));
    vertices.extend_from_slice(&pts);
    vertices.push(make(hi, end_across));
    let mut roles = vec![SegmentRole::Extension];
    roles.extend(std::iter::repeat_n(SegmentRole::Feature, n - 1));
    roles.push(SegmentRole::Extension);
    Ok(Siac::from_parts(orientation, vertices, roles, String::new()))
}

/// The unique intersection point of a horizontal and a vertical SIAC.
///
/// Hits within tolerance of a vertex of either curve are snapped onto that
/// vertex so both curves can share the exact coordinates.
pub fn intersect_siacs(h: &Siac, v: &Siac, tol: f64) -> Result<Point, GeometryError> {
    let hits = siac_hits(h, v, tol)?;
    match hits.len() {
        0 => Err(GeometryError::NoIntersection),
        1 => {
            let p = hits[0];
            let snapped = h
                .vertices()
                .iter()
                .chain(v.vertices())
                .copied()
                .find(|q| q.dist(p) <= tol)
                .unwrap_or(p);
            Ok(snapped)
        }
        k => Err(GeometryError::MultipleIntersections(k)),
    }
}

/// All distinct intersection points between two SIACs (any orientation).
pub fn siac_hits(s: &Siac, t: &Siac, tol: f64) -> Result<Vec<Point>, GeometryError> {
    let mut hits: Vec<Point> = Vec::new();
    for (p0, p1) in s.segments() {
        for (q0, q1) in t.segments() {
            match segment_intersection(p0, p1, q0, q1, tol) {
                SegmentHit::None => {}
                SegmentHit::Overlap => return Err(GeometryError::MultipleIntersections(usize::MAX)),
                SegmentHit::Point(p) => {
                    if !hits.iter().any(|q| q.dist(p) <= tol) {
                        hits.push(p);
                    }
                }
            }
        }
    }
    Ok(hits)
}
