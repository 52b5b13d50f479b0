use std::fmt;
use std::ops::{Add, Mul, Sub};

use super::GeometryError;

/// A point (or vector) in the physical plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// `self + (other - self) * t`, returning `other` exactly at `t == 1`.
    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(lerp(self.x, other.x, t), lerp(self.y, other.y, t))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Linear interpolation that hits both end values exactly.
pub fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 1.0 {
        b
    } else {
        a + (b - a) * t
    }
}

/// One of the four sides of the rectangular domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// x = a
    Left,
    /// x = b
    Right,
    /// y = c
    Bottom,
    /// y = d
    Top,
}

/// The rectangle `[a, b] x [c, d]` together with the absolute geometric
/// tolerance used for every on-boundary, collinearity and uniqueness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    tol: f64,
}

impl Domain {
    /// Relative factor applied to the diagonal to obtain the default tolerance.
    pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-9;

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, GeometryError> {
        let finite = [a, b, c, d].iter().all(|v| v.is_finite());
        if !finite || a >= b || c >= d {
            return Err(GeometryError::InvalidDomain { a, b, c, d });
        }
        let diag = (b - a).hypot(d - c);
        Ok(Self {
            a,
            b,
            c,
            d,
            tol: Self::DEFAULT_RELATIVE_TOLERANCE * diag,
        })
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0).expect("unit square is valid")
    }

    /// Replaces the absolute geometric tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        assert!(
            tol.is_finite() && tol >= 0.0,
            "tolerance must be finite and non-negative"
        );
        self.tol = tol;
        self
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.d - self.c
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Side length used to normalise mesh differences.
    pub fn side_length(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.a, self.c),
            Point::new(self.b, self.c),
            Point::new(self.b, self.d),
            Point::new(self.a, self.d),
        ]
    }

    /// Inside the closed rectangle, up to tolerance.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.a - self.tol && p.x <= self.b + self.tol && p.y >= self.c - self.tol && p.y <= self.d + self.tol
    }

    /// Inside and farther than the tolerance from every side.
    pub fn contains_strictly(&self, p: Point) -> bool {
        p.x > self.a + self.tol && p.x < self.b - self.tol && p.y > self.c + self.tol && p.y < self.d - self.tol
    }

    pub fn is_on(&self, side: Side, p: Point) -> bool {
        let t = self.tol;
        match side {
            Side::Left => (p.x - self.a).abs() <= t && p.y >= self.c - t && p.y <= self.d + t,
            Side::Right => (p.x - self.b).abs() <= t && p.y >= self.c - t && p.y <= self.d + t,
            Side::Bottom => (p.y - self.c).abs() <= t && p.x >= self.a - t && p.x <= self.b + t,
            Side::Top => (p.y - self.d).abs() <= t && p.x >= self.a - t && p.x <= self.b + t,
        }
    }

    pub fn is_on_boundary(&self, p: Point) -> bool {
        [Side::Left, Side::Right, Side::Bottom, Side::Top]
            .iter()
            .any(|&s| self.is_on(s, p))
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn bounding(points: &[Point]) -> Self {
        let mut r = Rect {
            xmin: f64::INFINITY,
            xmax: f64::NEG_INFINITY,
            ymin: f64::INFINITY,
            ymax: f64::NEG_INFINITY,
        };
        for p in points {
            r.xmin = r.xmin.min(p.x);
            r.xmax = r.xmax.max(p.x);
            r.ymin = r.ymin.min(p.y);
            r.ymax = r.ymax.max(p.y);
        }
        r
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x >= self.xmin - tol && p.x <= self.xmax + tol && p.y >= self.ymin - tol && p.y <= self.ymax + tol
    }

    /// Closed-set intersection: sharing a single corner counts.
    pub fn intersects(&self, other: &Rect, tol: f64) -> bool {
        self.xmin <= other.xmax + tol
            && other.xmin <= self.xmax + tol
            && self.ymin <= other.ymax + tol
            && other.ymin <= self.ymax + tol
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.xmin, self.ymin),
            Point::new(self.xmax, self.ymin),
            Point::new(self.xmax, self.ymax),
            Point::new(self.xmin, self.ymax),
        ]
    }
}

/// Result of intersecting two closed segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentHit {
    None,
    Point(Point),
    /// Collinear segments sharing more than a point.
    Overlap,
}

/// Intersects the closed segments `p0p1` and `q0q1` with absolute tolerance `tol`.
pub fn segment_intersection(p0: Point, p1: Point, q0: Point, q1: Point, tol: f64) -> SegmentHit {
    let r = p1 - p0;
    let s = q1 - q0;
    let rl = r.norm();
    let sl = s.norm();
    if rl == 0.0 || sl == 0.0 {
        // Degenerate input; treat as a point test.
        let (a, b, c) = if rl == 0.0 { (q0, q1, p0) } else { (p0, p1, q0) };
        return if point_segment_distance(c, a, b) <= tol {
            SegmentHit::Point(c)
        } else {
            SegmentHit::None
        };
    }
    let denom = r.cross(s);
    let qp = q0 - p0;
    if denom.abs() <= 1e-12 * rl * sl {
        // Parallel.
        if (qp.cross(r) / rl).abs() > tol {
            return SegmentHit::None;
        }
        let dir = r * (1.0 / rl);
        let t0 = qp.dot(dir);
        let t1 = (q1 - p0).dot(dir);
        let lo = t0.min(t1).max(0.0);
        let hi = t0.max(t1).min(rl);
        if hi < lo - tol {
            SegmentHit::None
        } else if hi - lo > tol {
            SegmentHit::Overlap
        } else {
            SegmentHit::Point(p0 + dir * (0.5 * (lo + hi)).clamp(0.0, rl))
        }
    } else {
        let t = qp.cross(s) / denom;
        let u = qp.cross(r) / denom;
        let tt = tol / rl;
        let ut = tol / sl;
        if t < -tt || t > 1.0 + tt || u < -ut || u > 1.0 + ut {
            SegmentHit::None
        } else {
            SegmentHit::Point(p0 + r * t.clamp(0.0, 1.0))
        }
    }
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Intersection of the infinite lines through `p0p1` and `q0q1`.
pub fn line_intersection(p0: Point, p1: Point, q0: Point, q1: Point) -> Option<Point> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = r.cross(s);
    if denom.abs() <= 1e-14 * r.norm() * s.norm() {
        return None;
    }
    let t = (q0 - p0).cross(s) / denom;
    Some(p0 + r * t)
}

/// Ordered vertex list; the raw material of every internal boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<Point>,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 2 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        for (k, p) in vertices.iter().enumerate() {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite(k));
            }
        }
        for k in 1..vertices.len() {
            if vertices[k] == vertices[k - 1] {
                return Err(GeometryError::DegenerateSegment(k - 1));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }

    /// Index pair of the first two non-adjacent segments that touch, if any.
    pub fn self_intersection(&self, tol: f64) -> Option<(usize, usize)> {
        let segs: Vec<_> = self.segments().collect();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let hit = segment_intersection(segs[i].0, segs[i].1, segs[j].0, segs[j].1, tol);
                match hit {
                    SegmentHit::None => {}
                    SegmentHit::Overlap => return Some((i, j)),
                    SegmentHit::Point(p) => {
                        // Consecutive segments legitimately share their joint.
                        if j == i + 1 && p.dist(segs[i].1) <= tol {
                            continue;
                        }
                        return Some((i, j));
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_rejects_inverted_bounds() {
        assert!(Domain::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(Domain::new(0.0, 1.0, 0.5, 0.5).is_err());
        let d = Domain::unit();
        assert!((d.tol() - 1e-9 * 2f64.sqrt()).abs() < 1e-24);
    }

    #[test]
    fn crossing_segments_meet_once() {
        let hit = segment_intersection(
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 0.0),
            1e-12,
        );
        assert_eq!(hit, SegmentHit::Point(Point::new(0.5, 0.5)));
    }

    #[test]
    fn collinear_overlap_is_reported() {
        let hit = segment_intersection(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(2.0, 0.0),
            1e-12,
        );
        assert_eq!(hit, SegmentHit::Overlap);
        let touch = segment_intersection(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            1e-12,
        );
        assert_eq!(touch, SegmentHit::Point(Point::new(1.0, 0.0)));
    }

    #[test]
    fn disjoint_segments_miss() {
        let hit = segment_intersection(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 0.1),
            Point::new(1.0, 0.2),
            1e-12,
        );
        assert_eq!(hit, SegmentHit::None);
    }

    #[test]
    fn polyline_rejects_repeated_vertex() {
        let p = Point::new(0.2, 0.2);
        assert_eq!(
            Polyline::new(vec![p, p, Point::new(0.3, 0.3)]),
            Err(GeometryError::DegenerateSegment(0))
        );
        assert_eq!(Polyline::new(vec![p]), Err(GeometryError::TooFewVertices(1)));
    }

    #[test]
    fn self_intersection_detected() {
        let pl = Polyline::new(vec![
            Point::new(0.1, 0.1),
            Point::new(0.9, 0.9),
            Point::new(0.9, 0.1),
            Point::new(0.1, 0.9),
        ])
        .unwrap();
        assert_eq!(pl.self_intersection(1e-12), Some((0, 2)));
        let ok = Polyline::new(vec![Point::new(0.1, 0.1), Point::new(0.5, 0.3), Point::new(0.9, 0.1)]).unwrap();
        assert_eq!(ok.self_intersection(1e-12), None);
    }
}
