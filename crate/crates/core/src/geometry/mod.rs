//! Internal boundary modelling: validation and normalisation of alignment
//! curves, and reduction of every boundary kind to spanning curves.

mod primitives;
mod qiac;
mod siac;

use thiserror::Error;

pub use primitives::{
    lerp, line_intersection, point_segment_distance, segment_intersection, Domain, Point, Polyline, Rect, SegmentHit,
    Side,
};
pub use qiac::{are_associated, build_iqiac, decompose_to_siacs, minimal_rectangle, Iqiac, Qiac};
pub use siac::{
    extend_chain, extend_iac_to_siac, intersect_siacs, siac_hits, validate_siac, ExtensionMode, Iac, Orientation,
    SegmentRole, Siac,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid domain [{a}, {b}] x [{c}, {d}]: need a < b and c < d")]
    InvalidDomain { a: f64, b: f64, c: f64, d: f64 },
    #[error("need at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("zero-length segment after vertex {0}")]
    DegenerateSegment(usize),
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),
    #[error("malformed SIAC: it runs from a horizontal side to a vertical one")]
    MalformedSiac,
    #[error("not growing between vertices {0} and {1}")]
    NotGrowing(usize, usize),
    #[error("endpoint {0} is not on the external boundary")]
    NotSpanning(Point),
    #[error("vertex {0} is not strictly inside the domain")]
    OutsideDomain(usize),
    #[error("vertex {0} touches the external boundary")]
    TouchesBoundary(usize),
    #[error("segments {0} and {1} intersect")]
    SelfIntersection(usize, usize),
    #[error("extension beyond the {end} vertex leaves through the wrong side at {hit}")]
    ExtensionEscapesDomain { end: &'static str, hit: Point },
    #[error("QIAC is not convex")]
    NonConvex,
    #[error("a QIAC needs exactly 4 corners, got {0}")]
    WrongCornerCount(usize),
    #[error("QIAC group members are not associated")]
    NotAssociated,
    #[error("IQIAC is not a conformal convex quad partition: {0}")]
    NonConformable(String),
    #[error("a horizontal and a vertical SIAC must intersect, these do not")]
    NoIntersection,
    #[error("a horizontal and a vertical SIAC must intersect exactly once, these meet {} times", display_count(*.0))]
    MultipleIntersections(usize),
}

fn display_count(k: usize) -> String {
    if k == usize::MAX {
        "infinitely many".into()
    } else {
        k.to_string()
    }
}

/// A boundary item carrying the name it was given in the input.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeled<T> {
    pub label: String,
    pub item: T,
}

impl<T> Labeled<T> {
    pub fn new(label: impl Into<String>, item: T) -> Self {
        Self {
            label: label.into(),
            item,
        }
    }
}

/// Internal alignment curve together with an optional forced orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct IacEntry {
    pub iac: Iac,
    pub orientation: Option<Orientation>,
}

/// Every internal boundary of a problem.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundarySet {
    pub iacs: Vec<Labeled<IacEntry>>,
    pub siacs: Vec<Labeled<Siac>>,
    pub qiacs: Vec<Labeled<Qiac>>,
    pub iqiacs: Vec<Labeled<Vec<Qiac>>>,
    /// Interior points that must become mesh vertices.
    pub wells: Vec<Point>,
    /// How QIAC and IQIAC lattice lines reach the external boundary.
    pub extension: ExtensionMode,
}

impl BoundarySet {
    pub fn is_empty(&self) -> bool {
        self.iacs.is_empty()
            && self.siacs.is_empty()
            && self.qiacs.is_empty()
            && self.iqiacs.is_empty()
            && self.wells.is_empty()
    }
}
