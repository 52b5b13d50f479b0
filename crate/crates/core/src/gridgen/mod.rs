//! Overlap mesh construction: a Cartesian grid deformed so that grid lines
//! follow every spanning internal boundary.

mod lines;
mod mesh;

use thiserror::Error;

use crate::geometry::{
    build_iqiac, decompose_to_siacs, extend_iac_to_siac, intersect_siacs, point_segment_distance, siac_hits,
    BoundarySet, Domain, GeometryError, Orientation, Point, Siac,
};

pub use lines::{
    associate_line, initial_grid, redistribute_external_boundary, redistribute_line, snap_wells, Crossing,
    LineAssociation, LineClaims,
};
pub use mesh::{GridIndex, OverlapMesh};

/// Default ratio between grid spacing and the smallest boundary-hit gap.
pub const DEFAULT_FRACTION: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("explicit grid size {m}x{n} is too small; need at least 2x2")]
    GridTooSmall { m: usize, n: usize },
    #[error("smallest boundary-hit gap along the {direction} direction is {gap:e}, below tolerance")]
    DegenerateSpacing { direction: Orientation, gap: f64 },
    #[error("no free {orientation} grid line left for SIAC '{label}'; use a smaller fraction or a larger grid")]
    LineConflict { label: String, orientation: Orientation },
    #[error("SIAC '{label}': two vertices map to node ({}, {}); refine the grid", node.i, node.j)]
    VertexCollision { label: String, node: GridIndex },
    #[error("SIAC '{label}': vertex-to-node mapping is not order preserving; refine the grid")]
    OrderViolation { label: String },
    #[error("well at {well}: the four nearest nodes are all fixed")]
    NoFreeNode { well: Point },
    #[error("well at {well} is not strictly inside the domain")]
    WellOutside { well: Point },
    #[error("well at {well} lies on internal boundary '{label}'")]
    WellOnBoundary { well: Point, label: String },
    #[error("'{label}': {source}")]
    Geometry {
        label: String,
        #[source]
        source: GeometryError,
    },
    #[error("'{first}' and '{second}': {reason}")]
    Arrangement {
        first: String,
        second: String,
        reason: String,
    },
}

impl GridError {
    fn geometry(label: &str, source: GeometryError) -> Self {
        Self::Geometry {
            label: label.to_string(),
            source,
        }
    }
}

/// Grid resolution controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub fraction: f64,
    /// Explicit `(m, n)` overriding the fraction rule.
    pub size: Option<(usize, usize)>,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            fraction: DEFAULT_FRACTION,
            size: None,
        }
    }
}

/// Overlap mesh plus the data it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlap {
    pub mesh: OverlapMesh,
    /// Every spanning curve, in processing order.
    pub siacs: Vec<Siac>,
    pub associations: Vec<LineAssociation>,
    pub wells: Vec<GridIndex>,
}

impl Overlap {
    /// Original internal boundary polylines (extensions excluded).
    pub fn feature_polylines(&self) -> Vec<Vec<Point>> {
        self.siacs.iter().flat_map(|s| s.feature_runs()).collect()
    }
}

/// Reduces every boundary kind to SIAC: QIAC first, then IQIAC groups, IAC,
/// and finally the SIAC given directly.
pub fn collect_siacs(dom: &Domain, b: &BoundarySet) -> Result<Vec<Siac>, GridError> {
    let mut out = Vec::new();
    let push_decomposed = |out: &mut Vec<Siac>, label: &str, siacs: Vec<Siac>| {
        let (mut h, mut v) = (0, 0);
        for s in siacs {
            let tag = match s.orientation() {
                Orientation::Horizontal => {
                    h += 1;
                    format!("{label}/h{}", h - 1)
                }
                Orientation::Vertical => {
                    v += 1;
                    format!("{label}/v{}", v - 1)
                }
            };
            out.push(s.with_label(tag));
        }
    };
    for q in &b.qiacs {
        let siacs =
            decompose_to_siacs(&q.item.to_iqiac(), dom, b.extension).map_err(|e| GridError::geometry(&q.label, e))?;
        push_decomposed(&mut out, &q.label, siacs);
    }
    for g in &b.iqiacs {
        let iq = build_iqiac(&g.item, dom, b.extension).map_err(|e| GridError::geometry(&g.label, e))?;
        let siacs = decompose_to_siacs(&iq, dom, b.extension).map_err(|e| GridError::geometry(&g.label, e))?;
        push_decomposed(&mut out, &g.label, siacs);
    }
    for e in &b.iacs {
        let o = e.item.orientation.unwrap_or_else(|| e.item.iac.detect_orientation());
        let s = extend_iac_to_siac(&e.item.iac, dom, o).map_err(|err| GridError::geometry(&e.label, err))?;
        out.push(s.with_label(e.label.clone()));
    }
    for s in &b.siacs {
        out.push(s.item.clone().with_label(s.label.clone()));
    }
    Ok(out)
}

/// Checks that same-orientation SIAC are disjoint and that every
/// horizontal/vertical pair meets exactly once. Returns the crossing of
/// horizontal `h` and vertical `v` at `[h][v]`, indices relative to the two
/// filtered lists.
pub fn check_arrangement(dom: &Domain, siacs: &[Siac]) -> Result<Vec<Vec<Point>>, GridError> {
    let tol = dom.tol();
    let hs: Vec<&Siac> = siacs
        .iter()
        .filter(|s| s.orientation() == Orientation::Horizontal)
        .collect();
    let vs: Vec<&Siac> = siacs
        .iter()
        .filter(|s| s.orientation() == Orientation::Vertical)
        .collect();
    for group in [&hs, &vs] {
        for (k, s) in group.iter().enumerate() {
            for t in &group[k + 1..] {
                let hits = siac_hits(s, t, tol).unwrap_or_else(|_| vec![Point::new(f64::NAN, f64::NAN)]);
                if !hits.is_empty() {
                    return Err(GridError::Arrangement {
                        first: s.label().to_string(),
                        second: t.label().to_string(),
                        reason: format!("two {} SIAC must never intersect", s.orientation()),
                    });
                }
            }
        }
    }
    let mut crossings = Vec::with_capacity(hs.len());
    for h in &hs {
        let mut row = Vec::with_capacity(vs.len());
        for v in &vs {
            let p = intersect_siacs(h, v, tol).map_err(|e| GridError::Arrangement {
                first: h.label().to_string(),
                second: v.label().to_string(),
                reason: e.to_string(),
            })?;
            row.push(p);
        }
        crossings.push(row);
    }
    Ok(crossings)
}

/// Runs the full overlap construction: boundary reduction, arrangement
/// checks, initial grid, line association and redistribution, external
/// boundary re-spacing and well snapping.
pub fn build_overlap(dom: &Domain, boundaries: &BoundarySet, params: GridParams) -> Result<Overlap, GridError> {
    let siacs = collect_siacs(dom, boundaries)?;
    let crossings = check_arrangement(dom, &siacs)?;
    for &w in &boundaries.wells {
        if !dom.contains_strictly(w) {
            return Err(GridError::WellOutside { well: w });
        }
        for s in &siacs {
            for run in s.feature_runs() {
                if run
                    .windows(2)
                    .any(|seg| point_segment_distance(w, seg[0], seg[1]) <= dom.tol())
                {
                    return Err(GridError::WellOnBoundary {
                        well: w,
                        label: s.label().to_string(),
                    });
                }
            }
        }
    }

    let mut mesh = match params.size {
        Some((m, n)) if m < 2 || n < 2 => return Err(GridError::GridTooSmall { m, n }),
        Some((m, n)) => {
            if !(params.fraction > 0.0 && params.fraction <= 1.0) {
                return Err(GridError::InvalidFraction(params.fraction));
            }
            OverlapMesh::cartesian(*dom, m, n)
        }
        None => initial_grid(dom, &siacs, params.fraction)?,
    };

    let hs: Vec<&Siac> = siacs
        .iter()
        .filter(|s| s.orientation() == Orientation::Horizontal)
        .collect();
    let vs: Vec<&Siac> = siacs
        .iter()
        .filter(|s| s.orientation() == Orientation::Vertical)
        .collect();
    let mut claims = LineClaims::new(&mesh);
    let rows = assign_lines(&mesh, &hs, &mut claims)?;
    let cols = assign_lines(&mesh, &vs, &mut claims)?;

    let mut associations = Vec::with_capacity(siacs.len());
    for (h, s) in hs.iter().enumerate() {
        let cs: Vec<Crossing> = (0..vs.len())
            .map(|v| Crossing {
                point: crossings[h][v],
                node: cols[v],
            })
            .collect();
        associations.push(redistribute_line(&mut mesh, rows[h], s, &cs)?);
    }
    for (v, s) in vs.iter().enumerate() {
        let cs: Vec<Crossing> = (0..hs.len())
            .map(|h| Crossing {
                point: crossings[h][v],
                node: rows[h],
            })
            .collect();
        associations.push(redistribute_line(&mut mesh, cols[v], s, &cs)?);
    }
    redistribute_external_boundary(&mut mesh, &associations)?;
    let wells = snap_wells(&mut mesh, &boundaries.wells)?;

    Ok(Overlap {
        mesh,
        siacs,
        associations,
        wells,
    })
}

/// Associates each SIAC with a grid line and checks that the line order
/// matches the geometric order of the curves.
fn assign_lines(mesh: &OverlapMesh, group: &[&Siac], claims: &mut LineClaims) -> Result<Vec<usize>, GridError> {
    let mut lines = Vec::with_capacity(group.len());
    for s in group {
        lines.push(associate_line(mesh, s, claims)?);
    }
    let mut order: Vec<usize> = (0..group.len()).collect();
    order.sort_by(|&p, &q| {
        let o = group[p].orientation();
        o.across(group[p].first()).total_cmp(&o.across(group[q].first()))
    });
    for w in order.windows(2) {
        if lines[w[1]] <= lines[w[0]] {
            return Err(GridError::OrderViolation {
                label: group[w[1]].label().to_string(),
            });
        }
    }
    Ok(lines)
}
