use std::fmt::Write as _;

use crate::geometry::Point;
use crate::gridgen::OverlapMesh;

/// Legacy ASCII VTK structured grid with the fixed mask as point data.
pub fn format_vtk(mesh: &OverlapMesh, title: &str) -> String {
    let mut out = String::with_capacity(mesh.len() * 40 + 256);
    out.push_str("# vtk DataFile Version 3.0\n");
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    let _ = writeln!(out, "{title}");
    out.push_str("ASCII\nDATASET STRUCTURED_GRID\n");
    let _ = writeln!(out, "DIMENSIONS {} {} 1", mesh.m(), mesh.n());
    let _ = writeln!(out, "POINTS {} double", mesh.len());
    for p in mesh.coords() {
        let _ = writeln!(out, "{:?} {:?} 0", p.x, p.y);
    }
    let _ = writeln!(out, "POINT_DATA {}", mesh.len());
    out.push_str("SCALARS fixed int 1\nLOOKUP_TABLE default\n");
    for &f in mesh.fixed_mask() {
        let _ = writeln!(out, "{}", u8::from(f));
    }
    out
}

const SVG_SIZE: f64 = 800.0;
const SVG_MARGIN: f64 = 10.0;

/// Draws the mesh cells with thin strokes, the internal boundaries with thick
/// strokes and the fixed nodes as dots.
pub fn format_svg(mesh: &OverlapMesh, boundaries: &[Vec<Point>]) -> String {
    let d = mesh.domain();
    let scale = SVG_SIZE / d.width().max(d.height());
    let (w, h) = (
        d.width() * scale + 2.0 * SVG_MARGIN,
        d.height() * scale + 2.0 * SVG_MARGIN,
    );
    let map = |p: Point| ((p.x - d.a) * scale + SVG_MARGIN, (d.d - p.y) * scale + SVG_MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str("<g fill=\"none\" stroke=\"#555\" stroke-width=\"0.6\">\n");
    for j in 0..mesh.n() - 1 {
        for i in 0..mesh.m() - 1 {
            out.push_str("<polygon points=\"");
            for (k, (a, b)) in [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)].into_iter().enumerate() {
                let (x, y) = map(mesh.point(a, b));
                let sep = if k == 0 { "" } else { " " };
                let _ = write!(out, "{sep}{x:.3},{y:.3}");
            }
            out.push_str("\"/>\n");
        }
    }
    out.push_str("</g>\n<g fill=\"none\" stroke=\"#c00\" stroke-width=\"2.5\">\n");
    for line in boundaries {
        out.push_str("<path d=\"");
        for (k, p) in line.iter().enumerate() {
            let (x, y) = map(*p);
            let _ = write!(out, "{}{x:.3},{y:.3}", if k == 0 { "M" } else { " L" });
        }
        out.push_str("\"/>\n");
    }
    out.push_str("</g>\n<g fill=\"#00c\">\n");
    for (k, p) in mesh.coords().iter().enumerate() {
        if mesh.fixed_mask()[k] {
            let (x, y) = map(*p);
            let _ = writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"1.6\"/>");
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;

    #[test]
    fn vtk_header_and_counts() {
        let mesh = OverlapMesh::cartesian(Domain::unit(), 3, 2);
        let text = format_vtk(&mesh, "t");
        assert!(text.contains("DATASET STRUCTURED_GRID\nDIMENSIONS 3 2 1\nPOINTS 6 double\n"));
        assert!(text.contains("POINT_DATA 6"));
        assert_eq!(text.lines().count(), 5 + 1 + 6 + 3 + 6);
    }

    #[test]
    fn svg_element_counts() {
        let mesh = OverlapMesh::cartesian(Domain::unit(), 5, 4);
        let lines = vec![vec![Point::new(0.0, 0.5), Point::new(1.0, 0.5)]];
        let svg = format_svg(&mesh, &lines);
        assert_eq!(svg.matches("<polygon").count(), 4 * 3);
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches("<circle").count(), mesh.fixed_count());
    }
}
