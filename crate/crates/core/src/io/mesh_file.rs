use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{Domain, Point};
use crate::gridgen::OverlapMesh;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshFileError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn malformed(line: usize, message: impl Into<String>) -> MeshFileError {
    MeshFileError::Malformed {
        line,
        message: message.into(),
    }
}

/// Serializes a mesh: a `QGMESH 1` header, `m n a b c d`, then one
/// `i j x y fixed` record per node in row-major order. Reals use the shortest
/// representation that parses back to the same value.
pub fn format_mesh(mesh: &OverlapMesh) -> String {
    let d = mesh.domain();
    let mut out = String::with_capacity(mesh.len() * 48 + 64);
    out.push_str("QGMESH 1\n");
    let _ = writeln!(out, "{} {} {:?} {:?} {:?} {:?}", mesh.m(), mesh.n(), d.a, d.b, d.c, d.d);
    for k in 0..mesh.len() {
        let g = mesh.grid_index(k);
        let p = mesh.coords()[k];
        let _ = writeln!(
            out,
            "{} {} {:?} {:?} {}",
            g.i,
            g.j,
            p.x,
            p.y,
            u8::from(mesh.fixed_mask()[k])
        );
    }
    out
}

/// Reads a mesh written by [`format_mesh`].
pub fn parse_mesh(text: &str) -> Result<OverlapMesh, MeshFileError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    match lines.next() {
        Some((_, "QGMESH 1")) => {}
        _ => return Err(malformed(1, "expected header 'QGMESH 1'")),
    }
    let (ln, header) = lines.next().ok_or_else(|| malformed(2, "missing size line"))?;
    let f: Vec<&str> = header.split_whitespace().collect();
    if f.len() != 6 {
        return Err(malformed(ln, "expected 'm n a b c d'"));
    }
    let int = |s: &str, ln: usize| {
        s.parse::<usize>()
            .map_err(|_| malformed(ln, format!("bad integer '{s}'")))
    };
    let real = |s: &str, ln: usize| s.parse::<f64>().map_err(|_| malformed(ln, format!("bad number '{s}'")));
    let (m, n) = (int(f[0], ln)?, int(f[1], ln)?);
    if m < 2 || n < 2 {
        return Err(malformed(ln, "grid must be at least 2x2"));
    }
    let domain = Domain::new(real(f[2], ln)?, real(f[3], ln)?, real(f[4], ln)?, real(f[5], ln)?)
        .map_err(|e| malformed(ln, e.to_string()))?;

    let mut coords = Vec::with_capacity(m * n);
    let mut fixed = Vec::with_capacity(m * n);
    for k in 0..m * n {
        let (ln, rec) = lines
            .next()
            .ok_or_else(|| malformed(k + 3, format!("expected {} node records, found {k}", m * n)))?;
        let f: Vec<&str> = rec.split_whitespace().collect();
        if f.len() != 5 {
            return Err(malformed(ln, "expected 'i j x y fixed'"));
        }
        let (i, j) = (int(f[0], ln)?, int(f[1], ln)?);
        if (i, j) != (k % m, k / m) {
            return Err(malformed(ln, format!("expected node ({}, {})", k % m, k / m)));
        }
        coords.push(Point::new(real(f[2], ln)?, real(f[3], ln)?));
        fixed.push(match f[4] {
            "0" => false,
            "1" => true,
            other => return Err(malformed(ln, format!("fixed flag must be 0 or 1, got '{other}'"))),
        });
    }
    if let Some((ln, extra)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(malformed(ln, format!("unexpected trailing content '{extra}'")));
    }
    Ok(OverlapMesh::from_parts(domain, m, n, coords, fixed))
}
