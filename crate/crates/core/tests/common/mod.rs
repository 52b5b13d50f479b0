//! Shared fixtures: random meshes and dense linear-algebra oracles.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use quadgrid::geometry::{Domain, Point};
use quadgrid::gridgen::OverlapMesh;
use quadgrid::solvers::NonlinearSystem;
use rand::Rng;

/// Cartesian `m x n` mesh on the unit square with interior nodes jittered by
/// up to `jitter` cell widths and each interior node fixed with probability
/// `p_fixed`.
pub fn random_mesh(rng: &mut impl Rng, m: usize, n: usize, jitter: f64, p_fixed: f64) -> OverlapMesh {
    let base = OverlapMesh::cartesian(Domain::unit(), m, n);
    let (hx, hy) = (1.0 / (m - 1) as f64, 1.0 / (n - 1) as f64);
    let mut coords = base.coords().to_vec();
    let mut fixed = base.fixed_mask().to_vec();
    for j in 1..n - 1 {
        for i in 1..m - 1 {
            let k = j * m + i;
            coords[k] = coords[k]
                + Point::new(
                    rng.gen_range(-jitter..=jitter) * hx,
                    rng.gen_range(-jitter..=jitter) * hy,
                );
            fixed[k] = rng.gen_bool(p_fixed);
        }
    }
    OverlapMesh::from_parts(*base.domain(), m, n, coords, fixed)
}

/// Same mesh with every coordinate (fixed or not) mapped through `f`.
pub fn map_mesh(mesh: &OverlapMesh, f: impl Fn(Point) -> Point) -> OverlapMesh {
    let coords = mesh.coords().iter().map(|&p| f(p)).collect();
    OverlapMesh::from_parts(*mesh.domain(), mesh.m(), mesh.n(), coords, mesh.fixed_mask().to_vec())
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn inf_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Dense Jacobian by central differences, one column per unknown.
pub fn dense_jacobian<S: NonlinearSystem>(sys: &S, v: &[f64]) -> DMatrix<f64> {
    let r = sys.dim();
    let mut jac = DMatrix::zeros(r, r);
    let mut x = v.to_vec();
    for k in 0..r {
        let h = 1e-6 * (1.0 + v[k].abs());
        x[k] = v[k] + h;
        let fp = sys.residual(&x).unwrap();
        x[k] = v[k] - h;
        let fm = sys.residual(&x).unwrap();
        x[k] = v[k];
        for i in 0..r {
            jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// Plain Newton iteration with a dense LU solve and step halving on `||F||`.
pub fn dense_newton<S: NonlinearSystem>(sys: &S, v0: &[f64], tol: f64, max_iters: usize) -> Option<Vec<f64>> {
    let mut v = v0.to_vec();
    let mut f = sys.residual(&v).ok()?;
    for _ in 0..max_iters {
        if norm(&f) <= tol {
            return Some(v);
        }
        let jac = dense_jacobian(sys, &v);
        let step = jac.lu().solve(&(-DVector::from_column_slice(&f)))?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = v.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
            let ft = sys.residual(&trial).ok()?;
            if norm(&ft) < norm(&f) || t < 1e-6 {
                v = trial;
                f = ft;
                break;
            }
            t *= 0.5;
        }
    }
    (norm(&f) <= tol).then_some(v)
}

/// Convex quad centred in the unit square with mildly tilted edges.
pub fn random_qiac(rng: &mut impl Rng) -> quadgrid::geometry::Qiac {
    let (cx, cy) = (rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7));
    let (w, h) = (rng.gen_range(0.08..0.15), rng.gen_range(0.08..0.15));
    let mut d = || rng.gen_range(-0.02..0.02);
    let c = [
        Point::new(cx - w + d(), cy - h + d()),
        Point::new(cx + w + d(), cy - h + d()),
        Point::new(cx + w + d(), cy + h + d()),
        Point::new(cx - w + d(), cy + h + d()),
    ];
    quadgrid::geometry::Qiac::new(&c, &Domain::unit()).expect("perturbed rectangle is convex")
}

/// Cell patterns of a 2x2 block used to build quad groups.
pub const GROUP_PATTERNS: &[&[(usize, usize)]] = &[
    &[(0, 0), (1, 0)],
    &[(0, 0), (0, 1)],
    &[(0, 0), (1, 0), (0, 1), (1, 1)],
    &[(0, 0), (1, 0), (0, 1)],
    &[(0, 0), (1, 1)],
];

/// Quads cut from one perturbed 3x3 lattice following `pattern`.
pub fn random_group(rng: &mut impl Rng, pattern: &[(usize, usize)]) -> Vec<quadgrid::geometry::Qiac> {
    let mut xs = [0.3; 3];
    let mut ys = [0.3; 3];
    for k in 1..3 {
        xs[k] = xs[k - 1] + rng.gen_range(0.1..0.14);
        ys[k] = ys[k - 1] + rng.gen_range(0.1..0.14);
    }
    let mut nodes = [[Point::default(); 3]; 3];
    for (j, row) in nodes.iter_mut().enumerate() {
        for (i, p) in row.iter_mut().enumerate() {
            *p = Point::new(
                xs[i] + rng.gen_range(-0.015..0.015),
                ys[j] + rng.gen_range(-0.015..0.015),
            );
        }
    }
    pattern
        .iter()
        .map(|&(i, j)| {
            let c = [nodes[j][i], nodes[j][i + 1], nodes[j + 1][i + 1], nodes[j + 1][i]];
            quadgrid::geometry::Qiac::new(&c, &Domain::unit()).expect("lattice cell is convex")
        })
        .collect()
}
