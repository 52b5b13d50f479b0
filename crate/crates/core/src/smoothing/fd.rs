use crate::geometry::Point;
use crate::gridgen::OverlapMesh;

/// The 3x3 neighbourhood of a node in logical space, with logical spacings.
///
/// `pts[a][b]` holds the node at logical offset `(a - 1, b - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub pts: [[Point; 3]; 3],
    pub dxi: f64,
    pub deta: f64,
}

impl Stencil {
    /// Samples `f(xi, eta)` on the stencil centred at `(xi, eta)`.
    pub fn sample(f: impl Fn(f64, f64) -> Point, xi: f64, eta: f64, dxi: f64, deta: f64) -> Self {
        let mut pts = [[Point::default(); 3]; 3];
        for (a, col) in pts.iter_mut().enumerate() {
            for (b, p) in col.iter_mut().enumerate() {
                *p = f(xi + (a as f64 - 1.0) * dxi, eta + (b as f64 - 1.0) * deta);
            }
        }
        Self { pts, dxi, deta }
    }

    /// Unit-spacing stencil of interior node `(i, j)` read from a coordinate
    /// buffer laid out like the mesh.
    pub fn from_coords(coords: &[Point], m: usize, i: usize, j: usize) -> Self {
        let mut pts = [[Point::default(); 3]; 3];
        for (a, col) in pts.iter_mut().enumerate() {
            for (b, p) in col.iter_mut().enumerate() {
                *p = coords[(j + b - 1) * m + (i + a - 1)];
            }
        }
        Self {
            pts,
            dxi: 1.0,
            deta: 1.0,
        }
    }

    pub fn from_mesh(mesh: &OverlapMesh, i: usize, j: usize) -> Self {
        assert!(
            i > 0 && j > 0 && i + 1 < mesh.m() && j + 1 < mesh.n(),
            "stencil needs an interior node"
        );
        Self::from_coords(mesh.coords(), mesh.m(), i, j)
    }

    fn at(&self, di: i32, dj: i32) -> Point {
        self.pts[(di + 1) as usize][(dj + 1) as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Xi,
    Eta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondDerivative {
    XiXi,
    EtaEta,
    XiEta,
}

/// Central first difference of both coordinates.
pub fn fd_first(s: &Stencil, dir: Direction) -> Point {
    match dir {
        Direction::Xi => (s.at(1, 0) - s.at(-1, 0)) * (1.0 / (2.0 * s.dxi)),
        Direction::Eta => (s.at(0, 1) - s.at(0, -1)) * (1.0 / (2.0 * s.deta)),
    }
}

/// Central second difference of both coordinates; the mixed one uses the
/// four diagonal neighbours.
pub fn fd_second(s: &Stencil, which: SecondDerivative) -> Point {
    match which {
        SecondDerivative::XiXi => (s.at(1, 0) - s.at(0, 0) * 2.0 + s.at(-1, 0)) * (1.0 / (s.dxi * s.dxi)),
        SecondDerivative::EtaEta => (s.at(0, 1) - s.at(0, 0) * 2.0 + s.at(0, -1)) * (1.0 / (s.deta * s.deta)),
        SecondDerivative::XiEta => {
            (s.at(1, 1) - s.at(1, -1) + s.at(-1, -1) - s.at(-1, 1)) * (1.0 / (4.0 * s.dxi * s.deta))
        }
    }
}

/// Coefficients of the inverted elliptic operator
/// `alpha * r_xixi - 2 beta * r_xieta + gamma * r_etaeta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn coefficients(s: &Stencil) -> Coefficients {
    let rx = fd_first(s, Direction::Xi);
    let re = fd_first(s, Direction::Eta);
    Coefficients {
        alpha: re.dot(re),
        beta: rx.dot(re),
        gamma: rx.dot(rx),
    }
}

/// Covariant metric components and the signed Jacobian at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    /// Determinant `g11 g22 - g12^2`.
    pub g: f64,
    /// `x_xi y_eta - x_eta y_xi`.
    pub jacobian: f64,
}

pub fn metric_tensor(s: &Stencil) -> MetricSample {
    let rx = fd_first(s, Direction::Xi);
    let re = fd_first(s, Direction::Eta);
    let (g11, g12, g22) = (rx.dot(rx), rx.dot(re), re.dot(re));
    MetricSample {
        g11,
        g12,
        g22,
        g: g11 * g22 - g12 * g12,
        jacobian: rx.cross(re),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(f: impl Fn(f64, f64) -> f64, xi: f64, eta: f64, h: f64) -> Stencil {
        Stencil::sample(|a, b| Point::new(f(a, b), 0.0), xi, eta, h, h)
    }

    #[test]
    fn linear_function_derivatives() {
        let s = scalar(|xi, _| xi, 3.0, 7.0, 1.0);
        assert_eq!(fd_first(&s, Direction::Xi).x, 1.0);
        assert_eq!(fd_second(&s, SecondDerivative::XiXi).x, 0.0);
        assert_eq!(fd_second(&s, SecondDerivative::XiEta).x, 0.0);
        let s = scalar(|xi, _| xi, 0.3, 0.7, 0.1);
        assert!((fd_first(&s, Direction::Xi).x - 1.0).abs() < 1e-14);
        assert!(fd_second(&s, SecondDerivative::XiXi).x.abs() < 1e-12);
    }

    #[test]
    fn bilinear_mixed_derivative() {
        let s = scalar(|xi, eta| xi * eta, 2.0, 3.0, 1.0);
        assert_eq!(fd_second(&s, SecondDerivative::XiEta).x, 1.0);
    }

    #[test]
    fn cubic_first_difference_is_second_order() {
        // Error of the central difference of xi^3 is exactly h^2.
        let err = |h: f64| (fd_first(&scalar(|xi, _| xi.powi(3), 1.0, 0.0, h), Direction::Xi).x - 3.0).abs();
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 4.0).abs() < 1e-6, "{ratio}");
    }

    #[test]
    fn uniform_grid_coefficients() {
        let h = 0.25;
        let s = Stencil::sample(|xi, eta| Point::new(h * xi, h * eta), 4.0, 5.0, 1.0, 1.0);
        let c = coefficients(&s);
        assert_eq!((c.alpha, c.beta, c.gamma), (h * h, 0.0, h * h));
        let g = metric_tensor(&s);
        assert_eq!(g.jacobian, h * h);
        assert_eq!(g.g12, 0.0);
    }

    #[test]
    fn sheared_coefficients() {
        let sh = 0.4;
        let s = Stencil::sample(|xi, eta| Point::new(xi + sh * eta, eta), 0.0, 0.0, 1.0, 1.0);
        let c = coefficients(&s);
        assert!((c.alpha - (sh * sh + 1.0)).abs() < 1e-15);
        assert!((c.beta - sh).abs() < 1e-15);
        assert!((c.gamma - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coefficients_match_metric() {
        let s = Stencil::sample(
            |xi, eta| Point::new(xi + 0.1 * (xi * eta).sin(), eta + 0.2 * xi * xi),
            0.4,
            0.9,
            0.3,
            0.2,
        );
        let c = coefficients(&s);
        let g = metric_tensor(&s);
        assert_eq!((c.alpha, c.beta, c.gamma), (g.g22, g.g12, g.g11));
        assert!((g.g - g.jacobian * g.jacobian).abs() <= 1e-12 * g.g.abs());
    }

    #[test]
    fn mirrored_grid_has_negative_jacobian() {
        let s = Stencil::sample(|xi, eta| Point::new(-xi, eta), 0.0, 0.0, 1.0, 1.0);
        assert!(metric_tensor(&s).jacobian < 0.0);
    }
}
