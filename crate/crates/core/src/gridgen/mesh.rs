use crate::geometry::{lerp, Domain, Point};

/// Logical node position: column `i`, row `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridIndex {
    pub i: usize,
    pub j: usize,
}

impl GridIndex {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

/// Structured `m x n` grid of physical node positions with a fixed-node mask.
///
/// Nodes are stored row-major: node `(i, j)` lives at `j * m + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMesh {
    domain: Domain,
    m: usize,
    n: usize,
    coords: Vec<Point>,
    fixed: Vec<bool>,
}

impl OverlapMesh {
    /// Uniform Cartesian grid over the domain with only the external boundary fixed.
    pub fn cartesian(domain: Domain, m: usize, n: usize) -> Self {
        assert!(m >= 2 && n >= 2, "a grid needs at least two nodes per direction");
        let mut coords = Vec::with_capacity(m * n);
        let mut fixed = Vec::with_capacity(m * n);
        for j in 0..n {
            let y = lerp(domain.c, domain.d, j as f64 / (n - 1) as f64);
            for i in 0..m {
                let x = lerp(domain.a, domain.b, i as f64 / (m - 1) as f64);
                coords.push(Point::new(x, y));
                fixed.push(i == 0 || j == 0 || i == m - 1 || j == n - 1);
            }
        }
        Self {
            domain,
            m,
            n,
            coords,
            fixed,
        }
    }

    /// Assembles a mesh from raw parts, forcing the external boundary fixed.
    pub fn from_parts(domain: Domain, m: usize, n: usize, coords: Vec<Point>, mut fixed: Vec<bool>) -> Self {
        assert!(m >= 2 && n >= 2);
        assert_eq!(coords.len(), m * n);
        assert_eq!(fixed.len(), m * n);
        for j in 0..n {
            for i in 0..m {
                if i == 0 || j == 0 || i == m - 1 || j == n - 1 {
                    fixed[j * m + i] = true;
                }
            }
        }
        Self {
            domain,
            m,
            n,
            coords,
            fixed,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Nodes per horizontal grid line.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Nodes per vertical grid line.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.m && j < self.n);
        j * self.m + i
    }

    pub fn grid_index(&self, k: usize) -> GridIndex {
        GridIndex::new(k % self.m, k / self.m)
    }

    pub fn point(&self, i: usize, j: usize) -> Point {
        self.coords[self.index(i, j)]
    }

    pub fn set_point(&mut self, i: usize, j: usize, p: Point) {
        let k = self.index(i, j);
        self.coords[k] = p;
    }

    pub fn is_fixed(&self, i: usize, j: usize) -> bool {
        self.fixed[self.index(i, j)]
    }

    pub fn fix(&mut self, i: usize, j: usize) {
        let k = self.index(i, j);
        self.fixed[k] = true;
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.m - 1 || j == self.n - 1
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [Point] {
        &mut self.coords
    }

    pub fn fixed_mask(&self) -> &[bool] {
        &self.fixed
    }

    pub fn fixed_count(&self) -> usize {
        self.fixed.iter().filter(|&&f| f).count()
    }

    /// Abscissa of column `i` in the initial Cartesian grid.
    pub fn cartesian_x(&self, i: usize) -> f64 {
        lerp(self.domain.a, self.domain.b, i as f64 / (self.m - 1) as f64)
    }

    /// Ordinate of row `j` in the initial Cartesian grid.
    pub fn cartesian_y(&self, j: usize) -> f64 {
        lerp(self.domain.c, self.domain.d, j as f64 / (self.n - 1) as f64)
    }
}
