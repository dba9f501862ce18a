use crate::error::{Error, Result};

/// Uniform rectilinear grid of `nx × ny` cells.
///
/// Vertices are indexed y-major: `v = j·(nx+1) + i`. x-edges join `(i,j)`–`(i+1,j)`,
/// y-edges join `(i,j)`–`(i,j+1)`, faces are indexed by their lower-left vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Grid2 {
    pub fn new(nx: usize, ny: usize, hx: f64, hy: f64, origin: (f64, f64)) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Shape(format!("grid needs at least 2x2 cells, got {nx}x{ny}")));
        }
        if !(hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite()) {
            return Err(Error::Shape(format!("grid spacings must be positive, got {hx}, {hy}")));
        }
        if !(origin.0.is_finite() && origin.1.is_finite()) {
            return Err(Error::Shape("grid origin must be finite".into()));
        }
        Ok(Self {
            nx,
            ny,
            hx,
            hy,
            x0: origin.0,
            y0: origin.1,
        })
    }

    /// Grid with `nv × nv` vertices covering the square `[lo, hi]²`.
    pub fn square(nv: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::rect(nv, nv, (lo, hi), (lo, hi))
    }

    /// Grid with `nvx × nvy` vertices covering `[xa, xb] × [ya, yb]`.
    pub fn rect(nvx: usize, nvy: usize, xr: (f64, f64), yr: (f64, f64)) -> Result<Self> {
        if nvx < 3 || nvy < 3 {
            return Err(Error::Shape(format!(
                "grid needs at least 3x3 vertices, got {nvx}x{nvy}"
            )));
        }
        let nx = nvx - 1;
        let ny = nvy - 1;
        Self::new(
            nx,
            ny,
            (xr.1 - xr.0) / nx as f64,
            (yr.1 - yr.0) / ny as f64,
            (xr.0, yr.0),
        )
    }

    pub fn nvx(&self) -> usize {
        self.nx + 1
    }

    pub fn nvy(&self) -> usize {
        self.ny + 1
    }

    pub fn n_vertices(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn n_xedges(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    pub fn n_yedges(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    pub fn n_faces(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    /// Largest spacing, used as "h" in refinement tolerances.
    pub fn h(&self) -> f64 {
        self.hx.max(self.hy)
    }

    #[inline]
    pub fn vid(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn vij(&self, v: usize) -> (usize, usize) {
        (v % (self.nx + 1), v / (self.nx + 1))
    }

    #[inline]
    pub fn xedge(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn yedge(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn face(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    pub fn vertex_xy(&self, v: usize) -> (f64, f64) {
        let (i, j) = self.vij(v);
        (self.x(i), self.y(j))
    }

    pub fn face_center(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x(i) + 0.5 * self.hx, self.y(j) + 0.5 * self.hy)
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.nx)
    }

    pub fn y_max(&self) -> f64 {
        self.y(self.ny)
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x_max() && y >= self.y0 && y <= self.y_max()
    }

    /// The four corner vertices of face `(i,j)`: `[ll, lr, ul, ur]`.
    pub fn face_vertices(&self, i: usize, j: usize) -> [usize; 4] {
        [
            self.vid(i, j),
            self.vid(i + 1, j),
            self.vid(i, j + 1),
            self.vid(i + 1, j + 1),
        ]
    }

    fn boundary_factor(k: usize, n: usize) -> f64 {
        if k == 0 || k == n {
            0.5
        } else {
            1.0
        }
    }

    /// Dual-cell area of a vertex.
    pub fn vertex_weight(&self, i: usize, j: usize) -> f64 {
        self.cell_area() * Self::boundary_factor(i, self.nx) * Self::boundary_factor(j, self.ny)
    }

    /// Inner-product weight of an x-edge cochain value (area share over `hx²`).
    pub fn xedge_weight(&self, j: usize) -> f64 {
        self.hy / self.hx * Self::boundary_factor(j, self.ny)
    }

    pub fn yedge_weight(&self, i: usize) -> f64 {
        self.hx / self.hy * Self::boundary_factor(i, self.nx)
    }

    pub fn face_weight(&self) -> f64 {
        1.0 / self.cell_area()
    }

    pub fn is_boundary_vertex(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx || j == self.ny
    }

    /// Vertices at least `ring` layers away from the outer boundary.
    pub fn interior_mask(&self, ring: usize) -> Vec<bool> {
        (0..self.n_vertices())
            .map(|v| {
                let (i, j) = self.vij(v);
                i >= ring && j >= ring && i + ring <= self.nx && j + ring <= self.ny
            })
            .collect()
    }

    /// Samples a scalar function at the vertices.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.n_vertices())
            .map(|v| {
                let (x, y) = self.vertex_xy(v);
                f(x, y)
            })
            .collect()
    }

    /// Locates `(x, y)` for bilinear interpolation: face index and local coordinates in `[0,1]²`.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, usize, f64, f64)> {
        let sx = (x - self.x0) / self.hx;
        let sy = (y - self.y0) / self.hy;
        let tol = 1e-9;
        if !(sx >= -tol && sy >= -tol && sx <= self.nx as f64 + tol && sy <= self.ny as f64 + tol)
        {
            return None;
        }
        let i = (sx.floor().max(0.0) as usize).min(self.nx - 1);
        let j = (sy.floor().max(0.0) as usize).min(self.ny - 1);
        let s = (sx - i as f64).clamp(0.0, 1.0);
        let t = (sy - j as f64).clamp(0.0, 1.0);
        Some((i, j, s, t))
    }

    /// Bilinear interpolation of a vertex field.
    pub fn interpolate(&self, values: &[f64], x: f64, y: f64) -> Option<f64> {
        let (i, j, s, t) = self.locate(x, y)?;
        let [a, b, c, d] = self.face_vertices(i, j);
        Some(
            (1.0 - s) * (1.0 - t) * values[a]
                + s * (1.0 - t) * values[b]
                + (1.0 - s) * t * values[c]
                + s * t * values[d],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_indexing() {
        let g = Grid2::square(5, 0.0, 1.0).unwrap();
        assert_eq!(g.nx, 4);
        assert_eq!(g.n_vertices(), 25);
        assert_eq!(g.n_xedges(), 20);
        assert_eq!(g.n_yedges(), 20);
        assert_eq!(g.n_faces(), 16);
        assert_eq!(g.vij(g.vid(3, 2)), (3, 2));
        assert_eq!(g.hx, 0.25);
    }

    #[test]
    fn weights_sum_to_area() {
        let g = Grid2::rect(7, 4, (-1.0, 2.0), (0.0, 0.5)).unwrap();
        let s: f64 = (0..g.n_vertices())
            .map(|v| {
                let (i, j) = g.vij(v);
                g.vertex_weight(i, j)
            })
            .sum();
        assert!((s - 1.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Grid2::new(1, 4, 0.1, 0.1, (0.0, 0.0)).is_err());
        assert!(Grid2::new(4, 4, 0.0, 0.1, (0.0, 0.0)).is_err());
    }

    #[test]
    fn bilinear_reproduces_bilinear_functions() {
        let g = Grid2::square(9, -1.0, 1.0).unwrap();
        let f = |x: f64, y: f64| 1.0 + 2.0 * x - y + 0.5 * x * y;
        let vals = g.sample(f);
        for &(x, y) in &[(0.13, -0.77), (1.0, 1.0), (-1.0, 0.3)] {
            assert!((g.interpolate(&vals, x, y).unwrap() - f(x, y)).abs() < 1e-14);
        }
        assert!(g.interpolate(&vals, 1.1, 0.0).is_none());
    }
}
