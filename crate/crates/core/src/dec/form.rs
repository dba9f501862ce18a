use super::grid::Grid2;
use crate::error::{Error, Result};

/// Where the coefficients of a form live.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// Cochain values: 1-forms integrated over edges, 2-forms integrated over faces.
    Staggered,
    /// Pointwise components at the vertices (`dx`, `dy` for 1-forms, the `dx∧dy`
    /// density for 2-forms). 0-forms always use this layout.
    Colocated,
}

/// A degree-tagged discrete differential form on a [`Grid2`].
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteForm {
    grid: Grid2,
    degree: u8,
    layout: Layout,
    comps: Vec<Vec<f64>>,
}

fn check_len(name: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Shape(format!("{name}: expected {want} values, got {got}")));
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<()> {
    if let Some(p) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Shape(format!("non-finite coefficient at index {p}")));
    }
    Ok(())
}

impl DiscreteForm {
    pub(crate) fn from_parts(grid: Grid2, degree: u8, layout: Layout, comps: Vec<Vec<f64>>) -> Self {
        debug_assert!(degree <= 2);
        Self {
            grid,
            degree,
            layout: if degree == 0 { Layout::Colocated } else { layout },
            comps,
        }
    }

    pub fn zero(grid: Grid2, degree: u8, layout: Layout) -> Result<Self> {
        let layout = if degree == 0 { Layout::Colocated } else { layout };
        let comps = match (degree, layout) {
            (0, _) => vec![vec![0.0; grid.n_vertices()]],
            (1, Layout::Staggered) => vec![vec![0.0; grid.n_xedges()], vec![0.0; grid.n_yedges()]],
            (1, Layout::Colocated) => vec![vec![0.0; grid.n_vertices()]; 2],
            (2, Layout::Staggered) => vec![vec![0.0; grid.n_faces()]],
            (2, Layout::Colocated) => vec![vec![0.0; grid.n_vertices()]],
            _ => return Err(Error::Degree(format!("degree {degree} > 2 on a 2D grid"))),
        };
        Ok(Self::from_parts(grid, degree, layout, comps))
    }

    pub fn zero_form(grid: Grid2, values: Vec<f64>) -> Result<Self> {
        check_len("0-form", values.len(), grid.n_vertices())?;
        check_finite(&values)?;
        Ok(Self::from_parts(grid, 0, Layout::Colocated, vec![values]))
    }

    pub fn one_form_staggered(grid: Grid2, xedges: Vec<f64>, yedges: Vec<f64>) -> Result<Self> {
        check_len("x-edges", xedges.len(), grid.n_xedges())?;
        check_len("y-edges", yedges.len(), grid.n_yedges())?;
        check_finite(&xedges)?;
        check_finite(&yedges)?;
        Ok(Self::from_parts(grid, 1, Layout::Staggered, vec![xedges, yedges]))
    }

    pub fn one_form_colocated(grid: Grid2, dx: Vec<f64>, dy: Vec<f64>) -> Result<Self> {
        check_len("dx component", dx.len(), grid.n_vertices())?;
        check_len("dy component", dy.len(), grid.n_vertices())?;
        check_finite(&dx)?;
        check_finite(&dy)?;
        Ok(Self::from_parts(grid, 1, Layout::Colocated, vec![dx, dy]))
    }

    pub fn two_form_staggered(grid: Grid2, faces: Vec<f64>) -> Result<Self> {
        check_len("faces", faces.len(), grid.n_faces())?;
        check_finite(&faces)?;
        Ok(Self::from_parts(grid, 2, Layout::Staggered, vec![faces]))
    }

    pub fn two_form_colocated(grid: Grid2, density: Vec<f64>) -> Result<Self> {
        check_len("2-form density", density.len(), grid.n_vertices())?;
        check_finite(&density)?;
        Ok(Self::from_parts(grid, 2, Layout::Colocated, vec![density]))
    }

    /// Samples `f` at the vertices.
    pub fn sample_zero(grid: Grid2, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Self::zero_form(grid, grid.sample(f))
    }

    /// Samples the components `a dx + b dy` at the vertices.
    pub fn sample_one(
        grid: Grid2,
        a: impl Fn(f64, f64) -> f64,
        b: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        Self::one_form_colocated(grid, grid.sample(a), grid.sample(b))
    }

    /// Samples the density `f dx∧dy` at the vertices.
    pub fn sample_two(grid: Grid2, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Self::two_form_colocated(grid, grid.sample(f))
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    /// Vertex values of a 0-form (or the single component of a 2-form).
    pub fn values(&self) -> &[f64] {
        &self.comps[0]
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.comps
    }

    pub(crate) fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Shape("forms live on different grids".into()));
        }
        Ok(())
    }

    pub(crate) fn expect_degree(&self, degree: u8, op: &str) -> Result<()> {
        if self.degree != degree {
            return Err(Error::Degree(format!(
                "{op} expects a {degree}-form, got degree {}",
                self.degree
            )));
        }
        Ok(())
    }

    /// Converts to vertex-co-located components.
    ///
    /// Interior vertices average the two adjacent edges (or four adjacent faces);
    /// boundary vertices use the one-sided neighbours that exist.
    pub fn to_colocated(&self) -> DiscreteForm {
        if self.layout == Layout::Colocated {
            return self.clone();
        }
        let g = self.grid;
        match self.degree {
            1 => {
                let (xe, ye) = (&self.comps[0], &self.comps[1]);
                let mut a = vec![0.0; g.n_vertices()];
                let mut b = vec![0.0; g.n_vertices()];
                for j in 0..=g.ny {
                    for i in 0..=g.nx {
                        let v = g.vid(i, j);
                        a[v] = if i == 0 {
                            xe[g.xedge(0, j)]
                        } else if i == g.nx {
                            xe[g.xedge(g.nx - 1, j)]
                        } else {
                            0.5 * (xe[g.xedge(i - 1, j)] + xe[g.xedge(i, j)])
                        } / g.hx;
                        b[v] = if j == 0 {
                            ye[g.yedge(i, 0)]
                        } else if j == g.ny {
                            ye[g.yedge(i, g.ny - 1)]
                        } else {
                            0.5 * (ye[g.yedge(i, j - 1)] + ye[g.yedge(i, j)])
                        } / g.hy;
                    }
                }
                DiscreteForm::from_parts(g, 1, Layout::Colocated, vec![a, b])
            }
            2 => {
                let f = &self.comps[0];
                let area = g.cell_area();
                let mut out = vec![0.0; g.n_vertices()];
                for j in 0..=g.ny {
                    for i in 0..=g.nx {
                        let mut s = 0.0;
                        let mut n = 0.0;
                        for (di, dj) in [(0usize, 0usize), (1, 0), (0, 1), (1, 1)] {
                            if i >= di && j >= dj && i - di < g.nx && j - dj < g.ny {
                                s += f[g.face(i - di, j - dj)];
                                n += 1.0;
                            }
                        }
                        out[g.vid(i, j)] = s / (n * area);
                    }
                }
                DiscreteForm::from_parts(g, 2, Layout::Colocated, vec![out])
            }
            _ => self.clone(),
        }
    }

    /// Converts to cochain values by trapezoidal integration over edges and faces.
    pub fn to_staggered(&self) -> DiscreteForm {
        if self.layout == Layout::Staggered || self.degree == 0 {
            return self.clone();
        }
        let g = self.grid;
        match self.degree {
            1 => {
                let (a, b) = (&self.comps[0], &self.comps[1]);
                let mut xe = vec![0.0; g.n_xedges()];
                let mut ye = vec![0.0; g.n_yedges()];
                for j in 0..=g.ny {
                    for i in 0..g.nx {
                        xe[g.xedge(i, j)] = 0.5 * g.hx * (a[g.vid(i, j)] + a[g.vid(i + 1, j)]);
                    }
                }
                for j in 0..g.ny {
                    for i in 0..=g.nx {
                        ye[g.yedge(i, j)] = 0.5 * g.hy * (b[g.vid(i, j)] + b[g.vid(i, j + 1)]);
                    }
                }
                DiscreteForm::from_parts(g, 1, Layout::Staggered, vec![xe, ye])
            }
            _ => {
                let f = &self.comps[0];
                let area = g.cell_area();
                let mut out = vec![0.0; g.n_faces()];
                for j in 0..g.ny {
                    for i in 0..g.nx {
                        let [p, q, r, s] = g.face_vertices(i, j);
                        out[g.face(i, j)] = 0.25 * area * (f[p] + f[q] + f[r] + f[s]);
                    }
                }
                DiscreteForm::from_parts(g, 2, Layout::Staggered, vec![out])
            }
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.same_grid(other)?;
        if self.degree != other.degree {
            return Err(Error::Degree(format!(
                "cannot combine degree {} with degree {}",
                self.degree, other.degree
            )));
        }
        let (a, b) = if self.layout == other.layout {
            (self.clone(), other.clone())
        } else {
            (self.to_colocated(), other.to_colocated())
        };
        let comps = a
            .comps
            .iter()
            .zip(&b.comps)
            .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| f(p, q)).collect())
            .collect();
        Ok(Self::from_parts(a.grid, a.degree, a.layout, comps))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().map(|&v| f(v)).collect())
            .collect();
        Self::from_parts(self.grid, self.degree, self.layout, comps)
    }

    /// Pointwise product with a 0-form, in co-located layout.
    pub fn mul_pointwise(&self, f: &DiscreteForm) -> Result<Self> {
        f.expect_degree(0, "pointwise multiplier")?;
        self.same_grid(f)?;
        let c = self.to_colocated();
        let fv = f.values();
        let comps = c
            .comps
            .iter()
            .map(|comp| comp.iter().zip(fv).map(|(a, b)| a * b).collect())
            .collect();
        Ok(Self::from_parts(c.grid, c.degree, Layout::Colocated, comps))
    }

    /// Pointwise magnitude at the co-location points (vertices, or faces for staggered 2-forms).
    pub fn pointwise_norm(&self) -> Vec<f64> {
        match (self.degree, self.layout) {
            (2, Layout::Staggered) => {
                let a = self.grid.cell_area();
                self.comps[0].iter().map(|v| v.abs() / a).collect()
            }
            (1, _) => {
                let c = self.to_colocated();
                c.comps[0]
                    .iter()
                    .zip(&c.comps[1])
                    .map(|(a, b)| a.hypot(*b))
                    .collect()
            }
            _ => self.comps[0].iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.pointwise_norm().into_iter().fold(0.0, f64::max)
    }

    /// Sup norm restricted to a vertex mask. Staggered 2-forms use the faces whose four
    /// corners are all in the mask.
    pub fn sup_norm_where(&self, mask: &[bool]) -> f64 {
        let g = self.grid;
        let pw = self.pointwise_norm();
        if self.degree == 2 && self.layout == Layout::Staggered {
            let mut m = 0.0f64;
            for j in 0..g.ny {
                for i in 0..g.nx {
                    if g.face_vertices(i, j).iter().all(|&v| mask[v]) {
                        m = m.max(pw[g.face(i, j)]);
                    }
                }
            }
            m
        } else {
            pw.iter()
                .zip(mask)
                .filter(|(_, &k)| k)
                .fold(0.0, |m, (v, _)| m.max(*v))
        }
    }
}
