//! Radial homotopy operator on star-shaped regions of a grid.
//!
//! For a k-form ω and centre x₀,
//!
//! ```text
//! (𝓗ω)(x) = ∫₀¹ t^{k−1} [(x − x₀) ⌟ ω](x₀ + t(x − x₀)) dt,
//! ```
//!
//! so that `ω = d𝓗ω + 𝓗dω`. The integral is evaluated per vertex by Gauss–Legendre
//! quadrature along the ray, sampling co-located components bilinearly.

use rayon::prelude::*;

use crate::dec::{d, DiscreteForm, Grid2, Layout};
use crate::error::{Error, Result};
use crate::fields::check_mask;
use crate::quad::GaussLegendre;

pub const DEFAULT_NODES: usize = 16;

#[derive(Clone, Debug)]
pub struct RadialHomotopyContext {
    grid: Grid2,
    center: (f64, f64),
    rule: GaussLegendre,
    excised: Option<Vec<bool>>,
}

impl RadialHomotopyContext {
    pub fn new(grid: Grid2, center: (f64, f64), nodes: usize) -> Result<Self> {
        if nodes < 8 {
            return Err(Error::Parameter(format!(
                "homotopy quadrature needs at least 8 nodes, got {nodes}"
            )));
        }
        if !grid.contains_point(center.0, center.1) {
            return Err(Error::Geometry(format!(
                "homotopy centre {center:?} lies outside the grid"
            )));
        }
        Ok(Self {
            grid,
            center,
            rule: GaussLegendre::new(nodes),
            excised: None,
        })
    }

    /// Marks excised vertices; faces whose four corners are excised are outside the domain.
    pub fn with_excised(mut self, mask: Vec<bool>) -> Result<Self> {
        check_mask(&self.grid, &mask, "excised set")?;
        self.excised = Some(mask);
        self.sampler_check(self.center.0, self.center.1)?;
        Ok(self)
    }

    pub fn center(&self) -> (f64, f64) {
        self.center
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    fn excised_vertex(&self, v: usize) -> bool {
        self.excised.as_ref().is_some_and(|m| m[v])
    }

    fn sampler_check(&self, x: f64, y: f64) -> Result<(usize, usize, f64, f64)> {
        let loc = self.grid.locate(x, y).ok_or_else(|| {
            Error::Geometry(format!(
                "ray sample ({x}, {y}) leaves the grid; domain is not star-shaped about {:?}",
                self.center
            ))
        })?;
        if let Some(mask) = &self.excised {
            if self.grid.face_vertices(loc.0, loc.1).iter().all(|&v| mask[v]) {
                return Err(Error::Geometry(format!(
                    "ray sample ({x}, {y}) falls in the excised region; domain is not star-shaped about {:?}",
                    self.center
                )));
            }
        }
        Ok(loc)
    }

    fn bilinear(&self, comps: &[&[f64]], x: f64, y: f64, out: &mut [f64]) -> Result<()> {
        let (i, j, s, t) = self.sampler_check(x, y)?;
        let [a, b, c, dd] = self.grid.face_vertices(i, j);
        let w = [(1.0 - s) * (1.0 - t), s * (1.0 - t), (1.0 - s) * t, s * t];
        for (o, f) in out.iter_mut().zip(comps) {
            *o = w[0] * f[a] + w[1] * f[b] + w[2] * f[c] + w[3] * f[dd];
        }
        Ok(())
    }

    fn check_form(&self, form: &DiscreteForm) -> Result<()> {
        if *form.grid() != self.grid {
            return Err(Error::Shape("form and homotopy context use different grids".into()));
        }
        Ok(())
    }
}

/// Applies 𝓗 to a 1- or 2-form. Excised vertices receive zero.
pub fn homotopy(form: &DiscreteForm, ctx: &RadialHomotopyContext) -> Result<DiscreteForm> {
    ctx.check_form(form)?;
    let g = ctx.grid;
    let c = form.to_colocated();
    let (x0, y0) = ctx.center;
    match c.degree() {
        1 => {
            let a = c.components()[0].as_slice();
            let b = c.components()[1].as_slice();
            let vals: Result<Vec<f64>> = (0..g.n_vertices())
                .into_par_iter()
                .map(|v| {
                    if ctx.excised_vertex(v) {
                        return Ok(0.0);
                    }
                    let (x, y) = g.vertex_xy(v);
                    let (dx, dy) = (x - x0, y - y0);
                    let mut s = 0.0;
                    let mut buf = [0.0; 2];
                    for (t, w) in ctx.rule.nodes.iter().zip(&ctx.rule.weights) {
                        ctx.bilinear(&[a, b], x0 + t * dx, y0 + t * dy, &mut buf)?;
                        s += w * (dx * buf[0] + dy * buf[1]);
                    }
                    Ok(s)
                })
                .collect();
            DiscreteForm::zero_form(g, vals?)
        }
        2 => {
            let f = c.values();
            let pairs: Result<Vec<(f64, f64)>> = (0..g.n_vertices())
                .into_par_iter()
                .map(|v| {
                    if ctx.excised_vertex(v) {
                        return Ok((0.0, 0.0));
                    }
                    let (x, y) = g.vertex_xy(v);
                    let (dx, dy) = (x - x0, y - y0);
                    let mut s = 0.0;
                    let mut buf = [0.0; 1];
                    for (t, w) in ctx.rule.nodes.iter().zip(&ctx.rule.weights) {
                        ctx.bilinear(&[f], x0 + t * dx, y0 + t * dy, &mut buf)?;
                        s += w * t * buf[0];
                    }
                    // (x − x₀) ⌟ (f dx∧dy) = f (Δx dy − Δy dx)
                    Ok((-dy * s, dx * s))
                })
                .collect();
            let (a, b): (Vec<f64>, Vec<f64>) = pairs?.into_iter().unzip();
            DiscreteForm::one_form_colocated(g, a, b)
        }
        k => Err(Error::Degree(format!(
            "homotopy operator needs a 1- or 2-form, got degree {k}"
        ))),
    }
}

/// Exact and anti-exact parts `(d𝓗ω, 𝓗dω)`, both co-located.
pub fn split(form: &DiscreteForm, ctx: &RadialHomotopyContext) -> Result<(DiscreteForm, DiscreteForm)> {
    let exact = d(&homotopy(form, ctx)?)?.to_colocated();
    let anti = match form.degree() {
        1 => homotopy(&d(form)?, ctx)?,
        2 => DiscreteForm::zero(ctx.grid, 2, Layout::Colocated)?,
        k => {
            return Err(Error::Degree(format!(
                "split needs a 1- or 2-form, got degree {k}"
            )))
        }
    };
    Ok((exact, anti))
}

/// Representation of a 1-form recursive with coefficient Γ.
#[derive(Clone, Debug)]
pub struct RecursiveDecomposition {
    /// η = 𝓗Γ.
    pub eta: DiscreteForm,
    /// θ = 𝓗dΓ; vanishes when Γ is exact.
    pub theta: DiscreteForm,
    /// u = 𝓗(e^{−η}ω).
    pub u: DiscreteForm,
    /// Sup norm of dω − Γ∧ω over interior faces (reported, not enforced).
    pub integrability_residual: f64,
    /// e^η du, the gradient-recursive reconstruction of ω.
    pub reconstruction: DiscreteForm,
}

pub fn recursive_decompose(
    gamma: &DiscreteForm,
    omega: &DiscreteForm,
    ctx: &RadialHomotopyContext,
) -> Result<RecursiveDecomposition> {
    gamma.expect_degree(1, "recursive_decompose (Γ)")?;
    omega.expect_degree(1, "recursive_decompose (ω)")?;
    let eta = homotopy(gamma, ctx)?;
    let theta = homotopy(&d(gamma)?, ctx)?;
    let scaled = omega.mul_pointwise(&eta.map(|e| (-e).exp()))?;
    let u = homotopy(&scaled, ctx)?;
    let reconstruction = d(&u)?.mul_pointwise(&eta.map(f64::exp))?;
    let defect = crate::solver::integrability_defect(omega, gamma)?;
    let mask = crate::fields::analysis_mask(&ctx.grid, ctx.excised.as_deref(), 1, 1);
    Ok(RecursiveDecomposition {
        integrability_residual: defect.sup_norm_where(&mask),
        eta,
        theta,
        u,
        reconstruction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::block_mask;

    fn ctx(n: usize) -> RadialHomotopyContext {
        RadialHomotopyContext::new(Grid2::square(n, -1.0, 1.0).unwrap(), (0.0, 0.0), 16).unwrap()
    }

    #[test]
    fn homotopy_of_dx_is_x() {
        let c = ctx(17);
        let g = *c.grid();
        let dx = DiscreteForm::sample_one(g, |_, _| 1.0, |_, _| 0.0).unwrap();
        let h = homotopy(&dx, &c).unwrap();
        for v in 0..g.n_vertices() {
            assert!((h.values()[v] - g.vertex_xy(v).0).abs() < 1e-14);
        }
        let back = d(&h).unwrap().to_colocated();
        assert!(back.sub(&dx).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn rotation_form_is_anti_exact() {
        let c = ctx(17);
        let g = *c.grid();
        let rot = DiscreteForm::sample_one(g, |_, y| -y, |x, _| x).unwrap();
        assert!(homotopy(&rot, &c).unwrap().sup_norm() < 1e-14);
        let (ex, an) = split(&rot, &c).unwrap();
        assert!(ex.sup_norm() < 1e-13);
        assert!(an.sub(&rot).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn zero_maps_to_zero() {
        let c = ctx(9);
        let z = DiscreteForm::zero(*c.grid(), 1, Layout::Staggered).unwrap();
        assert_eq!(homotopy(&z, &c).unwrap().sup_norm(), 0.0);
        let z2 = DiscreteForm::zero(*c.grid(), 2, Layout::Staggered).unwrap();
        assert_eq!(homotopy(&z2, &c).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn rejects_bad_context() {
        let g = Grid2::square(9, -1.0, 1.0).unwrap();
        assert!(RadialHomotopyContext::new(g, (0.0, 0.0), 4).is_err());
        assert!(RadialHomotopyContext::new(g, (2.0, 0.0), 16).is_err());
        let u = DiscreteForm::zero(g, 0, Layout::Colocated).unwrap();
        let c = RadialHomotopyContext::new(g, (0.0, 0.0), 16).unwrap();
        assert!(matches!(homotopy(&u, &c), Err(Error::Degree(_))));
    }

    #[test]
    fn closed_form_has_no_anti_exact_part() {
        let c = ctx(33);
        let g = *c.grid();
        let u = DiscreteForm::sample_zero(g, |x, y| (x * y).sin() + x * x).unwrap();
        let du = d(&u).unwrap();
        let (_, an) = split(&du, &c).unwrap();
        assert!(an.sup_norm() < 1e-12, "{}", an.sup_norm());
    }

    #[test]
    fn annulus_is_not_star_shaped() {
        let g = Grid2::square(33, -1.0, 1.0).unwrap();
        let mask = block_mask(&g, (0.0, 0.0), 0.25);
        // centre inside the hole
        assert!(RadialHomotopyContext::new(g, (0.0, 0.0), 16)
            .unwrap()
            .with_excised(mask.clone())
            .is_err());
        // centre in the annulus: some rays cross the hole
        let c = RadialHomotopyContext::new(g, (0.6, 0.0), 16)
            .unwrap()
            .with_excised(mask)
            .unwrap();
        let w = DiscreteForm::sample_one(g, |_, y| -y, |x, _| x).unwrap();
        assert!(matches!(homotopy(&w, &c), Err(Error::Geometry(_))));
    }
}
