//! Hodge-Bäcklund transformations.
//!
//! - Density duality: `ξ = ⋆(ρ(Q)ω)` carries a solution with coefficient `η` and density
//!   `ρ` to one with coefficient `η̂ = −η` and any density `ρ̂` with `ρ(|ω|²)ρ̂(|ξ|²) = 1`.
//! - Eikonal transforms: `dv = ±√(1 + ν²/|du|²) ⋆du` and its inverse
//!   `du = ∓√(1 − ν²/|dv|²) ⋆dv`, relating the real and imaginary parts of a solution of
//!   the complex eikonal equation.
//!
//! Potentials are recovered from nearly closed 1-forms by least squares.

use crate::dec::{d, star, DiscreteForm, FrobeniusCoefficient, Grid2};
use crate::density::MassDensity;
use crate::error::{Error, Result};
use crate::linalg::{cg, Assembler, CG_RTOL};
use crate::solver::frobenius_residual_where;

/// Result of the density duality.
#[derive(Clone, Debug)]
pub struct DualPair {
    /// ξ = ⋆(ρ(Q)ω), co-located.
    pub xi: DiscreteForm,
    /// η̂ = −η.
    pub eta_hat: DiscreteForm,
    pub rho_hat: MassDensity,
    /// sup over vertices of |ρ(|ω|²) ρ̂(|ξ|²) − 1|.
    pub pointwise_product_error: f64,
    /// sup |ξ|² over vertices.
    pub xi_sq_max: f64,
    /// sup of `dξ − dη̂∧ξ` over interior faces.
    pub frobenius_residual: f64,
}

/// Applies the duality `ω ↦ ξ = ⋆(ρ(|ω|²)ω)`, `η ↦ −η`.
///
/// Fails when `|ξ|²` leaves the admissible interval of `rho_hat`, which signals that `ω`
/// does not solve the source equation for the pairing in use.
pub fn hodge_dual(
    omega: &DiscreteForm,
    eta: &DiscreteForm,
    rho: &MassDensity,
    rho_hat: &MassDensity,
) -> Result<DualPair> {
    omega.expect_degree(1, "hodge_dual (ω)")?;
    eta.expect_degree(0, "hodge_dual (η)")?;
    omega.same_grid(eta)?;
    let g = *omega.grid();
    let w = omega.to_colocated();
    let (a, b) = (&w.components()[0], &w.components()[1]);
    let mut r = Vec::with_capacity(g.n_vertices());
    for v in 0..g.n_vertices() {
        let q = a[v] * a[v] + b[v] * b[v];
        if !rho.domain().contains(q) {
            return Err(rho.domain_error_at(q, format!("vertex {:?}", g.vertex_xy(v))));
        }
        r.push(rho.rho_raw(q));
    }
    let scaled = w.mul_pointwise(&DiscreteForm::zero_form(g, r.clone())?)?;
    let xi = star(&scaled);
    let (xa, xb) = (&xi.components()[0], &xi.components()[1]);
    let mut worst = 0.0f64;
    let mut xi_sq_max = 0.0f64;
    for v in 0..g.n_vertices() {
        let p = xa[v] * xa[v] + xb[v] * xb[v];
        if !rho_hat.domain().contains(p) {
            return Err(Error::Duality(format!(
                "|xi|^2 = {p} at vertex {:?} lies outside the domain {} of {}",
                g.vertex_xy(v),
                rho_hat.domain(),
                rho_hat.name()
            )));
        }
        xi_sq_max = xi_sq_max.max(p);
        worst = worst.max((r[v] * rho_hat.rho_raw(p) - 1.0).abs());
    }
    let eta_hat = eta.scale(-1.0);
    let mask = g.interior_mask(1);
    let frob = frobenius_residual_where(&xi, &FrobeniusCoefficient::Exact(eta_hat.clone()), &mask)?;
    Ok(DualPair {
        xi,
        eta_hat,
        rho_hat: rho_hat.clone(),
        pointwise_product_error: worst,
        xi_sq_max,
        frobenius_residual: frob,
    })
}

/// Output of an eikonal transform.
#[derive(Clone, Debug)]
pub struct EikonalTransform {
    /// Recovered potential, zero at vertex 0.
    pub potential: DiscreteForm,
    /// The transformed 1-form (β or α), co-located.
    pub form: DiscreteForm,
    /// sup |d(form)| over interior faces.
    pub integrability_residual: f64,
}

fn check_sign(sign: f64) -> Result<()> {
    if sign == 1.0 || sign == -1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("sign must be +1 or -1, got {sign}")))
    }
}

fn check_nu(u: &DiscreteForm, nu: &DiscreteForm) -> Result<()> {
    nu.expect_degree(0, "refractive index ν")?;
    u.same_grid(nu)?;
    if let Some(v) = nu.values().iter().position(|x| *x < 0.0) {
        return Err(Error::Parameter(format!(
            "refractive index must be nonnegative, got {} at vertex {v}",
            nu.values()[v]
        )));
    }
    Ok(())
}

fn closedness(form: &DiscreteForm) -> Result<f64> {
    Ok(d(form)?.sup_norm_where(&form.grid().interior_mask(1)))
}

/// `β = sign·⋆(√(|du|² + ν²) du/|du|)` and its least-squares potential `v`.
pub fn eikonal_forward(u: &DiscreteForm, nu: &DiscreteForm, sign: f64) -> Result<EikonalTransform> {
    u.expect_degree(0, "eikonal_forward")?;
    check_nu(u, nu)?;
    check_sign(sign)?;
    let g = *u.grid();
    let du = d(u)?.to_colocated();
    let (a, b) = (&du.components()[0], &du.components()[1]);
    let nv = nu.values();
    let mut f = Vec::with_capacity(g.n_vertices());
    for v in 0..g.n_vertices() {
        let q = a[v] * a[v] + b[v] * b[v];
        if !(q > 0.0) {
            return Err(Error::Hypothesis(format!(
                "|du| vanishes at vertex {:?}; the transform needs u_x^2 + u_y^2 > 0",
                g.vertex_xy(v)
            )));
        }
        f.push(sign * (1.0 + nv[v] * nv[v] / q).sqrt());
    }
    let beta = star(&du).mul_pointwise(&DiscreteForm::zero_form(g, f)?)?;
    let residual = closedness(&beta)?;
    let potential = recover_potential(&beta)?;
    Ok(EikonalTransform {
        potential,
        form: beta,
        integrability_residual: residual,
    })
}

/// `α = −sign·√(1 − ν²/|dv|²) ⋆dv` and its least-squares potential `u`.
pub fn eikonal_inverse(v: &DiscreteForm, nu: &DiscreteForm, sign: f64) -> Result<EikonalTransform> {
    v.expect_degree(0, "eikonal_inverse")?;
    check_nu(v, nu)?;
    check_sign(sign)?;
    let g = *v.grid();
    let dv = d(v)?.to_colocated();
    let (a, b) = (&dv.components()[0], &dv.components()[1]);
    let nv = nu.values();
    let mut f = Vec::with_capacity(g.n_vertices());
    for k in 0..g.n_vertices() {
        let p = a[k] * a[k] + b[k] * b[k];
        let n2 = nv[k] * nv[k];
        // Equality |dv|² = ν² is admissible; allow for rounding in |dv|².
        if p < n2 * (1.0 - 1e-12) {
            return Err(Error::Hypothesis(format!(
                "|dv|^2 = {p} < nu^2 = {n2} at vertex {:?}",
                g.vertex_xy(k)
            )));
        }
        let rad = if p > 0.0 { (1.0 - n2 / p).max(0.0).sqrt() } else { 0.0 };
        f.push(-sign * rad);
    }
    let alpha = star(&dv).mul_pointwise(&DiscreteForm::zero_form(g, f)?)?;
    let residual = closedness(&alpha)?;
    let potential = recover_potential(&alpha)?;
    Ok(EikonalTransform {
        potential,
        form: alpha,
        integrability_residual: residual,
    })
}

/// Residuals of `u_x² + u_y² − v_x² − v_y² + ν² = 0` and `u_x v_x + u_y v_y = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EikonalPairCheck {
    pub diff_residual: f64,
    pub orthogonality_residual: f64,
}

pub fn check_eikonal_pair(u: &DiscreteForm, v: &DiscreteForm, nu: &DiscreteForm) -> Result<EikonalPairCheck> {
    let all = vec![true; u.grid().n_vertices()];
    check_eikonal_pair_where(u, v, nu, &all)
}

/// As [`check_eikonal_pair`], restricted to the vertices in `mask`.
pub fn check_eikonal_pair_where(
    u: &DiscreteForm,
    v: &DiscreteForm,
    nu: &DiscreteForm,
    mask: &[bool],
) -> Result<EikonalPairCheck> {
    u.expect_degree(0, "check_eikonal_pair (u)")?;
    v.expect_degree(0, "check_eikonal_pair (v)")?;
    check_nu(u, nu)?;
    u.same_grid(v)?;
    crate::fields::check_mask(u.grid(), mask, "eikonal check")?;
    let du = d(u)?.to_colocated();
    let dv = d(v)?.to_colocated();
    let (ux, uy) = (&du.components()[0], &du.components()[1]);
    let (vx, vy) = (&dv.components()[0], &dv.components()[1]);
    let nv = nu.values();
    let mut diff = 0.0f64;
    let mut orth = 0.0f64;
    for k in (0..mask.len()).filter(|&k| mask[k]) {
        let r = ux[k] * ux[k] + uy[k] * uy[k] - vx[k] * vx[k] - vy[k] * vy[k] + nv[k] * nv[k];
        diff = diff.max(r.abs());
        orth = orth.max((ux[k] * vx[k] + uy[k] * vy[k]).abs());
    }
    Ok(EikonalPairCheck {
        diff_residual: diff,
        orthogonality_residual: orth,
    })
}

/// Least-squares potential: minimizes `‖dv − β‖` in the staggered inner product with
/// `v = 0` at vertex 0. Path integration supplies the initial guess.
pub fn recover_potential(beta: &DiscreteForm) -> Result<DiscreteForm> {
    beta.expect_degree(1, "recover_potential")?;
    let g = *beta.grid();
    let s = beta.to_staggered();
    let (bx, by) = (&s.components()[0], &s.components()[1]);
    let guess = path_integral(&g, bx, by);
    let n = g.n_vertices() - 1;
    // Unknown k ↔ vertex k + 1.
    let idx = |v: usize| if v == 0 { None } else { Some(v - 1) };
    let mut asm = Assembler::new(n);
    let mut rhs = vec![0.0; n];
    let mut edge = |a: usize, b: usize, w: f64, val: f64, asm: &mut Assembler| {
        // w (u_b − u_a − val)²
        for (p, sp) in [(a, -1.0), (b, 1.0)] {
            let Some(ip) = idx(p) else { continue };
            rhs[ip] += w * sp * val;
            for (r, sr) in [(a, -1.0), (b, 1.0)] {
                if let Some(ir) = idx(r) {
                    asm.add(ip, ir, w * sp * sr);
                }
            }
        }
    };
    for j in 0..=g.ny {
        let w = g.xedge_weight(j);
        for i in 0..g.nx {
            edge(g.vid(i, j), g.vid(i + 1, j), w, bx[g.xedge(i, j)], &mut asm);
        }
    }
    for j in 0..g.ny {
        for i in 0..=g.nx {
            edge(g.vid(i, j), g.vid(i, j + 1), g.yedge_weight(i), by[g.yedge(i, j)], &mut asm);
        }
    }
    let a = asm.finish();
    let x0: Vec<f64> = guess[1..].to_vec();
    let sol = cg(&a, &rhs, Some(&x0), CG_RTOL, 20 * n + 200)?;
    let mut vals = vec![0.0];
    vals.extend(sol.x);
    DiscreteForm::zero_form(g, vals)
}

fn path_integral(g: &Grid2, bx: &[f64], by: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; g.n_vertices()];
    for i in 1..=g.nx {
        v[g.vid(i, 0)] = v[g.vid(i - 1, 0)] + bx[g.xedge(i - 1, 0)];
    }
    for j in 1..=g.ny {
        for i in 0..=g.nx {
            v[g.vid(i, j)] = v[g.vid(i, j - 1)] + by[g.yedge(i, j - 1)];
        }
    }
    v
}

/// Radially symmetric solution of `div(√(1 + ν²/|∇u|²) ∇u) = 0` for `ν = 1`:
/// `u = F(r)` with `r² (F′² + 1) = c²`, valid for `r < c`. Its forward transform is
/// `v = c·θ`.
pub fn radial_eikonal_fixture(c: f64, r: f64) -> f64 {
    let s = (c * c - r * r).sqrt();
    s - c * ((c + s) / r).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::Layout;

    #[test]
    fn forward_of_linear_field() {
        let g = Grid2::square(9, 0.0, 1.0).unwrap();
        let u = DiscreteForm::sample_zero(g, |x, _| x).unwrap();
        let nu = DiscreteForm::sample_zero(g, |_, _| 1.0).unwrap();
        let t = eikonal_forward(&u, &nu, 1.0).unwrap();
        let v = t.potential.values();
        for k in 0..g.n_vertices() {
            let (_, y) = g.vertex_xy(k);
            assert!((v[k] - 2f64.sqrt() * y).abs() < 1e-12);
        }
        assert!(t.integrability_residual < 1e-12);
        let zero = DiscreteForm::zero(g, 0, Layout::Colocated).unwrap();
        let t0 = eikonal_forward(&u, &zero, 1.0).unwrap();
        for k in 0..g.n_vertices() {
            assert!((t0.potential.values()[k] - g.vertex_xy(k).1).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_roundtrip_on_linear_field() {
        let g = Grid2::square(9, 0.0, 1.0).unwrap();
        let v = DiscreteForm::sample_zero(g, |_, y| 2f64.sqrt() * y).unwrap();
        let nu = DiscreteForm::sample_zero(g, |_, _| 1.0).unwrap();
        let t = eikonal_inverse(&v, &nu, 1.0).unwrap();
        for k in 0..g.n_vertices() {
            assert!((t.potential.values()[k] - g.vertex_xy(k).0).abs() < 1e-12);
        }
    }

    #[test]
    fn hypotheses_are_enforced() {
        let g = Grid2::square(5, 0.0, 1.0).unwrap();
        let c = DiscreteForm::sample_zero(g, |_, _| 2.0).unwrap();
        let nu = DiscreteForm::sample_zero(g, |_, _| 1.0).unwrap();
        assert!(matches!(eikonal_forward(&c, &nu, 1.0), Err(Error::Hypothesis(_))));
        let slow = DiscreteForm::sample_zero(g, |_, y| 0.5 * y).unwrap();
        assert!(matches!(eikonal_inverse(&slow, &nu, 1.0), Err(Error::Hypothesis(_))));
        let edge = DiscreteForm::sample_zero(g, |_, y| y).unwrap();
        let t = eikonal_inverse(&edge, &nu, 1.0).unwrap();
        assert!(t.potential.sup_norm() < 1e-12);
    }

    #[test]
    fn dual_of_constant_speed_field() {
        let g = Grid2::square(5, 0.0, 1.0).unwrap();
        let s = 1.5f64.sqrt();
        let w = DiscreteForm::sample_one(g, |_, _| s, |_, _| s).unwrap();
        let eta = DiscreteForm::zero(g, 0, Layout::Colocated).unwrap();
        let p = hodge_dual(&w, &eta, &MassDensity::minimal_surface(), &MassDensity::dual_minimal_surface()).unwrap();
        assert!((p.xi_sq_max - 0.75).abs() < 1e-15);
        assert!(p.pointwise_product_error < 1e-15);
    }

    #[test]
    fn fixture_satisfies_radial_ode() {
        let (c, r, h) = (3.0, 1.1, 1e-5);
        let fp = (radial_eikonal_fixture(c, r + h) - radial_eikonal_fixture(c, r - h)) / (2.0 * h);
        assert!((r * r * (fp * fp + 1.0) - c * c).abs() < 1e-8);
    }
}
