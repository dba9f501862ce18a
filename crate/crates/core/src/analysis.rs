//! Monitors for interior estimates: a mean-value ratio for 𝔥(Q), ring maxima near an
//! excised set, and the Γ-smallness functional `f = |∇Γ| + |Γ|²`.
//!
//! All quantities are measured on vertex samples; nothing here certifies a bound.

use crate::dec::{DiscreteForm, FrobeniusCoefficient, Grid2};
use crate::density::MassDensity;
use crate::error::{Error, Result};
use crate::fields::check_mask;
use crate::solver::{solve, ProblemSpec, SolveReport, SolverConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct MeanValueReport {
    pub r: f64,
    pub delta: f64,
    /// sup of 𝔥(Q) over the disc of radius (1 − δ)R.
    pub sup_inner: f64,
    /// Disc average of 𝔥(Q) over the disc of radius R.
    pub mean_outer: f64,
    pub c_emp: f64,
    /// Both sup and mean vanish; `c_emp` is set to 1.
    pub degenerate: bool,
}

fn disc_inside(grid: &Grid2, center: (f64, f64), r: f64) -> Result<()> {
    let eps = 1e-12 * grid.h();
    if center.0 - r < grid.x0 - eps
        || center.0 + r > grid.x_max() + eps
        || center.1 - r < grid.y0 - eps
        || center.1 + r > grid.y_max() + eps
    {
        return Err(Error::Geometry(format!(
            "disc of radius {r} about {center:?} leaves the grid [{}, {}] x [{}, {}]",
            grid.x0,
            grid.x_max(),
            grid.y0,
            grid.y_max()
        )));
    }
    Ok(())
}

fn dist(grid: &Grid2, v: usize, c: (f64, f64)) -> f64 {
    let (x, y) = grid.vertex_xy(v);
    (x - c.0).hypot(y - c.1)
}

/// Compares the sup of 𝔥(Q) = Qρ²(Q) on an inner disc with its average on the outer disc.
pub fn mean_value_check(
    report: &SolveReport,
    density: &MassDensity,
    center: (f64, f64),
    r: f64,
    delta: f64,
) -> Result<MeanValueReport> {
    if !(r > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "mean-value check needs R > 0 and delta in (0, 1), got R={r}, delta={delta}"
        )));
    }
    let g = *report.q.grid();
    disc_inside(&g, center, r)?;
    let q = report.q.values();
    let eps = 1e-12 * g.h();
    let mut sup = 0.0f64;
    let (mut num, mut den) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in 0..g.n_vertices() {
        let dv = dist(&g, v, center);
        if dv > r + eps {
            continue;
        }
        let h = density.frak_h(q[v])?;
        if dv <= (1.0 - delta) * r + eps {
            sup = sup.max(h);
        }
        let (i, j) = g.vij(v);
        let w = g.vertex_weight(i, j);
        num += w * h;
        den += w;
        lo = lo.min(h);
        hi = hi.max(h);
    }
    if den == 0.0 {
        return Err(Error::Geometry(format!(
            "disc of radius {r} about {center:?} contains no vertices"
        )));
    }
    // A weighted mean lies between the extreme samples; clamping removes rounding drift.
    let mean = (num / den).clamp(lo, hi);
    let (c, degenerate) = if sup == 0.0 && mean == 0.0 {
        (1.0, true)
    } else {
        (sup / mean, false)
    };
    Ok(MeanValueReport {
        r,
        delta,
        sup_inner: sup,
        mean_outer: mean,
        c_emp: c,
        degenerate,
    })
}

/// `‖H(Q)‖_{L²}` over the vertices of an annulus `r_in ≤ |x − c| ≤ r_out`, skipping masked-out vertices.
pub fn h_l2_annulus(
    report: &SolveReport,
    density: &MassDensity,
    center: (f64, f64),
    r_in: f64,
    r_out: f64,
    keep: Option<&[bool]>,
) -> Result<f64> {
    let g = *report.q.grid();
    let q = report.q.values();
    let mut s = 0.0;
    for v in 0..g.n_vertices() {
        let dv = dist(&g, v, center);
        if dv < r_in || dv > r_out || keep.is_some_and(|k| !k[v]) {
            continue;
        }
        let h = density.h(q[v])?;
        let (i, j) = g.vij(v);
        s += g.vertex_weight(i, j) * h * h;
    }
    Ok(s.sqrt())
}

/// sup of Qρ(Q) over the disc of radius `r_in` divided by `‖H(Q)‖_{L²}` over the disc of
/// radius `r_out`.
pub fn theorem5_ratio(
    report: &SolveReport,
    density: &MassDensity,
    center: (f64, f64),
    r_in: f64,
    r_out: f64,
) -> Result<f64> {
    let g = *report.q.grid();
    disc_inside(&g, center, r_out)?;
    let q = report.q.values();
    let mut sup = 0.0f64;
    for v in 0..g.n_vertices() {
        if dist(&g, v, center) <= r_in {
            sup = sup.max(q[v] * density.rho(q[v])?);
        }
    }
    let l2 = h_l2_annulus(report, density, center, 0.0, r_out, None)?;
    Ok(if l2 > 0.0 { sup / l2 } else { 0.0 })
}

/// Ring maxima and their L² reference at one refinement level.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeLevel {
    pub vertices_per_side: usize,
    pub h: f64,
    pub max_qrho_per_ring: Vec<f64>,
    pub h_l2_outer: f64,
    pub theorem5_ratio: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularityReport {
    /// Strictly decreasing toward the excised set.
    pub ring_radii: Vec<f64>,
    /// Coarsest level first.
    pub levels: Vec<ProbeLevel>,
}

impl SingularityReport {
    pub fn finest(&self) -> &ProbeLevel {
        self.levels.last().expect("probe has at least one level")
    }

    pub fn max_qrho_per_ring(&self) -> &[f64] {
        &self.finest().max_qrho_per_ring
    }

    pub fn h_l2_outer(&self) -> f64 {
        self.finest().h_l2_outer
    }

    pub fn theorem5_ratio(&self) -> f64 {
        self.finest().theorem5_ratio
    }

    /// Largest relative change of a ring maximum between the last two levels.
    pub fn last_variation(&self) -> Option<f64> {
        let n = self.levels.len();
        if n < 2 {
            return None;
        }
        let (a, b) = (&self.levels[n - 2], &self.levels[n - 1]);
        Some(
            a.max_qrho_per_ring
                .iter()
                .zip(&b.max_qrho_per_ring)
                .map(|(p, q)| if *p == 0.0 && *q == 0.0 { 0.0 } else { (q - p).abs() / p.abs().max(q.abs()) })
                .fold(0.0, f64::max),
        )
    }

    /// Least-squares slope of log(ring maximum) against log(radius) on the finest level.
    pub fn growth_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .ring_radii
            .iter()
            .zip(self.max_qrho_per_ring())
            .filter(|(_, m)| **m > 0.0)
            .map(|(r, m)| (r.ln(), m.ln()))
            .collect();
        fit_slope(&pts)
    }
}

/// Least-squares slope of `y` against `x`; `None` for fewer than two distinct abscissae.
pub fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Where to look: rings about `center` and the annulus for the L² reference.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeGeometry {
    pub center: (f64, f64),
    pub ring_radii: Vec<f64>,
    pub outer_annulus: (f64, f64),
}

/// Solves the punctured problem built by `build` for every entry of `levels` (vertices per
/// side) and records ring maxima of Qρ(Q) at the vertices within one cell of each ring.
pub fn singularity_probe<F>(
    levels: &[usize],
    build: F,
    config: &SolverConfig,
    geometry: &ProbeGeometry,
) -> Result<SingularityReport>
where
    F: Fn(usize) -> Result<ProblemSpec>,
{
    let radii = &geometry.ring_radii;
    if radii.is_empty() || radii.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::Parameter(
            "ring radii must be a nonempty strictly decreasing sequence".into(),
        ));
    }
    let mut out = Vec::with_capacity(levels.len());
    for &n in levels {
        let spec = build(n)?;
        let excised = spec.excised.as_ref().ok_or_else(|| {
            Error::Problem("singularity probe needs a nonempty excised set".into())
        })?;
        if !excised.iter().any(|&e| e) {
            return Err(Error::Problem("singularity probe needs a nonempty excised set".into()));
        }
        check_mask(&spec.grid, excised, "excised set")?;
        let report = solve(&spec, config)?;
        out.push(probe_level(&spec, &report, geometry)?);
    }
    Ok(SingularityReport {
        ring_radii: radii.clone(),
        levels: out,
    })
}

/// Ring statistics of an already solved punctured problem.
pub fn probe_level(spec: &ProblemSpec, report: &SolveReport, geometry: &ProbeGeometry) -> Result<ProbeLevel> {
    let g = spec.grid;
    let h = g.hx.max(g.hy);
    let q = report.q.values();
    let keep = crate::fields::analysis_mask(&g, spec.excised.as_deref(), 1, 0);
    let mut maxima = Vec::with_capacity(geometry.ring_radii.len());
    for &r in &geometry.ring_radii {
        let mut m = f64::NEG_INFINITY;
        for v in 0..g.n_vertices() {
            if keep[v] && (dist(&g, v, geometry.center) - r).abs() <= h {
                m = m.max(q[v] * spec.density.rho(q[v])?);
            }
        }
        if !m.is_finite() {
            return Err(Error::Geometry(format!(
                "ring of radius {r} contains no admissible vertices"
            )));
        }
        maxima.push(m);
    }
    let (a, b) = geometry.outer_annulus;
    let l2 = h_l2_annulus(report, &spec.density, geometry.center, a, b, Some(&keep))?;
    let sup = maxima.iter().cloned().fold(0.0, f64::max);
    Ok(ProbeLevel {
        vertices_per_side: g.nvx(),
        h,
        theorem5_ratio: if l2 > 0.0 { sup / l2 } else { 0.0 },
        max_qrho_per_ring: maxima,
        h_l2_outer: l2,
        converged: report.converged,
    })
}

/// The Γ-smallness functional and its integral measures.
#[derive(Clone, Debug)]
pub struct GammaSmallness {
    /// f = ‖∇Γ‖₂ + |Γ|² at the vertices (spectral norm of the Jacobian).
    pub f: DiscreteForm,
    /// ‖f‖_{L^{n/2}} = ‖f‖_{L¹} for n = 2.
    pub f_l1: f64,
    /// Slope of log ∫_{B_r}|f| against log r; `+∞` when f vanishes on every ball.
    pub morrey_exponent: f64,
}

fn spectral_norm(a: f64, b: f64, c: f64, d: f64) -> f64 {
    // Largest singular value of [[a, b], [c, d]].
    let s = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
    (0.5 * (s + disc)).sqrt()
}

/// Computes `f = |∇Γ| + |Γ|²` by finite differences of the co-located components, its L¹
/// norm over `keep` (all vertices when `None`) and the Morrey slope over `radii` about
/// `center`.
pub fn gamma_smallness(
    coefficient: &FrobeniusCoefficient,
    center: (f64, f64),
    radii: &[f64],
    keep: Option<&[bool]>,
) -> Result<GammaSmallness> {
    let gamma = coefficient.gamma()?.to_colocated();
    let g = *gamma.grid();
    if let Some(k) = keep {
        check_mask(&g, k, "gamma smallness")?;
    }
    let (p, q) = (&gamma.components()[0], &gamma.components()[1]);
    let diff = |f: &[f64], i: usize, j: usize, axis: u8| -> f64 {
        let (n, h) = if axis == 0 { (g.nx, g.hx) } else { (g.ny, g.hy) };
        let k = if axis == 0 { i } else { j };
        let at = |kk: usize| if axis == 0 { f[g.vid(kk, j)] } else { f[g.vid(i, kk)] };
        if k == 0 {
            (at(1) - at(0)) / h
        } else if k == n {
            (at(n) - at(n - 1)) / h
        } else {
            (at(k + 1) - at(k - 1)) / (2.0 * h)
        }
    };
    let mut f = vec![0.0; g.n_vertices()];
    for (v, slot) in f.iter_mut().enumerate() {
        let (i, j) = g.vij(v);
        let jac = spectral_norm(
            diff(p, i, j, 0),
            diff(p, i, j, 1),
            diff(q, i, j, 0),
            diff(q, i, j, 1),
        );
        *slot = jac + p[v] * p[v] + q[v] * q[v];
    }
    let inside = |v: usize| keep.is_none_or(|k| k[v]);
    let weight = |v: usize| {
        let (i, j) = g.vij(v);
        g.vertex_weight(i, j)
    };
    let f_l1 = (0..g.n_vertices())
        .filter(|&v| inside(v))
        .map(|v| weight(v) * f[v].abs())
        .sum();
    let mut pts = Vec::new();
    for &r in radii {
        let s: f64 = (0..g.n_vertices())
            .filter(|&v| inside(v) && dist(&g, v, center) <= r)
            .map(|v| weight(v) * f[v].abs())
            .sum();
        if s > 0.0 {
            pts.push((r.ln(), s.ln()));
        }
    }
    let morrey_exponent = if pts.is_empty() {
        f64::INFINITY
    } else {
        fit_slope(&pts).unwrap_or(f64::INFINITY)
    };
    Ok(GammaSmallness {
        f: DiscreteForm::zero_form(g, f)?,
        f_l1,
        morrey_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::Layout;

    #[test]
    fn spectral_norm_of_symmetric_matrix() {
        assert!((spectral_norm(2.0, 0.0, 0.0, -2.0) - 2.0).abs() < 1e-15);
        assert!((spectral_norm(0.0, 3.0, 0.0, 0.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_gamma_gives_sentinel() {
        let g = Grid2::square(9, -1.0, 1.0).unwrap();
        let z = FrobeniusCoefficient::Exact(DiscreteForm::zero(g, 0, Layout::Colocated).unwrap());
        let s = gamma_smallness(&z, (0.0, 0.0), &[0.3, 0.5, 0.7], None).unwrap();
        assert_eq!(s.f.sup_norm(), 0.0);
        assert_eq!(s.f_l1, 0.0);
        assert!(s.morrey_exponent.is_infinite() && s.morrey_exponent > 0.0);
    }

    #[test]
    fn linear_eta_gives_constant_f() {
        let g = Grid2::square(9, -1.0, 1.0).unwrap();
        let eta = DiscreteForm::sample_zero(g, |x, y| 0.5 * x - 0.25 * y).unwrap();
        let s = gamma_smallness(&FrobeniusCoefficient::Exact(eta), (0.0, 0.0), &[0.5], None).unwrap();
        for v in s.f.values() {
            assert!((v - 0.3125).abs() < 1e-14);
        }
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (1..5).map(|k| (k as f64, 3.0 * k as f64 + 1.0)).collect();
        assert!((fit_slope(&pts).unwrap() - 3.0).abs() < 1e-12);
        assert!(fit_slope(&pts[..1]).is_none());
    }
}
