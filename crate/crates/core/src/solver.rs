//! Variational solver for `δ[ρ(Q) e^{2η} du] = 0` and the linear conservative equation
//! `δ(w du) = 0`.
//!
//! The discrete energy is a sum over cells,
//!
//! ```text
//! E(u) = ½ Σ_c A · F(Q_c),   F(Q) = ∫₀^Q ρ,
//! Q_c  = ē_c · [ (X_b² + X_t²)/(2hx²) + (Y_l² + Y_r²)/(2hy²) ],
//! ```
//!
//! where `X`, `Y` are the edge increments of `u` around the cell and `ē_c` is the cell
//! mean of the vertex weight (`e^{2η}`, or `w` in the linear case). Its gradient is
//! `W₀ δ(κ du)` with `κ` the edge average of `ρ(Q_c) ē_c`, so the residual reported
//! below is exactly the vertex-scaled gradient. Newton steps use the cell-assembled
//! Hessian, which is positive semidefinite per cell whenever `ρ + 2Qρ′ > 0`.

use sprs::CsMat;

use crate::dec::{d, q_field, wedge, DiscreteForm, FrobeniusCoefficient, Grid2};
use crate::density::MassDensity;
use crate::error::{Error, Result};
use crate::fields::check_mask;
use crate::linalg::{cg, Assembler, CG_RTOL};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1.0 / 1048576.0;

/// A boundary value problem for the weighted variational equation.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub grid: Grid2,
    pub density: MassDensity,
    pub coefficient: FrobeniusCoefficient,
    /// Vertex values; only those on the outer boundary and the excised set are used.
    pub dirichlet: DiscreteForm,
    /// Vertices removed from the unknowns and held at their Dirichlet values.
    pub excised: Option<Vec<bool>>,
    /// Closed staggered 1-form added to `du`, for multivalued potentials such as the
    /// polar angle (see [`crate::fields::angle_period`]).
    pub period: Option<DiscreteForm>,
}

impl ProblemSpec {
    pub fn new(
        grid: Grid2,
        density: MassDensity,
        coefficient: FrobeniusCoefficient,
        dirichlet: DiscreteForm,
    ) -> Result<Self> {
        let spec = Self {
            grid,
            density,
            coefficient,
            dirichlet,
            excised: None,
            period: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_excised(mut self, mask: Vec<bool>) -> Result<Self> {
        self.excised = Some(mask);
        self.validate()?;
        Ok(self)
    }

    pub fn with_period(mut self, period: DiscreteForm) -> Result<Self> {
        self.period = Some(period.to_staggered());
        self.validate()?;
        Ok(self)
    }

    /// η of the exact coefficient.
    pub fn eta(&self) -> Result<&DiscreteForm> {
        self.coefficient.eta().ok_or_else(|| {
            Error::Problem("the variational solver needs an exact coefficient Γ = dη".into())
        })
    }

    fn validate(&self) -> Result<()> {
        let g = self.grid;
        let eta = self.eta()?;
        for (what, f) in [("η", eta), ("dirichlet data", &self.dirichlet)] {
            if *f.grid() != g {
                return Err(Error::Shape(format!("{what} lives on a different grid")));
            }
            f.expect_degree(0, what)?;
        }
        if let Some(mask) = &self.excised {
            check_mask(&g, mask, "excised set")?;
            for (v, &m) in mask.iter().enumerate() {
                let (i, j) = g.vij(v);
                if m && g.is_boundary_vertex(i, j) {
                    return Err(Error::Problem(format!(
                        "excised vertex ({i}, {j}) lies on the outer boundary"
                    )));
                }
            }
        }
        if let Some(p) = &self.period {
            if *p.grid() != g {
                return Err(Error::Shape("period form lives on a different grid".into()));
            }
            p.expect_degree(1, "period")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Threshold on the sup norm of the residual at free vertices.
    pub tolerance: f64,
    /// Initial step factor of every line search.
    pub damping: f64,
    pub continuation_steps: usize,
    pub subsonic_guard: bool,
    /// Relative margin below the sonic value that triggers continuation.
    pub sonic_margin: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            tolerance: 1e-10,
            damping: 1.0,
            continuation_steps: 8,
            subsonic_guard: true,
            sonic_margin: 0.05,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Parameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Parameter(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if self.continuation_steps == 0 {
            return Err(Error::Parameter("continuation_steps must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.sonic_margin) {
            return Err(Error::Parameter(format!(
                "sonic_margin must lie in [0, 1), got {}",
                self.sonic_margin
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub u: DiscreteForm,
    /// Speed at the vertices, `e^{2η}|du|²` (co-located).
    pub q: DiscreteForm,
    /// `δ[ρ(Q)e^{2η}du]` at free vertices, zero elsewhere.
    pub residual: DiscreteForm,
    pub energy: f64,
    pub residual_sup: f64,
    pub iterations: usize,
    /// Largest cell speed.
    pub max_q: f64,
    pub min_rho: f64,
    pub sonic_q: Option<f64>,
    /// `sonic_q − max_q` when a sonic value exists.
    pub sonic_margin: Option<f64>,
    pub converged: bool,
    pub cavitated: bool,
    pub sonic_exceeded: bool,
    /// Whether the guard restarted the solve with boundary-data continuation.
    pub continuation_used: bool,
    pub picard_steps: usize,
    /// Energy after the initial iterate and after every accepted step of the final stage.
    pub energy_history: Vec<f64>,
    /// Rounding allowance used by the line search when comparing energies.
    pub energy_tolerance: f64,
}

/// Discretized problem with precomputed cell weights and unknown numbering.
struct Disc {
    grid: Grid2,
    density: MassDensity,
    /// Cell weight ē_c; inactive cells are `None`.
    cell_w: Vec<Option<f64>>,
    vert_w: Vec<f64>,
    tau_x: Vec<f64>,
    tau_y: Vec<f64>,
    free: Vec<usize>,
    index: Vec<Option<usize>>,
    sonic_q: Option<f64>,
    guard: bool,
}

impl Disc {
    fn new(
        grid: Grid2,
        density: MassDensity,
        vert_w: Vec<f64>,
        excised: Option<&[bool]>,
        period: Option<&DiscreteForm>,
        guard: bool,
    ) -> Result<Self> {
        let ex = |v: usize| excised.is_some_and(|m| m[v]);
        // Weights at excised vertices only enter cells that straddle the hole.
        if let Some(v) = (0..vert_w.len()).find(|&v| {
            let w = vert_w[v];
            !(w.is_finite() && (w > 0.0 || (ex(v) && w >= 0.0)))
        }) {
            return Err(Error::Problem(format!(
                "vertex weight {} at vertex {:?} is not positive and finite",
                vert_w[v],
                grid.vij(v)
            )));
        }
        let mut cell_w = Vec::with_capacity(grid.n_faces());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let corners = grid.face_vertices(i, j);
                if corners.iter().all(|&v| ex(v)) {
                    cell_w.push(None);
                } else {
                    cell_w.push(Some(0.25 * corners.iter().map(|&v| vert_w[v]).sum::<f64>()));
                }
            }
        }
        let mut index = vec![None; grid.n_vertices()];
        let mut free = Vec::new();
        for (v, slot) in index.iter_mut().enumerate() {
            let (i, j) = grid.vij(v);
            if !grid.is_boundary_vertex(i, j) && !ex(v) {
                *slot = Some(free.len());
                free.push(v);
            }
        }
        let (tau_x, tau_y) = match period {
            Some(p) => {
                let s = p.to_staggered();
                (s.components()[0].clone(), s.components()[1].clone())
            }
            None => (vec![0.0; grid.n_xedges()], vec![0.0; grid.n_yedges()]),
        };
        let sonic_q = density.sonic_q(sonic_scan_max(&density));
        Ok(Self {
            grid,
            density,
            cell_w,
            vert_w,
            tau_x,
            tau_y,
            free,
            index,
            sonic_q,
            guard,
        })
    }

    /// Edge increments (X_b, X_t, Y_l, Y_r) of a cell.
    fn cell_edges(&self, u: &[f64], i: usize, j: usize, tau_scale: f64) -> [f64; 4] {
        let g = &self.grid;
        let [ll, lr, ul, ur] = g.face_vertices(i, j);
        [
            u[lr] - u[ll] + tau_scale * self.tau_x[g.xedge(i, j)],
            u[ur] - u[ul] + tau_scale * self.tau_x[g.xedge(i, j + 1)],
            u[ul] - u[ll] + tau_scale * self.tau_y[g.yedge(i, j)],
            u[ur] - u[lr] + tau_scale * self.tau_y[g.yedge(i + 1, j)],
        ]
    }

    fn q_of(&self, e: &[f64; 4], w: f64) -> f64 {
        let g = &self.grid;
        w * ((e[0] * e[0] + e[1] * e[1]) / (2.0 * g.hx * g.hx)
            + (e[2] * e[2] + e[3] * e[3]) / (2.0 * g.hy * g.hy))
    }

    fn cell_q(&self, u: &[f64], tau_scale: f64) -> Vec<f64> {
        let g = &self.grid;
        let mut out = vec![0.0; g.n_faces()];
        for j in 0..g.ny {
            for i in 0..g.nx {
                let c = g.face(i, j);
                if let Some(w) = self.cell_w[c] {
                    out[c] = self.q_of(&self.cell_edges(u, i, j, tau_scale), w);
                }
            }
        }
        out
    }

    fn check_domain(&self, q: &[f64]) -> Result<()> {
        let dom = self.density.domain();
        for (c, &qc) in q.iter().enumerate() {
            if self.cell_w[c].is_some() && !dom.contains(qc) {
                let (i, j) = (c % self.grid.nx, c / self.grid.nx);
                return Err(self
                    .density
                    .domain_error_at(qc, format!("cell ({i}, {j}) with lower-left vertex {:?}", self.grid.vertex_xy(self.grid.vid(i, j)))));
            }
        }
        Ok(())
    }

    fn energy_terms(&self, q: &[f64]) -> Result<(f64, f64)> {
        self.check_domain(q)?;
        let area = self.grid.cell_area();
        let mut e = 0.0;
        let mut abs = 0.0;
        for (c, &qc) in q.iter().enumerate() {
            if self.cell_w[c].is_some() {
                let t = 0.5 * area * self.density.rho_integral_raw(qc)?;
                e += t;
                abs += t.abs();
            }
        }
        Ok((e, abs))
    }

    fn energy(&self, u: &[f64], tau_scale: f64) -> Result<f64> {
        Ok(self.energy_terms(&self.cell_q(u, tau_scale))?.0)
    }

    /// ∂E/∂u at every vertex.
    fn gradient(&self, u: &[f64], q: &[f64], tau_scale: f64) -> Vec<f64> {
        let g = &self.grid;
        let area = g.cell_area();
        let (ax, ay) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
        let mut grad = vec![0.0; g.n_vertices()];
        for j in 0..g.ny {
            for i in 0..g.nx {
                let c = g.face(i, j);
                let Some(w) = self.cell_w[c] else { continue };
                let e = self.cell_edges(u, i, j, tau_scale);
                let s = 0.5 * area * self.density.rho_raw(q[c]) * w;
                let [ll, lr, ul, ur] = g.face_vertices(i, j);
                let (fb, ft, fl, fr) = (s * ax * e[0], s * ax * e[1], s * ay * e[2], s * ay * e[3]);
                grad[ll] -= fb + fl;
                grad[lr] += fb - fr;
                grad[ul] += fl - ft;
                grad[ur] += ft + fr;
            }
        }
        grad
    }

    fn residual_field(&self, grad: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let mut r = vec![0.0; g.n_vertices()];
        for &v in &self.free {
            let (i, j) = g.vij(v);
            r[v] = grad[v] / g.vertex_weight(i, j);
        }
        r
    }

    fn sup_free(&self, r: &[f64]) -> f64 {
        self.free.iter().fold(0.0, |m, &v| m.max(r[v].abs()))
    }

    /// Hessian (or frozen-coefficient Picard matrix) restricted to the free vertices.
    fn matrix(&self, u: &[f64], q: &[f64], tau_scale: f64, picard: bool, rho_override: Option<f64>) -> CsMat<f64> {
        let g = &self.grid;
        let area = g.cell_area();
        let (ax, ay) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
        let stencils: [([f64; 4], f64); 4] = [
            ([-1.0, 1.0, 0.0, 0.0], ax),
            ([0.0, 0.0, -1.0, 1.0], ax),
            ([-1.0, 0.0, 1.0, 0.0], ay),
            ([0.0, -1.0, 0.0, 1.0], ay),
        ];
        let mut asm = Assembler::new(self.free.len());
        for j in 0..g.ny {
            for i in 0..g.nx {
                let c = g.face(i, j);
                let Some(w) = self.cell_w[c] else { continue };
                let corners = g.face_vertices(i, j);
                if corners.iter().all(|&v| self.index[v].is_none()) {
                    continue;
                }
                let e = self.cell_edges(u, i, j, tau_scale);
                let rho = rho_override.unwrap_or_else(|| self.density.rho_raw(q[c]));
                let mut local = [[0.0; 4]; 4];
                let mut gq = [0.0; 4];
                for (k, (s, a)) in stencils.iter().enumerate() {
                    for p in 0..4 {
                        gq[p] += w * a * e[k] * s[p];
                        for r in 0..4 {
                            local[p][r] += 0.5 * area * rho * w * a * s[p] * s[r];
                        }
                    }
                }
                if !picard {
                    let drho = self.density.drho_raw(q[c]);
                    for p in 0..4 {
                        for r in 0..4 {
                            local[p][r] += 0.5 * area * drho * gq[p] * gq[r];
                        }
                    }
                }
                for p in 0..4 {
                    let Some(ip) = self.index[corners[p]] else { continue };
                    for r in 0..4 {
                        if let Some(ir) = self.index[corners[r]] {
                            if local[p][r] != 0.0 {
                                asm.add(ip, ir, local[p][r]);
                            }
                        }
                    }
                }
            }
        }
        asm.finish()
    }

    fn solve_free(&self, a: &CsMat<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = rhs.len();
        Ok(cg(a, rhs, None, CG_RTOL, 20 * n + 200)?.x)
    }

    fn min_rho(&self, q: &[f64]) -> f64 {
        q.iter()
            .zip(&self.cell_w)
            .filter(|(_, w)| w.is_some())
            .fold(f64::INFINITY, |m, (&qc, _)| m.min(self.density.rho_raw(qc)))
    }

    fn max_q(&self, q: &[f64]) -> f64 {
        q.iter()
            .zip(&self.cell_w)
            .filter(|(_, w)| w.is_some())
            .fold(0.0, |m, (&qc, _)| m.max(qc))
    }

    /// Minimizer of the quadratic energy with constant density `rho0` and the given
    /// fixed values.
    fn quadratic_extension(&self, fixed: &[f64], rho0: f64, tau_scale: f64) -> Result<Vec<f64>> {
        let mut u = fixed.to_vec();
        for &v in &self.free {
            u[v] = 0.0;
        }
        if self.free.is_empty() {
            return Ok(u);
        }
        let q = vec![0.0; self.grid.n_faces()];
        let a = self.matrix(&u, &q, tau_scale, true, Some(rho0));
        let grad = self.gradient_const(&u, rho0, tau_scale);
        let rhs: Vec<f64> = self.free.iter().map(|&v| -grad[v]).collect();
        let p = self.solve_free(&a, &rhs)?;
        for (k, &v) in self.free.iter().enumerate() {
            u[v] = p[k];
        }
        Ok(u)
    }

    fn gradient_const(&self, u: &[f64], rho0: f64, tau_scale: f64) -> Vec<f64> {
        // Same as `gradient` with ρ frozen at `rho0`.
        let g = &self.grid;
        let area = g.cell_area();
        let (ax, ay) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
        let mut grad = vec![0.0; g.n_vertices()];
        for j in 0..g.ny {
            for i in 0..g.nx {
                let c = g.face(i, j);
                let Some(w) = self.cell_w[c] else { continue };
                let e = self.cell_edges(u, i, j, tau_scale);
                let s = 0.5 * area * rho0 * w;
                let [ll, lr, ul, ur] = g.face_vertices(i, j);
                let (fb, ft, fl, fr) = (s * ax * e[0], s * ax * e[1], s * ay * e[2], s * ay * e[3]);
                grad[ll] -= fb + fl;
                grad[lr] += fb - fr;
                grad[ul] += fl - ft;
                grad[ur] += ft + fr;
            }
        }
        grad
    }

    fn guard_limit(&self) -> Option<f64> {
        if self.guard {
            self.sonic_q
        } else {
            None
        }
    }

    /// Energy of a trial iterate, or `None` when it leaves the admissible region.
    fn trial_energy(&self, u: &[f64], tau_scale: f64) -> Option<(f64, Vec<f64>)> {
        let q = self.cell_q(u, tau_scale);
        if let Some(s) = self.guard_limit() {
            if self.max_q(&q) >= s {
                return None;
            }
        }
        let (e, _) = self.energy_terms(&q).ok()?;
        e.is_finite().then_some((e, q))
    }
}

fn sonic_scan_max(density: &MassDensity) -> f64 {
    let dom = density.domain();
    if dom.is_bounded() {
        dom.hi
    } else {
        1e6
    }
}

enum StageEnd {
    Converged,
    Stalled,
    Exhausted,
    /// The guard threshold was crossed on an accepted iterate.
    GuardTripped,
}

struct StageOutcome {
    u: Vec<f64>,
    iterations: usize,
    picard_steps: usize,
    history: Vec<f64>,
    end: StageEnd,
    slack: f64,
    tau_scale: f64,
}

/// Damped Newton iteration with Picard fallback on one continuation stage.
fn newton_stage(
    disc: &Disc,
    mut u: Vec<f64>,
    tau_scale: f64,
    cfg: &SolverConfig,
    trip_at: Option<f64>,
) -> Result<StageOutcome> {
    let mut q = disc.cell_q(&u, tau_scale);
    let (mut e, abs) = disc.energy_terms(&q)?;
    let n_cells = disc.cell_w.iter().filter(|w| w.is_some()).count().max(1) as f64;
    let slack_of = |abs: f64| n_cells * f64::EPSILON * abs.max(f64::MIN_POSITIVE);
    let mut slack = slack_of(abs);
    let mut history = vec![e];
    let mut picard_steps = 0;
    let tripped = |q: &[f64]| trip_at.is_some_and(|t| disc.max_q(q) > t);
    if tripped(&q) {
        return Ok(StageOutcome { u, iterations: 0, picard_steps, history, end: StageEnd::GuardTripped, slack, tau_scale });
    }
    for it in 0..=cfg.max_iterations {
        let grad = disc.gradient(&u, &q, tau_scale);
        let res = disc.sup_free(&disc.residual_field(&grad));
        if res <= cfg.tolerance || disc.free.is_empty() {
            return Ok(StageOutcome { u, iterations: it, picard_steps, history, end: StageEnd::Converged, slack, tau_scale });
        }
        if it == cfg.max_iterations {
            return Ok(StageOutcome { u, iterations: it, picard_steps, history, end: StageEnd::Exhausted, slack, tau_scale });
        }
        let gfree: Vec<f64> = disc.free.iter().map(|&v| grad[v]).collect();
        let rhs: Vec<f64> = gfree.iter().map(|g| -g).collect();
        let mut accepted = None;
        for picard in [false, true] {
            let a = disc.matrix(&u, &q, tau_scale, picard, None);
            let Ok(p) = disc.solve_free(&a, &rhs) else { continue };
            let slope: f64 = p.iter().zip(&gfree).map(|(a, b)| a * b).sum();
            if !(slope < 0.0) {
                continue;
            }
            let mut t = cfg.damping;
            while t >= MIN_STEP {
                let mut trial = u.clone();
                for (k, &v) in disc.free.iter().enumerate() {
                    trial[v] += t * p[k];
                }
                if let Some((et, qt)) = disc.trial_energy(&trial, tau_scale) {
                    if et <= e + ARMIJO * t * slope + slack {
                        accepted = Some((trial, et, qt));
                        break;
                    }
                }
                t *= 0.5;
            }
            if accepted.is_some() {
                if picard {
                    picard_steps += 1;
                }
                break;
            }
        }
        let Some((un, en, qn)) = accepted else {
            return Ok(StageOutcome { u, iterations: it, picard_steps, history, end: StageEnd::Stalled, slack, tau_scale });
        };
        u = un;
        e = en;
        q = qn;
        slack = slack_of(disc.energy_terms(&q)?.1);
        history.push(e);
        if tripped(&q) {
            return Ok(StageOutcome { u, iterations: it + 1, picard_steps, history, end: StageEnd::GuardTripped, slack, tau_scale });
        }
    }
    unreachable!()
}

fn run(disc: &Disc, fixed: &[f64], rho0: f64, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let trip = match disc.guard_limit() {
        Some(s) if cfg.continuation_steps > 1 => Some((1.0 - cfg.sonic_margin) * s),
        _ => None,
    };
    let u0 = disc.quadratic_extension(fixed, rho0, 1.0)?;
    let first = newton_stage(disc, u0, 1.0, cfg, trip);
    let (out, continuation_used, total_iters) = match first {
        Ok(o) if !matches!(o.end, StageEnd::GuardTripped) => {
            let it = o.iterations;
            (o, false, it)
        }
        first => {
            // Ramp the boundary data (and period) in stages.
            if let Err(e) = &first {
                if !disc.guard {
                    return Err(e.clone());
                }
            }
            let n = cfg.continuation_steps;
            let mut total = first.as_ref().map(|o| o.iterations).unwrap_or(0);
            let mut prev: Option<Vec<f64>> = None;
            let mut last = None;
            for s in 1..=n {
                let lam = s as f64 / n as f64;
                let data: Vec<f64> = fixed.iter().map(|v| lam * v).collect();
                let init = match &prev {
                    Some(p) => {
                        let scale = s as f64 / (s - 1) as f64;
                        let mut cand: Vec<f64> = p.iter().map(|v| scale * v).collect();
                        for (v, slot) in cand.iter_mut().enumerate() {
                            if disc.index[v].is_none() {
                                *slot = data[v];
                            }
                        }
                        if disc.trial_energy(&cand, lam).is_some() {
                            cand
                        } else {
                            disc.quadratic_extension(&data, rho0, lam)?
                        }
                    }
                    None => disc.quadratic_extension(&data, rho0, lam)?,
                };
                let o = newton_stage(disc, init, lam, cfg, None)?;
                total += o.iterations;
                let ok = matches!(o.end, StageEnd::Converged);
                prev = Some(o.u.clone());
                last = Some(o);
                if !ok {
                    break;
                }
            }
            (last.expect("at least one stage"), true, total)
        }
    };
    finish(disc, out, continuation_used, total_iters)
}

fn finish(disc: &Disc, out: StageOutcome, continuation_used: bool, iterations: usize) -> Result<SolveReport> {
    let g = disc.grid;
    // Iterates of an unfinished continuation live at a reduced data scale.
    let tau_scale = out.tau_scale;
    let u = out.u;
    let q_cells = disc.cell_q(&u, tau_scale);
    let (energy, _) = disc.energy_terms(&q_cells)?;
    let grad = disc.gradient(&u, &q_cells, tau_scale);
    let residual = disc.residual_field(&grad);
    let residual_sup = disc.sup_free(&residual);
    let max_q = disc.max_q(&q_cells);
    let min_rho = disc.min_rho(&q_cells);
    let uf = DiscreteForm::zero_form(g, u)?;
    let mut du = d(&uf)?;
    if disc.tau_x.iter().chain(&disc.tau_y).any(|t| *t != 0.0) {
        let sc = |v: &Vec<f64>| v.iter().map(|t| tau_scale * t).collect::<Vec<f64>>();
        du = du.add(&DiscreteForm::one_form_staggered(g, sc(&disc.tau_x), sc(&disc.tau_y))?)?;
    }
    let q0 = q_field(&du)?;
    let qv: Vec<f64> = q0.values().iter().zip(&disc.vert_w).map(|(a, w)| a * w).collect();
    let converged = matches!(out.end, StageEnd::Converged);
    Ok(SolveReport {
        u: uf,
        q: DiscreteForm::zero_form(g, qv)?,
        residual: DiscreteForm::zero_form(g, residual)?,
        energy,
        residual_sup,
        iterations,
        max_q,
        min_rho,
        sonic_q: disc.sonic_q,
        sonic_margin: disc.sonic_q.map(|s| s - max_q),
        converged,
        cavitated: min_rho < disc.density.cavitation_threshold(),
        sonic_exceeded: disc.sonic_q.is_some_and(|s| max_q >= s),
        continuation_used,
        picard_steps: out.picard_steps,
        energy_history: out.history,
        energy_tolerance: out.slack,
    })
}

fn disc_for(spec: &ProblemSpec, guard: bool) -> Result<Disc> {
    let w: Vec<f64> = spec.eta()?.values().iter().map(|e| (2.0 * e).exp()).collect();
    Disc::new(
        spec.grid,
        spec.density.clone(),
        w,
        spec.excised.as_deref(),
        spec.period.as_ref(),
        guard,
    )
}

/// Solves `δ[ρ(Q)e^{2η}du] = 0` with the Dirichlet data of `spec`.
pub fn solve(spec: &ProblemSpec, config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let disc = disc_for(spec, config.subsonic_guard)?;
    let rho0 = spec.density.rho(spec.density.domain().lo)?;
    let report = run(&disc, spec.dirichlet.values(), rho0, config)?;
    Ok(report)
}

/// Solves the linear conservative equation `δ(w du) = 0`.
pub fn solve_linear(
    weight: &DiscreteForm,
    grid: Grid2,
    dirichlet: &DiscreteForm,
    excised: Option<&[bool]>,
    period: Option<&DiscreteForm>,
) -> Result<SolveReport> {
    weight.expect_degree(0, "linear weight")?;
    dirichlet.expect_degree(0, "dirichlet data")?;
    if *weight.grid() != grid || *dirichlet.grid() != grid {
        return Err(Error::Shape("weight, data and grid disagree".into()));
    }
    if let Some(m) = excised {
        check_mask(&grid, m, "excised set")?;
    }
    let disc = Disc::new(
        grid,
        MassDensity::constant(1.0)?,
        weight.values().to_vec(),
        excised,
        period,
        false,
    )?;
    let u = disc.quadratic_extension(dirichlet.values(), 1.0, 1.0)?;
    let e = disc.energy(&u, 1.0)?;
    let out = StageOutcome {
        u,
        iterations: 1,
        picard_steps: 0,
        history: vec![e],
        end: StageEnd::Converged,
        slack: 0.0,
        tau_scale: 1.0,
    };
    finish(&disc, out, false, 1)
}

/// Discrete energy `½ Σ_c A F(Q_c)` of `u` with vertex weight `e^{2η}`.
pub fn energy(u: &DiscreteForm, eta: &DiscreteForm, density: &MassDensity) -> Result<f64> {
    u.expect_degree(0, "energy")?;
    eta.expect_degree(0, "energy (η)")?;
    u.same_grid(eta)?;
    let w = eta.values().iter().map(|e| (2.0 * e).exp()).collect();
    let disc = Disc::new(*u.grid(), density.clone(), w, None, None, false)?;
    disc.energy(u.values(), 1.0)
}

/// Energy of `u` for a full problem (excised cells and period included).
pub fn problem_energy(u: &DiscreteForm, spec: &ProblemSpec) -> Result<f64> {
    let disc = disc_for(spec, false)?;
    disc.energy(u.values(), 1.0)
}

/// `∂E/∂u` at every vertex, including fixed ones.
pub fn energy_gradient(u: &DiscreteForm, spec: &ProblemSpec) -> Result<Vec<f64>> {
    let disc = disc_for(spec, false)?;
    let q = disc.cell_q(u.values(), 1.0);
    disc.check_domain(&q)?;
    Ok(disc.gradient(u.values(), &q, 1.0))
}

/// The residual `δ[ρ(Q)e^{2η}du]` at free vertices (zero on fixed ones).
pub fn residual(u: &DiscreteForm, spec: &ProblemSpec) -> Result<DiscreteForm> {
    let g = energy_gradient(u, spec)?;
    let disc = disc_for(spec, false)?;
    DiscreteForm::zero_form(spec.grid, disc.residual_field(&g))
}

/// The flux cochain `κ(du + τ)`, with `κ` the edge average of `ρ(Q_c)e^{2η}` over the
/// adjacent cells. `⟨flux, dψ⟩ = ∂E/∂u · ψ` in the staggered inner product.
pub fn flux(u: &DiscreteForm, spec: &ProblemSpec) -> Result<DiscreteForm> {
    let disc = disc_for(spec, false)?;
    let g = spec.grid;
    let uv = u.values();
    let q = disc.cell_q(uv, 1.0);
    disc.check_domain(&q)?;
    let mut kx = vec![0.0; g.n_xedges()];
    let mut ky = vec![0.0; g.n_yedges()];
    for j in 0..g.ny {
        for i in 0..g.nx {
            let c = g.face(i, j);
            let Some(w) = disc.cell_w[c] else { continue };
            let k = 0.5 * disc.density.rho_raw(q[c]) * w;
            kx[g.xedge(i, j)] += k;
            kx[g.xedge(i, j + 1)] += k;
            ky[g.yedge(i, j)] += k;
            ky[g.yedge(i + 1, j)] += k;
        }
    }
    // Boundary edges carry a halved weight, which absorbs the missing neighbour cell.
    for j in 0..=g.ny {
        if j == 0 || j == g.ny {
            for i in 0..g.nx {
                kx[g.xedge(i, j)] *= 2.0;
            }
        }
    }
    for j in 0..g.ny {
        for i in [0, g.nx] {
            ky[g.yedge(i, j)] *= 2.0;
        }
    }
    let du = d(u)?;
    let xs: Vec<f64> = (0..g.n_xedges())
        .map(|e| kx[e] * (du.components()[0][e] + disc.tau_x[e]))
        .collect();
    let ys: Vec<f64> = (0..g.n_yedges())
        .map(|e| ky[e] * (du.components()[1][e] + disc.tau_y[e]))
        .collect();
    DiscreteForm::one_form_staggered(g, xs, ys)
}

/// The staggered 2-form `dω − Γ∧ω`, with `Γ∧ω` integrated over faces by the trapezoid rule.
pub fn integrability_defect(omega: &DiscreteForm, gamma: &DiscreteForm) -> Result<DiscreteForm> {
    omega.expect_degree(1, "integrability defect (ω)")?;
    gamma.expect_degree(1, "integrability defect (Γ)")?;
    let gw = wedge(gamma, omega)?;
    defect_from_wedge(omega, gw)
}

fn defect_from_wedge(omega: &DiscreteForm, gw: DiscreteForm) -> Result<DiscreteForm> {
    let dw = d(omega)?;
    let gs = gw.to_staggered();
    let vals = dw
        .values()
        .iter()
        .zip(gs.values())
        .map(|(a, b)| a - b)
        .collect();
    DiscreteForm::two_form_staggered(*omega.grid(), vals)
}

/// Sup norm of `dω − Γ∧ω` over all faces.
pub fn frobenius_residual(omega: &DiscreteForm, coefficient: &FrobeniusCoefficient) -> Result<f64> {
    Ok(integrability_defect(omega, &coefficient.gamma()?)?.sup_norm())
}

/// Sup norm of `dω − Γ∧ω` over faces whose corners all lie in `mask`.
pub fn frobenius_residual_where(
    omega: &DiscreteForm,
    coefficient: &FrobeniusCoefficient,
    mask: &[bool],
) -> Result<f64> {
    check_mask(omega.grid(), mask, "frobenius residual")?;
    Ok(integrability_defect(omega, &coefficient.gamma()?)?.sup_norm_where(mask))
}

/// Residual for the gauge-shifted coefficient `Γ + fω`, computed through the bilinear
/// expansion `(Γ + fω)∧ω = Γ∧ω + f(ω∧ω)`. Since `ω∧ω` vanishes exactly, the result
/// equals [`frobenius_residual`] bit for bit.
pub fn frobenius_residual_gauged(
    omega: &DiscreteForm,
    coefficient: &FrobeniusCoefficient,
    f: &DiscreteForm,
) -> Result<f64> {
    f.expect_degree(0, "gauge function")?;
    let gw = wedge(&coefficient.gamma()?, omega)?;
    let ww = wedge(omega, omega)?.mul_pointwise(f)?;
    let shifted = gw.add(&ww)?;
    Ok(defect_from_wedge(omega, shifted)?.sup_norm())
}

/// `e^η du` for a solved potential.
pub fn recursive_form(u: &DiscreteForm, eta: &DiscreteForm, period: Option<&DiscreteForm>) -> Result<DiscreteForm> {
    let mut du = d(u)?;
    if let Some(p) = period {
        du = du.add(&p.to_staggered())?;
    }
    du.mul_pointwise(&eta.map(f64::exp))
}
