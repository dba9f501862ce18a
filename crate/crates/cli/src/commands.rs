//! Subcommands. Each one reads a [`RunConfig`], writes its outputs under the output
//! directory and returns an exit code with a `key = value` report.

use std::fs;
use std::path::{Path, PathBuf};

use hodgefrob::analysis::{mean_value_check, singularity_probe, ProbeGeometry};
use hodgefrob::backlund::{check_eikonal_pair_where, eikonal_forward, eikonal_inverse, hodge_dual};
use hodgefrob::dec::{DiscreteForm, FrobeniusCoefficient, Grid2};
use hodgefrob::density::{Family, MassDensity, QScan};
use hodgefrob::fields::{angle_period, block_mask};
use hodgefrob::io::{read_vertex_field, vertex_csv_string};
use hodgefrob::solver::{recursive_form, solve, solve_linear, ProblemSpec, SolveReport};
use hodgefrob::{verify, Error};

use crate::config::{ConfigError, EikonalDirection, GridConfig, ProblemKind, RunConfig};
use crate::report::Report;

pub const EXIT_OK: i32 = 0;
/// I/O failures and anything not covered below.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
/// Non-convergence, or a failed check in `verify`.
pub const EXIT_NOT_CONVERGED: i32 = 3;
/// Speed outside the density domain, cavitation, or a violated transform hypothesis.
pub const EXIT_DOMAIN: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    DensityReport,
    Solve,
    Backlund,
    Eikonal,
    MeanValue,
    SingularityProbe,
    Verify,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Report,
    /// Diagnostic for stderr when the command did not succeed.
    pub message: Option<String>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain { .. } | Error::DomainAt { .. } | Error::Duality(_) | Error::Hypothesis(_) => EXIT_DOMAIN,
            Error::Evaluation(_) | Error::LinearSolver(_) => EXIT_NOT_CONVERGED,
            Error::Parameter(_) | Error::Problem(_) | Error::Shape(_) | Error::Geometry(_) | Error::Degree(_) => {
                EXIT_CONFIG
            }
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: format!("i/o error: {e}"),
        }
    }
}

type Res<T> = Result<T, Failure>;

/// Where outputs go and how relative paths in the config resolve.
pub struct Context {
    pub out_dir: PathBuf,
    pub config_dir: PathBuf,
}

pub fn execute(cmd: Command, cfg: &RunConfig, ctx: &Context) -> Outcome {
    let mut report = Report::new();
    let res = (|| -> Res<i32> {
        fs::create_dir_all(&ctx.out_dir)?;
        let code = match cmd {
            Command::DensityReport => density_report(cfg, &mut report)?,
            Command::Solve => cmd_solve(cfg, ctx, &mut report)?,
            Command::Backlund => cmd_backlund(cfg, ctx, &mut report)?,
            Command::Eikonal => cmd_eikonal(cfg, ctx, &mut report)?,
            Command::MeanValue => cmd_mean_value(cfg, &mut report)?,
            Command::SingularityProbe => cmd_probe(cfg, &mut report)?,
            Command::Verify => cmd_verify(&mut report),
        };
        fs::write(ctx.out_dir.join("report.txt"), report.render())?;
        Ok(code)
    })();
    match res {
        Ok(code) => Outcome {
            code,
            message: (code != EXIT_OK).then(|| status_message(code)),
            report,
        },
        Err(f) => Outcome {
            code: f.code,
            report,
            message: Some(f.message),
        },
    }
}

fn status_message(code: i32) -> String {
    match code {
        EXIT_NOT_CONVERGED => "did not converge or a check failed".into(),
        EXIT_DOMAIN => "left the admissible domain (cavitation or sonic speed)".into(),
        c => format!("exit {c}"),
    }
}

fn build_grid(g: &GridConfig) -> Res<Grid2> {
    Ok(Grid2::rect(
        g.vertices_x,
        g.vertices_y,
        (g.x_min, g.x_max),
        (g.y_min, g.y_max),
    )?)
}

fn square_grid(g: &GridConfig, n: usize) -> Res<Grid2> {
    Ok(Grid2::rect(n, n, (g.x_min, g.x_max), (g.y_min, g.y_max))?)
}

fn sample(grid: Grid2, e: &crate::config::Expr) -> Res<DiscreteForm> {
    let f = e.compile();
    let form = DiscreteForm::sample_zero(grid, f)?;
    if let Some(v) = form.values().iter().position(|x| !x.is_finite()) {
        let (x, y) = grid.vertex_xy(v);
        return Err(ConfigError::general(format!(
            "expression `{}` is not finite at ({x}, {y})",
            e.source()
        ))
        .into());
    }
    Ok(form)
}

fn excision(cfg: &RunConfig, grid: &Grid2) -> Res<Option<Vec<bool>>> {
    Ok(cfg
        .problem()?
        .excise
        .as_ref()
        .map(|x| block_mask(grid, x.center, x.halfwidth)))
}

fn period(cfg: &RunConfig, grid: &Grid2) -> Res<Option<DiscreteForm>> {
    match cfg.problem()?.period_center {
        Some(c) => Ok(Some(angle_period(grid, c)?)),
        None => Ok(None),
    }
}

fn nonlinear_spec(cfg: &RunConfig, grid: Grid2) -> Res<ProblemSpec> {
    let p = cfg.problem()?;
    if p.kind != ProblemKind::Nonlinear {
        return Err(ConfigError::general("this command needs a nonlinear problem").into());
    }
    let density = cfg.density()?.build()?;
    let mut spec = ProblemSpec::new(
        grid,
        density,
        FrobeniusCoefficient::Exact(sample(grid, &p.eta)?),
        sample(grid, &p.boundary)?,
    )?;
    if let Some(m) = excision(cfg, &grid)? {
        spec = spec.with_excised(m)?;
    }
    if let Some(t) = period(cfg, &grid)? {
        spec = spec.with_period(t)?;
    }
    Ok(spec)
}

/// Solves the configured problem on the configured grid.
fn run_problem(cfg: &RunConfig) -> Res<(Grid2, SolveReport)> {
    let grid = build_grid(cfg.grid()?)?;
    let p = cfg.problem()?;
    let report = match p.kind {
        ProblemKind::Nonlinear => solve(&nonlinear_spec(cfg, grid)?, &cfg.solver_config())?,
        ProblemKind::Linear => {
            let w = sample(grid, p.weight.as_ref().expect("linear problems carry a weight"))?;
            let data = sample(grid, &p.boundary)?;
            let ex = excision(cfg, &grid)?;
            let t = period(cfg, &grid)?;
            solve_linear(&w, grid, &data, ex.as_deref(), t.as_ref())?
        }
    };
    Ok((grid, report))
}

fn write_csv(dir: &Path, name: &str, grid: &Grid2, values: &[f64]) -> Res<()> {
    fs::write(dir.join(name), vertex_csv_string(grid, values)?)?;
    Ok(())
}

fn density_report(cfg: &RunConfig, r: &mut Report) -> Res<i32> {
    let dc = cfg.density()?;
    let d = dc.build()?;
    let rep = d.check_hypotheses(&QScan::new(0.0, dc.scan_max, dc.scan_samples));
    r.text("family", d.name())
        .text("q_domain", d.domain().to_string())
        .opt("sonic_Q", rep.sonic_q)
        .opt("kappa_min", rep.kappa_bounds.map(|k| k.0))
        .opt("kappa_max", rep.kappa_bounds.map(|k| k.1))
        .opt("hypo_pos_C", rep.hypo_pos_c)
        .opt("hypo_neg_C", rep.hypo_neg_c)
        .text("binding", rep.binding.to_string())
        .opt("lemma2_C", rep.lemma2_c)
        .num("min_rho", rep.min_rho)
        .flag("cavitation", rep.cavitates);
    Ok(EXIT_OK)
}

fn solve_lines(r: &mut Report, s: &SolveReport) {
    r.flag("converged", s.converged)
        .int("iterations", s.iterations)
        .num("residual_sup", s.residual_sup)
        .num("energy", s.energy)
        .num("max_Q", s.max_q)
        .num("min_rho", s.min_rho)
        .opt("sonic_Q", s.sonic_q)
        .opt("sonic_margin", s.sonic_margin)
        .flag("cavitated", s.cavitated)
        .flag("sonic_exceeded", s.sonic_exceeded)
        .flag("continuation_used", s.continuation_used)
        .int("picard_steps", s.picard_steps)
        .num("energy_tolerance", s.energy_tolerance);
}

fn solve_code(s: &SolveReport) -> i32 {
    if !s.converged {
        EXIT_NOT_CONVERGED
    } else if s.cavitated || s.sonic_exceeded {
        EXIT_DOMAIN
    } else {
        EXIT_OK
    }
}

fn cmd_solve(cfg: &RunConfig, ctx: &Context, r: &mut Report) -> Res<i32> {
    let (grid, s) = run_problem(cfg)?;
    solve_lines(r, &s);
    if let Some(e) = &cfg.problem()?.exact {
        let exact = sample(grid, e)?;
        let keep: Vec<bool> = match excision(cfg, &grid)? {
            Some(m) => m.iter().map(|x| !x).collect(),
            None => vec![true; grid.n_vertices()],
        };
        r.num("sup_error", s.u.sub(&exact)?.sup_norm_where(&keep));
    }
    if cfg.output_config().csv {
        write_csv(&ctx.out_dir, "u.csv", &grid, s.u.values())?;
        write_csv(&ctx.out_dir, "Q.csv", &grid, s.q.values())?;
        write_csv(&ctx.out_dir, "residual.csv", &grid, s.residual.values())?;
    }
    Ok(solve_code(&s))
}

/// The density paired with `rho` under `ρ(Q)ρ̂(|ξ|²) = 1`.
fn partner(rho: &MassDensity) -> Res<MassDensity> {
    match rho.family() {
        Family::MinimalSurface => Ok(MassDensity::dual_minimal_surface()),
        Family::Constant { c } => Ok(MassDensity::constant(1.0 / c)?),
        _ => Err(ConfigError::general(format!(
            "no dual density is available for {}; use minimal_surface or constant",
            rho.name()
        ))
        .into()),
    }
}

fn cmd_backlund(cfg: &RunConfig, ctx: &Context, r: &mut Report) -> Res<i32> {
    let grid = build_grid(cfg.grid()?)?;
    let p = cfg.problem()?;
    let rho = cfg.density()?.build()?;
    let rho_hat = partner(&rho)?;
    let u_csv = cfg.backlund.as_ref().and_then(|b| b.u_csv.clone());
    let u = match u_csv {
        Some(path) => {
            let path = ctx.config_dir.join(path);
            let file = fs::File::open(&path)
                .map_err(|e| ConfigError::general(format!("cannot open {}: {e}", path.display())))?;
            DiscreteForm::zero_form(grid, read_vertex_field(file, &grid)?)?
        }
        None => {
            let s = solve(&nonlinear_spec(cfg, grid)?, &cfg.solver_config())?;
            if !s.converged {
                solve_lines(r, &s);
                return Ok(EXIT_NOT_CONVERGED);
            }
            s.u
        }
    };
    let eta = sample(grid, &p.eta)?;
    let omega = recursive_form(&u, &eta, period(cfg, &grid)?.as_ref())?;
    let pair = hodge_dual(&omega, &eta, &rho, &rho_hat)?;
    r.text("dual_family", rho_hat.name())
        .num("pointwise_product_error", pair.pointwise_product_error)
        .num("xi_sq_max", pair.xi_sq_max)
        .num("frobenius_residual", pair.frobenius_residual);
    if cfg.output_config().csv {
        let c = pair.xi.components();
        write_csv(&ctx.out_dir, "xi_dx.csv", &grid, &c[0])?;
        write_csv(&ctx.out_dir, "xi_dy.csv", &grid, &c[1])?;
        write_csv(&ctx.out_dir, "eta_hat.csv", &grid, pair.eta_hat.values())?;
    }
    Ok(EXIT_OK)
}

fn cmd_eikonal(cfg: &RunConfig, ctx: &Context, r: &mut Report) -> Res<i32> {
    let grid = build_grid(cfg.grid()?)?;
    let e = cfg.eikonal()?;
    let input = sample(grid, &e.potential)?;
    let nu = sample(grid, &e.nu)?;
    let (t, u, v, name) = match e.direction {
        EikonalDirection::Forward => {
            let t = eikonal_forward(&input, &nu, e.sign)?;
            let v = t.potential.clone();
            (t, input, v, "v.csv")
        }
        EikonalDirection::Inverse => {
            let t = eikonal_inverse(&input, &nu, e.sign)?;
            let u = t.potential.clone();
            (t, u, input, "u.csv")
        }
    };
    let check = check_eikonal_pair_where(&u, &v, &nu, &grid.interior_mask(1))?;
    r.num("isometry_defect", check.diff_residual)
        .num("orthogonality_defect", check.orthogonality_residual)
        .num("integrability_residual", t.integrability_residual);
    if cfg.output_config().csv {
        write_csv(&ctx.out_dir, name, &grid, t.potential.values())?;
    }
    Ok(EXIT_OK)
}

fn cmd_mean_value(cfg: &RunConfig, r: &mut Report) -> Res<i32> {
    let a = cfg.analysis()?;
    let (_, s) = run_problem(cfg)?;
    if !s.converged {
        solve_lines(r, &s);
        return Ok(EXIT_NOT_CONVERGED);
    }
    let density = match cfg.problem()?.kind {
        ProblemKind::Nonlinear => cfg.density()?.build()?,
        ProblemKind::Linear => MassDensity::constant(1.0)?,
    };
    r.num("delta", a.delta);
    for &radius in &a.radii {
        let m = mean_value_check(&s, &density, a.center, radius, a.delta)?;
        let key = |k: &str| format!("{k}(R={radius})");
        r.num(key("sup_inner"), m.sup_inner)
            .num(key("mean_outer"), m.mean_outer)
            .num(key("c_emp"), m.c_emp)
            .flag(key("degenerate"), m.degenerate);
    }
    Ok(EXIT_OK)
}

fn cmd_probe(cfg: &RunConfig, r: &mut Report) -> Res<i32> {
    let pc = cfg.probe()?;
    let gc = cfg.grid()?;
    if cfg.problem()?.excise.is_none() {
        return Err(ConfigError::general("the singularity probe needs an excised set in [problem]").into());
    }
    let geometry = ProbeGeometry {
        center: pc.center,
        ring_radii: pc.ring_radii.clone(),
        outer_annulus: pc.outer_annulus,
    };
    let build = |n: usize| -> hodgefrob::Result<ProblemSpec> {
        let g = square_grid(gc, n).map_err(|f| Error::Problem(f.message))?;
        nonlinear_spec(cfg, g).map_err(|f| Error::Problem(f.message))
    };
    // Surface configuration mistakes with their own exit code before solving anything.
    nonlinear_spec(cfg, square_grid(gc, pc.levels[0])?)?;
    let rep = singularity_probe(&pc.levels, build, &cfg.solver_config(), &geometry)?;
    r.list("ring_radii", &rep.ring_radii);
    for l in &rep.levels {
        let n = l.vertices_per_side;
        r.num(format!("level_{n}.h"), l.h)
            .flag(format!("level_{n}.converged"), l.converged)
            .list(format!("level_{n}.max_qrho"), &l.max_qrho_per_ring)
            .num(format!("level_{n}.h_l2_outer"), l.h_l2_outer)
            .num(format!("level_{n}.theorem5_ratio"), l.theorem5_ratio);
    }
    r.opt("last_variation", rep.last_variation())
        .opt("growth_slope", rep.growth_slope());
    Ok(if rep.levels.iter().all(|l| l.converged) {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_verify(r: &mut Report) -> i32 {
    let results = verify::run_all();
    for c in &results {
        r.text(format!("criterion_{}", c.id), if c.passed { "pass" } else { "fail" })
            .text(format!("criterion_{}.name", c.id), c.name)
            .text(format!("criterion_{}.detail", c.id), c.detail.clone());
    }
    if results.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}
