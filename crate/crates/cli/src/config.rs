//! Strict `key = value` run configuration.
//!
//! ```text
//! # Scherk's surface
//! [grid]
//! vertices = 65
//! x_min = -1.2
//! x_max = 1.2
//! y_min = -1.2
//! y_max = 1.2
//!
//! [density]
//! family = minimal_surface
//!
//! [problem]
//! boundary = ln(cos(x) / cos(y))
//! ```
//!
//! Unknown sections, unknown keys and repeated keys are errors. Scalar fields given as
//! expressions in `x` and `y` are checked when the file is read. [`RunConfig::to_text`]
//! writes every field, defaults included, in a form that parses back to the same value.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use hodgefrob::density::MassDensity;
use hodgefrob::solver::SolverConfig;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = Result<T, ConfigError>;

/// A scalar field `f(x, y)` written in the `meval` expression language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr(String);

impl Expr {
    pub fn parse(src: &str) -> Result<Self, String> {
        let e = meval::Expr::from_str(src).map_err(|e| format!("bad expression `{src}`: {e}"))?;
        e.bind2("x", "y")
            .map(|_| ())
            .map_err(|e| format!("bad expression `{src}`: {e}"))?;
        Ok(Self(src.trim().to_string()))
    }

    pub fn source(&self) -> &str {
        &self.0
    }

    pub fn compile(&self) -> impl Fn(f64, f64) -> f64 {
        meval::Expr::from_str(&self.0)
            .and_then(|e| e.bind2("x", "y"))
            .expect("expression was validated when parsed")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub vertices_x: usize,
    pub vertices_y: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DensityFamily {
    Chaplygin { gamma: f64 },
    MinimalSurface,
    PowerLaw { k: f64, q: f64 },
    Constant { c: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityConfig {
    pub family: DensityFamily,
    /// Upper end of the Q-scan used by the diagnostics.
    pub scan_max: f64,
    pub scan_samples: usize,
}

impl DensityConfig {
    pub fn build(&self) -> hodgefrob::Result<MassDensity> {
        match self.family {
            DensityFamily::Chaplygin { gamma } => MassDensity::chaplygin(gamma),
            DensityFamily::MinimalSurface => Ok(MassDensity::minimal_surface()),
            DensityFamily::PowerLaw { k, q } => MassDensity::power_law(k, q),
            DensityFamily::Constant { c } => MassDensity::constant(c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    /// `δ[ρ(Q)e^{2η}du] = 0` with the density section.
    Nonlinear,
    /// `δ(w du) = 0` with the `weight` field.
    Linear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Excision {
    pub center: (f64, f64),
    pub halfwidth: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    pub boundary: Expr,
    pub eta: Expr,
    pub weight: Option<Expr>,
    /// Reference solution; the report then carries the sup error.
    pub exact: Option<Expr>,
    pub excise: Option<Excision>,
    /// Center of the `atan2` branch cut whose period is added to `du`.
    pub period_center: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub csv: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { csv: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub center: (f64, f64),
    pub radii: Vec<f64>,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EikonalDirection {
    Forward,
    Inverse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EikonalConfig {
    pub direction: EikonalDirection,
    /// `u` for the forward map, `v` for the inverse.
    pub potential: Expr,
    pub nu: Expr,
    pub sign: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct BacklundConfig {
    /// A `u.csv` from an earlier solve; when absent the problem is solved first.
    pub u_csv: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeConfig {
    pub levels: Vec<usize>,
    pub center: (f64, f64),
    pub ring_radii: Vec<f64>,
    pub outer_annulus: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct RunConfig {
    pub grid: Option<GridConfig>,
    pub density: Option<DensityConfig>,
    pub problem: Option<ProblemConfig>,
    pub solver: Option<SolverConfig>,
    pub output: Option<OutputConfig>,
    pub analysis: Option<AnalysisConfig>,
    pub eikonal: Option<EikonalConfig>,
    pub backlund: Option<BacklundConfig>,
    pub probe: Option<ProbeConfig>,
}

const SECTIONS: [&str; 9] = [
    "grid", "density", "problem", "solver", "output", "analysis", "eikonal", "backlund", "probe",
];

struct Section {
    line: usize,
    entries: BTreeMap<String, (String, usize)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn req<T>(&mut self, name: &str, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> ConfigResult<T> {
        let (v, l) = self
            .take(key)
            .ok_or_else(|| ConfigError::at(self.line, format!("[{name}] is missing `{key}`")))?;
        parse(&v).map_err(|e| ConfigError::at(l, format!("`{key}`: {e}")))
    }

    fn opt<T>(&mut self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> ConfigResult<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, l)) => parse(&v)
                .map(Some)
                .map_err(|e| ConfigError::at(l, format!("`{key}`: {e}"))),
        }
    }

    fn finish(self, name: &str) -> ConfigResult<()> {
        match self.entries.into_iter().min_by_key(|(_, (_, l))| *l) {
            None => Ok(()),
            Some((k, (_, l))) => Err(ConfigError::at(l, format!("unknown key `{k}` in [{name}]"))),
        }
    }
}

fn float(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("expected a number, got `{s}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got `{s}`"))
    }
}

fn count(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("expected a nonnegative integer, got `{s}`"))
}

fn boolean(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, got `{other}`")),
    }
}

fn float_list(s: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s.split(',').map(float).collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("expected a comma-separated list".into());
    }
    Ok(v)
}

fn count_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(count).collect()
}

fn pair(s: &str) -> Result<(f64, f64), String> {
    match float_list(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected two comma-separated numbers, got `{s}`")),
    }
}

fn expr(s: &str) -> Result<Expr, String> {
    Expr::parse(s)
}

fn parse_sections(text: &str) -> ConfigResult<BTreeMap<String, Section>> {
    let mut out: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line, format!("malformed section header `{content}`")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::at(line, format!("unknown section [{name}]")));
            }
            if out.contains_key(name) {
                return Err(ConfigError::at(line, format!("section [{name}] appears twice")));
            }
            out.insert(
                name.to_string(),
                Section {
                    line,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::at(line, format!("expected `key = value`, got `{content}`")));
        }
        let name = current
            .as_ref()
            .ok_or_else(|| ConfigError::at(line, "key outside of any section"))?;
        let sec = out.get_mut(name).expect("current section exists");
        if sec.entries.insert(key.to_string(), (value.to_string(), line)).is_some() {
            return Err(ConfigError::at(line, format!("key `{key}` repeated in [{name}]")));
        }
    }
    Ok(out)
}

fn grid_section(mut s: Section) -> ConfigResult<GridConfig> {
    let both = s.opt("vertices", count)?;
    let vx = s.opt("vertices_x", count)?;
    let vy = s.opt("vertices_y", count)?;
    let (vertices_x, vertices_y) = match (both, vx, vy) {
        (Some(n), None, None) => (n, n),
        (None, Some(a), Some(b)) => (a, b),
        _ => {
            return Err(ConfigError::at(
                s.line,
                "[grid] needs either `vertices` or both `vertices_x` and `vertices_y`",
            ))
        }
    };
    let g = GridConfig {
        vertices_x,
        vertices_y,
        x_min: s.req("grid", "x_min", float)?,
        x_max: s.req("grid", "x_max", float)?,
        y_min: s.req("grid", "y_min", float)?,
        y_max: s.req("grid", "y_max", float)?,
    };
    let line = s.line;
    s.finish("grid")?;
    if g.vertices_x < 2 || g.vertices_y < 2 {
        return Err(ConfigError::at(line, "[grid] needs at least 2 vertices per side"));
    }
    if !(g.x_max > g.x_min && g.y_max > g.y_min) {
        return Err(ConfigError::at(line, "[grid] bounds must satisfy min < max"));
    }
    Ok(g)
}

fn density_section(mut s: Section) -> ConfigResult<DensityConfig> {
    let fam: String = s.req("density", "family", |v| Ok(v.to_string()))?;
    let family = match fam.as_str() {
        "chaplygin" => DensityFamily::Chaplygin {
            gamma: s.req("density", "gamma", float)?,
        },
        "minimal_surface" => DensityFamily::MinimalSurface,
        "power_law" => DensityFamily::PowerLaw {
            k: s.req("density", "k", float)?,
            q: s.req("density", "q", float)?,
        },
        "constant" => DensityFamily::Constant {
            c: s.req("density", "c", float)?,
        },
        other => {
            return Err(ConfigError::at(
                s.line,
                format!("unknown density family `{other}` (chaplygin, minimal_surface, power_law, constant)"),
            ))
        }
    };
    let cfg = DensityConfig {
        family,
        scan_max: s.opt("scan_max", float)?.unwrap_or(1e6),
        scan_samples: s.opt("scan_samples", count)?.unwrap_or(400),
    };
    let line = s.line;
    s.finish("density")?;
    cfg.build()
        .map_err(|e| ConfigError::at(line, e.to_string()))?;
    if !(cfg.scan_max > 0.0) || cfg.scan_samples < 2 {
        return Err(ConfigError::at(line, "[density] needs scan_max > 0 and scan_samples >= 2"));
    }
    Ok(cfg)
}

fn problem_section(mut s: Section) -> ConfigResult<ProblemConfig> {
    let kind = match s.opt("kind", |v| Ok(v.to_string()))?.as_deref() {
        None | Some("nonlinear") => ProblemKind::Nonlinear,
        Some("linear") => ProblemKind::Linear,
        Some(other) => {
            return Err(ConfigError::at(
                s.line,
                format!("unknown problem kind `{other}` (nonlinear, linear)"),
            ))
        }
    };
    let boundary = s.req("problem", "boundary", expr)?;
    let eta = s.opt("eta", expr)?.unwrap_or_else(|| Expr("0".into()));
    let weight = s.opt("weight", expr)?;
    let exact = s.opt("exact", expr)?;
    let center = s.opt("excise_center", pair)?;
    let half = s.opt("excise_halfwidth", float)?;
    let excise = match (center, half) {
        (None, None) => None,
        (Some(center), Some(halfwidth)) if halfwidth > 0.0 => Some(Excision { center, halfwidth }),
        _ => {
            return Err(ConfigError::at(
                s.line,
                "excision needs both `excise_center` and a positive `excise_halfwidth`",
            ))
        }
    };
    let period_center = s.opt("period_center", pair)?;
    let line = s.line;
    s.finish("problem")?;
    match (kind, &weight) {
        (ProblemKind::Linear, None) => {
            return Err(ConfigError::at(line, "a linear problem needs `weight`"))
        }
        (ProblemKind::Nonlinear, Some(_)) => {
            return Err(ConfigError::at(
                line,
                "`weight` belongs to linear problems; nonlinear problems use `eta`",
            ))
        }
        _ => {}
    }
    if kind == ProblemKind::Linear && eta.source() != "0" {
        return Err(ConfigError::at(line, "`eta` belongs to nonlinear problems; linear problems use `weight`"));
    }
    Ok(ProblemConfig {
        kind,
        boundary,
        eta,
        weight,
        exact,
        excise,
        period_center,
    })
}

fn solver_section(mut s: Section) -> ConfigResult<SolverConfig> {
    let d = SolverConfig::default();
    let c = SolverConfig {
        max_iterations: s.opt("max_iterations", count)?.unwrap_or(d.max_iterations),
        tolerance: s.opt("tolerance", float)?.unwrap_or(d.tolerance),
        damping: s.opt("damping", float)?.unwrap_or(d.damping),
        continuation_steps: s.opt("continuation_steps", count)?.unwrap_or(d.continuation_steps),
        subsonic_guard: s.opt("subsonic_guard", boolean)?.unwrap_or(d.subsonic_guard),
        sonic_margin: s.opt("sonic_margin", float)?.unwrap_or(d.sonic_margin),
    };
    let line = s.line;
    s.finish("solver")?;
    c.validate().map_err(|e| ConfigError::at(line, e.to_string()))?;
    Ok(c)
}

fn output_section(mut s: Section) -> ConfigResult<OutputConfig> {
    let c = OutputConfig {
        csv: s.opt("csv", boolean)?.unwrap_or(true),
    };
    s.finish("output")?;
    Ok(c)
}

fn analysis_section(mut s: Section) -> ConfigResult<AnalysisConfig> {
    let c = AnalysisConfig {
        center: s.opt("center", pair)?.unwrap_or((0.0, 0.0)),
        radii: s.req("analysis", "radii", float_list)?,
        delta: s.opt("delta", float)?.unwrap_or(0.5),
    };
    let line = s.line;
    s.finish("analysis")?;
    if c.radii.iter().any(|r| !(*r > 0.0)) || !(c.delta > 0.0 && c.delta < 1.0) {
        return Err(ConfigError::at(line, "[analysis] needs positive radii and delta in (0, 1)"));
    }
    Ok(c)
}

fn eikonal_section(mut s: Section) -> ConfigResult<EikonalConfig> {
    let direction = match s.opt("direction", |v| Ok(v.to_string()))?.as_deref() {
        None | Some("forward") => EikonalDirection::Forward,
        Some("inverse") => EikonalDirection::Inverse,
        Some(other) => {
            return Err(ConfigError::at(
                s.line,
                format!("unknown eikonal direction `{other}` (forward, inverse)"),
            ))
        }
    };
    let c = EikonalConfig {
        direction,
        potential: s.req("eikonal", "potential", expr)?,
        nu: s.opt("nu", expr)?.unwrap_or_else(|| Expr("1".into())),
        sign: s.opt("sign", float)?.unwrap_or(1.0),
    };
    let line = s.line;
    s.finish("eikonal")?;
    if c.sign != 1.0 && c.sign != -1.0 {
        return Err(ConfigError::at(line, "[eikonal] sign must be 1 or -1"));
    }
    Ok(c)
}

fn backlund_section(mut s: Section) -> ConfigResult<BacklundConfig> {
    let c = BacklundConfig {
        u_csv: s.opt("u_csv", |v| Ok(v.to_string()))?,
    };
    s.finish("backlund")?;
    Ok(c)
}

fn probe_section(mut s: Section) -> ConfigResult<ProbeConfig> {
    let c = ProbeConfig {
        levels: s.req("probe", "levels", count_list)?,
        center: s.opt("center", pair)?.unwrap_or((0.0, 0.0)),
        ring_radii: s.req("probe", "ring_radii", float_list)?,
        outer_annulus: s.req("probe", "outer_annulus", pair)?,
    };
    let line = s.line;
    s.finish("probe")?;
    if c.levels.len() < 2 || c.levels.iter().any(|n| *n < 3) {
        return Err(ConfigError::at(line, "[probe] needs at least two levels of 3 or more vertices"));
    }
    if c.ring_radii.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(ConfigError::at(line, "[probe] ring_radii must be strictly decreasing"));
    }
    Ok(c)
}

impl RunConfig {
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut secs = parse_sections(text)?;
        let mut c = RunConfig::default();
        if let Some(s) = secs.remove("grid") {
            c.grid = Some(grid_section(s)?);
        }
        if let Some(s) = secs.remove("density") {
            c.density = Some(density_section(s)?);
        }
        if let Some(s) = secs.remove("problem") {
            c.problem = Some(problem_section(s)?);
        }
        if let Some(s) = secs.remove("solver") {
            c.solver = Some(solver_section(s)?);
        }
        if let Some(s) = secs.remove("output") {
            c.output = Some(output_section(s)?);
        }
        if let Some(s) = secs.remove("analysis") {
            c.analysis = Some(analysis_section(s)?);
        }
        if let Some(s) = secs.remove("eikonal") {
            c.eikonal = Some(eikonal_section(s)?);
        }
        if let Some(s) = secs.remove("backlund") {
            c.backlund = Some(backlund_section(s)?);
        }
        if let Some(s) = secs.remove("probe") {
            c.probe = Some(probe_section(s)?);
        }
        Ok(c)
    }

    /// Canonical text form; every field is written explicitly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut section = |name: &str, lines: Vec<(String, String)>| {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&format!("[{name}]\n"));
            for (k, v) in lines {
                out.push_str(&format!("{k} = {v}\n"));
            }
        };
        let kv = |k: &str, v: String| (k.to_string(), v);
        let pr = |p: (f64, f64)| format!("{}, {}", p.0, p.1);
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        if let Some(g) = &self.grid {
            section(
                "grid",
                vec![
                    kv("vertices_x", g.vertices_x.to_string()),
                    kv("vertices_y", g.vertices_y.to_string()),
                    kv("x_min", g.x_min.to_string()),
                    kv("x_max", g.x_max.to_string()),
                    kv("y_min", g.y_min.to_string()),
                    kv("y_max", g.y_max.to_string()),
                ],
            );
        }
        if let Some(d) = &self.density {
            let mut l = match d.family {
                DensityFamily::Chaplygin { gamma } => {
                    vec![kv("family", "chaplygin".into()), kv("gamma", gamma.to_string())]
                }
                DensityFamily::MinimalSurface => vec![kv("family", "minimal_surface".into())],
                DensityFamily::PowerLaw { k, q } => vec![
                    kv("family", "power_law".into()),
                    kv("k", k.to_string()),
                    kv("q", q.to_string()),
                ],
                DensityFamily::Constant { c } => {
                    vec![kv("family", "constant".into()), kv("c", c.to_string())]
                }
            };
            l.push(kv("scan_max", d.scan_max.to_string()));
            l.push(kv("scan_samples", d.scan_samples.to_string()));
            section("density", l);
        }
        if let Some(p) = &self.problem {
            let mut l = vec![kv(
                "kind",
                match p.kind {
                    ProblemKind::Nonlinear => "nonlinear",
                    ProblemKind::Linear => "linear",
                }
                .into(),
            )];
            l.push(kv("boundary", p.boundary.source().into()));
            if p.kind == ProblemKind::Nonlinear {
                l.push(kv("eta", p.eta.source().into()));
            }
            if let Some(w) = &p.weight {
                l.push(kv("weight", w.source().into()));
            }
            if let Some(e) = &p.exact {
                l.push(kv("exact", e.source().into()));
            }
            if let Some(x) = &p.excise {
                l.push(kv("excise_center", pr(x.center)));
                l.push(kv("excise_halfwidth", x.halfwidth.to_string()));
            }
            if let Some(c) = p.period_center {
                l.push(kv("period_center", pr(c)));
            }
            section("problem", l);
        }
        if let Some(s) = &self.solver {
            section(
                "solver",
                vec![
                    kv("max_iterations", s.max_iterations.to_string()),
                    kv("tolerance", s.tolerance.to_string()),
                    kv("damping", s.damping.to_string()),
                    kv("continuation_steps", s.continuation_steps.to_string()),
                    kv("subsonic_guard", s.subsonic_guard.to_string()),
                    kv("sonic_margin", s.sonic_margin.to_string()),
                ],
            );
        }
        if let Some(o) = &self.output {
            section("output", vec![kv("csv", o.csv.to_string())]);
        }
        if let Some(a) = &self.analysis {
            section(
                "analysis",
                vec![
                    kv("center", pr(a.center)),
                    kv("radii", list(&a.radii)),
                    kv("delta", a.delta.to_string()),
                ],
            );
        }
        if let Some(e) = &self.eikonal {
            section(
                "eikonal",
                vec![
                    kv(
                        "direction",
                        match e.direction {
                            EikonalDirection::Forward => "forward",
                            EikonalDirection::Inverse => "inverse",
                        }
                        .into(),
                    ),
                    kv("potential", e.potential.source().into()),
                    kv("nu", e.nu.source().into()),
                    kv("sign", e.sign.to_string()),
                ],
            );
        }
        if let Some(b) = &self.backlund {
            let l = b.u_csv.iter().map(|p| kv("u_csv", p.clone())).collect();
            section("backlund", l);
        }
        if let Some(p) = &self.probe {
            section(
                "probe",
                vec![
                    kv(
                        "levels",
                        p.levels.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "),
                    ),
                    kv("center", pr(p.center)),
                    kv("ring_radii", list(&p.ring_radii)),
                    kv("outer_annulus", pr(p.outer_annulus)),
                ],
            );
        }
        out
    }

    pub fn grid(&self) -> ConfigResult<&GridConfig> {
        self.grid.as_ref().ok_or_else(|| ConfigError::general("missing [grid] section"))
    }

    pub fn density(&self) -> ConfigResult<&DensityConfig> {
        self.density
            .as_ref()
            .ok_or_else(|| ConfigError::general("missing [density] section"))
    }

    pub fn problem(&self) -> ConfigResult<&ProblemConfig> {
        self.problem
            .as_ref()
            .ok_or_else(|| ConfigError::general("missing [problem] section"))
    }

    pub fn analysis(&self) -> ConfigResult<&AnalysisConfig> {
        self.analysis
            .as_ref()
            .ok_or_else(|| ConfigError::general("missing [analysis] section"))
    }

    pub fn eikonal(&self) -> ConfigResult<&EikonalConfig> {
        self.eikonal
            .as_ref()
            .ok_or_else(|| ConfigError::general("missing [eikonal] section"))
    }

    pub fn probe(&self) -> ConfigResult<&ProbeConfig> {
        self.probe
            .as_ref()
            .ok_or_else(|| ConfigError::general("missing [probe] section"))
    }

    pub fn solver_config(&self) -> SolverConfig {
        self.solver.clone().unwrap_or_default()
    }

    pub fn output_config(&self) -> OutputConfig {
        self.output.clone().unwrap_or_default()
    }
}
