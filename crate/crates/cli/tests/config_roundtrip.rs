use hodgefrob::solver::SolverConfig;
use hodgefrob_cli::config::{
    AnalysisConfig, BacklundConfig, DensityConfig, DensityFamily, EikonalConfig, EikonalDirection, Excision, Expr,
    GridConfig, OutputConfig, ProbeConfig, ProblemConfig, ProblemKind, RunConfig,
};
use proptest::prelude::*;

fn num() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3f64..1e3, (-40i32..40).prop_map(|e| 1.2345678901234567 * 10f64.powi(e))]
}

fn expr() -> impl Strategy<Value = Expr> {
    prop::sample::select(vec![
        "0",
        "x",
        "ln(cos(x) / cos(y))",
        "atan2(y, x)",
        "x^2 + y^2",
        "max(x, y) * 2e-3",
        "sqrt(1 + x*x) - exp(-y)",
    ])
    .prop_map(|s| Expr::parse(s).unwrap())
}

fn grid() -> impl Strategy<Value = GridConfig> {
    (2usize..300, 2usize..300, num(), 0.001f64..100.0, num(), 0.001f64..100.0).prop_map(|(vx, vy, x0, lx, y0, ly)| {
        GridConfig {
            vertices_x: vx,
            vertices_y: vy,
            x_min: x0,
            x_max: x0 + lx * (1.0 + x0.abs()),
            y_min: y0,
            y_max: y0 + ly * (1.0 + y0.abs()),
        }
    })
}

fn density() -> impl Strategy<Value = DensityConfig> {
    let fam = prop_oneof![
        (1.01f64..5.0).prop_map(|gamma| DensityFamily::Chaplygin { gamma }),
        Just(DensityFamily::MinimalSurface),
        (0.01f64..5.0, -2.0f64..2.0).prop_map(|(k, q)| DensityFamily::PowerLaw { k, q }),
        (0.01f64..5.0).prop_map(|c| DensityFamily::Constant { c }),
    ];
    (fam, 1.0f64..1e8, 2usize..5000).prop_map(|(family, scan_max, scan_samples)| DensityConfig {
        family,
        scan_max,
        scan_samples,
    })
}

fn problem() -> impl Strategy<Value = ProblemConfig> {
    (
        any::<bool>(),
        expr(),
        expr(),
        expr(),
        proptest::option::of(expr()),
        proptest::option::of((num(), num(), 0.01f64..1.0)),
        proptest::option::of((num(), num())),
    )
        .prop_map(|(linear, boundary, eta, weight, exact, ex, pc)| ProblemConfig {
            kind: if linear { ProblemKind::Linear } else { ProblemKind::Nonlinear },
            boundary,
            eta: if linear { Expr::parse("0").unwrap() } else { eta },
            weight: linear.then_some(weight),
            exact,
            excise: ex.map(|(a, b, halfwidth)| Excision {
                center: (a, b),
                halfwidth,
            }),
            period_center: pc,
        })
}

fn solver() -> impl Strategy<Value = SolverConfig> {
    (0usize..500, 1e-14f64..1.0, 0.01f64..1.0, 1usize..50, any::<bool>(), 0.0f64..0.99).prop_map(
        |(max_iterations, tolerance, damping, continuation_steps, subsonic_guard, sonic_margin)| SolverConfig {
            max_iterations,
            tolerance,
            damping,
            continuation_steps,
            subsonic_guard,
            sonic_margin,
        },
    )
}

fn config() -> impl Strategy<Value = RunConfig> {
    (
        proptest::option::of(grid()),
        proptest::option::of(density()),
        proptest::option::of(problem()),
        proptest::option::of(solver()),
        proptest::option::of(any::<bool>().prop_map(|csv| OutputConfig { csv })),
        proptest::option::of((num(), num(), proptest::collection::vec(0.01f64..5.0, 1..5), 0.01f64..0.99)),
        proptest::option::of((any::<bool>(), expr(), expr(), any::<bool>())),
        proptest::option::of(proptest::option::of("[a-z_/]{1,12}\\.csv")),
        proptest::option::of((
            proptest::collection::vec(3usize..300, 2..5),
            proptest::collection::vec(0.01f64..1.0, 1..6),
            (0.01f64..1.0, 1.0f64..2.0),
        )),
    )
        .prop_map(|(grid, density, problem, solver, output, an, ei, bk, pr)| RunConfig {
            grid,
            density,
            problem,
            solver,
            output,
            analysis: an.map(|(a, b, radii, delta)| AnalysisConfig {
                center: (a, b),
                radii,
                delta,
            }),
            eikonal: ei.map(|(fwd, potential, nu, plus)| EikonalConfig {
                direction: if fwd { EikonalDirection::Forward } else { EikonalDirection::Inverse },
                potential,
                nu,
                sign: if plus { 1.0 } else { -1.0 },
            }),
            backlund: bk.map(|u_csv| BacklundConfig { u_csv }),
            probe: pr.map(|(levels, mut rings, annulus)| {
                rings.sort_by(|a, b| b.partial_cmp(a).unwrap());
                rings.dedup();
                ProbeConfig {
                    levels,
                    center: (0.0, 0.0),
                    ring_radii: rings,
                    outer_annulus: annulus,
                }
            }),
        })
}

proptest! {
    #[test]
    fn serialized_config_parses_back(c in config()) {
        let text = c.to_text();
        let back = RunConfig::parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, c);
    }
}

#[test]
fn sample_configs_roundtrip() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("cfg") {
            continue;
        }
        let c = RunConfig::parse(&std::fs::read_to_string(&path).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 5);
}
