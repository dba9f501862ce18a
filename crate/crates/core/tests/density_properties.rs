use hodgefrob::density::{MassDensity, QScan};
use hodgefrob::Error;
use proptest::prelude::*;

fn family(k: usize) -> MassDensity {
    match k {
        0 => MassDensity::chaplygin(1.4).unwrap(),
        1 => MassDensity::chaplygin(2.0).unwrap(),
        2 => MassDensity::chaplygin(3.0).unwrap(),
        3 => MassDensity::minimal_surface(),
        4 => MassDensity::power_law(1.0, -0.25).unwrap(),
        5 => MassDensity::power_law(0.5, 0.75).unwrap(),
        _ => MassDensity::constant(1.7).unwrap(),
    }
}

/// A point well inside the admissible interval, away from both ends.
fn interior_q(d: &MassDensity, t: f64) -> f64 {
    let dom = d.domain();
    if dom.is_bounded() {
        dom.lo + t * 0.8 * (dom.hi - dom.lo) + 0.05 * (dom.hi - dom.lo)
    } else {
        0.05 + 20.0 * t
    }
}

proptest! {
    #[test]
    fn derivative_matches_central_difference(k in 0usize..7, t in 0.0f64..1.0) {
        let d = family(k);
        let q = interior_q(&d, t);
        let h = 1e-5;
        let fd = (d.rho(q + h).unwrap() - d.rho(q - h).unwrap()) / (2.0 * h);
        let exact = d.drho(q).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-7 * (1.0 + exact.abs()), "{} at {q}: {fd} vs {exact}", d.name());
    }

    #[test]
    fn h_is_an_antiderivative(k in 0usize..7, t in 0.0f64..1.0) {
        let d = family(k);
        let q = interior_q(&d, t);
        let h = 1e-4;
        let fd = (d.h(q + h).unwrap() - d.h(q - h).unwrap()) / (2.0 * h);
        let exact = d.h_prime(q).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "{} at {q}: {fd} vs {exact}", d.name());
        prop_assert!((d.h(q).unwrap() - d.h_by_quadrature(q).unwrap()).abs() <= 1e-9 * (1.0 + d.h(q).unwrap().abs()));
    }

    #[test]
    fn density_is_positive_on_its_domain(k in 0usize..7, t in 0.0f64..1.0) {
        let d = family(k);
        prop_assert!(d.rho(interior_q(&d, t)).unwrap() > 0.0);
    }

    #[test]
    fn frak_h_increases_below_sonic(k in 0usize..3, t in 0.0f64..0.95) {
        let d = family(k);
        let s = d.sonic_q(1e6).unwrap();
        let q = t * s;
        let dq = 1e-3 * s;
        prop_assert!(d.frak_h(q + dq).unwrap() > d.frak_h(q).unwrap());
        prop_assert!(d.subsonic_expr(q) > 0.0);
    }

    #[test]
    fn lemma2_constant_at_most_two_for_increasing_densities(k in 0.1f64..3.0, e in 0.0f64..3.0) {
        let d = MassDensity::power_law(k, e).unwrap();
        let c = d.lemma2_constant(&QScan::new(0.0, 1e4, 200)).unwrap();
        prop_assert!(c <= 2.0 + 1e-9, "{}: {c}", d.name());
    }
}

#[test]
fn chaplygin_sonic_speed() {
    for gamma in [1.4, 2.0, 3.0] {
        let s = MassDensity::chaplygin(gamma).unwrap().sonic_q(1e6).unwrap();
        assert!((s - 2.0 / (gamma + 1.0)).abs() <= 1e-10);
    }
    assert_eq!(MassDensity::constant(1.0).unwrap().sonic_q(1e6), None);
    assert_eq!(MassDensity::minimal_surface().sonic_q(1e6), None);
}

#[test]
fn out_of_domain_is_an_error() {
    let d = MassDensity::chaplygin(2.0).unwrap();
    assert!(matches!(d.rho(0.7), Err(Error::Domain { .. })));
    assert!(matches!(d.rho(-1.0), Err(Error::Domain { .. })));
    assert!(MassDensity::chaplygin(1.0).is_err());
    assert!(MassDensity::constant(0.0).is_err());
    assert!(MassDensity::power_law(0.0, 0.5).is_err());
}

#[test]
fn negative_power_law_hypothesis_constant() {
    let rep = MassDensity::power_law(1.0, -0.25)
        .unwrap()
        .check_hypotheses(&QScan::new(0.0, 1e6, 400));
    assert!(rep.hypo_neg_c.unwrap() >= 0.25 - 1e-9);
    assert!(!rep.cavitates);
}

#[test]
fn chaplygin_cavitates_near_its_limit() {
    // γ = 1.4: ρ → 0 as Q → 2/(γ − 1) only by continuation; inside the domain ρ stays
    // bounded below, so the flag must stay off.
    let rep = MassDensity::chaplygin(1.4)
        .unwrap()
        .check_hypotheses(&QScan::new(0.0, 1e6, 400));
    assert!(!rep.cavitates);
    assert!(rep.min_rho > 0.5);
}
