use hodgefrob::analysis::fit_slope;
use hodgefrob::dec::{d, DiscreteForm, Grid2};
use hodgefrob::homotopy::{homotopy, recursive_decompose, split, RadialHomotopyContext};
use proptest::prelude::*;

fn ctx(n: usize, nodes: usize) -> RadialHomotopyContext {
    RadialHomotopyContext::new(Grid2::square(n, -1.0, 1.0).unwrap(), (0.0, 0.0), nodes).unwrap()
}

/// Quadratic polynomial with coefficients `c`.
fn quad(c: &[f64], x: f64, y: f64) -> f64 {
    c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homotopy_is_linear(a in proptest::collection::vec(-1.0f64..1.0, 12), s in -2.0f64..2.0) {
        let c = ctx(17, 16);
        let g = *c.grid();
        let w1 = DiscreteForm::sample_one(g, |x, y| quad(&a[0..6], x, y), |x, y| quad(&a[6..12], x, y)).unwrap();
        let w2 = DiscreteForm::sample_one(g, |x, y| quad(&a[6..12], y, x), |x, y| quad(&a[0..6], y, x)).unwrap();
        let lhs = homotopy(&w1.add(&w2.scale(s)).unwrap(), &c).unwrap();
        let rhs = homotopy(&w1, &c).unwrap().add(&homotopy(&w2, &c).unwrap().scale(s)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().sup_norm() <= 1e-12);
    }

    #[test]
    fn homotopy_inverts_d_on_functions(a in proptest::collection::vec(-1.0f64..1.0, 6)) {
        let c = ctx(33, 16);
        let g = *c.grid();
        let u = DiscreteForm::sample_zero(g, |x, y| quad(&a, x, y)).unwrap();
        let hu = homotopy(&d(&u).unwrap(), &c).unwrap();
        // 𝓗du = u − u(center)
        let err = hu.sub(&u.map(|v| v - a[0])).unwrap().sup_norm();
        prop_assert!(err <= 2.0 * g.h(), "{err}");
    }

    #[test]
    fn homotopy_squared_vanishes(a in proptest::collection::vec(-1.0f64..1.0, 6)) {
        let c = ctx(33, 16);
        let g = *c.grid();
        let s = DiscreteForm::sample_two(g, |x, y| quad(&a, x, y)).unwrap();
        let hh = homotopy(&homotopy(&s, &c).unwrap(), &c).unwrap();
        prop_assert!(hh.sup_norm() <= 2.0 * g.h());
    }

    #[test]
    fn split_recovers_the_form(a in proptest::collection::vec(-1.0f64..1.0, 12)) {
        let c = ctx(33, 16);
        let g = *c.grid();
        let w = DiscreteForm::sample_one(g, |x, y| quad(&a[0..6], x, y), |x, y| quad(&a[6..12], x, y)).unwrap();
        let (ex, an) = split(&w, &c).unwrap();
        let err = ex.add(&an).unwrap().sub(&w).unwrap().sup_norm();
        prop_assert!(err <= 2.0 * g.h() * (1.0 + a.iter().map(|v| v.abs()).sum::<f64>()), "{err}");
    }
}

#[test]
fn closed_forms_have_no_anti_exact_part() {
    let c = ctx(33, 16);
    let g = *c.grid();
    let u = DiscreteForm::sample_zero(g, |x, y| x * x * y - y).unwrap();
    let (ex, an) = split(&d(&u).unwrap(), &c).unwrap();
    assert!(an.sup_norm() <= 1e-12);
    assert!(ex.sub(&d(&u).unwrap().to_colocated()).unwrap().sup_norm() <= 2.0 * g.h());
}

#[test]
fn rotation_form_is_anti_exact() {
    let c = ctx(65, 16);
    let g = *c.grid();
    let rot = DiscreteForm::sample_one(g, |_, y| -y, |x, _| x).unwrap();
    let (ex, an) = split(&rot, &c).unwrap();
    assert!(ex.sup_norm() <= 1e-12);
    assert!(an.sub(&rot).unwrap().sup_norm() <= 1e-12);
}

#[test]
fn dhd_identity_converges_at_first_order() {
    let mut pts = Vec::new();
    for n in [17, 33, 65, 129] {
        // Quadrature is refined together with the grid.
        let c = ctx(n, (n / 4).max(8));
        let g = *c.grid();
        let u = DiscreteForm::sample_zero(g, |x, y| (x + 2.0 * y).sin() + x * y * y).unwrap();
        let du = d(&u).unwrap();
        let err = d(&homotopy(&du, &c).unwrap())
            .unwrap()
            .to_colocated()
            .sub(&du.to_colocated())
            .unwrap()
            .sup_norm();
        pts.push((g.h().ln(), err.ln()));
    }
    let order = fit_slope(&pts).unwrap();
    assert!(order >= 0.9, "order {order}");
}

#[test]
fn gradient_recursive_form_is_reconstructed() {
    let c = ctx(65, 16);
    let g = *c.grid();
    let eta = DiscreteForm::sample_zero(g, |x, y| 0.3 * x * y + 0.2 * x).unwrap();
    let u = DiscreteForm::sample_zero(g, |x, y| x + 0.5 * y * y).unwrap();
    let gamma = d(&eta).unwrap();
    let omega = d(&u)
        .unwrap()
        .to_colocated()
        .mul_pointwise(&eta.map(f64::exp))
        .unwrap();
    let dec = recursive_decompose(&gamma, &omega, &c).unwrap();
    assert!(dec.theta.sup_norm() <= 1e-12);
    assert!(dec.eta.sub(&eta).unwrap().sup_norm() <= 2.0 * g.h());
    let rec = dec.reconstruction.to_colocated().sub(&omega).unwrap();
    assert!(rec.sup_norm_where(&g.interior_mask(1)) <= 4.0 * g.h());
    assert!(dec.integrability_residual <= 4.0 * g.h());
}
