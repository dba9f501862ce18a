use hodgefrob::dec::{codiff, d, l2_inner, q_field, star, wedge, DiscreteForm, Grid2};
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = Grid2> {
    (3usize..14, 3usize..14, 0.1f64..2.0, 0.1f64..2.0).prop_map(|(nx, ny, lx, ly)| {
        Grid2::rect(nx, ny, (-0.5 * lx, 0.5 * lx), (0.0, ly)).unwrap()
    })
}

/// Grid plus `k` vertex arrays with 20-bit dyadic entries.
fn dyadic_fields(k: usize) -> impl Strategy<Value = (Grid2, Vec<Vec<f64>>)> {
    grid_strategy().prop_flat_map(move |g| {
        let n = g.n_vertices();
        (
            Just(g),
            proptest::collection::vec(
                proptest::collection::vec((-(1i64 << 20)..(1i64 << 20)).prop_map(|v| v as f64 / 1024.0), n),
                k,
            ),
        )
    })
}

fn smooth_fields(k: usize) -> impl Strategy<Value = (Grid2, Vec<Vec<f64>>)> {
    grid_strategy().prop_flat_map(move |g| {
        let n = g.n_vertices();
        (
            Just(g),
            proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, n), k),
        )
    })
}

proptest! {
    #[test]
    fn dd_vanishes_bitwise_on_dyadic_data((g, f) in dyadic_fields(1)) {
        let u = DiscreteForm::zero_form(g, f[0].clone()).unwrap();
        let dd = d(&d(&u).unwrap()).unwrap();
        prop_assert!(dd.components()[0].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn star_star_sign((g, f) in smooth_fields(4)) {
        let u = DiscreteForm::zero_form(g, f[0].clone()).unwrap();
        let w = DiscreteForm::one_form_colocated(g, f[1].clone(), f[2].clone()).unwrap();
        let s = DiscreteForm::two_form_colocated(g, f[3].clone()).unwrap();
        prop_assert!(star(&star(&u)).components() == u.components());
        prop_assert!(star(&star(&w)).components() == w.scale(-1.0).components());
        prop_assert!(star(&star(&s)).components() == s.components());
    }

    #[test]
    fn star_preserves_q((g, f) in smooth_fields(2)) {
        let w = DiscreteForm::one_form_colocated(g, f[0].clone(), f[1].clone()).unwrap();
        let a = q_field(&w).unwrap();
        let b = q_field(&star(&w)).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn wedge_is_antisymmetric((g, f) in smooth_fields(4)) {
        let a = DiscreteForm::one_form_colocated(g, f[0].clone(), f[1].clone()).unwrap();
        let b = DiscreteForm::one_form_colocated(g, f[2].clone(), f[3].clone()).unwrap();
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        prop_assert!(ab.components() == ba.scale(-1.0).components());
        prop_assert!(wedge(&a, &a).unwrap().sup_norm() == 0.0);
    }

    #[test]
    fn codifferential_is_adjoint_on_compact_support((g, f) in smooth_fields(3)) {
        let inner = g.interior_mask(1);
        let a: Vec<f64> = f[0].iter().zip(&inner).map(|(v, m)| if *m { *v } else { 0.0 }).collect();
        let alpha = DiscreteForm::zero_form(g, a).unwrap();
        let beta = DiscreteForm::one_form_colocated(g, f[1].clone(), f[2].clone()).unwrap().to_staggered();
        let lhs = l2_inner(&d(&alpha).unwrap(), &beta).unwrap();
        let rhs = l2_inner(&alpha, &codiff(&beta).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn d_is_linear((g, f) in smooth_fields(2), s in -3.0f64..3.0) {
        let u = DiscreteForm::zero_form(g, f[0].clone()).unwrap();
        let v = DiscreteForm::zero_form(g, f[1].clone()).unwrap();
        let lhs = d(&u.add(&v.scale(s)).unwrap()).unwrap();
        let rhs = d(&u).unwrap().add(&d(&v).unwrap().scale(s)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().sup_norm() <= 1e-12 * (1.0 + s.abs()));
    }
}

#[test]
fn codifferential_of_radial_square() {
    let g = Grid2::square(17, -1.0, 1.0).unwrap();
    let r2 = DiscreteForm::sample_zero(g, |x, y| x * x + y * y).unwrap();
    let lap = codiff(&d(&r2).unwrap()).unwrap();
    let inner = g.interior_mask(1);
    for (v, val) in lap.values().iter().enumerate() {
        if inner[v] {
            assert!((val + 4.0).abs() < 1e-10, "vertex {v}: {val}");
        }
    }
}

#[test]
fn colocation_is_exact_on_linear_fields() {
    let g = Grid2::rect(9, 6, (0.0, 2.0), (-1.0, 1.0)).unwrap();
    let u = DiscreteForm::sample_zero(g, |x, y| 3.0 * x - 0.5 * y + 1.0).unwrap();
    let c = d(&u).unwrap().to_colocated();
    assert!(c.components()[0].iter().all(|v| (v - 3.0).abs() < 1e-13));
    assert!(c.components()[1].iter().all(|v| (v + 0.5).abs() < 1e-13));
}
