use super::form::{DiscreteForm, Layout};
use crate::error::{Error, Result};

/// Exterior derivative by signed incidence sums over staggered cochains.
pub fn d(form: &DiscreteForm) -> Result<DiscreteForm> {
    let g = *form.grid();
    match form.degree() {
        0 => {
            let u = form.values();
            let mut xe = vec![0.0; g.n_xedges()];
            let mut ye = vec![0.0; g.n_yedges()];
            for j in 0..=g.ny {
                for i in 0..g.nx {
                    xe[g.xedge(i, j)] = u[g.vid(i + 1, j)] - u[g.vid(i, j)];
                }
            }
            for j in 0..g.ny {
                for i in 0..=g.nx {
                    ye[g.yedge(i, j)] = u[g.vid(i, j + 1)] - u[g.vid(i, j)];
                }
            }
            Ok(DiscreteForm::from_parts(g, 1, Layout::Staggered, vec![xe, ye]))
        }
        1 => {
            let s = form.to_staggered();
            let (xe, ye) = (&s.components()[0], &s.components()[1]);
            let mut f = vec![0.0; g.n_faces()];
            for j in 0..g.ny {
                for i in 0..g.nx {
                    f[g.face(i, j)] = (xe[g.xedge(i, j)] - xe[g.xedge(i, j + 1)])
                        + (ye[g.yedge(i + 1, j)] - ye[g.yedge(i, j)]);
                }
            }
            Ok(DiscreteForm::from_parts(g, 2, Layout::Staggered, vec![f]))
        }
        k => Err(Error::Degree(format!("d of a {k}-form vanishes on a 2D grid; degree must be 0 or 1"))),
    }
}

/// Hodge star in the flat 2D metric, acting on co-located components:
/// `⋆1 = dx∧dy`, `⋆dx = dy`, `⋆dy = −dx`, `⋆(dx∧dy) = 1`.
pub fn star(form: &DiscreteForm) -> DiscreteForm {
    let c = form.to_colocated();
    let g = *c.grid();
    match c.degree() {
        0 => DiscreteForm::from_parts(g, 2, Layout::Colocated, vec![c.values().to_vec()]),
        1 => {
            let a = &c.components()[0];
            let b = &c.components()[1];
            DiscreteForm::from_parts(
                g,
                1,
                Layout::Colocated,
                vec![b.iter().map(|v| -v).collect(), a.clone()],
            )
        }
        _ => DiscreteForm::from_parts(g, 0, Layout::Colocated, vec![c.values().to_vec()]),
    }
}

/// Pointwise exterior product of co-located components.
pub fn wedge(alpha: &DiscreteForm, beta: &DiscreteForm) -> Result<DiscreteForm> {
    alpha.same_grid(beta)?;
    let (p, q) = (alpha.degree(), beta.degree());
    if p + q > 2 {
        return Err(Error::Degree(format!(
            "wedge of degrees {p} and {q} exceeds the dimension 2"
        )));
    }
    let a = alpha.to_colocated();
    let b = beta.to_colocated();
    let g = *a.grid();
    match (p, q) {
        (0, _) => b.mul_pointwise(&a),
        (_, 0) => a.mul_pointwise(&b),
        _ => {
            let (a1, a2) = (&a.components()[0], &a.components()[1]);
            let (b1, b2) = (&b.components()[0], &b.components()[1]);
            let w = (0..g.n_vertices())
                .map(|v| a1[v] * b2[v] - a2[v] * b1[v])
                .collect();
            Ok(DiscreteForm::from_parts(g, 2, Layout::Colocated, vec![w]))
        }
    }
}

/// Codifferential, the adjoint of [`d`] for the staggered inner products
/// (`δ = W⁻¹ Dᵀ W`). With this convention `δd = −Δ` on 0-forms, which matches
/// `δ = (−1)^{nk+n+1} ⋆d⋆` in the continuum for n = 2.
pub fn codiff(form: &DiscreteForm) -> Result<DiscreteForm> {
    let g = *form.grid();
    match form.degree() {
        1 => {
            let s = form.to_staggered();
            let (xe, ye) = (&s.components()[0], &s.components()[1]);
            let mut out = vec![0.0; g.n_vertices()];
            for j in 0..=g.ny {
                let w = g.xedge_weight(j);
                for i in 0..g.nx {
                    let flux = w * xe[g.xedge(i, j)];
                    out[g.vid(i + 1, j)] += flux;
                    out[g.vid(i, j)] -= flux;
                }
            }
            for j in 0..g.ny {
                for i in 0..=g.nx {
                    let flux = g.yedge_weight(i) * ye[g.yedge(i, j)];
                    out[g.vid(i, j + 1)] += flux;
                    out[g.vid(i, j)] -= flux;
                }
            }
            for j in 0..=g.ny {
                for i in 0..=g.nx {
                    out[g.vid(i, j)] /= g.vertex_weight(i, j);
                }
            }
            Ok(DiscreteForm::from_parts(g, 0, Layout::Colocated, vec![out]))
        }
        2 => {
            let s = form.to_staggered();
            let f = s.values();
            let wf = g.face_weight();
            let mut xe = vec![0.0; g.n_xedges()];
            let mut ye = vec![0.0; g.n_yedges()];
            for j in 0..g.ny {
                for i in 0..g.nx {
                    let v = wf * f[g.face(i, j)];
                    xe[g.xedge(i, j)] += v;
                    xe[g.xedge(i, j + 1)] -= v;
                    ye[g.yedge(i + 1, j)] += v;
                    ye[g.yedge(i, j)] -= v;
                }
            }
            for j in 0..=g.ny {
                let w = g.xedge_weight(j);
                for i in 0..g.nx {
                    xe[g.xedge(i, j)] /= w;
                }
            }
            for j in 0..g.ny {
                for i in 0..=g.nx {
                    ye[g.yedge(i, j)] /= g.yedge_weight(i);
                }
            }
            Ok(DiscreteForm::from_parts(g, 1, Layout::Staggered, vec![xe, ye]))
        }
        _ => Err(Error::Degree("codifferential of a 0-form is undefined".into())),
    }
}

/// Pointwise `Q = ⋆(ω∧⋆ω)` at the vertices.
pub fn q_field(form: &DiscreteForm) -> Result<DiscreteForm> {
    form.expect_degree(1, "q_field")?;
    let c = form.to_colocated();
    let (a, b) = (&c.components()[0], &c.components()[1]);
    let q = a.iter().zip(b).map(|(x, y)| x * x + y * y).collect();
    Ok(DiscreteForm::from_parts(*c.grid(), 0, Layout::Colocated, vec![q]))
}

/// Discrete L² inner product.
///
/// Two staggered forms use the cochain weights (so that `⟨dα, β⟩ = ⟨α, δβ⟩`);
/// otherwise both are co-located and the pointwise inner product is weighted by the
/// vertex dual-cell areas.
pub fn l2_inner(alpha: &DiscreteForm, beta: &DiscreteForm) -> Result<f64> {
    alpha.same_grid(beta)?;
    if alpha.degree() != beta.degree() {
        return Err(Error::Degree(format!(
            "inner product of degrees {} and {}",
            alpha.degree(),
            beta.degree()
        )));
    }
    let g = *alpha.grid();
    let staggered = alpha.layout() == Layout::Staggered && beta.layout() == Layout::Staggered;
    if staggered && alpha.degree() == 1 {
        let (ax, ay) = (&alpha.components()[0], &alpha.components()[1]);
        let (bx, by) = (&beta.components()[0], &beta.components()[1]);
        let mut s = 0.0;
        for j in 0..=g.ny {
            let w = g.xedge_weight(j);
            for i in 0..g.nx {
                let e = g.xedge(i, j);
                s += w * ax[e] * bx[e];
            }
        }
        for j in 0..g.ny {
            for i in 0..=g.nx {
                let e = g.yedge(i, j);
                s += g.yedge_weight(i) * ay[e] * by[e];
            }
        }
        return Ok(s);
    }
    if staggered && alpha.degree() == 2 {
        let wf = g.face_weight();
        return Ok(alpha
            .values()
            .iter()
            .zip(beta.values())
            .map(|(a, b)| wf * a * b)
            .sum());
    }
    let a = alpha.to_colocated();
    let b = beta.to_colocated();
    let mut s = 0.0;
    for v in 0..g.n_vertices() {
        let (i, j) = g.vij(v);
        let pw: f64 = a
            .components()
            .iter()
            .zip(b.components())
            .map(|(x, y)| x[v] * y[v])
            .sum();
        s += g.vertex_weight(i, j) * pw;
    }
    Ok(s)
}

pub fn l2_norm(form: &DiscreteForm) -> f64 {
    l2_inner(form, form).unwrap_or(0.0).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::Grid2;

    fn grid() -> Grid2 {
        Grid2::square(9, -1.0, 1.0).unwrap()
    }

    #[test]
    fn d_of_coordinate_and_constant() {
        let g = grid();
        let u = DiscreteForm::sample_zero(g, |x, _| x).unwrap();
        let du = d(&u).unwrap().to_colocated();
        for v in 0..g.n_vertices() {
            assert!((du.components()[0][v] - 1.0).abs() < 1e-14);
            assert_eq!(du.components()[1][v], 0.0);
        }
        let c = DiscreteForm::sample_zero(g, |_, _| 3.25).unwrap();
        assert_eq!(d(&c).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn d_of_two_form_is_error() {
        let g = grid();
        let f = DiscreteForm::zero(g, 2, Layout::Staggered).unwrap();
        assert!(matches!(d(&f), Err(Error::Degree(_))));
        let u = DiscreteForm::zero(g, 0, Layout::Colocated).unwrap();
        assert!(matches!(codiff(&u), Err(Error::Degree(_))));
    }

    #[test]
    fn star_basis_rules() {
        let g = grid();
        let dx = DiscreteForm::sample_one(g, |_, _| 1.0, |_, _| 0.0).unwrap();
        let s = star(&dx);
        assert!(s.components()[0].iter().all(|&v| v == 0.0));
        assert!(s.components()[1].iter().all(|&v| v == 1.0));
        let ss = star(&s);
        assert!(ss.components()[0].iter().all(|&v| v == -1.0));
        let f = DiscreteForm::sample_zero(g, |x, y| x * y).unwrap();
        let sf = star(&f);
        assert_eq!(sf.degree(), 2);
        assert_eq!(sf.values(), f.values());
    }

    #[test]
    fn wedge_rules() {
        let g = grid();
        let a = DiscreteForm::sample_one(g, |x, _| x, |_, _| 0.0).unwrap();
        let b = DiscreteForm::sample_one(g, |_, _| 0.0, |_, y| y + 2.0).unwrap();
        let w = wedge(&a, &b).unwrap();
        for v in 0..g.n_vertices() {
            let (x, y) = g.vertex_xy(v);
            assert!((w.values()[v] - x * (y + 2.0)).abs() < 1e-14);
        }
        let o = DiscreteForm::sample_one(g, |x, y| x.sin() + y, |x, y| x * y - 0.3).unwrap();
        assert!(wedge(&o, &o).unwrap().values().iter().all(|&v| v == 0.0));
        let two = DiscreteForm::zero(g, 2, Layout::Colocated).unwrap();
        assert!(matches!(wedge(&o, &two), Err(Error::Degree(_))));
    }

    #[test]
    fn laplacian_of_quadratic() {
        let g = grid();
        let u = DiscreteForm::sample_zero(g, |x, y| x * x + y * y).unwrap();
        let lap = codiff(&d(&u).unwrap()).unwrap();
        let mask = g.interior_mask(1);
        for v in 0..g.n_vertices() {
            if mask[v] {
                assert!((lap.values()[v] + 4.0).abs() < 1e-11, "{}", lap.values()[v]);
            }
        }
        let c1 = DiscreteForm::sample_one(g, |_, _| 0.7, |_, _| -1.3).unwrap();
        let dc = codiff(&c1).unwrap();
        assert!(dc.sup_norm_where(&mask) < 1e-13);
    }

    #[test]
    fn adjointness_on_small_grid() {
        let g = grid();
        let u = DiscreteForm::sample_zero(g, |x, y| (1.0 - x * x) * (1.0 - y * y) * (x + 2.0 * y).sin())
            .unwrap();
        let w = DiscreteForm::sample_one(g, |x, y| (3.0 * x).cos() * y, |x, y| x * x - y).unwrap()
            .to_staggered();
        let lhs = l2_inner(&d(&u).unwrap(), &w).unwrap();
        let rhs = l2_inner(&u, &codiff(&w).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn q_field_examples() {
        let g = grid();
        let w = DiscreteForm::sample_one(g, |_, _| 1.0, |_, _| 1.0).unwrap();
        assert!(q_field(&w).unwrap().values().iter().all(|&q| q == 2.0));
        let z = DiscreteForm::zero(g, 1, Layout::Staggered).unwrap();
        assert!(q_field(&z).unwrap().values().iter().all(|&q| q == 0.0));
        let ip = l2_inner(&w, &w).unwrap();
        let integral: f64 = (0..g.n_vertices())
            .map(|v| {
                let (i, j) = g.vij(v);
                g.vertex_weight(i, j) * 2.0
            })
            .sum();
        assert!((ip - integral).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_basis_fields() {
        let g = grid();
        let dx = DiscreteForm::sample_one(g, |_, _| 1.0, |_, _| 0.0).unwrap();
        let dy = DiscreteForm::sample_one(g, |_, _| 0.0, |_, _| 1.0).unwrap();
        assert_eq!(l2_inner(&dx, &dy).unwrap(), 0.0);
        assert_eq!(l2_inner(&dx.to_staggered(), &dy.to_staggered()).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_grids() {
        let a = DiscreteForm::zero(grid(), 1, Layout::Staggered).unwrap();
        let b = DiscreteForm::zero(Grid2::square(5, 0.0, 1.0).unwrap(), 1, Layout::Staggered).unwrap();
        assert!(matches!(l2_inner(&a, &b), Err(Error::Shape(_))));
    }
}
