//! Geometric helpers for punctured domains and multivalued potentials.

use std::f64::consts::PI;

use crate::dec::{d, DiscreteForm, Grid2};
use crate::error::{Error, Result};

/// Vertices inside the closed axis-aligned square of half-width `halfwidth` about `center`.
pub fn block_mask(grid: &Grid2, center: (f64, f64), halfwidth: f64) -> Vec<bool> {
    let eps = 1e-12 * grid.h();
    (0..grid.n_vertices())
        .map(|v| {
            let (x, y) = grid.vertex_xy(v);
            (x - center.0).abs() <= halfwidth + eps && (y - center.1).abs() <= halfwidth + eps
        })
        .collect()
}

fn wrap(a: f64) -> f64 {
    let mut a = a;
    while a > PI {
        a -= 2.0 * PI;
    }
    while a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// The closed 1-form dθ of the polar angle about `center`, as edge increments wrapped
/// into (−π, π]. Exact edge integrals for edges that avoid the center.
pub fn angle_form(grid: &Grid2, center: (f64, f64)) -> Result<DiscreteForm> {
    let theta = grid.sample(|x, y| (y - center.1).atan2(x - center.0));
    let g = *grid;
    let mut xe = vec![0.0; g.n_xedges()];
    let mut ye = vec![0.0; g.n_yedges()];
    for j in 0..=g.ny {
        for i in 0..g.nx {
            xe[g.xedge(i, j)] = wrap(theta[g.vid(i + 1, j)] - theta[g.vid(i, j)]);
        }
    }
    for j in 0..g.ny {
        for i in 0..=g.nx {
            ye[g.yedge(i, j)] = wrap(theta[g.vid(i, j + 1)] - theta[g.vid(i, j)]);
        }
    }
    DiscreteForm::one_form_staggered(g, xe, ye)
}

/// Period correction `τ = dθ − d(θ_sampled)` for the branch of `atan2` with its cut
/// along the negative x-axis through `center`. Nonzero (±2π) only on cut-crossing edges.
pub fn angle_period(grid: &Grid2, center: (f64, f64)) -> Result<DiscreteForm> {
    let sampled = DiscreteForm::sample_zero(*grid, |x, y| (y - center.1).atan2(x - center.0))?;
    let tau = angle_form(grid, center)?.sub(&d(&sampled)?)?;
    // Snap to exact multiples of 2π.
    Ok(tau.map(|v| (v / (2.0 * PI)).round() * 2.0 * PI))
}

/// Grows a vertex mask by `layers` vertex rings (8-neighbourhood).
pub fn dilate(grid: &Grid2, mask: &[bool], layers: usize) -> Vec<bool> {
    let mut cur = mask.to_vec();
    for _ in 0..layers {
        let mut next = cur.clone();
        for v in 0..grid.n_vertices() {
            if !cur[v] {
                continue;
            }
            let (i, j) = grid.vij(v);
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii >= 0 && jj >= 0 && ii <= grid.nx as i64 && jj <= grid.ny as i64 {
                        next[grid.vid(ii as usize, jj as usize)] = true;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

/// Vertices that are interior (`ring` layers from the outer boundary) and at least
/// `gap` layers away from the excised set.
pub fn analysis_mask(grid: &Grid2, excised: Option<&[bool]>, ring: usize, gap: usize) -> Vec<bool> {
    let mut mask = grid.interior_mask(ring);
    if let Some(ex) = excised {
        let grown = dilate(grid, ex, gap);
        for (m, e) in mask.iter_mut().zip(grown) {
            *m &= !e;
        }
    }
    mask
}

pub(crate) fn check_mask(grid: &Grid2, mask: &[bool], what: &str) -> Result<()> {
    if mask.len() != grid.n_vertices() {
        return Err(Error::Shape(format!(
            "{what}: mask has {} entries, grid has {} vertices",
            mask.len(),
            grid.n_vertices()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::q_field;

    #[test]
    fn angle_form_is_closed_away_from_center() {
        let g = Grid2::square(33, -1.0, 1.0).unwrap();
        let a = angle_form(&g, (0.0, 0.0)).unwrap();
        let da = d(&a).unwrap();
        // Faces not touching the origin have zero circulation.
        let mut max = 0.0f64;
        let mut around = 0.0;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let v = da.values()[g.face(i, j)];
                let touches = g
                    .face_vertices(i, j)
                    .iter()
                    .any(|&k| g.vertex_xy(k).0.hypot(g.vertex_xy(k).1) < 1e-12);
                if touches {
                    around += v;
                } else {
                    max = max.max(v.abs());
                }
            }
        }
        assert!(max < 1e-13);
        assert!((around - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn angle_gradient_magnitude() {
        let g = Grid2::square(65, -1.0, 1.0).unwrap();
        let q = q_field(&angle_form(&g, (0.0, 0.0)).unwrap()).unwrap();
        let mask = analysis_mask(&g, Some(&block_mask(&g, (0.0, 0.0), 0.5)), 1, 1);
        let mut worst = 0.0f64;
        for v in 0..g.n_vertices() {
            if mask[v] {
                let (x, y) = g.vertex_xy(v);
                let r2 = x * x + y * y;
                worst = worst.max((q.values()[v] * r2 - 1.0).abs());
            }
        }
        assert!(worst < 5e-3, "{worst}");
    }

    #[test]
    fn period_only_on_cut() {
        // Even vertex count: the cut y = 0 runs between vertex rows.
        let g = Grid2::square(16, -1.0, 1.0).unwrap();
        let tau = angle_period(&g, (0.0, 0.0)).unwrap();
        let nonzero: usize = tau
            .components()
            .iter()
            .map(|c| c.iter().filter(|v| **v != 0.0).count())
            .sum();
        assert!(nonzero > 0 && nonzero <= g.nx);
        assert!(tau.components()[0].iter().all(|v| *v == 0.0));
    }
}
