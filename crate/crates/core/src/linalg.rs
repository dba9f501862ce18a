//! Sparse symmetric systems and a Jacobi-preconditioned conjugate gradient solver.

use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};

pub const CG_RTOL: f64 = 1e-10;

/// Triplet accumulator for a symmetric matrix of fixed size.
pub struct Assembler {
    tri: TriMat<f64>,
}

impl Assembler {
    pub fn new(n: usize) -> Self {
        Self {
            tri: TriMat::new((n, n)),
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.tri.add_triplet(i, j, v);
    }

    pub fn finish(self) -> CsMat<f64> {
        self.tri.to_csr()
    }
}

pub fn matvec(a: &CsMat<f64>, x: &[f64], y: &mut [f64]) {
    for (i, row) in a.outer_iterator().enumerate() {
        let mut s = 0.0;
        for (j, v) in row.iter() {
            s += v * x[j];
        }
        y[i] = s;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `A x = b` for symmetric positive definite `A`.
///
/// Stops when `‖b − Ax‖₂ ≤ rtol·‖b‖₂`. Fails on a non-positive curvature direction or
/// when `max_iter` is exhausted.
pub fn cg(a: &CsMat<f64>, b: &[f64], x0: Option<&[f64]>, rtol: f64, max_iter: usize) -> Result<CgOutcome> {
    let n = b.len();
    if a.rows() != n || a.cols() != n {
        return Err(Error::Shape(format!(
            "matrix is {}x{}, right-hand side has {n} entries",
            a.rows(),
            a.cols()
        )));
    }
    let mut diag = vec![0.0; n];
    for (i, row) in a.outer_iterator().enumerate() {
        for (j, v) in row.iter() {
            if i == j {
                diag[i] += v;
            }
        }
    }
    if let Some(i) = diag.iter().position(|d| !(*d > 0.0)) {
        return Err(Error::LinearSolver(format!(
            "non-positive diagonal entry {} at row {i}",
            diag[i]
        )));
    }
    let bnorm = dot(b, b).sqrt();
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    if bnorm == 0.0 {
        return Ok(CgOutcome {
            x: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut ax = vec![0.0; n];
    matvec(a, &x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(p, q)| p / q).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..=max_iter {
        let rel = dot(&r, &r).sqrt() / bnorm;
        if rel <= rtol {
            return Ok(CgOutcome {
                x,
                iterations: it,
                relative_residual: rel,
            });
        }
        if it == max_iter {
            return Err(Error::LinearSolver(format!(
                "conjugate gradient stalled at relative residual {rel:.3e} after {max_iter} iterations"
            )));
        }
        matvec(a, &p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::LinearSolver(format!(
                "matrix is not positive definite (curvature {pap:.3e})"
            )));
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
            z[k] = r[k] / diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal() {
        let n = 50;
        let mut asm = Assembler::new(n);
        for i in 0..n {
            asm.add(i, i, 2.0);
            if i + 1 < n {
                asm.add(i, i + 1, -1.0);
                asm.add(i + 1, i, -1.0);
            }
        }
        let a = asm.finish();
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = vec![0.0; n];
        matvec(&a, &xs, &mut b);
        let out = cg(&a, &b, None, 1e-12, 500).unwrap();
        for (p, q) in out.x.iter().zip(&xs) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut asm = Assembler::new(2);
        asm.add(0, 0, 1.0);
        asm.add(1, 1, 1.0);
        asm.add(0, 1, 3.0);
        asm.add(1, 0, 3.0);
        let a = asm.finish();
        assert!(cg(&a, &[1.0, -1.0], None, 1e-12, 10).is_err());
    }
}
