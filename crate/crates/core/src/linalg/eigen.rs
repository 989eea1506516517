//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use super::{Matrix, C64};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
const REL_TOL: f64 = 1e-12;

/// Eigenvalues in decreasing order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl Eigen {
    /// `V diag(values) V^†`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.values.len();
        let v = &self.vectors;
        Matrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * self.values[k] * v[(j, k)].conj())
                .sum()
        })
    }
}

pub fn hermitian_eigen(a: &Matrix) -> Result<Eigen> {
    jacobi(a, true).map(|(values, vectors)| Eigen {
        values,
        vectors: vectors.expect("vectors requested"),
    })
}

/// Raw eigenvalues, decreasing, never clamped.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    jacobi(a, false).map(|(values, _)| values)
}

fn jacobi(input: &Matrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Matrix>)> {
    input.check_hermitian()?;
    let n = input.dim();
    // Symmetrize so rounding asymmetry in the input cannot stall convergence.
    let mut a = input.hermitian_part();
    let mut v = want_vectors.then(|| Matrix::identity(n));
    let scale = a.frobenius_norm();
    let threshold = REL_TOL * scale;

    let mut converged = scale == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        if sweeps == MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, v.as_mut(), p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| Matrix::from_fn(n, n, |i, j| v[(i, order[j])]));
    Ok((values, vectors))
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zero `a[p][q]` with `A <- G^† A G`, `G = diag-phase(q) * R(p, q)`.
fn rotate(a: &mut Matrix, v: Option<&mut Matrix>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that cannot change anything representable.
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = (apq / mag).conj();
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    let g_pp = C64::new(cs, 0.0);
    let g_pq = C64::new(sn, 0.0);
    let g_qp = phase * (-sn);
    let g_qq = phase * cs;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * g_pp + vkq * g_qp;
            v[(k, q)] = vkp * g_pq + vkq * g_qq;
        }
    }
}
