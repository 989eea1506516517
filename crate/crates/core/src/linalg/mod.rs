//! Dense complex matrices and the handful of operations the criteria need.
//!
//! Storage is row-major. In a tensor product `A ⊗ B` the B index is minor,
//! so basis state `|a b>` sits at `a * n + b`.

mod eigen;
mod random;

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::partition::Bipartition;

pub use eigen::{eigenvalues, hermitian_eigen, Eigen, MAX_SWEEPS};
pub use random::{
    haar_unitary, haar_unitary_rng, random_density_matrix, random_hermitian, random_pure_state,
    seeded_rng, standard_complex,
};

pub type C64 = Complex64;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v><v|` for the given vector (not normalized here).
    pub fn projector(v: &[C64]) -> Self {
        let n = v.len();
        Matrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn check_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let r = self.hermiticity_residual();
        if r > HERMITIAN_TOL {
            return Err(Error::NotHermitian(r));
        }
        Ok(())
    }

    /// `max |(U U^† - I)_ij|`.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self * &self.adjoint()).max_abs_diff(&Matrix::identity(self.rows))
    }

    /// `U A U^†`.
    pub fn conjugate_by(&self, u: &Matrix) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Hermitian part `(A + A^†)/2`, used to remove rounding asymmetry.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        Matrix::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// A matrix known to be unitary within [`UNITARY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(Matrix);

impl Unitary {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let r = m.unitarity_residual();
        if r > UNITARY_TOL {
            return Err(Error::NotUnitary(r));
        }
        Ok(Unitary(m))
    }

    pub fn identity(n: usize) -> Self {
        Unitary(Matrix::identity(n))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn compose(&self, other: &Unitary) -> Unitary {
        Unitary(&self.0 * &other.0)
    }

    /// `U rho U^†`.
    pub fn conjugate(&self, rho: &Matrix) -> Matrix {
        rho.conjugate_by(&self.0)
    }
}

/// Kronecker product, A index major.
pub fn tensor(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    Matrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn tensor_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Trace out `which`, returning the reduced operator on the other factor.
pub fn partial_trace(rho: &Matrix, part: Bipartition, which: Subsystem) -> Result<Matrix> {
    square_with_dim(rho, part.dim())?;
    let (m, n) = (part.m, part.n);
    Ok(match which {
        Subsystem::B => Matrix::from_fn(m, m, |a, a2| {
            (0..n).map(|b| rho[(a * n + b, a2 * n + b)]).sum()
        }),
        Subsystem::A => Matrix::from_fn(n, n, |b, b2| {
            (0..m).map(|a| rho[(a * n + b, a * n + b2)]).sum()
        }),
    })
}

/// Transpose on the B factor in the computational basis.
pub fn partial_transpose(rho: &Matrix, part: Bipartition) -> Result<Matrix> {
    square_with_dim(rho, part.dim())?;
    let n = part.n;
    let d = part.dim();
    Ok(Matrix::from_fn(d, d, |i, j| {
        let (a, b) = (i / n, i % n);
        let (a2, b2) = (j / n, j % n);
        rho[(a * n + b2, a2 * n + b)]
    }))
}

/// Basis permutation reordering tensor factors.
///
/// Factor `k` of the result is factor `perm[k]` of the input. Returns the
/// permutation matrix `P` with `P rho P^†` the reordered operator.
pub fn subsystem_permutation(dims: &[usize], perm: &[usize]) -> Result<Unitary> {
    let k = dims.len();
    let mut seen = vec![false; k];
    if perm.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: perm.len(),
        });
    }
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::IndexOutOfRange(format!(
                "{perm:?} is not a permutation of 0..{k}"
            )));
        }
        seen[p] = true;
    }
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut p = Matrix::zeros(total, total);
    let mut digits = vec![0usize; k];
    for old in 0..total {
        let mut rem = old;
        for f in (0..k).rev() {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        let mut new = 0;
        for f in 0..k {
            new = new * new_dims[f] + digits[perm[f]];
        }
        p[(new, old)] = C64::new(1.0, 0.0);
    }
    Ok(Unitary(p))
}

pub fn permute_subsystems(rho: &Matrix, dims: &[usize], perm: &[usize]) -> Result<Matrix> {
    let total: usize = dims.iter().product();
    square_with_dim(rho, total)?;
    Ok(subsystem_permutation(dims, perm)?.conjugate(rho))
}

/// `tr(rho^2)` for a Hermitian `rho`, computed as the squared Frobenius norm.
pub fn purity(rho: &Matrix) -> f64 {
    rho.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// `exp(i * eps * H)` for Hermitian `H`.
pub fn expi_hermitian(h: &Matrix, eps: f64) -> Result<Unitary> {
    let e = hermitian_eigen(h)?;
    let n = h.dim();
    let phases: Vec<C64> = e
        .values
        .iter()
        .map(|&l| C64::from_polar(1.0, eps * l))
        .collect();
    let v = &e.vectors;
    let m = Matrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj())
            .sum()
    });
    Ok(Unitary(m))
}

pub(crate) fn square_with_dim(rho: &Matrix, dim: usize) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NotSquare {
            rows: rho.rows,
            cols: rho.cols,
        });
    }
    if rho.rows != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: rho.rows,
        });
    }
    Ok(())
}

pub fn pauli_x() -> Matrix {
    Matrix::from_vec(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
}

pub fn pauli_y() -> Matrix {
    Matrix::from_vec(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
}

pub fn pauli_z() -> Matrix {
    Matrix::from_real_diag(&[1.0, -1.0])
}

/// `I, X, Y, Z`.
pub fn paulis() -> [Matrix; 4] {
    [Matrix::identity(2), pauli_x(), pauli_y(), pauli_z()]
}

/// `(sum_i |ii>)/sqrt(k)` with `k = min(m, n)`, as a vector in `C^m ⊗ C^n`.
pub fn max_entangled_vector(part: Bipartition) -> Vec<C64> {
    let k = part.min_factor();
    let mut v = vec![C64::new(0.0, 0.0); part.dim()];
    let amp = 1.0 / (k as f64).sqrt();
    for i in 0..k {
        v[i * part.n + i] = C64::new(amp, 0.0);
    }
    v
}

pub fn maximally_mixed(d: usize) -> Matrix {
    Matrix::identity(d).scale_re(1.0 / d as f64)
}

pub fn normalize(v: &mut [C64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> Matrix {
        Matrix::projector(&max_entangled_vector(Bipartition::new(2, 2).unwrap()))
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor(&Matrix::identity(2), &Matrix::identity(2));
        assert_eq!(i4, Matrix::identity(4));
    }

    #[test]
    fn zz_is_diagonal() {
        let zz = tensor(&pauli_z(), &pauli_z());
        assert_eq!(zz, Matrix::from_real_diag(&[1., -1., -1., 1.]));
    }

    #[test]
    fn bell_reductions_are_maximally_mixed() {
        let p = Bipartition::new(2, 2).unwrap();
        for w in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&bell(), p, w).unwrap();
            assert!(r.max_abs_diff(&maximally_mixed(2)) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = seeded_rng(1);
        let a = random_density_matrix(2, &mut rng);
        let b = random_density_matrix(3, &mut rng);
        let p = Bipartition::new(2, 3).unwrap();
        let ab = tensor(&a, &b);
        assert!(
            partial_trace(&ab, p, Subsystem::B)
                .unwrap()
                .max_abs_diff(&a)
                < 1e-14
        );
        assert!(
            partial_trace(&ab, p, Subsystem::A)
                .unwrap()
                .max_abs_diff(&b)
                < 1e-14
        );
    }

    #[test]
    fn bell_partial_transpose_min_eigenvalue() {
        let p = Bipartition::new(2, 2).unwrap();
        let pt = partial_transpose(&bell(), p).unwrap();
        let ev = eigenvalues(&pt).unwrap();
        assert!((ev[3] + 0.5).abs() < 1e-14);
        assert!((ev[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn partial_transpose_is_involution() {
        let mut rng = seeded_rng(2);
        let p = Bipartition::new(3, 2).unwrap();
        let r = random_density_matrix(6, &mut rng);
        let back = partial_transpose(&partial_transpose(&r, p).unwrap(), p).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn permutation_swaps_factors() {
        let mut rng = seeded_rng(3);
        let a = random_density_matrix(2, &mut rng);
        let b = random_density_matrix(3, &mut rng);
        let swapped = permute_subsystems(&tensor(&a, &b), &[2, 3], &[1, 0]).unwrap();
        assert!(swapped.max_abs_diff(&tensor(&b, &a)) < 1e-15);
    }

    #[test]
    fn permutation_of_three_factors() {
        let mut rng = seeded_rng(4);
        let f: Vec<Matrix> = [2, 3, 2]
            .iter()
            .map(|&d| random_density_matrix(d, &mut rng))
            .collect();
        let abc = tensor(&tensor(&f[0], &f[1]), &f[2]);
        let out = permute_subsystems(&abc, &[2, 3, 2], &[2, 0, 1]).unwrap();
        let expect = tensor(&tensor(&f[2], &f[0]), &f[1]);
        assert!(out.max_abs_diff(&expect) < 1e-15);
        assert!(subsystem_permutation(&[2, 2], &[0, 0]).is_err());
    }

    #[test]
    fn expi_of_zero_is_identity() {
        let u = expi_hermitian(&Matrix::zeros(3, 3), 0.7).unwrap();
        assert!(u.matrix().max_abs_diff(&Matrix::identity(3)) < 1e-15);
    }

    #[test]
    fn expi_of_pauli_z() {
        let u = expi_hermitian(&pauli_z(), 0.3).unwrap();
        assert!((u.matrix()[(0, 0)] - C64::from_polar(1.0, 0.3)).norm() < 1e-14);
        assert!((u.matrix()[(1, 1)] - C64::from_polar(1.0, -0.3)).norm() < 1e-14);
    }

    #[test]
    fn purity_bounds() {
        assert!((purity(&maximally_mixed(4)) - 0.25).abs() < 1e-15);
        assert!((purity(&bell()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(Matrix::from_vec(2, 2, vec![c(0., 0.); 3]).is_err());
        assert!(Matrix::from_vec(1, 1, vec![c(f64::NAN, 0.)]).is_err());
    }
}
