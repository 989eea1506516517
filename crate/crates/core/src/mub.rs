//! Mutually unbiased bases and the associated unitaries for prime `d`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Unitary, C64};

/// `d + 1` orthonormal bases of `C^d`, pairwise unbiased.
///
/// Basis 0 is the computational basis. For odd prime `d`, basis `1 + a`
/// has vectors `d^{-1/2} sum_j ω^{a j² + k j} |j>`; for `d = 2` the two
/// extra bases are the `σ_x` and `σ_y` eigenbases.
#[derive(Debug, Clone)]
pub struct MubBasis {
    pub d: usize,
    /// `bases[J][k]` is the k-th vector of basis J.
    pub bases: Vec<Vec<Vec<C64>>>,
}

pub fn is_prime(d: usize) -> bool {
    d >= 2 && (2..).take_while(|p| p * p <= d).all(|p| d % p != 0)
}

pub fn mub_basis(d: usize) -> Result<MubBasis> {
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut bases = Vec::with_capacity(d + 1);
    let computational: Vec<Vec<C64>> = (0..d)
        .map(|k| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[k] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    bases.push(computational);
    let amp = 1.0 / (d as f64).sqrt();
    for a in 0..d {
        let basis = (0..d)
            .map(|k| {
                (0..d)
                    .map(|j| {
                        let phase = if d == 2 {
                            // i^{a j} (-1)^{k j}
                            PI / 2.0 * (a * j) as f64 + PI * (k * j) as f64
                        } else {
                            2.0 * PI * ((a * j * j + k * j) % d) as f64 / d as f64
                        };
                        C64::from_polar(amp, phase)
                    })
                    .collect()
            })
            .collect();
        bases.push(basis);
    }
    Ok(MubBasis { d, bases })
}

impl MubBasis {
    pub fn vector(&self, basis: usize, k: usize) -> Result<&[C64]> {
        self.bases
            .get(basis)
            .and_then(|b| b.get(k))
            .map(|v| v.as_slice())
            .ok_or_else(|| {
                Error::IndexOutOfRange(format!(
                    "axis ({basis}, {k}) outside {} bases of size {}",
                    self.d + 1,
                    self.d
                ))
            })
    }

    /// `W_J = sum_k ω^{k+1} |ψ_k^J><ψ_k^J|` with `ω = e^{2πi/d}`.
    pub fn weyl(&self, basis: usize) -> Matrix {
        let d = self.d;
        let mut w = Matrix::zeros(d, d);
        for (k, v) in self.bases[basis].iter().enumerate() {
            let om = C64::from_polar(1.0, 2.0 * PI * (k + 1) as f64 / d as f64);
            w = &w + &Matrix::projector(v).scale(om);
        }
        w
    }
}

/// `W_J^j` for `J = 0..=d` and `j = 1..d`, indexed `[J][j-1]`.
pub fn weyl_operators(b: &MubBasis) -> Vec<Vec<Unitary>> {
    (0..=b.d)
        .map(|j_basis| {
            let w = b.weyl(j_basis);
            let mut powers = Vec::with_capacity(b.d - 1);
            let mut acc = w.clone();
            for _ in 1..b.d {
                powers.push(Unitary::new(acc.clone()).expect("powers of a unitary"));
                acc = &acc * &w;
            }
            powers
        })
        .collect()
}
