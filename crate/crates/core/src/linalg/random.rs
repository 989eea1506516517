//! Seeded random matrices: Haar unitaries, pure states, mixed states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{normalize, Matrix, Unitary, C64};
use crate::error::{Error, Result};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian with `E|z|^2 = 1`.
pub fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary from a fixed seed.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<Unitary> {
    if dim == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    Ok(haar_unitary_rng(dim, &mut seeded_rng(seed)))
}

/// Ginibre matrix, Householder QR, then `Q diag(r_ii/|r_ii|)`.
pub fn haar_unitary_rng<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Unitary {
    assert!(dim > 0);
    let mut a = Matrix::from_fn(dim, dim, |_, _| standard_complex(rng));
    let mut q = Matrix::identity(dim);
    let mut r_diag = vec![C64::new(1.0, 0.0); dim];

    for k in 0..dim {
        let norm = (k..dim).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k, k)];
        let ph = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -ph * norm;
        let mut v: Vec<C64> = (k..dim).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            r_diag[k] = x0;
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // A <- (I - 2 v v^†) A on rows k.., columns k..
        for j in k..dim {
            let s: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * a[(k + t, j)])
                .sum();
            for (t, vt) in v.iter().enumerate() {
                a[(k + t, j)] -= vt * s * 2.0;
            }
        }
        // Q <- Q (I - 2 v v^†) on columns k..
        for i in 0..dim {
            let s: C64 = v.iter().enumerate().map(|(t, vt)| q[(i, k + t)] * vt).sum();
            for (t, vt) in v.iter().enumerate() {
                q[(i, k + t)] -= s * vt.conj() * 2.0;
            }
        }
        r_diag[k] = a[(k, k)];
    }

    let phases: Vec<C64> = r_diag
        .iter()
        .map(|r| {
            if r.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                r / r.norm()
            }
        })
        .collect();
    let u = Matrix::from_fn(dim, dim, |i, j| q[(i, j)] * phases[j]);
    Unitary(u)
}

/// Haar-random unit vector.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| standard_complex(rng)).collect();
    normalize(&mut v);
    v
}

/// Hilbert–Schmidt random density matrix `G G^† / tr(G G^†)`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(dim, dim, |_, _| standard_complex(rng));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    w.scale_re(1.0 / tr).hermitian_part()
}

/// GUE sample `(G + G^†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(dim, dim, |_, _| standard_complex(rng));
    (&g + &g.adjoint()).scale_re(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_one_is_a_phase() {
        let u = haar_unitary(1, 9).unwrap();
        assert!((u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic_for_seed() {
        assert_eq!(haar_unitary(5, 42).unwrap(), haar_unitary(5, 42).unwrap());
        assert_ne!(haar_unitary(5, 42).unwrap(), haar_unitary(5, 43).unwrap());
    }

    #[test]
    fn unitary_up_to_dim_64() {
        for (seed, n) in [2, 3, 4, 7, 16, 64].into_iter().enumerate() {
            let u = haar_unitary(n, seed as u64).unwrap();
            assert!(u.matrix().unitarity_residual() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn rejects_zero_dim() {
        assert!(haar_unitary(0, 0).is_err());
    }

    #[test]
    fn first_moment_matches_haar() {
        // <|U_11|^2> = 1/d; the variance of |U_11|^2 is (d-1)/(d^2 (d+1)).
        let d = 4;
        let samples = 10_000;
        let mut rng = seeded_rng(2024);
        let mean = (0..samples)
            .map(|_| haar_unitary_rng(d, &mut rng).matrix()[(0, 0)].norm_sqr())
            .sum::<f64>()
            / samples as f64;
        let var = (d as f64 - 1.0) / ((d * d) as f64 * (d as f64 + 1.0));
        let se = (var / samples as f64).sqrt();
        assert!((mean - 0.25).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn second_moment_matches_haar() {
        // <|U_11|^4> = 2/(d(d+1)); this distinguishes the phase-fixed QR from
        // an unfixed one, which biases diagonal moduli.
        let d = 3;
        let samples = 20_000;
        let mut rng = seeded_rng(7);
        let vals: Vec<f64> = (0..samples)
            .map(|_| {
                haar_unitary_rng(d, &mut rng).matrix()[(0, 0)]
                    .norm_sqr()
                    .powi(2)
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / samples as f64;
        let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / samples as f64;
        let want = 2.0 / (d as f64 * (d as f64 + 1.0));
        assert!((mean - want).abs() < 4.0 * (var / samples as f64).sqrt());
    }

    #[test]
    fn density_matrices_are_states() {
        let mut rng = seeded_rng(5);
        let r = random_density_matrix(6, &mut rng);
        assert!((r.trace().re - 1.0).abs() < 1e-14);
        let ev = crate::linalg::eigenvalues(&r).unwrap();
        assert!(ev[5] > -1e-14);
    }
}
