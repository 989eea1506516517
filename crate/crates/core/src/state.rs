//! Spectral criteria for absolute separability of states.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64};
use crate::partition::Bipartition;
use crate::spectrum::{Spectrum, SUM_TOL};
use crate::verdict::{satisfied, Evidence, Status, Verdict};

pub mod criterion {
    pub const ABS_PPT_2N: &str = "abs_ppt_2n";
    pub const SEPARABLE_BALL: &str = "separable_ball";
    pub const NECESSARY_TRIPLE: &str = "necessary_triple";
    pub const PURITY_NECESSARY: &str = "purity_necessary";
    pub const PURITY_NECESSARY_SIMPLE: &str = "purity_necessary_simple";
    pub const NQUBIT_BALL: &str = "nqubit_ball";
    pub const NONE: &str = "none";
}

use criterion::*;

fn require_state_sum(s: &Spectrum) -> Result<()> {
    let sum = s.sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidSpectrum(format!(
            "values sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// Exact test for partitions `2|n`:
/// `λ1 <= λ_{2n-1} + 2 sqrt(λ_{2n} λ_{2n-2})`.
pub fn abs_ppt_2n(s: &Spectrum) -> Result<Verdict> {
    let len = s.len();
    if len % 2 != 0 || len < 4 {
        return Err(Error::InvalidSpectrum(format!(
            "expected an even length of at least 4, got {len}"
        )));
    }
    require_state_sum(s)?;
    let l = |k: usize| s.lambda(k);
    let rhs = l(len - 1) + 2.0 * (l(len) * l(len - 2)).max(0.0).sqrt();
    let margin = rhs - l(1);
    Ok(if satisfied(margin) {
        Verdict::new(Status::Holds, ABS_PPT_2N, margin)
    } else {
        Verdict::new(Status::Fails, ABS_PPT_2N, margin).with_witness(Evidence::spectrum(s.clone()))
    })
}

/// Sufficient: purity inside the ball `tr ρ² <= 1/(mn-1)`.
pub fn separable_ball(s: &Spectrum, part: Bipartition) -> Result<Verdict> {
    part.check_dim(s.len())?;
    require_state_sum(s)?;
    let margin = 1.0 / (part.dim() as f64 - 1.0) - s.purity();
    let status = if satisfied(margin) {
        Status::Holds
    } else {
        Status::Undetermined
    };
    Ok(Verdict::new(status, SEPARABLE_BALL, margin))
}

/// Necessary: `λ1 <= λ_{d-2} + λ_{d-1} + λ_d`.
pub fn necessary_triple(s: &Spectrum) -> Result<Verdict> {
    let d = s.len();
    if d < 4 {
        return Err(Error::InvalidSpectrum(format!(
            "need at least 4 eigenvalues, got {d}"
        )));
    }
    require_state_sum(s)?;
    let margin = s.lambda(d - 2) + s.lambda(d - 1) + s.lambda(d) - s.lambda(1);
    Ok(if satisfied(margin) {
        Verdict::new(Status::Undetermined, NECESSARY_TRIPLE, margin)
    } else {
        Verdict::new(Status::Fails, NECESSARY_TRIPLE, margin)
            .with_witness(Evidence::spectrum(s.clone()))
    })
}

/// The `k` with `1/k <= mu <= 1/(k-1)`, clamped to `2..=dim`.
fn purity_bracket(mu: f64, dim: usize) -> usize {
    let k = (1.0 / mu).ceil() as usize;
    k.clamp(2, dim)
}

fn check_purity_range(mu: f64, dim: usize) -> Result<()> {
    let lo = 1.0 / dim as f64;
    if !(mu >= lo - 1e-12 && mu <= 1.0 + 1e-12) {
        return Err(Error::OutOfRange(format!(
            "purity {mu} outside [{lo}, 1] for dimension {dim}"
        )));
    }
    Ok(())
}

/// Smallest possible largest eigenvalue among `dim`-spectra with purity `mu`.
pub fn min_largest_eigenvalue(mu: f64, dim: usize) -> Result<f64> {
    check_purity_range(mu, dim)?;
    if mu >= 1.0 {
        return Ok(1.0);
    }
    let k = purity_bracket(mu, dim) as f64;
    Ok((1.0 + ((k * mu - 1.0) / (k - 1.0)).max(0.0).sqrt()) / k)
}

/// The spectrum attaining [`min_largest_eigenvalue`]: `k-1` copies of `λ1`,
/// one remainder, then zeros.
pub fn min_largest_spectrum(mu: f64, dim: usize) -> Result<Spectrum> {
    let l1 = min_largest_eigenvalue(mu, dim)?;
    let mut v = vec![0.0; dim];
    if mu >= 1.0 {
        v[0] = 1.0;
    } else {
        let k = purity_bracket(mu, dim);
        for x in v.iter_mut().take(k - 1) {
            *x = l1;
        }
        v[k - 1] = (1.0 - (k as f64 - 1.0) * l1).max(0.0);
    }
    Spectrum::normalized(v)
}

/// Slack of the bracketed purity bound:
/// `3k sqrt(mu/(mn+8)) - 1 - sqrt((k mu - 1)/(k - 1))`.
pub fn purity_bound_margin(mu: f64, part: Bipartition) -> Result<f64> {
    bound_margin(mu, part.dim())
}

fn bound_margin(mu: f64, dim: usize) -> Result<f64> {
    check_purity_range(mu, dim)?;
    let k = purity_bracket(mu.min(1.0), dim) as f64;
    let lhs = 1.0 + ((k * mu - 1.0) / (k - 1.0)).max(0.0).sqrt();
    let rhs = 3.0 * k * (mu / (dim as f64 + 8.0)).sqrt();
    Ok(rhs - lhs)
}

/// Slack of the simpler bound `mu <= 9/(mn+8)`.
pub fn purity_simple_margin(mu: f64, part: Bipartition) -> f64 {
    9.0 / (part.dim() as f64 + 8.0) - mu
}

/// Necessary purity condition. Fails when either the bracketed bound or its
/// simpler corollary is violated; the simpler one is reported when it fires.
pub fn purity_necessary(mu: f64, part: Bipartition) -> Result<Verdict> {
    let bracketed = purity_bound_margin(mu, part)?;
    let simple = purity_simple_margin(mu, part);
    let witness = || -> Result<Evidence> {
        Ok(Evidence::spectrum(min_largest_spectrum(mu.min(1.0), part.dim())?).with_point(vec![mu]))
    };
    if !satisfied(simple) {
        return Ok(
            Verdict::new(Status::Fails, PURITY_NECESSARY_SIMPLE, simple).with_witness(witness()?)
        );
    }
    if !satisfied(bracketed) {
        return Ok(
            Verdict::new(Status::Fails, PURITY_NECESSARY, bracketed).with_witness(witness()?)
        );
    }
    Ok(Verdict::new(
        Status::Undetermined,
        PURITY_NECESSARY,
        bracketed,
    ))
}

/// Only the simpler bound `mu <= 9/(mn+8)`.
pub fn purity_necessary_simple(mu: f64, part: Bipartition) -> Result<Verdict> {
    check_purity_range(mu, part.dim())?;
    let margin = purity_simple_margin(mu, part);
    Ok(if satisfied(margin) {
        Verdict::new(Status::Undetermined, PURITY_NECESSARY_SIMPLE, margin)
    } else {
        Verdict::new(Status::Fails, PURITY_NECESSARY_SIMPLE, margin).with_witness(
            Evidence::spectrum(min_largest_spectrum(mu.min(1.0), part.dim())?),
        )
    })
}

/// Purity above which the bracketed bound certifies non-separability,
/// found by scanning down from 1 and bisecting the first sign change.
pub fn purity_breakpoint(part: Bipartition) -> f64 {
    purity_breakpoint_dim(part.dim())
}

/// [`purity_breakpoint`] for total dimension `mn`; the bound only depends
/// on the product.
pub fn purity_breakpoint_dim(dim: usize) -> f64 {
    let lo = 1.0 / dim as f64;
    let margin = |mu: f64| bound_margin(mu, dim).expect("in range");
    let steps = 64 * dim;
    let mut hi_mu = 1.0;
    for i in 1..=steps {
        let mu = 1.0 - (1.0 - lo) * i as f64 / steps as f64;
        if margin(mu) >= 0.0 {
            let (mut a, mut b) = (mu, hi_mu);
            while b - a > 1e-13 {
                let mid = 0.5 * (a + b);
                if margin(mid) >= 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return 0.5 * (a + b);
        }
        hi_mu = mu;
    }
    lo
}

/// Sufficient for full separability over `N` qubits:
/// `tr ρ² <= 2^{-N} (1 + (54/17) 3^{-N})`.
pub fn nqubit_ball(s: &Spectrum, n_qubits: usize) -> Result<Verdict> {
    if n_qubits < 2 || n_qubits > 30 || s.len() != 1usize << n_qubits {
        return Err(Error::InvalidSpectrum(format!(
            "length {} is not 2^{n_qubits} with N >= 2",
            s.len()
        )));
    }
    require_state_sum(s)?;
    let margin = nqubit_ball_bound(n_qubits) - s.purity();
    let status = if satisfied(margin) {
        Status::Holds
    } else {
        Status::Undetermined
    };
    Ok(Verdict::new(status, NQUBIT_BALL, margin))
}

pub fn nqubit_ball_bound(n_qubits: usize) -> f64 {
    let n = n_qubits as i32;
    2f64.powi(-n) * (1.0 + 54.0 / 17.0 * 3f64.powi(-n))
}

/// Validate a density matrix of the given dimension and return its spectrum.
pub fn state_spectrum(rho: &Matrix, dim: usize) -> Result<Spectrum> {
    crate::linalg::square_with_dim(rho, dim)?;
    rho.check_hermitian()?;
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > SUM_TOL || tr.im.abs() > SUM_TOL {
        return Err(Error::InvalidSpectrum(format!("trace {tr} is not 1")));
    }
    Spectrum::of_state(rho)
}

/// Cascade over the spectral criteria.
///
/// For `2|n` the exact test decides. Otherwise the ball can only confirm,
/// the necessary conditions can only refute.
pub fn classify_spectrum(s: &Spectrum, part: Bipartition) -> Result<Verdict> {
    part.check_dim(s.len())?;
    require_state_sum(s)?;
    if part.m == 2 || part.n == 2 {
        return abs_ppt_2n(s);
    }
    let ball = separable_ball(s, part)?;
    if ball.holds() {
        return Ok(ball);
    }
    let triple = necessary_triple(s)?;
    if triple.fails() {
        return Ok(triple);
    }
    let pur = purity_necessary(s.purity(), part)?;
    if pur.fails() {
        return Ok(pur.with_witness(Evidence::spectrum(s.clone())));
    }
    Ok(Verdict::new(Status::Undetermined, NONE, ball.margin))
}

pub fn classify_state(rho: &Matrix, part: Bipartition) -> Result<Verdict> {
    let s = state_spectrum(rho, part.dim())?;
    classify_spectrum(&s, part)
}

/// `sum_k w_k |GHZ_k><GHZ_k|` with
/// `|GHZ_k> = ((-1)^{k-1} |k1 k2 k3> + |~k1 ~k2 ~k3>)/sqrt(2)`, `k-1 = 4k1+2k2+k3`.
pub fn ghz_diagonal_state(weights: &[f64]) -> Result<Matrix> {
    if weights.len() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            got: weights.len(),
        });
    }
    Spectrum::state(weights.to_vec())?;
    let mut rho = Matrix::zeros(8, 8);
    for (idx, &w) in weights.iter().enumerate() {
        let v = ghz_vector(idx);
        let p = Matrix::projector(&v).scale_re(w.max(0.0));
        rho = &rho + &p;
    }
    Ok(rho)
}

/// `|GHZ_{idx+1}>` as an 8-vector.
pub fn ghz_vector(idx: usize) -> Vec<C64> {
    assert!(idx < 8);
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if idx % 2 == 0 { 1.0 } else { -1.0 };
    let mut v = vec![C64::new(0.0, 0.0); 8];
    v[idx] += C64::new(sign * amp, 0.0);
    v[7 - idx] += C64::new(amp, 0.0);
    v
}

/// Weights of the three-qubit GHZ-diagonal example that is absolutely
/// separable across `2|4`, sitting exactly on the boundary.
pub fn ghz_example_weights() -> [f64; 8] {
    let a = 11.0 / 48.0;
    let b = 23.0 / 144.0;
    let c = 11.0 / 144.0;
    [a, a, b, c, c, c, c, c]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues, maximally_mixed};

    fn sp(v: &[f64]) -> Spectrum {
        Spectrum::state(v.to_vec()).unwrap()
    }

    fn bp(m: usize, n: usize) -> Bipartition {
        Bipartition::new(m, n).unwrap()
    }

    #[test]
    fn abs_ppt_examples() {
        assert!(abs_ppt_2n(&Spectrum::uniform(4)).unwrap().holds());
        let pure = abs_ppt_2n(&Spectrum::pure(4)).unwrap();
        assert!(pure.fails());
        assert!(pure.witness.is_some());
        let ghz = abs_ppt_2n(&sp(&ghz_example_weights())).unwrap();
        assert!(ghz.holds());
        assert!(ghz.margin.abs() <= 1e-12);
        assert!(abs_ppt_2n(&Spectrum::uniform(6)).is_ok());
        assert!(abs_ppt_2n(&Spectrum::uniform(3)).is_err());
    }

    #[test]
    fn ball_examples() {
        let p = bp(2, 2);
        assert!(separable_ball(&Spectrum::uniform(4), p).unwrap().holds());
        assert_eq!(
            separable_ball(&Spectrum::pure(4), p).unwrap().status,
            Status::Undetermined
        );
        // Purity exactly 1/3: (1/2, 1/6, 1/6, 1/6).
        let edge = sp(&[0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]);
        assert!((edge.purity() - 1.0 / 3.0).abs() < 1e-15);
        assert!(separable_ball(&edge, p).unwrap().holds());
        assert!(separable_ball(&Spectrum::uniform(6), p).is_err());
    }

    #[test]
    fn triple_examples() {
        assert!(necessary_triple(&Spectrum::pure(4)).unwrap().fails());
        assert_eq!(
            necessary_triple(&Spectrum::uniform(9)).unwrap().status,
            Status::Undetermined
        );
        assert_eq!(
            necessary_triple(&sp(&[0.4, 0.2, 0.2, 0.2])).unwrap().status,
            Status::Undetermined
        );
        assert!(necessary_triple(&Spectrum::uniform(3)).is_err());
    }

    #[test]
    fn purity_examples() {
        let p = bp(2, 2);
        assert!(purity_necessary(0.55, p).unwrap().fails());
        assert!(purity_necessary(0.537, p).unwrap().fails());
        assert!(!purity_necessary(0.535, p).unwrap().fails());
        for (m, n) in [(2, 2), (2, 3), (3, 3), (4, 5)] {
            let part = bp(m, n);
            let mm = 1.0 / part.dim() as f64;
            assert_eq!(
                purity_necessary(mm, part).unwrap().status,
                Status::Undetermined
            );
            let mu = 9.0 / (part.dim() as f64 + 8.0) + 1e-3;
            let v = purity_necessary(mu, part).unwrap();
            assert!(v.fails());
            assert_eq!(v.criterion, PURITY_NECESSARY_SIMPLE);
        }
        assert!(purity_necessary(0.1, p).is_err());
        assert!(purity_necessary(1.5, p).is_err());
    }

    #[test]
    fn two_qubit_breakpoint_is_sqrt3_minus_1_squared() {
        let mu0 = purity_breakpoint(bp(2, 2));
        let want = (3f64.sqrt() - 1.0).powi(2);
        assert!((mu0 - want).abs() < 1e-9, "{mu0} vs {want}");
    }

    #[test]
    fn breakpoint_lies_below_simple_bound() {
        for d in 4..=64 {
            let part = bp(2, 2);
            let part = if d == 4 {
                part
            } else {
                match (2..d).find(|m| d % m == 0 && d / m >= 2) {
                    Some(m) => bp(m, d / m),
                    None => continue,
                }
            };
            let mu0 = purity_breakpoint(part);
            assert!(mu0 <= 9.0 / (d as f64 + 8.0) + 1e-12);
            assert!(mu0 >= 1.0 / (d as f64 - 1.0));
        }
    }

    #[test]
    fn min_largest_examples() {
        for k in 2..=6 {
            let v = min_largest_eigenvalue(1.0 / k as f64, 6).unwrap();
            assert!((v - 1.0 / k as f64).abs() < 1e-12);
        }
        assert_eq!(min_largest_eigenvalue(1.0, 4).unwrap(), 1.0);
        let v = min_largest_eigenvalue(0.55, 4).unwrap();
        assert!((v - 0.5 * (1.0 + 0.1f64.sqrt())).abs() < 1e-12);
        assert!(min_largest_eigenvalue(0.2, 4).is_err());
    }

    #[test]
    fn min_largest_spectrum_has_requested_purity() {
        for &mu in &[0.26, 0.3, 0.34, 0.55, 0.9] {
            let s = min_largest_spectrum(mu, 4).unwrap();
            assert!((s.purity() - mu).abs() < 1e-12);
            assert!((s.max() - min_largest_eigenvalue(mu, 4).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn nqubit_ball_examples() {
        let v = nqubit_ball(&Spectrum::uniform(4), 2).unwrap();
        assert!(v.holds());
        assert!((nqubit_ball_bound(2) - 0.25 * (1.0 + 6.0 / 17.0)).abs() < 1e-15);
        assert_eq!(
            nqubit_ball(&Spectrum::pure(8), 3).unwrap().status,
            Status::Undetermined
        );
        // A spectrum sitting exactly on the bound: (a, b, ..., b) with purity = bound.
        let n = 3;
        let d = 8.0;
        let bound = nqubit_ball_bound(n);
        // a = 1/d + sqrt((bound - 1/d) (d-1)/d)
        let a = 1.0 / d + ((bound - 1.0 / d) * (d - 1.0) / d).sqrt();
        let b = (1.0 - a) / (d - 1.0);
        let mut v = vec![b; 8];
        v[0] = a;
        let s = Spectrum::state(v).unwrap();
        assert!((s.purity() - bound).abs() < 1e-14);
        assert!(nqubit_ball(&s, n).unwrap().holds());
        assert!(nqubit_ball(&Spectrum::uniform(6), 3).is_err());
    }

    #[test]
    fn classify_examples() {
        for (m, n) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
            let part = bp(m, n);
            let mixed = maximally_mixed(part.dim());
            assert!(classify_state(&mixed, part).unwrap().holds());
            let mut pure = Matrix::zeros(part.dim(), part.dim());
            pure[(0, 0)] = C64::new(1.0, 0.0);
            assert!(classify_state(&pure, part).unwrap().fails());
        }
    }

    #[test]
    fn ghz_state() {
        let uniform = ghz_diagonal_state(&[0.125; 8]).unwrap();
        assert!(uniform.max_abs_diff(&maximally_mixed(8)) < 1e-15);
        let mut w = [0.0; 8];
        w[0] = 1.0;
        let pure = ghz_diagonal_state(&w).unwrap();
        assert!((crate::linalg::purity(&pure) - 1.0).abs() < 1e-15);

        let weights = ghz_example_weights();
        let rho = ghz_diagonal_state(&weights).unwrap();
        let ev = eigenvalues(&rho).unwrap();
        let want = sp(&weights);
        for (a, b) in ev.iter().zip(want.values()) {
            assert!((a - b).abs() < 1e-14);
        }
        let v = classify_state(&rho, bp(2, 4)).unwrap();
        assert!(v.holds());
        assert_eq!(v.criterion, ABS_PPT_2N);
    }

    #[test]
    fn ghz_vectors_are_orthonormal() {
        for i in 0..8 {
            for j in 0..8 {
                let ip: C64 = ghz_vector(i)
                    .iter()
                    .zip(ghz_vector(j))
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }
}
