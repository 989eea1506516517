use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, Matrix};

/// Tolerance below zero still accepted (and clamped) in a state spectrum.
pub const NEGATIVE_CLAMP_TOL: f64 = 1e-9;
pub const SUM_TOL: f64 = 1e-10;
pub const MAJORIZATION_TOL: f64 = 1e-12;

/// Real eigenvalues stored in decreasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Validated state spectrum: nonnegative (small negatives clamped) and
    /// summing to one.
    pub fn state(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite value".into()));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidSpectrum(format!(
                "values sum to {sum}, expected 1"
            )));
        }
        if let Some(v) = values.iter().find(|&&v| v < -NEGATIVE_CLAMP_TOL) {
            return Err(Error::InvalidSpectrum(format!("negative value {v}")));
        }
        let values = values.into_iter().map(|v| v.max(0.0)).collect();
        Ok(Self::raw(values))
    }

    /// Rescale nonnegative weights to sum to one.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let sum: f64 = values.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::InvalidSpectrum(format!(
                "cannot normalize weights summing to {sum}"
            )));
        }
        Self::state(values.into_iter().map(|v| v / sum).collect())
    }

    /// Sorted but otherwise unchecked; negative values are kept.
    pub fn raw(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum { values }
    }

    pub fn uniform(d: usize) -> Self {
        Spectrum {
            values: vec![1.0 / d as f64; d],
        }
    }

    pub fn pure(d: usize) -> Self {
        let mut values = vec![0.0; d];
        values[0] = 1.0;
        Spectrum { values }
    }

    /// Spectrum of a density matrix.
    pub fn of_state(rho: &Matrix) -> Result<Self> {
        Self::state(eigenvalues(rho)?)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `λ_k` with the 1-based index used in the literature.
    pub fn lambda(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn purity(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Von Neumann entropy, natural log, `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        -self
            .values
            .iter()
            .filter(|&&v| v > 0.0)
            .map(|&v| v * v.ln())
            .sum::<f64>()
    }

    /// Spectrum of `ρ ⊗ σ`.
    pub fn tensor(&self, other: &Spectrum) -> Spectrum {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in &self.values {
            for b in &other.values {
                out.push(a * b);
            }
        }
        Spectrum::raw(out)
    }
}

/// True iff every partial sum of `a` dominates the matching one of `b`.
pub fn majorizes(a: &Spectrum, b: &Spectrum) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let (mut sa, mut sb) = (0.0, 0.0);
    for (x, y) in a.values.iter().zip(&b.values) {
        sa += x;
        sb += y;
        if sa < sb - MAJORIZATION_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_clamps() {
        let s = Spectrum::state(vec![0.2, 0.8 + 5e-10, -5e-10]).unwrap();
        assert_eq!(s.values(), &[0.8 + 5e-10, 0.2, 0.0]);
    }

    #[test]
    fn rejects_bad_spectra() {
        assert!(Spectrum::state(vec![0.5, 0.6]).is_err());
        assert!(Spectrum::state(vec![1.1, -0.1]).is_err());
        assert!(Spectrum::state(vec![]).is_err());
        assert!(Spectrum::state(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn raw_keeps_negatives() {
        let s = Spectrum::raw(vec![-0.5, 0.5, 1.0]);
        assert_eq!(s.values(), &[1.0, 0.5, -0.5]);
    }

    #[test]
    fn purity_and_entropy() {
        let u = Spectrum::uniform(4);
        assert!((u.purity() - 0.25).abs() < 1e-15);
        assert!((u.entropy() - 4f64.ln()).abs() < 1e-15);
        let p = Spectrum::pure(4);
        assert_eq!(p.purity(), 1.0);
        assert_eq!(p.entropy(), 0.0);
        let half = Spectrum::state(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!((half.entropy() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn majorization_examples() {
        let pure = Spectrum::pure(4);
        let mixed = Spectrum::uniform(4);
        let mid = Spectrum::state(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        assert!(majorizes(&pure, &mid).unwrap());
        assert!(majorizes(&mid, &mixed).unwrap());
        assert!(!majorizes(&mixed, &mid).unwrap());
        let a = Spectrum::state(vec![0.5, 0.3, 0.2]).unwrap();
        let b = Spectrum::state(vec![0.4, 0.4, 0.2]).unwrap();
        assert!(majorizes(&a, &b).unwrap());
        assert!(majorizes(&a, &Spectrum::uniform(4)).is_err());
    }

    #[test]
    fn tensor_multiplies() {
        let a = Spectrum::state(vec![0.75, 0.25]).unwrap();
        let t = a.tensor(&a);
        assert_eq!(t.values(), &[0.5625, 0.1875, 0.1875, 0.0625]);
    }
}
