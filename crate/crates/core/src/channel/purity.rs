//! Maximal output purity and minimal output entropy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    bidep_extremal_weights, bidep_norm, bidep_pure_output_purity, ctit_extremal_spectrum,
    ChannelSpec, MAX_CHOI_DIM,
};
use crate::error::Result;
use crate::linalg::{
    eigenvalues, hermitian_eigen, purity, random_pure_state, seeded_rng, Matrix, C64,
};
use crate::spectrum::Spectrum;

pub const NUMERIC_STARTS: usize = 64;
const MAX_ITERS: usize = 10_000;
const REL_STOP: f64 = 1e-12;
const DEFAULT_SEED: u64 = 0x5EED_AB5E;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Numeric,
}

/// Squared `1 -> 2` norm, i.e. the largest purity of an output state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub method: Method,
    /// Set when the value is only an achieved purity, not a certified maximum.
    pub lower_bound_only: bool,
    /// Spectrum of an output attaining `value`.
    pub output_spectrum: Spectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub upper_bound_only: bool,
}

/// Closed form when one is known for the family, numeric search otherwise.
pub fn max_output_purity(c: &ChannelSpec) -> Result<NormEstimate> {
    c.validate()?;
    match closed_form_spectrum(c) {
        Some(s) => Ok(NormEstimate {
            value: s.purity(),
            method: Method::ClosedForm,
            lower_bound_only: false,
            output_spectrum: s,
        }),
        None => max_output_purity_numeric(c, DEFAULT_SEED),
    }
}

/// Spectrum of a purity-maximizing output, for families with a closed form.
fn closed_form_spectrum(c: &ChannelSpec) -> Option<Spectrum> {
    match c {
        ChannelSpec::Depolarizing { d, q } => {
            let base = (1.0 - q) / *d as f64;
            let mut v = vec![base; *d];
            v[0] += q;
            Some(Spectrum::raw(v))
        }
        ChannelSpec::UnitalQubit { l1, l2, l3 } => {
            let m = l1.abs().max(l2.abs()).max(l3.abs());
            Some(Spectrum::raw(vec![(1.0 + m) / 2.0, (1.0 - m) / 2.0]))
        }
        ChannelSpec::TracingMap { d } => Some(Spectrum::uniform(*d)),
        ChannelSpec::GeneralizedPauli { d, s, t } => {
            let w = t
                .iter()
                .map(|tj| s + tj)
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .expect("d + 1 weights");
            let base = (1.0 - w) / *d as f64;
            let mut v = vec![base; *d];
            v[0] += w;
            Some(Spectrum::raw(v))
        }
        ChannelSpec::TraceIdTranspose { d, alpha, beta } => {
            Some(ctit_extremal_spectrum(*d, *alpha, *beta))
        }
        ChannelSpec::BipartiteDepolarizing {
            m,
            n,
            alpha,
            beta,
            gamma,
        } => {
            let (fact, ent) = bidep_extremal_weights(*m, *n, *alpha, *beta, *gamma);
            let k = (*m).min(*n) as f64;
            let p_fact = bidep_pure_output_purity(*m, *n, *alpha, *beta, *gamma, 1.0);
            let p_ent = bidep_pure_output_purity(*m, *n, *alpha, *beta, *gamma, 1.0 / k);
            let norm = bidep_norm(*m, *n, *alpha, *beta, *gamma);
            let w = if p_fact >= p_ent { fact } else { ent };
            Some(Spectrum::raw(w.into_iter().map(|x| x / norm).collect()))
        }
        ChannelSpec::LocalProduct { factors } => {
            let multiplicative = factors.iter().all(|f| {
                matches!(
                    f,
                    ChannelSpec::Depolarizing { .. } | ChannelSpec::UnitalQubit { .. }
                ) && f
                    .choi_eigenvalues()
                    .map(|ev| ev.last().copied().unwrap_or(0.0) >= -1e-9)
                    .unwrap_or(false)
            });
            let two_unital_qubits = factors.len() == 2
                && factors.iter().all(|f| {
                    matches!(f, ChannelSpec::UnitalQubit { .. })
                        || matches!(f, ChannelSpec::Depolarizing { d: 2, .. })
                });
            if !(multiplicative || two_unital_qubits) {
                return None;
            }
            let mut acc = Spectrum::raw(vec![1.0]);
            for f in factors {
                acc = acc.tensor(&closed_form_spectrum(f)?);
            }
            Some(acc)
        }
        ChannelSpec::OneSided { .. } => None,
    }
}

/// Linear action prepared once for repeated use.
struct Prepared<'a> {
    c: &'a ChannelSpec,
    superop: Option<Matrix>,
    superop_adj: Option<Matrix>,
}

impl<'a> Prepared<'a> {
    fn new(c: &'a ChannelSpec) -> Result<Self> {
        let (superop, superop_adj) = if c.dim() <= MAX_CHOI_DIM {
            let s = c.superoperator_matrix()?;
            let a = s.adjoint();
            (Some(s), Some(a))
        } else {
            (None, None)
        };
        Ok(Prepared {
            c,
            superop,
            superop_adj,
        })
    }

    fn via(s: &Matrix, x: &Matrix) -> Matrix {
        let d = x.dim();
        let mut v = Vec::with_capacity(d * d);
        for j in 0..d {
            for i in 0..d {
                v.push(x[(i, j)]);
            }
        }
        let y = s.mul_vec(&v);
        Matrix::from_fn(d, d, |i, j| y[j * d + i])
    }

    fn apply(&self, x: &Matrix) -> Matrix {
        match &self.superop {
            Some(s) => Self::via(s, x),
            None => self.c.apply_linear(x),
        }
    }

    /// Hilbert-Schmidt adjoint. Without a superoperator the families
    /// implemented here are all self-adjoint.
    fn adjoint_apply(&self, x: &Matrix) -> Matrix {
        match &self.superop_adj {
            Some(s) => Self::via(s, x),
            None => self.c.apply_linear(x),
        }
    }
}

fn top_vector(g: &Matrix) -> Result<Vec<C64>> {
    Ok(hermitian_eigen(&g.hermitian_part())?.vectors.column(0))
}

fn starts(d: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = seeded_rng(seed);
    (0..NUMERIC_STARTS)
        .map(|_| random_pure_state(d, &mut rng))
        .collect()
}

/// Multi-start ascent over pure inputs. Each step moves to the top
/// eigenvector of `Φ†Φ[ψψ†]`; convexity of the purity makes every step
/// non-decreasing.
pub fn max_output_purity_numeric(c: &ChannelSpec, seed: u64) -> Result<NormEstimate> {
    c.validate()?;
    let prep = Prepared::new(c)?;
    let d = c.dim();
    let runs: Vec<Result<(f64, Matrix)>> = starts(d, seed)
        .into_par_iter()
        .map(|psi| ascend_purity(&prep, psi))
        .collect();
    let mut best: Option<(f64, Matrix)> = None;
    for r in runs {
        let (v, out) = r?;
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, out));
        }
    }
    let (value, out) = best.expect("at least one start");
    let value = value.clamp(1.0 / d as f64, 1.0);
    let output_spectrum = Spectrum::of_state(&out)
        .or_else(|_| eigenvalues(&out.hermitian_part()).map(Spectrum::raw))?;
    Ok(NormEstimate {
        value,
        method: Method::Numeric,
        lower_bound_only: true,
        output_spectrum,
    })
}

fn ascend_purity(prep: &Prepared, psi: Vec<C64>) -> Result<(f64, Matrix)> {
    let mut out = prep.apply(&Matrix::projector(&psi));
    let mut f = purity(&out);
    for _ in 0..MAX_ITERS {
        let g = prep.adjoint_apply(&out);
        let next = top_vector(&g)?;
        let next_out = prep.apply(&Matrix::projector(&next));
        let nf = purity(&next_out);
        if nf <= f {
            break;
        }
        let gain = (nf - f) / f;
        out = next_out;
        f = nf;
        if gain < REL_STOP {
            break;
        }
    }
    Ok((f, out))
}

/// Closed form for depolarizing, unital qubit and tracing maps; numeric
/// multi-start descent otherwise.
pub fn min_output_entropy(c: &ChannelSpec) -> Result<EntropyEstimate> {
    c.validate()?;
    let closed = match c {
        ChannelSpec::TracingMap { d } => Some((*d as f64).ln()),
        ChannelSpec::Depolarizing { .. } | ChannelSpec::UnitalQubit { .. } => {
            closed_form_spectrum(c).map(|s| s.entropy())
        }
        _ => None,
    };
    match closed {
        Some(value) => Ok(EntropyEstimate {
            value,
            upper_bound_only: false,
        }),
        None => min_output_entropy_numeric(c, DEFAULT_SEED),
    }
}

/// Each step moves to the top eigenvector of `Φ†[log Φ[ψψ†]]`; concavity
/// of the entropy makes every step non-increasing.
pub fn min_output_entropy_numeric(c: &ChannelSpec, seed: u64) -> Result<EntropyEstimate> {
    c.validate()?;
    let prep = Prepared::new(c)?;
    let d = c.dim();
    let runs: Vec<Result<f64>> = starts(d, seed)
        .into_par_iter()
        .map(|psi| descend_entropy(&prep, psi))
        .collect();
    let mut best = f64::INFINITY;
    for r in runs {
        best = best.min(r?);
    }
    Ok(EntropyEstimate {
        value: best.clamp(0.0, (d as f64).ln()),
        upper_bound_only: true,
    })
}

fn entropy_and_log(out: &Matrix) -> Result<(f64, Matrix)> {
    let e = hermitian_eigen(&out.hermitian_part())?;
    let n = e.values.len();
    let mut h = 0.0;
    let logs: Vec<f64> = e
        .values
        .iter()
        .map(|&v| {
            let v = v.max(0.0);
            if v > 0.0 {
                h -= v * v.ln();
            }
            v.max(1e-300).ln()
        })
        .collect();
    let vecs = &e.vectors;
    let log = Matrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| vecs[(i, k)] * logs[k] * vecs[(j, k)].conj())
            .sum()
    });
    Ok((h, log))
}

fn descend_entropy(prep: &Prepared, psi: Vec<C64>) -> Result<f64> {
    let out = prep.apply(&Matrix::projector(&psi));
    let (mut h, mut log) = entropy_and_log(&out)?;
    for _ in 0..MAX_ITERS {
        let g = prep.adjoint_apply(&log);
        let next = top_vector(&g)?;
        let next_out = prep.apply(&Matrix::projector(&next));
        let (nh, nlog) = entropy_and_log(&next_out)?;
        if nh >= h {
            break;
        }
        let gain = h - nh;
        h = nh;
        log = nlog;
        if gain <= REL_STOP * h.abs().max(1e-300) {
            break;
        }
    }
    Ok(h)
}
