//! Parametric channel families, their action, and complete positivity.

mod purity;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, partial_trace, paulis, square_with_dim, tensor, Matrix, Subsystem, C64,
};
use crate::mub::{is_prime, mub_basis, weyl_operators, MubBasis};
use crate::partition::Bipartition;
use crate::spectrum::Spectrum;
use crate::verdict::{satisfied, Status, Verdict};

pub use purity::{
    max_output_purity, max_output_purity_numeric, min_output_entropy, min_output_entropy_numeric,
    EntropyEstimate, Method, NormEstimate, NUMERIC_STARTS,
};

const PARAM_TOL: f64 = 1e-12;

/// Largest dimension for which a Choi matrix is built explicitly.
pub const MAX_CHOI_DIM: usize = 16;

/// A map family with its parameters, as read from JSON `{"family": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    /// `q X + (1 - q) tr[X] I/d`.
    Depolarizing { d: usize, q: f64 },
    /// Tensor product of the factors, first factor major.
    LocalProduct { factors: Vec<ChannelSpec> },
    /// Qubit map scaling the Bloch vector components by `l1, l2, l3`.
    UnitalQubit { l1: f64, l2: f64, l3: f64 },
    /// `((d-1)s+1)/d X + (1/d) sum_J t_J sum_j W_J^j X W_J^j†`, `t` indexed by basis.
    GeneralizedPauli { d: usize, s: f64, t: Vec<f64> },
    /// `(tr[X] I + α X + β X^T)/(d + α + β)`.
    #[serde(rename = "ctit")]
    TraceIdTranspose { d: usize, alpha: f64, beta: f64 },
    /// `(tr[X] I + α I ⊗ tr_A X + β tr_B X ⊗ I + γ X)/(mn + αm + βn + γ)`.
    BipartiteDepolarizing {
        m: usize,
        n: usize,
        alpha: f64,
        beta: f64,
        gamma: f64,
    },
    /// `tr[X] I/d`.
    #[serde(rename = "tracing")]
    TracingMap { d: usize },
    /// `inner ⊗ Id_{id_dim}`.
    OneSided {
        inner: Box<ChannelSpec>,
        #[serde(alias = "idDim")]
        id_dim: usize,
    },
}

fn not_positive(msg: String) -> Error {
    Error::NotPositive(msg)
}

impl ChannelSpec {
    pub fn identity(d: usize) -> Self {
        ChannelSpec::Depolarizing { d, q: 1.0 }
    }

    pub fn family(&self) -> &'static str {
        match self {
            ChannelSpec::Depolarizing { .. } => "depolarizing",
            ChannelSpec::LocalProduct { .. } => "local_product",
            ChannelSpec::UnitalQubit { .. } => "unital_qubit",
            ChannelSpec::GeneralizedPauli { .. } => "generalized_pauli",
            ChannelSpec::TraceIdTranspose { .. } => "ctit",
            ChannelSpec::BipartiteDepolarizing { .. } => "bipartite_depolarizing",
            ChannelSpec::TracingMap { .. } => "tracing",
            ChannelSpec::OneSided { .. } => "one_sided",
        }
    }

    /// Input (= output) dimension.
    pub fn dim(&self) -> usize {
        match self {
            ChannelSpec::Depolarizing { d, .. }
            | ChannelSpec::GeneralizedPauli { d, .. }
            | ChannelSpec::TraceIdTranspose { d, .. }
            | ChannelSpec::TracingMap { d } => *d,
            ChannelSpec::UnitalQubit { .. } => 2,
            ChannelSpec::LocalProduct { factors } => factors.iter().map(|f| f.dim()).product(),
            ChannelSpec::BipartiteDepolarizing { m, n, .. } => m * n,
            ChannelSpec::OneSided { inner, id_dim } => inner.dim() * id_dim,
        }
    }

    /// Check the parameters lie in the positivity region of the family.
    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelSpec::Depolarizing { d, q } => {
                check_dim(*d, 2)?;
                finite(&[*q])?;
                let lo = -1.0 / (*d as f64 - 1.0);
                if *q < lo - PARAM_TOL || *q > 1.0 + PARAM_TOL {
                    return Err(not_positive(format!(
                        "depolarizing needs q in [{lo}, 1], got {q}"
                    )));
                }
            }
            ChannelSpec::UnitalQubit { l1, l2, l3 } => {
                finite(&[*l1, *l2, *l3])?;
                for (name, l) in [("l1", l1), ("l2", l2), ("l3", l3)] {
                    if l.abs() > 1.0 + PARAM_TOL {
                        return Err(not_positive(format!(
                            "unital qubit map needs |{name}| <= 1, got {l}"
                        )));
                    }
                }
            }
            ChannelSpec::GeneralizedPauli { d, s, t } => {
                check_dim(*d, 2)?;
                finite(&[*s])?;
                finite(t)?;
                if t.len() != d + 1 {
                    return Err(Error::DimensionMismatch {
                        expected: d + 1,
                        got: t.len(),
                    });
                }
                let total = s + t.iter().sum::<f64>();
                if (total - 1.0).abs() > 1e-10 {
                    return Err(not_positive(format!(
                        "generalized Pauli needs s + sum t = 1, got {total}"
                    )));
                }
                if let Some(tj) = t.iter().find(|&&tj| tj < -PARAM_TOL) {
                    return Err(not_positive(format!(
                        "generalized Pauli needs t_J >= 0, got {tj}"
                    )));
                }
                let lo = -1.0 / (*d as f64 - 1.0);
                if *s < lo - PARAM_TOL {
                    return Err(not_positive(format!(
                        "generalized Pauli needs s >= {lo}, got {s}"
                    )));
                }
            }
            ChannelSpec::TraceIdTranspose { d, alpha, beta } => {
                check_dim(*d, 2)?;
                finite(&[*alpha, *beta])?;
                let norm = *d as f64 + alpha + beta;
                if norm <= 0.0 {
                    return Err(not_positive(format!(
                        "ctit needs d + alpha + beta > 0, got {norm}"
                    )));
                }
                let low = ctit_pure_eigen(*alpha, *beta).1;
                if low < -PARAM_TOL {
                    return Err(not_positive(format!(
                        "ctit needs 1 + (a+b)/2 - max(|a+b|,|a-b|)/2 >= 0, got {low}"
                    )));
                }
            }
            ChannelSpec::BipartiteDepolarizing {
                m,
                n,
                alpha,
                beta,
                gamma,
            } => {
                Bipartition::new(*m, *n)?;
                finite(&[*alpha, *beta, *gamma])?;
                let norm = bidep_norm(*m, *n, *alpha, *beta, *gamma);
                if norm <= 0.0 {
                    return Err(not_positive(format!(
                        "bipartite depolarizing needs mn + am + bn + g > 0, got {norm}"
                    )));
                }
                let (fact, ent) = bidep_extremal_weights(*m, *n, *alpha, *beta, *gamma);
                for (label, w) in [("factorized", fact), ("maximally entangled", ent)] {
                    let low = w.iter().cloned().fold(f64::INFINITY, f64::min);
                    if low < -PARAM_TOL {
                        return Err(not_positive(format!(
                            "bipartite depolarizing output on a {label} input has eigenvalue {low}"
                        )));
                    }
                }
            }
            ChannelSpec::TracingMap { d } => check_dim(*d, 1)?,
            ChannelSpec::LocalProduct { factors } => {
                if factors.is_empty() {
                    return Err(Error::OutOfRange("local product needs factors".into()));
                }
                for f in factors {
                    f.validate()?;
                }
            }
            ChannelSpec::OneSided { inner, id_dim } => {
                inner.validate()?;
                check_dim(*id_dim, 2)?;
            }
        }
        Ok(())
    }

    /// Whether `Φ[I] = I`.
    pub fn is_unital(&self) -> bool {
        match self {
            ChannelSpec::Depolarizing { .. }
            | ChannelSpec::UnitalQubit { .. }
            | ChannelSpec::GeneralizedPauli { .. }
            | ChannelSpec::TraceIdTranspose { .. }
            | ChannelSpec::TracingMap { .. } => true,
            ChannelSpec::BipartiteDepolarizing { .. } => true,
            ChannelSpec::LocalProduct { factors } => factors.iter().all(|f| f.is_unital()),
            ChannelSpec::OneSided { inner, .. } => inner.is_unital(),
        }
    }

    /// Validated action on a density matrix.
    pub fn apply(&self, rho: &Matrix) -> Result<Matrix> {
        self.validate()?;
        square_with_dim(rho, self.dim())?;
        self.check_supported()?;
        Ok(self.apply_linear(rho))
    }

    fn check_supported(&self) -> Result<()> {
        match self {
            ChannelSpec::GeneralizedPauli { d, .. } if !is_prime(*d) => {
                Err(Error::UnsupportedDimension(*d))
            }
            ChannelSpec::LocalProduct { factors } => {
                factors.iter().try_for_each(|f| f.check_supported())
            }
            ChannelSpec::OneSided { inner, .. } => inner.check_supported(),
            _ => Ok(()),
        }
    }

    /// Linear action on an arbitrary square matrix, no validation.
    ///
    /// Generalized Pauli maps must have prime dimension.
    pub fn apply_linear(&self, x: &Matrix) -> Matrix {
        match self {
            ChannelSpec::Depolarizing { d, q } => {
                let tr = x.trace();
                let mut y = x.scale_re(*q);
                let add = tr * ((1.0 - q) / *d as f64);
                for i in 0..*d {
                    y[(i, i)] += add;
                }
                y
            }
            ChannelSpec::UnitalQubit { l1, l2, l3 } => {
                let ls = [1.0, *l1, *l2, *l3];
                let mut y = Matrix::zeros(2, 2);
                for (l, p) in ls.iter().zip(paulis()) {
                    let coef = (&p * x).trace() * (0.5 * l);
                    y = &y + &p.scale(coef);
                }
                y
            }
            ChannelSpec::GeneralizedPauli { d, s, t } => {
                let ops = weyl_operators(&mub_basis(*d).expect("prime dimension"));
                gp_apply(x, *d, *s, t, &ops)
            }
            ChannelSpec::TraceIdTranspose { d, alpha, beta } => {
                let norm = *d as f64 + alpha + beta;
                let tr = x.trace();
                let mut y = &x.scale_re(*alpha) + &x.transpose().scale_re(*beta);
                for i in 0..*d {
                    y[(i, i)] += tr;
                }
                y.scale_re(1.0 / norm)
            }
            ChannelSpec::BipartiteDepolarizing {
                m,
                n,
                alpha,
                beta,
                gamma,
            } => {
                let part = Bipartition { m: *m, n: *n };
                let norm = bidep_norm(*m, *n, *alpha, *beta, *gamma);
                let tr = x.trace();
                let xb = partial_trace(x, part, Subsystem::A).expect("dims");
                let xa = partial_trace(x, part, Subsystem::B).expect("dims");
                let mut y = &tensor(&Matrix::identity(*m), &xb).scale_re(*alpha)
                    + &tensor(&xa, &Matrix::identity(*n)).scale_re(*beta);
                y = &y + &x.scale_re(*gamma);
                for i in 0..m * n {
                    y[(i, i)] += tr;
                }
                y.scale_re(1.0 / norm)
            }
            ChannelSpec::TracingMap { d } => {
                let tr = x.trace() / *d as f64;
                let mut y = Matrix::zeros(*d, *d);
                for i in 0..*d {
                    y[(i, i)] = tr;
                }
                y
            }
            ChannelSpec::LocalProduct { factors } => {
                let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
                let mut y = x.clone();
                for (slot, f) in factors.iter().enumerate() {
                    y = apply_on_slot(f, &y, &dims, slot);
                }
                y
            }
            ChannelSpec::OneSided { inner, id_dim } => {
                apply_on_slot(inner, x, &[inner.dim(), *id_dim], 0)
            }
        }
    }

    /// `d² x d²` matrix acting on column-stacked `vec(X)` (`X_ij` at `j*d + i`).
    pub fn superoperator_matrix(&self) -> Result<Matrix> {
        self.validate()?;
        self.check_supported()?;
        let d = self.dim();
        let mut s = Matrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = Matrix::zeros(d, d);
                e[(i, j)] = C64::new(1.0, 0.0);
                let y = self.apply_linear(&e);
                let col = j * d + i;
                for a in 0..d {
                    for b in 0..d {
                        s[(b * d + a, col)] = y[(a, b)];
                    }
                }
            }
        }
        Ok(s)
    }

    /// `sum_ij E_ij ⊗ Φ[E_ij]` (input factor first, unnormalized).
    pub fn choi_matrix(&self) -> Result<Matrix> {
        self.validate()?;
        self.check_supported()?;
        let d = self.dim();
        if d > MAX_CHOI_DIM {
            return Err(Error::Unsupported(format!(
                "Choi matrix of dimension {} is too large",
                d * d
            )));
        }
        let mut c = Matrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = Matrix::zeros(d, d);
                e[(i, j)] = C64::new(1.0, 0.0);
                let y = self.apply_linear(&e);
                for a in 0..d {
                    for b in 0..d {
                        c[(i * d + a, j * d + b)] = y[(a, b)];
                    }
                }
            }
        }
        Ok(c)
    }

    /// Choi eigenvalues, decreasing. Products and one-sided maps use the
    /// tensor structure instead of a full eigensolve.
    pub fn choi_eigenvalues(&self) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            ChannelSpec::Depolarizing { d, q } => {
                let d = *d as f64;
                let base = (1.0 - q) / d;
                let mut v = vec![base; (d * d) as usize];
                v[0] = q * d + base;
                Ok(Spectrum::raw(v).into_values())
            }
            ChannelSpec::TracingMap { d } => Ok(vec![1.0 / *d as f64; d * d]),
            ChannelSpec::LocalProduct { factors } => {
                let mut acc = Spectrum::raw(vec![1.0]);
                for f in factors {
                    acc = acc.tensor(&Spectrum::raw(f.choi_eigenvalues()?));
                }
                Ok(acc.into_values())
            }
            ChannelSpec::OneSided { inner, id_dim } => {
                let mut id = vec![0.0; id_dim * id_dim];
                id[0] = *id_dim as f64;
                Ok(Spectrum::raw(inner.choi_eigenvalues()?)
                    .tensor(&Spectrum::raw(id))
                    .into_values())
            }
            _ => eigenvalues(&self.choi_matrix()?.hermitian_part()),
        }
    }

    /// Spectrum of `Φ[|ψ><ψ|]` for pure inputs, when it does not depend on `ψ`
    /// beyond symmetry: the worst case used by closed-form bounds.
    pub fn validate_for_classification(&self) -> Result<()> {
        self.validate()
    }
}

/// Completely positive iff the Choi matrix is positive semidefinite.
/// The margin is the smallest Choi eigenvalue.
pub fn is_completely_positive(c: &ChannelSpec) -> Result<Verdict> {
    let ev = c.choi_eigenvalues()?;
    let margin = *ev.last().expect("nonempty");
    let status = if satisfied(margin) {
        Status::Holds
    } else {
        Status::Fails
    };
    Ok(Verdict::new(status, "choi_positive", margin))
}

/// Output of a generalized Pauli channel on the axis state `|ψ_k^J>`:
/// `(1 - s - t_J) I/d + (s + t_J) |ψ_k^J><ψ_k^J|`.
pub fn axis_output(c: &ChannelSpec, basis: usize, k: usize) -> Result<Matrix> {
    let ChannelSpec::GeneralizedPauli { d, s, t } = c else {
        return Err(Error::Unsupported(format!(
            "axis states belong to generalized Pauli channels, not {}",
            c.family()
        )));
    };
    c.validate()?;
    let mub = mub_basis(*d)?;
    let v = mub.vector(basis, k)?;
    let w = s + t[basis];
    let mut out = Matrix::projector(v).scale_re(w);
    for i in 0..*d {
        out[(i, i)] += C64::new((1.0 - w) / *d as f64, 0.0);
    }
    Ok(out)
}

pub fn axis_state(d: usize, basis: usize, k: usize) -> Result<Matrix> {
    let mub: MubBasis = mub_basis(d)?;
    Ok(Matrix::projector(mub.vector(basis, k)?))
}

fn gp_apply(
    x: &Matrix,
    d: usize,
    s: f64,
    t: &[f64],
    ops: &[Vec<crate::linalg::Unitary>],
) -> Matrix {
    let mut y = x.scale_re(((d as f64 - 1.0) * s + 1.0) / d as f64);
    for (tj, powers) in t.iter().zip(ops) {
        if *tj == 0.0 {
            continue;
        }
        for w in powers {
            y = &y + &w.conjugate(x).scale_re(tj / d as f64);
        }
    }
    y
}

/// Apply `f` to tensor factor `slot` of an operator on `dims`.
fn apply_on_slot(f: &ChannelSpec, x: &Matrix, dims: &[usize], slot: usize) -> Matrix {
    let dk = dims[slot];
    let left: usize = dims[..slot].iter().product();
    let right: usize = dims[slot + 1..].iter().product();
    let total = left * dk * right;
    let idx = |l: usize, a: usize, r: usize| (l * dk + a) * right + r;
    let mut y = Matrix::zeros(total, total);
    let mut block = Matrix::zeros(dk, dk);
    for l in 0..left {
        for r in 0..right {
            for l2 in 0..left {
                for r2 in 0..right {
                    let mut nonzero = false;
                    for a in 0..dk {
                        for b in 0..dk {
                            let v = x[(idx(l, a, r), idx(l2, b, r2))];
                            nonzero |= v.re != 0.0 || v.im != 0.0;
                            block[(a, b)] = v;
                        }
                    }
                    if !nonzero {
                        continue;
                    }
                    let out = f.apply_linear(&block);
                    for a in 0..dk {
                        for b in 0..dk {
                            y[(idx(l, a, r), idx(l2, b, r2))] = out[(a, b)];
                        }
                    }
                }
            }
        }
    }
    y
}

fn check_dim(d: usize, min: usize) -> Result<()> {
    if d < min {
        return Err(Error::OutOfRange(format!(
            "dimension must be at least {min}, got {d}"
        )));
    }
    Ok(())
}

fn finite(xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::OutOfRange("non-finite parameter".into()));
    }
    Ok(())
}

/// Largest and smallest eigenvalue of `I + α|ψ><ψ| + β|ψ̄><ψ̄|` over pure `ψ`.
pub fn ctit_pure_eigen(alpha: f64, beta: f64) -> (f64, f64) {
    let mid = 1.0 + 0.5 * (alpha + beta);
    let half = 0.5 * (alpha + beta).abs().max((alpha - beta).abs());
    (mid + half, mid - half)
}

/// Normalized spectrum of the ctit output with the largest spread: ones
/// (`d-2` times) and the two extremal eigenvalues, divided by `d + α + β`.
pub fn ctit_extremal_spectrum(d: usize, alpha: f64, beta: f64) -> Spectrum {
    let (hi, lo) = ctit_pure_eigen(alpha, beta);
    let norm = d as f64 + alpha + beta;
    let mut v = vec![1.0 / norm; d];
    v[0] = hi / norm;
    v[d - 1] = lo / norm;
    Spectrum::raw(v)
}

pub fn bidep_norm(m: usize, n: usize, alpha: f64, beta: f64, gamma: f64) -> f64 {
    (m * n) as f64 + alpha * m as f64 + beta * n as f64 + gamma
}

/// Unnormalized output eigenvalues on a factorized and on a maximally
/// entangled pure input.
pub fn bidep_extremal_weights(
    m: usize,
    n: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut fact = Vec::with_capacity(m * n);
    fact.push(1.0 + alpha + beta + gamma);
    fact.extend(std::iter::repeat(1.0 + alpha).take(m - 1));
    fact.extend(std::iter::repeat(1.0 + beta).take(n - 1));
    fact.extend(std::iter::repeat(1.0).take((m - 1) * (n - 1)));

    // Schmidt basis of the maximally entangled input: indices below k on
    // each side carry the reduced weight 1/k.
    let k = m.min(n);
    let kf = k as f64;
    let mut ent = Vec::with_capacity(m * n);
    ent.push(1.0 + (alpha + beta) / kf + gamma);
    ent.extend(std::iter::repeat(1.0 + (alpha + beta) / kf).take(k * k - 1));
    ent.extend(std::iter::repeat(1.0 + alpha / kf).take((m - k) * k));
    ent.extend(std::iter::repeat(1.0 + beta / kf).take(k * (n - k)));
    ent.extend(std::iter::repeat(1.0).take((m - k) * (n - k)));
    (fact, ent)
}

/// Output purity of the bipartite depolarizing map on a pure input whose
/// reduced states have purity `mu`.
pub fn bidep_pure_output_purity(
    m: usize,
    n: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    mu: f64,
) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    let norm = bidep_norm(m, n, alpha, beta, gamma);
    let k = alpha * alpha * mf + beta * beta * nf + 2.0 * gamma * (alpha + beta);
    (mf * nf + 2.0 * (alpha * mf + beta * nf + alpha * beta + gamma) + gamma * gamma + k * mu)
        / (norm * norm)
}

#[cfg(test)]
mod tests;
