//! Map-level criteria for the absolutely separating property.
//!
//! Each criterion is exposed on its own so parameter regions can be swept
//! separately; [`classify_channel`] chains them per family.

use crate::channel::{
    bidep_extremal_weights, bidep_norm, ctit_extremal_spectrum, max_output_purity, ChannelSpec,
    EntropyEstimate, Method, NormEstimate,
};
use crate::error::{Error, Result};
use crate::partition::{Bipartition, MultiPartition, Partition};
use crate::spectrum::Spectrum;
use crate::state::{abs_ppt_2n, classify_spectrum, necessary_triple, nqubit_ball_bound};
use crate::verdict::{satisfied, Evidence, MapStatus, MapVerdict, Status};

pub mod criterion {
    pub const BALL: &str = "ball";
    pub const NQUBIT_BALL: &str = "nqubit_ball";
    pub const ANTI_BALL: &str = "anti_ball";
    pub const OUTPUT_SPECTRUM: &str = "output_spectrum";
    pub const LOCAL_DEP_2Q_EXACT: &str = "local_dep_2q_exact";
    pub const LOCAL_DEP_2Q_SUFFICIENT: &str = "local_dep_2q_sufficient";
    pub const NQUBIT_DEP_RATIO: &str = "nqubit_dep_ratio";
    pub const NQUBIT_DEP_ONE_OVER_N: &str = "nqubit_dep_one_over_n";
    pub const NQUBIT_DEP_FACTORIZED: &str = "nqubit_dep_factorized";
    pub const NQUBIT_DEP_NOT_AS: &str = "nqubit_dep_not_as";
    pub const LOCAL_UNITAL: &str = "local_unital";
    pub const NQUBIT_UNITAL: &str = "nqubit_unital";
    pub const NQUBIT_UNITAL_REQUIRES_CP: &str = "nqubit_unital_requires_cp";
    pub const CTIT_SUFFICIENT: &str = "ctit_sufficient";
    pub const CTIT_2N_EXACT: &str = "ctit_2n_exact";
    pub const CTIT_NECESSARY: &str = "ctit_necessary";
    pub const CTIT_NQUBIT: &str = "ctit_nqubit";
    pub const BIDEP_SUFFICIENT: &str = "bidep_sufficient";
    pub const BIDEP_NECESSARY: &str = "bidep_necessary";
    pub const BIDEP_POSITIVITY: &str = "bidep_positivity";
    pub const ONE_SIDED: &str = "one_sided";
    pub const MAJORIZATION: &str = "majorization";
    pub const COVARIANT_EA: &str = "covariant_ea";
    pub const TENSOR_STABILITY_PURITY: &str = "tensor_stability_purity";
    pub const TENSOR_STABILITY_ENTROPY: &str = "tensor_stability_entropy";
    pub const TENSOR_FACTOR: &str = "tensor_factor";
    pub const PURE_FACTOR_OUTPUT: &str = "pure_factor_output";
    pub const NONE: &str = "none";
    /// Not a criterion: runs the per-family chain of [`super::classify_channel`].
    pub const DISPATCH: &str = "dispatch";

    /// Identifiers accepted by [`super::evaluate_criterion`].
    pub const EVALUABLE: &[&str] = &[
        DISPATCH,
        BALL,
        NQUBIT_BALL,
        ANTI_BALL,
        OUTPUT_SPECTRUM,
        LOCAL_DEP_2Q_EXACT,
        LOCAL_DEP_2Q_SUFFICIENT,
        NQUBIT_DEP_NOT_AS,
        LOCAL_UNITAL,
        NQUBIT_UNITAL,
        CTIT_SUFFICIENT,
        CTIT_2N_EXACT,
        CTIT_NECESSARY,
        CTIT_NQUBIT,
        BIDEP_SUFFICIENT,
        BIDEP_NECESSARY,
        ONE_SIDED,
        COVARIANT_EA,
    ];
}

use criterion::*;

pub const FACTORIZED_INPUT: &str = "factorized pure input";
pub const MAX_ENTANGLED_INPUT: &str = "maximally entangled input";

fn bi(part: Bipartition) -> Partition {
    Partition::Bi(part)
}

fn status_as(ok: bool) -> MapStatus {
    if ok {
        MapStatus::AbsolutelySeparating
    } else {
        MapStatus::Undetermined
    }
}

fn status_not_as(violated: bool) -> MapStatus {
    if violated {
        MapStatus::NotAbsolutelySeparating
    } else {
        MapStatus::Undetermined
    }
}

fn require_upper_bound(norm: &NormEstimate) -> Result<()> {
    if norm.lower_bound_only {
        return Err(Error::Unsupported(
            "a sufficient condition needs a certified maximal output purity".into(),
        ));
    }
    Ok(())
}

fn check_qubit_params(l: &[f64; 3]) -> Result<()> {
    if l.iter().any(|x| !x.is_finite() || x.abs() > 1.0 + 1e-12) {
        return Err(Error::NotPositive(format!(
            "unital qubit map needs |λ_i| <= 1, got {l:?}"
        )));
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if !q.is_finite() || q.abs() > 1.0 + 1e-12 {
        return Err(Error::NotPositive(format!(
            "qubit depolarizing needs |q| <= 1, got {q}"
        )));
    }
    Ok(())
}

/// AS if the maximal output purity lies in the separability ball.
pub fn ball_sufficient(norm: &NormEstimate, part: Bipartition) -> Result<MapVerdict> {
    require_upper_bound(norm)?;
    let margin = 1.0 / (part.dim() as f64 - 1.0) - norm.value;
    Ok(MapVerdict::new(
        status_as(satisfied(margin)),
        BALL,
        bi(part),
        margin,
    ))
}

/// AS w.r.t. `2|...|2` if the maximal output purity lies in the N-qubit ball.
pub fn nqubit_ball_sufficient(norm: &NormEstimate, n_qubits: usize) -> Result<MapVerdict> {
    require_upper_bound(norm)?;
    let part = MultiPartition::qubits(n_qubits)?;
    if n_qubits > 30 {
        return Err(Error::OutOfRange(format!("{n_qubits} qubits")));
    }
    let margin = nqubit_ball_bound(n_qubits) - norm.value;
    Ok(MapVerdict::new(
        status_as(satisfied(margin)),
        NQUBIT_BALL,
        Partition::Multi(part),
        margin,
    ))
}

/// NotAS if some output has purity above `9/(mn+8)`. Any achieved purity
/// will do, so lower-bound estimates are accepted.
pub fn anti_ball_necessary(norm: &NormEstimate, part: Bipartition) -> Result<MapVerdict> {
    let margin = 9.0 / (part.dim() as f64 + 8.0) - norm.value;
    let violated = !satisfied(margin);
    let v = MapVerdict::new(status_not_as(violated), ANTI_BALL, bi(part), margin);
    if violated {
        part.check_dim(norm.output_spectrum.len())?;
        return Ok(v.with_witness(Evidence::spectrum(norm.output_spectrum.clone())));
    }
    Ok(v)
}

/// NotAS if a known output spectrum already fails the state criteria.
pub fn output_spectrum_necessary(s: &Spectrum, part: Bipartition) -> Result<MapVerdict> {
    let v = classify_spectrum(s, part)?;
    let violated = v.status == Status::Fails;
    let out = MapVerdict::new(status_not_as(violated), OUTPUT_SPECTRUM, bi(part), v.margin);
    Ok(if violated {
        out.with_witness(Evidence::spectrum(s.clone()))
    } else {
        out
    })
}

fn qubit_output(q: f64) -> Spectrum {
    Spectrum::raw(vec![(1.0 + q.abs()) / 2.0, (1.0 - q.abs()) / 2.0])
}

/// Exact test for `D_{q1} ⊗ D_{q2}` on `2|2`, in the form
/// `a(1+b) <= sqrt(1-a²)(1-b)` with `a = max(|q1|,|q2|)`, `b = min`.
/// The binding input is factorized.
pub fn local_dep_2q_exact(q1: f64, q2: f64) -> Result<MapVerdict> {
    check_q(q1)?;
    check_q(q2)?;
    let a = q1.abs().max(q2.abs()).min(1.0);
    let b = q1.abs().min(q2.abs());
    let margin = (1.0 - a * a).max(0.0).sqrt() * (1.0 - b) - a * (1.0 + b);
    let part = Bipartition { m: 2, n: 2 };
    if satisfied(margin) {
        return Ok(MapVerdict::new(
            MapStatus::AbsolutelySeparating,
            LOCAL_DEP_2Q_EXACT,
            bi(part),
            margin,
        ));
    }
    let s = qubit_output(q1).tensor(&qubit_output(q2));
    Ok(MapVerdict::new(
        MapStatus::NotAbsolutelySeparating,
        LOCAL_DEP_2Q_EXACT,
        bi(part),
        margin,
    )
    .with_witness(Evidence::spectrum(s).with_input(FACTORIZED_INPUT)))
}

/// Ball condition for `D_{q1} ⊗ D_{q2}`: `q1² + q2² + q1²q2² <= 1/3`.
pub fn local_dep_2q_sufficient(q1: f64, q2: f64) -> Result<MapVerdict> {
    check_q(q1)?;
    check_q(q2)?;
    let (a, b) = (q1 * q1, q2 * q2);
    let margin = 1.0 / 3.0 - (a + b + a * b);
    Ok(MapVerdict::new(
        status_as(satisfied(margin)),
        LOCAL_DEP_2Q_SUFFICIENT,
        bi(Bipartition { m: 2, n: 2 }),
        margin,
    ))
}

/// Root of `2q³ - 2q² + 3q - 1` in `[0.3, 0.5]`: the symmetric threshold of
/// the two-qubit exact test.
pub fn symmetric_dep_threshold() -> f64 {
    let f = |q: f64| 2.0 * q * q * q - 2.0 * q * q + 3.0 * q - 1.0;
    let (mut lo, mut hi) = (0.3, 0.5);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Spectrum of `D_q^{⊗N}` on a factorized pure input, for `N <= 20`.
pub fn nqubit_dep_factorized_spectrum(q: f64, n_qubits: usize) -> Option<Spectrum> {
    if n_qubits > 20 {
        return None;
    }
    let one = qubit_output(q);
    let mut acc = Spectrum::raw(vec![1.0]);
    for _ in 0..n_qubits {
        acc = acc.tensor(&one);
    }
    Some(acc)
}

/// NotAS for `D_q^{⊗N}` w.r.t. every `2^k|2^{N-k}`.
///
/// Three sufficient tests are OR-ed: the ratio test
/// `sqrt((1+|q|)/(1-|q|)) > (3+|q|)/(1+|q|)`, the simpler `|q| > 1/N`, and the
/// necessary-triple violation of the factorized output spectrum, which the
/// other two imply. The margin is the triple slack of that spectrum.
pub fn nqubit_dep_not_as(q: f64, n_qubits: usize) -> Result<MapVerdict> {
    check_q(q)?;
    if n_qubits < 2 {
        return Err(Error::InvalidPartition(format!(
            "need at least 2 qubits, got {n_qubits}"
        )));
    }
    let part = Partition::Multi(MultiPartition::qubits(n_qubits)?);
    let a = q.abs().min(1.0);
    let n = n_qubits as i32;
    let ratio = if a >= 1.0 {
        true
    } else {
        ((1.0 + a) / (1.0 - a)).sqrt() > (3.0 + a) / (1.0 + a)
    };
    let simple = a > 1.0 / n_qubits as f64;
    let (hi, lo) = ((1.0 + a) / 2.0, (1.0 - a) / 2.0);
    let margin = 2.0 * lo.powi(n - 1) * hi + lo.powi(n) - hi.powi(n);
    let factorized = !satisfied(margin);
    let which = if ratio {
        NQUBIT_DEP_RATIO
    } else if simple {
        NQUBIT_DEP_ONE_OVER_N
    } else if factorized {
        NQUBIT_DEP_FACTORIZED
    } else {
        return Ok(MapVerdict::new(
            MapStatus::Undetermined,
            NQUBIT_DEP_NOT_AS,
            part,
            margin,
        ));
    };
    let mut ev = Evidence::input(FACTORIZED_INPUT);
    if let Some(s) = nqubit_dep_factorized_spectrum(q, n_qubits) {
        ev.spectrum = Some(s);
    }
    Ok(MapVerdict::new(MapStatus::NotAbsolutelySeparating, which, part, margin).with_witness(ev))
}

fn max_sq(l: &[f64; 3]) -> f64 {
    l.iter().map(|x| x * x).fold(0.0, f64::max)
}

/// `(1 + max λ²)(1 + max λ'²) <= 4/3` for `Υ ⊗ Υ'` on `2|2`.
pub fn local_unital_sufficient(l: &[f64; 3], lp: &[f64; 3]) -> Result<MapVerdict> {
    check_qubit_params(l)?;
    check_qubit_params(lp)?;
    let margin = 4.0 / 3.0 - (1.0 + max_sq(l)) * (1.0 + max_sq(lp));
    Ok(MapVerdict::new(
        status_as(satisfied(margin)),
        LOCAL_UNITAL,
        bi(Bipartition { m: 2, n: 2 }),
        margin,
    ))
}

/// Complete positivity of a unital qubit map: `|λ1 ± λ2| <= |1 ± λ3|`.
pub fn unital_qubit_is_cp(l: &[f64; 3]) -> bool {
    let tol = 1e-12;
    (l[0] + l[1]).abs() <= (1.0 + l[2]).abs() + tol
        && (l[0] - l[1]).abs() <= (1.0 - l[2]).abs() + tol
}

/// `prod (1 + max λ²) <= 1 + (54/17) 3^{-N}` for a product of unital qubit
/// maps, w.r.t. `2|...|2`. For `N >= 3` the product form of the norm needs
/// every factor to be completely positive.
pub fn nqubit_unital_sufficient(params: &[[f64; 3]]) -> Result<MapVerdict> {
    let n = params.len();
    let part = Partition::Multi(MultiPartition::qubits(n)?);
    if n > 30 {
        return Err(Error::OutOfRange(format!("{n} qubits")));
    }
    for l in params {
        check_qubit_params(l)?;
    }
    let prod: f64 = params.iter().map(|l| 1.0 + max_sq(l)).product();
    let margin = 1.0 + 54.0 / 17.0 * 3f64.powi(-(n as i32)) - prod;
    if n >= 3 && !params.iter().all(unital_qubit_is_cp) {
        return Ok(MapVerdict::new(
            MapStatus::Undetermined,
            NQUBIT_UNITAL_REQUIRES_CP,
            part,
            margin,
        ));
    }
    Ok(MapVerdict::new(
        status_as(satisfied(margin)),
        NQUBIT_UNITAL,
        part,
        margin,
    ))
}

fn ctit_check(alpha: f64, beta: f64, d: usize) -> Result<()> {
    ChannelSpec::TraceIdTranspose { d, alpha, beta }.validate()
}

/// Stripe `-1 <= α+β <= mn/(mn-2)` and ellipse
/// `(α-β)² + (mn-3)/(mn-1) (α+β - 2/(mn-3))² <= 2(mn-2)/(mn-3)`.
/// The margin is the smallest of the three slacks.
pub fn ctit_sufficient(alpha: f64, beta: f64, part: Bipartition) -> Result<MapVerdict> {
    let d = part.dim() as f64;
    ctit_check(alpha, beta, part.dim())?;
    let s = alpha + beta;
    let stripe_lo = s + 1.0;
    let stripe_hi = d / (d - 2.0) - s;
    let c = s - 2.0 / (d - 3.0);
    let ellipse =
        2.0 * (d - 2.0) / (d - 3.0) - (alpha - beta).powi(2) - (d - 3.0) / (d - 1.0) * c * c;
    let margin = stripe_lo.min(stripe_hi).min(ellipse);
    Ok(MapVerdict::new(
        status_as(satisfied(margin)),
        CTIT_SUFFICIENT,
        bi(part),
        margin,
    ))
}

/// Exact test on `2|n`: the extremal pure-input spectrum against the
/// absolute PPT condition.
pub fn ctit_2n_exact(alpha: f64, beta: f64, n: usize) -> Result<MapVerdict> {
    let part = Bipartition::new(2, n)?;
    ctit_check(alpha, beta, part.dim())?;
    let s = ctit_extremal_spectrum(part.dim(), alpha, beta);
    let v = abs_ppt_2n(&s)?;
    Ok(if v.holds() {
        MapVerdict::new(
            MapStatus::AbsolutelySeparating,
            CTIT_2N_EXACT,
            bi(part),
            v.margin,
        )
    } else {
        MapVerdict::new(
            MapStatus::NotAbsolutelySeparating,
            CTIT_2N_EXACT,
            bi(part),
            v.margin,
        )
        .with_witness(Evidence::spectrum(s))
    })
}

/// The four parameter cases equivalent to [`ctit_2n_exact`].
pub fn ctit_2n_cases(alpha: f64, beta: f64) -> bool {
    let (a, b) = (alpha, beta);
    (a >= 0.0 && b >= 0.0 && a + b <= 2.0)
        || (a >= 0.0 && a * a - 4.0 <= 4.0 * b && b < 0.0)
        || (b >= 0.0 && b * b - 4.0 <= 4.0 * a && a < 0.0)
        || (a < 0.0 && b < 0.0 && a + b >= -1.0)
}

/// NotAS for every partition if `max(|α+β|, |α-β|) > 2`. The partition
/// only fixes the length of the witness spectrum.
pub fn ctit_necessary(alpha: f64, beta: f64, part: Bipartition) -> Result<MapVerdict> {
    ctit_check(alpha, beta, part.dim())?;
    let margin = 2.0 - (alpha + beta).abs().max((alpha - beta).abs());
    let violated = !satisfied(margin);
    let v = MapVerdict::new(status_not_as(violated), CTIT_NECESSARY, bi(part), margin);
    Ok(if violated {
        v.with_witness(Evidence::spectrum(ctit_extremal_spectrum(
            part.dim(),
            alpha,
            beta,
        )))
    } else {
        v
    })
}

/// N-qubit ball for the ctit family:
/// `2^N + 2(α+β) + |αβ| + αβ + α² + β² <= (2^N+α+β)²/2^N (1 + (54/17)3^{-N})`.
pub fn ctit_nqubit(alpha: f64, beta: f64, n_qubits: usize) -> Result<MapVerdict> {
    let part = MultiPartition::qubits(n_qubits)?;
    if n_qubits > 30 {
        return Err(Error::OutOfRange(format!("{n_qubits} qubits")));
    }
    let d = (1usize << n_qubits) as f64;
    ctit_check(alpha, beta, 1 << n_qubits)?;
    let lhs = d
        + 2.0 * (alpha + beta)
        + (alpha * beta).abs()
        + alpha * beta
        + alpha * alpha
        + beta * beta;
    let rhs = (d + alpha + beta).powi(2) / d * (1.0 + 54.0 / 17.0 * 3f64.powi(-(n_qubits as i32)));
    let margin = rhs - lhs;
    Ok(MapVerdict::new(
        status_as(satisfied(margin)),
        CTIT_NQUBIT,
        Partition::Multi(part),
        margin,
    ))
}

fn bidep_check(alpha: f64, beta: f64, gamma: f64, part: Bipartition) -> Result<()> {
    if ![alpha, beta, gamma].iter().all(|x| x.is_finite()) {
        return Err(Error::OutOfRange("non-finite parameter".into()));
    }
    let norm = bidep_norm(part.m, part.n, alpha, beta, gamma);
    if norm <= 0.0 {
        return Err(Error::NotPositive(format!(
            "bipartite depolarizing needs mn + am + bn + g > 0, got {norm}"
        )));
    }
    Ok(())
}

/// Ball condition for the bipartite depolarizing map, with the factorized
/// branch when `α²m + β²n + 2γ(α+β) >= 0` and the maximally entangled branch
/// when it is `<= 0`; the branches are OR-ed.
pub fn bipartite_dep_sufficient(
    alpha: f64,
    beta: f64,
    gamma: f64,
    part: Bipartition,
) -> Result<MapVerdict> {
    bidep_check(alpha, beta, gamma, part)?;
    let (m, n) = (part.m as f64, part.n as f64);
    let k = part.min_factor() as f64;
    let kappa = alpha * alpha * m + beta * beta * n + 2.0 * gamma * (alpha + beta);
    let rhs = (alpha * m + beta * n + gamma + 1.0).powi(2) / (m * n - 1.0);
    let fact = rhs
        - ((alpha + beta + gamma).powi(2) + alpha * alpha * (m - 1.0) + beta * beta * (n - 1.0)
            - 1.0);
    let ent = rhs - (gamma * gamma + 2.0 * alpha * beta - 1.0 + kappa / k);
    let fact_ok = kappa >= 0.0 && satisfied(fact);
    let ent_ok = kappa <= 0.0 && satisfied(ent);
    let margin = if kappa >= 0.0 { fact } else { ent };
    Ok(MapVerdict::new(
        status_as(fact_ok || ent_ok),
        BIDEP_SUFFICIENT,
        bi(part),
        margin,
    ))
}

/// The `m = n` form of the maximally entangled branch:
/// `(n²-1)|γ| <= |γ + n(α+β) + n²|`.
pub fn bidep_square_shortcut(alpha: f64, beta: f64, gamma: f64, n: usize) -> bool {
    let nf = n as f64;
    (nf * nf - 1.0) * gamma.abs() <= (gamma + nf * (alpha + beta) + nf * nf).abs()
}

/// Necessary condition: the outputs on a factorized and on a maximally
/// entangled input must be nonnegative and satisfy the triple inequality.
pub fn bipartite_dep_necessary(
    alpha: f64,
    beta: f64,
    gamma: f64,
    part: Bipartition,
) -> Result<MapVerdict> {
    bidep_check(alpha, beta, gamma, part)?;
    let norm = bidep_norm(part.m, part.n, alpha, beta, gamma);
    let (fact, ent) = bidep_extremal_weights(part.m, part.n, alpha, beta, gamma);
    let mut margin = f64::INFINITY;
    let mut first: Option<MapVerdict> = None;
    for (w, input) in [(ent, MAX_ENTANGLED_INPUT), (fact, FACTORIZED_INPUT)] {
        let s = Spectrum::raw(w.into_iter().map(|x| x / norm).collect());
        let ev = || Evidence::spectrum(s.clone()).with_input(input);
        let low = s.min();
        margin = margin.min(low);
        if !satisfied(low) {
            first.get_or_insert_with(|| {
                MapVerdict::new(
                    MapStatus::NotAbsolutelySeparating,
                    BIDEP_POSITIVITY,
                    bi(part),
                    low,
                )
                .with_witness(ev())
            });
            continue;
        }
        let t = necessary_triple(&Spectrum::state(s.values().to_vec())?)?;
        margin = margin.min(t.margin);
        if t.fails() {
            first.get_or_insert_with(|| {
                MapVerdict::new(
                    MapStatus::NotAbsolutelySeparating,
                    BIDEP_NECESSARY,
                    bi(part),
                    t.margin,
                )
                .with_witness(ev())
            });
        }
    }
    Ok(first.unwrap_or_else(|| {
        MapVerdict::new(MapStatus::Undetermined, BIDEP_NECESSARY, bi(part), margin)
    }))
}

/// `Φ ⊗ Id_n` is never AS: on `ρ1 ⊗ |ψ><ψ|` the output has at least
/// `m(n-1)` zero eigenvalues. The witness spectrum takes `Φ[ρ1] = I/m`.
pub fn one_sided_not_as(inner_dim: usize, id_dim: usize) -> Result<MapVerdict> {
    let part = Bipartition::new(inner_dim, id_dim)?;
    let s = Spectrum::uniform(inner_dim).tensor(&Spectrum::pure(id_dim));
    let v = classify_spectrum(&s, part)?;
    debug_assert!(v.fails());
    Ok(MapVerdict::new(
        MapStatus::NotAbsolutelySeparating,
        ONE_SIDED,
        bi(part),
        v.margin,
    )
    .with_witness(Evidence::spectrum(s).with_input("rho1 ⊗ |psi><psi| on A ⊗ B")))
}

/// AS is preserved by post-composing with a unital map: its outputs are
/// majorized by its inputs.
pub fn unital_concat_preserves(v: &MapVerdict, outer_is_unital: bool) -> MapVerdict {
    let ok = v.is_as() && outer_is_unital;
    MapVerdict::new(status_as(ok), MAJORIZATION, v.partition.clone(), v.margin)
}

/// Exact for the global depolarizing map on `m|n`: AS iff `q <= 2/(mn+2)`.
pub fn covariant_ea_equivalence(c: &ChannelSpec, part: Bipartition) -> Result<MapVerdict> {
    let ChannelSpec::Depolarizing { d, q } = c else {
        return Err(Error::Unsupported(format!(
            "covariant test needs a global depolarizing map, got {}",
            c.family()
        )));
    };
    c.validate()?;
    part.check_dim(*d)?;
    let margin = 2.0 / (part.dim() as f64 + 2.0) - q;
    if satisfied(margin) {
        return Ok(MapVerdict::new(
            MapStatus::AbsolutelySeparating,
            COVARIANT_EA,
            bi(part),
            margin,
        ));
    }
    // Isotropic output on the maximally entangled input.
    let dd = *d as f64;
    let mut v = vec![(1.0 - q) / dd; *d];
    v[0] += q;
    Ok(MapVerdict::new(
        MapStatus::NotAbsolutelySeparating,
        COVARIANT_EA,
        bi(part),
        margin,
    )
    .with_witness(
        Evidence::spectrum(Spectrum::raw(v))
            .with_input(format!("{MAX_ENTANGLED_INPUT}, identity unitary")),
    ))
}

/// Input for [`tensor_stability_bound`]: a purity lower bound or an entropy
/// upper bound, both valid in the refuting direction.
#[derive(Debug, Clone)]
pub enum StabilityInput {
    Purity(NormEstimate),
    Entropy(EntropyEstimate),
}

const TRACING_TOL: f64 = 1e-12;

/// Smallest `N` for which `Φ^{⊗N}` is certified NotAS, if any.
///
/// Purity: `N > 8/(d p - 1) + 1`. Entropy: `N > 8((log d + 1)/(log d - h))² + 1`.
/// Values at the tracing map (`p = 1/d`, `h = log d`) never trigger.
pub fn tensor_stability_threshold(input: &StabilityInput, d: usize) -> Option<u64> {
    let df = d as f64;
    let bound = match input {
        StabilityInput::Purity(n) => {
            let gap = df * n.value - 1.0;
            if gap <= TRACING_TOL {
                return None;
            }
            8.0 / gap + 1.0
        }
        StabilityInput::Entropy(e) => {
            let gap = df.ln() - e.value;
            if gap <= TRACING_TOL {
                return None;
            }
            8.0 * ((df.ln() + 1.0) / gap).powi(2) + 1.0
        }
    };
    if !bound.is_finite() || bound >= u64::MAX as f64 {
        return None;
    }
    Some(bound.floor() as u64 + 1)
}

/// NotAS for `Φ^{⊗N}` w.r.t. some bipartition of `d^N` if `N` exceeds the
/// bound.
pub fn tensor_stability_bound(input: &StabilityInput, d: usize, n: u64) -> Result<MapVerdict> {
    if d < 2 || n == 0 {
        return Err(Error::OutOfRange(format!(
            "need d >= 2 and N >= 1, got d={d}, N={n}"
        )));
    }
    let part = Partition::Multi(MultiPartition {
        dims: vec![d; n as usize],
    });
    let crit = match input {
        StabilityInput::Purity(_) => TENSOR_STABILITY_PURITY,
        StabilityInput::Entropy(_) => TENSOR_STABILITY_ENTROPY,
    };
    let threshold = tensor_stability_threshold(input, d);
    let margin = match threshold {
        Some(t) => t as f64 - 1.0 - n as f64,
        None => f64::INFINITY,
    };
    match threshold {
        Some(t) if n >= t => {
            Ok(
                MapVerdict::new(MapStatus::NotAbsolutelySeparating, crit, part, margin)
                    .with_witness(Evidence::input(format!(
                        "tensor power of a single output-extremal input, N = {n}"
                    ))),
            )
        }
        _ => Ok(MapVerdict::new(MapStatus::Undetermined, crit, part, margin)),
    }
}

/// AS of `Φ1 ⊗ Φ2` w.r.t. `m1m2|n1n2` passes to each factor. Nothing is
/// inferred otherwise.
pub fn tensor_factor_necessary(
    v: &MapVerdict,
    p1: Bipartition,
    p2: Bipartition,
) -> (MapVerdict, MapVerdict) {
    let status = status_as(v.is_as());
    (
        MapVerdict::new(status, TENSOR_FACTOR, bi(p1), v.margin),
        MapVerdict::new(status, TENSOR_FACTOR, bi(p2), v.margin),
    )
}

/// Run the strongest applicable criteria for the family: exact tests first,
/// then sufficient, then necessary. The returned verdict names the deciding
/// criterion.
pub fn classify_channel(c: &ChannelSpec, partition: &Partition) -> Result<MapVerdict> {
    c.validate()?;
    if partition.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: partition.dim(),
        });
    }
    match partition {
        Partition::Bi(part) => classify_bi(c, *part),
        Partition::Multi(mp) => classify_multi(c, mp),
    }
}

fn not_applicable(id: &str, c: &ChannelSpec, partition: &Partition) -> Error {
    Error::Unsupported(format!(
        "criterion {id} does not apply to {} on {partition}",
        c.family()
    ))
}

/// Runs a single named criterion. Criteria tied to a family read their
/// parameters from `c` and reject other families.
pub fn evaluate_criterion(id: &str, c: &ChannelSpec, partition: &Partition) -> Result<MapVerdict> {
    c.validate()?;
    if partition.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: partition.dim(),
        });
    }
    let na = || not_applicable(id, c, partition);
    let bipart = partition.as_bipartition();
    let qubits = match partition {
        Partition::Multi(mp) => mp.qubit_count(),
        Partition::Bi(_) => None,
    };
    let two_qubit_factors = || match c {
        ChannelSpec::LocalProduct { factors } if factors.len() == 2 => Some((
            qubit_factor_params(&factors[0])?,
            qubit_factor_params(&factors[1])?,
        )),
        _ => None,
    };
    let with_partition = |v: MapVerdict| MapVerdict {
        partition: partition.clone(),
        ..v
    };
    match id {
        DISPATCH => classify_channel(c, partition),
        BALL => ball_sufficient(&max_output_purity(c)?, bipart.ok_or_else(na)?),
        NQUBIT_BALL => nqubit_ball_sufficient(&max_output_purity(c)?, qubits.ok_or_else(na)?),
        ANTI_BALL => anti_ball_necessary(&max_output_purity(c)?, bipart.ok_or_else(na)?),
        OUTPUT_SPECTRUM => output_spectrum_necessary(
            &max_output_purity(c)?.output_spectrum,
            bipart.ok_or_else(na)?,
        ),
        LOCAL_DEP_2Q_EXACT | LOCAL_DEP_2Q_SUFFICIENT => {
            let p = bipart.filter(|p| p.m == 2 && p.n == 2).ok_or_else(na)?;
            let (l, lp) = two_qubit_factors().ok_or_else(na)?;
            if l[0] != l[1] || l[1] != l[2] || lp[0] != lp[1] || lp[1] != lp[2] {
                return Err(na());
            }
            let v = if id == LOCAL_DEP_2Q_EXACT {
                local_dep_2q_exact(l[0], lp[0])?
            } else {
                local_dep_2q_sufficient(l[0], lp[0])?
            };
            Ok(with_partition(MapVerdict {
                partition: bi(p),
                ..v
            }))
        }
        LOCAL_UNITAL => {
            bipart.filter(|p| p.m == 2 && p.n == 2).ok_or_else(na)?;
            let (l, lp) = two_qubit_factors().ok_or_else(na)?;
            Ok(with_partition(local_unital_sufficient(&l, &lp)?))
        }
        NQUBIT_UNITAL | NQUBIT_DEP_NOT_AS => {
            let n = qubits.ok_or_else(na)?;
            let ChannelSpec::LocalProduct { factors } = c else {
                return Err(na());
            };
            if factors.len() != n {
                return Err(na());
            }
            let params: Vec<[f64; 3]> = factors
                .iter()
                .map(qubit_factor_params)
                .collect::<Option<_>>()
                .ok_or_else(na)?;
            if id == NQUBIT_UNITAL {
                return nqubit_unital_sufficient(&params);
            }
            let q = params[0][0];
            if params.iter().any(|l| l.iter().any(|x| *x != q)) {
                return Err(na());
            }
            nqubit_dep_not_as(q, n)
        }
        CTIT_SUFFICIENT | CTIT_2N_EXACT | CTIT_NECESSARY | CTIT_NQUBIT => {
            let ChannelSpec::TraceIdTranspose { alpha, beta, .. } = c else {
                return Err(na());
            };
            match id {
                CTIT_NQUBIT => ctit_nqubit(*alpha, *beta, qubits.ok_or_else(na)?),
                CTIT_2N_EXACT => {
                    let p = bipart.filter(|p| p.m == 2 || p.n == 2).ok_or_else(na)?;
                    Ok(with_partition(ctit_2n_exact(*alpha, *beta, p.dim() / 2)?))
                }
                CTIT_SUFFICIENT => ctit_sufficient(*alpha, *beta, bipart.ok_or_else(na)?),
                _ => ctit_necessary(*alpha, *beta, bipart.ok_or_else(na)?),
            }
        }
        BIDEP_SUFFICIENT | BIDEP_NECESSARY => {
            let ChannelSpec::BipartiteDepolarizing {
                m,
                n,
                alpha,
                beta,
                gamma,
            } = c
            else {
                return Err(na());
            };
            let p = bipart.filter(|p| p.m == *m && p.n == *n).ok_or_else(na)?;
            if id == BIDEP_SUFFICIENT {
                bipartite_dep_sufficient(*alpha, *beta, *gamma, p)
            } else {
                bipartite_dep_necessary(*alpha, *beta, *gamma, p)
            }
        }
        ONE_SIDED => {
            let ChannelSpec::OneSided { inner, id_dim } = c else {
                return Err(na());
            };
            let p = bipart.ok_or_else(na)?;
            Ok(MapVerdict {
                partition: bi(p),
                ..one_sided_not_as(inner.dim(), *id_dim)?
            })
        }
        COVARIANT_EA => covariant_ea_equivalence(c, bipart.ok_or_else(na)?),
        _ => Err(Error::Unsupported(format!("unknown criterion {id}"))),
    }
}

fn qubit_factor_params(f: &ChannelSpec) -> Option<[f64; 3]> {
    match f {
        ChannelSpec::Depolarizing { d: 2, q } => Some([*q; 3]),
        ChannelSpec::UnitalQubit { l1, l2, l3 } => Some([*l1, *l2, *l3]),
        _ => None,
    }
}

fn pick(verdicts: Vec<MapVerdict>, fallback: MapVerdict) -> MapVerdict {
    verdicts
        .into_iter()
        .find(|v| !v.is_undetermined())
        .unwrap_or(fallback)
}

fn classify_bi(c: &ChannelSpec, part: Bipartition) -> Result<MapVerdict> {
    match c {
        ChannelSpec::Depolarizing { .. } => return covariant_ea_equivalence(c, part),
        ChannelSpec::OneSided { inner, id_dim } => {
            return one_sided_not_as(inner.dim(), *id_dim).map(|v| MapVerdict {
                partition: bi(part),
                ..v
            });
        }
        ChannelSpec::TraceIdTranspose { alpha, beta, .. } => {
            if part.m == 2 || part.n == 2 {
                return ctit_2n_exact(*alpha, *beta, part.dim() / 2).map(|v| MapVerdict {
                    partition: bi(part),
                    ..v
                });
            }
            let first = ctit_sufficient(*alpha, *beta, part)?;
            if first.is_as() {
                return Ok(first);
            }
            let nec = ctit_necessary(*alpha, *beta, part)?;
            if nec.is_not_as() {
                return Ok(nec);
            }
        }
        ChannelSpec::BipartiteDepolarizing {
            m,
            n,
            alpha,
            beta,
            gamma,
        } if *m == part.m && *n == part.n => {
            let suf = bipartite_dep_sufficient(*alpha, *beta, *gamma, part)?;
            if suf.is_as() {
                return Ok(suf);
            }
            let nec = bipartite_dep_necessary(*alpha, *beta, *gamma, part)?;
            if nec.is_not_as() {
                return Ok(nec);
            }
        }
        ChannelSpec::LocalProduct { factors }
            if factors.len() == 2 && part.m == factors[0].dim() =>
        {
            if let (
                ChannelSpec::Depolarizing { d: 2, q: q1 },
                ChannelSpec::Depolarizing { d: 2, q: q2 },
            ) = (&factors[0], &factors[1])
            {
                return local_dep_2q_exact(*q1, *q2);
            }
            if let (Some(l), Some(lp)) = (
                qubit_factor_params(&factors[0]),
                qubit_factor_params(&factors[1]),
            ) {
                let v = local_unital_sufficient(&l, &lp)?;
                if v.is_as() {
                    return Ok(v);
                }
            }
            // A factor with a pure output makes a product output with
            // too many zero eigenvalues.
            for (i, f) in factors.iter().enumerate() {
                let norm = max_output_purity(f)?;
                if !norm.lower_bound_only && (norm.value - 1.0).abs() < 1e-12 {
                    let other = &factors[1 - i];
                    let s = if i == 0 {
                        Spectrum::pure(f.dim()).tensor(&Spectrum::uniform(other.dim()))
                    } else {
                        Spectrum::uniform(other.dim()).tensor(&Spectrum::pure(f.dim()))
                    };
                    let sv = classify_spectrum(&s, part)?;
                    if sv.fails() {
                        return Ok(MapVerdict::new(
                            MapStatus::NotAbsolutelySeparating,
                            PURE_FACTOR_OUTPUT,
                            bi(part),
                            sv.margin,
                        )
                        .with_witness(Evidence::spectrum(s).with_input(FACTORIZED_INPUT)));
                    }
                }
            }
        }
        _ => {}
    }
    generic_bi(c, part)
}

fn generic_bi(c: &ChannelSpec, part: Bipartition) -> Result<MapVerdict> {
    let norm = max_output_purity(c)?;
    let mut verdicts = Vec::new();
    if !norm.lower_bound_only {
        verdicts.push(ball_sufficient(&norm, part)?);
    }
    verdicts.push(anti_ball_necessary(&norm, part)?);
    let out = output_spectrum_necessary(&norm.output_spectrum, part)?;
    let fallback = MapVerdict::new(MapStatus::Undetermined, NONE, bi(part), out.margin);
    verdicts.push(out);
    Ok(pick(verdicts, fallback))
}

fn classify_multi(c: &ChannelSpec, mp: &MultiPartition) -> Result<MapVerdict> {
    let part = Partition::Multi(mp.clone());
    let Some(n_qubits) = mp.qubit_count() else {
        return Ok(MapVerdict::new(
            MapStatus::Undetermined,
            NONE,
            part,
            f64::NAN,
        ));
    };
    let mut verdicts = Vec::new();
    match c {
        ChannelSpec::LocalProduct { factors } if factors.len() == n_qubits => {
            let params: Option<Vec<[f64; 3]>> = factors.iter().map(qubit_factor_params).collect();
            if let Some(params) = params {
                verdicts.push(nqubit_unital_sufficient(&params)?);
                let qs: Vec<f64> = factors
                    .iter()
                    .filter_map(|f| match f {
                        ChannelSpec::Depolarizing { q, .. } => Some(*q),
                        _ => None,
                    })
                    .collect();
                if qs.len() == n_qubits && qs.iter().all(|q| *q == qs[0]) {
                    verdicts.push(nqubit_dep_not_as(qs[0], n_qubits)?);
                }
            }
        }
        ChannelSpec::TraceIdTranspose { alpha, beta, .. } => {
            verdicts.push(ctit_nqubit(*alpha, *beta, n_qubits)?);
        }
        _ => {}
    }
    let norm = max_output_purity(c)?;
    if norm.method == Method::ClosedForm {
        verdicts.push(nqubit_ball_sufficient(&norm, n_qubits)?);
    }
    // Full separability implies separability for the coarse split 2|2^{N-1}.
    let coarse = Bipartition::new(2, 1 << (n_qubits - 1))?;
    for v in [
        anti_ball_necessary(&norm, coarse)?,
        output_spectrum_necessary(&norm.output_spectrum, coarse)?,
    ] {
        verdicts.push(MapVerdict {
            partition: part.clone(),
            ..v
        });
    }
    let margin = verdicts.first().map_or(f64::NAN, |v| v.margin);
    Ok(pick(
        verdicts,
        MapVerdict::new(MapStatus::Undetermined, NONE, part, margin),
    ))
}
