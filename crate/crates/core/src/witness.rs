//! Explicit refutations: an input state and a global unitary whose rotated
//! channel output has a negative partial transpose.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::linalg::{
    c, eigenvalues, expi_hermitian, haar_unitary_rng, hermitian_eigen, max_entangled_vector,
    partial_trace, partial_transpose, random_hermitian, random_pure_state, seeded_rng,
    subsystem_permutation, tensor, tensor_vec, Matrix, Subsystem, Unitary, C64,
};
use crate::partition::Bipartition;

/// A partial-transpose eigenvalue below this certifies entanglement.
pub const NEGATIVITY_TOL: f64 = 1e-9;
pub const REFINE_STEPS: usize = 200;
const REFINE_EPS: f64 = 0.1;
/// Stream reserved for the refinement phase of the random search.
const REFINE_STREAM: u64 = u64::MAX;

pub const RANDOM_PURE: &str = "random_pure";
pub const FACTORIZED_PURE: &str = "factorized_pure";
pub const MAX_ENTANGLED: &str = "maximally_entangled";

#[derive(Debug, Clone)]
pub struct Witness {
    pub channel: ChannelSpec,
    /// Short description of how the input was built.
    pub input: String,
    pub input_state: Matrix,
    pub unitary: Unitary,
    pub partition: Bipartition,
    /// Smallest eigenvalue of the partial transpose of `U Φ[ρ] U†`.
    pub negativity: f64,
    /// Value before local refinement; equal to `negativity` for the
    /// closed-form constructions.
    pub unrefined_negativity: f64,
    /// Index of the search trial the witness came from.
    pub trial: Option<usize>,
}

impl Witness {
    /// Recomputes the negativity from scratch.
    pub fn recompute(&self) -> Result<f64> {
        let out = self.channel.apply(&self.input_state)?;
        ppt_negativity(&self.unitary.conjugate(&out), self.partition)
    }

    /// The recomputed negativity matches the stored one within `tol` and is
    /// below the certification threshold.
    pub fn verify(&self, tol: f64) -> Result<bool> {
        let n = self.recompute()?;
        Ok((n - self.negativity).abs() <= tol && n < -NEGATIVITY_TOL)
    }
}

/// Smallest eigenvalue of `ρ^{Γ_B}`.
pub fn ppt_negativity(rho: &Matrix, part: Bipartition) -> Result<f64> {
    let pt = partial_transpose(rho, part)?;
    let ev = eigenvalues(&pt.hermitian_part())?;
    Ok(*ev.last().expect("nonempty spectrum"))
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = seeded_rng(seed);
    rng.set_stream(stream);
    rng
}

/// Input candidate for trial `t`: cycles through maximally entangled,
/// factorized pure and Haar-random pure inputs.
fn candidate_input(t: usize, part: Bipartition, rng: &mut ChaCha8Rng) -> (&'static str, Vec<C64>) {
    match t % 3 {
        0 => (MAX_ENTANGLED, max_entangled_vector(part)),
        1 => {
            let a = random_pure_state(part.m, rng);
            let b = random_pure_state(part.n, rng);
            (FACTORIZED_PURE, tensor_vec(&a, &b))
        }
        _ => (RANDOM_PURE, random_pure_state(part.dim(), rng)),
    }
}

struct Trial {
    recipe: &'static str,
    input: Matrix,
    output: Matrix,
    unitary: Unitary,
    negativity: f64,
}

/// Randomized search for a witness of non-absolute-separation.
///
/// Trial `t` draws from ChaCha stream `t` of `seed`. Trial 0 pairs the
/// maximally entangled input with the identity; every other trial uses a
/// Haar unitary. The best violating trial (ties to the lowest index) is
/// refined by keep-if-better steps `U <- exp(iεH) U`, halving `ε` on
/// every rejection. `None` means nothing was found, not that the map is
/// absolutely separating.
pub fn random_unitary_witness(
    c: &ChannelSpec,
    part: Bipartition,
    trials: usize,
    seed: u64,
) -> Result<Option<Witness>> {
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    c.validate()?;
    part.check_dim(c.dim())?;
    let d = part.dim();

    let results: Vec<Result<Trial>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let (recipe, psi) = candidate_input(t, part, &mut rng);
            let input = Matrix::projector(&psi);
            let output = c.apply(&input)?;
            let unitary = if t == 0 {
                Unitary::identity(d)
            } else {
                haar_unitary_rng(d, &mut rng)
            };
            let negativity = ppt_negativity(&unitary.conjugate(&output), part)?;
            Ok(Trial {
                recipe,
                input,
                output,
                unitary,
                negativity,
            })
        })
        .collect();

    let mut best: Option<(usize, Trial)> = None;
    for (t, r) in results.into_iter().enumerate() {
        let trial = r?;
        if best
            .as_ref()
            .map_or(true, |(_, b)| trial.negativity < b.negativity)
        {
            best = Some((t, trial));
        }
    }
    let (index, best) = best.expect("at least one trial");
    if best.negativity >= -NEGATIVITY_TOL {
        return Ok(None);
    }

    let unrefined = best.negativity;
    let (unitary, negativity) = refine(&best.output, best.unitary, unrefined, part, seed)?;
    Ok(Some(Witness {
        channel: c.clone(),
        input: best.recipe.to_string(),
        input_state: best.input,
        unitary,
        partition: part,
        negativity,
        unrefined_negativity: unrefined,
        trial: Some(index),
    }))
}

fn refine(
    output: &Matrix,
    mut u: Unitary,
    mut value: f64,
    part: Bipartition,
    seed: u64,
) -> Result<(Unitary, f64)> {
    let mut rng = trial_rng(seed, REFINE_STREAM);
    let mut eps = REFINE_EPS;
    for _ in 0..REFINE_STEPS {
        let h = random_hermitian(part.dim(), &mut rng);
        let step = expi_hermitian(&h, eps)?;
        let cand = step.compose(&u);
        let v = ppt_negativity(&cand.conjugate(output), part)?;
        if v < value {
            u = cand;
            value = v;
        } else {
            eps *= 0.5;
        }
    }
    Ok((u, value))
}

/// The two-copy construction: `D_{1/3} ⊗ D_{1/3}` with each factor a
/// global depolarizing map on two qubits, input a Bell pair per factor.
/// Qubits are reordered so that the first qubit of each pair forms `A`,
/// then a single 2×2 block `(Z + Y)/√2` on basis states 7 and 8 rotates
/// the output.
pub fn example5_witness() -> Result<Witness> {
    let u = example5_block_unitary()?;
    let w = example5_with(u.compose(&example5_permutation()?))?;
    Ok(w)
}

/// Same pipeline with only the qubit reordering, no rotation.
pub fn example5_unrotated() -> Result<Witness> {
    example5_with(example5_permutation()?)
}

fn example5_permutation() -> Result<Unitary> {
    subsystem_permutation(&[2, 2, 2, 2], &[0, 2, 1, 3])
}

fn example5_block_unitary() -> Result<Unitary> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = Matrix::identity(16);
    u[(7, 7)] = c(s, 0.0);
    u[(7, 8)] = c(0.0, -s);
    u[(8, 7)] = c(0.0, s);
    u[(8, 8)] = c(-s, 0.0);
    Unitary::new(u)
}

fn example5_with(unitary: Unitary) -> Result<Witness> {
    let dep = ChannelSpec::Depolarizing { d: 4, q: 1.0 / 3.0 };
    let channel = ChannelSpec::LocalProduct {
        factors: vec![dep.clone(), dep],
    };
    let bell = Matrix::projector(&max_entangled_vector(Bipartition::new(2, 2)?));
    let input_state = tensor(&bell, &bell);
    let partition = Bipartition::new(4, 4)?;
    let out = channel.apply(&input_state)?;
    let negativity = ppt_negativity(&unitary.conjugate(&out), partition)?;
    Ok(Witness {
        channel,
        input: "bell_pair_per_factor".into(),
        input_state,
        unitary,
        partition,
        negativity,
        unrefined_negativity: negativity,
        trial: None,
    })
}

/// `q²(λ1 − λ2)² − [1 + q(2λ1 − 1)][1 + q(2λ2 − 1)]`; positive when
/// `D_0 ⊗ D_q` on an input with reduced spectrum `(λ1, λ2)` can be rotated
/// into an entangled state.
pub fn recovery_requirement(q2: f64, l1: f64, l2: f64) -> f64 {
    q2 * q2 * (l1 - l2).powi(2) - (1.0 + q2 * (2.0 * l1 - 1.0)) * (1.0 + q2 * (2.0 * l2 - 1.0))
}

/// Entanglement recovery for `D_0 ⊗ D_{q2}` on two qubits.
///
/// With `ψ1, ψ2` the eigenvectors of `tr_A ρ`, the unitary fixes
/// `|ψ1ψ1>` and `|ψ2ψ2>` and mixes `|ψ1ψ2>, |ψ2ψ1>` through
/// `(1/√2)[[e^{iπ/4}, e^{-iπ/4}], [e^{-iπ/4}, e^{iπ/4}]]`.
pub fn recovery_witness_one_sided(q2: f64, rho: &Matrix) -> Result<Option<Witness>> {
    let part = Bipartition::new(2, 2)?;
    part.check_dim(rho.dim())?;
    if !rho.is_square() {
        return Err(Error::NotSquare {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    let channel = ChannelSpec::LocalProduct {
        factors: vec![
            ChannelSpec::Depolarizing { d: 2, q: 0.0 },
            ChannelSpec::Depolarizing { d: 2, q: q2 },
        ],
    };
    channel.validate()?;
    rho.check_hermitian()?;

    let red = partial_trace(rho, part, Subsystem::A)?;
    let e = hermitian_eigen(&red)?;
    let (l1, l2) = (e.values[0], e.values[1]);
    if recovery_requirement(q2, l1, l2) <= 0.0 {
        return Ok(None);
    }
    let psi = [e.vectors.column(0), e.vectors.column(1)];
    let ket = |a: usize, b: usize| tensor_vec(&psi[a], &psi[b]);
    let outer = |x: &[C64], y: &[C64]| Matrix::from_fn(4, 4, |i, j| x[i] * y[j].conj());

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = C64::from_polar(s, std::f64::consts::FRAC_PI_4);
    let minus = plus.conj();
    let (k11, k12, k21, k22) = (ket(0, 0), ket(0, 1), ket(1, 0), ket(1, 1));
    let u = &(&(&outer(&k11, &k11) + &outer(&k22, &k22))
        + &(&outer(&k12, &k12) + &outer(&k21, &k21)).scale(plus))
        + &(&outer(&k12, &k21) + &outer(&k21, &k12)).scale(minus);
    let unitary = Unitary::new(u)?;

    let out = channel.apply(rho)?;
    let negativity = ppt_negativity(&unitary.conjugate(&out), part)?;
    if negativity >= -NEGATIVITY_TOL {
        return Ok(None);
    }
    Ok(Some(Witness {
        channel,
        input: "given_state".into(),
        input_state: rho.clone(),
        unitary,
        partition: part,
        negativity,
        unrefined_negativity: negativity,
        trial: None,
    }))
}

#[cfg(test)]
mod tests;
