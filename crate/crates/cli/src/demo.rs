//! Reproduces the reference numbers of the theory as a pass/fail table.

use absep::channel::{is_completely_positive, max_output_purity};
use absep::classify::*;
use absep::linalg::{seeded_rng, tensor, Matrix};
use absep::state::*;
use absep::witness::{
    example5_unrotated, example5_witness, random_unitary_witness, recovery_witness_one_sided,
};
use absep::{Bipartition, ChannelSpec, MapStatus, MapVerdict, Partition, Result, Spectrum};

use crate::{usage, CliResult};

pub struct Check {
    pub id: &'static str,
    pub about: &'static str,
    run: fn() -> Result<(bool, String)>,
}

pub struct Outcome {
    pub id: &'static str,
    pub about: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn bp(m: usize, n: usize) -> Bipartition {
    Bipartition::new(m, n).expect("valid partition")
}

fn dep(d: usize, q: f64) -> ChannelSpec {
    ChannelSpec::Depolarizing { d, q }
}

fn ghz() -> Result<(bool, String)> {
    let s = Spectrum::state(ghz_example_weights().to_vec())?;
    let v = abs_ppt_2n(&s)?;
    let rho = ghz_diagonal_state(&ghz_example_weights())?;
    let cls = classify_state(&rho, bp(2, 4))?;
    let ok = v.holds() && v.margin.abs() <= 1e-12 && cls.holds();
    Ok((
        ok,
        format!("margin {:.1e}, state {:?}", v.margin, cls.status),
    ))
}

fn ball_boundary() -> Result<(bool, String)> {
    let mut ok = true;
    for (m, n) in [(2, 2), (2, 3), (3, 3)] {
        let d = m * n;
        // Purity exactly 1/(mn-1): one eigenvalue 1/d + x, the rest equal.
        let df = d as f64;
        let target = 1.0 / (df - 1.0);
        let x = ((target - 1.0 / df) * (df - 1.0) / df).sqrt();
        let mut v = vec![1.0 / df - x / (df - 1.0); d];
        v[0] = 1.0 / df + x;
        let s = Spectrum::state(v)?;
        ok &= (s.purity() - 1.0 / (d as f64 - 1.0)).abs() < 1e-12;
        ok &= separable_ball(&s, bp(m, n))?.holds();
    }
    Ok((ok, "purity 1/(mn-1) holds for 2x2, 2x3, 3x3".into()))
}

fn purity_two_qubits() -> Result<(bool, String)> {
    let p = bp(2, 2);
    let bound = (3f64.sqrt() - 1.0).powi(2);
    let ok = purity_necessary(0.55, p)?.fails()
        && purity_necessary(0.537, p)?.fails()
        && !purity_necessary(0.535, p)?.fails();
    Ok((ok, format!("(√3-1)² = {bound:.6}")))
}

fn purity_simple() -> Result<(bool, String)> {
    let mut ok = true;
    for (m, n) in [(2, 2), (2, 3), (3, 4), (4, 4)] {
        let mu = 9.0 / ((m * n) as f64 + 8.0) + 1e-3;
        ok &= purity_necessary_simple(mu, bp(m, n))?.fails();
    }
    Ok((ok, "9/(mn+8) + 1e-3 fails".into()))
}

fn depolarizing_cp() -> Result<(bool, String)> {
    let mut ok = true;
    for d in [2usize, 3, 4] {
        let edge = -1.0 / ((d * d) as f64 - 1.0);
        ok &= is_completely_positive(&dep(d, edge))?.holds();
        ok &= is_completely_positive(&dep(d, 1.0))?.holds();
        ok &= is_completely_positive(&dep(d, edge - 1e-3))?.fails();
    }
    Ok((ok, "CP iff q in [-1/(d²-1), 1]".into()))
}

fn ctit_cp() -> Result<(bool, String)> {
    let mut ok = true;
    let d = 3;
    for i in 0..=20 {
        for j in 0..=20 {
            let alpha = -1.0 / d as f64 + 0.2 * i as f64;
            let lo = -(1.0 + d as f64 * alpha);
            let beta = lo + (1.0 - lo) * j as f64 / 20.0;
            let c = ChannelSpec::TraceIdTranspose { d, alpha, beta };
            if c.validate().is_ok() {
                ok &= is_completely_positive(&c)?.holds();
            }
        }
    }
    Ok((ok, "stated region is CP".into()))
}

fn gp_purity() -> Result<(bool, String)> {
    let d = 5;
    let (s, t) = (0.1, vec![0.5, 0.1, 0.1, 0.1, 0.05, 0.05]);
    let c = ChannelSpec::GeneralizedPauli { d, s, t: t.clone() };
    let want = t
        .iter()
        .map(|tj| (1.0 + (d as f64 - 1.0) * (s + tj).powi(2)) / d as f64)
        .fold(f64::MIN, f64::max);
    let got = max_output_purity(&c)?.value;
    Ok(((got - want).abs() < 1e-12, format!("{got:.6} vs {want:.6}")))
}

fn gp_ball() -> Result<(bool, String)> {
    let c = ChannelSpec::GeneralizedPauli {
        d: 6,
        s: -0.1,
        t: vec![1.1 / 7.0; 7],
    };
    let v = classify_channel(&c, &Partition::Bi(bp(2, 3)))?;
    Ok((v.is_as(), format!("{} via {}", label(&v), v.criterion)))
}

fn nqubit_dep_ball() -> Result<(bool, String)> {
    let mut ok = true;
    for n in 3..=8usize {
        let q = 21.0 * 2f64.sqrt() / (17.0 * ((n as f64) * 3f64.powi(n as i32)).sqrt());
        let c = ChannelSpec::LocalProduct {
            factors: vec![dep(2, q); n],
        };
        ok &= nqubit_ball_sufficient(&max_output_purity(&c)?, n)?.is_as();
    }
    Ok((ok, "21√2/(17√(N3^N)) is AS for N = 3..8".into()))
}

fn threshold() -> Result<(bool, String)> {
    let q = symmetric_dep_threshold();
    let ok = (q - 0.3966).abs() < 5e-5
        && local_dep_2q_exact(q - 1e-6, q - 1e-6)?.is_as()
        && local_dep_2q_exact(q + 1e-6, q + 1e-6)?.is_not_as();
    Ok((ok, format!("q* = {q:.6}")))
}

fn contact_points() -> Result<(bool, String)> {
    let (a, b) = (1.0 / 5f64.sqrt(), 1.0 / 3.0);
    let mut worst: f64 = 0.0;
    for (x, y) in [(a, b), (b, a), (-a, b), (a, -b), (-a, -b), (-b, a)] {
        worst = worst
            .max(local_dep_2q_exact(x, y)?.margin.abs())
            .max(local_dep_2q_sufficient(x, y)?.margin.abs());
    }
    Ok((worst < 1e-12, format!("max |margin| {worst:.1e}")))
}

fn one_sided_qubit() -> Result<(bool, String)> {
    let v = local_dep_2q_exact(0.0, 0.8)?;
    let inside = local_dep_2q_exact(0.0, 0.7)?;
    Ok((
        v.is_not_as() && inside.is_as(),
        "D_0 ⊗ D_0.8 NotAS, D_0 ⊗ D_0.7 AS".into(),
    ))
}

fn sufficient_gap() -> Result<(bool, String)> {
    let ok = local_dep_2q_sufficient(0.39, 0.39)?.is_as()
        && local_dep_2q_sufficient(0.395, 0.395)?.is_undetermined()
        && local_dep_2q_exact(0.395, 0.395)?.is_as();
    Ok((ok, "0.39 AS, 0.395 only by the exact test".into()))
}

fn one_over_n() -> Result<(bool, String)> {
    let mut ok = true;
    for n in 2..=8usize {
        ok &= nqubit_dep_not_as(1.0 / n as f64 + 1e-3, n)?.is_not_as();
    }
    Ok((ok, "|q| > 1/N is NotAS for N = 2..8".into()))
}

fn local_unital() -> Result<(bool, String)> {
    let l = (2.0 / 3f64.sqrt() - 1.0).sqrt();
    let v = local_unital_sufficient(&[l, -l, 0.3], &[l, -l, 0.3])?;
    Ok((v.is_as(), format!("margin {:.1e}", v.margin)))
}

fn ctit_beta_zero() -> Result<(bool, String)> {
    let mut ok = true;
    for (m, n) in [(2, 2), (2, 3), (3, 3)] {
        let d = (m * n) as f64;
        let top = d / (d - 2.0);
        ok &= ctit_sufficient(-1.0, 0.0, bp(m, n))?.is_as();
        ok &= ctit_sufficient(top, 0.0, bp(m, n))?.is_as();
        ok &= !ctit_sufficient(top + 1e-6, 0.0, bp(m, n))?.is_as();
    }
    Ok((ok, "AS for -1 <= α <= mn/(mn-2)".into()))
}

fn werner_holevo() -> Result<(bool, String)> {
    let mut ok = true;
    for n in 2..=8 {
        ok &= ctit_2n_exact(0.0, -1.0, n)?.is_as();
        ok &= !ctit_necessary(0.0, -1.0, bp(2, n))?.is_not_as();
    }
    Ok((ok, "Φ(0,-1) AS on 2|n, n = 2..8".into()))
}

fn ctit_case_i() -> Result<(bool, String)> {
    let v = ctit_2n_exact(1.0, 1.0, 3)?;
    Ok((
        v.is_as() && v.margin.abs() < 1e-12,
        format!("margin {:.1e}", v.margin),
    ))
}

fn bidep_entangled_branch() -> Result<(bool, String)> {
    let (a, b, g) = (0.2, 0.2, -1.0);
    let kappa = 2.0 * a * a + 2.0 * b * b + 2.0 * g * (a + b);
    let c = ChannelSpec::BipartiteDepolarizing {
        m: 2,
        n: 2,
        alpha: a,
        beta: b,
        gamma: g,
    };
    let norm = max_output_purity(&c)?;
    let ent = absep::channel::bidep_pure_output_purity(2, 2, a, b, g, 0.5);
    let ok = kappa < 0.0 && (norm.value - ent).abs() < 1e-12;
    Ok((ok, format!("κ = {kappa:.2}, max purity at entangled input")))
}

fn bidep_positivity_face() -> Result<(bool, String)> {
    let v = bipartite_dep_necessary(0.0, 0.0, -1.5, bp(2, 2))?;
    let edge = bipartite_dep_necessary(0.0, 0.0, -1.0, bp(2, 2))?;
    let ok = v.is_not_as()
        && v.criterion == absep::classify::criterion::BIDEP_POSITIVITY
        && !edge.is_not_as();
    Ok((ok, format!("γ = -1.5 {} via {}", label(&v), v.criterion)))
}

fn one_sided() -> Result<(bool, String)> {
    let c = ChannelSpec::OneSided {
        inner: Box::new(dep(2, 0.1)),
        id_dim: 3,
    };
    let v = classify_channel(&c, &Partition::Bi(bp(2, 3)))?;
    Ok((v.is_not_as(), format!("{} via {}", label(&v), v.criterion)))
}

fn depolarizing_exact() -> Result<(bool, String)> {
    let p = bp(2, 2);
    let at = covariant_ea_equivalence(&dep(4, 1.0 / 3.0), p)?;
    let above = covariant_ea_equivalence(&dep(4, 0.34), p)?;
    let w = random_unitary_witness(&dep(4, 0.34), p, 1, 0)?;
    let ok = at.is_as()
        && above.is_not_as()
        && w.as_ref().is_some_and(|w| {
            w.negativity <= -0.004 && (w.unrefined_negativity + 0.005).abs() < 1e-9
        });
    let n = w.map_or(f64::NAN, |w| w.unrefined_negativity);
    Ok((ok, format!("q = 0.34 Bell negativity {n:.9}")))
}

fn no_witness_below() -> Result<(bool, String)> {
    let w = random_unitary_witness(&dep(4, 0.30), bp(2, 2), 10_000, 0)?;
    Ok((w.is_none(), "q = 0.30, 10^4 trials, none found".into()))
}

fn tensor_stability() -> Result<(bool, String)> {
    let tr = StabilityInput::Purity(max_output_purity(&ChannelSpec::TracingMap { d: 2 })?);
    let id = StabilityInput::Purity(max_output_purity(&dep(2, 1.0))?);
    let ok = tensor_stability_threshold(&tr, 2).is_none()
        && !tensor_stability_bound(&tr, 2, 1_000_000)?.is_not_as()
        && tensor_stability_threshold(&id, 2) == Some(10)
        && tensor_stability_bound(&id, 2, 10)?.is_not_as();
    Ok((ok, "tracing never flagged, identity from N = 10".into()))
}

fn tensor_factor() -> Result<(bool, String)> {
    let pp = Partition::Bi(bp(4, 4));
    let as_v = MapVerdict::new(
        MapStatus::AbsolutelySeparating,
        absep::classify::criterion::BALL,
        pp,
        0.0,
    );
    let (a, b) = tensor_factor_necessary(&as_v, bp(2, 2), bp(2, 2));
    Ok((a.is_as() && b.is_as(), "AS product has AS factors".into()))
}

fn example5() -> Result<(bool, String)> {
    let w = example5_witness()?;
    let plain = example5_unrotated()?;
    let again = example5_witness()?;
    let ok = w.negativity < -0.0235
        && plain.negativity >= -1e-9
        && (again.negativity - w.negativity).abs() < 1e-12
        && w.verify(1e-9)?;
    Ok((
        ok,
        format!(
            "negativity {:.6}, unrotated {:.1e}",
            w.negativity, plain.negativity
        ),
    ))
}

fn recovery() -> Result<(bool, String)> {
    let rho = tensor(
        &Matrix::from_real_diag(&[1.0, 0.0]),
        &Matrix::from_real_diag(&[0.95, 0.05]),
    );
    let w = recovery_witness_one_sided(0.8, &rho)?;
    let mut rng = seeded_rng(0);
    let mut none_below = true;
    for _ in 0..200 {
        let r = absep::linalg::random_density_matrix(4, &mut rng);
        none_below &= recovery_witness_one_sided(0.5, &r)?.is_none();
    }
    let n = w.as_ref().map_or(f64::NAN, |w| w.negativity);
    Ok((
        w.is_some() && n < 0.0 && none_below,
        format!("q2 = 0.8 negativity {n:.6}"),
    ))
}

fn label(v: &MapVerdict) -> &'static str {
    crate::sweep::status_label(v.status)
}

pub const CHECKS: &[Check] = &[
    Check {
        id: "ghz",
        about: "GHZ-diagonal 2|4 boundary state",
        run: ghz,
    },
    Check {
        id: "ball-boundary",
        about: "purity 1/(mn-1) is inside the ball",
        run: ball_boundary,
    },
    Check {
        id: "purity-2x2",
        about: "two-qubit purity bound (√3-1)²",
        run: purity_two_qubits,
    },
    Check {
        id: "purity-simple",
        about: "simple purity bound 9/(mn+8)",
        run: purity_simple,
    },
    Check {
        id: "depolarizing-cp",
        about: "depolarizing complete positivity",
        run: depolarizing_cp,
    },
    Check {
        id: "ctit-cp",
        about: "trace/identity/transpose complete positivity",
        run: ctit_cp,
    },
    Check {
        id: "gp-purity",
        about: "generalized Pauli maximal purity",
        run: gp_purity,
    },
    Check {
        id: "gp-ball",
        about: "generalized Pauli ball condition",
        run: gp_ball,
    },
    Check {
        id: "nqubit-dep-ball",
        about: "uniform N-qubit depolarizing threshold",
        run: nqubit_dep_ball,
    },
    Check {
        id: "threshold",
        about: "symmetric local depolarizing threshold q*",
        run: threshold,
    },
    Check {
        id: "contact-points",
        about: "exact and sufficient boundaries touch",
        run: contact_points,
    },
    Check {
        id: "one-sided-qubit",
        about: "D_0 ⊗ D_q2 breaks at 1/√2",
        run: one_sided_qubit,
    },
    Check {
        id: "sufficient-gap",
        about: "gap between 0.3933 and 0.3966",
        run: sufficient_gap,
    },
    Check {
        id: "one-over-n",
        about: "N-qubit depolarizing |q| > 1/N",
        run: one_over_n,
    },
    Check {
        id: "local-unital",
        about: "local Pauli sufficient condition",
        run: local_unital,
    },
    Check {
        id: "ctit-beta0",
        about: "Φ(α,0) matches global depolarizing",
        run: ctit_beta_zero,
    },
    Check {
        id: "werner-holevo",
        about: "Werner-Holevo channel",
        run: werner_holevo,
    },
    Check {
        id: "ctit-case-i",
        about: "α = β = 1 on the 2|n boundary",
        run: ctit_case_i,
    },
    Check {
        id: "bidep-entangled",
        about: "bipartite depolarizing entangled branch",
        run: bidep_entangled_branch,
    },
    Check {
        id: "bidep-positivity",
        about: "bipartite depolarizing positivity face",
        run: bidep_positivity_face,
    },
    Check {
        id: "one-sided",
        about: "one-sided maps are never AS",
        run: one_sided,
    },
    Check {
        id: "depolarizing-exact",
        about: "global depolarizing flips at 1/3",
        run: depolarizing_exact,
    },
    Check {
        id: "no-witness",
        about: "no witness below the threshold",
        run: no_witness_below,
    },
    Check {
        id: "tensor-stability",
        about: "tensor-stable thresholds",
        run: tensor_stability,
    },
    Check {
        id: "tensor-factor",
        about: "AS products have AS factors",
        run: tensor_factor,
    },
    Check {
        id: "example5",
        about: "AS factors with a non-AS product",
        run: example5,
    },
    Check {
        id: "recovery",
        about: "entanglement recovery for D_0 ⊗ D_q2",
        run: recovery,
    },
];

/// Runs all checks, or only `only`. Unknown ids are a usage error.
pub fn run(only: Option<&str>) -> CliResult<Vec<Outcome>> {
    let selected: Vec<&Check> = match only {
        Some(id) => {
            let c = CHECKS.iter().find(|c| c.id == id).ok_or_else(|| {
                let ids: Vec<&str> = CHECKS.iter().map(|c| c.id).collect();
                usage(format!("unknown demo id {id:?}; known: {}", ids.join(", ")))
            })?;
            vec![c]
        }
        None => CHECKS.iter().collect(),
    };
    Ok(selected
        .into_iter()
        .map(|c| {
            let (pass, detail) = match (c.run)() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            Outcome {
                id: c.id,
                about: c.about,
                pass,
                detail,
            }
        })
        .collect())
}

pub fn render(outcomes: &[Outcome]) -> String {
    let w = outcomes.iter().map(|o| o.id.len()).max().unwrap_or(0);
    let mut out = String::new();
    for o in outcomes {
        let mark = if o.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{mark}  {:w$}  {}: {}\n", o.id, o.about, o.detail));
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    out.push_str(&format!("{passed}/{} passed\n", outcomes.len()));
    out
}
