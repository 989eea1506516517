use super::*;
use crate::linalg::{
    haar_unitary_rng, partial_trace, purity, random_density_matrix, random_pure_state, seeded_rng,
    Subsystem,
};
use rand::Rng;

fn dep(d: usize, q: f64) -> ChannelSpec {
    ChannelSpec::Depolarizing { d, q }
}

fn ctit(d: usize, alpha: f64, beta: f64) -> ChannelSpec {
    ChannelSpec::TraceIdTranspose { d, alpha, beta }
}

fn unstack(y: &[C64], d: usize) -> Matrix {
    Matrix::from_fn(d, d, |i, j| y[j * d + i])
}

fn stack(x: &Matrix) -> Vec<C64> {
    let d = x.dim();
    (0..d * d).map(|k| x[(k % d, k / d)]).collect()
}

fn sample_families<R: Rng>(rng: &mut R) -> Vec<ChannelSpec> {
    let q = rng.random_range(-0.3..1.0);
    let l: [f64; 3] = [
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ];
    let mut t: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = t.iter().sum::<f64>() + 0.2;
    t.iter_mut().for_each(|x| *x /= total);
    let s = 1.0 - t.iter().sum::<f64>();
    vec![
        dep(3, q),
        ChannelSpec::UnitalQubit {
            l1: l[0],
            l2: l[1],
            l3: l[2],
        },
        ChannelSpec::GeneralizedPauli { d: 3, s, t },
        ctit(3, rng.random_range(-0.3..1.0), rng.random_range(-0.3..1.0)),
        ChannelSpec::BipartiteDepolarizing {
            m: 2,
            n: 3,
            alpha: rng.random_range(-0.5..1.0),
            beta: rng.random_range(-0.5..1.0),
            gamma: rng.random_range(-0.2..1.0),
        },
        ChannelSpec::TracingMap { d: 3 },
        ChannelSpec::LocalProduct {
            factors: vec![dep(2, q.max(-1.0 / 3.0)), dep(3, 0.5 * q)],
        },
        ChannelSpec::OneSided {
            inner: Box::new(dep(2, q.max(-1.0 / 3.0))),
            id_dim: 2,
        },
    ]
}

#[test]
fn trivial_depolarizing_limits() {
    let mut rng = seeded_rng(1);
    let rho = random_density_matrix(4, &mut rng);
    assert!(dep(4, 1.0).apply(&rho).unwrap().max_abs_diff(&rho) < 1e-14);
    let out = dep(4, 0.0).apply(&rho).unwrap();
    assert!(out.max_abs_diff(&maximally_mixed4()) < 1e-14);
}

fn maximally_mixed4() -> Matrix {
    crate::linalg::maximally_mixed(4)
}

#[test]
fn werner_holevo_on_real_pure_state() {
    let d = 4;
    let mut rng = seeded_rng(2);
    let mut v: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), 0.0))
        .collect();
    crate::linalg::normalize(&mut v);
    let p = Matrix::projector(&v);
    let out = ctit(d, 0.0, -1.0).apply(&p).unwrap();
    let want = (&Matrix::identity(d) - &p).scale_re(1.0 / (d as f64 - 1.0));
    assert!(out.max_abs_diff(&want) < 1e-13);
}

#[test]
fn rejects_bad_parameters() {
    assert!(matches!(
        dep(2, -1.5).apply(&Matrix::identity(2)),
        Err(Error::NotPositive(_))
    ));
    assert!(matches!(
        dep(3, 0.5).apply(&Matrix::identity(2)),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(ChannelSpec::UnitalQubit {
        l1: 1.2,
        l2: 0.0,
        l3: 0.0
    }
    .validate()
    .is_err());
    assert!(ctit(3, 3.0, 0.0).validate().is_ok());
    assert!(ctit(3, 0.0, -3.0).validate().is_err());
    assert!(ctit(3, -1.5, 0.0).validate().is_err());
    assert!(ChannelSpec::GeneralizedPauli {
        d: 2,
        s: 0.5,
        t: vec![0.2, 0.2]
    }
    .validate()
    .is_err());
    assert!(ChannelSpec::GeneralizedPauli {
        d: 2,
        s: 0.5,
        t: vec![0.6, 0.0, -0.1]
    }
    .validate()
    .is_err());
    let gp4 = ChannelSpec::GeneralizedPauli {
        d: 4,
        s: 1.0,
        t: vec![0.0; 5],
    };
    assert!(gp4.validate().is_ok());
    assert!(matches!(
        gp4.apply(&Matrix::identity(4).scale_re(0.25)),
        Err(Error::UnsupportedDimension(4))
    ));
}

#[test]
fn superoperator_matches_apply() {
    let mut rng = seeded_rng(3);
    for c in sample_families(&mut rng) {
        let s = c.superoperator_matrix().unwrap();
        let d = c.dim();
        for _ in 0..10 {
            let rho = random_density_matrix(d, &mut rng);
            let via = unstack(&s.mul_vec(&stack(&rho)), d);
            assert!(via.max_abs_diff(&c.apply(&rho).unwrap()) < 1e-10, "{c:?}");
        }
    }
    let id = dep(3, 1.0).superoperator_matrix().unwrap();
    assert!(id.max_abs_diff(&Matrix::identity(9)) < 1e-15);
    // Tracing d = 2 sends vec(E_ii) to vec(I/2) and kills off-diagonals.
    let tr = ChannelSpec::TracingMap { d: 2 }
        .superoperator_matrix()
        .unwrap();
    for col in 0..4 {
        for row in 0..4 {
            let want = if (col == 0 || col == 3) && (row == 0 || row == 3) {
                0.5
            } else {
                0.0
            };
            assert!((tr[(row, col)] - C64::new(want, 0.0)).norm() < 1e-15);
        }
    }
}

#[test]
fn trace_preserved_and_hermitian_on_random_pairs() {
    let mut rng = seeded_rng(4);
    for _ in 0..125 {
        for c in sample_families(&mut rng) {
            let rho = random_density_matrix(c.dim(), &mut rng);
            let out = c.apply(&rho).unwrap();
            assert!((out.trace() - C64::new(1.0, 0.0)).norm() < 1e-10, "{c:?}");
            assert!(out.hermiticity_residual() < 1e-12);
            let low = *eigenvalues(&out.hermitian_part()).unwrap().last().unwrap();
            if !matches!(c, ChannelSpec::OneSided { .. }) {
                assert!(low > -1e-9, "{c:?} gave eigenvalue {low}");
            }
        }
    }
}

#[test]
fn unital_families_fix_the_maximally_mixed_state() {
    let mut rng = seeded_rng(5);
    for c in sample_families(&mut rng) {
        let d = c.dim();
        let mm = crate::linalg::maximally_mixed(d);
        assert!(c.is_unital());
        assert!(c.apply(&mm).unwrap().max_abs_diff(&mm) < 1e-14, "{c:?}");
    }
}

#[test]
fn depolarizing_is_covariant() {
    let mut rng = seeded_rng(6);
    for d in [2, 3, 5] {
        let c = dep(d, rng.random_range(-0.2..1.0));
        for _ in 0..5 {
            let u = haar_unitary_rng(d, &mut rng);
            let rho = random_density_matrix(d, &mut rng);
            let lhs = c.apply(&u.conjugate(&rho)).unwrap();
            let rhs = u.conjugate(&c.apply(&rho).unwrap());
            assert!(lhs.max_abs_diff(&rhs) < 1e-9);
        }
    }
}

#[test]
fn local_product_acts_factorwise() {
    let mut rng = seeded_rng(7);
    let a = ChannelSpec::UnitalQubit {
        l1: 0.3,
        l2: -0.5,
        l3: 0.8,
    };
    let b = ctit(3, 0.4, -0.2);
    let prod = ChannelSpec::LocalProduct {
        factors: vec![a.clone(), b.clone()],
    };
    let r1 = random_density_matrix(2, &mut rng);
    let r2 = random_density_matrix(3, &mut rng);
    let out = prod.apply(&tensor(&r1, &r2)).unwrap();
    let want = tensor(&a.apply(&r1).unwrap(), &b.apply(&r2).unwrap());
    assert!(out.max_abs_diff(&want) < 1e-13);

    let full = eigenvalues(&prod.choi_matrix().unwrap()).unwrap();
    let fast = prod.choi_eigenvalues().unwrap();
    for (x, y) in full.iter().zip(&fast) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn one_sided_choi_uses_tensor_structure() {
    let c = ChannelSpec::OneSided {
        inner: Box::new(dep(2, -0.8)),
        id_dim: 2,
    };
    let full = eigenvalues(&c.choi_matrix().unwrap()).unwrap();
    let fast = c.choi_eigenvalues().unwrap();
    for (x, y) in full.iter().zip(&fast) {
        assert!((x - y).abs() < 1e-9);
    }
    assert!(is_completely_positive(&c).unwrap().fails());
}

#[test]
fn depolarizing_cp_threshold() {
    for d in [2, 3, 4] {
        let lo = -1.0 / ((d * d - 1) as f64);
        assert!(is_completely_positive(&dep(d, lo)).unwrap().holds());
        assert!(is_completely_positive(&dep(d, 1.0)).unwrap().holds());
        let below = is_completely_positive(&dep(d, lo - 1e-3)).unwrap();
        assert!(below.fails());
        assert!(below.margin < 0.0);
        // Compare closed-form Choi spectrum with the explicit matrix.
        let c = dep(d, 0.37);
        let full = eigenvalues(&c.choi_matrix().unwrap()).unwrap();
        for (x, y) in full.iter().zip(c.choi_eigenvalues().unwrap()) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn ctit_cp_region() {
    let d = 3;
    let df = d as f64;
    let mut checked = 0;
    for i in 0..41 {
        for j in 0..41 {
            let alpha = -1.0 + 0.1 * i as f64 + 0.013;
            let beta = -2.0 + 0.1 * j as f64 + 0.007;
            let c = ctit(d, alpha, beta);
            if c.validate().is_err() {
                continue;
            }
            checked += 1;
            let cp = is_completely_positive(&c).unwrap().holds();
            // Choi eigenvalues are 1 + dα + β, 1 + β and 1 - β.
            let exact = 1.0 + df * alpha + beta >= 0.0 && (-1.0..=1.0).contains(&beta);
            assert_eq!(cp, exact, "alpha={alpha} beta={beta}");
            let stated = alpha >= -1.0 / df && -(1.0 + df * alpha) <= beta && beta <= 1.0;
            if stated {
                assert!(cp, "alpha={alpha} beta={beta}");
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn identity_is_cp() {
    let v = is_completely_positive(&ChannelSpec::UnitalQubit {
        l1: 1.0,
        l2: 1.0,
        l3: 1.0,
    })
    .unwrap();
    assert!(v.holds());
    assert!(v.margin.abs() < 1e-12);
}

#[test]
fn closed_form_purities() {
    for q in [-1.0, -0.4, 0.0, 0.3, 1.0] {
        let n = max_output_purity(&dep(2, q)).unwrap();
        assert_eq!(n.method, Method::ClosedForm);
        assert!((n.value - (1.0 + q * q) / 2.0).abs() < 1e-15);
    }
    let qs = [0.2, -0.3, 0.7];
    let prod = ChannelSpec::LocalProduct {
        factors: qs.iter().map(|&q| dep(2, q)).collect(),
    };
    let want: f64 = qs.iter().map(|q| 1.0 + q * q).product::<f64>() / 8.0;
    let n = max_output_purity(&prod).unwrap();
    assert_eq!(n.method, Method::ClosedForm);
    assert!((n.value - want).abs() < 1e-14);

    let (s, t) = (0.1, vec![0.5, 0.3, 0.0, 0.1]);
    let gp = ChannelSpec::GeneralizedPauli {
        d: 3,
        s,
        t: t.clone(),
    };
    let want = t
        .iter()
        .map(|tj| (1.0 + 2.0 * (s + tj) * (s + tj)) / 3.0)
        .fold(0.0, f64::max);
    assert!((max_output_purity(&gp).unwrap().value - want).abs() < 1e-14);
}

#[test]
fn closed_form_agrees_with_numeric() {
    let mut rng = seeded_rng(8);
    for _ in 0..3 {
        for c in sample_families(&mut rng) {
            let closed = max_output_purity(&c).unwrap();
            if closed.method != Method::ClosedForm {
                continue;
            }
            let numeric = max_output_purity_numeric(&c, 99).unwrap();
            assert!(numeric.lower_bound_only);
            assert!(
                (closed.value - numeric.value).abs() < 1e-6,
                "{c:?}: closed {} numeric {}",
                closed.value,
                numeric.value
            );
            assert!((closed.output_spectrum.purity() - closed.value).abs() < 1e-14);
        }
    }
}

#[test]
fn numeric_purity_stays_in_range() {
    let c = ChannelSpec::OneSided {
        inner: Box::new(dep(2, 0.5)),
        id_dim: 2,
    };
    let n = max_output_purity(&c).unwrap();
    assert_eq!(n.method, Method::Numeric);
    assert!(n.value <= 1.0 && n.value >= 0.25);
    // Product input |0>|0> already reaches (1 + q²)/2.
    assert!(n.value >= 0.625 - 1e-9);
}

#[test]
fn bipartite_depolarizing_purity_on_pure_inputs() {
    let mut rng = seeded_rng(9);
    for (m, n) in [(2, 2), (2, 3), (3, 3)] {
        let part = Bipartition::new(m, n).unwrap();
        for _ in 0..20 {
            let (alpha, beta, gamma) = (
                rng.random_range(-0.5..1.5),
                rng.random_range(-0.5..1.5),
                rng.random_range(-0.3..2.0),
            );
            let c = ChannelSpec::BipartiteDepolarizing {
                m,
                n,
                alpha,
                beta,
                gamma,
            };
            if c.validate().is_err() {
                continue;
            }
            let psi = random_pure_state(m * n, &mut rng);
            let p = Matrix::projector(&psi);
            let mu = purity(&partial_trace(&p, part, Subsystem::B).unwrap());
            let got = purity(&c.apply(&p).unwrap());
            let want = bidep_pure_output_purity(m, n, alpha, beta, gamma, mu);
            assert!((got - want).abs() < 1e-9);
        }
    }
}

#[test]
fn ctit_pure_output_spectrum_matches_apply() {
    let mut rng = seeded_rng(10);
    let d = 4;
    for _ in 0..20 {
        let (alpha, beta) = (rng.random_range(-0.9..1.5), rng.random_range(-0.9..1.5));
        let c = ctit(d, alpha, beta);
        if c.validate().is_err() {
            continue;
        }
        let psi = random_pure_state(d, &mut rng);
        let out = c.apply(&Matrix::projector(&psi)).unwrap();
        let ev = eigenvalues(&out).unwrap();
        let ext = ctit_extremal_spectrum(d, alpha, beta);
        // A generic input sits strictly inside the extremal spread.
        assert!(ev[0] <= ext.max() + 1e-12);
        assert!(ev[d - 1] >= ext.min() - 1e-12);
    }
}

#[test]
fn entropy_examples() {
    let id = min_output_entropy(&dep(3, 1.0)).unwrap();
    assert!(id.value.abs() < 1e-12);
    let tr = min_output_entropy(&ChannelSpec::TracingMap { d: 5 }).unwrap();
    assert_eq!(tr.value, 5f64.ln());
    let half = min_output_entropy(&dep(2, 0.5)).unwrap();
    let want = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
    assert!((half.value - want).abs() < 1e-12);
    assert!((want - 0.5623).abs() < 1e-4);

    // Numeric descent reproduces the depolarizing closed form.
    let num = min_output_entropy_numeric(&dep(3, 0.4), 3).unwrap();
    let closed = min_output_entropy(&dep(3, 0.4)).unwrap();
    assert!(num.upper_bound_only);
    assert!((num.value - closed.value).abs() < 1e-8);
}

#[test]
fn axis_outputs_match_apply() {
    let mut rng = seeded_rng(11);
    for d in [2, 3, 5] {
        let mut t: Vec<f64> = (0..=d).map(|_| rng.random_range(0.0..1.0)).collect();
        let total = t.iter().sum::<f64>() * 1.3;
        t.iter_mut().for_each(|x| *x /= total);
        let s = 1.0 - t.iter().sum::<f64>();
        let c = ChannelSpec::GeneralizedPauli { d, s, t };
        for j in 0..=d {
            for k in 0..d {
                let direct = c.apply(&axis_state(d, j, k).unwrap()).unwrap();
                assert!(axis_output(&c, j, k).unwrap().max_abs_diff(&direct) < 1e-9);
            }
        }
        assert!(matches!(
            axis_output(&c, d + 1, 0),
            Err(Error::IndexOutOfRange(_))
        ));
    }
    // s + t_J = 0 gives I/d, s + t_J = 1 gives the projector.
    let c = ChannelSpec::GeneralizedPauli {
        d: 3,
        s: 0.0,
        t: vec![1.0, 0.0, 0.0, 0.0],
    };
    assert!(
        axis_output(&c, 1, 2)
            .unwrap()
            .max_abs_diff(&crate::linalg::maximally_mixed(3))
            < 1e-15
    );
    assert!(
        axis_output(&c, 0, 2)
            .unwrap()
            .max_abs_diff(&axis_state(3, 0, 2).unwrap())
            < 1e-15
    );
}

#[test]
fn json_round_trip() {
    let c = ChannelSpec::OneSided {
        inner: Box::new(ChannelSpec::LocalProduct {
            factors: vec![dep(2, 0.3), ctit(3, 0.0, -1.0)],
        }),
        id_dim: 2,
    };
    let s = serde_json::to_string(&c).unwrap();
    assert!(s.contains("\"family\":\"one_sided\""));
    assert!(s.contains("\"family\":\"ctit\""));
    let back: ChannelSpec = serde_json::from_str(&s).unwrap();
    assert_eq!(back, c);
    let parsed: ChannelSpec = serde_json::from_str(
        r#"{"family":"one_sided","inner":{"family":"tracing","d":2},"idDim":3}"#,
    )
    .unwrap();
    assert_eq!(parsed.dim(), 6);
}

#[test]
fn partial_trace_is_consistent_with_tracing_map() {
    let mut rng = seeded_rng(12);
    let rho = random_density_matrix(6, &mut rng);
    let part = Bipartition::new(2, 3).unwrap();
    let c = ChannelSpec::LocalProduct {
        factors: vec![ChannelSpec::TracingMap { d: 2 }, dep(3, 1.0)],
    };
    let out = c.apply(&rho).unwrap();
    let want = tensor(
        &crate::linalg::maximally_mixed(2),
        &partial_trace(&rho, part, Subsystem::A).unwrap(),
    );
    assert!(out.max_abs_diff(&want) < 1e-14);
}

#[test]
fn bipartite_depolarizing_extremal_spectra_match_apply() {
    let mut rng = seeded_rng(13);
    for (m, n) in [(2, 2), (2, 3), (3, 2), (3, 4)] {
        let part = Bipartition::new(m, n).unwrap();
        let (alpha, beta, gamma) = (
            rng.random_range(-0.5..1.5),
            rng.random_range(-0.5..1.5),
            rng.random_range(-0.3..2.0),
        );
        let c = ChannelSpec::BipartiteDepolarizing {
            m,
            n,
            alpha,
            beta,
            gamma,
        };
        let norm = bidep_norm(m, n, alpha, beta, gamma);
        let (fact, ent) = bidep_extremal_weights(m, n, alpha, beta, gamma);
        let mut prod = vec![C64::new(0.0, 0.0); m * n];
        prod[0] = C64::new(1.0, 0.0);
        let me = crate::linalg::max_entangled_vector(part);
        for (input, w) in [(prod, fact), (me, ent)] {
            let out = c.apply_linear(&Matrix::projector(&input));
            let got = eigenvalues(&out).unwrap();
            let want = Spectrum::raw(w.iter().map(|x| x / norm).collect());
            for (x, y) in got.iter().zip(want.values()) {
                assert!((x - y).abs() < 1e-12, "{m}x{n}");
            }
        }
    }
}
