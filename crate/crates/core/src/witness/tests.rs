use super::*;
use crate::linalg::{maximally_mixed, random_density_matrix};
use rand::Rng;

fn part(m: usize, n: usize) -> Bipartition {
    Bipartition::new(m, n).unwrap()
}

fn dep(d: usize, q: f64) -> ChannelSpec {
    ChannelSpec::Depolarizing { d, q }
}

#[test]
fn negativity_examples() {
    let bell = Matrix::projector(&max_entangled_vector(part(2, 2)));
    assert!((ppt_negativity(&bell, part(2, 2)).unwrap() + 0.5).abs() < 1e-12);
    let mut rng = seeded_rng(31);
    for _ in 0..20 {
        let a = random_density_matrix(3, &mut rng);
        let b = random_density_matrix(2, &mut rng);
        assert!(ppt_negativity(&tensor(&a, &b), part(3, 2)).unwrap() >= -1e-12);
    }
    let mm = maximally_mixed(16);
    assert!((ppt_negativity(&mm, part(4, 4)).unwrap() - 1.0 / 16.0).abs() < 1e-12);
    assert!(ppt_negativity(&mm, part(2, 2)).is_err());
}

#[test]
fn werner_witness() {
    let w = random_unitary_witness(&dep(4, 0.34), part(2, 2), 1, 0)
        .unwrap()
        .expect("witness");
    assert_eq!(w.input, MAX_ENTANGLED);
    assert!((w.unrefined_negativity - (1.0 - 3.0 * 0.34) / 4.0).abs() < 1e-9);
    assert!(w.negativity <= -0.004);
    assert!(w.verify(1e-9).unwrap());
}

#[test]
fn no_witness_inside_threshold() {
    assert!(random_unitary_witness(&dep(4, 0.30), part(2, 2), 10_000, 7)
        .unwrap()
        .is_none());
    let tr = ChannelSpec::TracingMap { d: 6 };
    assert!(random_unitary_witness(&tr, part(2, 3), 500, 1)
        .unwrap()
        .is_none());
}

#[test]
fn search_is_deterministic() {
    let c = ChannelSpec::TraceIdTranspose {
        d: 4,
        alpha: 3.0,
        beta: 0.0,
    };
    let a = random_unitary_witness(&c, part(2, 2), 64, 5)
        .unwrap()
        .unwrap();
    let b = random_unitary_witness(&c, part(2, 2), 64, 5)
        .unwrap()
        .unwrap();
    assert_eq!(a.negativity.to_bits(), b.negativity.to_bits());
    assert_eq!(a.trial, b.trial);
    assert_eq!(a.unitary, b.unitary);
    assert!(a.verify(1e-9).unwrap());
    assert!(a.negativity <= a.unrefined_negativity);
}

#[test]
fn search_rejects_bad_arguments() {
    assert!(random_unitary_witness(&dep(4, 0.5), part(2, 2), 0, 0).is_err());
    assert!(random_unitary_witness(&dep(4, 0.5), part(2, 3), 1, 0).is_err());
}

#[test]
fn example5() {
    let w = example5_witness().unwrap();
    assert!(w.negativity < -0.0235, "{}", w.negativity);
    assert!(w.verify(1e-9).unwrap());
    let again = example5_witness().unwrap();
    assert!((again.negativity - w.negativity).abs() < 1e-12);
    let plain = example5_unrotated().unwrap();
    assert!(plain.negativity >= -1e-9, "{}", plain.negativity);
}

#[test]
fn recovery_examples() {
    let rho = tensor(
        &Matrix::from_real_diag(&[1.0, 0.0]),
        &Matrix::from_real_diag(&[0.95, 0.05]),
    );
    assert!(recovery_requirement(0.8, 0.95, 0.05) > 0.0);
    let w = recovery_witness_one_sided(0.8, &rho)
        .unwrap()
        .expect("witness");
    assert!(w.negativity < 0.0);
    assert!(w.verify(1e-9).unwrap());

    assert!(recovery_witness_one_sided(0.8, &maximally_mixed(4))
        .unwrap()
        .is_none());
    assert!(recovery_witness_one_sided(0.8, &maximally_mixed(8)).is_err());
}

#[test]
fn recovery_needs_q_above_inverse_sqrt2() {
    let mut rng = seeded_rng(32);
    for _ in 0..500 {
        let rho = random_density_matrix(4, &mut rng);
        assert!(recovery_witness_one_sided(0.5, &rho).unwrap().is_none());
        assert!(recovery_witness_one_sided(-0.7, &rho).unwrap().is_none());
    }
    // Pure reduced state: requirement reads q² > 1 - q², i.e. q > 1/√2.
    for l1 in [0.999999, 1.0] {
        let s = 1.0 / 2f64.sqrt();
        assert!(recovery_requirement(s - 1e-4, l1, 1.0 - l1) < 0.0);
        assert!(recovery_requirement(s + 1e-4, l1, 1.0 - l1) > 0.0);
    }
}

#[test]
fn recovery_witness_matches_requirement() {
    // Whenever the requirement holds the construction rotates into an NPT
    // state; the negativity oracle is the 2x2 block on |ψ1ψ1>, |ψ2ψ2>.
    let mut rng = seeded_rng(33);
    let mut found = 0;
    for _ in 0..400 {
        let rho = Matrix::projector(&random_pure_state(4, &mut rng));
        let q: f64 = rng.random_range(0.7..1.0);
        let red = partial_trace(&rho, part(2, 2), Subsystem::A).unwrap();
        let ev = eigenvalues(&red).unwrap();
        let req = recovery_requirement(q, ev[0], ev[1]);
        let w = recovery_witness_one_sided(q, &rho).unwrap();
        if req > 1e-6 {
            let w = w.expect("witness");
            found += 1;
            let m1 = (1.0 + q * (2.0 * ev[0] - 1.0)) / 4.0;
            let m2 = (1.0 + q * (2.0 * ev[1] - 1.0)) / 4.0;
            let z = q * (ev[0] - ev[1]) / 4.0;
            let oracle = 0.5 * (m1 + m2) - (0.25 * (m1 - m2).powi(2) + z * z).sqrt();
            assert!(
                (w.negativity - oracle).abs() < 1e-9,
                "{} vs {oracle}",
                w.negativity
            );
        } else if req < 0.0 {
            assert!(w.is_none());
        }
    }
    assert!(found > 0);
}
