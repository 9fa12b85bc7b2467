mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, SQRT_2};
use xyinfo::chain::build_rest_hamiltonian;
use xyinfo::transfer::pair_index;
use xyinfo::*;

fn ground(n: usize) -> (ChainSpec, DensityMatrix, Propagator) {
    let spec = ChainSpec::new(n).unwrap();
    let rest = rest_state(&spec, RestStateKind::Ground).unwrap();
    let p = diagonalize(&build_xy_hamiltonian(&spec).unwrap()).unwrap();
    (spec, rest, p)
}

#[test]
fn hamiltonians_match_kronecker_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=6 {
        let d = rng.random_range(0.3..2.0);
        let omegas: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spec = ChainSpec::new(n).unwrap().with_coupling(d).unwrap().with_omegas(omegas.clone()).unwrap();
        let h = to_na(&build_xy_hamiltonian(&spec).unwrap());
        assert!(max_diff(&h, &hamiltonian(n, d, &chain_bonds(n), &[])) < 1e-15, "n={n}");

        let rest_bonds: Vec<_> = (2..n).map(|i| (i, i + 1)).collect();
        let zeeman: Vec<_> = (2..=n).map(|i| (i, omegas[i - 1])).collect();
        let h_rest = to_na(&build_rest_hamiltonian(&spec).unwrap());
        assert!(max_diff(&h_rest, &hamiltonian(n, d, &rest_bonds, &zeeman)) < 1e-15, "n={n}");
    }
}

#[test]
fn propagator_matches_pade_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 2..=5 {
        let (_, _, p) = ground(n);
        let h = hamiltonian(n, 1.0, &chain_bonds(n), &[]);
        for _ in 0..5 {
            let t = rng.random_range(0.0..30.0);
            let u = to_na(&p.unitary_at(t));
            assert!(max_diff(&u, &propagator(&h, t)) < 1e-11, "n={n} t={t}");
        }
    }
}

#[test]
fn thermal_receiver_state_matches_reference_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 2..=5 {
        let beta = rng.random_range(0.1..3.0);
        let omegas: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { rng.random_range(-1.0..1.0) }).collect();
        let spec = ChainSpec::new(n).unwrap().with_omegas(omegas.clone()).unwrap();
        let rest = rest_state(&spec, RestStateKind::Thermal { beta }).unwrap();
        let p = diagonalize(&build_xy_hamiltonian(&spec).unwrap()).unwrap();

        let rest_bonds: Vec<_> = (1..n - 1).map(|i| (i, i + 1)).collect();
        let zeeman: Vec<_> = (1..n).map(|i| (i, omegas[i])).collect();
        let rest_ref = gibbs(&hamiltonian(n - 1, 1.0, &rest_bonds, &zeeman), beta);
        assert!(max_diff(&to_na(&rest.matrix().to_owned()), &rest_ref) < 1e-13, "n={n}");

        let h = hamiltonian(n, 1.0, &chain_bonds(n), &[]);
        for _ in 0..4 {
            let x = random_bloch(&mut rng);
            let t = rng.random_range(0.0..20.0);
            let u = propagator(&h, t);
            let rho0 = sender_matrix(x).kronecker(&rest_ref);
            let expected = reduce_to_site(&(&u * rho0 * u.adjoint()), n, n);
            let got = receiver_state_with(&spec, &p, &bloch(x), &rest, t).unwrap();
            assert!(max_diff(&to_na(&got.matrix().to_owned()), &expected) < 1e-11, "n={n} t={t}");
        }
    }
}

#[test]
fn ground_rest_transfer_follows_end_to_end_amplitude() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in 2..=8 {
        let (spec, rest, p) = ground(n);
        let engine = TransferEngine::new(&spec, &rest, &p).unwrap();
        for _ in 0..10 {
            let t = rng.random_range(0.0..40.0);
            let f = end_to_end_amplitude(n, 1.0, t);
            let tm = engine.transfer_at(t);
            let f2 = f.norm_sqr();
            let mut expected = TransferMatrix::zeros(t);
            expected.entries[pair_index(0, 0)][pair_index(0, 0)] = c(1.0, 0.0);
            expected.entries[pair_index(0, 0)][pair_index(1, 1)] = c(1.0 - f2, 0.0);
            expected.entries[pair_index(1, 1)][pair_index(1, 1)] = c(f2, 0.0);
            expected.entries[pair_index(1, 0)][pair_index(1, 0)] = f;
            expected.entries[pair_index(0, 1)][pair_index(0, 1)] = f.conj();
            assert!(tm.max_abs_diff(&expected) < 1e-11, "n={n} t={t}");

            let det = compute_info_system(&tm).det();
            assert!((det - f2 * f2).abs() < 1e-11, "n={n} t={t}");
        }
    }
}

#[test]
fn closed_forms_match_computed_transfer() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for n in [3, 4] {
        let (spec, rest, p) = ground(n);
        for _ in 0..100 {
            let t = rng.random_range(0.0..50.0);
            let tm = compute_transfer_matrix(&spec, &rest, &p, t).unwrap();
            let cf = closed_form_transfer(n, t).unwrap();
            for g in 0..4 {
                for a in 0..4 {
                    let (got, want) = (tm.entries[g][a], cf.entries[g][a]);
                    if want == c(0.0, 0.0) {
                        assert!(got.norm() < 1e-12, "n={n} t={t} entry ({g},{a})");
                    } else {
                        assert!((got - want).norm() < 1e-10, "n={n} t={t} entry ({g},{a})");
                    }
                }
            }
        }
    }
}

#[test]
fn closed_form_amplitudes_agree_with_spectrum() {
    for i in 0..200 {
        let t = i as f64 * 0.37;
        let f3 = end_to_end_amplitude(3, 1.0, t);
        assert!((f3 - c(closed_form_r(3, t).unwrap(), 0.0)).norm() < 1e-14);
        let f4 = end_to_end_amplitude(4, 1.0, t);
        assert!((f4 - c(0.0, closed_form_r(4, t).unwrap())).norm() < 1e-14);
    }
}

#[test]
fn info_system_reproduces_receiver_observables() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let spec = ChainSpec::new(4).unwrap().with_omega(3, 0.4).unwrap().with_omega(4, 1.0).unwrap();
    let rest = rest_state(&spec, RestStateKind::Thermal { beta: 1.3 }).unwrap();
    let p = diagonalize(&build_xy_hamiltonian(&spec).unwrap()).unwrap();
    for _ in 0..20 {
        let t = rng.random_range(0.0..20.0);
        let info = compute_info_system(&compute_transfer_matrix(&spec, &rest, &p, t).unwrap());
        let x = bloch(random_bloch(&mut rng));
        let rho = receiver_state_with(&spec, &p, &x, &rest, t).unwrap();
        let obs = info.apply(&x);
        let r01 = rho.get(0, 1);
        assert!((obs[0] - r01.re).abs() < 1e-11);
        assert!((obs[1] - r01.im).abs() < 1e-11);
        assert!((obs[2] - rho.get(0, 0).re).abs() < 1e-11);
    }
}

#[test]
fn classification_examples() {
    let (spec, rest, p) = ground(3);
    let half = compute_info_system(&compute_transfer_matrix(&spec, &rest, &p, SQRT_2 * PI / 2.0).unwrap());
    let class = classify(&half, 1e-8, 1e-8).unwrap();
    assert_eq!(class.classification, Classification::Complete);
    assert!((class.det - 0.0625).abs() < 1e-12);

    // at t = 0 nothing has left the sender: A vanishes identically
    let zero = compute_info_system(&compute_transfer_matrix(&spec, &rest, &p, 0.0).unwrap());
    let class = classify(&zero, 1e-8, 1e-8).unwrap();
    assert_eq!(class.rank, 0);
    assert_eq!(class.classification, Classification::None);
    assert!(class.near_singular);
}

#[test]
fn perfect_transfer_implies_complete_information() {
    let (spec, rest, p) = ground(3);
    for k in 0..4 {
        let t = SQRT_2 * PI * (2 * k + 1) as f64;
        let tm = compute_transfer_matrix(&spec, &rest, &p, t).unwrap();
        let pst = pst_check(&tm, 1e-8).unwrap();
        assert!(pst.is_pst_up_to_local_unitary && !pst.is_pst_exact, "k={k}");
        let class = classify(&compute_info_system(&tm), 1e-8, 1e-8).unwrap();
        assert_eq!(class.classification, Classification::Complete);
        assert!((class.det - 1.0).abs() < 1e-10);
    }
}

#[test]
fn ground_state_assembly_and_stationarity() {
    let (spec, rest, p) = ground(3);
    let bose = assemble_initial_for(&spec, &bloch([0.0, 0.0, 0.0]), &rest).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            let want = if i == 4 && j == 4 { 1.0 } else { 0.0 };
            assert_eq!(bose.get(i, j), c(want, 0.0));
        }
    }
    let vac = assemble_initial_for(&spec, &bloch([1.0, 0.0, 0.0]), &rest).unwrap();
    for t in [0.5, 3.0, 17.0] {
        let evolved = p.evolve(&vac, t).unwrap();
        assert!(linalg::max_abs_diff(evolved.matrix(), vac.matrix()) < 1e-13);
    }
}
