mod common;

use common::*;
use pstnet::bus::{CompatError, IncompatibilityReason, DEFAULT_BRANCH_BOUND};
use pstnet::linalg::{max_abs_diff, CMatrix};
use pstnet::{
    build_hamiltonian, compatibility_check, universal_bus_permutation, Permutation, SpectrumSpec,
};
use rand::Rng;

#[test]
fn designs_are_compatible_with_themselves() {
    let mut rng = rng(41);
    for _ in 0..40 {
        let (_, h) = random_design(&mut rng, 8);
        let (t1, t2) = (h.tau() / 2.0, h.tau());
        let (u1, u2) = (h.evolution_operator(t1), h.evolution_operator(t2));
        let v = compatibility_check(&u1, t1, &u2, t2, DEFAULT_BRANCH_BOUND).unwrap();
        assert!(v.compatible, "{:?}", v.reason);
        let common = v.common.unwrap();
        assert!(max_abs_diff(&oracle_evolution(&common.hamiltonian, t1), &u1) < 1e-8);
        assert!(max_abs_diff(&oracle_evolution(&common.hamiltonian, t2), &u2) < 1e-8);
        // Each recovered energy differs from one of H's by a whole branch.
        for e in &common.energies {
            let matched = h.eigenpairs().iter().any(|p| {
                let k = (e - p.energy) * t1 / std::f64::consts::TAU;
                (k - k.round()).abs() < 1e-8
            });
            assert!(matched, "energy {e} not related to the spectrum");
        }
    }
}

#[test]
fn compatible_at_unrelated_times() {
    let mut rng = rng(42);
    let (_, h) = random_design(&mut rng, 6);
    let (t1, t2) = (0.37 * h.tau(), 0.81 * h.tau());
    let v = compatibility_check(
        &h.evolution_operator(t1),
        t1,
        &h.evolution_operator(t2),
        t2,
        40,
    )
    .unwrap();
    assert!(v.compatible, "{:?}", v.reason);
    assert!(max_abs_diff(&v.common.unwrap().hamiltonian, h.matrix()) < 1e-8);
}

#[test]
fn non_commuting_swaps_are_rejected() {
    let a = Permutation::from_cycles(3, &[&[0, 1]]).unwrap().matrix();
    let b = Permutation::from_cycles(3, &[&[1, 2]]).unwrap().matrix();
    let v = compatibility_check(&a, 0.5, &b, 1.0, 8).unwrap();
    assert!(!v.compatible);
    let reason = v.reason.unwrap();
    assert!(matches!(reason, IncompatibilityReason::Commutation { .. }));
    assert_eq!(reason.label(), "commutation");
}

#[test]
fn two_site_half_swap() {
    let p = universal_bus_permutation(2);
    let h = build_hamiltonian(&p, &SpectrumSpec::from_flat(&p, &[0, 1], 1.0).unwrap()).unwrap();
    let v = compatibility_check(
        &h.evolution_operator(0.5),
        0.5,
        &h.evolution_operator(1.0),
        1.0,
        8,
    )
    .unwrap();
    let expected = CMatrix::from_row_slice(
        2,
        2,
        &[1.0, -1.0, -1.0, 1.0].map(|r| c(r * std::f64::consts::FRAC_PI_2, 0.0)),
    );
    assert!(max_abs_diff(&v.common.unwrap().hamiltonian, &expected) < 1e-10);
}

#[test]
fn commuting_pair_without_common_generator() {
    // exp(-iE/2) = 1 forces E in 4πZ, while exp(-iE) = -1 forbids it.
    let u1 = CMatrix::identity(2, 2);
    let u2 = CMatrix::identity(2, 2) * c(-1.0, 0.0);
    let v = compatibility_check(&u1, 0.5, &u2, 1.0, 8).unwrap();
    assert_eq!(v.reason.unwrap().label(), "no consistent branch assignment");
}

#[test]
fn branch_bound_limits_search() {
    let mut rng = rng(43);
    let (_, h) = random_design(&mut rng, 4);
    let t2 = h.tau();
    let t1 = t2 / 7.0;
    let strict = compatibility_check(
        &h.evolution_operator(t1),
        t1,
        &h.evolution_operator(t2),
        t2,
        0,
    );
    let loose = compatibility_check(
        &h.evolution_operator(t1),
        t1,
        &h.evolution_operator(t2),
        t2,
        60,
    );
    assert!(loose.unwrap().compatible);
    assert!(strict.is_ok());
    assert!(matches!(
        compatibility_check(
            &CMatrix::identity(2, 2),
            1.0,
            &CMatrix::identity(2, 2),
            2.0,
            -1
        ),
        Err(CompatError::NegativeBranchBound(-1))
    ));
    let _ = rng.gen::<u8>();
}
