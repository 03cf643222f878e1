mod common;

use common::rng;
use proptest::prelude::*;
use pstnet::permutation::{LogicalSetError, PermutationError};
use pstnet::sampling::random_permutation;
use pstnet::{cycle_decompose, cycle_eigensystem, validate_logical_set, Permutation};

#[test]
fn cycle_notation_examples() {
    let p = Permutation::new(vec![4, 3, 0, 1, 2]).unwrap();
    assert_eq!(p.to_string(), "(0 2 4)(1 3)");
    assert_eq!(Permutation::identity(3).to_string(), "(0)(1)(2)");
    assert_eq!(
        common::eleven_site_a().cycle_notation(),
        "(0 2 4 6 8 10)(1 3 5 7 9)"
    );
}

#[test]
fn rejects_invalid_images() {
    assert_eq!(
        Permutation::new(vec![0, 0, 1]),
        Err(PermutationError::NotBijection { label: 0 })
    );
    assert_eq!(
        Permutation::new(vec![0, 3, 1]),
        Err(PermutationError::OutOfRange { label: 3, d: 3 })
    );
    assert_eq!(Permutation::new(vec![]), Err(PermutationError::Empty));
}

#[test]
fn logical_set_violation_names_cycles() {
    let p = Permutation::new(vec![4, 3, 0, 1, 2]).unwrap();
    assert!(validate_logical_set(&p, &[0, 2, 4]).is_ok());
    let e = validate_logical_set(&p, &[0, 1]).unwrap_err();
    assert!(matches!(e, LogicalSetError::SplitAcrossCycles(_)));
    assert_eq!(
        e.to_string(),
        "logical nodes span 2 cycles: {0} in (0 2 4), {1} in (1 3)"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cycles_partition_the_sites(seed in any::<u64>(), d in 1usize..=16) {
        let p = random_permutation(d, &mut rng(seed));
        let mut seen: Vec<usize> = cycle_decompose(&p).iter().flat_map(|c| c.members().to_vec()).collect();
        seen.sort();
        prop_assert_eq!(seen, (0..d).collect::<Vec<_>>());
        let sizes: Vec<u64> = p.cycles().iter().map(|c| c.len() as u64).collect();
        prop_assert_eq!(p.order(), sizes.iter().fold(1u64, |a, &b| num_integer::lcm(a, b)));
    }

    #[test]
    fn cycle_vectors_are_eigenvectors(seed in any::<u64>(), d in 1usize..=12) {
        let p = random_permutation(d, &mut rng(seed));
        for c in p.cycles() {
            for e in cycle_eigensystem(c) {
                let lhs = p.act(&e.amplitudes);
                let rhs = &e.amplitudes * e.eigenvalue();
                prop_assert!((lhs - rhs).norm() < 1e-12);
                prop_assert!((e.amplitudes.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_composes_to_identity(seed in any::<u64>(), d in 1usize..=16) {
        let p = random_permutation(d, &mut rng(seed));
        let q = p.inverse();
        for k in 0..d {
            prop_assert_eq!(q.apply(p.apply(k)), k);
        }
        let notation = p.cycle_notation();
        let parsed: Vec<Vec<usize>> = notation
            .trim_matches(|ch| ch == '(' || ch == ')')
            .split(")(")
            .map(|c| c.split(' ').map(|s| s.parse().unwrap()).collect())
            .collect();
        let refs: Vec<&[usize]> = parsed.iter().map(Vec::as_slice).collect();
        // Orbit order runs against the permutation, so it rebuilds the inverse.
        prop_assert_eq!(Permutation::from_cycles(d, &refs).unwrap(), q);
    }
}
