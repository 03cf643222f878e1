#![allow(dead_code)]

use num_complex::Complex64;
use pstnet::linalg::CMatrix;
use pstnet::sampling::{random_spec, random_two_cycle_permutation};
use pstnet::{build_hamiltonian, Permutation, PstHamiltonian};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|c| a.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` by scaling, a truncated Taylor series and repeated squaring.
/// Shares no code with the spectral evolution.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / Complex64::new(2f64.powi(s), 0.0);
    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(−iHt)` from the dense matrix.
pub fn oracle_evolution(h: &CMatrix, t: f64) -> CMatrix {
    expm(&(h * Complex64::new(0.0, -t)))
}

/// A random design on `d ≤ max_d` sites with random mixing.
pub fn random_design<R: Rng>(rng: &mut R, max_d: usize) -> (Permutation, PstHamiltonian) {
    let d = rng.gen_range(2..=max_d);
    let p = pstnet::sampling::random_permutation(d, rng);
    let tau = rng.gen_range(0.5..2.0);
    let spec = random_spec(&p, 6, true, tau, rng);
    let h = build_hamiltonian(&p, &spec).expect("random spec is valid");
    (p, h)
}

/// A random design on two cycles of the given sizes.
pub fn random_two_cycle_design<R: Rng>(
    rng: &mut R,
    d0: usize,
    d1: usize,
) -> (Permutation, PstHamiltonian) {
    let p = random_two_cycle_permutation(d0, d1, rng);
    let spec = random_spec(&p, 6, true, 1.0, rng);
    let h = build_hamiltonian(&p, &spec).expect("random spec is valid");
    (p, h)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ratio(n: i64, d: i64) -> pstnet::Ratio {
    pstnet::Ratio::new(n, d)
}

/// Π_a: `0 → 10 → 8 → … → 2 → 0` and `1 → 9 → 7 → 5 → 3 → 1`.
pub fn eleven_site_a() -> Permutation {
    Permutation::from_cycles(11, &[&[0, 10, 8, 6, 4, 2], &[1, 9, 7, 5, 3]]).unwrap()
}

/// Π_b: `0 → 10 → 6 → 3 → 0` and `1 → 9 → 8 → 7 → 5 → 4 → 2 → 1`.
pub fn eleven_site_b() -> Permutation {
    Permutation::from_cycles(11, &[&[0, 10, 6, 3], &[1, 9, 8, 7, 5, 4, 2]]).unwrap()
}

/// Integers for the eleven-site buses, per cycle and indexed by local
/// eigenvalue, written for the reversed orbit orientation.
pub fn eleven_site_values_a() -> Vec<Vec<i64>> {
    vec![
        (0..6).map(|n| 11 - n).collect(),
        (0..5).map(|n| 5 - n).collect(),
    ]
}

pub fn eleven_site_values_b() -> Vec<Vec<i64>> {
    vec![
        (0..4).map(|n| 11 - n).collect(),
        (0..7).map(|n| 11 - n).collect(),
    ]
}
