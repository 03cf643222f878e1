//! Random permutations, unitaries and designs for ensembles and benchmarks.

use nalgebra::QR;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;
use crate::permutation::Permutation;
use crate::spectral::{group_eigenvalues, slot_keys, SpectrumSpec};

/// Haar-distributed `n×n` unitary (QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal divided out).
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / std::f64::consts::SQRT_2
    });
    let qr = QR::new(z);
    let (mut q, r) = qr.unpack();
    for k in 0..n {
        let rk = r[(k, k)];
        let ph = if rk.norm() > 0.0 {
            rk / rk.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= ph;
    }
    q
}

pub fn random_permutation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Permutation {
    let mut image: Vec<usize> = (0..d).collect();
    image.shuffle(rng);
    Permutation::new(image).expect("shuffle is a bijection")
}

/// Two disjoint cycles of sizes `d0` and `d1` on randomly chosen labels.
pub fn random_two_cycle_permutation<R: Rng + ?Sized>(
    d0: usize,
    d1: usize,
    rng: &mut R,
) -> Permutation {
    let mut labels: Vec<usize> = (0..d0 + d1).collect();
    labels.shuffle(rng);
    let (a, b) = labels.split_at(d0);
    Permutation::from_cycles(d0 + d1, &[a, b]).expect("disjoint cycles")
}

/// Uniform integers in `[−bound, bound]` for every slot; with `mix`, a Haar
/// mixing matrix for every degenerate eigenvalue.
pub fn random_spec<R: Rng + ?Sized>(
    p: &Permutation,
    bound: i64,
    mix: bool,
    tau: f64,
    rng: &mut R,
) -> SpectrumSpec {
    let mut spec = SpectrumSpec::new(tau);
    for key in slot_keys(p) {
        spec.set_x(key, rng.gen_range(-bound..=bound));
    }
    if mix {
        for class in group_eigenvalues(p.cycles()) {
            if class.multiplicity() > 1 {
                spec.set_mixing(class.phase, haar_unitary(class.multiplicity(), rng));
            }
        }
    }
    spec
}

/// Random unit-norm pair `(α, β)`.
pub fn random_mixing_pair<R: Rng + ?Sized>(rng: &mut R) -> (Complex64, Complex64) {
    let u = haar_unitary(2, rng);
    (u[(0, 0)], u[(0, 1)])
}
