//! The five-site subset bus: a 3-cycle `(0 2 4)` carrying the logical nodes
//! and a 2-cycle `(1 3)`, with the two zero-phase eigenvectors mixed by
//! `[[α, β], [β*, −α*]]`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::CMatrix;
use crate::permutation::Permutation;
use crate::spectral::{SlotKey, SpectrumSpec};
use crate::Ratio;

/// `|α|² + |β|²` must be 1 to this tolerance.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum D5Error {
    #[error("|alpha|^2 + |beta|^2 = {0}, expected 1")]
    NotNormalized(f64),
    #[error("spectrum does not fit the five-site subset bus: {0}")]
    WrongShape(String),
    #[error("mixing has |alpha| = {0}; the constraint needs 0 < |alpha| < 1")]
    NotCaseTwo(f64),
}

/// Image `[4, 3, 0, 1, 2]`: `0 → 4 → 2 → 0` and `1 ↔ 3`.
pub fn subset_bus_permutation() -> Permutation {
    Permutation::new(vec![4, 3, 0, 1, 2]).expect("valid permutation")
}

pub fn mixing_matrix(alpha: Complex64, beta: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[alpha, beta, beta.conj(), -alpha.conj()])
}

fn check_normalized(alpha: Complex64, beta: Complex64) -> Result<(), D5Error> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(D5Error::NotNormalized(norm));
    }
    Ok(())
}

fn key(n: i64, d: i64, slot: usize) -> SlotKey {
    SlotKey::new(Ratio::new(n, d), slot)
}

/// The five integers of a design on [`subset_bus_permutation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetBusIntegers {
    /// Zero-phase slot mixed as `α v_0^{(3)} + β v_0^{(2)}`.
    pub x0_first: i64,
    /// Zero-phase slot mixed as `β* v_0^{(3)} − α* v_0^{(2)}`.
    pub x0_second: i64,
    pub x_third: i64,
    pub x_half: i64,
    pub x_two_thirds: i64,
}

impl SubsetBusIntegers {
    /// The logical-cycle solution `c, c, c+1, c+2` with `x_{1/2}` free.
    pub fn case_one(c: i64, x_half: i64) -> Self {
        SubsetBusIntegers {
            x0_first: c,
            x0_second: c,
            x_third: c + 1,
            x_half,
            x_two_thirds: c + 2,
        }
    }

    pub fn to_spec(
        &self,
        alpha: Complex64,
        beta: Complex64,
        tau: f64,
    ) -> Result<SpectrumSpec, D5Error> {
        check_normalized(alpha, beta)?;
        Ok(SpectrumSpec::new(tau)
            .with_x(Ratio::new(0, 1), 0, self.x0_first)
            .with_x(Ratio::new(0, 1), 1, self.x0_second)
            .with_x(Ratio::new(1, 3), 0, self.x_third)
            .with_x(Ratio::new(1, 2), 0, self.x_half)
            .with_x(Ratio::new(2, 3), 0, self.x_two_thirds)
            .with_mixing(Ratio::new(0, 1), mixing_matrix(alpha, beta)))
    }

    pub fn from_spec(spec: &SpectrumSpec) -> Result<Self, D5Error> {
        let get = |k: SlotKey| {
            spec.x(k).ok_or_else(|| {
                D5Error::WrongShape(format!(
                    "missing x for phase {} slot {}",
                    k.phase,
                    k.slot + 1
                ))
            })
        };
        let expected = [
            key(0, 1, 0),
            key(0, 1, 1),
            key(1, 3, 0),
            key(1, 2, 0),
            key(2, 3, 0),
        ];
        if let Some(extra) = spec.x_entries().keys().find(|k| !expected.contains(k)) {
            return Err(D5Error::WrongShape(format!(
                "unexpected x for phase {} slot {}",
                extra.phase,
                extra.slot + 1
            )));
        }
        Ok(SubsetBusIntegers {
            x0_first: get(expected[0])?,
            x0_second: get(expected[1])?,
            x_third: get(expected[2])?,
            x_half: get(expected[3])?,
            x_two_thirds: get(expected[4])?,
        })
    }
}

/// Reads `(α, β)` back from the zero-phase mixing of `spec` (identity when
/// absent).
pub fn mixing_parameters(spec: &SpectrumSpec) -> Result<(Complex64, Complex64), D5Error> {
    let Some(b) = spec.mixing(Ratio::new(0, 1)) else {
        return Ok((Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
    };
    if b.shape() != (2, 2) {
        return Err(D5Error::WrongShape(format!(
            "zero-phase mixing is {}x{}",
            b.nrows(),
            b.ncols()
        )));
    }
    let (alpha, beta) = (b[(0, 0)], b[(0, 1)]);
    check_normalized(alpha, beta)?;
    let expected = mixing_matrix(alpha, beta);
    if (b - &expected)
        .iter()
        .any(|z| z.norm() > NORMALIZATION_TOLERANCE)
    {
        return Err(D5Error::WrongShape(
            "zero-phase mixing is not of the form [[a, b], [b*, -a*]]".into(),
        ));
    }
    Ok((alpha, beta))
}

fn phase(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * turns)
}

/// Closed forms for `⟨2|U(t'τ)|0⟩` and `⟨1|U(t'τ)|0⟩` (the latter equals
/// `⟨3|U(t'τ)|0⟩`).
pub fn analytic_matrix_elements_d5(
    x: &SubsetBusIntegers,
    alpha: Complex64,
    beta: Complex64,
    t_frac: f64,
) -> Result<(Complex64, Complex64), D5Error> {
    check_normalized(alpha, beta)?;
    let t = t_frac;
    let first = phase(-(x.x0_first as f64) * t);
    let second = phase(-(x.x0_second as f64) * t);
    let elem_02 = first * (alpha.norm_sqr() / 3.0)
        + second * (beta.norm_sqr() / 3.0)
        + phase((t + 1.0) / 3.0 - x.x_third as f64 * t) / 3.0
        + phase(2.0 * (t + 1.0) / 3.0 - x.x_two_thirds as f64 * t) / 3.0;
    let s6 = 6f64.sqrt();
    let elem_01 = first * (beta * alpha.conj()) / s6 - second * (alpha.conj() * beta) / s6;
    Ok((elem_02, elem_01))
}

/// Whether the zero-phase integers differ by a nonzero even amount, which
/// silences the non-logical sites at `τ/2` once the zero-phase slots mix.
pub fn check_case_ii_constraint(spec: &SpectrumSpec) -> Result<bool, D5Error> {
    let x = SubsetBusIntegers::from_spec(spec)?;
    let (alpha, _) = mixing_parameters(spec)?;
    let a = alpha.norm();
    if a <= NORMALIZATION_TOLERANCE || a >= 1.0 - NORMALIZATION_TOLERANCE {
        return Err(D5Error::NotCaseTwo(a));
    }
    let diff = x.x0_first - x.x0_second;
    Ok(diff != 0 && diff % 2 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_hamiltonian;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_forms_match_evolution() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let x = SubsetBusIntegers {
            x0_first: 3,
            x0_second: -1,
            x_third: 2,
            x_half: 5,
            x_two_thirds: -4,
        };
        let p = subset_bus_permutation();
        let h = build_hamiltonian(&p, &x.to_spec(alpha, beta, 1.3).unwrap()).unwrap();
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let (e02, e01) = analytic_matrix_elements_d5(&x, alpha, beta, t).unwrap();
            assert!((h.amplitude(0, 2, 1.3 * t) - e02).norm() < 1e-12);
            assert!((h.amplitude(0, 1, 1.3 * t) - e01).norm() < 1e-12);
            assert!((h.amplitude(0, 3, 1.3 * t) - e01).norm() < 1e-12);
        }
    }

    #[test]
    fn case_one_reaches_site_two_at_half() {
        let x = SubsetBusIntegers::case_one(0, 7);
        let (e02, _) = analytic_matrix_elements_d5(&x, c(1.0, 0.0), c(0.0, 0.0), 0.5).unwrap();
        assert!((e02.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn case_two_constraint() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.8, 0.0));
        let spec = |d: i64| {
            SubsetBusIntegers {
                x0_first: d,
                ..SubsetBusIntegers::case_one(0, 0)
            }
            .to_spec(alpha, beta, 1.0)
            .unwrap()
        };
        assert_eq!(check_case_ii_constraint(&spec(2)), Ok(true));
        assert_eq!(check_case_ii_constraint(&spec(-4)), Ok(true));
        assert_eq!(check_case_ii_constraint(&spec(0)), Ok(false));
        assert_eq!(check_case_ii_constraint(&spec(1)), Ok(false));
        let unmixed = SubsetBusIntegers::case_one(0, 0)
            .to_spec(c(1.0, 0.0), c(0.0, 0.0), 1.0)
            .unwrap();
        assert!(matches!(
            check_case_ii_constraint(&unmixed),
            Err(D5Error::NotCaseTwo(_))
        ));
        let wrong = SpectrumSpec::new(1.0).with_x(Ratio::new(1, 4), 0, 1);
        assert!(matches!(
            check_case_ii_constraint(&wrong),
            Err(D5Error::WrongShape(_))
        ));
    }

    #[test]
    fn rejects_unnormalized() {
        let x = SubsetBusIntegers::case_one(0, 0);
        assert!(matches!(
            analytic_matrix_elements_d5(&x, c(1.0, 0.0), c(1.0, 0.0), 0.2),
            Err(D5Error::NotNormalized(_))
        ));
    }
}
