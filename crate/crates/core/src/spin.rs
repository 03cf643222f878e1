//! XY spin-network form of a one-excitation Hamiltonian.
//!
//! With `|m⟩` the state whose only flipped spin is `m`, the pair terms act as
//! `(X_mX_n + Y_mY_n)/2 → |m⟩⟨n| + |n⟩⟨m|` and
//! `(X_mY_n − Y_mX_n)/2 → i|m⟩⟨n| − i|n⟩⟨m|`, so
//! `⟨m|H|n⟩ = J_mn + i·J'_mn` for `m > n`. The ground state sits at zero.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::bus::d5::{D5Error, SubsetBusIntegers, NORMALIZATION_TOLERANCE};
use crate::linalg::CMatrix;
use crate::permutation::Permutation;
use crate::spectral::PstHamiltonian;

/// Symmetry checks and the text format's "nonzero" cut-off.
pub const XY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct XYModel {
    pub d: usize,
    pub tau: f64,
    pub onsite: Vec<f64>,
    /// Coefficient of `(X_mX_n + Y_mY_n)/2`; symmetric.
    pub j: DMatrix<f64>,
    /// Coefficient of `(X_mY_n − Y_mX_n)/2`; antisymmetric.
    pub jp: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum XYError {
    #[error("J is not symmetric at ({m}, {n})")]
    AsymmetricJ { m: usize, n: usize },
    #[error("J' is not antisymmetric at ({m}, {n})")]
    SymmetricJp { m: usize, n: usize },
    #[error("table sizes disagree with d = {0}")]
    Shape(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl XYModel {
    pub fn zeros(d: usize, tau: f64) -> Self {
        XYModel {
            d,
            tau,
            onsite: vec![0.0; d],
            j: DMatrix::zeros(d, d),
            jp: DMatrix::zeros(d, d),
        }
    }

    /// Sets the `(m, n)` pair for `m ≠ n`, keeping the symmetries.
    pub fn set_pair(&mut self, m: usize, n: usize, j: f64, jp: f64) {
        self.j[(m, n)] = j;
        self.j[(n, m)] = j;
        self.jp[(m, n)] = jp;
        self.jp[(n, m)] = -jp;
    }

    pub fn validate(&self) -> Result<(), XYError> {
        let d = self.d;
        if self.onsite.len() != d || self.j.shape() != (d, d) || self.jp.shape() != (d, d) {
            return Err(XYError::Shape(d));
        }
        for m in 0..d {
            for n in 0..=m {
                if (self.j[(m, n)] - self.j[(n, m)]).abs() > XY_TOLERANCE
                    || (m == n && self.j[(m, m)].abs() > XY_TOLERANCE)
                {
                    return Err(XYError::AsymmetricJ { m, n });
                }
                if (self.jp[(m, n)] + self.jp[(n, m)]).abs() > XY_TOLERANCE {
                    return Err(XYError::SymmetricJp { m, n });
                }
            }
        }
        Ok(())
    }

    /// Largest on-site spread inside any cycle of `p`.
    pub fn onsite_spread(&self, p: &Permutation) -> f64 {
        p.cycles()
            .iter()
            .map(|c| {
                let vals = c.members().iter().map(|&m| self.onsite[m]);
                let hi = vals.clone().fold(f64::MIN, f64::max);
                let lo = vals.fold(f64::MAX, f64::min);
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &XYModel) -> f64 {
        let onsite = self
            .onsite
            .iter()
            .zip(&other.onsite)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        let j = (&self.j - &other.j).amax();
        let jp = (&self.jp - &other.jp).amax();
        onsite.max(j).max(jp)
    }
}

pub fn to_xy(h: &PstHamiltonian) -> XYModel {
    matrix_to_xy(h.matrix(), h.tau())
}

pub fn matrix_to_xy(h: &CMatrix, tau: f64) -> XYModel {
    let d = h.nrows();
    let mut model = XYModel::zeros(d, tau);
    for m in 0..d {
        model.onsite[m] = h[(m, m)].re;
        for n in 0..m {
            let z = h[(m, n)];
            model.set_pair(m, n, z.re, z.im);
        }
    }
    model
}

pub fn from_xy(model: &XYModel) -> Result<CMatrix, XYError> {
    model.validate()?;
    let d = model.d;
    Ok(CMatrix::from_fn(d, d, |m, n| {
        if m == n {
            Complex64::new(model.onsite[m], 0.0)
        } else {
            Complex64::new(model.j[(m, n)], model.jp[(m, n)])
        }
    }))
}

/// Couplings of the five-site subset bus written out directly in terms of the
/// energies `ε = 2π(x − phase)`.
pub fn appendix_b_closed_form(
    x: &SubsetBusIntegers,
    alpha: Complex64,
    beta: Complex64,
    tau: f64,
) -> Result<XYModel, D5Error> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(D5Error::NotNormalized(norm));
    }
    let e01 = TAU * x.x0_first as f64;
    let e02 = TAU * x.x0_second as f64;
    let e13 = TAU * (x.x_third as f64 - 1.0 / 3.0);
    let e23 = TAU * (x.x_two_thirds as f64 - 2.0 / 3.0);
    let epi = TAU * (x.x_half as f64 - 0.5);
    let (a2, b2) = (alpha.norm_sqr(), beta.norm_sqr());

    let mut model = XYModel::zeros(5, tau);
    let logical_onsite = (a2 * e01 + b2 * e02 + e13 + e23) / (3.0 * tau);
    let other_onsite = (b2 * e01 + a2 * e02 + epi) / (2.0 * tau);
    for m in [0, 2, 4] {
        model.onsite[m] = logical_onsite;
    }
    for m in [1, 3] {
        model.onsite[m] = other_onsite;
    }

    let j_logical = (a2 * e01 + b2 * e02 - (e13 + e23) / 2.0) / (3.0 * tau);
    let jp_logical = (e13 - e23) / (2.0 * 3f64.sqrt() * tau);
    model.set_pair(2, 0, j_logical, jp_logical);
    model.set_pair(4, 0, j_logical, -jp_logical);
    model.set_pair(4, 2, j_logical, jp_logical);

    model.set_pair(3, 1, (b2 * e01 + a2 * e02 - epi) / (2.0 * tau), 0.0);

    let k = alpha * beta.conj() * ((e01 - e02) / (6f64.sqrt() * tau));
    for m in [0, 2, 4] {
        for n in [1, 3] {
            // ⟨m|H|n⟩ = k for m on the logical cycle.
            if m > n {
                model.set_pair(m, n, k.re, k.im);
            } else {
                model.set_pair(n, m, k.re, -k.im);
            }
        }
    }
    Ok(model)
}

impl fmt::Display for XYModel {
    /// `d tau`, then `m n J J'` for `m > n`, then `m onsite`. Values below
    /// the tolerance print as zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let snap = |v: f64| if v.abs() <= XY_TOLERANCE { 0.0 } else { v };
        writeln!(f, "{} {}", self.d, self.tau)?;
        for m in 0..self.d {
            for n in 0..m {
                let (j, jp) = (snap(self.j[(m, n)]), snap(self.jp[(m, n)]));
                if j != 0.0 || jp != 0.0 {
                    writeln!(f, "{m} {n} {j:.11e} {jp:.11e}")?;
                }
            }
        }
        for (m, e) in self.onsite.iter().enumerate() {
            writeln!(f, "{m} {:.11e}", snap(*e))?;
        }
        Ok(())
    }
}

impl FromStr for XYModel {
    type Err = XYError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, msg: String| XYError::Parse { line, msg };
        let mut lines = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing header".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        let [d, tau] = head[..] else {
            return Err(err(1, format!("expected `d tau`, got `{header}`")));
        };
        let d: usize = d.parse().map_err(|e| err(1, format!("d: {e}")))?;
        let tau: f64 = tau.parse().map_err(|e| err(1, format!("tau: {e}")))?;
        let mut model = XYModel::zeros(d, tau);
        for (i, line) in lines {
            let no = i + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let site = |s: &str| -> Result<usize, XYError> {
                let m: usize = s.parse().map_err(|e| err(no, format!("site `{s}`: {e}")))?;
                if m >= d {
                    return Err(err(no, format!("site {m} out of range for d = {d}")));
                }
                Ok(m)
            };
            let value = |s: &str| -> Result<f64, XYError> {
                s.parse().map_err(|e| err(no, format!("value `{s}`: {e}")))
            };
            match fields[..] {
                [m, n, j, jp] => {
                    let (m, n) = (site(m)?, site(n)?);
                    if m <= n {
                        return Err(err(no, format!("coupling rows need m > n, got {m} {n}")));
                    }
                    model.set_pair(m, n, value(j)?, value(jp)?);
                }
                [m, e] => model.onsite[site(m)?] = value(e)?,
                _ => return Err(err(no, format!("unrecognised row `{line}`"))),
            }
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bus::d5::subset_bus_permutation;
    use crate::linalg::max_abs_diff;
    use crate::spectral::build_hamiltonian;

    #[test]
    fn closed_form_agrees_with_construction() {
        let (alpha, beta) = (Complex64::new(0.6, 0.48), Complex64::new(0.0, 0.64));
        let x = SubsetBusIntegers {
            x0_first: 2,
            x0_second: -3,
            x_third: 1,
            x_half: 4,
            x_two_thirds: 0,
        };
        let h = build_hamiltonian(
            &subset_bus_permutation(),
            &x.to_spec(alpha, beta, 0.7).unwrap(),
        )
        .unwrap();
        let closed = appendix_b_closed_form(&x, alpha, beta, 0.7).unwrap();
        assert!(to_xy(&h).max_abs_diff(&closed) < 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let x = SubsetBusIntegers::case_one(1, 2);
        let model =
            appendix_b_closed_form(&x, Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6), 1.0)
                .unwrap();
        let back: XYModel = model.to_string().parse().unwrap();
        assert!(back.max_abs_diff(&model) < 1e-10);
        assert_eq!(back.to_string(), model.to_string());
    }

    #[test]
    fn zero_model_and_asymmetry() {
        let z = XYModel::zeros(3, 1.0);
        assert_eq!(from_xy(&z).unwrap(), CMatrix::zeros(3, 3));
        let mut bad = z.clone();
        bad.j[(0, 1)] = 1.0;
        assert_eq!(from_xy(&bad), Err(XYError::AsymmetricJ { m: 1, n: 0 }));
        let mut bad = z;
        bad.jp[(0, 1)] = 1.0;
        bad.jp[(1, 0)] = 1.0;
        assert_eq!(from_xy(&bad), Err(XYError::SymmetricJp { m: 1, n: 0 }));
    }

    #[test]
    fn round_trip_matrix() {
        let x = SubsetBusIntegers::case_one(0, 3);
        let h = build_hamiltonian(
            &subset_bus_permutation(),
            &x.to_spec(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), 1.0)
                .unwrap(),
        )
        .unwrap();
        assert!(max_abs_diff(&from_xy(&to_xy(&h)).unwrap(), h.matrix()) < 1e-12);
    }
}
