//! Does one time-independent Hamiltonian generate both `U1` at `τ1` and `U2`
//! at `τ2`? The unitaries must commute; in a joint eigenbasis each pair of
//! eigenvalues `(α, γ)` then needs a single energy `E` with
//! `α = exp(−iEτ1)` and `γ = exp(−iEτ2)` for some choice of logarithm
//! branches.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{commutator, max_abs, max_abs_diff, unitarity_deviation, CMatrix};

pub const UNITARITY_TOLERANCE: f64 = 1e-9;
pub const COMMUTATOR_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_BRANCH_BOUND: i64 = 8;
/// Eigenvalues closer than this are treated as one eigenspace.
const CLUSTER_GAP: f64 = 1e-8;
const BRANCH_TOLERANCE: f64 = 1e-9;
const RECONSTRUCTION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompatError {
    #[error("unitaries have different dimensions: {left}x{left} and {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix {index} is {rows}x{cols}, expected square")]
    NotSquare {
        index: usize,
        rows: usize,
        cols: usize,
    },
    #[error("matrix {index} is not unitary (deviation {deviation:e})")]
    NonUnitary { index: usize, deviation: f64 },
    #[error("times must differ, both are {0}")]
    EqualTimes(f64),
    #[error("times must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("branch bound must be non-negative, got {0}")]
    NegativeBranchBound(i64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum IncompatibilityReason {
    Commutation {
        norm: f64,
    },
    NoBranch {
        /// Eigenvalue phases (radians) of the offending joint eigenspace.
        phases: (f64, f64),
    },
    Reconstruction {
        deviation: f64,
    },
}

impl IncompatibilityReason {
    pub fn label(&self) -> &'static str {
        match self {
            IncompatibilityReason::Commutation { .. } => "commutation",
            IncompatibilityReason::NoBranch { .. } => "no consistent branch assignment",
            IncompatibilityReason::Reconstruction { .. } => "reconstruction",
        }
    }
}

impl fmt::Display for IncompatibilityReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IncompatibilityReason::Commutation { norm } => {
                write!(f, "commutation (|[U1,U2]|max = {norm:e})")
            }
            IncompatibilityReason::NoBranch { phases } => write!(
                f,
                "no consistent branch assignment for eigenvalue phases ({:.9}, {:.9})",
                phases.0, phases.1
            ),
            IncompatibilityReason::Reconstruction { deviation } => {
                write!(f, "reconstruction (deviation {deviation:e})")
            }
        }
    }
}

/// Joint eigenspaces and the energy chosen for each.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonSpectrum {
    /// Orthonormal basis of each joint eigenspace, one matrix per space.
    pub eigenspaces: Vec<CMatrix>,
    pub energies: Vec<f64>,
    pub hamiltonian: CMatrix,
}

impl CommonSpectrum {
    pub fn projector(&self, k: usize) -> CMatrix {
        &self.eigenspaces[k] * self.eigenspaces[k].adjoint()
    }

    /// `exp(−iHt)` from the spectral data.
    pub fn evolution(&self, t: f64) -> CMatrix {
        let d = self.hamiltonian.nrows();
        let mut u = CMatrix::zeros(d, d);
        for (k, &e) in self.energies.iter().enumerate() {
            u += self.projector(k) * Complex64::from_polar(1.0, -e * t);
        }
        u
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityVerdict {
    pub compatible: bool,
    pub common: Option<CommonSpectrum>,
    pub reason: Option<IncompatibilityReason>,
}

impl CompatibilityVerdict {
    fn reject(reason: IncompatibilityReason) -> Self {
        CompatibilityVerdict {
            compatible: false,
            common: None,
            reason: Some(reason),
        }
    }
}

fn check_unitary(index: usize, u: &CMatrix) -> Result<(), CompatError> {
    if !u.is_square() {
        return Err(CompatError::NotSquare {
            index,
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let deviation = unitarity_deviation(u);
    if deviation > UNITARITY_TOLERANCE {
        return Err(CompatError::NonUnitary { index, deviation });
    }
    Ok(())
}

/// Refines every block so that `m` is (block-)diagonal on it.
fn split_blocks(blocks: Vec<CMatrix>, m: &CMatrix) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(blocks.len());
    for q in blocks {
        let restricted = q.adjoint() * m * &q;
        let restricted = (&restricted + restricted.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(restricted);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut start = 0;
        for end in 1..=order.len() {
            let split = end == order.len()
                || eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] >= CLUSTER_GAP;
            if split {
                let cols: Vec<_> = order[start..end]
                    .iter()
                    .map(|&c| eig.eigenvectors.column(c))
                    .collect();
                out.push(&q * CMatrix::from_columns(&cols));
                start = end;
            }
        }
    }
    out
}

/// Hermitian and anti-Hermitian parts of a normal matrix commute and fix its
/// eigenspaces.
fn hermitian_parts(u: &CMatrix) -> [CMatrix; 2] {
    let adj = u.adjoint();
    [
        (u + &adj) * Complex64::new(0.5, 0.0),
        (u - &adj) * Complex64::new(0.0, -0.5),
    ]
}

fn block_eigenvalue(q: &CMatrix, u: &CMatrix) -> Complex64 {
    let r = q.adjoint() * u * q;
    r.trace() / Complex64::new(q.ncols() as f64, 0.0)
}

/// Energy of smallest `(|E|, E)` consistent with both phases.
fn common_energy(theta1: f64, tau1: f64, theta2: f64, tau2: f64, bound: i64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for k in -bound..=bound {
        let e = -(theta1 + TAU * k as f64) / tau1;
        let l = ((-e * tau2 - theta2) / TAU).round();
        if l.abs() > bound as f64 {
            continue;
        }
        let e2 = -(theta2 + TAU * l) / tau2;
        if (e - e2).abs() > BRANCH_TOLERANCE {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => (e.abs(), e) < (b.abs(), b),
        };
        if better {
            best = Some(e);
        }
    }
    best
}

pub fn compatibility_check(
    u1: &CMatrix,
    tau1: f64,
    u2: &CMatrix,
    tau2: f64,
    branch_bound: i64,
) -> Result<CompatibilityVerdict, CompatError> {
    check_unitary(1, u1)?;
    check_unitary(2, u2)?;
    if u1.nrows() != u2.nrows() {
        return Err(CompatError::DimensionMismatch {
            left: u1.nrows(),
            right: u2.nrows(),
        });
    }
    for tau in [tau1, tau2] {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(CompatError::InvalidTime(tau));
        }
    }
    if tau1 == tau2 {
        return Err(CompatError::EqualTimes(tau1));
    }
    if branch_bound < 0 {
        return Err(CompatError::NegativeBranchBound(branch_bound));
    }

    let norm = max_abs(&commutator(u1, u2));
    if norm > COMMUTATOR_TOLERANCE {
        return Ok(CompatibilityVerdict::reject(
            IncompatibilityReason::Commutation { norm },
        ));
    }

    let d = u1.nrows();
    let mut blocks = vec![CMatrix::identity(d, d)];
    for u in [u1, u2] {
        for part in hermitian_parts(u) {
            blocks = split_blocks(blocks, &part);
        }
    }

    let mut energies = Vec::with_capacity(blocks.len());
    for q in &blocks {
        let theta1 = block_eigenvalue(q, u1).arg();
        let theta2 = block_eigenvalue(q, u2).arg();
        match common_energy(theta1, tau1, theta2, tau2, branch_bound) {
            Some(e) => energies.push(e),
            None => {
                return Ok(CompatibilityVerdict::reject(
                    IncompatibilityReason::NoBranch {
                        phases: (theta1, theta2),
                    },
                ))
            }
        }
    }

    let mut hamiltonian = CMatrix::zeros(d, d);
    for (q, &e) in blocks.iter().zip(&energies) {
        hamiltonian += q * q.adjoint() * Complex64::new(e, 0.0);
    }
    let common = CommonSpectrum {
        eigenspaces: blocks,
        energies,
        hamiltonian,
    };
    let deviation =
        max_abs_diff(&common.evolution(tau1), u1).max(max_abs_diff(&common.evolution(tau2), u2));
    if deviation > RECONSTRUCTION_TOLERANCE {
        return Ok(CompatibilityVerdict::reject(
            IncompatibilityReason::Reconstruction { deviation },
        ));
    }
    Ok(CompatibilityVerdict {
        compatible: true,
        common: Some(common),
        reason: None,
    })
}
