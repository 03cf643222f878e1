//! Perfect-state-transfer Hamiltonians for passive quantum networks with bus
//! logical topology.
//!
//! A design starts from a site permutation `Π` that the evolution must
//! realise at the transfer time `τ`. Its cycle eigenvectors, an integer
//! vector `x` and optional mixing of degenerate eigenvectors pick one
//! Hamiltonian from a family satisfying `exp(−iHτ) = Π`; the [`bus`] module
//! chooses `x` so that the excitation also visits intermediate logical nodes
//! at prescribed fractions of `τ`.

pub mod bus;
pub mod cli;
pub mod config;
pub mod linalg;
pub mod parallel;
pub mod permutation;
pub mod sampling;
pub mod spectral;
pub mod spin;

/// Exact rational used for eigenvalue phases, energies in turns and time
/// fractions.
pub type Ratio = num_rational::Rational64;

/// Fractional part in `[0, 1)`.
pub fn frac_part(r: Ratio) -> Ratio {
    r - r.floor()
}

pub use bus::{
    analytic_matrix_element_ub, compatibility_check, design_subset_bus, occupation_bound,
    universal_bus_permutation, universal_bus_spectrum, CompatibilityVerdict, Design, LeakageBound,
    TransferSchedule,
};
pub use parallel::Execution;
pub use permutation::{
    cycle_decompose, cycle_eigensystem, validate_logical_set, Cycle, CycleEigenpair, Permutation,
};
pub use spectral::{
    build_hamiltonian, group_eigenvalues, EigenvalueClass, EvolutionTrace, PstHamiltonian, SlotKey,
    SpectrumSpec,
};
pub use spin::{from_xy, to_xy, XYModel};
