//! Spectrum design for bus topologies: schedules, the universal bus, the
//! subset-bus designer, cross-cycle leakage bounds and the compatibility
//! check for pairs of unitaries.

mod bound;
mod compat;
pub mod d5;
mod schedule;
mod subset;
mod universal;

pub use bound::{occupation_bound, sampled_max_probability, LeakageBound};
pub use compat::{
    compatibility_check, CommonSpectrum, CompatError, CompatibilityVerdict, IncompatibilityReason,
    COMMUTATOR_TOLERANCE, DEFAULT_BRANCH_BOUND, UNITARITY_TOLERANCE,
};
pub use schedule::{ScheduleError, Stop, TransferSchedule};
pub use subset::{
    design_subset_bus, design_subset_bus_with, exhaustive_design, from_reversed_orientation,
    verify_schedule, verify_schedule_exact, Design, DesignError, DesignMethod, InfeasibleReport,
    StopReport, DEFAULT_SEARCH_BOUND, STOP_TOLERANCE,
};
pub use universal::{
    analytic_matrix_element_ub, universal_bus_alignment, universal_bus_permutation,
    universal_bus_spectrum, universal_schedule, BusError,
};
