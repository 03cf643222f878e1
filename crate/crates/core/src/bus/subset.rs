//! Integer spectra for bus schedules over a subset of the sites.
//!
//! With identity mixing every eigenvector lives on a single cycle, so only the
//! `d_0` entries of `x` belonging to the source cycle influence where the
//! excitation goes. Perfect arrival at stop `j` (cycle offset `Δ_j`, time
//! fraction `t_j`) means the `d_0` terms
//!
//! ```text
//! n·Δ_j/d_0 − (x_n − n/d_0)·t_j        (turns, mod 1)
//! ```
//!
//! coincide. Relative to the `n = 0` term each `x_n` is constrained
//! independently of the others, which turns the box search into one scan per
//! `x_0` value.

use std::fmt;

use thiserror::Error;

use super::schedule::{Stop, TransferSchedule};
use crate::parallel::{self, Execution};
use crate::permutation::{validate_logical_set, LogicalSetError, Permutation};
use crate::spectral::{
    cycle_slot_key, slot_keys, PstHamiltonian, SimulationError, SlotKey, SpectrumSpec,
};
use crate::{frac_part, Ratio};

pub const DEFAULT_SEARCH_BOUND: i64 = 8;
/// Float re-verification tolerance on `|⟨stop|U|source⟩|`.
pub const STOP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignMethod {
    /// The schedule walks the whole source cycle at `j/(d_0−1)`, solved by
    /// `x_n = n` on the source cycle.
    CycleBus,
    /// Lexicographically smallest solution in the integer box.
    BoxSearch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibleReport {
    pub search_bound: i64,
    /// Index into the schedule of the first stop that cannot be met together
    /// with the stops before it.
    pub stop_index: usize,
    pub blocking_stop: Stop,
}

impl fmt::Display for InfeasibleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no integer spectrum with |x| <= {} reaches stop {} ({}) together with the earlier stops",
            self.search_bound,
            self.stop_index + 1,
            self.blocking_stop
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    Feasible {
        spec: SpectrumSpec,
        method: DesignMethod,
    },
    Infeasible(InfeasibleReport),
}

impl Design {
    pub fn spec(&self) -> Option<&SpectrumSpec> {
        match self {
            Design::Feasible { spec, .. } => Some(spec),
            Design::Infeasible(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error(transparent)]
    Logical(#[from] LogicalSetError),
    #[error("permutation sends source {source_site} to {maps_to}, but the schedule ends at {final_site}")]
    EndpointMismatch {
        source_site: usize,
        maps_to: usize,
        final_site: usize,
    },
    #[error("search bound must be non-negative, got {0}")]
    NegativeBound(i64),
}

/// The constrained part of a design problem: the source cycle.
struct SourceCycleProblem {
    d0: i64,
    /// Slot key of local eigenvalue `n` of the source cycle.
    keys: Vec<SlotKey>,
    /// `(Δ_j, t_j)` per stop.
    stops: Vec<(i64, Ratio)>,
}

impl SourceCycleProblem {
    fn new(p: &Permutation, schedule: &TransferSchedule) -> Self {
        let ci = p.cycle_index(schedule.source());
        let cycle = &p.cycles()[ci];
        let d0 = cycle.len() as i64;
        let keys = (0..cycle.len()).map(|n| cycle_slot_key(p, ci, n)).collect();
        let z0 = cycle.position(schedule.source()).unwrap() as i64;
        let stops = schedule
            .stops()
            .iter()
            .map(|s| (cycle.position(s.site).unwrap() as i64 - z0, s.fraction))
            .collect();
        SourceCycleProblem { d0, keys, stops }
    }

    /// Phase of term `n` at stop `j`, in turns mod 1.
    fn term(&self, n: i64, xn: i64, stop: usize) -> Ratio {
        let (shift, t) = self.stops[stop];
        frac_part(
            Ratio::new(n * shift, self.d0) - (Ratio::from_integer(xn) - Ratio::new(n, self.d0)) * t,
        )
    }

    /// Smallest `x_n ∈ [−B, B]` lining up with the `n = 0` term for the
    /// first `upto` stops.
    fn min_component(&self, n: i64, x0: i64, bound: i64, upto: usize) -> Option<i64> {
        (-bound..=bound).find(|&xn| (0..upto).all(|j| self.term(n, xn, j) == self.term(0, x0, j)))
    }

    fn solve(&self, bound: i64, upto: usize, exec: Execution) -> Option<Vec<i64>> {
        parallel::find_first(exec, -bound, bound, |x0| {
            let mut xs = vec![x0];
            for n in 1..self.d0 {
                xs.push(self.min_component(n, x0, bound, upto)?);
            }
            Some(xs)
        })
    }

    /// Stop `j` reached with every term aligned, checked directly.
    fn aligned(&self, xs: &[i64], stop: usize) -> bool {
        let first = self.term(0, xs[0], stop);
        (1..self.d0).all(|n| self.term(n, xs[n as usize], stop) == first)
    }

    fn matches_cycle_bus(&self, bound: i64) -> bool {
        let d0 = self.d0;
        d0 >= 2
            && d0 - 1 <= bound
            && self.stops.len() as i64 == d0 - 1
            && self.stops.iter().enumerate().all(|(j, &(shift, t))| {
                let j = j as i64 + 1;
                shift.rem_euclid(d0) == j && t == Ratio::new(j, d0 - 1)
            })
    }
}

fn check_inputs(
    p: &Permutation,
    schedule: &TransferSchedule,
    bound: i64,
) -> Result<(), DesignError> {
    if bound < 0 {
        return Err(DesignError::NegativeBound(bound));
    }
    validate_logical_set(p, &schedule.logical_set())?;
    let maps_to = p.apply(schedule.source());
    if maps_to != schedule.final_site() {
        return Err(DesignError::EndpointMismatch {
            source_site: schedule.source(),
            maps_to,
            final_site: schedule.final_site(),
        });
    }
    Ok(())
}

fn assemble(
    p: &Permutation,
    problem: &SourceCycleProblem,
    source_x: &[i64],
    free: i64,
) -> SpectrumSpec {
    let mut spec = SpectrumSpec::new(1.0);
    for key in slot_keys(p) {
        spec.set_x(key, free);
    }
    for (key, &x) in problem.keys.iter().zip(source_x) {
        spec.set_x(*key, x);
    }
    spec
}

/// Finds an integer spectrum (identity mixing, `τ = 1`) that delivers the
/// excitation to every stop of `schedule` at its time.
///
/// When the schedule walks the whole source cycle at `j/(d_0−1)`, the
/// closed-form solution `x_n = n` (0 elsewhere) is returned. Otherwise the
/// lexicographically smallest `x` in `[−B, B]^d` (flattened slot order) is
/// returned; entries off the source cycle do not affect the transfer and are
/// therefore `−B`.
pub fn design_subset_bus(
    p: &Permutation,
    schedule: &TransferSchedule,
    search_bound: i64,
) -> Result<Design, DesignError> {
    design_subset_bus_with(p, schedule, search_bound, Execution::default())
}

pub fn design_subset_bus_with(
    p: &Permutation,
    schedule: &TransferSchedule,
    search_bound: i64,
    exec: Execution,
) -> Result<Design, DesignError> {
    check_inputs(p, schedule, search_bound)?;
    let problem = SourceCycleProblem::new(p, schedule);

    if problem.matches_cycle_bus(search_bound) {
        let xs: Vec<i64> = (0..problem.d0).collect();
        return Ok(Design::Feasible {
            spec: assemble(p, &problem, &xs, 0),
            method: DesignMethod::CycleBus,
        });
    }

    let all = problem.stops.len();
    if let Some(xs) = problem.solve(search_bound, all, exec) {
        debug_assert!((0..all).all(|j| problem.aligned(&xs, j)));
        return Ok(Design::Feasible {
            spec: assemble(p, &problem, &xs, -search_bound),
            method: DesignMethod::BoxSearch,
        });
    }

    let stop_index = (1..=all)
        .find(|&upto| problem.solve(search_bound, upto, exec).is_none())
        .expect("full schedule is infeasible")
        - 1;
    Ok(Design::Infeasible(InfeasibleReport {
        search_bound,
        stop_index,
        blocking_stop: schedule.stops()[stop_index],
    }))
}

/// Brute-force reference: enumerates every source-cycle assignment in the box
/// in lexicographic order and returns the first one aligning all stops.
/// Cost is `(2B+1)^{d_0}`; meant for small cycles.
pub fn exhaustive_design(
    p: &Permutation,
    schedule: &TransferSchedule,
    search_bound: i64,
    exec: Execution,
) -> Result<Option<SpectrumSpec>, DesignError> {
    check_inputs(p, schedule, search_bound)?;
    let problem = SourceCycleProblem::new(p, schedule);
    let d0 = problem.d0 as usize;
    let width = (2 * search_bound + 1) as u64;
    let inner = width.pow(d0 as u32 - 1);
    let found = parallel::find_first(exec, -search_bound, search_bound, |x0| {
        let mut xs = vec![x0; d0];
        (0..inner).find_map(|mut code| {
            for slot in xs[1..].iter_mut().rev() {
                *slot = (code % width) as i64 - search_bound;
                code /= width;
            }
            (0..problem.stops.len())
                .all(|j| problem.aligned(&xs, j))
                .then(|| xs.clone())
        })
    });
    Ok(found.map(|xs| assemble(p, &problem, &xs, -search_bound)))
}

/// Rewrites per-cycle integers given in the opposite orbit orientation
/// (eigenvectors `Σ λ^{−ζ}|ζ⟩`, energies `2π(x + n/d_i)`) into this crate's
/// labelling. Both describe the same Hamiltonian.
pub fn from_reversed_orientation(values: &[Vec<i64>]) -> Vec<Vec<i64>> {
    values
        .iter()
        .map(|xs| {
            let len = xs.len();
            (0..len)
                .map(|m| if m == 0 { xs[0] } else { xs[len - m] + 1 })
                .collect()
        })
        .collect()
}

/// Per-stop result of verifying a design.
#[derive(Debug, Clone, PartialEq)]
pub struct StopReport {
    pub stop: Stop,
    pub magnitude: f64,
    /// Exact phase alignment verdict, when the source cycle is unmixed.
    pub exact: Option<bool>,
}

impl StopReport {
    pub fn passed(&self) -> bool {
        self.exact.unwrap_or(true) && (self.magnitude - 1.0).abs() <= STOP_TOLERANCE
    }
}

/// Exact alignment verdict for every stop.
pub fn verify_schedule_exact(
    h: &PstHamiltonian,
    schedule: &TransferSchedule,
) -> Result<Vec<bool>, SimulationError> {
    schedule
        .stops()
        .iter()
        .map(|s| {
            h.exact_transfer_phase(schedule.source(), s.site, s.fraction)
                .map(|phase| phase.is_some())
        })
        .collect()
}

/// Float fidelity at each stop plus the exact verdict where available.
pub fn verify_schedule(
    h: &PstHamiltonian,
    schedule: &TransferSchedule,
) -> Result<Vec<StopReport>, SimulationError> {
    schedule
        .stops()
        .iter()
        .map(|s| {
            let t = h.tau() * crate::spectral::ratio_to_f64(s.fraction);
            let magnitude = h.transfer_fidelity(schedule.source(), s.site, t)?.magnitude;
            let exact = match h.exact_transfer_phase(schedule.source(), s.site, s.fraction) {
                Ok(phase) => Some(phase.is_some()),
                Err(SimulationError::MixedSourceClass(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(StopReport {
                stop: *s,
                magnitude,
                exact,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bus::d5::subset_bus_permutation;
    use crate::bus::universal::universal_bus_permutation;
    use crate::spectral::build_hamiltonian;
    use num_traits::One;

    /// Builds the design's Hamiltonian and checks it both ways.
    fn design_is_sound(p: &Permutation, spec: &SpectrumSpec, schedule: &TransferSchedule) -> bool {
        let Ok(h) = build_hamiltonian(p, spec) else {
            return false;
        };
        matches!(verify_schedule(&h, schedule), Ok(r) if r.iter().all(|s| s.exact == Some(true) && s.passed()))
    }

    fn r(n: i64, d: i64) -> Ratio {
        Ratio::new(n, d)
    }

    #[test]
    fn five_site_case_one() {
        let p = subset_bus_permutation();
        let s = TransferSchedule::from_pairs(0, &[(2, r(1, 2)), (4, r(1, 1))]).unwrap();
        let Design::Feasible { spec, method } = design_subset_bus(&p, &s, 8).unwrap() else {
            panic!("feasible expected");
        };
        assert_eq!(method, DesignMethod::CycleBus);
        let c = spec.x(SlotKey::new(r(0, 1), 0)).unwrap();
        assert_eq!(spec.x(SlotKey::new(r(0, 1), 1)), Some(c));
        assert_eq!(spec.x(SlotKey::new(r(1, 3), 0)), Some(c + 1));
        assert_eq!(spec.x(SlotKey::new(r(2, 3), 0)), Some(c + 2));
        assert!(design_is_sound(&p, &spec, &s));
    }

    #[test]
    fn swap_uses_universal_solution() {
        let p = universal_bus_permutation(2);
        let s = TransferSchedule::from_pairs(0, &[(1, Ratio::one())]).unwrap();
        let d = design_subset_bus(&p, &s, 8).unwrap();
        assert_eq!(d.spec().unwrap().flatten(&p).unwrap(), vec![0, 1]);
    }

    #[test]
    fn point_to_point_on_a_larger_cycle_is_lexicographic_minimum() {
        // Stops not on the cycle-bus pattern fall back to the box search.
        let p = universal_bus_permutation(4);
        let s = TransferSchedule::from_pairs(0, &[(3, Ratio::one())]).unwrap();
        let d = design_subset_bus(&p, &s, 2).unwrap();
        assert_eq!(d.spec().unwrap().flatten(&p).unwrap(), vec![-2, -2, -2, -2]);
    }

    #[test]
    fn infeasible_stop_is_reported() {
        // Offset 1 on a 3-cycle at t = 1/3 never aligns.
        let p = subset_bus_permutation();
        let s = TransferSchedule::from_pairs(0, &[(2, r(1, 3)), (4, Ratio::one())]).unwrap();
        match design_subset_bus(&p, &s, 4).unwrap() {
            Design::Infeasible(rep) => {
                assert_eq!(rep.stop_index, 0);
                assert_eq!(rep.blocking_stop.site, 2);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn input_errors() {
        let p = subset_bus_permutation();
        let s = TransferSchedule::from_pairs(0, &[(1, r(1, 2)), (4, Ratio::one())]).unwrap();
        assert!(matches!(
            design_subset_bus(&p, &s, 8),
            Err(DesignError::Logical(_))
        ));
        let s = TransferSchedule::from_pairs(0, &[(4, r(1, 2)), (2, Ratio::one())]).unwrap();
        assert_eq!(
            design_subset_bus(&p, &s, 8),
            Err(DesignError::EndpointMismatch {
                source_site: 0,
                maps_to: 4,
                final_site: 2
            })
        );
        let s = TransferSchedule::from_pairs(0, &[(4, Ratio::one())]).unwrap();
        assert_eq!(
            design_subset_bus(&p, &s, -1),
            Err(DesignError::NegativeBound(-1))
        );
    }

    #[test]
    fn search_matches_brute_force() {
        let p = subset_bus_permutation();
        let s = TransferSchedule::from_pairs(0, &[(2, r(1, 4)), (4, Ratio::one())]).unwrap();
        let fast = design_subset_bus(&p, &s, 5).unwrap();
        let slow = exhaustive_design(&p, &s, 5, Execution::Sequential).unwrap();
        assert_eq!(fast.spec(), slow.as_ref());
    }
}
