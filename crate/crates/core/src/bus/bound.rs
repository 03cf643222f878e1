use std::fmt;

use crate::parallel::Execution;
use crate::spectral::{uniform_grid, PstHamiltonian, SimulationError};
use crate::Ratio;

/// Ceiling on the probability of finding an excitation that started on a
/// `d0`-cycle anywhere on a `d1`-cycle site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeakageBound {
    pub d0: usize,
    pub d1: usize,
    /// `min(d0, d1)² / (d0·d1)`.
    pub exact: Ratio,
}

impl LeakageBound {
    pub fn bound(&self) -> f64 {
        *self.exact.numer() as f64 / *self.exact.denom() as f64
    }

    pub fn is_vacuous(&self) -> bool {
        self.d0 == self.d1
    }
}

impl fmt::Display for LeakageBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d0 = {}, d1 = {}: P <= {} ({:.9})",
            self.d0,
            self.d1,
            self.exact,
            self.bound()
        )
    }
}

/// # Panics
/// If either cycle size is zero.
pub fn occupation_bound(d0: usize, d1: usize) -> LeakageBound {
    assert!(d0 >= 1 && d1 >= 1, "cycle sizes must be positive");
    let m = d0.min(d1) as i64;
    LeakageBound {
        d0,
        d1,
        exact: Ratio::new(m * m, (d0 * d1) as i64),
    }
}

/// Largest `P_target(t)` over `samples` uniform times in `[0, span]`.
pub fn sampled_max_probability(
    h: &PstHamiltonian,
    source: usize,
    target: usize,
    span: f64,
    samples: usize,
    exec: Execution,
) -> Result<f64, SimulationError> {
    if target >= h.d() {
        return Err(SimulationError::SiteOutOfRange {
            site: target,
            d: h.d(),
        });
    }
    let trace = h.occupation_probabilities_with(source, &uniform_grid(span, samples), exec)?;
    Ok(trace.max_at(target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        assert_eq!(occupation_bound(3, 2).exact, Ratio::new(2, 3));
        assert_eq!(occupation_bound(2, 3).exact, Ratio::new(2, 3));
        assert_eq!(occupation_bound(4, 2).bound(), 0.5);
        assert_eq!(occupation_bound(5, 5).bound(), 1.0);
        assert!(occupation_bound(5, 5).is_vacuous());
    }
}
