use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::Ratio;

/// A scheduled arrival: the excitation must sit on `site` at `fraction · τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stop {
    pub site: usize,
    pub fraction: Ratio,
}

impl Stop {
    pub fn new(site: usize, fraction: Ratio) -> Self {
        Stop { site, fraction }
    }
}

impl fmt::Display for Stop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "site {} at t/tau = {}", self.site, self.fraction)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("schedule has no stops")]
    NoStops,
    #[error("stop at site {site}: fraction {fraction} outside (0, 1]")]
    FractionOutOfRange { site: usize, fraction: Ratio },
    #[error("stop at site {site}: fractions must be strictly increasing")]
    NotIncreasing { site: usize },
    #[error("final stop must be at t/tau = 1, got {0}")]
    FinalNotOne(Ratio),
    #[error("site {0} occurs more than once in the schedule")]
    RepeatedSite(usize),
    #[error("need at least two logical nodes, got {0}")]
    TooFewNodes(usize),
}

/// Ordered arrivals of an excitation launched from `source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferSchedule {
    source: usize,
    stops: Vec<Stop>,
}

impl TransferSchedule {
    pub fn new(source: usize, stops: Vec<Stop>) -> Result<Self, ScheduleError> {
        let last = stops.last().ok_or(ScheduleError::NoStops)?;
        if last.fraction != Ratio::one() {
            return Err(ScheduleError::FinalNotOne(last.fraction));
        }
        let mut seen = vec![source];
        let mut prev = Ratio::zero();
        for s in &stops {
            if s.fraction <= Ratio::zero() || s.fraction > Ratio::one() {
                return Err(ScheduleError::FractionOutOfRange {
                    site: s.site,
                    fraction: s.fraction,
                });
            }
            if s.fraction <= prev {
                return Err(ScheduleError::NotIncreasing { site: s.site });
            }
            if seen.contains(&s.site) {
                return Err(ScheduleError::RepeatedSite(s.site));
            }
            seen.push(s.site);
            prev = s.fraction;
        }
        Ok(TransferSchedule { source, stops })
    }

    pub fn from_pairs(source: usize, stops: &[(usize, Ratio)]) -> Result<Self, ScheduleError> {
        Self::new(
            source,
            stops.iter().map(|&(s, f)| Stop::new(s, f)).collect(),
        )
    }

    /// `logical[0]` is the source; the `j`-th following node is reached at
    /// `j/(L−1)` of the transfer time.
    pub fn evenly_spaced(logical: &[usize]) -> Result<Self, ScheduleError> {
        if logical.len() < 2 {
            return Err(ScheduleError::TooFewNodes(logical.len()));
        }
        let last = (logical.len() - 1) as i64;
        let stops = logical[1..]
            .iter()
            .enumerate()
            .map(|(j, &site)| Stop::new(site, Ratio::new(j as i64 + 1, last)))
            .collect();
        Self::new(logical[0], stops)
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn stops(&self) -> &[Stop] {
        &self.stops
    }

    pub fn final_site(&self) -> usize {
        self.stops.last().expect("non-empty").site
    }

    /// Source followed by the stop sites in transfer order.
    pub fn logical_set(&self) -> Vec<usize> {
        std::iter::once(self.source)
            .chain(self.stops.iter().map(|s| s.site))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Ratio {
        Ratio::new(n, d)
    }

    #[test]
    fn evenly_spaced_uses_ordinal_positions() {
        let s = TransferSchedule::evenly_spaced(&[0, 3, 6, 10]).unwrap();
        let fr: Vec<_> = s.stops().iter().map(|s| s.fraction).collect();
        assert_eq!(fr, vec![r(1, 3), r(2, 3), r(1, 1)]);
        assert_eq!(s.logical_set(), vec![0, 3, 6, 10]);
        assert_eq!(s.final_site(), 10);
    }

    #[test]
    fn rejects_bad_schedules() {
        use ScheduleError::*;
        assert_eq!(TransferSchedule::from_pairs(0, &[]), Err(NoStops));
        assert_eq!(
            TransferSchedule::from_pairs(0, &[(1, r(1, 2))]),
            Err(FinalNotOne(r(1, 2)))
        );
        assert_eq!(
            TransferSchedule::from_pairs(0, &[(1, r(2, 3)), (2, r(1, 3)), (3, r(1, 1))]),
            Err(NotIncreasing { site: 2 })
        );
        assert_eq!(
            TransferSchedule::from_pairs(0, &[(2, r(1, 2)), (2, r(1, 1))]),
            Err(RepeatedSite(2))
        );
        assert_eq!(
            TransferSchedule::from_pairs(0, &[(0, r(1, 1))]),
            Err(RepeatedSite(0))
        );
        assert_eq!(
            TransferSchedule::from_pairs(0, &[(1, r(-1, 2)), (2, r(1, 1))]),
            Err(FractionOutOfRange {
                site: 1,
                fraction: r(-1, 2)
            })
        );
        assert_eq!(TransferSchedule::evenly_spaced(&[4]), Err(TooFewNodes(1)));
    }
}
