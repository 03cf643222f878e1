use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

use super::schedule::TransferSchedule;
use crate::linalg::cis_turns;
use crate::permutation::Permutation;
use crate::spectral::{SlotKey, SpectrumSpec};
use crate::{frac_part, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BusError {
    #[error("a universal bus needs at least two sites, got {0}")]
    TooFewSites(usize),
}

/// `|d−1⟩⟨0| + Σ_{m} |m⟩⟨m+1|`: site 0 goes to `d−1` and every other site
/// steps down by one.
pub fn universal_bus_permutation(d: usize) -> Permutation {
    assert!(d >= 1, "universal bus needs at least one site");
    let image = (0..d).map(|m| if m == 0 { d - 1 } else { m - 1 }).collect();
    Permutation::new(image).expect("cyclic shift is a bijection")
}

/// Visits `0 → 1 → … → d−1`, site `m` at `m/(d−1)`.
pub fn universal_schedule(d: usize) -> Result<TransferSchedule, BusError> {
    if d < 2 {
        return Err(BusError::TooFewSites(d));
    }
    let logical: Vec<usize> = (0..d).collect();
    Ok(TransferSchedule::evenly_spaced(&logical).expect("distinct sites, evenly spaced"))
}

/// `x_n = c + n + (d−1)·f(n)` on the single cycle of the universal bus,
/// with `τ = 1`.
pub fn universal_bus_spectrum<F>(d: usize, f: F, c: i64) -> Result<SpectrumSpec, BusError>
where
    F: Fn(usize) -> i64,
{
    if d < 2 {
        return Err(BusError::TooFewSites(d));
    }
    let mut spec = SpectrumSpec::new(1.0);
    for n in 0..d {
        let x = c + n as i64 + (d as i64 - 1) * f(n);
        spec.set_x(SlotKey::new(Ratio::new(n as i64, d as i64), 0), x);
    }
    Ok(spec)
}

/// Closed-form `⟨m|U(t)|0⟩` for the universal bus:
/// `(1/d) Σ_n exp[2πi n(t'+m)/d − 2πi x_n t']`, `x[n]` indexed by `n`.
pub fn analytic_matrix_element_ub(d: usize, x: &[i64], m: usize, t_frac: f64) -> Complex64 {
    assert_eq!(x.len(), d, "one x per eigenvalue");
    let sum: Complex64 = (0..d)
        .map(|n| {
            let n_f = n as f64;
            cis_turns(n_f * (t_frac + m as f64) / d as f64 - x[n] as f64 * t_frac)
        })
        .sum();
    sum / d as f64
}

/// Exact version of the same element's phase condition: returns the common
/// phase (turns in `[0,1)`) when all `d` terms align at `t' = t_frac`.
pub fn universal_bus_alignment(d: usize, x: &[i64], m: usize, t_frac: Ratio) -> Option<Ratio> {
    assert_eq!(x.len(), d, "one x per eigenvalue");
    let mut common = None;
    for (n, &xn) in x.iter().enumerate() {
        let n = n as i64;
        let turns = frac_part(
            Ratio::new(n, d as i64) * (t_frac + Ratio::from_integer(m as i64)) - t_frac * xn,
        );
        match common {
            None => common = Some(turns),
            Some(c) if c != turns => return None,
            _ => {}
        }
    }
    common.or(Some(Ratio::zero()))
}
