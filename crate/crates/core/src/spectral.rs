//! Hamiltonians assembled from permutation eigen-systems.
//!
//! Every eigenvalue `λ = exp(i2π·phase)` of the permutation owns `η` slots,
//! one per cycle carrying it (cycles ordered by smallest member). A slot is
//! given an integer `x`, and its eigenvector energy is
//! `ε = 2π(x − phase)`, so `exp(−iε) = λ` and the evolution lands exactly on
//! the permutation at `t = τ`. Energies are kept as exact rationals in turns
//! (`ε / 2π`) next to their float values, which lets schedule checks at
//! rational times be decided without tolerances.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use thiserror::Error;

use crate::linalg::{cis_turns, max_abs_diff, projector, unitarity_deviation, CMatrix, CVector};
use crate::parallel::{self, Execution};
use crate::permutation::{cycle_eigensystem, Cycle, Permutation};
use crate::{frac_part, Ratio};

/// Mixing matrices must be unitary to this tolerance.
pub const MIXING_TOLERANCE: f64 = 1e-12;
/// Tolerance on `|U(τ)|` when comparing with a permutation pattern.
pub const PERMUTATION_TOLERANCE: f64 = 1e-9;

/// Key of one `x` entry: eigenvalue phase and 0-based slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotKey {
    pub phase: Ratio,
    pub slot: usize,
}

impl SlotKey {
    pub fn new(phase: Ratio, slot: usize) -> Self {
        SlotKey { phase, slot }
    }
}

/// Cycles sharing one eigenvalue of the permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenvalueClass {
    pub phase: Ratio,
    /// Cycle indices, in cycle order.
    pub slots: Vec<usize>,
}

impl EigenvalueClass {
    pub fn multiplicity(&self) -> usize {
        self.slots.len()
    }
}

/// Classes keyed by exact phase, ascending.
pub fn group_eigenvalues(cycles: &[Cycle]) -> Vec<EigenvalueClass> {
    let mut classes: BTreeMap<Ratio, Vec<usize>> = BTreeMap::new();
    for (ci, c) in cycles.iter().enumerate() {
        for n in 0..c.len() {
            classes
                .entry(Ratio::new(n as i64, c.len() as i64))
                .or_default()
                .push(ci);
        }
    }
    classes
        .into_iter()
        .map(|(phase, slots)| EigenvalueClass { phase, slots })
        .collect()
}

/// Slot keys of `p` in flattened order (phase ascending, then slot).
pub fn slot_keys(p: &Permutation) -> Vec<SlotKey> {
    group_eigenvalues(p.cycles())
        .iter()
        .flat_map(|c| (0..c.multiplicity()).map(move |a| SlotKey::new(c.phase, a)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("no x assigned to phase {} slot {}", .0.phase, .0.slot + 1)]
    MissingX(SlotKey),
    #[error("x assigned to phase {} slot {} which the permutation does not have", .0.phase, .0.slot + 1)]
    UnknownSlot(SlotKey),
    #[error("mixing for phase {phase} must be {expected}x{expected}, got {rows}x{cols}")]
    MixingShape {
        phase: Ratio,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("mixing for phase {phase} is not unitary (deviation {deviation:e})")]
    NonUnitaryMixing { phase: Ratio, deviation: f64 },
    #[error("mixing given for phase {0} which the permutation does not have")]
    UnknownMixing(Ratio),
    #[error("transfer time must be positive and finite, got {0}")]
    InvalidTau(f64),
    #[error("expected {expected} x values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Slot key carrying local eigenvalue `n` of cycle `ci`.
pub fn cycle_slot_key(p: &Permutation, ci: usize, n: usize) -> SlotKey {
    let len = p.cycles()[ci].len();
    let phase = Ratio::new(n as i64, len as i64);
    let slot = p.cycles()[..ci]
        .iter()
        .filter(|c| (c.len() as i64) % phase.denom() == 0)
        .count();
    SlotKey::new(phase, slot)
}

/// Integer vector, degenerate-subspace mixing and transfer time selecting one
/// Hamiltonian of the family.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    x: BTreeMap<SlotKey, i64>,
    mixing: BTreeMap<Ratio, CMatrix>,
    tau: f64,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        SpectrumSpec::new(1.0)
    }
}

impl SpectrumSpec {
    pub fn new(tau: f64) -> Self {
        SpectrumSpec {
            x: BTreeMap::new(),
            mixing: BTreeMap::new(),
            tau,
        }
    }

    /// Assigns `values` in flattened slot order of `p`, identity mixing.
    pub fn from_flat(p: &Permutation, values: &[i64], tau: f64) -> Result<Self, SpectrumError> {
        let keys = slot_keys(p);
        if keys.len() != values.len() {
            return Err(SpectrumError::LengthMismatch {
                expected: keys.len(),
                got: values.len(),
            });
        }
        let mut spec = SpectrumSpec::new(tau);
        for (k, &v) in keys.into_iter().zip(values) {
            spec.set_x(k, v);
        }
        Ok(spec)
    }

    /// Assigns `values[ci][n]` to local eigenvalue `n` of cycle `ci`,
    /// identity mixing.
    pub fn from_cycle_values(
        p: &Permutation,
        values: &[Vec<i64>],
        tau: f64,
    ) -> Result<Self, SpectrumError> {
        if values.len() != p.cycles().len() {
            return Err(SpectrumError::LengthMismatch {
                expected: p.cycles().len(),
                got: values.len(),
            });
        }
        let mut spec = SpectrumSpec::new(tau);
        for (ci, (cycle, xs)) in p.cycles().iter().zip(values).enumerate() {
            if xs.len() != cycle.len() {
                return Err(SpectrumError::LengthMismatch {
                    expected: cycle.len(),
                    got: xs.len(),
                });
            }
            for (n, &x) in xs.iter().enumerate() {
                spec.set_x(cycle_slot_key(p, ci, n), x);
            }
        }
        Ok(spec)
    }

    /// `x` in flattened slot order of `p`, if every slot is assigned.
    pub fn flatten(&self, p: &Permutation) -> Result<Vec<i64>, SpectrumError> {
        slot_keys(p)
            .into_iter()
            .map(|k| self.x(k).ok_or(SpectrumError::MissingX(k)))
            .collect()
    }

    pub fn with_x(mut self, phase: Ratio, slot: usize, value: i64) -> Self {
        self.set_x(SlotKey::new(phase, slot), value);
        self
    }

    pub fn set_x(&mut self, key: SlotKey, value: i64) {
        self.x.insert(key, value);
    }

    pub fn x(&self, key: SlotKey) -> Option<i64> {
        self.x.get(&key).copied()
    }

    pub fn x_entries(&self) -> &BTreeMap<SlotKey, i64> {
        &self.x
    }

    /// Rows of `b` are the coefficients `β_{a,i}` of slot `a` on cycle `i`.
    pub fn with_mixing(mut self, phase: Ratio, b: CMatrix) -> Self {
        self.set_mixing(phase, b);
        self
    }

    pub fn set_mixing(&mut self, phase: Ratio, b: CMatrix) {
        self.mixing.insert(phase, b);
    }

    pub fn mixing(&self, phase: Ratio) -> Option<&CMatrix> {
        self.mixing.get(&phase)
    }

    pub fn mixing_entries(&self) -> &BTreeMap<Ratio, CMatrix> {
        &self.mixing
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn set_tau(&mut self, tau: f64) {
        self.tau = tau;
    }
}

/// One eigenvector of the Hamiltonian with its energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub key: SlotKey,
    pub x: i64,
    /// `ε / 2π = x − phase`, exact.
    pub energy_turns: Ratio,
    /// `ε / τ` in radians per time unit.
    pub energy: f64,
    pub vector: CVector,
    /// Set when the vector is (up to a phase) the eigenvector of a single
    /// cycle, i.e. the mixing row has one unimodular entry.
    pub cycle: Option<usize>,
}

/// Spectrally decomposed Hamiltonian on the one-excitation space.
#[derive(Debug, Clone, PartialEq)]
pub struct PstHamiltonian {
    permutation: Permutation,
    tau: f64,
    eigenpairs: Vec<Eigenpair>,
    matrix: CMatrix,
}

/// Assembles `H = Σ (ε/τ) |y⟩⟨y|` for permutation `p`.
pub fn build_hamiltonian(
    p: &Permutation,
    spec: &SpectrumSpec,
) -> Result<PstHamiltonian, SpectrumError> {
    let tau = spec.tau();
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(SpectrumError::InvalidTau(tau));
    }
    let classes = group_eigenvalues(p.cycles());
    for key in spec.x_entries().keys() {
        let known = classes
            .iter()
            .any(|c| c.phase == key.phase && key.slot < c.multiplicity());
        if !known {
            return Err(SpectrumError::UnknownSlot(*key));
        }
    }
    for phase in spec.mixing_entries().keys() {
        if !classes.iter().any(|c| c.phase == *phase) {
            return Err(SpectrumError::UnknownMixing(*phase));
        }
    }

    let eig: Vec<_> = p.cycles().iter().map(cycle_eigensystem).collect();
    let d = p.d();
    let mut eigenpairs = Vec::with_capacity(d);
    for class in &classes {
        let eta = class.multiplicity();
        let b = match spec.mixing(class.phase) {
            Some(b) => {
                if b.nrows() != eta || b.ncols() != eta {
                    return Err(SpectrumError::MixingShape {
                        phase: class.phase,
                        expected: eta,
                        rows: b.nrows(),
                        cols: b.ncols(),
                    });
                }
                let deviation = unitarity_deviation(b);
                if deviation > MIXING_TOLERANCE {
                    return Err(SpectrumError::NonUnitaryMixing {
                        phase: class.phase,
                        deviation,
                    });
                }
                b.clone()
            }
            None => CMatrix::identity(eta, eta),
        };
        for a in 0..eta {
            let key = SlotKey::new(class.phase, a);
            let x = spec.x(key).ok_or(SpectrumError::MissingX(key))?;
            let mut vector = CVector::zeros(d);
            for (i, &ci) in class.slots.iter().enumerate() {
                let n = local_index(class.phase, p.cycles()[ci].len());
                vector += &eig[ci][n].amplitudes * b[(a, i)];
            }
            let energy_turns = Ratio::from_integer(x) - class.phase;
            eigenpairs.push(Eigenpair {
                key,
                x,
                energy_turns,
                energy: TAU * ratio_to_f64(energy_turns) / tau,
                vector,
                cycle: monomial_cycle(&b, a).map(|i| class.slots[i]),
            });
        }
    }

    let mut matrix = CMatrix::zeros(d, d);
    for e in &eigenpairs {
        matrix += projector(&e.vector) * Complex64::new(e.energy, 0.0);
    }
    Ok(PstHamiltonian {
        permutation: p.clone(),
        tau,
        eigenpairs,
        matrix,
    })
}

fn local_index(phase: Ratio, cycle_len: usize) -> usize {
    let n = *phase.numer() * (cycle_len as i64 / *phase.denom());
    n as usize
}

fn monomial_cycle(b: &CMatrix, row: usize) -> Option<usize> {
    let mut hit = None;
    for col in 0..b.ncols() {
        let m = b[(row, col)].norm();
        if (m - 1.0).abs() <= MIXING_TOLERANCE {
            if hit.is_some() {
                return None;
            }
            hit = Some(col);
        } else if m > MIXING_TOLERANCE {
            return None;
        }
    }
    hit
}

pub(crate) fn ratio_to_f64(r: Ratio) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimulationError {
    #[error("site {site} out of range for d = {d}")]
    SiteOutOfRange { site: usize, d: usize },
    #[error(
        "dimension mismatch: Hamiltonian has d = {hamiltonian}, permutation has d = {permutation}"
    )]
    DimensionMismatch {
        hamiltonian: usize,
        permutation: usize,
    },
    #[error("exact phase check needs single-cycle eigenvectors on the source cycle (phase {0} is mixed)")]
    MixedSourceClass(Ratio),
}

/// Transfer amplitude summary, `|⟨to|U(t)|from⟩|` and its phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferFidelity {
    pub magnitude: f64,
    /// In `(−π, π]`; `None` when the magnitude is below `1e-12`.
    pub phase: Option<f64>,
}

/// Occupation probabilities `P_m(t)` for an excitation starting at `source`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub source: usize,
    pub times: Vec<f64>,
    /// One row of `d` probabilities per time.
    pub probabilities: Vec<Vec<f64>>,
}

impl EvolutionTrace {
    pub fn d(&self) -> usize {
        self.probabilities.first().map_or(0, Vec::len)
    }

    /// Largest probability seen at `site` across the trace.
    pub fn max_at(&self, site: usize) -> f64 {
        self.probabilities
            .iter()
            .fold(0.0, |acc, row| acc.max(row[site]))
    }
}

/// `n` uniform samples on `[0, τ]` (just `[0]` for `n == 1`).
pub fn uniform_grid(tau: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| tau * k as f64 / (n - 1) as f64).collect(),
    }
}

impl PstHamiltonian {
    pub fn d(&self) -> usize {
        self.permutation.d()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    pub fn eigenpairs(&self) -> &[Eigenpair] {
        &self.eigenpairs
    }

    /// Dense matrix in the site basis.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    fn check_site(&self, site: usize) -> Result<(), SimulationError> {
        if site >= self.d() {
            return Err(SimulationError::SiteOutOfRange { site, d: self.d() });
        }
        Ok(())
    }

    fn phase_factor(&self, e: &Eigenpair, t: f64) -> Complex64 {
        cis_turns(-ratio_to_f64(e.energy_turns) * (t / self.tau))
    }

    /// `U(t) = Σ exp(−iεt/τ) |y⟩⟨y|`.
    pub fn evolution_operator(&self, t: f64) -> CMatrix {
        let d = self.d();
        let mut u = CMatrix::zeros(d, d);
        for e in &self.eigenpairs {
            u += projector(&e.vector) * self.phase_factor(e, t);
        }
        u
    }

    /// `U(t)|from⟩`.
    pub fn evolve_site(&self, from: usize, t: f64) -> CVector {
        let mut psi = CVector::zeros(self.d());
        for e in &self.eigenpairs {
            let c = e.vector[from].conj();
            if c.norm() == 0.0 {
                continue;
            }
            psi += &e.vector * (self.phase_factor(e, t) * c);
        }
        psi
    }

    /// `⟨to|U(t)|from⟩`.
    pub fn amplitude(&self, from: usize, to: usize, t: f64) -> Complex64 {
        self.eigenpairs
            .iter()
            .map(|e| self.phase_factor(e, t) * e.vector[to] * e.vector[from].conj())
            .sum()
    }

    pub fn occupation_probabilities(
        &self,
        source: usize,
        times: &[f64],
    ) -> Result<EvolutionTrace, SimulationError> {
        self.occupation_probabilities_with(source, times, Execution::default())
    }

    pub fn occupation_probabilities_with(
        &self,
        source: usize,
        times: &[f64],
        exec: Execution,
    ) -> Result<EvolutionTrace, SimulationError> {
        self.check_site(source)?;
        let probabilities = parallel::map(exec, times, |&t| {
            self.evolve_site(source, t)
                .iter()
                .map(|z| z.norm_sqr().min(1.0))
                .collect()
        });
        Ok(EvolutionTrace {
            source,
            times: times.to_vec(),
            probabilities,
        })
    }

    pub fn transfer_fidelity(
        &self,
        from: usize,
        to: usize,
        t: f64,
    ) -> Result<TransferFidelity, SimulationError> {
        self.check_site(from)?;
        self.check_site(to)?;
        let a = self.amplitude(from, to, t);
        let magnitude = a.norm().min(1.0);
        let phase = (magnitude > 1e-12).then(|| {
            let phi = a.arg();
            if phi <= -std::f64::consts::PI {
                phi + TAU
            } else {
                phi
            }
        });
        Ok(TransferFidelity { magnitude, phase })
    }

    /// Whether `|U(τ)|` matches the 0/1 pattern of `p`.
    pub fn verify_permutation(&self, p: &Permutation) -> Result<bool, SimulationError> {
        if p.d() != self.d() {
            return Err(SimulationError::DimensionMismatch {
                hamiltonian: self.d(),
                permutation: p.d(),
            });
        }
        let u = self.evolution_operator(self.tau);
        let d = self.d();
        for col in 0..d {
            for row in 0..d {
                let expected = if p.apply(col) == row { 1.0 } else { 0.0 };
                if (u[(row, col)].norm() - expected).abs() > PERMUTATION_TOLERANCE {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Decides perfect transfer `from → to` at `t = t_frac·τ` in exact
    /// arithmetic. Returns the common phase in turns, in `[0, 1)`, when every
    /// contribution lines up, and `None` otherwise.
    ///
    /// Requires the eigenvectors touching `from` to be single-cycle vectors.
    pub fn exact_transfer_phase(
        &self,
        from: usize,
        to: usize,
        t_frac: Ratio,
    ) -> Result<Option<Ratio>, SimulationError> {
        self.check_site(from)?;
        self.check_site(to)?;
        let p = &self.permutation;
        let source_cycle = p.cycle_index(from);
        for e in &self.eigenpairs {
            if e.cycle.is_none() && e.vector[from].norm() > MIXING_TOLERANCE {
                return Err(SimulationError::MixedSourceClass(e.key.phase));
            }
        }
        if p.cycle_index(to) != source_cycle {
            return Ok(None);
        }
        let cycle = &p.cycles()[source_cycle];
        let di = cycle.len() as i64;
        let shift = cycle.position(to).unwrap() as i64 - cycle.position(from).unwrap() as i64;
        let mut common: Option<Ratio> = None;
        for e in self
            .eigenpairs
            .iter()
            .filter(|e| e.cycle == Some(source_cycle))
        {
            let n = local_index(e.key.phase, cycle.len()) as i64;
            let turns = frac_part(Ratio::new(n * shift, di) - e.energy_turns * t_frac);
            match common {
                None => common = Some(turns),
                Some(c) if c != turns => return Ok(None),
                _ => {}
            }
        }
        Ok(common)
    }

    /// Smallest `T/τ` with `U(t + T) = U(t)`: lcm of the energy denominators.
    pub fn period_fraction(&self) -> Ratio {
        let den = self
            .eigenpairs
            .iter()
            .fold(1i64, |acc, e| acc.lcm(e.energy_turns.denom()));
        Ratio::from_integer(den)
    }

    pub fn period(&self) -> f64 {
        self.tau * ratio_to_f64(self.period_fraction())
    }

    /// Largest spread of diagonal entries within any cycle.
    pub fn cycle_diagonal_spread(&self) -> f64 {
        self.permutation
            .cycles()
            .iter()
            .map(|c| {
                let diag: Vec<f64> = c
                    .members()
                    .iter()
                    .map(|&m| self.matrix[(m, m)].re)
                    .collect();
                let hi = diag.iter().cloned().fold(f64::MIN, f64::max);
                let lo = diag.iter().cloned().fold(f64::MAX, f64::min);
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    /// `‖Y†Y − I‖_max` over the stored eigenvectors.
    pub fn eigenbasis_deviation(&self) -> f64 {
        let d = self.d();
        let mut y = CMatrix::zeros(d, d);
        for (k, e) in self.eigenpairs.iter().enumerate() {
            y.set_column(k, &e.vector);
        }
        max_abs_diff(&(y.adjoint() * &y), &CMatrix::identity(d, d))
    }
}

// Free-function forms of the operations.

pub fn evolution_operator(h: &PstHamiltonian, t: f64) -> CMatrix {
    h.evolution_operator(t)
}

pub fn occupation_probabilities(
    h: &PstHamiltonian,
    source: usize,
    times: &[f64],
) -> Result<EvolutionTrace, SimulationError> {
    h.occupation_probabilities(source, times)
}

pub fn transfer_fidelity(
    h: &PstHamiltonian,
    from: usize,
    to: usize,
    t: f64,
) -> Result<TransferFidelity, SimulationError> {
    h.transfer_fidelity(from, to, t)
}

pub fn verify_permutation(h: &PstHamiltonian, p: &Permutation) -> Result<bool, SimulationError> {
    h.verify_permutation(p)
}
