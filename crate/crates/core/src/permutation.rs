//! Site permutations, their disjoint cycles and the per-cycle eigen-systems.
//!
//! A permutation acts on the one-excitation basis as `Π|k⟩ = |image[k]⟩`.
//! Inside a cycle the position index `ζ` is assigned by walking the cycle
//! *against* the direction of `Π`: the smallest member sits at `ζ = 0` and
//! `Π` moves the member at position `ζ + 1` onto the member at position `ζ`.
//! With that labelling `Σ_κ λ^{ζ_κ} |κ⟩` is an eigenvector of `Π` with
//! eigenvalue `λ`. For every cycle on which `Π` steps down through the
//! ascending member list (all the bus permutations used by the designer) the
//! orbit order coincides with ascending order.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use num_integer::Integer;
use thiserror::Error;

use crate::linalg::{cis_turns, CMatrix, CVector};
use crate::Ratio;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermutationError {
    #[error("permutation must act on at least one site")]
    Empty,
    #[error("site label {label} out of range for d = {d}")]
    OutOfRange { label: usize, d: usize },
    #[error("not a bijection: label {label} appears more than once")]
    NotBijection { label: usize },
}

/// One closed cycle of a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    dim: usize,
    members: Vec<usize>,
    orbit: Vec<usize>,
    position: BTreeMap<usize, usize>,
}

impl Cycle {
    /// Members in ascending order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Members indexed by `ζ`, starting with the smallest one.
    pub fn orbit(&self) -> &[usize] {
        &self.orbit
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Dimension of the ambient site space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn smallest(&self) -> usize {
        self.members[0]
    }

    pub fn contains(&self, site: usize) -> bool {
        self.position.contains_key(&site)
    }

    /// `ζ_κ`, or `None` when `site` is not a member.
    pub fn position(&self, site: usize) -> Option<usize> {
        self.position.get(&site).copied()
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, site) in self.orbit.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{site}")?;
        }
        write!(f, ")")
    }
}

/// Eigenvector of a single cycle, `Π v = exp(i2π n/d_i) v`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleEigenpair {
    /// Reduced `n / d_i`.
    pub phase: Ratio,
    /// Local index `n ∈ {0..d_i-1}`.
    pub index: usize,
    pub amplitudes: CVector,
}

impl CycleEigenpair {
    pub fn eigenvalue(&self) -> Complex64 {
        cis_turns(*self.phase.numer() as f64 / *self.phase.denom() as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    image: Vec<usize>,
    cycles: Vec<Cycle>,
    cycle_of: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self, PermutationError> {
        let d = image.len();
        if d == 0 {
            return Err(PermutationError::Empty);
        }
        let mut seen = vec![false; d];
        for &label in &image {
            if label >= d {
                return Err(PermutationError::OutOfRange { label, d });
            }
            if std::mem::replace(&mut seen[label], true) {
                return Err(PermutationError::NotBijection { label });
            }
        }
        let cycles = decompose(&image);
        let mut cycle_of = vec![0; d];
        for (ci, c) in cycles.iter().enumerate() {
            for &m in c.members() {
                cycle_of[m] = ci;
            }
        }
        Ok(Permutation {
            image,
            cycles,
            cycle_of,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::new((0..d).collect()).expect("identity is a bijection")
    }

    /// Builds a permutation from cycles in standard notation, where
    /// `[a, b, c]` means `a → b → c → a`.
    pub fn from_cycles(d: usize, cycles: &[&[usize]]) -> Result<Self, PermutationError> {
        let mut image: Vec<usize> = (0..d).collect();
        let mut touched = vec![false; d];
        for c in cycles {
            for (i, &from) in c.iter().enumerate() {
                if from >= d {
                    return Err(PermutationError::OutOfRange { label: from, d });
                }
                if std::mem::replace(&mut touched[from], true) {
                    return Err(PermutationError::NotBijection { label: from });
                }
                image[from] = c[(i + 1) % c.len()];
            }
        }
        Self::new(image)
    }

    pub fn d(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, site: usize) -> usize {
        self.image[site]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.d()];
        for (k, &v) in self.image.iter().enumerate() {
            inv[v] = k;
        }
        Self::new(inv).expect("inverse of a bijection")
    }

    /// Cycles ordered by their smallest member.
    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    /// Index into [`Permutation::cycles`] of the cycle containing `site`.
    pub fn cycle_index(&self, site: usize) -> usize {
        self.cycle_of[site]
    }

    pub fn cycle_containing(&self, site: usize) -> &Cycle {
        &self.cycles[self.cycle_of[site]]
    }

    /// Order of the permutation: lcm of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycles
            .iter()
            .fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    /// Applies `Π` to an amplitude vector: `(Πψ)_{image[k]} = ψ_k`.
    pub fn act(&self, psi: &CVector) -> CVector {
        let mut out = CVector::zeros(self.d());
        for (k, &v) in self.image.iter().enumerate() {
            out[v] = psi[k];
        }
        out
    }

    /// Permutation matrix with `⟨image[k]|Π|k⟩ = 1`.
    pub fn matrix(&self) -> CMatrix {
        let d = self.d();
        let mut m = CMatrix::zeros(d, d);
        for (k, &v) in self.image.iter().enumerate() {
            m[(v, k)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Disjoint-cycle notation with each cycle listed in `ζ` order,
    /// e.g. `(0 2 4)(1 3)`.
    pub fn cycle_notation(&self) -> String {
        self.cycles.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation())
    }
}

fn decompose(image: &[usize]) -> Vec<Cycle> {
    let d = image.len();
    let mut preimage = vec![0; d];
    for (k, &v) in image.iter().enumerate() {
        preimage[v] = k;
    }
    let mut visited = vec![false; d];
    let mut cycles = Vec::new();
    // Scanning starts in ascending order, so every orbit begins at its
    // smallest member and the cycles come out ordered by it.
    for start in 0..d {
        if visited[start] {
            continue;
        }
        let mut orbit = vec![start];
        visited[start] = true;
        let mut k = preimage[start];
        while k != start {
            visited[k] = true;
            orbit.push(k);
            k = preimage[k];
        }
        let position = orbit.iter().enumerate().map(|(z, &s)| (s, z)).collect();
        let mut members = orbit.clone();
        members.sort_unstable();
        cycles.push(Cycle {
            dim: d,
            members,
            orbit,
            position,
        });
    }
    cycles
}

/// Disjoint cycles of `p`, ordered by smallest member.
pub fn cycle_decompose(p: &Permutation) -> Vec<Cycle> {
    p.cycles().to_vec()
}

/// The `d_i` eigenpairs of one cycle, `n = 0..d_i-1`.
pub fn cycle_eigensystem(c: &Cycle) -> Vec<CycleEigenpair> {
    let di = c.len();
    let norm = 1.0 / (di as f64).sqrt();
    (0..di)
        .map(|n| {
            let mut amplitudes = DVector::zeros(c.dim());
            for (zeta, &site) in c.orbit().iter().enumerate() {
                // λ_n^ζ with the exponent reduced mod d_i before going to floats
                let k = (n * zeta) % di;
                amplitudes[site] = cis_turns(k as f64 / di as f64) * norm;
            }
            CycleEigenpair {
                phase: Ratio::new(n as i64, di as i64),
                index: n,
                amplitudes,
            }
        })
        .collect()
}

/// Logical nodes found in more than one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalSetViolation {
    /// `(cycle, logical nodes in it)` for every cycle touched by the set.
    pub groups: Vec<(Cycle, Vec<usize>)>,
}

impl fmt::Display for LogicalSetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "logical nodes span {} cycles:", self.groups.len())?;
        for (i, (cycle, nodes)) in self.groups.iter().enumerate() {
            let nodes: Vec<String> = nodes.iter().map(|n| n.to_string()).collect();
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{{{}}} in {cycle}", nodes.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicalSetError {
    #[error("logical set is empty")]
    Empty,
    #[error("logical node {label} out of range for d = {d}")]
    OutOfRange { label: usize, d: usize },
    #[error("{0}")]
    SplitAcrossCycles(LogicalSetViolation),
}

/// Checks that every logical node lies in one cycle of `p`.
pub fn validate_logical_set(p: &Permutation, logical: &[usize]) -> Result<(), LogicalSetError> {
    if logical.is_empty() {
        return Err(LogicalSetError::Empty);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &l in logical {
        if l >= p.d() {
            return Err(LogicalSetError::OutOfRange { label: l, d: p.d() });
        }
        groups.entry(p.cycle_index(l)).or_default().push(l);
    }
    if groups.len() == 1 {
        return Ok(());
    }
    Err(LogicalSetError::SplitAcrossCycles(LogicalSetViolation {
        groups: groups
            .into_iter()
            .map(|(ci, nodes)| (p.cycles()[ci].clone(), nodes))
            .collect(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subset_bus_d5() -> Permutation {
        // |4><0| + |0><2| + |2><4| + |1><3| + |3><1|
        Permutation::new(vec![4, 3, 0, 1, 2]).unwrap()
    }

    #[test]
    fn subset_bus_splits_into_two_cycles() {
        let p = subset_bus_d5();
        let cycles = cycle_decompose(&p);
        assert_eq!(cycles.len(), 2);
        assert_eq!(cycles[0].members(), &[0, 2, 4]);
        assert_eq!(cycles[1].members(), &[1, 3]);
        assert_eq!(cycles[0].orbit(), &[0, 2, 4]);
        assert_eq!(p.cycle_notation(), "(0 2 4)(1 3)");
        assert_eq!(p.order(), 6);
    }

    #[test]
    fn identity_has_fixed_points_only() {
        let p = Permutation::identity(3);
        let members: Vec<_> = p.cycles().iter().map(|c| c.members().to_vec()).collect();
        assert_eq!(members, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(p.order(), 1);
    }

    #[test]
    fn universal_bus_is_one_cycle() {
        // |3><0| + |1><2| + |2><3| + |0><1|
        let p = Permutation::new(vec![3, 0, 1, 2]).unwrap();
        assert_eq!(p.cycles().len(), 1);
        assert_eq!(p.cycles()[0].orbit(), &[0, 1, 2, 3]);
    }

    #[test]
    fn orbit_order_differs_from_ascending_for_forward_cycles() {
        // 0 → 1 → 2 → 0: Π moves the member at ζ+1 onto ζ, so ζ(2) = 1.
        let p = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        assert_eq!(p.cycles()[0].orbit(), &[0, 2, 1]);
        assert_eq!(p.cycles()[0].members(), &[0, 1, 2]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Permutation::new(vec![0, 0, 1]),
            Err(PermutationError::NotBijection { label: 0 })
        );
        assert_eq!(
            Permutation::new(vec![0, 3, 1]),
            Err(PermutationError::OutOfRange { label: 3, d: 3 })
        );
        assert_eq!(Permutation::new(vec![]), Err(PermutationError::Empty));
        assert!(Permutation::new(vec![0, 0, 1])
            .unwrap_err()
            .to_string()
            .contains("not a bijection"));
    }

    #[test]
    fn two_cycle_eigenvectors() {
        let p = subset_bus_d5();
        let eig = cycle_eigensystem(&p.cycles()[1]);
        assert_eq!(eig.len(), 2);
        assert_eq!(eig[0].phase, Ratio::new(0, 1));
        assert_eq!(eig[1].phase, Ratio::new(1, 2));
        let s = 1.0 / 2f64.sqrt();
        let v = &eig[1].amplitudes;
        assert!((v[1] - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((v[3] - Complex64::new(-s, 0.0)).norm() < 1e-15);
        assert_eq!(v[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn fixed_point_eigenvector() {
        let p = Permutation::new(vec![0, 1, 2, 3, 4, 5]).unwrap();
        let eig = cycle_eigensystem(&p.cycles()[5]);
        assert_eq!(eig.len(), 1);
        assert_eq!(eig[0].phase, Ratio::new(0, 1));
        assert_eq!(eig[0].amplitudes[5], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn three_cycle_eigenvector_amplitudes() {
        let p = subset_bus_d5();
        let eig = cycle_eigensystem(&p.cycles()[0]);
        let phases: Vec<_> = eig.iter().map(|e| e.phase).collect();
        assert_eq!(
            phases,
            vec![Ratio::new(0, 1), Ratio::new(1, 3), Ratio::new(2, 3)]
        );
        let s = 1.0 / 3f64.sqrt();
        let v = &eig[1].amplitudes;
        for (site, turns) in [(0, 0.0), (2, 1.0 / 3.0), (4, 2.0 / 3.0)] {
            assert!((v[site] - cis_turns(turns) * s).norm() < 1e-15);
        }
    }

    #[test]
    fn eigenvalue_relation_holds() {
        let p = Permutation::from_cycles(7, &[&[0, 5, 2, 6], &[1, 3], &[4]]).unwrap();
        for c in p.cycles() {
            for e in cycle_eigensystem(c) {
                let lhs = p.act(&e.amplitudes);
                let rhs = &e.amplitudes * e.eigenvalue();
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn logical_set_validation() {
        let p = subset_bus_d5();
        assert_eq!(validate_logical_set(&p, &[0, 2, 4]), Ok(()));
        assert_eq!(validate_logical_set(&p, &[3]), Ok(()));
        match validate_logical_set(&p, &[0, 1]) {
            Err(LogicalSetError::SplitAcrossCycles(v)) => {
                assert_eq!(v.groups.len(), 2);
                assert_eq!(v.groups[0].0.members(), &[0, 2, 4]);
                assert_eq!(v.groups[0].1, vec![0]);
                assert_eq!(v.groups[1].0.members(), &[1, 3]);
                assert_eq!(v.groups[1].1, vec![1]);
                assert_eq!(
                    v.to_string(),
                    "logical nodes span 2 cycles: {0} in (0 2 4), {1} in (1 3)"
                );
            }
            other => panic!("expected violation, got {other:?}"),
        }
        assert_eq!(
            validate_logical_set(&p, &[0, 7]),
            Err(LogicalSetError::OutOfRange { label: 7, d: 5 })
        );
        assert_eq!(validate_logical_set(&p, &[]), Err(LogicalSetError::Empty));
    }
}
