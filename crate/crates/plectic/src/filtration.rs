//! Subset-indexed filtrations on a vector space: construction from `d`
//! generator subspaces, lattice closure under sum and intersection, the
//! distributivity test, and graded pieces.

use crate::matrix::LinAlgError;
use crate::subsets::{SubsetIndex, MAX_D};
use crate::subspace::Subspace;
use std::collections::BTreeSet;
use std::fmt;

/// Default bound on lattice-closure size; closures past this are a sign the
/// input is pathological, and we fail loudly instead of grinding.
pub const DEFAULT_CLOSURE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiltrationError {
    BadD(usize),
    AmbientMismatch { expected: usize, got: usize },
    ClosureCapExceeded { cap: usize },
}

impl fmt::Display for FiltrationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiltrationError::BadD(d) => write!(f, "d={d} outside [1, {MAX_D}]"),
            FiltrationError::AmbientMismatch { expected, got } => {
                write!(f, "generator ambient dimension {got}, expected {expected}")
            }
            FiltrationError::ClosureCapExceeded { cap } => {
                write!(f, "lattice closure exceeded cap of {cap} elements")
            }
        }
    }
}

impl std::error::Error for FiltrationError {}

impl From<LinAlgError> for FiltrationError {
    fn from(e: LinAlgError) -> Self {
        match e {
            LinAlgError::AmbientMismatch { left, right } => {
                FiltrationError::AmbientMismatch { expected: left, got: right }
            }
            other => panic!("unexpected linear algebra failure: {other}"),
        }
    }
}

/// A decreasing weak I-filtration: `Fil^S = \bigcap_{i in S} Fil_i^+`, with
/// `Fil^{}` the full space. Every decreasing weak I-filtration arises this
/// way from its `d` generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakIFiltration {
    ambient: usize,
    d: u8,
    generators: Vec<Subspace>,
    /// Indexed by bitmask; entry `b` is `Fil^S` for `S` with bits `b`.
    table: Vec<Subspace>,
}

impl WeakIFiltration {
    /// Builds the full `2^d` table from the generators `Fil_i^+`.
    pub fn build(generators: Vec<Subspace>) -> Result<Self, FiltrationError> {
        let d = generators.len();
        if !(1..=MAX_D as usize).contains(&d) {
            return Err(FiltrationError::BadD(d));
        }
        let ambient = generators[0].ambient_dim();
        for g in &generators {
            if g.ambient_dim() != ambient {
                return Err(FiltrationError::AmbientMismatch {
                    expected: ambient,
                    got: g.ambient_dim(),
                });
            }
        }
        let mut table = Vec::with_capacity(1 << d);
        table.push(Subspace::full(ambient));
        for bits in 1u32..(1 << d) {
            // peel the lowest set bit: Fil^S = Fil^{S - {i}} ∩ Fil_i^+
            let low = bits.trailing_zeros() as usize;
            let rest = bits & (bits - 1);
            let s = table[rest as usize].intersect(&generators[low])?;
            table.push(s);
        }
        Ok(WeakIFiltration { ambient, d: d as u8, generators, table })
    }

    pub fn d(&self) -> u8 {
        self.d
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn generators(&self) -> &[Subspace] {
        &self.generators
    }

    pub fn fil(&self, s: &SubsetIndex) -> &Subspace {
        assert_eq!(s.d(), self.d);
        &self.table[s.bits() as usize]
    }

    pub fn subsets(&self) -> impl Iterator<Item = SubsetIndex> {
        SubsetIndex::all(self.d)
    }

    /// `\sum_{T strictly containing S} Fil^T`.
    pub fn sum_above(&self, s: &SubsetIndex) -> Subspace {
        let mut acc = Subspace::zero(self.ambient);
        for t in s.strict_supersets() {
            acc = acc.sum(self.fil(&t)).expect("same ambient");
        }
        acc
    }

    /// Dimension of `Gr^S = Fil^S / sum_above(S)` plus a complement inside
    /// `Fil^S` mapping isomorphically onto the quotient.
    pub fn graded_piece(&self, s: &SubsetIndex) -> GradedPiece {
        let fil = self.fil(s);
        let below = self.sum_above(s);
        debug_assert!(fil.contains(&below), "filtration must be decreasing");
        let complement = below.complement_within(fil).expect("same ambient");
        GradedPiece { dim: fil.dim() - below.dim(), complement }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPiece {
    pub dim: usize,
    /// A subspace of `Fil^S` projecting isomorphically onto the graded piece.
    pub complement: Subspace,
}

/// The finite set of subspaces generated by a filtration table under sum and
/// intersection, together with zero and the full space. Elements are kept in
/// canonical order (dimension, then lexicographic basis).
#[derive(Debug, Clone)]
pub struct LatticeClosure {
    elements: Vec<Subspace>,
}

impl LatticeClosure {
    pub fn elements(&self) -> &[Subspace] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Closes the filtration table under sums and intersections (fixpoint).
pub fn lattice_closure(f: &WeakIFiltration, cap: usize) -> Result<LatticeClosure, FiltrationError> {
    let mut set: BTreeSet<Subspace> = f.table.iter().cloned().collect();
    set.insert(Subspace::zero(f.ambient));
    set.insert(Subspace::full(f.ambient));
    loop {
        if set.len() > cap {
            return Err(FiltrationError::ClosureCapExceeded { cap });
        }
        let elems: Vec<Subspace> = set.iter().cloned().collect();
        let mut fresh = Vec::new();
        for (i, a) in elems.iter().enumerate() {
            for b in elems.iter().skip(i + 1) {
                let s = a.sum(b)?;
                if !set.contains(&s) {
                    fresh.push(s);
                }
                let m = a.intersect(b)?;
                if !set.contains(&m) {
                    fresh.push(m);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        set.extend(fresh);
    }
    if set.len() > cap {
        return Err(FiltrationError::ClosureCapExceeded { cap });
    }
    Ok(LatticeClosure { elements: set.into_iter().collect() })
}

/// Outcome of the exhaustive distributivity test on a lattice closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributivityReport {
    pub distributive: bool,
    /// First failing triple `(A, B, C)` in canonical order, if any:
    /// `A ∩ (B + C) != (A ∩ B) + (A ∩ C)`.
    pub witness: Option<(Subspace, Subspace, Subspace)>,
}

/// Tests `A ∩ (B + C) = (A ∩ B) + (A ∩ C)` for every triple of closure
/// elements. On the closure this is equivalent to distributivity of the
/// generated lattice, which is the statement the graded-piece machinery
/// actually needs.
pub fn is_distributive(
    f: &WeakIFiltration,
    cap: usize,
) -> Result<DistributivityReport, FiltrationError> {
    let closure = lattice_closure(f, cap)?;
    let elems = closure.elements();
    for a in elems {
        for (j, b) in elems.iter().enumerate() {
            for c in elems.iter().skip(j) {
                let lhs = a.intersect(&b.sum(c)?)?;
                let rhs = a.intersect(b)?.sum(&a.intersect(c)?)?;
                if lhs != rhs {
                    return Ok(DistributivityReport {
                        distributive: false,
                        witness: Some((a.clone(), b.clone(), c.clone())),
                    });
                }
            }
        }
    }
    Ok(DistributivityReport { distributive: true, witness: None })
}
