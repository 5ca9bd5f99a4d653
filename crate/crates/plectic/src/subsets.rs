//! Indices into the lattice of subsets of `{1, ..., d}`.

use std::fmt;

pub const MAX_D: u8 = 8;

/// A subset of `{1, ..., d}`, packed as a bitmask (bit `i-1` for element `i`).
///
/// Union and intersection are bitwise or/and; the partial order is inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetIndex {
    d: u8,
    bits: u16,
}

impl SubsetIndex {
    pub fn new(d: u8, bits: u16) -> Self {
        assert!((1..=MAX_D).contains(&d), "d must lie in [1, {MAX_D}]");
        assert!(bits < (1 << d), "bits out of range for d={d}");
        SubsetIndex { d, bits }
    }

    pub fn empty(d: u8) -> Self {
        SubsetIndex::new(d, 0)
    }

    pub fn full(d: u8) -> Self {
        SubsetIndex::new(d, (1 << d) - 1)
    }

    /// The singleton `{i}`, `i` 1-based.
    pub fn singleton(d: u8, i: u8) -> Self {
        assert!((1..=d).contains(&i), "element out of range");
        SubsetIndex::new(d, 1 << (i - 1))
    }

    /// Builds a subset from 1-based elements.
    pub fn from_elements(d: u8, elements: &[u8]) -> Self {
        let mut bits = 0u16;
        for &i in elements {
            assert!((1..=d).contains(&i), "element out of range");
            bits |= 1 << (i - 1);
        }
        SubsetIndex::new(d, bits)
    }

    pub fn d(&self) -> u8 {
        self.d
    }

    pub fn bits(&self) -> u16 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, i: u8) -> bool {
        (1..=self.d).contains(&i) && self.bits & (1 << (i - 1)) != 0
    }

    pub fn union(&self, other: &SubsetIndex) -> SubsetIndex {
        assert_eq!(self.d, other.d);
        SubsetIndex::new(self.d, self.bits | other.bits)
    }

    pub fn intersection(&self, other: &SubsetIndex) -> SubsetIndex {
        assert_eq!(self.d, other.d);
        SubsetIndex::new(self.d, self.bits & other.bits)
    }

    pub fn complement(&self) -> SubsetIndex {
        SubsetIndex::new(self.d, !self.bits & ((1 << self.d) - 1))
    }

    pub fn is_subset_of(&self, other: &SubsetIndex) -> bool {
        self.d == other.d && self.bits & !other.bits == 0
    }

    pub fn is_superset_of(&self, other: &SubsetIndex) -> bool {
        other.is_subset_of(self)
    }

    pub fn is_strict_superset_of(&self, other: &SubsetIndex) -> bool {
        self.is_superset_of(other) && self.bits != other.bits
    }

    /// 1-based elements in ascending order.
    pub fn elements(&self) -> Vec<u8> {
        (1..=self.d).filter(|&i| self.contains(i)).collect()
    }

    /// All `2^d` subsets, in ascending bitmask order (deterministic).
    pub fn all(d: u8) -> impl Iterator<Item = SubsetIndex> {
        (0..(1u32 << d)).map(move |b| SubsetIndex::new(d, b as u16))
    }

    /// All strict supersets, in ascending bitmask order.
    pub fn strict_supersets(&self) -> Vec<SubsetIndex> {
        let me = *self;
        SubsetIndex::all(self.d)
            .filter(move |s| s.is_strict_superset_of(&me))
            .collect()
    }
}

impl fmt::Display for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.elements().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_operations_are_bitwise() {
        let a = SubsetIndex::from_elements(3, &[1, 2]);
        let b = SubsetIndex::from_elements(3, &[2, 3]);
        assert_eq!(a.union(&b), SubsetIndex::full(3));
        assert_eq!(a.intersection(&b), SubsetIndex::singleton(3, 2));
        assert!(a.intersection(&b).is_subset_of(&a));
        assert_eq!(a.complement(), SubsetIndex::singleton(3, 3));
    }

    #[test]
    fn enumeration_and_supersets() {
        assert_eq!(SubsetIndex::all(3).count(), 8);
        let s = SubsetIndex::singleton(2, 1);
        assert_eq!(s.strict_supersets(), vec![SubsetIndex::full(2)]);
        assert_eq!(SubsetIndex::full(2).strict_supersets(), Vec::new());
    }

    #[test]
    fn display_format() {
        assert_eq!(SubsetIndex::from_elements(3, &[1, 3]).to_string(), "{1,3}");
        assert_eq!(SubsetIndex::empty(2).to_string(), "{}");
    }
}
