//! Ground sets and bitmask subsets.
//!
//! Every structure in this crate is tabulated over the subsets of a small
//! ordered ground set. Subsets are `u32` bitmasks against that ordering, so
//! the ground set is capped at 24 elements and all subset-indexed tables are
//! dense arrays of length `2^n`.

use std::fmt;

use thiserror::Error;

/// Hard cap on ground-set size; keeps `2^n` tables and full subset
/// enumeration affordable.
pub const MAX_GROUND: usize = 24;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GroundError {
    #[error("ground set must have between 1 and {MAX_GROUND} elements, got {0}")]
    BadSize(usize),
    #[error("ground-set labels must be unique and nonempty (offender: {0:?})")]
    BadLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("subset mask {mask:#x} has bits outside a ground set of {n} elements")]
    MaskOutOfRange { mask: u32, n: usize },
}

/// An ordered set of distinct element names. Element `i` corresponds to
/// bit `i` of a [`Subset`] mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, GroundError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > MAX_GROUND {
            return Err(GroundError::BadSize(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || labels[..i].contains(l) {
                return Err(GroundError::BadLabel(l.clone()));
            }
        }
        Ok(GroundSet { labels })
    }

    /// Ground set `x0, x1, ...` of the given size, for tests and generators.
    pub fn with_size(n: usize) -> Result<Self, GroundError> {
        GroundSet::new((0..n).map(|i| format!("x{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction n >= 1
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, GroundError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| GroundError::UnknownLabel(label.to_string()))
    }

    /// Number of subsets, `2^n`.
    pub fn table_len(&self) -> usize {
        1usize << self.len()
    }

    /// The full set as a subset mask.
    pub fn full(&self) -> Subset {
        Subset(((1u64 << self.len()) - 1) as u32)
    }

    pub fn check(&self, s: Subset) -> Result<(), GroundError> {
        if u64::from(s.0) >> self.len() != 0 {
            return Err(GroundError::MaskOutOfRange { mask: s.0, n: self.len() });
        }
        Ok(())
    }

    /// All subsets in mask order, `∅` first, full set last.
    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        (0..self.table_len() as u32).map(Subset)
    }

    /// Render a subset as `{a,b,c}` using this ground set's labels.
    pub fn render(&self, s: Subset) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.label(i)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// A subset of a [`GroundSet`], stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn singleton(i: usize) -> Subset {
        Subset(1 << i)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Subset {
        let mut mask = 0u32;
        for i in indices {
            mask |= 1 << i;
        }
        Subset(mask)
    }

    pub fn from_labels<'a>(
        ground: &GroundSet,
        labels: impl IntoIterator<Item = &'a str>,
    ) -> Result<Subset, GroundError> {
        let mut mask = 0u32;
        for l in labels {
            mask |= 1 << ground.index_of(l)?;
        }
        Ok(Subset(mask))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersect(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn minus(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn complement_in(self, ground: &GroundSet) -> Subset {
        Subset(ground.full().0 & !self.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn insert(self, i: usize) -> Subset {
        Subset(self.0 | (1 << i))
    }

    /// True when this set has elements on both sides of the bipartition
    /// `{side, complement}` — i.e. the split cuts it.
    pub fn crossed_by(self, side: Subset, ground: &GroundSet) -> bool {
        let inside = self.0 & side.0;
        let outside = self.0 & !side.0 & ground.full().0;
        inside != 0 && outside != 0
    }

    /// Indices of the members, ascending.
    pub fn iter(self) -> SubsetIter {
        SubsetIter(self.0)
    }

    /// All nonempty proper subsets of `self`, in ascending mask order.
    pub fn proper_subsets(self) -> impl Iterator<Item = Subset> {
        let full = self.0;
        (1..full).filter(move |m| m & !full == 0).map(Subset)
    }
}

pub struct SubsetIter(u32);

impl Iterator for SubsetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset[")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}
