//! Ordered bases of the exterior powers of an `n`-dimensional space.
//!
//! A basis p-vector `e_I = e_{i_1} ∧ … ∧ e_{i_p}` is labelled by a strictly
//! increasing tuple `I`. The basis of `Λ^p V` is the lexicographically sorted
//! list of all such tuples; every coefficient array in this crate is indexed by
//! position in that list. Entries are 0-based here and 1-based in serialized
//! output.

use std::fmt;
use std::ops::{Mul, Neg};
use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest supported ambient dimension (masks are `u32`, rank tables `2^n`).
pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("degree {p} out of range for dimension {n}")]
    DegreeOutOfRange { n: usize, p: usize },
    #[error("dimension {0} exceeds the supported maximum {MAX_DIM}")]
    DimensionTooLarge(usize),
    #[error("entries {entries:?} are not a strictly increasing tuple in 0..{n}")]
    InvalidEntries { n: usize, entries: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(count: u32) -> Self {
        if count % 2 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

/// A strictly increasing tuple of axis indices in `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    n: usize,
    entries: Vec<usize>,
}

impl MultiIndex {
    pub fn new(n: usize, entries: Vec<usize>) -> Result<Self, IndexError> {
        if n > MAX_DIM {
            return Err(IndexError::DimensionTooLarge(n));
        }
        let increasing = entries.windows(2).all(|w| w[0] < w[1]);
        if !increasing || entries.iter().any(|&e| e >= n) {
            return Err(IndexError::InvalidEntries { n, entries });
        }
        Ok(Self { n, entries })
    }

    /// Builds from 1-based entries, as written in reports.
    pub fn from_one_based(n: usize, entries: &[usize]) -> Result<Self, IndexError> {
        if entries.contains(&0) {
            return Err(IndexError::InvalidEntries { n, entries: entries.to_vec() });
        }
        Self::new(n, entries.iter().map(|e| e - 1).collect())
    }

    pub(crate) fn from_mask(n: usize, mask: u32) -> Self {
        let entries = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e + 1).collect()
    }

    pub fn mask(&self) -> u32 {
        self.entries.iter().fold(0, |m, &e| m | (1 << e))
    }

    /// Position in the lexicographic basis of `Λ^p`, computed in `O(p·n)`.
    pub fn position(&self) -> usize {
        let p = self.entries.len();
        let mut rank = 0;
        let mut next = 0;
        for (j, &c) in self.entries.iter().enumerate() {
            // tuples whose j-th entry is smaller than c come first
            for v in next..c {
                rank += binomial(self.n - 1 - v, p - 1 - j);
            }
            next = c + 1;
        }
        rank
    }

    /// The sorted complement `I^c` and the sign of the permutation `(I, I^c)`.
    pub fn complement_sign(&self) -> (MultiIndex, Sign) {
        let full = full_mask(self.n);
        let mask = self.mask();
        let comp = full & !mask;
        (MultiIndex::from_mask(self.n, comp), shuffle_sign(mask, comp))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.one_based().iter().join(","))
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.one_based().serialize(serializer)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Lexicographically ordered basis labels of `Λ^p` for an `n`-dimensional space.
pub fn enumerate_multiindices(n: usize, p: usize) -> Result<Vec<MultiIndex>, IndexError> {
    if n > MAX_DIM {
        return Err(IndexError::DimensionTooLarge(n));
    }
    if p > n {
        return Err(IndexError::DegreeOutOfRange { n, p });
    }
    Ok((0..n)
        .combinations(p)
        .map(|entries| MultiIndex { n, entries })
        .collect())
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Sign of the permutation that sorts the concatenation `(a, b)` of two
/// disjoint increasing tuples.
pub(crate) fn shuffle_sign(a: u32, b: u32) -> Sign {
    debug_assert_eq!(a & b, 0);
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> j).count_ones();
    }
    Sign::from_parity(inversions)
}

/// Lexicographic basis of `Λ^p` stored as bit masks, with a rank lookup.
pub(crate) struct BasisTable {
    /// masks of each degree, in lexicographic order
    pub by_degree: Vec<Vec<u32>>,
    /// rank of every mask within its degree
    pub rank: Vec<u32>,
}

pub(crate) fn basis_table(n: usize) -> &'static BasisTable {
    static TABLES: OnceLock<Vec<OnceLock<BasisTable>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| (0..=MAX_DIM).map(|_| OnceLock::new()).collect());
    tables[n].get_or_init(|| {
        let mut rank = vec![0u32; 1 << n];
        let by_degree = (0..=n)
            .map(|p| {
                let masks: Vec<u32> = (0..n)
                    .combinations(p)
                    .map(|c| c.iter().fold(0u32, |m, &e| m | (1 << e)))
                    .collect();
                for (r, &m) in masks.iter().enumerate() {
                    rank[m as usize] = r as u32;
                }
                masks
            })
            .collect();
        BasisTable { by_degree, rank }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(n: usize, one_based: &[usize]) -> MultiIndex {
        MultiIndex::from_one_based(n, one_based).unwrap()
    }

    #[test]
    fn enumerates_lexicographically() {
        let basis = enumerate_multiindices(3, 2).unwrap();
        let labels: Vec<Vec<usize>> = basis.iter().map(MultiIndex::one_based).collect();
        assert_eq!(labels, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn empty_index_is_unique() {
        let basis = enumerate_multiindices(4, 0).unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].degree(), 0);
    }

    #[test]
    fn count_is_binomial() {
        assert_eq!(enumerate_multiindices(5, 2).unwrap().len(), 10);
    }

    #[test]
    fn degree_out_of_range() {
        assert_eq!(
            enumerate_multiindices(3, 4),
            Err(IndexError::DegreeOutOfRange { n: 3, p: 4 })
        );
    }

    #[test]
    fn rejects_unsorted_entries() {
        assert!(MultiIndex::new(3, vec![1, 0]).is_err());
        assert!(MultiIndex::new(3, vec![0, 3]).is_err());
        assert!(MultiIndex::from_one_based(3, &[0, 1]).is_err());
    }

    #[test]
    fn complement_examples() {
        assert_eq!(mi(3, &[1, 2]).complement_sign(), (mi(3, &[3]), Sign::Plus));
        assert_eq!(mi(2, &[2]).complement_sign(), (mi(2, &[1]), Sign::Minus));
        assert_eq!(mi(4, &[1, 3]).complement_sign(), (mi(4, &[2, 4]), Sign::Minus));
    }

    #[test]
    fn display_is_one_based() {
        assert_eq!(mi(4, &[1, 3]).to_string(), "(1,3)");
    }

    #[test]
    fn exhaustive_small_dimensions() {
        for n in 0..=8 {
            let table = basis_table(n);
            for p in 0..=n {
                let basis = enumerate_multiindices(n, p).unwrap();
                assert_eq!(basis.len(), binomial(n, p));
                assert!(basis.windows(2).all(|w| w[0] < w[1]));
                for (pos, idx) in basis.iter().enumerate() {
                    assert_eq!(idx.position(), pos);
                    assert_eq!(table.by_degree[p][pos], idx.mask());
                    assert_eq!(table.rank[idx.mask() as usize] as usize, pos);

                    let (comp, s1) = idx.complement_sign();
                    let (back, s2) = comp.complement_sign();
                    assert_eq!(&back, idx);
                    let expected = Sign::from_parity((p * (n - p)) as u32);
                    assert_eq!(s1 * s2, expected);
                }
            }
        }
    }
}
