use std::fmt;

use crate::error::{param, Error, Result};

/// Largest ground set a bare [`Subset`] can describe.
pub const MAX_SUBSET_N: usize = 64;

/// Mask with the low `a` bits set, i.e. the prefix `[a]`.
#[inline]
pub fn low_bits(a: usize) -> u64 {
    if a >= 64 {
        u64::MAX
    } else {
        (1u64 << a) - 1
    }
}

/// A subset of the ground set `[n] = {1, ..., n}`.
///
/// Element `i` is stored at bit `i - 1`. All external formats use 1-based
/// elements.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    n: u8,
    mask: u64,
}

impl Subset {
    pub fn new(n: usize, mask: u64) -> Result<Self> {
        if n > MAX_SUBSET_N {
            return param(format!("ground set size {n} exceeds {MAX_SUBSET_N}"));
        }
        if mask & !low_bits(n) != 0 {
            return param(format!("mask {mask:#x} has bits outside [{n}]"));
        }
        Ok(Subset { n: n as u8, mask })
    }

    /// Builds a subset from 1-based elements.
    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elements: I) -> Result<Self> {
        let mut mask = 0u64;
        for x in elements {
            if x == 0 || x > n {
                return param(format!("element {x} outside [1, {n}]"));
            }
            mask |= 1 << (x - 1);
        }
        Subset::new(n, mask)
    }

    pub fn empty(n: usize) -> Result<Self> {
        Subset::new(n, 0)
    }

    /// The prefix `[a]`.
    pub fn prefix(n: usize, a: usize) -> Result<Self> {
        if a > n {
            return param(format!("prefix length {a} exceeds n = {n}"));
        }
        Subset::new(n, low_bits(a))
    }

    pub(crate) fn from_raw(n: usize, mask: u64) -> Self {
        debug_assert!(mask & !low_bits(n) == 0);
        Subset { n: n as u8, mask }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, x: usize) -> bool {
        x >= 1 && x <= self.n() && self.mask & (1 << (x - 1)) != 0
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(&self) -> Vec<usize> {
        mask_elements(self.mask)
    }

    /// `s ∩ [a]`.
    pub fn prefix_intersection(&self, a: usize) -> Result<Subset> {
        if a > self.n() {
            return param(format!("prefix length {a} exceeds n = {}", self.n));
        }
        Ok(Subset::from_raw(self.n(), self.mask & low_bits(a)))
    }

    pub fn intersection(&self, other: &Subset) -> Result<Subset> {
        self.same_ground(other)?;
        Ok(Subset::from_raw(self.n(), self.mask & other.mask))
    }

    pub fn union(&self, other: &Subset) -> Result<Subset> {
        self.same_ground(other)?;
        Ok(Subset::from_raw(self.n(), self.mask | other.mask))
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.mask & !other.mask == 0
    }

    fn same_ground(&self, other: &Subset) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.elements().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

/// 1-based elements of a raw mask.
pub fn mask_elements(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize + 1);
        mask &= mask - 1;
    }
    out
}

/// The `t`-th smallest element (1-based) of `mask`, if it has that many.
#[inline]
pub fn nth_smallest(mut mask: u64, t: usize) -> Option<usize> {
    if t == 0 || (mask.count_ones() as usize) < t {
        return None;
    }
    for _ in 1..t {
        mask &= mask - 1;
    }
    Some(mask.trailing_zeros() as usize + 1)
}

#[inline]
pub(crate) fn bit(x: usize) -> u64 {
    1u64 << (x - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, xs: &[usize]) -> Subset {
        Subset::from_elements(n, xs.iter().copied()).unwrap()
    }

    #[test]
    fn prefix_intersection_examples() {
        assert_eq!(s(5, &[1, 3, 5]).prefix_intersection(3).unwrap(), s(5, &[1, 3]));
        assert_eq!(s(5, &[1, 3, 5]).prefix_intersection(0).unwrap(), s(5, &[]));
        assert_eq!(s(5, &[1, 3, 5]).prefix_intersection(5).unwrap(), s(5, &[1, 3, 5]));
        assert!(s(5, &[1]).prefix_intersection(6).is_err());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Subset::from_elements(3, [4]).is_err());
        assert!(Subset::from_elements(3, [0]).is_err());
        assert!(Subset::new(3, 0b1000).is_err());
        assert!(Subset::new(65, 0).is_err());
        assert!(Subset::new(64, u64::MAX).is_ok());
    }

    #[test]
    fn nth_smallest_picks_in_order() {
        let m = s(8, &[2, 5, 7]).mask();
        assert_eq!(nth_smallest(m, 1), Some(2));
        assert_eq!(nth_smallest(m, 2), Some(5));
        assert_eq!(nth_smallest(m, 3), Some(7));
        assert_eq!(nth_smallest(m, 4), None);
    }

    #[test]
    fn display_is_one_based() {
        assert_eq!(s(4, &[1, 4]).to_string(), "{1,4}");
        assert_eq!(s(4, &[]).to_string(), "{}");
    }
}
