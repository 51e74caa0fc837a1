use std::fmt;

use super::subset::{low_bits, Subset};
use crate::error::{param, Error, Result};

/// Largest ground set for which whole families are materialised.
pub const MAX_FAMILY_N: usize = 24;

/// A family of subsets of `[n]`, stored as an indicator bit vector over all
/// `2^n` masks.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    n: usize,
    words: Vec<u64>,
}

// Per-bit masks selecting positions whose bit `b` is clear, for b < 6.
const CLEAR_BIT: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

impl Family {
    pub fn empty(n: usize) -> Result<Family> {
        if n > MAX_FAMILY_N {
            return param(format!("families over n = {n} exceed the limit {MAX_FAMILY_N}"));
        }
        let words = ((1usize << n) + 63) / 64;
        Ok(Family {
            n,
            words: vec![0; words],
        })
    }

    /// All subsets of `[n]`, including the empty set.
    pub fn power_set(n: usize) -> Result<Family> {
        Family::from_fn(n, |_| true)
    }

    /// `[n]^(k)`.
    pub fn level(n: usize, k: usize) -> Result<Family> {
        Family::from_fn(n, |m| m.count_ones() as usize == k)
    }

    pub fn from_fn(n: usize, mut pred: impl FnMut(u64) -> bool) -> Result<Family> {
        let mut f = Family::empty(n)?;
        for m in 0..(1u64 << n) {
            if pred(m) {
                f.set(m);
            }
        }
        Ok(f)
    }

    pub fn from_masks<I: IntoIterator<Item = u64>>(n: usize, masks: I) -> Result<Family> {
        let mut f = Family::empty(n)?;
        let valid = low_bits(n);
        for m in masks {
            if m & !valid != 0 {
                return param(format!("mask {m:#x} has bits outside [{n}]"));
            }
            f.set(m);
        }
        Ok(f)
    }

    pub fn from_subsets<I: IntoIterator<Item = Subset>>(n: usize, sets: I) -> Result<Family> {
        let mut f = Family::empty(n)?;
        for s in sets {
            if s.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.n(),
                });
            }
            f.set(s.mask());
        }
        Ok(f)
    }

    /// Convenience constructor from 1-based element lists.
    pub fn from_sets<S: AsRef<[usize]>>(n: usize, sets: &[S]) -> Result<Family> {
        let subsets = sets
            .iter()
            .map(|s| Subset::from_elements(n, s.as_ref().iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Family::from_subsets(n, subsets)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains_mask(&self, m: u64) -> bool {
        m < (1u64 << self.n) && self.words[(m >> 6) as usize] & (1 << (m & 63)) != 0
    }

    pub fn contains(&self, s: &Subset) -> bool {
        s.n() == self.n && self.contains_mask(s.mask())
    }

    #[inline]
    pub(crate) fn set(&mut self, m: u64) {
        self.words[(m >> 6) as usize] |= 1 << (m & 63);
    }

    #[inline]
    pub(crate) fn clear(&mut self, m: u64) {
        self.words[(m >> 6) as usize] &= !(1 << (m & 63));
    }

    /// Adds `s`; returns whether it was absent.
    pub fn insert(&mut self, s: Subset) -> Result<bool> {
        self.check_ground(s.n())?;
        let fresh = !self.contains_mask(s.mask());
        self.set(s.mask());
        Ok(fresh)
    }

    /// Removes `s`; returns whether it was present.
    pub fn remove(&mut self, s: Subset) -> Result<bool> {
        self.check_ground(s.n())?;
        let present = self.contains_mask(s.mask());
        self.clear(s.mask());
        Ok(present)
    }

    /// Member masks in increasing numeric order.
    pub fn masks(&self) -> Masks<'_> {
        Masks {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        let n = self.n;
        self.masks().map(move |m| Subset::from_raw(n, m))
    }

    /// `{F ∈ f : lo ≤ |F| ≤ hi}`.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Family> {
        if lo > hi || hi > self.n {
            return param(format!("slice bounds [{lo}, {hi}] invalid for n = {}", self.n));
        }
        let mut out = Family::empty(self.n)?;
        for m in self.masks() {
            let s = m.count_ones() as usize;
            if (lo..=hi).contains(&s) {
                out.set(m);
            }
        }
        Ok(out)
    }

    /// `|f^k|` for `k = 0..=n`.
    pub fn level_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n + 1];
        for m in self.masks() {
            sizes[m.count_ones() as usize] += 1;
        }
        sizes
    }

    /// `{T : ∃F ∈ f, F ⊆ T}`.
    pub fn up_closure(&self) -> Family {
        let mut words = self.words.clone();
        for b in 0..self.n {
            if b < 6 {
                let shift = 1u32 << b;
                for w in words.iter_mut() {
                    *w |= (*w & CLEAR_BIT[b]) << shift;
                }
            } else {
                let stride = 1usize << (b - 6);
                for i in 0..words.len() {
                    if i & stride == 0 {
                        words[i | stride] |= words[i];
                    }
                }
            }
        }
        Family { n: self.n, words }
    }

    pub fn is_up_closed(&self) -> bool {
        self.up_closure() == *self
    }

    /// Members with no proper subset in the family.
    pub fn minimal_masks(&self) -> Vec<u64> {
        minimal_elements(self.masks().collect())
    }

    pub fn union(&self, other: &Family) -> Result<Family> {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Family) -> Result<Family> {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Family) -> Result<Family> {
        self.zip(other, |a, b| a & !b)
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint_from(&self, other: &Family) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    fn zip(&self, other: &Family, op: impl Fn(u64, u64) -> u64) -> Result<Family> {
        self.check_ground(other.n)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Family { n: self.n, words })
    }

    pub(crate) fn check_ground(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: n,
            });
        }
        Ok(())
    }

    /// Sets as sorted 1-based element lists, in increasing mask order.
    pub fn to_sets(&self) -> Vec<Vec<usize>> {
        self.iter().map(|s| s.elements()).collect()
    }
}

/// Inclusion-minimal elements of a list of masks, sorted and deduplicated.
pub fn minimal_elements(mut masks: Vec<u64>) -> Vec<u64> {
    masks.sort_unstable_by_key(|m| (m.count_ones(), *m));
    masks.dedup();
    let mut out: Vec<u64> = Vec::new();
    for m in masks {
        if !out.iter().any(|&o| o & !m == 0) {
            out.push(m);
        }
    }
    out.sort_unstable();
    out
}

pub struct Masks<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Masks<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.cur != 0 {
                let bit = self.cur.trailing_zeros() as u64;
                self.cur &= self.cur - 1;
                return Some(((self.idx as u64) << 6) | bit);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family(n={}, ", self.n)?;
        f.debug_set().entries(self.iter()).finish()?;
        f.write_str(")")
    }
}
