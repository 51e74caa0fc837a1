//! The Boolean lattice on at most 7 points with families as `u128` bitsets
//! (bit `m` set when the subset with mask `m` is a member).

use crate::props::shift_mask;
use crate::setcore::{minimal_elements, Family};

pub(crate) const LATTICE_MAX_N: usize = 7;

pub(crate) struct Lattice {
    pub n: usize,
    pub size: usize,
    pub strict_supersets: Vec<u128>,
    pub strict_subsets: Vec<u128>,
    /// All images `σ_ij(m)` for `i < j`.
    pub down_shifts: Vec<u128>,
}

#[inline]
pub(crate) fn members(mut bits: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let m = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(m)
        }
    })
}

impl Lattice {
    pub fn new(n: usize) -> Lattice {
        assert!(n <= LATTICE_MAX_N, "lattice ground set too large");
        let size = 1usize << n;
        let mut strict_supersets = vec![0u128; size];
        let mut strict_subsets = vec![0u128; size];
        let mut down_shifts = vec![0u128; size];
        for a in 0..size {
            for b in 0..size {
                if a != b && a & b == a {
                    strict_supersets[a] |= 1 << b;
                    strict_subsets[b] |= 1 << a;
                }
            }
            for i in 1..=n {
                for j in (i + 1)..=n {
                    down_shifts[a] |= 1 << shift_mask(a as u64, i, j);
                }
            }
        }
        Lattice {
            n,
            size,
            strict_supersets,
            strict_subsets,
            down_shifts,
        }
    }

    #[cfg(test)]
    pub fn full(&self) -> u128 {
        if self.size == 128 {
            u128::MAX
        } else {
            (1u128 << self.size) - 1
        }
    }

    pub fn filter(&self, mut pred: impl FnMut(usize) -> bool) -> u128 {
        (0..self.size).filter(|&m| pred(m)).fold(0, |acc, m| acc | 1 << m)
    }

    /// `compat[y] = {S : |S ∩ y| ≥ t}`.
    pub fn compat(&self, t: usize) -> Vec<u128> {
        (0..self.size)
            .map(|y| self.filter(|s| (s & y).count_ones() as usize >= t))
            .collect()
    }

    pub fn minimal(&self, bits: u128) -> Vec<u64> {
        members(bits)
            .filter(|&m| self.strict_subsets[m] & bits == 0)
            .map(|m| m as u64)
            .collect()
    }

    /// Inclusion-minimal meets of `floor` with the members of `bits`.
    pub fn extend_floor(&self, floor: Option<&[u64]>, bits: u128) -> Vec<u64> {
        let mins = self.minimal(bits);
        match floor {
            None => mins,
            Some(floor) => minimal_elements(
                floor
                    .iter()
                    .flat_map(|&x| mins.iter().map(move |&y| x & y))
                    .collect(),
            ),
        }
    }

    pub fn admissible(&self, universe: u128, floor: &[u64], compat: &[u128]) -> u128 {
        floor.iter().fold(universe, |acc, &y| acc & compat[y as usize])
    }

    #[cfg(test)]
    pub fn is_up_closed_in(&self, bits: u128, universe: u128) -> bool {
        members(bits).all(|m| self.strict_supersets[m] & universe & !bits == 0)
    }

    pub fn is_shifted(&self, bits: u128) -> bool {
        members(bits).all(|m| self.down_shifts[m] & !bits == 0)
    }

    /// Members in processing order: larger sets first, then by mask.
    pub fn top_down(&self, bits: u128) -> Vec<usize> {
        let mut elems: Vec<usize> = members(bits).collect();
        elems.sort_by_key(|&m| (std::cmp::Reverse(m.count_ones()), m));
        elems
    }

    pub fn to_family(&self, bits: u128) -> Family {
        Family::from_masks(self.n, members(bits).map(|m| m as u64)).expect("lattice masks fit")
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supersets_and_shifts() {
        let l = Lattice::new(3);
        assert_eq!(members(l.strict_supersets[0b011]).collect::<Vec<_>>(), vec![0b111]);
        assert_eq!(l.strict_subsets[0b111].count_ones(), 7);
        let star = l.filter(|m| m & 1 == 1);
        assert!(l.is_shifted(star));
        assert!(l.is_up_closed_in(star, l.full()));
        assert!(!l.is_shifted(1 << 0b100));
        assert_eq!(Lattice::new(7).full(), u128::MAX);
    }

    #[test]
    fn floor_and_admissible() {
        let l = Lattice::new(3);
        let compat = l.compat(1);
        let a = 1u128 << 0b011 | 1 << 0b111;
        let b = 1u128 << 0b110 | 1 << 0b111;
        let floor = l.extend_floor(Some(&l.extend_floor(None, a)), b);
        assert_eq!(floor, vec![0b010]);
        let w = l.admissible(l.full(), &floor, &compat);
        assert_eq!(w, l.filter(|m| m & 0b010 != 0));
    }
}
