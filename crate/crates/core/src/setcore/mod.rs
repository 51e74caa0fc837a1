//! Subsets of `[n]` as bitmasks and families as indicator vectors over `2^n`.

mod family;
mod json;
mod subset;

pub use family::{minimal_elements, Family, Masks, MAX_FAMILY_N};
pub use subset::{low_bits, mask_elements, nth_smallest, Subset, MAX_SUBSET_N};
pub(crate) use subset::bit;

/// `s ∩ [a]`.
pub fn prefix_intersection(s: &Subset, a: usize) -> crate::Result<Subset> {
    s.prefix_intersection(a)
}

/// `{F ∈ f : lo ≤ |F| ≤ hi}`.
pub fn slice(f: &Family, lo: usize, hi: usize) -> crate::Result<Family> {
    f.slice(lo, hi)
}

/// Upward closure of `f` in the full lattice.
pub fn up_closure(f: &Family) -> Family {
    f.up_closure()
}
