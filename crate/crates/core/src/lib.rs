//! Cross `t`-intersecting set families.
//!
//! Subsets of `[n]` are bitmasks and families are indicator vectors over all
//! `2^n` masks. On top of that sit the intersection predicates and shifting
//! ([`props`]), necessary intersection points and the reduction that drives a
//! configuration to the extremal shape ([`nip`]), closed-form maxima
//! ([`extremal`]), and an exhaustive search used to check them ([`oracle`]).
//! All measure arithmetic is exact.

pub mod error;
pub mod exact;
pub mod extremal;
pub mod measures;
pub mod nip;
pub mod oracle;
pub mod props;
pub mod setcore;

pub use error::{Error, Result};
pub use measures::MeasureTable;
pub use props::CrossInstance;
pub use setcore::{Family, Subset};
