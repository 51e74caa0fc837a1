//! Family file format.
//!
//! Canonical form: `{"n": 4, "sets": [[1, 2], [1, 3]]}` with 1-based elements.
//! Compact form: `{"n": 4, "masks": ["3", "5"]}` with hexadecimal masks
//! (bit `i - 1` set for element `i`). Member order and duplicates are
//! irrelevant on input; output is sorted by mask.

use serde::{Deserialize, Serialize};

use super::family::{Family, MAX_FAMILY_N};
use super::subset::low_bits;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    n: u64,
    #[serde(default)]
    sets: Option<Vec<Vec<u64>>>,
    #[serde(default)]
    masks: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
struct CanonicalFamily<'a> {
    n: usize,
    sets: &'a [Vec<usize>],
}

#[derive(Debug, Serialize)]
struct CompactFamily {
    n: usize,
    masks: Vec<String>,
}

impl Family {
    pub fn from_json_str(text: &str) -> Result<Family> {
        let raw: RawFamily =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("family JSON: {e}")))?;
        Family::from_raw_json(raw)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Family> {
        let raw: RawFamily =
            serde_json::from_value(value).map_err(|e| Error::Format(format!("family JSON: {e}")))?;
        Family::from_raw_json(raw)
    }

    fn from_raw_json(raw: RawFamily) -> Result<Family> {
        if raw.n > MAX_FAMILY_N as u64 {
            return Err(Error::Format(format!(
                "n = {} exceeds the family limit {MAX_FAMILY_N}",
                raw.n
            )));
        }
        let n = raw.n as usize;
        let mut family = Family::empty(n)?;
        match (raw.sets, raw.masks) {
            (Some(sets), None) => {
                for (i, set) in sets.iter().enumerate() {
                    let mut mask = 0u64;
                    for &x in set {
                        if x == 0 || x > n as u64 {
                            return Err(Error::Format(format!(
                                "sets[{i}]: element {x} outside [1, {n}]"
                            )));
                        }
                        mask |= 1 << (x - 1);
                    }
                    family.set(mask);
                }
            }
            (None, Some(masks)) => {
                for (i, hex) in masks.iter().enumerate() {
                    let digits = hex.trim_start_matches("0x");
                    let mask = u64::from_str_radix(digits, 16).map_err(|_| {
                        Error::Format(format!("masks[{i}]: {hex:?} is not a hexadecimal mask"))
                    })?;
                    if mask & !low_bits(n) != 0 {
                        return Err(Error::Format(format!(
                            "masks[{i}]: {hex:?} has bits outside [{n}]"
                        )));
                    }
                    family.set(mask);
                }
            }
            (Some(_), Some(_)) => {
                return Err(Error::Format("family JSON has both \"sets\" and \"masks\"".into()))
            }
            (None, None) => {
                return Err(Error::Format("family JSON needs \"sets\" or \"masks\"".into()))
            }
        }
        Ok(family)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let sets = self.to_sets();
        serde_json::to_value(CanonicalFamily { n: self.n(), sets: &sets })
            .expect("family serialises")
    }

    pub fn to_compact_json_value(&self) -> serde_json::Value {
        let masks = self.masks().map(|m| format!("{m:x}")).collect();
        serde_json::to_value(CompactFamily { n: self.n(), masks }).expect("family serialises")
    }

    pub fn to_json_string(&self) -> String {
        self.to_json_value().to_string()
    }
}
