//! Intersection predicates and the shifting operator `σ_ij`.

use std::collections::BTreeMap;

use crate::error::{param, Error, Result};
use crate::measures::MeasureTable;
use crate::setcore::{bit, minimal_elements, Family, Subset};

/// `r` families over a common ground set together with the threshold `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossInstance {
    t: usize,
    families: Vec<Family>,
    caps: Option<Vec<usize>>,
    measures: Option<Vec<MeasureTable>>,
}

impl CrossInstance {
    pub fn new(t: usize, families: Vec<Family>) -> Result<CrossInstance> {
        if families.len() < 2 {
            return param(format!("need at least 2 families, got {}", families.len()));
        }
        if t == 0 {
            return param("intersection threshold t must be at least 1");
        }
        let n = families[0].n();
        for f in &families[1..] {
            f.check_ground(n)?;
        }
        Ok(CrossInstance {
            t,
            families,
            caps: None,
            measures: None,
        })
    }

    /// Attaches per-family size caps `k̂_j`; every member must respect its cap.
    pub fn with_caps(mut self, caps: Vec<usize>) -> Result<CrossInstance> {
        if caps.len() != self.r() {
            return param(format!("{} caps for {} families", caps.len(), self.r()));
        }
        for (j, (f, &cap)) in self.families.iter().zip(&caps).enumerate() {
            if cap > self.n() {
                return param(format!("cap {cap} of family {} exceeds n", j + 1));
            }
            if let Some(m) = f.masks().find(|m| m.count_ones() as usize > cap) {
                return param(format!(
                    "family {} has member {} above its cap {cap}",
                    j + 1,
                    Subset::new(self.n(), m)?
                ));
            }
        }
        self.caps = Some(caps);
        Ok(self)
    }

    pub fn with_measures(mut self, measures: Vec<MeasureTable>) -> Result<CrossInstance> {
        if measures.len() != self.r() {
            return param(format!("{} measures for {} families", measures.len(), self.r()));
        }
        for m in &measures {
            if m.n() != self.n() {
                return Err(Error::DimensionMismatch {
                    expected: self.n(),
                    found: m.n(),
                });
            }
        }
        self.measures = Some(measures);
        Ok(self)
    }

    pub fn r(&self) -> usize {
        self.families.len()
    }

    pub fn n(&self) -> usize {
        self.families[0].n()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn caps(&self) -> Option<&[usize]> {
        self.caps.as_deref()
    }

    pub fn measures(&self) -> Option<&[MeasureTable]> {
        self.measures.as_deref()
    }

    /// Same parameters, new families (caps are re-checked).
    pub fn replace_families(&self, families: Vec<Family>) -> Result<CrossInstance> {
        let mut next = CrossInstance::new(self.t, families)?;
        if let Some(caps) = &self.caps {
            next = next.with_caps(caps.clone())?;
        }
        next.measures = self.measures.clone();
        Ok(next)
    }

    pub fn is_cross_t_intersecting(&self) -> bool {
        is_cross_t_intersecting(&self.families, self.t)
    }
}

/// All distinct meets `F_1 ∩ ... ∩ F_r` over tuples `F_j ∈ families[j]`.
pub fn meet_closure(families: &[Family]) -> Result<Family> {
    let (first, rest) = families
        .split_first()
        .ok_or_else(|| Error::Param("meet closure of an empty family list".into()))?;
    let mut acc = first.clone();
    for g in rest {
        acc.check_ground(g.n())?;
        let right: Vec<u64> = g.masks().collect();
        let mut next = Family::empty(acc.n())?;
        for x in acc.masks() {
            for &y in &right {
                next.set(x & y);
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Inclusion-minimal elements of the meet closure.
///
/// Every threshold test of the form `|x ∩ S| ≥ t for all meets x` only needs
/// these, and they are much cheaper to obtain than the full closure.
pub fn meet_floor(families: &[Family]) -> Result<Vec<u64>> {
    let (first, rest) = families
        .split_first()
        .ok_or_else(|| Error::Param("meet closure of an empty family list".into()))?;
    let mut acc = first.minimal_masks();
    for g in rest {
        first.check_ground(g.n())?;
        let right = g.minimal_masks();
        let meets = acc
            .iter()
            .flat_map(|&x| right.iter().map(move |&y| x & y))
            .collect();
        acc = minimal_elements(meets);
    }
    Ok(acc)
}

/// Meet closure that also remembers one generating tuple per element.
pub(crate) fn meet_closure_with_witnesses(families: &[Family]) -> BTreeMap<u64, Vec<u64>> {
    let mut acc: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    if let Some(first) = families.first() {
        for m in first.masks() {
            acc.insert(m, vec![m]);
        }
    }
    for g in families.iter().skip(1) {
        let right: Vec<u64> = g.masks().collect();
        let mut next: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for (x, tuple) in &acc {
            for &y in &right {
                next.entry(x & y).or_insert_with(|| {
                    let mut w = tuple.clone();
                    w.push(y);
                    w
                });
            }
        }
        acc = next;
    }
    acc
}

/// Whether every transversal `(F_1, ..., F_r)` has `|⋂ F_j| ≥ t`.
///
/// Vacuously true when some family is empty. A family containing `∅` fails
/// for every `t ≥ 1` as soon as the other families are non-empty.
pub fn is_cross_t_intersecting(families: &[Family], t: usize) -> bool {
    match meet_floor(families) {
        Ok(floor) => floor.iter().all(|x| x.count_ones() as usize >= t),
        Err(_) => false,
    }
}

/// Whether `|F ∩ F'| ≥ t` for all `F, F' ∈ f`, including `F = F'`.
///
/// Because the pair `(F, F)` counts, every member must itself have at least
/// `t` elements.
pub fn is_t_intersecting(f: &Family, t: usize) -> bool {
    let mins = f.minimal_masks();
    mins.iter()
        .enumerate()
        .all(|(i, &a)| mins[i..].iter().all(|&b| (a & b).count_ones() as usize >= t))
}

pub fn is_intersecting(f: &Family) -> bool {
    is_t_intersecting(f, 1)
}

#[inline]
pub(crate) fn shift_mask(m: u64, i: usize, j: usize) -> u64 {
    let (bi, bj) = (bit(i), bit(j));
    if m & bj != 0 && m & bi == 0 {
        (m & !bj) | bi
    } else {
        m
    }
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i == j {
        return param(format!("shift needs distinct elements, got i = j = {i}"));
    }
    if i == 0 || j == 0 || i > n || j > n {
        return param(format!("shift elements ({i}, {j}) outside [1, {n}]"));
    }
    Ok(())
}

/// `σ_ij(F)`: replace `j` by `i` when `j ∈ F` and `i ∉ F`.
pub fn shift_set(s: &Subset, i: usize, j: usize) -> Result<Subset> {
    check_pair(s.n(), i, j)?;
    Subset::new(s.n(), shift_mask(s.mask(), i, j))
}

/// `σ_ij(ℱ) = {σ_ij(F) : F ∈ ℱ} ∪ {F ∈ ℱ : σ_ij(F) ∈ ℱ}`.
pub fn shift_family(f: &Family, i: usize, j: usize) -> Result<Family> {
    check_pair(f.n(), i, j)?;
    Ok(shift_family_unchecked(f, i, j).0)
}

/// Returns the shifted family and whether anything moved.
pub(crate) fn shift_family_unchecked(f: &Family, i: usize, j: usize) -> (Family, bool) {
    let mut out = f.clone();
    let mut moved = false;
    for m in f.masks() {
        let image = shift_mask(m, i, j);
        if image != m && !f.contains_mask(image) {
            out.clear(m);
            out.set(image);
            moved = true;
        }
    }
    (out, moved)
}

/// Applies `σ_ij` for all `i < j` in lexicographic sweeps, to all families
/// simultaneously, until a full sweep changes nothing.
pub fn shift_to_fixpoint(families: &[Family]) -> Result<Vec<Family>> {
    let Some(first) = families.first() else {
        return Ok(Vec::new());
    };
    let n = first.n();
    for f in families {
        first.check_ground(f.n())?;
    }
    let mut current = families.to_vec();
    loop {
        let mut changed = false;
        for i in 1..=n {
            for j in (i + 1)..=n {
                for f in current.iter_mut() {
                    let (next, moved) = shift_family_unchecked(f, i, j);
                    if moved {
                        *f = next;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Ok(current);
        }
    }
}

/// Whether `σ_ij(f) = f` for all `i < j`.
pub fn is_shifted(f: &Family) -> bool {
    let n = f.n();
    f.masks().all(|m| {
        (1..=n).all(|i| ((i + 1)..=n).all(|j| f.contains_mask(shift_mask(m, i, j))))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: usize, sets: &[&[usize]]) -> Family {
        Family::from_sets(n, sets).unwrap()
    }

    fn scatter(n: usize, a: usize, t: usize) -> Family {
        Family::from_fn(n, |m| (m & ((1 << a) - 1)).count_ones() as usize >= t).unwrap()
    }

    #[test]
    fn meet_closure_examples() {
        let one = meet_closure(&[fam(3, &[&[1, 2]])]).unwrap();
        assert_eq!(one, fam(3, &[&[1, 2]]));

        let two = meet_closure(&[fam(3, &[&[1, 2], &[2, 3]]), fam(3, &[&[2]])]).unwrap();
        assert_eq!(two, fam(3, &[&[2]]));

        // The four tuples meet in {1,2}, {2}, {1} and {3}.
        let four =
            meet_closure(&[fam(3, &[&[1, 2], &[1, 3]]), fam(3, &[&[1, 2], &[2, 3]])]).unwrap();
        assert_eq!(four, fam(3, &[&[1, 2], &[1], &[2], &[3]]));

        assert!(meet_closure(&[]).is_err());
    }

    #[test]
    fn cross_predicate_examples() {
        let f = fam(2, &[&[1], &[1, 2]]);
        assert!(is_cross_t_intersecting(&[f.clone(), f], 1));
        assert!(!is_cross_t_intersecting(&[fam(3, &[&[1, 2]]), fam(3, &[&[2, 3]])], 2));
        let b32 = fam(3, &[&[1, 2], &[1, 2, 3]]);
        assert!(is_cross_t_intersecting(&[scatter(3, 2, 1), b32.clone(), b32], 1));
    }

    #[test]
    fn empty_set_member_fails_cross_predicate() {
        let with_empty = fam(2, &[&[], &[1]]);
        assert!(!is_cross_t_intersecting(&[with_empty, fam(2, &[&[1]])], 1));
    }

    #[test]
    fn t_intersecting_examples() {
        assert!(is_t_intersecting(&fam(3, &[&[1, 2], &[2, 3]]), 1));
        assert!(!is_t_intersecting(&fam(4, &[&[1, 2], &[3, 4]]), 1));
        // A_{4,2,2} is exactly the sets containing {1,2}.
        assert!(is_t_intersecting(&scatter(4, 2, 2), 2));
        // Sets with two of {1,2,3}: intersecting, but {1,2} and {1,3} share one point.
        assert!(is_t_intersecting(&scatter(4, 3, 2), 1));
        assert!(!is_t_intersecting(&scatter(4, 3, 2), 2));
        // F = F' forces every member to have at least t elements.
        assert!(!is_t_intersecting(&fam(3, &[&[1]]), 2));
    }

    #[test]
    fn shift_set_examples() {
        let s = |xs: &[usize]| Subset::from_elements(3, xs.iter().copied()).unwrap();
        assert_eq!(shift_set(&s(&[2, 3]), 1, 2).unwrap(), s(&[1, 3]));
        assert_eq!(shift_set(&s(&[1, 2]), 1, 2).unwrap(), s(&[1, 2]));
        assert_eq!(shift_set(&s(&[3]), 1, 2).unwrap(), s(&[3]));
        assert!(shift_set(&s(&[3]), 2, 2).is_err());
        assert!(shift_set(&s(&[3]), 1, 4).is_err());
    }

    #[test]
    fn shift_family_examples() {
        assert_eq!(shift_family(&fam(2, &[&[2]]), 1, 2).unwrap(), fam(2, &[&[1]]));
        let both = fam(2, &[&[1], &[2]]);
        assert_eq!(shift_family(&both, 1, 2).unwrap(), both);
        let f = fam(3, &[&[2, 3], &[1, 3]]);
        assert_eq!(shift_family(&f, 1, 2).unwrap(), f);
    }

    #[test]
    fn shift_to_fixpoint_examples() {
        let shifted = fam(3, &[&[1], &[1, 2]]);
        assert_eq!(shift_to_fixpoint(&[shifted.clone()]).unwrap(), vec![shifted]);
        assert_eq!(shift_to_fixpoint(&[fam(2, &[&[2]])]).unwrap(), vec![fam(2, &[&[1]])]);
        assert_eq!(shift_to_fixpoint(&[fam(3, &[&[2, 3]])]).unwrap(), vec![fam(3, &[&[1, 2]])]);
    }

    #[test]
    fn is_shifted_examples() {
        assert!(is_shifted(&fam(2, &[&[1]])));
        assert!(!is_shifted(&fam(2, &[&[2]])));
        for n in 1..=5 {
            for a in 1..=n {
                for t in 1..=a {
                    assert!(is_shifted(&scatter(n, a, t)), "A_{{{n},{a},{t}}}");
                }
            }
        }
    }

    #[test]
    fn instance_validation() {
        let f = fam(3, &[&[1, 2]]);
        assert!(CrossInstance::new(1, vec![f.clone()]).is_err());
        assert!(CrossInstance::new(0, vec![f.clone(), f.clone()]).is_err());
        assert!(CrossInstance::new(1, vec![f.clone(), fam(4, &[&[1]])]).is_err());
        let inst = CrossInstance::new(1, vec![f.clone(), f.clone()]).unwrap();
        assert!(inst.clone().with_caps(vec![1, 2]).is_err());
        assert!(inst.with_caps(vec![2, 2]).is_ok());
    }
}
