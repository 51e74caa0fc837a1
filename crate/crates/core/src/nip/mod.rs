//! Necessary intersection points and the reduction that pushes the maximal
//! one down until the configuration has the extremal shape.
//!
//! A point `a` is necessary for `ℱ_1, ..., ℱ_r` when some transversal meet
//! `x` has `a ∈ x` and `|[a] ∩ x| = t`, i.e. `a` is the `t`-th smallest
//! element of `x`. For a single family the meets are `F ∩ F'` with `t = 1`.

mod cross;
mod single;
mod trace;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{param, Error, Result};
use crate::props::{is_cross_t_intersecting, is_intersecting, meet_closure_with_witnesses, meet_floor, shift_mask};
use crate::setcore::{bit, low_bits, nth_smallest, Family, Subset};

pub use cross::{reduce_cross_to_extremal, reduce_step_cross, CrossParams};
pub use single::{reduce_single_to_extremal, reduce_step_single};
pub use trace::{ReductionStep, ShiftTarget, StepCase, Trace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NipReport {
    /// All necessary intersection points, ascending.
    pub points: Vec<usize>,
    pub max_point: Option<usize>,
    /// One member per family whose meet certifies `max_point`; for a single
    /// family this is the pair `(F, F')`.
    pub witnesses: Option<Vec<Subset>>,
}

impl NipReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "points": self.points,
            "max_point": self.max_point,
            "witnesses": self.witnesses.as_ref().map(|w| w.iter().map(Subset::elements).collect::<Vec<_>>()),
        })
    }
}

fn report(families: &[Family], t: usize) -> Result<NipReport> {
    let n = families[0].n();
    let closure = meet_closure_with_witnesses(families);
    let mut points = BTreeSet::new();
    let mut best: Option<(usize, &Vec<u64>)> = None;
    for (x, tuple) in &closure {
        let a = nth_smallest(*x, t).ok_or_else(|| {
            Error::Domain(format!("meet {} has fewer than t = {t} elements", Subset::from_raw(n, *x)))
        })?;
        points.insert(a);
        if best.map_or(true, |(b, _)| a > b) {
            best = Some((a, tuple));
        }
    }
    Ok(NipReport {
        points: points.into_iter().collect(),
        max_point: best.map(|(a, _)| a),
        witnesses: best.map(|(_, tuple)| tuple.iter().map(|&m| Subset::from_raw(n, m)).collect()),
    })
}

/// Points `a` with `F ∩ F' ∩ [a] = {a}` for some `F, F' ∈ f` (possibly equal).
pub fn nip_single(f: &Family) -> Result<NipReport> {
    if !is_intersecting(f) {
        return Err(Error::Domain("family is not intersecting".into()));
    }
    report(&[f.clone(), f.clone()], 1)
}

pub fn nip_cross(families: &[Family], t: usize) -> Result<NipReport> {
    check_cross(families, t)?;
    report(families, t)
}

fn check_cross(families: &[Family], t: usize) -> Result<()> {
    if families.len() < 2 {
        return param(format!("need at least 2 families, got {}", families.len()));
    }
    if t == 0 {
        return param("t must be at least 1");
    }
    for f in &families[1..] {
        families[0].check_ground(f.n())?;
    }
    if !is_cross_t_intersecting(families, t) {
        return Err(Error::Domain(format!("families are not cross {t}-intersecting")));
    }
    Ok(())
}

/// Largest necessary intersection point; only the inclusion-minimal meets
/// matter because `x ⊆ y` puts the `t`-th element of `x` at or after that of `y`.
pub(crate) fn max_nip(families: &[Family], t: usize) -> Option<usize> {
    let floor = meet_floor(families).ok()?;
    floor.iter().filter_map(|&x| nth_smallest(x, t)).max()
}

pub(crate) fn max_nip_single(f: &Family) -> Option<usize> {
    max_nip(&[f.clone(), f.clone()], 1)
}

/// Members `F` of `target` such that some `y` in `others_closure` has
/// `a ∈ F ∩ y` and `|[a] ∩ F ∩ y| = t`.
fn dependents_against(target: &Family, others_closure: &Family, a: usize, t: usize) -> Family {
    let prefix = low_bits(a);
    let ab = bit(a);
    let projections: BTreeSet<u64> = others_closure
        .masks()
        .map(|y| y & prefix)
        .filter(|y| y & ab != 0)
        .collect();
    let mut out = Family::empty(target.n()).expect("n already validated");
    for m in target.masks() {
        let p = m & prefix;
        if p & ab != 0 && projections.iter().any(|&y| (p & y).count_ones() as usize == t) {
            out.set(m);
        }
    }
    out
}

pub(crate) fn dependents_unchecked(families: &[Family], j: usize, a: usize, t: usize) -> Family {
    let others: Vec<Family> = families
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, f)| f.clone())
        .collect();
    let closure = crate::props::meet_closure(&others).expect("at least one other family");
    dependents_against(&families[j], &closure, a, t)
}

/// `ℱ_j(a_*)`: members of family `j` (0-based) taking part in a witness for
/// the maximal necessary intersection point `a_star`.
pub fn dependent_sets(families: &[Family], t: usize, j: usize, a_star: usize) -> Result<Family> {
    check_cross(families, t)?;
    if j >= families.len() {
        return param(format!("family index {j} out of range for r = {}", families.len()));
    }
    match max_nip(families, t) {
        Some(a) if a == a_star => Ok(dependents_unchecked(families, j, a_star, t)),
        other => Err(Error::Domain(format!(
            "{a_star} is not the maximal necessary intersection point (that is {other:?})"
        ))),
    }
}

/// `ℱ(a_*)`: members `F` with `F ∩ F' ∩ [a_*] = {a_*}` for some `F' ∈ f`.
pub fn dependent_sets_single(f: &Family, a_star: usize) -> Result<Family> {
    if !is_intersecting(f) {
        return Err(Error::Domain("family is not intersecting".into()));
    }
    match max_nip_single(f) {
        Some(a) if a == a_star => Ok(dependents_against(f, f, a_star, 1)),
        other => Err(Error::Domain(format!(
            "{a_star} is not the maximal necessary intersection point (that is {other:?})"
        ))),
    }
}

/// Smallest `s > a_star` with `s ∉ F` and `σ_{s a_star}(F) ∉ family`.
pub fn find_shift_target(family: &Family, set: &Subset, a_star: usize) -> Result<usize> {
    let n = family.n();
    if set.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: set.n() });
    }
    if a_star == 0 || a_star > n {
        return param(format!("a_* = {a_star} outside [1, {n}]"));
    }
    if !family.contains(set) {
        return Err(Error::Precondition(format!("{set} is not a member of the family")));
    }
    if !set.contains(a_star) {
        return Err(Error::Precondition(format!("{set} does not contain a_* = {a_star}")));
    }
    shift_target_unchecked(family, set.mask(), a_star).ok_or_else(|| {
        Error::Precondition(format!(
            "no s in [{}, {n}] with s ∉ {set} and σ_(s,{a_star})({set}) outside the family; \
             the bound on n does not hold here",
            a_star + 1
        ))
    })
}

pub(crate) fn shift_target_unchecked(family: &Family, m: u64, a_star: usize) -> Option<usize> {
    ((a_star + 1)..=family.n())
        .find(|&s| m & bit(s) == 0 && !family.contains_mask(shift_mask(m, s, a_star)))
}

/// Where a dependent set goes: `F \ {a_*}` or `σ_{s a_*}(F)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Move {
    Truncate,
    Shift(usize),
}

/// New images for a batch of dependent sets.
pub(crate) struct Assignment {
    /// `(set, move, image)` in ascending order of `set`.
    pub targets: Vec<(u64, Move, u64)>,
    /// Sets of size at most `k` whose smallest target lands on an image
    /// already used by a truncation or an earlier set.
    pub collisions: Vec<u64>,
    /// Whether the default moves had to be replaced by a matching.
    pub matched: bool,
}

/// Gives every set in `sets` a distinct image outside `family` that weighs
/// at least as much under a measure non-increasing on `[k, k̂]`.
///
/// Default moves: sets larger than `k` drop `a_*`, the others take the
/// smallest `s > a_*` with `σ_{s a_*}(F)` outside the family. If those
/// images clash, the colliding sets are recorded and a maximum bipartite
/// matching (augmenting paths, candidates in default-first order) picks the
/// images instead; there a set larger than `k` may also be shifted, since
/// shifting keeps the size. `Err` lists the sets left without an image.
pub(crate) fn assign_images(
    family: &Family,
    sets: &[u64],
    a_star: usize,
    k: usize,
) -> std::result::Result<Assignment, Vec<u64>> {
    let n = family.n();
    let ab = bit(a_star);
    let candidates: Vec<Vec<(Move, u64)>> = sets
        .iter()
        .map(|&m| {
            let truncate = (m.count_ones() as usize > k && !family.contains_mask(m & !ab))
                .then_some((Move::Truncate, m & !ab));
            let shifts = ((a_star + 1)..=n)
                .filter(|&s| m & bit(s) == 0)
                .map(|s| (Move::Shift(s), shift_mask(m, s, a_star)))
                .filter(|&(_, img)| !family.contains_mask(img));
            truncate.into_iter().chain(shifts).collect()
        })
        .collect();
    let stranded: Vec<u64> = sets
        .iter()
        .zip(&candidates)
        .filter(|(_, c)| c.is_empty())
        .map(|(&m, _)| m)
        .collect();
    if !stranded.is_empty() {
        return Err(stranded);
    }

    let mut used: BTreeSet<u64> = candidates
        .iter()
        .filter(|c| c[0].0 == Move::Truncate)
        .map(|c| c[0].1)
        .collect();
    let mut collisions = Vec::new();
    for (&m, c) in sets.iter().zip(&candidates) {
        if c[0].0 != Move::Truncate && !used.insert(c[0].1) {
            collisions.push(m);
        }
    }
    if collisions.is_empty() {
        let targets = sets.iter().zip(&candidates).map(|(&m, c)| (m, c[0].0, c[0].1)).collect();
        return Ok(Assignment {
            targets,
            collisions,
            matched: false,
        });
    }

    let mut owner: BTreeMap<u64, usize> = BTreeMap::new();
    let mut choice: Vec<Option<usize>> = vec![None; sets.len()];
    fn augment(
        i: usize,
        candidates: &[Vec<(Move, u64)>],
        owner: &mut BTreeMap<u64, usize>,
        choice: &mut [Option<usize>],
        seen: &mut BTreeSet<u64>,
    ) -> bool {
        for (c, &(_, img)) in candidates[i].iter().enumerate() {
            if !seen.insert(img) {
                continue;
            }
            let free = match owner.get(&img) {
                None => true,
                Some(&other) => augment(other, candidates, owner, choice, seen),
            };
            if free {
                owner.insert(img, i);
                choice[i] = Some(c);
                return true;
            }
        }
        false
    }
    let mut unmatched = Vec::new();
    for i in 0..sets.len() {
        if !augment(i, &candidates, &mut owner, &mut choice, &mut BTreeSet::new()) {
            unmatched.push(sets[i]);
        }
    }
    if !unmatched.is_empty() {
        return Err(unmatched);
    }
    let targets = sets
        .iter()
        .zip(&choice)
        .zip(&candidates)
        .map(|((&m, c), cands)| {
            let (mv, img) = cands[c.expect("matched")];
            (m, mv, img)
        })
        .collect();
    Ok(Assignment {
        targets,
        collisions,
        matched: true,
    })
}
