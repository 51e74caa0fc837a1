use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::trace::{ReductionStep, ShiftTarget, StepCase, Trace};
use super::{assign_images, dependents_against, max_nip_single, Move};
use crate::error::{param, Error, Result};
use crate::measures::MeasureTable;
use crate::props::{is_intersecting, is_shifted, shift_to_fixpoint};
use crate::setcore::{bit, low_bits, minimal_elements, Family, Subset};

fn mask_weight(mu: &MeasureTable, m: u64) -> &BigRational {
    mu.weight(m.count_ones() as usize)
}

fn check_params(f: &Family, mu: &MeasureTable, k: usize, khat: usize) -> Result<()> {
    let n = f.n();
    if mu.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mu.n(),
        });
    }
    if k == 0 || k > khat || khat > n {
        return param(format!("need 1 ≤ k ≤ k̂ ≤ n, got k = {k}, k̂ = {khat}, n = {n}"));
    }
    if k > 1 && n < k + khat {
        return Err(Error::HypothesisUnmet(format!("n ≥ k + k̂ fails: {n} < {k} + {khat}")));
    }
    if !mu.is_non_increasing_on(k, khat) {
        return Err(Error::HypothesisUnmet(format!("μ is not non-increasing on [{k}, {khat}]")));
    }
    if let Some(m) = f.masks().find(|m| m.count_ones() as usize > khat) {
        return Err(Error::Precondition(format!(
            "member {} exceeds the size cap {khat}",
            Subset::from_raw(n, m)
        )));
    }
    if !is_intersecting(f) {
        return Err(Error::Domain("family is not intersecting".into()));
    }
    Ok(())
}

/// Whether every two members (including a member with itself) meet inside `[a]`.
fn intersecting_within(f: &Family, a: usize) -> bool {
    let prefix = low_bits(a);
    let mins = minimal_elements(f.masks().map(|m| m & prefix).collect());
    mins.iter()
        .enumerate()
        .all(|(i, &x)| mins[i..].iter().all(|&y| x & y != 0))
}

fn render(n: usize, masks: &[u64]) -> String {
    let parts: Vec<String> = masks.iter().map(|&m| Subset::from_raw(n, m).to_string()).collect();
    parts.join(", ")
}

/// One step for a single intersecting family: replace the dependent sets
/// `ℱ(a_*)` by their heavier half `H` plus `H⁺₁ ∪ H⁺₂`, which meets the rest
/// of the family inside `[a_* - 1]`.
///
/// Every claimed property of the new family is re-checked; a failure comes
/// back as `Error::Precondition` naming the offending sets.
pub fn reduce_step_single(f: &Family, mu: &MeasureTable, k: usize, khat: usize) -> Result<ReductionStep> {
    check_params(f, mu, k, khat)?;
    if !is_shifted(f) {
        return Err(Error::Precondition("family is not shifted".into()));
    }
    let n = f.n();
    let a_star = match max_nip_single(f) {
        Some(a) if a > 1 => a,
        other => {
            return Err(Error::Precondition(format!(
                "maximal necessary intersection point is {other:?}; nothing to reduce"
            )))
        }
    };
    let dependent = dependents_against(f, f, a_star, 1);
    let ab = bit(a_star);
    for m in dependent.masks() {
        if f.contains_mask(m & !ab) {
            return Err(Error::Precondition(format!(
                "dependent set {} still has {} in the family",
                Subset::from_raw(n, m),
                Subset::from_raw(n, m & !ab)
            )));
        }
    }

    // Classes F ∩ [a_* - 1] = A, compared with the complementary class.
    let lower = low_bits(a_star - 1);
    let mut classes: BTreeMap<u64, (Vec<u64>, BigRational)> = BTreeMap::new();
    for m in dependent.masks() {
        let entry = classes.entry(m & lower).or_insert_with(|| (Vec::new(), BigRational::zero()));
        entry.0.push(m);
        entry.1 += mask_weight(mu, m);
    }
    let zero = BigRational::zero();
    let mut heavier = Family::empty(n)?;
    for (&a, (members, weight)) in &classes {
        let other = classes.get(&(lower & !a)).map_or(&zero, |c| &c.1);
        let keep = weight > other || (weight == other && a & 1 != 0);
        if keep {
            for &m in members {
                heavier.set(m);
            }
        }
    }
    let removed = dependent.difference(&heavier)?;

    let members: Vec<u64> = heavier.masks().collect();
    let assignment = assign_images(f, &members, a_star, k).map_err(|left| {
        Error::Precondition(format!(
            "no injective choice of new sets off a_* = {a_star} for {}",
            render(n, &left)
        ))
    })?;
    let mut truncated = Family::empty(n)?;
    let mut shifted = Family::empty(n)?;
    let mut targets = Vec::new();
    for &(m, mv, image) in &assignment.targets {
        match mv {
            Move::Truncate => truncated.set(image),
            Move::Shift(s) => {
                shifted.set(image);
                targets.push(ShiftTarget {
                    family: 1,
                    set: Subset::from_raw(n, m),
                    s,
                    image: Subset::from_raw(n, image),
                });
            }
        }
    }
    let collisions = assignment.collisions;

    let overlap: Vec<u64> = truncated.intersection(&shifted)?.masks().collect();
    if !overlap.is_empty() {
        return Err(Error::Precondition(format!(
            "H⁺₁ and H⁺₂ overlap in {} at a_* = {a_star}",
            render(n, &overlap)
        )));
    }
    if !truncated.is_disjoint_from(f) || !shifted.is_disjoint_from(f) {
        return Err(Error::Precondition("new sets already present in the family".into()));
    }
    let gained = mu.measure(&truncated)? + mu.measure(&shifted)?;
    let kept = mu.measure(&heavier)?;
    if gained < kept {
        return Err(Error::Precondition(format!(
            "μ(H⁺₁ ∪ H⁺₂) < μ(H) at a_* = {a_star}; sets colliding under the smallest target: {}",
            render(n, &collisions)
        )));
    }

    let after = f
        .difference(&dependent)?
        .union(&heavier)?
        .union(&truncated)?
        .union(&shifted)?;
    if !intersecting_within(&after, a_star - 1) {
        return Err(Error::Precondition(format!(
            "updated family has two members disjoint inside [{}]",
            a_star - 1
        )));
    }
    let measure_before = mu.measure(f)?;
    let measure_after = mu.measure(&after)?;
    if measure_after < measure_before {
        return Err(Error::Precondition(format!(
            "measure dropped from {measure_before} to {measure_after} at a_* = {a_star}"
        )));
    }
    debug_assert!(max_nip_single(&after).is_some_and(|a| a < a_star));

    Ok(ReductionStep {
        a_star,
        case: StepCase::Single,
        relabel: vec![1],
        dependent: vec![dependent],
        heavier: Some(heavier),
        truncated: vec![truncated],
        shifted: vec![shifted],
        removed: vec![removed],
        targets,
        collisions: collisions.iter().map(|&m| Subset::from_raw(n, m)).collect(),
        matched: assignment.matched,
        before: vec![f.clone()],
        after: vec![after],
        measure_before,
        measure_after,
        terminal: false,
    })
}

/// Shifts, then steps until the maximal necessary intersection point is 1.
/// The result lies in `B_{n,1}`.
pub fn reduce_single_to_extremal(f: &Family, mu: &MeasureTable, k: usize, khat: usize) -> Result<Trace> {
    check_params(f, mu, k, khat)?;
    let mut current = shift_to_fixpoint(std::slice::from_ref(f))?.remove(0);
    let start = current.clone();
    let measure_start = mu.measure(&start)?;
    let mut steps: Vec<ReductionStep> = Vec::new();
    let mut previous = usize::MAX;
    loop {
        let point = max_nip_single(&current);
        match point {
            Some(a) if a > 1 => {
                if a >= previous {
                    return Err(Error::Precondition(format!(
                        "maximal necessary intersection point went from {previous} to {a}"
                    )));
                }
                previous = a;
            }
            _ => break,
        }
        let step = reduce_step_single(&current, mu, k, khat)?;
        current = shift_to_fixpoint(&step.after)?.remove(0);
        if mu.measure(&current)? != step.measure_after {
            return Err(Error::Precondition("shifting changed the measure".into()));
        }
        steps.push(step);
    }
    if current.masks().any(|m| m & 1 == 0) {
        return Err(Error::Precondition("final family is not contained in B_(n,1)".into()));
    }
    let measure_end = mu.measure(&current)?;
    if measure_end < measure_start {
        return Err(Error::Precondition("measure decreased over the reduction".into()));
    }
    let end_point = max_nip_single(&current);
    Ok(Trace {
        t: 1,
        start: vec![start],
        steps,
        end: vec![current],
        measure_start,
        measure_end,
        end_point,
    })
}
