use num_rational::BigRational;
use num_traits::Zero;

use super::trace::{ReductionStep, ShiftTarget, StepCase, Trace};
use super::{assign_images, dependents_unchecked, max_nip, Move};
use crate::error::{Error, Result};
use crate::extremal::check_cross_hypothesis;
use crate::measures::MeasureTable;
use crate::props::{is_shifted, meet_floor, shift_to_fixpoint, CrossInstance};
use crate::setcore::{bit, low_bits, Family, Subset};

/// Per-family window start `k_j` and size cap `k̂_j`.
///
/// `k_j` is the start of the measure's window; `k̂_j` is the instance cap if
/// one was attached, otherwise the end of the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossParams {
    pub ks: Vec<usize>,
    pub khats: Vec<usize>,
}

impl CrossParams {
    pub fn from_instance(inst: &CrossInstance) -> Result<CrossParams> {
        let measures = inst
            .measures()
            .ok_or_else(|| Error::Precondition("instance has no measures attached".into()))?;
        let mut ks = Vec::new();
        let mut khats = Vec::new();
        for (j, mu) in measures.iter().enumerate() {
            let (k, window_end) = mu.window().ok_or_else(|| {
                Error::Precondition(format!("measure {} has no window [k, k̂]", j + 1))
            })?;
            let khat = inst.caps().map_or(window_end, |c| c[j]);
            if k == 0 || k > khat {
                return Err(Error::Precondition(format!(
                    "family {} needs 1 ≤ k ≤ k̂, got k = {k}, k̂ = {khat}",
                    j + 1
                )));
            }
            if !mu.is_non_increasing_on(k, khat) {
                return Err(Error::HypothesisUnmet(format!(
                    "μ_{} is not non-increasing on [{k}, {khat}]",
                    j + 1
                )));
            }
            ks.push(k);
            khats.push(khat);
        }
        Ok(CrossParams { ks, khats })
    }
}

fn check_instance(inst: &CrossInstance) -> Result<CrossParams> {
    let params = CrossParams::from_instance(inst)?;
    let n = inst.n();
    check_cross_hypothesis(n, inst.t(), &params.ks, &params.khats)?;
    for (j, f) in inst.families().iter().enumerate() {
        if f.is_empty() {
            return Err(Error::Precondition(format!("family {} is empty", j + 1)));
        }
        if let Some(m) = f.masks().find(|m| m.count_ones() as usize > params.khats[j]) {
            return Err(Error::Precondition(format!(
                "family {} has member {} above its cap {}",
                j + 1,
                Subset::from_raw(n, m),
                params.khats[j]
            )));
        }
    }
    if !inst.is_cross_t_intersecting() {
        return Err(Error::Domain(format!("families are not cross {}-intersecting", inst.t())));
    }
    Ok(params)
}

fn total_measure(families: &[Family], measures: &[MeasureTable]) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for (f, mu) in families.iter().zip(measures) {
        total += mu.measure(f)?;
    }
    Ok(total)
}

struct Augmented {
    family: Family,
    truncated: Family,
    shifted: Family,
    collisions: Vec<u64>,
    matched: bool,
}

/// `ℱ_i ∪ {F \ {a_*} : F ∈ ℱ_i^{>k_i}(a_*)} ∪ {σ_{s(F) a_*}(F) : F ∈ ℱ_i^{≤k_i}(a_*)}`,
/// with the images re-chosen by [`assign_images`] when they clash.
fn augment(
    f: &Family,
    dependent: &Family,
    k: usize,
    a_star: usize,
    index: usize,
    targets: &mut Vec<ShiftTarget>,
) -> Result<Augmented> {
    let n = f.n();
    let ab = bit(a_star);
    if let Some(m) = dependent.masks().find(|&m| f.contains_mask(m & !ab)) {
        return Err(Error::Precondition(format!(
            "family {}: {} is already a member",
            index + 1,
            Subset::from_raw(n, m & !ab)
        )));
    }
    let members: Vec<u64> = dependent.masks().collect();
    let assignment = assign_images(f, &members, a_star, k).map_err(|left| {
        let listed: Vec<String> = left.iter().map(|&m| Subset::from_raw(n, m).to_string()).collect();
        Error::Precondition(format!(
            "family {}: no injective choice of new sets off a_* = {a_star} for {}",
            index + 1,
            listed.join(", ")
        ))
    })?;
    let mut truncated = Family::empty(n)?;
    let mut shifted = Family::empty(n)?;
    for &(m, mv, image) in &assignment.targets {
        match mv {
            Move::Truncate => truncated.set(image),
            Move::Shift(s) => {
                shifted.set(image);
                targets.push(ShiftTarget {
                    family: index + 1,
                    set: Subset::from_raw(n, m),
                    s,
                    image: Subset::from_raw(n, image),
                });
            }
        }
    }
    let family = f.union(&truncated)?.union(&shifted)?;
    Ok(Augmented {
        family,
        truncated,
        shifted,
        collisions: assignment.collisions,
        matched: assignment.matched,
    })
}

/// One step of the cross reduction.
///
/// If every family keeps a set not depending on `a_*`, the side whose
/// dependents weigh more (the first `r - 1` families together, or the last)
/// moves them off `a_*` and the other side drops its dependents; the result
/// is cross `t`-intersecting inside `[a_* - 1]`. Otherwise the first family
/// made only of dependents lies in `B_{n,a_*}` and the step is terminal.
pub fn reduce_step_cross(inst: &CrossInstance) -> Result<ReductionStep> {
    let params = check_instance(inst)?;
    let families = inst.families();
    let measures = inst.measures().expect("checked");
    let (n, t, r) = (inst.n(), inst.t(), inst.r());
    for (j, f) in families.iter().enumerate() {
        if !is_shifted(f) {
            return Err(Error::Precondition(format!("family {} is not shifted", j + 1)));
        }
    }
    let a_star = match max_nip(families, t) {
        Some(a) if a > t => a,
        other => {
            return Err(Error::Precondition(format!(
                "maximal necessary intersection point is {other:?}; nothing to reduce for t = {t}"
            )))
        }
    };
    let ab = bit(a_star);
    let dependent: Vec<Family> = (0..r).map(|j| dependents_unchecked(families, j, a_star, t)).collect();
    for (j, (f, dep)) in families.iter().zip(&dependent).enumerate() {
        if dep.is_empty() {
            return Err(Error::Precondition(format!("family {} has no set depending on {a_star}", j + 1)));
        }
        if let Some(m) = dep.masks().find(|&m| f.contains_mask(m & !ab)) {
            return Err(Error::Precondition(format!(
                "family {}: dependent set {} still has {} in the family",
                j + 1,
                Subset::from_raw(n, m),
                Subset::from_raw(n, m & !ab)
            )));
        }
    }
    let measure_before = total_measure(families, measures)?;
    let empty = Family::empty(n)?;

    if let Some(j) = (0..r).find(|&j| families[j] == dependent[j]) {
        let prefix = low_bits(a_star);
        if let Some(m) = families[j].masks().find(|m| m & prefix != prefix) {
            return Err(Error::Precondition(format!(
                "family {} consists of dependents but {} does not contain [{a_star}]",
                j + 1,
                Subset::from_raw(n, m)
            )));
        }
        if r == 2 {
            let other = 1 - j;
            if let Some(m) = families[other].masks().find(|m| ((m & prefix).count_ones() as usize) < t) {
                return Err(Error::Precondition(format!(
                    "family {}: {} meets [{a_star}] in fewer than {t} points",
                    other + 1,
                    Subset::from_raw(n, m)
                )));
            }
        }
        let mut relabel: Vec<usize> = (1..=r).filter(|&i| i != j + 1).collect();
        relabel.push(j + 1);
        return Ok(ReductionStep {
            a_star,
            case: StepCase::Terminal,
            relabel,
            dependent,
            heavier: None,
            truncated: vec![empty.clone(); r],
            shifted: vec![empty.clone(); r],
            removed: vec![empty; r],
            targets: Vec::new(),
            collisions: Vec::new(),
            matched: false,
            before: families.to_vec(),
            after: families.to_vec(),
            measure_after: measure_before.clone(),
            measure_before,
            terminal: true,
        });
    }

    let last = r - 1;
    let mut first_weight = BigRational::zero();
    for i in 0..last {
        first_weight += measures[i].measure(&dependent[i])?;
    }
    let last_weight = measures[last].measure(&dependent[last])?;
    let case = if first_weight >= last_weight {
        StepCase::AugmentFirst
    } else {
        StepCase::AugmentLast
    };
    let grows = |i: usize| match case {
        StepCase::AugmentFirst => i < last,
        _ => i == last,
    };

    let mut after = Vec::with_capacity(r);
    let mut truncated = Vec::with_capacity(r);
    let mut shifted = Vec::with_capacity(r);
    let mut removed = Vec::with_capacity(r);
    let mut targets = Vec::new();
    let mut collisions = Vec::new();
    let mut matched = false;
    for i in 0..r {
        if grows(i) {
            let aug = augment(&families[i], &dependent[i], params.ks[i], a_star, i, &mut targets)?;
            collisions.extend(aug.collisions.iter().map(|&m| (i + 1, Subset::from_raw(n, m))));
            matched |= aug.matched;
            after.push(aug.family);
            truncated.push(aug.truncated);
            shifted.push(aug.shifted);
            removed.push(empty.clone());
        } else {
            after.push(families[i].difference(&dependent[i])?);
            truncated.push(empty.clone());
            shifted.push(empty.clone());
            removed.push(dependent[i].clone());
        }
    }

    let lower = low_bits(a_star - 1);
    let floor = meet_floor(&after)?;
    if let Some(&x) = floor.iter().find(|&&x| ((x & lower).count_ones() as usize) < t) {
        return Err(Error::Precondition(format!(
            "updated families have meet {} with fewer than {t} points in [{}]",
            Subset::from_raw(n, x),
            a_star - 1
        )));
    }
    let measure_after = total_measure(&after, measures)?;
    if measure_after < measure_before {
        let listed: Vec<String> = collisions.iter().map(|(i, s)| format!("family {i}: {s}")).collect();
        return Err(Error::Precondition(format!(
            "measure dropped from {measure_before} to {measure_after} at a_* = {a_star}; \
             sets colliding under the smallest target: [{}]",
            listed.join(", ")
        )));
    }

    Ok(ReductionStep {
        a_star,
        case,
        relabel: (1..=r).collect(),
        dependent,
        heavier: None,
        truncated,
        shifted,
        removed,
        targets,
        collisions: collisions.into_iter().map(|(_, s)| s).collect(),
        matched,
        before: families.to_vec(),
        after,
        measure_before,
        measure_after,
        terminal: false,
    })
}

/// Shifts, then steps until the maximal necessary intersection point is `t`
/// or a terminal step is reached.
///
/// Ending at `t` puts every family inside `B_{n,t} = A_{n,t,t}`. A terminal
/// step puts the family in role `r` inside `B_{n,a_*}` and, for `r = 2`, the
/// other inside `A_{n,a_*,t}`.
pub fn reduce_cross_to_extremal(inst: &CrossInstance) -> Result<Trace> {
    check_instance(inst)?;
    let measures = inst.measures().expect("checked").to_vec();
    let t = inst.t();
    let mut current = shift_to_fixpoint(inst.families())?;
    let start = current.clone();
    let measure_start = total_measure(&start, &measures)?;
    let mut steps: Vec<ReductionStep> = Vec::new();
    let mut previous = usize::MAX;
    loop {
        let a = max_nip(&current, t).expect("families are non-empty");
        if a <= t {
            let prefix = low_bits(t);
            if current.iter().any(|f| f.masks().any(|m| m & prefix != prefix)) {
                return Err(Error::Precondition(format!(
                    "maximal point is t = {t} but some set misses [{t}]"
                )));
            }
            break;
        }
        if a >= previous {
            return Err(Error::Precondition(format!(
                "maximal necessary intersection point went from {previous} to {a}"
            )));
        }
        previous = a;
        let step = reduce_step_cross(&inst.replace_families(current.clone())?)?;
        if step.terminal {
            steps.push(step);
            break;
        }
        current = shift_to_fixpoint(&step.after)?;
        if total_measure(&current, &measures)? != step.measure_after {
            return Err(Error::Precondition("shifting changed the measure".into()));
        }
        steps.push(step);
    }
    let measure_end = total_measure(&current, &measures)?;
    if measure_end < measure_start {
        return Err(Error::Precondition("measure decreased over the reduction".into()));
    }
    let end_point = max_nip(&current, t);
    Ok(Trace {
        t,
        start,
        steps,
        end: current,
        measure_start,
        measure_end,
        end_point,
    })
}
