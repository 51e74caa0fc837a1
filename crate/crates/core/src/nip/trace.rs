use num_rational::BigRational;
use serde_json::{json, Value};

use crate::exact::format_rational;
use crate::setcore::{Family, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepCase {
    /// Single family: keep the heavier half of `ℱ(a_*)` and move it off `a_*`.
    Single,
    /// Cross, first `r - 1` dependents at least as heavy as the last: they are
    /// kept and augmented, the last family drops its dependents.
    AugmentFirst,
    /// Cross, the last family's dependents are heavier.
    AugmentLast,
    /// Some family consists only of dependent sets; it lies in `B_{n,a_*}`.
    Terminal,
}

impl StepCase {
    pub fn tag(self) -> &'static str {
        match self {
            StepCase::Single => "single",
            StepCase::AugmentFirst => "augment-first",
            StepCase::AugmentLast => "augment-last",
            StepCase::Terminal => "terminal",
        }
    }
}

/// `σ_{s a_*}` applied to one dependent set of a family (1-based index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftTarget {
    pub family: usize,
    pub set: Subset,
    pub s: usize,
    pub image: Subset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub a_star: usize,
    pub case: StepCase,
    /// `relabel[p]` is the 1-based input family playing role `p + 1`.
    pub relabel: Vec<usize>,
    /// `ℱ_j(a_*)` per family, in input order.
    pub dependent: Vec<Family>,
    /// `H` in the single-family step.
    pub heavier: Option<Family>,
    /// Sets `F \ {a_*}` added per family (`H⁺₁` for a single family).
    pub truncated: Vec<Family>,
    /// Sets `σ_{s(F) a_*}(F)` added per family (`H⁺₂` for a single family).
    pub shifted: Vec<Family>,
    /// Sets dropped per family.
    pub removed: Vec<Family>,
    pub targets: Vec<ShiftTarget>,
    /// Dependent sets whose smallest shift target hit an image already used.
    pub collisions: Vec<Subset>,
    /// Whether targets came from a matching instead of the smallest choice.
    pub matched: bool,
    pub before: Vec<Family>,
    pub after: Vec<Family>,
    pub measure_before: BigRational,
    pub measure_after: BigRational,
    pub terminal: bool,
}

fn sizes(fs: &[Family]) -> Vec<usize> {
    fs.iter().map(Family::len).collect()
}

impl ReductionStep {
    pub fn to_json_value(&self) -> Value {
        json!({
            "a_star": self.a_star,
            "case": self.case.tag(),
            "relabel": self.relabel,
            "terminal": self.terminal,
            "measure_before": format_rational(&self.measure_before),
            "measure_after": format_rational(&self.measure_after),
            "parts": {
                "dependent": sizes(&self.dependent),
                "heavier": self.heavier.as_ref().map(Family::len),
                "truncated": sizes(&self.truncated),
                "shifted": sizes(&self.shifted),
                "removed": sizes(&self.removed),
            },
            "targets": self.targets.iter().map(|t| json!({
                "family": t.family,
                "set": t.set.elements(),
                "s": t.s,
                "image": t.image.elements(),
            })).collect::<Vec<_>>(),
            "collisions": self.collisions.iter().map(Subset::elements).collect::<Vec<_>>(),
            "assignment": if self.matched { "matching" } else { "smallest" },
            "after": self.after.iter().map(Family::to_json_value).collect::<Vec<_>>(),
        })
    }
}

/// A full reduction run: the shifted starting point, every step, and the
/// configuration it ends in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub t: usize,
    pub start: Vec<Family>,
    pub steps: Vec<ReductionStep>,
    pub end: Vec<Family>,
    pub measure_start: BigRational,
    pub measure_end: BigRational,
    /// Maximal necessary intersection point of `end` (`None` if some family is empty).
    pub end_point: Option<usize>,
}

impl Trace {
    pub fn is_terminal_case(&self) -> bool {
        self.steps.last().is_some_and(|s| s.terminal)
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "t": self.t,
            "start": self.start.iter().map(Family::to_json_value).collect::<Vec<_>>(),
            "steps": self.steps.iter().map(ReductionStep::to_json_value).collect::<Vec<_>>(),
            "final": self.end.iter().map(Family::to_json_value).collect::<Vec<_>>(),
            "measure_start": format_rational(&self.measure_start),
            "measure_final": format_rational(&self.measure_end),
            "final_point": self.end_point,
        })
    }
}
