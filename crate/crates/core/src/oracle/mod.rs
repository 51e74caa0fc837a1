//! Exhaustive, exact maximisation over small families.
//!
//! Searches run over families that are up-closed inside their universe:
//! adding a superset (within the size cap) never breaks an intersection
//! property and never lowers a non-negative objective, so a maximiser of
//! that shape always exists. Up-set counts include the empty family and the
//! full one, so `𝒫([n])` has 3, 6, 20, 168, 7581 up-sets for `n = 1..5`.

mod lattice;
mod search;
mod single;

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{param, Error, Result};
use crate::exact::{binomial, format_rational};
use crate::measures::MeasureTable;
use crate::props::meet_floor;
use crate::setcore::Family;
use lattice::{members, Lattice, LATTICE_MAX_N};

/// Default ceiling on `n`; `XFAM_MAX_N` may raise it up to [`HARD_MAX_N`].
pub const DEFAULT_MAX_N: usize = 6;
pub const HARD_MAX_N: usize = LATTICE_MAX_N;
/// Largest level (or unrestricted universe) the guard lets through.
pub const MAX_LEVEL_SIZE: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guard {
    pub max_n: usize,
}

impl Default for Guard {
    fn default() -> Guard {
        Guard { max_n: DEFAULT_MAX_N }
    }
}

impl Guard {
    /// Reads `XFAM_MAX_N`; unset means the default.
    pub fn from_env() -> Result<Guard> {
        match std::env::var("XFAM_MAX_N") {
            Err(_) => Ok(Guard::default()),
            Ok(v) => {
                let max_n: usize = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Param(format!("XFAM_MAX_N = {v:?} is not a number")))?;
                if max_n > HARD_MAX_N {
                    return Err(Error::ResourceGuard(format!(
                        "XFAM_MAX_N = {max_n} exceeds the hard limit {HARD_MAX_N}"
                    )));
                }
                Ok(Guard { max_n })
            }
        }
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n > self.max_n.min(HARD_MAX_N) {
            return Err(Error::ResourceGuard(format!(
                "exhaustive search limited to n ≤ {} (got n = {n}; set XFAM_MAX_N to raise, at most {HARD_MAX_N})",
                self.max_n.min(HARD_MAX_N)
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Every family inside `[n]^(k)`, counting measure.
    Uniform { k: usize },
    /// Every family inside `𝒫([n])`, counting measure.
    Nonuniform,
    /// Family `j` inside `[n]^(≤ caps[j])`, weighted by `measures[j]`.
    Truncated {
        caps: Vec<usize>,
        measures: Vec<MeasureTable>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Objective {
    #[default]
    Sum,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Restriction {
    #[default]
    UpClosed,
    /// Up-closed and shifted.
    Shifted,
    /// Every subfamily of the universe (the guard caps the universe size).
    None,
}

/// Maximise the objective over non-empty `r`-cross `t`-intersecting tuples;
/// `r = 1` asks for a single `t`-intersecting family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub n: usize,
    pub r: usize,
    pub t: usize,
    pub mode: Mode,
    pub objective: Objective,
    pub restriction: Restriction,
}

impl SearchSpec {
    pub fn uniform(n: usize, k: usize, r: usize, t: usize) -> SearchSpec {
        SearchSpec {
            n,
            r,
            t,
            mode: Mode::Uniform { k },
            objective: Objective::Sum,
            restriction: Restriction::UpClosed,
        }
    }

    pub fn nonuniform(n: usize, r: usize, t: usize) -> SearchSpec {
        SearchSpec {
            n,
            r,
            t,
            mode: Mode::Nonuniform,
            objective: Objective::Sum,
            restriction: Restriction::UpClosed,
        }
    }

    pub fn truncated(n: usize, t: usize, caps: Vec<usize>, measures: Vec<MeasureTable>) -> SearchSpec {
        SearchSpec {
            n,
            r: caps.len(),
            t,
            mode: Mode::Truncated { caps, measures },
            objective: Objective::Sum,
            restriction: Restriction::UpClosed,
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> SearchSpec {
        self.objective = objective;
        self
    }

    pub fn with_restriction(mut self, restriction: Restriction) -> SearchSpec {
        self.restriction = restriction;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Worker threads; 0 or 1 runs on the calling thread.
    pub threads: usize,
    pub guard: Guard,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            threads: 1,
            guard: Guard::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    /// `None` when no non-empty tuple exists.
    pub value: Option<BigRational>,
    pub witness: Option<Vec<Family>>,
    pub nodes_explored: u64,
    pub wall_time_ms: u128,
}

impl SearchResult {
    /// JSON without the timing, so equal searches print equal bytes.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "value": self.value.as_ref().map(format_rational),
            "witness": self.witness.as_ref().map(|w| w.iter().map(Family::to_json_value).collect::<Vec<_>>()),
            "nodes_explored": self.nodes_explored,
        })
    }
}

/// Objective value in scaled integer units.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Score {
    Sum(u128),
    Product(BigUint),
}

/// Everything the searches need, in lattice form with integer weights.
pub(crate) struct Problem {
    pub lattice: Lattice,
    pub r: usize,
    pub t: usize,
    pub compat: Vec<u128>,
    pub universes: Vec<u128>,
    pub weights: Vec<Vec<u128>>,
    pub scale: BigInt,
    pub objective: Objective,
    pub restriction: Restriction,
}

impl Problem {
    pub fn weight(&self, j: usize, bits: u128) -> u128 {
        members(bits).map(|m| self.weights[j][m]).sum()
    }

    pub fn score(&self, parts: impl IntoIterator<Item = u128>) -> Score {
        match self.objective {
            Objective::Sum => Score::Sum(parts.into_iter().sum()),
            Objective::Product => Score::Product(
                parts
                    .into_iter()
                    .fold(BigUint::one(), |acc, p| acc * BigUint::from(p)),
            ),
        }
    }

    pub fn value(&self, score: &Score) -> BigRational {
        match score {
            Score::Sum(v) => BigRational::new(BigInt::from(*v), self.scale.clone()),
            Score::Product(v) => {
                let mut den = BigInt::one();
                for _ in 0..self.r {
                    den *= &self.scale;
                }
                BigRational::new(BigInt::from(v.clone()), den)
            }
        }
    }

    /// The tuple `(B_{n,t} ∩ U_j)_j`, feasible whenever every part is non-empty.
    pub fn seed(&self) -> Option<Score> {
        let prefix = (1usize << self.t) - 1;
        let block = self.lattice.filter(|m| m & prefix == prefix);
        let parts: Vec<u128> = self.universes.iter().map(|&u| u & block).collect();
        if parts.iter().any(|&p| p == 0) {
            return None;
        }
        if self.restriction == Restriction::Shifted && !parts.iter().all(|&p| self.lattice.is_shifted(p)) {
            return None;
        }
        Some(self.score(parts.iter().enumerate().map(|(j, &p)| self.weight(j, p))))
    }

    pub fn family(&self, bits: u128) -> Family {
        self.lattice.to_family(bits)
    }
}

fn build_problem(spec: &SearchSpec, guard: &Guard) -> Result<Problem> {
    let SearchSpec { n, r, t, .. } = *spec;
    if r == 0 {
        return param("need r ≥ 1 families");
    }
    if t == 0 {
        return param("t must be at least 1");
    }
    if n == 0 {
        return param("n must be at least 1");
    }
    guard.check_n(n)?;
    let lattice = Lattice::new(n);
    let (universes, measures): (Vec<u128>, Vec<MeasureTable>) = match &spec.mode {
        Mode::Uniform { k } => {
            if *k > n {
                return param(format!("k = {k} exceeds n = {n}"));
            }
            let size = binomial(n, *k);
            if size > BigInt::from(MAX_LEVEL_SIZE) {
                return Err(Error::ResourceGuard(format!(
                    "uniform search limited to C(n,k) ≤ {MAX_LEVEL_SIZE} (got C({n},{k}) = {size})"
                )));
            }
            let u = lattice.filter(|m| m.count_ones() as usize == *k && *k >= t);
            (vec![u; r], vec![MeasureTable::counting(n); r])
        }
        Mode::Nonuniform => {
            let u = lattice.filter(|m| m.count_ones() as usize >= t);
            (vec![u; r], vec![MeasureTable::counting(n); r])
        }
        Mode::Truncated { caps, measures } => {
            if caps.len() != r || measures.len() != r {
                return param(format!(
                    "{} caps and {} measures for r = {r}",
                    caps.len(),
                    measures.len()
                ));
            }
            let mut us = Vec::new();
            for (j, (&cap, mu)) in caps.iter().zip(measures).enumerate() {
                if cap > n {
                    return param(format!("cap {cap} of family {} exceeds n = {n}", j + 1));
                }
                if mu.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: mu.n(),
                    });
                }
                us.push(lattice.filter(|m| {
                    let s = m.count_ones() as usize;
                    t <= s && s <= cap
                }));
            }
            (us, measures.clone())
        }
    };
    if spec.restriction == Restriction::None {
        for u in &universes {
            if u.count_ones() as usize > MAX_LEVEL_SIZE {
                return Err(Error::ResourceGuard(format!(
                    "unrestricted search limited to universes of at most {MAX_LEVEL_SIZE} sets (got {})",
                    u.count_ones()
                )));
            }
        }
    }

    // Common denominator so every weight becomes an integer.
    let mut scale = BigInt::one();
    for mu in &measures {
        for w in mu.weights() {
            scale = scale.lcm(w.denom());
        }
    }
    let mut weights = Vec::with_capacity(r);
    let mut total: u128 = 0;
    for (mu, &u) in measures.iter().zip(&universes) {
        let per_size: Vec<u128> = mu
            .weights()
            .iter()
            .map(|w| {
                (w * BigRational::from_integer(scale.clone()))
                    .to_integer()
                    .to_u128()
                    .ok_or_else(|| Error::ResourceGuard("scaled weights exceed 128 bits".into()))
            })
            .collect::<Result<_>>()?;
        let row: Vec<u128> = (0..lattice.size)
            .map(|m| {
                if u >> m & 1 == 1 {
                    per_size[m.count_ones() as usize]
                } else {
                    0
                }
            })
            .collect();
        for &w in &row {
            total = total
                .checked_add(w)
                .ok_or_else(|| Error::ResourceGuard("scaled weights exceed 128 bits".into()))?;
        }
        weights.push(row);
    }
    Ok(Problem {
        compat: lattice.compat(t),
        lattice,
        r,
        t,
        universes,
        weights,
        scale,
        objective: spec.objective,
        restriction: spec.restriction,
    })
}

/// [`exhaustive_max_with`] on one thread, guard from `XFAM_MAX_N`.
pub fn exhaustive_max(spec: &SearchSpec) -> Result<SearchResult> {
    let options = SearchOptions {
        threads: 1,
        guard: Guard::from_env()?,
    };
    exhaustive_max_with(spec, &options)
}

pub fn exhaustive_max_with(spec: &SearchSpec, options: &SearchOptions) -> Result<SearchResult> {
    let started = Instant::now();
    let problem = build_problem(spec, &options.guard)?;
    let outcome = if spec.r == 1 {
        single::search(&problem)
    } else {
        search::search(&problem, options.threads)?
    };
    Ok(SearchResult {
        value: outcome.best.as_ref().map(|(s, _)| problem.value(s)),
        witness: outcome
            .best
            .as_ref()
            .map(|(_, w)| w.iter().map(|&b| problem.family(b)).collect()),
        nodes_explored: outcome.nodes,
        wall_time_ms: started.elapsed().as_millis(),
    })
}

/// Largest `μ(ℱ)` over intersecting `ℱ ⊆ [n]^(≤k̂)`.
pub fn exhaustive_max_single(n: usize, khat: usize, mu: &MeasureTable) -> Result<SearchResult> {
    exhaustive_max(&SearchSpec::truncated(n, 1, vec![khat], vec![mu.clone()]))
}

pub(crate) struct Outcome {
    pub best: Option<(Score, Vec<u128>)>,
    pub nodes: u64,
}

impl Outcome {
    pub fn offer(&mut self, score: Score, witness: &[u128]) {
        let better = match &self.best {
            None => true,
            Some((s, w)) => score > *s || (score == *s && witness < w.as_slice()),
        };
        if better {
            self.best = Some((score, witness.to_vec()));
        }
    }

    pub fn merge(&mut self, other: Outcome) {
        self.nodes += other.nodes;
        if let Some((s, w)) = other.best {
            self.offer(s, &w);
        }
    }
}

/// The largest `G` such that `(fixed..., G)` is cross `t`-intersecting:
/// every member of `universe` (or of `𝒫([n])`) meeting each meet of the
/// fixed families in at least `t` points.
pub fn best_response(fixed: &[Family], t: usize, universe: Option<&Family>) -> Result<Family> {
    let first = fixed
        .first()
        .ok_or_else(|| Error::Param("best response needs at least one fixed family".into()))?;
    let n = first.n();
    if let Some(u) = universe {
        first.check_ground(u.n())?;
    }
    let floor = meet_floor(fixed)?;
    let ok = |m: u64| floor.iter().all(|&y| (m & y).count_ones() as usize >= t);
    match universe {
        Some(u) => Family::from_masks(n, u.masks().filter(|&m| ok(m))),
        None => Family::from_fn(n, ok),
    }
}

/// Every family on `[n]` (or on `[n]^(≤cap)`) closed upward inside that
/// lattice, the empty family and the full one included, each exactly once.
pub fn enumerate_upsets(n: usize, cap: Option<usize>) -> Result<UpSets> {
    enumerate_upsets_with(n, cap, &Guard::from_env()?)
}

pub fn enumerate_upsets_with(n: usize, cap: Option<usize>, guard: &Guard) -> Result<UpSets> {
    guard.check_n(n)?;
    let lattice = Lattice::new(n);
    let cap = cap.unwrap_or(n);
    let universe = lattice.filter(|m| m.count_ones() as usize <= cap);
    let elems = lattice.top_down(universe);
    Ok(UpSets {
        stack: vec![(0, 0)],
        lattice,
        universe,
        elems,
    })
}

pub struct UpSets {
    lattice: Lattice,
    universe: u128,
    elems: Vec<usize>,
    stack: Vec<(usize, u128)>,
}

impl Iterator for UpSets {
    type Item = Family;

    fn next(&mut self) -> Option<Family> {
        while let Some((i, cur)) = self.stack.pop() {
            if i == self.elems.len() {
                return Some(self.lattice.to_family(cur));
            }
            let e = self.elems[i];
            if self.lattice.strict_supersets[e] & self.universe & !cur == 0 {
                self.stack.push((i + 1, cur | 1 << e));
            }
            self.stack.push((i + 1, cur));
        }
        None
    }
}
