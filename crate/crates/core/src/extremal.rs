//! Extremal constructions `A_{n,a,t}`, `B_{n,a}` and the closed-form maxima
//! they attain.
//!
//! Every evaluator refuses parameters outside the regime where the maximum is
//! known, and names the inequality that failed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::exact::{binomial, format_rational, pow2};
use crate::measures::MeasureTable;
use crate::setcore::{low_bits, Family};

/// Witness families are only materialised up to this ground-set size.
pub const WITNESS_MAX_N: usize = 20;

/// `A_{n,a,t} = {F ⊆ [n] : |F ∩ [a]| ≥ t}`.
pub fn scatter_family(n: usize, a: usize, t: usize) -> Result<Family> {
    if t == 0 || t > a || a > n {
        return param(format!("A_(n,a,t) needs 1 ≤ t ≤ a ≤ n, got n = {n}, a = {a}, t = {t}"));
    }
    let prefix = low_bits(a);
    Family::from_fn(n, |m| (m & prefix).count_ones() as usize >= t)
}

/// `B_{n,a} = {F ⊆ [n] : [a] ⊆ F}`.
pub fn block_family(n: usize, a: usize) -> Result<Family> {
    if a == 0 || a > n {
        return param(format!("B_(n,a) needs 1 ≤ a ≤ n, got n = {n}, a = {a}"));
    }
    let prefix = low_bits(a);
    Family::from_fn(n, |m| m & prefix == prefix)
}

/// `|A_{n,a,t}| = 2^(n-a) Σ_{m=t..a} C(a, m)`.
pub fn scatter_count(n: usize, a: usize, t: usize) -> BigInt {
    let inner: BigInt = (t..=a).map(|m| binomial(a, m)).sum();
    pow2(n - a) * inner
}

/// `μ(A_{n,a,t}^{≤k̂}) = Σ_{s=t..k̂} μ(s) Σ_{m=t..min(a,s)} C(a,m) C(n-a, s-m)`.
pub fn scatter_measure(mu: &MeasureTable, a: usize, t: usize, khat: usize) -> BigRational {
    let n = mu.n();
    let mut total = BigRational::zero();
    for s in t..=khat.min(n) {
        let w = mu.weight(s);
        if w.is_zero() {
            continue;
        }
        let count: BigInt = (t..=a.min(s))
            .map(|m| binomial(a, m) * binomial(n - a, s - m))
            .sum();
        total += w * count;
    }
    total
}

/// `μ(B_{n,a}^{≤k̂}) = Σ_{s=a..k̂} μ(s) C(n-a, s-a)`.
pub fn block_measure(mu: &MeasureTable, a: usize, khat: usize) -> BigRational {
    let n = mu.n();
    (a..=khat.min(n))
        .map(|s| mu.weight(s) * binomial(n - a, s - a))
        .fold(BigRational::zero(), |acc, x| acc + x)
}

/// Parameters of one family in the cross problem: monotonicity window start
/// `k`, size cap `khat`, and measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyRole {
    pub k: usize,
    pub khat: usize,
    pub measure: MeasureTable,
}

impl FamilyRole {
    pub fn new(k: usize, khat: usize, measure: MeasureTable) -> FamilyRole {
        FamilyRole { k, khat, measure }
    }
}

/// One maximiser `(ℓ, a)`: family `ℓ` (1-based) takes `A_{n,a,t}`, the others `B_{n,a}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Maximizer {
    pub role: usize,
    pub a: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub value: BigRational,
    /// Every `(ℓ, a)` attaining `value`, sorted.
    pub argmax: Vec<Maximizer>,
    /// The construction for the first maximiser, restricted to the support
    /// of each measure. `None` above [`WITNESS_MAX_N`].
    pub witness: Option<Vec<Family>>,
    pub n: usize,
    pub t: usize,
    pub roles: Vec<FamilyRole>,
}

impl BoundReport {
    pub fn r(&self) -> usize {
        self.roles.len()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "value": format_rational(&self.value),
            "argmax": self.argmax,
            "witness": self.witness.as_ref().map(|w| w.iter().map(Family::to_json_value).collect::<Vec<_>>()),
            "n": self.n,
            "r": self.r(),
            "t": self.t,
            "ks": self.roles.iter().map(|r| r.k).collect::<Vec<_>>(),
            "caps": self.roles.iter().map(|r| r.khat).collect::<Vec<_>>(),
            "measures": self.roles.iter().map(|r| r.measure.to_json_value()).collect::<Vec<_>>(),
        })
    }
}

/// Checks `n > k_i + min_{j≠i} k̂_j - t` for every family `i`.
///
/// Families whose window starts at `k_i ≤ t` are exempt: a set of size at
/// most `t` that depends on the maximal intersection point pins every other
/// family, so the reduction never needs a shift target for it.
pub fn check_cross_hypothesis(n: usize, t: usize, ks: &[usize], khats: &[usize]) -> Result<()> {
    for (i, &k) in ks.iter().enumerate() {
        if k <= t {
            continue;
        }
        let min_other = khats
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &c)| c)
            .min()
            .unwrap_or(0);
        if n + t <= k + min_other {
            return Err(Error::HypothesisUnmet(format!(
                "n > k_i + min_(j≠i) k̂_j - t fails for i = {}: {n} ≤ {k} + {min_other} - {t}",
                i + 1
            )));
        }
    }
    Ok(())
}

fn validate_roles(n: usize, t: usize, roles: &[FamilyRole]) -> Result<()> {
    if roles.len() < 2 {
        return param(format!("need r ≥ 2 families, got {}", roles.len()));
    }
    if t == 0 {
        return param("t must be at least 1");
    }
    for (i, role) in roles.iter().enumerate() {
        if role.measure.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: role.measure.n(),
            });
        }
        if role.k == 0 || role.k > role.khat || role.khat > n {
            return param(format!(
                "family {} needs 1 ≤ k ≤ k̂ ≤ n, got k = {}, k̂ = {}",
                i + 1,
                role.k,
                role.khat
            ));
        }
    }
    Ok(())
}

/// Maximum of `μ_ℓ(A_{n,a,t}^{≤k̂_ℓ}) + Σ_{j≠ℓ} μ_j(B_{n,a}^{≤k̂_j})` over
/// `ℓ ∈ [r]`, `a ∈ [t, min_{i≠ℓ} k̂_i]`, without checking any hypothesis.
///
/// The value is always attained by a cross `t`-intersecting tuple; it is the
/// maximum only under the hypotheses checked by [`bound_main`].
pub fn construction_max(n: usize, t: usize, roles: &[FamilyRole]) -> Result<BoundReport> {
    validate_roles(n, t, roles)?;
    let r = roles.len();
    let mut best: Option<BigRational> = None;
    let mut argmax = Vec::new();
    for l in 0..r {
        let a_max = (0..r).filter(|&i| i != l).map(|i| roles[i].khat).min().unwrap_or(n);
        for a in t..=a_max {
            let mut value = scatter_measure(&roles[l].measure, a, t, roles[l].khat);
            for (j, role) in roles.iter().enumerate() {
                if j != l {
                    value += block_measure(&role.measure, a, role.khat);
                }
            }
            match &best {
                Some(b) if &value < b => {}
                Some(b) if &value == b => argmax.push(Maximizer { role: l + 1, a }),
                _ => {
                    best = Some(value);
                    argmax = vec![Maximizer { role: l + 1, a }];
                }
            }
        }
    }
    let value = best.ok_or_else(|| {
        Error::HypothesisUnmet(format!("no a with t ≤ a ≤ min k̂ (t = {t})"))
    })?;
    argmax.sort();
    let witness = (n <= WITNESS_MAX_N).then(|| build_witness(n, t, roles, argmax[0])).transpose()?;
    Ok(BoundReport {
        value,
        argmax,
        witness,
        n,
        t,
        roles: roles.to_vec(),
    })
}

fn build_witness(n: usize, t: usize, roles: &[FamilyRole], at: Maximizer) -> Result<Vec<Family>> {
    roles
        .iter()
        .enumerate()
        .map(|(j, role)| {
            let base = if j + 1 == at.role {
                scatter_family(n, at.a, t)?
            } else {
                block_family(n, at.a)?
            };
            let capped = base.slice(0, role.khat)?;
            let support = Family::from_fn(n, |m| {
                capped.contains_mask(m) && !role.measure.weight(m.count_ones() as usize).is_zero()
            })?;
            Ok(if support.is_empty() { capped } else { support })
        })
        .collect()
}

/// Maximum of `Σ_j μ_j(ℱ_j)` over non-empty `r`-cross `t`-intersecting
/// families with `ℱ_j ⊆ [n]^(≤k̂_j)` and `μ_j` non-increasing on `[k_j, k̂_j]`.
pub fn bound_main(n: usize, t: usize, roles: &[FamilyRole]) -> Result<BoundReport> {
    validate_roles(n, t, roles)?;
    for (i, role) in roles.iter().enumerate() {
        if !role.measure.is_non_increasing_on(role.k, role.khat) {
            return Err(Error::HypothesisUnmet(format!(
                "μ_{} is not non-increasing on [{}, {}]",
                i + 1,
                role.k,
                role.khat
            )));
        }
    }
    let ks: Vec<usize> = roles.iter().map(|r| r.k).collect();
    let khats: Vec<usize> = roles.iter().map(|r| r.khat).collect();
    check_cross_hypothesis(n, t, &ks, &khats)?;
    let min_cap = *khats.iter().min().expect("r ≥ 2");
    if t > min_cap {
        // With all a-ranges empty the B-roles cannot be non-empty.
        let second = {
            let mut c = khats.clone();
            c.sort_unstable();
            c[1]
        };
        if t > second {
            return Err(Error::HypothesisUnmet(format!(
                "t ≤ k̂_j fails for the block roles: t = {t} > {second}"
            )));
        }
    }
    construction_max(n, t, roles)
}

/// Sum of sizes of non-empty `r`-cross `t`-intersecting `k`-uniform families.
pub fn bound_uniform(n: usize, k: usize, r: usize, t: usize) -> Result<BoundReport> {
    if r < 2 {
        return param(format!("need r ≥ 2, got {r}"));
    }
    if t == 0 || t > k || k > n {
        return param(format!("need 1 ≤ t ≤ k ≤ n, got t = {t}, k = {k}, n = {n}"));
    }
    if n + t <= 2 * k {
        return Err(Error::HypothesisUnmet(format!("n > 2k - t fails: {n} ≤ 2·{k} - {t}")));
    }
    let mut values = Vec::new();
    for i in t..=k {
        let scatter: BigInt = (t..=k).map(|m| binomial(i, m) * binomial(n - i, k - m)).sum();
        let block = binomial(n - i, k - i) * BigInt::from(r - 1);
        values.push((i, scatter + block));
    }
    let measure = MeasureTable::level_count(n, k)?;
    let roles = vec![FamilyRole::new(k, k, measure); r];
    corollary_report(n, t, roles, values)
}

/// Sum of sizes of non-empty `r`-cross `t`-intersecting families in `𝒫([n])`.
pub fn bound_nonuniform(n: usize, r: usize, t: usize) -> Result<BoundReport> {
    if r < 2 {
        return param(format!("need r ≥ 2, got {r}"));
    }
    if t == 0 || t > n {
        return param(format!("need 1 ≤ t ≤ n, got t = {t}, n = {n}"));
    }
    let mut values = Vec::new();
    for i in t..=n {
        let inner: BigInt = (t..=i).map(|m| binomial(i, m)).sum();
        let v = pow2(n - i) * inner + pow2(n - i) * BigInt::from(r - 1);
        values.push((i, v));
    }
    let roles = vec![FamilyRole::new(1, n, MeasureTable::counting(n)); r];
    corollary_report(n, t, roles, values)
}

fn corollary_report(
    n: usize,
    t: usize,
    roles: Vec<FamilyRole>,
    values: Vec<(usize, BigInt)>,
) -> Result<BoundReport> {
    let best = values.iter().map(|(_, v)| v).max().expect("non-empty range").clone();
    let winners: Vec<usize> = values.iter().filter(|(_, v)| *v == best).map(|(i, _)| *i).collect();
    let r = roles.len();
    let mut argmax: Vec<Maximizer> = (1..=r)
        .flat_map(|role| winners.iter().map(move |&a| Maximizer { role, a }))
        .collect();
    argmax.sort();
    let witness = (n <= WITNESS_MAX_N).then(|| build_witness(n, t, &roles, argmax[0])).transpose()?;
    Ok(BoundReport {
        value: BigRational::from_integer(best),
        argmax,
        witness,
        n,
        t,
        roles,
    })
}

/// Upper bound `μ(B_{n,1}^{≤k̂})` for intersecting `ℱ ⊆ [n]^(≤k̂)` when `μ` is
/// non-increasing on `[k, k̂]` and `n ≥ k + k̂`.
///
/// For `k = 1` the size condition is dropped: a shifted intersecting family
/// whose maximal intersection point exceeds 1 has no singleton members, so
/// no shift target is ever needed for them.
pub fn bound_single(n: usize, k: usize, khat: usize, mu: &MeasureTable) -> Result<BigRational> {
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
    Ok((1..=khat)
        .map(|s| mu.weight(s) * binomial(n - 1, s - 1))
        .fold(BigRational::zero(), |acc, x| acc + x))
}

/// `C(n-1, k-1)`, the largest intersecting `k`-uniform family for `2k ≤ n`.
pub fn ekr_bound(n: usize, k: usize) -> Result<BigInt> {
    if k == 0 {
        return param("k must be at least 1");
    }
    if 2 * k > n {
        return Err(Error::HypothesisUnmet(format!("2k ≤ n fails: 2·{k} > {n}")));
    }
    Ok(binomial(n - 1, k - 1))
}

/// `(a, μ(A_{n,a,t}^{≤k̂}), μ(B_{n,a}^{≤k̂}))` for `a ∈ [t, k̂]` with one
/// common measure; `k̂` is the window end, or `n` without a window.
pub fn equal_measure_profile(
    n: usize,
    t: usize,
    mu: &MeasureTable,
) -> Result<Vec<(usize, BigRational, BigRational)>> {
    if mu.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mu.n(),
        });
    }
    let khat = mu.window().map_or(n, |(_, khat)| khat);
    if t == 0 || t > khat {
        return param(format!("need 1 ≤ t ≤ k̂, got t = {t}, k̂ = {khat}"));
    }
    Ok((t..=khat)
        .map(|a| (a, scatter_measure(mu, a, t, khat), block_measure(mu, a, khat)))
        .collect())
}

/// The values `μ(A_{n,a,t}) + (r - 1) μ(B_{n,a})` for `a ∈ [t, k̂]`.
pub fn equal_measure_values(
    n: usize,
    t: usize,
    mu: &MeasureTable,
    r: usize,
) -> Result<Vec<(usize, BigRational)>> {
    let factor = BigRational::from_integer(BigInt::from(r.saturating_sub(1)));
    Ok(equal_measure_profile(n, t, mu)?
        .into_iter()
        .map(|(a, scatter, block)| (a, scatter + block * &factor))
        .collect())
}

fn unique_argmax_is_t(values: &[(usize, BigRational)], t: usize) -> bool {
    let at_t = &values[0].1;
    debug_assert_eq!(values[0].0, t);
    values[1..].iter().all(|(_, v)| v < at_t)
}

/// Smallest `r₀ ≥ 2` such that for every `r ≥ r₀` the maximum over `a` of
/// `μ(A_{n,a,t}) + (r - 1) μ(B_{n,a})` is attained only at `a = t`.
///
/// Since `B_{n,a} ⊆ B_{n,t}`, the coefficient of `r - 1` is largest at
/// `a = t`; once it strictly dominates every other `a` the crossover for each
/// `a` is a single threshold, and `r₀` is the largest of them.
pub fn argmax_stabilization_r0(n: usize, t: usize, mu: &MeasureTable) -> Result<usize> {
    if let Some((k, khat)) = mu.window() {
        if !mu.is_non_increasing_on(k, khat) {
            return Err(Error::HypothesisUnmet(format!("μ is not non-increasing on [{k}, {khat}]")));
        }
    }
    let profile = equal_measure_profile(n, t, mu)?;
    let (_, alpha_t, beta_t) = &profile[0];
    let mut r0 = 2usize;
    for (a, alpha, beta) in &profile[1..] {
        if beta >= beta_t {
            return Err(Error::Domain(format!(
                "μ(B_(n,{a})) = μ(B_(n,{t})), so a = {t} never becomes the unique maximiser"
            )));
        }
        let ratio = (alpha - alpha_t) / (beta_t - beta);
        let threshold = ratio.floor().to_integer() + BigInt::from(2);
        let threshold: usize = threshold
            .try_into()
            .map_err(|_| Error::Domain(format!("crossover for a = {a} is out of range")))?;
        r0 = r0.max(threshold);
    }
    // Confirm the threshold directly on both sides.
    let values = equal_measure_values(n, t, mu, r0)?;
    if !unique_argmax_is_t(&values, t) {
        return Err(Error::Domain(format!("a = {t} is not the unique maximiser at r = {r0}")));
    }
    if r0 > 2 {
        let below = equal_measure_values(n, t, mu, r0 - 1)?;
        if unique_argmax_is_t(&below, t) {
            return Err(Error::Domain(format!("a = {t} already wins uniquely at r = {}", r0 - 1)));
        }
    }
    Ok(r0)
}

/// `(μ(B_{n,t}^{≤k̂}))^r`, the maximum product of measures of `r`-cross
/// `t`-intersecting families once `r ≥ r₀`.
pub fn product_bound_large_r(n: usize, t: usize, mu: &MeasureTable, r: usize) -> Result<BigRational> {
    let (k, khat) = mu
        .window()
        .ok_or_else(|| Error::HypothesisUnmet("μ needs a declared window [k, k̂]".into()))?;
    if k == 0 {
        return Err(Error::HypothesisUnmet("window must start at k ≥ 1".into()));
    }
    if !mu.is_non_increasing_on(k, khat) {
        return Err(Error::HypothesisUnmet(format!("μ is not non-increasing on [{k}, {khat}]")));
    }
    check_cross_hypothesis(n, t, &[k, k], &[khat, khat])?;
    let r0 = argmax_stabilization_r0(n, t, mu)?;
    if r < r0 {
        return Err(Error::HypothesisUnmet(format!(
            "r ≥ r₀ fails: r = {r} < r₀ = {r0}; the product maximum is only known for large r"
        )));
    }
    let block = block_measure(mu, t, khat);
    let mut out = BigRational::one();
    for _ in 0..r {
        out *= &block;
    }
    Ok(out)
}
