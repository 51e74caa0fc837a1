mod common;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use xfam::exact::{binomial, ratio};
use xfam::extremal::{
    argmax_stabilization_r0, block_family, bound_main, bound_nonuniform, bound_single, bound_uniform,
    check_cross_hypothesis, ekr_bound, product_bound_large_r, FamilyRole,
};
use xfam::nip::{nip_cross, nip_single, reduce_cross_to_extremal, reduce_single_to_extremal, Trace};
use xfam::oracle::{exhaustive_max, exhaustive_max_single, Objective, SearchResult, SearchSpec};
use xfam::props::{
    is_cross_t_intersecting, is_intersecting, is_shifted, meet_closure, shift_family, shift_to_fixpoint,
};
use xfam::{CrossInstance, Family, MeasureTable};

use common::*;

fn verdict(criterion: usize, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {status}");
    for f in failures.iter().take(20) {
        println!("  {f}");
    }
    assert!(failures.is_empty(), "criterion {criterion} failed ({} cases)", failures.len());
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Checks the search witness independently: non-empty, cross t-intersecting,
/// and weighing exactly the reported value.
fn witness_value(res: &SearchResult, t: usize, measures: &[MeasureTable]) -> Option<BigRational> {
    let w = res.witness.as_ref()?;
    if w.iter().any(Family::is_empty) {
        return None;
    }
    let ok = if w.len() == 1 {
        xfam::props::is_t_intersecting(&w[0], t)
    } else {
        naive_cross(w, t)
    };
    if !ok {
        return None;
    }
    let mut total = BigRational::zero();
    for (f, mu) in w.iter().zip(measures) {
        total += mu.measure(f).ok()?;
    }
    Some(total)
}

#[test]
fn criterion_1_uniform_equality() {
    let mut failures = Vec::new();
    let mut cases = 0;
    for n in 1..=5usize {
        for k in 1..=n {
            if binomial(n, k) > BigInt::from(10) {
                continue;
            }
            for r in [2usize, 3] {
                for t in [1usize, 2] {
                    if t > k || n + t <= 2 * k {
                        continue;
                    }
                    cases += 1;
                    let bound = bound_uniform(n, k, r, t).unwrap().value;
                    let res = exhaustive_max(&SearchSpec::uniform(n, k, r, t)).unwrap();
                    let level = vec![MeasureTable::level_count(n, k).unwrap(); r];
                    let value = res.value.clone();
                    if value.as_ref() != Some(&bound) || witness_value(&res, t, &level) != value {
                        failures.push(format!("n={n} k={k} r={r} t={t}: oracle {value:?}, bound {bound}"));
                    }
                }
            }
        }
    }
    assert!(cases >= 20);
    verdict(1, &failures);
}

#[test]
fn criterion_2_nonuniform_equality() {
    let mut grid: Vec<(usize, usize, usize)> = Vec::new();
    for n in 1..=4 {
        for r in [2, 3] {
            for t in [1, 2] {
                if t <= n {
                    grid.push((n, r, t));
                }
            }
        }
    }
    grid.push((5, 2, 1));
    grid.push((5, 2, 2));
    let mut failures = Vec::new();
    for (n, r, t) in grid {
        let bound = bound_nonuniform(n, r, t).unwrap().value;
        let res = exhaustive_max(&SearchSpec::nonuniform(n, r, t)).unwrap();
        let counting = vec![MeasureTable::counting(n); r];
        let value = res.value.clone();
        if value.as_ref() != Some(&bound) || witness_value(&res, t, &counting) != value {
            failures.push(format!("n={n} r={r} t={t}: oracle {value:?}, bound {bound}"));
        }
    }
    verdict(2, &failures);
}

#[test]
fn criterion_3_mixed_uniformities() {
    let mut failures = Vec::new();
    let mut cases = 0;
    for n in 1..=5usize {
        for (k1, k2) in [(1usize, 2usize), (2, 3), (2, 1), (3, 2)] {
            if k1.max(k2) > n {
                continue;
            }
            let variants = [
                (
                    [k1, k2],
                    [MeasureTable::level_count(n, k1).unwrap(), MeasureTable::level_count(n, k2).unwrap()],
                ),
                ([1, 1], [MeasureTable::counting(n), MeasureTable::counting(n)]),
            ];
            for (ks, measures) in variants {
                let caps = [k1, k2];
                if check_cross_hypothesis(n, 1, &ks, &caps).is_err() {
                    continue;
                }
                cases += 1;
                let roles: Vec<FamilyRole> = (0..2)
                    .map(|j| FamilyRole::new(ks[j], caps[j], measures[j].clone()))
                    .collect();
                let bound = bound_main(n, 1, &roles).unwrap().value;
                let res = exhaustive_max(&SearchSpec::truncated(n, 1, caps.to_vec(), measures.to_vec())).unwrap();
                let value = res.value.clone();
                if value.as_ref() != Some(&bound) || witness_value(&res, 1, &measures) != value {
                    failures.push(format!("n={n} caps=({k1},{k2}) ks={ks:?}: oracle {value:?}, bound {bound}"));
                }
            }
        }
    }
    assert!(cases >= 8);
    verdict(3, &failures);
}

#[test]
fn criterion_4_single_family_measures() {
    let mut failures = Vec::new();
    let mut rng = rng(4);
    let mut cases = 0;
    for n in 2..=5usize {
        let mut measures: Vec<(String, MeasureTable)> = vec![("count".into(), MeasureTable::counting(n))];
        for k in 1..=n / 2 {
            measures.push((format!("uniform:{k}"), MeasureTable::uniform(n, k).unwrap()));
        }
        for (p, q) in [(1, 4), (1, 3), (1, 2)] {
            measures.push((format!("product:{p}/{q}"), MeasureTable::product(n, &ratio(p, q)).unwrap()));
        }
        for i in 0..3 {
            measures.push((format!("random#{i}"), random_non_increasing(&mut rng, n)));
        }
        for (name, mu) in &measures {
            for khat in 1..n {
                let oracle = exhaustive_max_single(n, khat, mu).unwrap();
                for k in 1..=khat.min(n - khat) {
                    if !mu.is_non_increasing_on(k, khat) {
                        continue;
                    }
                    cases += 1;
                    let bound = bound_single(n, k, khat, mu).unwrap();
                    // Independent route: weigh B_{n,1} truncated at k̂.
                    let star = block_family(n, 1).unwrap().slice(0, khat).unwrap();
                    let star_measure = mu.measure(&star).unwrap();
                    if oracle.value.as_ref() != Some(&bound)
                        || bound != star_measure
                        || witness_value(&oracle, 1, std::slice::from_ref(mu)) != oracle.value
                    {
                        failures.push(format!(
                            "n={n} {name} k={k} k̂={khat}: oracle {:?}, bound {bound}",
                            oracle.value
                        ));
                    }
                }
            }
        }
        // ν_k(ℱ) ≤ k/n at k = k̂.
        for k in 1..=n / 2 {
            let nu = MeasureTable::uniform(n, k).unwrap();
            let bound = bound_single(n, k, k, &nu).unwrap();
            if bound != ratio(k as i64, n as i64) {
                failures.push(format!("ν_{k} on n={n}: bound {bound} is not k/n"));
            }
        }
        // ϱ_p(ℱ) ≤ p over all of 𝒫([n]).
        for (p, q) in [(1, 4), (1, 3), (1, 2)] {
            let rho = MeasureTable::product(n, &ratio(p, q)).unwrap();
            let bound = bound_single(n, 1, n, &rho).unwrap();
            let oracle = exhaustive_max_single(n, n, &rho).unwrap();
            if bound != ratio(p, q) || oracle.value.as_ref() != Some(&bound) {
                failures.push(format!("ϱ_{p}/{q} on n={n}: oracle {:?}, bound {bound}", oracle.value));
            }
        }
    }
    assert!(cases >= 40);
    verdict(4, &failures);
}

#[test]
fn criterion_5_ekr() {
    let mut failures = Vec::new();
    for (n, k) in [(4usize, 2usize), (5, 2), (6, 3)] {
        let res = exhaustive_max(&SearchSpec::uniform(n, k, 1, 1)).unwrap();
        let expected = BigRational::from_integer(ekr_bound(n, k).unwrap());
        let level = [MeasureTable::level_count(n, k).unwrap()];
        if res.value.as_ref() != Some(&expected)
            || expected != BigRational::from_integer(binomial(n - 1, k - 1))
            || witness_value(&res, 1, &level) != res.value
        {
            failures.push(format!("n={n} k={k}: oracle {:?}, expected {expected}", res.value));
        }
    }
    verdict(5, &failures);
}

/// Per-step checks shared by both replay suites.
fn check_trace(trace: &Trace, t: usize, label: &str, failures: &mut Vec<String>) {
    let mut previous_point = usize::MAX;
    let mut previous_measure = trace.measure_start.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        if step.measure_before != previous_measure || step.measure_after < step.measure_before {
            failures.push(format!("{label}: measure not monotone at step {i}"));
        }
        if step.a_star >= previous_point {
            failures.push(format!("{label}: a_* did not decrease at step {i}"));
        }
        previous_point = step.a_star;
        previous_measure = step.measure_after.clone();
        if !step.terminal {
            let next = if step.after.len() == 1 {
                nip_single(&step.after[0]).map(|r| r.max_point)
            } else {
                nip_cross(&step.after, t).map(|r| r.max_point)
            };
            match next {
                Ok(Some(a)) if a < step.a_star => {}
                other => failures.push(format!("{label}: step {i} left max point {other:?} (a_* = {})", step.a_star)),
            }
        }
    }
    if trace.measure_end != previous_measure {
        failures.push(format!("{label}: final measure differs from last step"));
    }
}

#[test]
fn criterion_6_reduction_replay() {
    let mut failures = Vec::new();
    let mut equal = 0;
    let mut stepped = 0;
    for seed in 0..200u64 {
        let mut rng = rng(6_000 + seed);
        let n = rng.random_range(2..=8usize);
        let khat = rng.random_range(1..n);
        let k = rng.random_range(1..=khat.min(n - khat));
        let mu = random_measure(&mut rng, n, k, khat);
        let f = if seed % 2 == 0 {
            random_intersecting(&mut rng, n, khat, 4 * n)
        } else {
            random_majority(&mut rng, n, khat)
        };
        let label = format!("single seed {seed} (n={n} k={k} k̂={khat})");
        match reduce_single_to_extremal(&f, &mu, k, khat) {
            Ok(trace) => {
                check_trace(&trace, 1, &label, &mut failures);
                stepped += usize::from(!trace.steps.is_empty());
                let end = &trace.end[0];
                if !is_intersecting(end) || end.masks().any(|m| m & 1 == 0 || m.count_ones() as usize > khat) {
                    failures.push(format!("{label}: final family is not an intersecting part of B_(n,1)"));
                }
                let bound = bound_single(n, k, khat, &mu).unwrap();
                if mu.measure(end).unwrap() != trace.measure_end || trace.measure_end > bound {
                    failures.push(format!("{label}: final {} above bound {bound}", trace.measure_end));
                }
                equal += usize::from(trace.measure_end == bound);
            }
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    if equal == 0 {
        failures.push("no single-family seed reached the bound".into());
    }
    println!("single replay: {stepped} seeds took steps, {equal} reached the bound");

    let mut cross_stepped = 0;
    let mut cross_equal = 0;
    let mut seed = 0u64;
    let mut accepted = 0;
    while accepted < 200 {
        seed += 1;
        let mut rng = rng(60_000 + seed);
        let n = rng.random_range(2..=6usize);
        let t = rng.random_range(1..=2usize.min(n));
        let caps = [rng.random_range(t..=n), rng.random_range(t..=n)];
        let ks = [rng.random_range(1..=caps[0]), rng.random_range(1..=caps[1])];
        if check_cross_hypothesis(n, t, &ks, &caps).is_err() {
            continue;
        }
        accepted += 1;
        let measures = [
            random_measure(&mut rng, n, ks[0], caps[0]),
            random_measure(&mut rng, n, ks[1], caps[1]),
        ];
        let pair = if seed % 2 == 0 {
            random_cross_pair(&mut rng, n, t, caps, 6 * n)
        } else {
            random_threshold_pair(&mut rng, n, t, caps)
        };
        let label = format!("cross seed {seed} (n={n} t={t} ks={ks:?} caps={caps:?})");
        let inst = CrossInstance::new(t, pair.to_vec())
            .and_then(|i| i.with_caps(caps.to_vec()))
            .and_then(|i| i.with_measures(measures.to_vec()))
            .unwrap();
        match reduce_cross_to_extremal(&inst) {
            Ok(trace) => {
                check_trace(&trace, t, &label, &mut failures);
                cross_stepped += usize::from(!trace.steps.is_empty());
                if !is_cross_t_intersecting(&trace.end, t) {
                    failures.push(format!("{label}: final pair is not cross {t}-intersecting"));
                }
                let roles: Vec<FamilyRole> = (0..2)
                    .map(|j| FamilyRole::new(ks[j], caps[j], measures[j].clone()))
                    .collect();
                match bound_main(n, t, &roles) {
                    Ok(report) => {
                        if trace.measure_end > report.value {
                            failures.push(format!("{label}: final {} above bound {}", trace.measure_end, report.value));
                        }
                        cross_equal += usize::from(trace.measure_end == report.value);
                    }
                    Err(e) => failures.push(format!("{label}: bound refused: {e}")),
                }
            }
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    println!("cross replay: {cross_stepped} seeds took steps, {cross_equal} reached the bound");
    verdict(6, &failures);
}

#[test]
fn criterion_7_shifting() {
    let mut failures = Vec::new();
    for seed in 0..500u64 {
        let mut rng = rng(7_000 + seed);
        let n = rng.random_range(2..=8usize);
        let t = rng.random_range(1..=2usize.min(n));
        let families: Vec<Family> = if seed % 2 == 0 {
            let caps = [rng.random_range(t..=n), rng.random_range(t..=n)];
            random_cross_pair(&mut rng, n, t, caps, 5 * n).to_vec()
        } else {
            let r = rng.random_range(1..=3);
            (0..r)
                .map(|_| {
                    let members = rng.random_range(1..=3 * n);
                    random_family(&mut rng, n, members)
                })
                .collect()
        };
        let cross = families.len() >= 2 && is_cross_t_intersecting(&families, t);
        let i = rng.random_range(1..n);
        let j = rng.random_range(i + 1..=n);
        let shifted: Vec<Family> = families.iter().map(|f| shift_family(f, i, j).unwrap()).collect();
        for (f, g) in families.iter().zip(&shifted) {
            if *g != naive_shift_family(f, i, j) {
                failures.push(format!("seed {seed}: σ_{i}{j} disagrees with the definition"));
            }
            if g.len() != f.len() || g.level_sizes() != f.level_sizes() {
                failures.push(format!("seed {seed}: σ_{i}{j} changed sizes"));
            }
        }
        if cross && !naive_cross(&shifted, t) {
            failures.push(format!("seed {seed}: σ_{i}{j} broke cross {t}-intersection"));
        }
        let fixed = shift_to_fixpoint(&families).unwrap();
        for (f, g) in families.iter().zip(&fixed) {
            if !is_shifted(g) || g.level_sizes() != f.level_sizes() {
                failures.push(format!("seed {seed}: fixpoint not shifted or sizes changed"));
            }
        }
        if cross && !naive_cross(&fixed, t) {
            failures.push(format!("seed {seed}: fixpoint broke cross {t}-intersection"));
        }
    }
    verdict(7, &failures);
}

#[test]
fn criterion_8_stabilization() {
    let mut failures = Vec::new();
    let count = MeasureTable::counting(4);
    let r0 = argmax_stabilization_r0(4, 1, &count).unwrap();
    if r0 != 3 {
        failures.push(format!("r0 = {r0}, expected 3"));
    }
    for r in 3..=8 {
        let report = bound_nonuniform(4, r, 1).unwrap();
        let points: BTreeSet<usize> = report.argmax.iter().map(|m| m.a).collect();
        if points != BTreeSet::from([1]) {
            failures.push(format!("r={r}: argmax points {points:?}"));
        }
    }
    let r2: BTreeSet<usize> = bound_nonuniform(4, 2, 1).unwrap().argmax.iter().map(|m| m.a).collect();
    if r2 != BTreeSet::from([1, 2, 3, 4]) {
        failures.push(format!("r=2: expected a four-way tie, got {r2:?}"));
    }
    let spec = SearchSpec::nonuniform(4, 3, 1).with_objective(Objective::Product);
    let res = exhaustive_max(&spec).unwrap();
    let closed = product_bound_large_r(4, 1, &count, 3).unwrap();
    let product = res.witness.as_ref().map(|w| {
        w.iter().fold(BigRational::one(), |acc, f| acc * int(f.len() as u64))
    });
    if res.value != Some(int(512)) || closed != int(512) || product != res.value {
        failures.push(format!("product oracle {:?}, closed form {closed}", res.value));
    }
    verdict(8, &failures);
}

#[test]
fn criterion_9_predicates_against_enumeration() {
    let mut failures = Vec::new();
    let mut cross_cases = 0;
    let mut done = 0;
    let mut seed = 0u64;
    while done < 1000 {
        seed += 1;
        let mut rng = rng(9_000 + seed);
        let n = rng.random_range(1..=8usize);
        let r = rng.random_range(1..=3usize);
        let t = rng.random_range(1..=3usize.min(n));
        let families: Vec<Family> = match seed % 3 {
            0 => (0..r)
                .map(|_| {
                    let members = rng.random_range(1..=12);
                    random_family(&mut rng, n, members)
                })
                .collect(),
            1 if r >= 2 => {
                // Every member contains a random t-set, so the tuple is cross t-intersecting.
                let core = random_mask(&mut rng, n, t, t);
                (0..r)
                    .map(|_| {
                        let masks: Vec<u64> =
                            (0..rng.random_range(1..=10)).map(|_| core | rng.random_range(0..1u64 << n)).collect();
                        Family::from_masks(n, masks).unwrap()
                    })
                    .collect()
            }
            _ if r == 2 => {
                let caps = [rng.random_range(t..=n), rng.random_range(t..=n)];
                random_cross_pair(&mut rng, n, t, caps, 4 * n).to_vec()
            }
            _ => vec![random_intersecting(&mut rng, n, n, 3 * n)],
        };
        let product: usize = families.iter().map(Family::len).product();
        if product > 10_000 || product == 0 {
            continue;
        }
        done += 1;
        let label = format!("seed {seed} (n={n} r={} t={t})", families.len());
        if families.len() == 1 {
            let f = &families[0];
            let pair = [f.clone(), f.clone()];
            let naive = naive_cross(&pair, 1);
            if is_intersecting(f) != naive {
                failures.push(format!("{label}: intersecting predicate disagrees"));
            }
            match nip_single(f) {
                Ok(rep) if naive => {
                    if rep.points != naive_nips(&pair, 1) {
                        failures.push(format!("{label}: single NIPs {:?} vs {:?}", rep.points, naive_nips(&pair, 1)));
                    }
                }
                Err(_) if !naive => {}
                other => failures.push(format!("{label}: nip_single returned {other:?}")),
            }
            continue;
        }
        let meets: BTreeSet<u64> = meet_closure(&families).unwrap().masks().collect();
        if meets != naive_meets(&families) {
            failures.push(format!("{label}: meet closure disagrees"));
        }
        let naive = naive_cross(&families, t);
        if is_cross_t_intersecting(&families, t) != naive {
            failures.push(format!("{label}: cross predicate disagrees"));
        }
        match nip_cross(&families, t) {
            Ok(rep) if naive => {
                cross_cases += 1;
                let expected = naive_nips(&families, t);
                if rep.points != expected || rep.max_point != expected.last().copied() {
                    failures.push(format!("{label}: NIPs {:?} vs {expected:?}", rep.points));
                }
                let witness = rep.witnesses.unwrap_or_default();
                let meet = witness.iter().fold(u64::MAX, |acc, s| acc & s.mask());
                let ok = witness.len() == families.len()
                    && witness.iter().zip(&families).all(|(s, f)| f.contains(s))
                    && xfam::setcore::nth_smallest(meet, t) == rep.max_point;
                if !ok {
                    failures.push(format!("{label}: witness does not certify the maximal point"));
                }
            }
            Err(_) if !naive => {}
            other => failures.push(format!("{label}: nip_cross returned {other:?}")),
        }
    }
    assert!(cross_cases >= 300, "only {cross_cases} cross-intersecting instances");
    verdict(9, &failures);
}
