#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xfam::{Family, MeasureTable};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mask(rng: &mut ChaCha8Rng, n: usize, lo: usize, hi: usize) -> u64 {
    let size = rng.random_range(lo..=hi);
    let mut elems: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = rng.random_range(i..n);
        elems.swap(i, j);
    }
    elems[..size].iter().fold(0, |m, &e| m | 1 << e)
}

pub fn random_family(rng: &mut ChaCha8Rng, n: usize, members: usize) -> Family {
    let masks: Vec<u64> = (0..members).map(|_| rng.random_range(0..1u64 << n)).collect();
    Family::from_masks(n, masks).unwrap()
}

/// Greedy intersecting family of sets with sizes in `[1, khat]`.
pub fn random_intersecting(rng: &mut ChaCha8Rng, n: usize, khat: usize, tries: usize) -> Family {
    let mut chosen: Vec<u64> = Vec::new();
    for _ in 0..tries {
        let m = random_mask(rng, n, 1, khat);
        if chosen.iter().all(|&c| c & m != 0) && !chosen.contains(&m) {
            chosen.push(m);
        }
    }
    Family::from_masks(n, chosen).unwrap()
}

/// Greedy cross `t`-intersecting pair with member sizes in `[t, caps[j]]`;
/// both families non-empty.
pub fn random_cross_pair(rng: &mut ChaCha8Rng, n: usize, t: usize, caps: [usize; 2], tries: usize) -> [Family; 2] {
    let mut fams: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
    for step in 0..tries {
        let j = step % 2;
        let m = random_mask(rng, n, t, caps[j]);
        let other = &fams[1 - j];
        if other.iter().all(|&o| (o & m).count_ones() as usize >= t) && !fams[j].contains(&m) {
            fams[j].push(m);
        }
    }
    if fams[0].is_empty() || fams[1].is_empty() {
        // Fall back to sets containing [t], which meet each other in t points.
        let p = (1u64 << t) - 1;
        for f in &mut fams {
            f.retain(|&m| m & p == p);
            if f.is_empty() {
                f.push(p);
            }
        }
    }
    [
        Family::from_masks(n, fams[0].clone()).unwrap(),
        Family::from_masks(n, fams[1].clone()).unwrap(),
    ]
}

fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(BigInt::from(rng.random_range(0..=12)), BigInt::from(rng.random_range(1..=6)))
}

/// Weights on sizes `0..=n`, non-increasing on `[lo, hi]` and arbitrary
/// outside it; the window is set to `(lo, hi)`.
pub fn random_measure(rng: &mut ChaCha8Rng, n: usize, lo: usize, hi: usize) -> MeasureTable {
    let mut weights: Vec<BigRational> = (0..=n).map(|_| small_rational(rng)).collect();
    let mut run: Vec<BigRational> = (lo..=hi).map(|_| small_rational(rng)).collect();
    run.sort_by(|a, b| b.cmp(a));
    for (s, w) in (lo..=hi).zip(run) {
        weights[s] = w;
    }
    MeasureTable::new(n, weights, Some((lo, hi))).unwrap()
}

/// Non-increasing on all of `[1, n]`, strictly positive there.
pub fn random_non_increasing(rng: &mut ChaCha8Rng, n: usize) -> MeasureTable {
    let mut run: Vec<BigRational> = (0..=n)
        .map(|_| small_rational(rng) + BigRational::new(BigInt::from(1), BigInt::from(7)))
        .collect();
    run.sort_by(|a, b| b.cmp(a));
    MeasureTable::new(n, run, Some((1, n))).unwrap()
}

/// Every meet of a transversal tuple, by explicit enumeration of the tuples.
pub fn naive_meets(families: &[Family]) -> BTreeSet<u64> {
    let lists: Vec<Vec<u64>> = families.iter().map(|f| f.masks().collect()).collect();
    let mut out = BTreeSet::new();
    if lists.iter().any(Vec::is_empty) {
        return out;
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        let meet = idx.iter().zip(&lists).fold(u64::MAX, |acc, (&i, l)| acc & l[i]);
        out.insert(meet);
        let mut p = 0;
        loop {
            if p == idx.len() {
                return out;
            }
            idx[p] += 1;
            if idx[p] < lists[p].len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

pub fn naive_cross(families: &[Family], t: usize) -> bool {
    naive_meets(families).iter().all(|m| m.count_ones() as usize >= t)
}

/// Points `a` that are the `t`-th smallest element of some transversal meet.
pub fn naive_nips(families: &[Family], t: usize) -> Vec<usize> {
    let mut points = BTreeSet::new();
    for m in naive_meets(families) {
        let elems: Vec<usize> = (0..64).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect();
        if elems.len() >= t {
            points.insert(elems[t - 1]);
        }
    }
    points.into_iter().collect()
}

pub fn naive_shift(m: u64, i: usize, j: usize) -> u64 {
    let (bi, bj) = (1u64 << (i - 1), 1u64 << (j - 1));
    if m & bj != 0 && m & bi == 0 {
        m & !bj | bi
    } else {
        m
    }
}

/// `σ_ij` on a family, written out from the definition.
pub fn naive_shift_family(f: &Family, i: usize, j: usize) -> Family {
    let members: BTreeSet<u64> = f.masks().collect();
    let out: Vec<u64> = members
        .iter()
        .map(|&m| {
            let s = naive_shift(m, i, j);
            if members.contains(&s) {
                m
            } else {
                s
            }
        })
        .collect();
    Family::from_masks(f.n(), out).unwrap()
}

/// Random part of `{F : |F ∩ [2s+1]| ≥ s+1, |F| ≤ khat}` for a random
/// admissible `s`; intersecting, and rarely a star.
pub fn random_majority(rng: &mut ChaCha8Rng, n: usize, khat: usize) -> Family {
    let s_max = ((n - 1) / 2).min(khat - 1);
    let s = rng.random_range(0..=s_max);
    let core = (1u64 << (2 * s + 1)) - 1;
    let masks: Vec<u64> = (0..1u64 << n)
        .filter(|&m| m.count_ones() as usize <= khat && (m & core).count_ones() as usize > s)
        .filter(|_| rng.random_bool(0.6))
        .collect();
    if masks.is_empty() {
        Family::from_masks(n, [1]).unwrap()
    } else {
        Family::from_masks(n, masks).unwrap()
    }
}

/// Random parts of `{|F ∩ [a]| ≥ x}` and `{|G ∩ [a]| ≥ a + t - x}` under the
/// caps; cross `t`-intersecting by counting inside `[a]`.
pub fn random_threshold_pair(rng: &mut ChaCha8Rng, n: usize, t: usize, caps: [usize; 2]) -> [Family; 2] {
    let a = rng.random_range(t..=n);
    let x = rng.random_range(t..=a);
    let need = [x, a + t - x];
    let prefix = (1u64 << a) - 1;
    let pick = |rng: &mut ChaCha8Rng, j: usize| -> Vec<u64> {
        let mut masks: Vec<u64> = (0..1u64 << n)
            .filter(|&m| m.count_ones() as usize <= caps[j] && (m & prefix).count_ones() as usize >= need[j])
            .filter(|_| rng.random_bool(0.6))
            .collect();
        if masks.is_empty() {
            masks.push((1u64 << t) - 1);
        }
        masks
    };
    let first = pick(rng, 0);
    let second = pick(rng, 1);
    let pair = [
        Family::from_masks(n, first).unwrap(),
        Family::from_masks(n, second).unwrap(),
    ];
    if xfam::props::is_cross_t_intersecting(&pair, t) {
        pair
    } else {
        let p = (1u64 << t) - 1;
        [Family::from_masks(n, [p]).unwrap(), Family::from_masks(n, [p]).unwrap()]
    }
}
