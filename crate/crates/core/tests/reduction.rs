mod common;

use rand::Rng;
use xfam::extremal::{bound_main, check_cross_hypothesis, FamilyRole};
use xfam::nip::{reduce_cross_to_extremal, StepCase};
use xfam::props::is_cross_t_intersecting;
use xfam::{CrossInstance, Family};

use common::*;

/// Parts of `{|F ∩ [a]| ≥ x_j}` with `Σ x_j ≥ 2a + t`, so every triple meets
/// inside `[a]` in at least `t` points.
fn threshold_triple(rng: &mut rand_chacha::ChaCha8Rng, n: usize, t: usize) -> Vec<Family> {
    let a = rng.random_range(t..=n);
    let mut need = [a; 3];
    let mut slack = a - t;
    for x in &mut need {
        let cut = rng.random_range(0..=slack);
        *x -= cut;
        slack -= cut;
    }
    let prefix = (1u64 << a) - 1;
    need.iter()
        .map(|&x| {
            let mut masks: Vec<u64> = (0..1u64 << n)
                .filter(|&m| (m & prefix).count_ones() as usize >= x)
                .filter(|_| rng.random_bool(0.5))
                .collect();
            if masks.is_empty() {
                masks.push(prefix);
            }
            Family::from_masks(n, masks).unwrap()
        })
        .collect()
}

#[test]
fn three_family_replay() {
    let mut steps = 0;
    let mut terminal = 0;
    for seed in 0..150u64 {
        let mut rng = rng(3_000 + seed);
        let n = rng.random_range(2..=6usize);
        let t = rng.random_range(1..=2usize.min(n));
        let families = threshold_triple(&mut rng, n, t);
        assert!(is_cross_t_intersecting(&families, t));
        let caps = vec![n; 3];
        let ks: Vec<usize> = (0..3).map(|_| rng.random_range(1..=t)).collect();
        assert!(check_cross_hypothesis(n, t, &ks, &caps).is_ok());
        let measures: Vec<_> = ks.iter().map(|&k| random_measure(&mut rng, n, k, n)).collect();
        let inst = CrossInstance::new(t, families)
            .unwrap()
            .with_measures(measures.clone())
            .unwrap();
        let trace = reduce_cross_to_extremal(&inst).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(trace.measure_end >= trace.measure_start);
        assert!(is_cross_t_intersecting(&trace.end, t));
        steps += trace.steps.len();
        terminal += usize::from(trace.is_terminal_case());
        for w in trace.steps.windows(2) {
            assert!(w[1].a_star < w[0].a_star, "seed {seed}");
        }
        for step in &trace.steps {
            assert_eq!(step.case == StepCase::Terminal, step.terminal);
            assert!(step.measure_after >= step.measure_before);
        }
        let roles: Vec<FamilyRole> = (0..3).map(|j| FamilyRole::new(ks[j], n, measures[j].clone())).collect();
        let bound = bound_main(n, t, &roles).unwrap();
        assert!(trace.measure_end <= bound.value, "seed {seed}");
    }
    assert!(steps > 20 && terminal > 0, "steps {steps}, terminal {terminal}");
}

#[test]
fn trace_json_has_every_step() {
    let tri = Family::from_sets(4, &[vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3, 4]]).unwrap();
    let inst = CrossInstance::new(1, vec![tri.clone(), tri])
        .unwrap()
        .with_measures(vec![xfam::MeasureTable::counting(4); 2])
        .unwrap();
    let trace = reduce_cross_to_extremal(&inst).unwrap();
    let json = trace.to_json_value();
    assert_eq!(json["steps"].as_array().unwrap().len(), trace.steps.len());
    assert_eq!(json["t"], 1);
    assert!(json["final"].is_array());
}
