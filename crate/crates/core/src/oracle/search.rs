//! Branch and bound over tuples: the first `r - 1` families are walked as
//! up-sets of whatever the earlier families still admit, the last family is
//! the best response.

use rayon::prelude::*;

use super::lattice::members;
use super::{Outcome, Problem, Restriction, Score};
use crate::error::{Error, Result};

/// Decisions on this many leading sets of the first family define one task.
const SPLIT_DEPTH: usize = 10;

/// Walk state for one family level.
struct Level {
    j: usize,
    elems: Vec<usize>,
    /// `suffix[i]` = weight of `elems[i..]`.
    suffix: Vec<u128>,
    admissible: u128,
    /// Weight bounds for later families, from what the earlier ones admit.
    later: Vec<u128>,
    floor: Option<Vec<u64>>,
}

struct Walker<'a> {
    p: &'a Problem,
    floor_value: Option<Score>,
    out: Outcome,
    chosen: Vec<u128>,
    chosen_w: Vec<u128>,
}

impl<'a> Walker<'a> {
    fn new(p: &'a Problem, floor_value: Option<Score>) -> Walker<'a> {
        Walker {
            p,
            floor_value,
            out: Outcome { best: None, nodes: 0 },
            chosen: Vec::with_capacity(p.r),
            chosen_w: Vec::with_capacity(p.r),
        }
    }

    fn threshold(&self) -> Option<&Score> {
        match (&self.floor_value, &self.out.best) {
            (Some(a), Some((b, _))) => Some(if a > b { a } else { b }),
            (Some(a), None) => Some(a),
            (None, Some((b, _))) => Some(b),
            (None, None) => None,
        }
    }

    fn level(&self, j: usize, floor: Option<Vec<u64>>) -> Level {
        let p = self.p;
        let admissible_for = |i: usize| match &floor {
            None => p.universes[i],
            Some(f) => p.lattice.admissible(p.universes[i], f, &p.compat),
        };
        let admissible = admissible_for(j);
        let elems = p.lattice.top_down(admissible);
        let mut suffix = vec![0u128; elems.len() + 1];
        for i in (0..elems.len()).rev() {
            suffix[i] = suffix[i + 1] + p.weights[j][elems[i]];
        }
        let later = ((j + 1)..p.r).map(|i| p.weight(i, admissible_for(i))).collect();
        Level {
            j,
            elems,
            suffix,
            admissible,
            later,
            floor,
        }
    }

    fn bound(&self, lv: &Level, cur_w: u128, i: usize) -> Score {
        let parts = self
            .chosen_w
            .iter()
            .copied()
            .chain(std::iter::once(cur_w + lv.suffix[i]))
            .chain(lv.later.iter().copied());
        self.p.score(parts)
    }

    fn pruned(&self, lv: &Level, cur_w: u128, i: usize) -> bool {
        match self.threshold() {
            Some(th) => self.bound(lv, cur_w, i) < *th,
            None => false,
        }
    }

    fn walk(&mut self, lv: &Level, i: usize, cur: u128, cur_w: u128) {
        self.out.nodes += 1;
        if self.pruned(lv, cur_w, i) {
            return;
        }
        if i == lv.elems.len() {
            self.close_family(lv, cur, cur_w);
            return;
        }
        let e = lv.elems[i];
        self.walk(lv, i + 1, cur, cur_w);
        if self.includable(lv, cur, e) {
            self.walk(lv, i + 1, cur | 1 << e, cur_w + self.p.weights[lv.j][e]);
        }
    }

    fn includable(&self, lv: &Level, cur: u128, e: usize) -> bool {
        self.p.restriction == Restriction::None
            || self.p.lattice.strict_supersets[e] & lv.admissible & !cur == 0
    }

    fn close_family(&mut self, lv: &Level, cur: u128, cur_w: u128) {
        if cur == 0 {
            return;
        }
        if self.p.restriction == Restriction::Shifted && !self.p.lattice.is_shifted(cur) {
            return;
        }
        let floor = self.p.lattice.extend_floor(lv.floor.as_deref(), cur);
        self.chosen.push(cur);
        self.chosen_w.push(cur_w);
        if lv.j + 2 == self.p.r {
            self.finish(&floor);
        } else {
            let next = self.level(lv.j + 1, Some(floor));
            self.walk(&next, 0, 0, 0);
        }
        self.chosen.pop();
        self.chosen_w.pop();
    }

    /// The last family is everything the others admit.
    fn finish(&mut self, floor: &[u64]) {
        let p = self.p;
        let last = p.r - 1;
        let response = p.lattice.admissible(p.universes[last], floor, &p.compat);
        if response == 0 {
            return;
        }
        if p.restriction == Restriction::Shifted && !p.lattice.is_shifted(response) {
            return;
        }
        let score = p.score(self.chosen_w.iter().copied().chain(std::iter::once(p.weight(last, response))));
        let mut witness = self.chosen.clone();
        witness.push(response);
        self.out.offer(score, &witness);
    }
}

/// Prefixes of the first family's walk, each a `(next index, members)` pair.
fn tasks(p: &Problem, lv: &Level) -> Vec<(usize, u128, u128)> {
    let depth = SPLIT_DEPTH.min(lv.elems.len());
    let mut frontier = vec![(0u128, 0u128)];
    for i in 0..depth {
        let e = lv.elems[i];
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for (cur, w) in frontier {
            next.push((cur, w));
            let ok = p.restriction == Restriction::None
                || p.lattice.strict_supersets[e] & lv.admissible & !cur == 0;
            if ok {
                next.push((cur | 1 << e, w + p.weights[0][e]));
            }
        }
        frontier = next;
    }
    frontier.into_iter().map(|(cur, w)| (depth, cur, w)).collect()
}

pub(crate) fn search(p: &Problem, threads: usize) -> Result<Outcome> {
    let seed = p.seed();
    let root = Walker::new(p, None).level(0, None);
    let work = tasks(p, &root);
    let run = |&(i, cur, w): &(usize, u128, u128)| {
        let mut walker = Walker::new(p, seed.clone());
        walker.walk(&root, i, cur, w);
        walker.out
    };
    let outcomes: Vec<Outcome> = if threads <= 1 {
        work.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::ResourceGuard(format!("cannot start {threads} threads: {e}")))?;
        pool.install(|| work.par_iter().map(run).collect())
    };
    let mut total = Outcome {
        best: None,
        nodes: work.len() as u64,
    };
    for o in outcomes {
        total.merge(o);
    }
    debug_assert!(total
        .best
        .as_ref()
        .map_or(true, |(_, w)| w.iter().all(|&b| members(b).count() > 0)));
    Ok(total)
}
