//! One `t`-intersecting family: an up-set walk that only offers sets meeting
//! every chosen member in at least `t` points.

use super::lattice::members;
use super::{Outcome, Problem, Restriction};

struct Walker<'a> {
    p: &'a Problem,
    elems: Vec<usize>,
    /// Bitset of `elems[i..]`.
    suffix: Vec<u128>,
    universe: u128,
    out: Outcome,
}

impl Walker<'_> {
    fn walk(&mut self, i: usize, cur: u128, cur_w: u128, candidates: u128) {
        self.out.nodes += 1;
        let reachable = self.p.weight(0, candidates & self.suffix[i]);
        if let Some((best, _)) = &self.out.best {
            if self.p.score([cur_w + reachable]) < *best {
                return;
            }
        }
        if i == self.elems.len() {
            if cur != 0 && (self.p.restriction != Restriction::Shifted || self.p.lattice.is_shifted(cur)) {
                let score = self.p.score([cur_w]);
                self.out.offer(score, &[cur]);
            }
            return;
        }
        let e = self.elems[i];
        self.walk(i + 1, cur, cur_w, candidates);
        let closed = self.p.restriction == Restriction::None
            || self.p.lattice.strict_supersets[e] & self.universe & !cur == 0;
        if candidates >> e & 1 == 1 && closed {
            self.walk(
                i + 1,
                cur | 1 << e,
                cur_w + self.p.weights[0][e],
                candidates & self.p.compat[e],
            );
        }
    }
}

pub(crate) fn search(p: &Problem) -> Outcome {
    // A member must meet itself in t points, which the universe already ensures.
    let universe = p.universes[0];
    let elems = p.lattice.top_down(universe);
    let mut suffix = vec![0u128; elems.len() + 1];
    for i in (0..elems.len()).rev() {
        suffix[i] = suffix[i + 1] | 1 << elems[i];
    }
    let mut walker = Walker {
        p,
        elems,
        suffix,
        universe,
        out: Outcome { best: None, nodes: 0 },
    };
    walker.walk(0, 0, 0, universe);
    debug_assert!(walker
        .out
        .best
        .as_ref()
        .map_or(true, |(_, w)| members(w[0]).all(|a| members(w[0]).all(|b| p.compat[a] >> b & 1 == 1))));
    walker.out
}
