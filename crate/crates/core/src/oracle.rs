//! Brute-force reference searches for tests.
//!
//! Nothing here calls the solver, and the guard rules are restated inline
//! rather than borrowed from [`crate::model`], so agreement with the solver
//! is evidence rather than tautology.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{BoardBounds, ClickTriplet, MoveKind};

fn step(count: i64, kind: MoveKind, (l, d, r): (i64, i64, i64), min: i64, max: i64) -> Option<i64> {
    let next = match kind {
        MoveKind::SingleLeft => count + l,
        MoveKind::DoubleLeft => count + d,
        MoveKind::SingleRight => {
            if count <= r {
                return None;
            }
            count - r
        }
    };
    (min..=max).contains(&next).then_some(next)
}

fn parts(t: &ClickTriplet) -> (i64, i64, i64) {
    (t.l().into(), t.d().into(), t.r().into())
}

/// Fewest moves from `start` to `target`, found by growing the set of counts
/// reachable in exactly `k` moves for `k = 0..=depth`.
///
/// Each layer is the image of the previous one under every legal move, so it
/// covers every move sequence of length `k`; no visited set is kept between
/// layers.
pub fn layered_min_moves(
    triplet: &ClickTriplet,
    bounds: &BoardBounds,
    start: i64,
    target: i64,
    depth: u32,
) -> Option<u32> {
    let p = parts(triplet);
    let (min, max) = (bounds.min_count(), bounds.max_count());
    let mut layer = BTreeSet::from([start]);
    for k in 0..=depth {
        if layer.contains(&target) {
            return Some(k);
        }
        layer = layer
            .iter()
            .flat_map(|&c| {
                MoveKind::ALL
                    .into_iter()
                    .filter_map(move |m| step(c, m, p, min, max))
            })
            .collect();
    }
    None
}

/// Like [`layered_min_moves`] but records, for every count, the first layer
/// that contains it.
pub fn layered_first_hits(
    triplet: &ClickTriplet,
    bounds: &BoardBounds,
    start: i64,
    depth: u32,
) -> BTreeMap<i64, u32> {
    let p = parts(triplet);
    let (min, max) = (bounds.min_count(), bounds.max_count());
    let mut hits = BTreeMap::new();
    let mut layer = BTreeSet::from([start]);
    for k in 0..=depth {
        for &c in &layer {
            hits.entry(c).or_insert(k);
        }
        layer = layer
            .iter()
            .flat_map(|&c| {
                MoveKind::ALL
                    .into_iter()
                    .filter_map(move |m| step(c, m, p, min, max))
            })
            .collect();
    }
    hits
}

/// Lexicographically first shortest sequence by enumerating every sequence
/// of each length in order. Exponential; keep `depth` small.
pub fn enumerate_sequences(
    triplet: &ClickTriplet,
    bounds: &BoardBounds,
    start: i64,
    target: i64,
    depth: u32,
) -> Option<Vec<MoveKind>> {
    fn walk(
        count: i64,
        left: u32,
        target: i64,
        ctx: ((i64, i64, i64), i64, i64),
        path: &mut Vec<MoveKind>,
    ) -> bool {
        if left == 0 {
            return count == target;
        }
        for kind in MoveKind::ALL {
            if let Some(next) = step(count, kind, ctx.0, ctx.1, ctx.2) {
                path.push(kind);
                if walk(next, left - 1, target, ctx, path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    let ctx = (parts(triplet), bounds.min_count(), bounds.max_count());
    (0..=depth).find_map(|len| {
        let mut path = Vec::new();
        walk(start, len, target, ctx, &mut path).then_some(path)
    })
}

/// Counts reachable from `start` when the board is `[1, ceiling]`, a stand-in
/// for unbounded play at small magnitudes.
pub fn wide_reach(triplet: &ClickTriplet, start: i64, ceiling: i64) -> BTreeSet<i64> {
    let p = parts(triplet);
    let mut seen = BTreeSet::from([start]);
    let mut frontier = vec![start];
    while let Some(c) = frontier.pop() {
        for kind in MoveKind::ALL {
            if let Some(next) = step(c, kind, p, 1, ceiling) {
                if seen.insert(next) {
                    frontier.push(next);
                }
            }
        }
    }
    seen
}

/// Minimum of `x + y + z` for `start + Lx + Dy - Rz = target`, scanning `x`
/// and `y` over `[0, limit]` and solving for `z` directly.
pub fn ilp_box_min(triplet: &ClickTriplet, start: i64, target: i64, limit: u32) -> Option<u32> {
    let (l, d, r) = parts(triplet);
    let mut best: Option<u32> = None;
    for x in 0..=limit {
        for y in 0..=limit {
            let rest = start + l * i64::from(x) + d * i64::from(y) - target;
            if rest < 0 || rest % r != 0 {
                continue;
            }
            let z = rest / r;
            let n = x + y + z as u32;
            if best.is_none_or(|b| n < b) {
                best = Some(n);
            }
        }
    }
    best
}
